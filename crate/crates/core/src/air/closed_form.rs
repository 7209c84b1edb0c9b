use alloc::vec;

use super::belief::JointBelief;
use crate::num::{exp, expm1};
use crate::prob::{Family, Policy};
use crate::Result;

/// Posterior mass of the chosen decision with signed rate `s`:
/// `(1 - e^{-s}) / (1 - e^{-s/p})`.
///
/// `s = eta` is the success branch and `s = -eta` the failure branch. For
/// `s < 0` the ratio is evaluated as `expm1(-s) e^{s/p} / (-expm1(s/p))` so that
/// tiny `p` does not overflow.
pub fn posterior_mass(s: f64, p: f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    if s == 0.0 {
        return p;
    }
    let x = s / p;
    if s > 0.0 {
        expm1(-s) / expm1(-x)
    } else {
        expm1(-s) * exp(x) / -expm1(x)
    }
}

/// Posterior mass of the chosen decision after a success and after a failure
/// in the Bernoulli closed form: `(nu1, nu0)`.
pub fn posterior_masses(p: f64, eta: f64) -> (f64, f64) {
    (posterior_mass(eta, p), posterior_mass(-eta, p))
}

/// The belief whose posterior is the simplified APS update, at `alpha = q = p`.
///
/// It zeroes every `beta`-derivative of AIR at `p = q`: for each decision `j`
/// the predictive mean `m_j` and the conditional means are
/// `m_j = (p_j - nu0) / (nu1 - nu0)`, `theta_j(j) = nu1 m_j / p_j` and
/// `theta_i(j) = m_j (1 - nu1) / (1 - p_j)` for `i != j`.
pub fn closed_form_belief(p: &Policy, eta: f64) -> Result<JointBelief> {
    let k = p.len();
    let alpha = p.as_slice().to_vec();
    let mut theta = vec![0.0; k * k];
    for j in 0..k {
        let pj = p.get(j);
        let (own, other) = if pj >= 1.0 || k == 1 {
            (0.5, 0.5)
        } else if pj <= 0.0 {
            // zero-mass decision: nothing is learned from it
            (0.5, 0.5)
        } else {
            let (nu1, nu0) = posterior_masses(pj, eta);
            let m = ((pj - nu0) / (nu1 - nu0)).clamp(0.0, 1.0);
            (
                (nu1 * m / pj).clamp(0.0, 1.0),
                (m * (1.0 - nu1) / (1.0 - pj)).clamp(0.0, 1.0),
            )
        };
        for i in 0..k {
            theta[i * k + j] = if i == j { own } else { other };
        }
    }
    JointBelief::from_theta(Family::Bernoulli, alpha, &theta)
}
