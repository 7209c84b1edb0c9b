use alloc::vec;
use alloc::vec::Vec;

use crate::error::arg_err;
use crate::prob::{Family, ModelClass, Policy, SIMPLEX_TOL};
use crate::Result;

/// A belief over (model, optimal decision) in the concave `(alpha, beta)`
/// coordinates.
///
/// `alpha(i)` is the marginal of `pi* = i`; `beta[i][j] = alpha(i) theta_i(j)`
/// where `theta_i(j)` is the conditional mean reward of decision `j` given
/// `pi* = i`. Only these moments enter AIR for Bernoulli observations (and for
/// the homogeneous-noise Gaussian expression), so they are the state.
#[derive(Debug, Clone, PartialEq)]
pub struct JointBelief {
    family: Family,
    k: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl JointBelief {
    /// Validated constructor; `beta` is row-major `K x K`.
    pub fn new(family: Family, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let k = alpha.len();
        Policy::new(alpha.clone())?;
        if beta.len() != k * k {
            return Err(arg_err!("beta has {} entries, expected {}", beta.len(), k * k));
        }
        let (lo, hi) = family.mean_range();
        for i in 0..k {
            let a = alpha[i];
            let slack = SIMPLEX_TOL * a.max(1e-300);
            for j in 0..k {
                let b = beta[i * k + j];
                if !(b.is_finite() && b >= lo * a - slack && b <= hi * a + slack) {
                    return Err(arg_err!(
                        "beta[{i}][{j}] = {b} outside [{}, {}] for alpha = {a}",
                        lo * a,
                        hi * a
                    ));
                }
            }
        }
        Ok(Self {
            family,
            k,
            alpha,
            beta,
        })
    }

    /// Unchecked constructor. Used for derivative checks off the simplex;
    /// evaluation routines accept such points in their `*_raw` forms only.
    pub fn raw(family: Family, alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        let k = alpha.len();
        assert_eq!(beta.len(), k * k);
        Self {
            family,
            k,
            alpha,
            beta,
        }
    }

    /// Build from `alpha` and the conditional means `theta` (row-major).
    pub fn from_theta(family: Family, alpha: Vec<f64>, theta: &[f64]) -> Result<Self> {
        let k = alpha.len();
        if theta.len() != k * k {
            return Err(arg_err!("theta has {} entries, expected {}", theta.len(), k * k));
        }
        let (lo, hi) = family.mean_range();
        if let Some(t) = theta.iter().find(|t| !(**t >= lo && **t <= hi)) {
            return Err(arg_err!("theta entry {t} outside [{lo}, {hi}]"));
        }
        let beta = (0..k * k).map(|ij| alpha[ij / k] * theta[ij]).collect();
        Self::new(family, alpha, beta)
    }

    /// Point mass on the pair (model with `means`, `pistar`).
    pub fn point_mass(family: Family, means: &[f64], pistar: usize) -> Result<Self> {
        let k = means.len();
        let mut alpha = vec![0.0; k];
        alpha[pistar] = 1.0;
        let mut beta = vec![0.0; k * k];
        beta[pistar * k..(pistar + 1) * k].copy_from_slice(means);
        Self::new(family, alpha, beta)
    }

    /// Belief on pairs `(M, pi_M)` induced by a model distribution `mu`.
    pub fn from_model_mixture(class: &ModelClass, mu: &[f64]) -> Result<Self> {
        let k = class.num_decisions();
        let mut nu = vec![0.0; class.len() * k];
        for (m, &w) in mu.iter().enumerate() {
            nu[m * k + class.optimal_decision(m)] = w;
        }
        Self::from_joint(class, &nu)
    }

    /// Belief from a joint distribution `nu[m * K + i]` over models and `pi*`.
    pub fn from_joint(class: &ModelClass, nu: &[f64]) -> Result<Self> {
        let k = class.num_decisions();
        if nu.len() != class.len() * k {
            return Err(arg_err!("joint belief has {} entries, expected {}", nu.len(), class.len() * k));
        }
        let (alpha, beta) = joint_moments(class, nu);
        Self::new(class.family(), alpha, beta)
    }

    /// Observation family.
    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of decisions.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Marginal of `pi*`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Row-major `beta`.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `beta[i][j]`.
    pub fn beta_at(&self, i: usize, j: usize) -> f64 {
        self.beta[i * self.k + j]
    }

    /// `theta_i(j)`; zero when `alpha(i) = 0`.
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        let a = self.alpha[i];
        if a > 0.0 {
            self.beta_at(i, j) / a
        } else {
            0.0
        }
    }

    /// `theta_avg(j) = sum_i beta[i][j]`, the predictive mean of decision `j`.
    pub fn theta_avg(&self, j: usize) -> f64 {
        (0..self.k).map(|i| self.beta_at(i, j)).sum()
    }

    /// The marginal as a `Policy`.
    pub fn alpha_policy(&self) -> Result<Policy> {
        Policy::new(self.alpha.clone())
    }

    /// `lambda * self + (1 - lambda) * other` in `(alpha, beta)` coordinates.
    pub fn mix(&self, other: &JointBelief, lambda: f64) -> JointBelief {
        assert_eq!(self.k, other.k);
        let f = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect()
        };
        JointBelief {
            family: self.family,
            k: self.k,
            alpha: f(&self.alpha, &other.alpha),
            beta: f(&self.beta, &other.beta),
        }
    }

}

/// `(alpha, beta)` moments of a joint distribution over models and `pi*`.
pub(crate) fn joint_moments(class: &ModelClass, nu: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let k = class.num_decisions();
    let mut alpha = vec![0.0; k];
    let mut beta = vec![0.0; k * k];
    for (m, model) in class.models().iter().enumerate() {
        for i in 0..k {
            let w = nu[m * k + i];
            if w == 0.0 {
                continue;
            }
            alpha[i] += w;
            for j in 0..k {
                beta[i * k + j] += w * model.mean(j);
            }
        }
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_roundtrip() {
        let b = JointBelief::from_theta(Family::Bernoulli, vec![0.5, 0.5], &[0.8, 0.2, 0.2, 0.8])
            .unwrap();
        assert!((b.theta(0, 0) - 0.8).abs() < 1e-15);
        assert!((b.theta_avg(0) - 0.5).abs() < 1e-15);
        assert!(JointBelief::from_theta(Family::Bernoulli, vec![0.5, 0.5], &[1.2, 0.2, 0.2, 0.8])
            .is_err());
        assert!(JointBelief::from_theta(
            Family::GaussianUnitVariance,
            vec![0.5, 0.5],
            &[-0.9, 0.2, 0.2, 0.8]
        )
        .is_ok());
    }

    #[test]
    fn induced_from_model_mixture() {
        let c = ModelClass::bernoulli(&[&[0.9, 0.1], &[0.2, 0.6], &[0.7, 0.3]]).unwrap();
        let b = JointBelief::from_model_mixture(&c, &[0.2, 0.5, 0.3]).unwrap();
        assert!((b.alpha()[0] - 0.5).abs() < 1e-15);
        assert!((b.beta_at(0, 0) - (0.2 * 0.9 + 0.3 * 0.7)).abs() < 1e-15);
        assert!((b.beta_at(1, 1) - 0.3).abs() < 1e-15);
    }
}
