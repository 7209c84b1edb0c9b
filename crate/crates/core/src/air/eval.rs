use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::belief::JointBelief;
use super::expfam::ExpFamilyView;
use crate::error::arg_err;
use crate::num::{ln, xlny, xlogxy};
use crate::prob::{clamp_prob, Family, Policy, EPS_MIN};
use crate::{Error, Result};

/// The three parts of AIR: `value = regret - (info_gain + regularization) / eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirTerms {
    /// `E[f_M(pi*) - f_M(pi)]`.
    pub regret: f64,
    /// `E[KL(posterior of pi*, marginal of pi*)]` (quadratic form for Gaussian).
    pub info_gain: f64,
    /// `KL(alpha, q)`.
    pub regularization: f64,
    /// Total.
    pub value: f64,
}

/// Gradient of AIR in `(alpha, beta)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AirGradient {
    /// `dAIR / dalpha(i)`.
    pub d_alpha: Vec<f64>,
    /// `dAIR / dbeta[i][j]`, row-major.
    pub d_beta: Vec<f64>,
}

impl AirGradient {
    /// Largest `|d_beta|`.
    pub fn max_abs_beta(&self) -> f64 {
        self.d_beta.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// AIR at fixed `(p, q, eta)` as a function of the belief.
///
/// The value is defined on the whole positive orthant of `(alpha, beta)`, not
/// only on the simplex: the information term uses the homogeneous extension
/// and the regularizer the generalized KL `sum a log(a/q) - sum a + sum q`.
/// On the simplex these coincide with the usual quantities, and the exact
/// gradient of the extension is what [`Air::gradient_raw`] returns, so single
/// coordinate finite differences are meaningful.
#[derive(Debug, Clone)]
pub struct Air {
    p: Vec<f64>,
    q: Vec<f64>,
    eta: f64,
    family: Family,
}

impl Air {
    /// Fix the decision law `p`, reference `q` and learning rate `eta`.
    pub fn new(p: &Policy, q: &Policy, eta: f64, family: Family) -> Result<Self> {
        if p.len() != q.len() {
            return Err(arg_err!("p has {} entries, q has {}", p.len(), q.len()));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(arg_err!("eta must be positive, got {eta}"));
        }
        if !q.is_interior(EPS_MIN) {
            return Err(Error::Boundary("reference q must be interior".to_string()));
        }
        Ok(Self {
            p: p.as_slice().to_vec(),
            q: q.as_slice().to_vec(),
            eta,
            family,
        })
    }

    /// Replace `p` keeping `q`, `eta`.
    pub(crate) fn with_p(&self, p: &[f64]) -> Self {
        Self {
            p: p.to_vec(),
            q: self.q.clone(),
            eta: self.eta,
            family: self.family,
        }
    }

    /// Number of decisions.
    pub fn k(&self) -> usize {
        self.p.len()
    }

    /// Learning rate.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Family.
    pub fn family(&self) -> Family {
        self.family
    }

    /// Decision law.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Reference law.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    fn check(&self, b: &JointBelief) -> Result<()> {
        if b.k() != self.k() {
            return Err(arg_err!("belief has K = {}, problem has K = {}", b.k(), self.k()));
        }
        if b.family() != self.family {
            return Err(arg_err!("belief family does not match"));
        }
        Ok(())
    }

    /// Information content of column `j`: the per-decision mutual information
    /// between `pi*` and the observation (extended homogeneously).
    fn info_column(&self, alpha: &[f64], beta: &[f64], s: f64, j: usize) -> f64 {
        let k = self.k();
        let m: f64 = (0..k).map(|i| beta[i * k + j]).sum();
        match self.family {
            Family::Bernoulli => {
                let mut acc = 0.0;
                for i in 0..k {
                    let a = alpha[i];
                    if a <= 0.0 {
                        continue;
                    }
                    let b = beta[i * k + j];
                    let t = b / a;
                    acc += xlny(b, t) + xlny(a - b, 1.0 - t);
                }
                acc - xlny(m, m) - xlny(s - m, 1.0 - m)
            }
            Family::GaussianUnitVariance => {
                let mut acc = 0.0;
                for i in 0..k {
                    let a = alpha[i];
                    if a <= 0.0 {
                        continue;
                    }
                    let b = beta[i * k + j];
                    acc += b * b / a;
                }
                0.5 * acc + 0.5 * m * m * (s - 2.0)
            }
        }
    }

    fn generalized_kl(&self, alpha: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (a, q) in alpha.iter().zip(&self.q) {
            acc += xlogxy(*a, *q) - a + q;
        }
        acc
    }

    /// Terms at an arbitrary (possibly off-simplex) point.
    pub fn terms_raw(&self, alpha: &[f64], beta: &[f64]) -> AirTerms {
        let k = self.k();
        let s: f64 = alpha.iter().sum();
        let mut regret = 0.0;
        for i in 0..k {
            regret += beta[i * k + i];
        }
        let mut info = 0.0;
        for j in 0..k {
            let pj = self.p[j];
            let m: f64 = (0..k).map(|i| beta[i * k + j]).sum();
            regret -= pj * m;
            if pj > 0.0 {
                info += pj * self.info_column(alpha, beta, s, j);
            }
        }
        let reg = self.generalized_kl(alpha);
        AirTerms {
            regret,
            info_gain: info,
            regularization: reg,
            value: regret - (info + reg) / self.eta,
        }
    }

    /// Value at an arbitrary point.
    pub fn value_raw(&self, alpha: &[f64], beta: &[f64]) -> f64 {
        self.terms_raw(alpha, beta).value
    }

    /// Validated value.
    pub fn value(&self, b: &JointBelief) -> Result<f64> {
        self.check(b)?;
        Ok(self.value_raw(b.alpha(), b.beta()))
    }

    /// Validated terms.
    pub fn terms(&self, b: &JointBelief) -> Result<AirTerms> {
        self.check(b)?;
        Ok(self.terms_raw(b.alpha(), b.beta()))
    }

    /// Exact gradient of [`Air::value_raw`], written into `ga` (length K) and
    /// `gb` (length K*K). Conditional means are clamped before logs; rows with
    /// `alpha(i) = 0` use the predictive mean in place of `theta_i`.
    pub fn gradient_raw(&self, alpha: &[f64], beta: &[f64], ga: &mut [f64], gb: &mut [f64]) {
        let k = self.k();
        let eta = self.eta;
        let view = ExpFamilyView::new(self.family);
        let s: f64 = alpha.iter().sum();
        for i in 0..k {
            ga[i] = ln(self.q[i] / alpha[i].max(f64::MIN_POSITIVE)) / eta;
        }
        for j in 0..k {
            let pj = self.p[j];
            let m: f64 = (0..k).map(|i| beta[i * k + j]).sum();
            let (gm, am, corr) = match self.family {
                Family::Bernoulli => {
                    let mc = clamp_prob(m);
                    (view.natural_param(mc), view.log_partition_at_mean(mc), (s - 1.0) / (1.0 - mc))
                }
                Family::GaussianUnitVariance => (m, 0.5 * m * m, m * (s - 1.0)),
            };
            for i in 0..k {
                let a = alpha[i];
                let t = if a > 0.0 { beta[i * k + j] / a } else { m };
                let diag = if i == j { 1.0 } else { 0.0 };
                gb[i * k + j] = diag - pj + pj / eta * (gm - view.natural_param(t) - corr);
                ga[i] += pj / eta * (view.log_partition_at_mean(t) - am);
            }
        }
    }

    /// Validated gradient; rows with `alpha(i) = 0` are a boundary error.
    pub fn gradient(&self, b: &JointBelief) -> Result<AirGradient> {
        self.check(b)?;
        if let Some(i) = b.alpha().iter().position(|&a| a <= 0.0) {
            return Err(Error::Boundary(alloc::format!("alpha({i}) = 0")));
        }
        let k = self.k();
        let mut g = AirGradient {
            d_alpha: vec![0.0; k],
            d_beta: vec![0.0; k * k],
        };
        self.gradient_raw(b.alpha(), b.beta(), &mut g.d_alpha, &mut g.d_beta);
        Ok(g)
    }

    /// Write `c` such that `AIR(p', belief) = c0 + sum_j p'(j) c[j]` for every
    /// `p'`, and return `c0`.
    pub fn p_coefficients_raw(&self, alpha: &[f64], beta: &[f64], c: &mut [f64]) -> f64 {
        let k = self.k();
        let s: f64 = alpha.iter().sum();
        let mut c0 = 0.0;
        for i in 0..k {
            c0 += beta[i * k + i];
        }
        c0 -= self.generalized_kl(alpha) / self.eta;
        for j in 0..k {
            let m: f64 = (0..k).map(|i| beta[i * k + j]).sum();
            c[j] = -m - self.info_column(alpha, beta, s, j) / self.eta;
        }
        c0
    }

    /// Validated p-coefficients.
    pub fn p_coefficients(&self, b: &JointBelief) -> Result<(f64, Vec<f64>)> {
        self.check(b)?;
        let mut c = vec![0.0; self.k()];
        let c0 = self.p_coefficients_raw(b.alpha(), b.beta(), &mut c);
        Ok((c0, c))
    }
}

/// Frank-Wolfe gap over the full `(alpha, beta)` polytope of `family`:
/// `max over vertices <g, v> - <g, nu>`. For a concave objective this bounds
/// `sup AIR - AIR(nu)` and is the gradient term of the generic regret bound.
pub fn fw_gap_full(family: Family, alpha: &[f64], beta: &[f64], ga: &[f64], gb: &[f64]) -> f64 {
    let k = alpha.len();
    let mut best = f64::NEG_INFINITY;
    let mut cur = 0.0;
    for i in 0..k {
        let mut v = ga[i];
        cur += ga[i] * alpha[i];
        for j in 0..k {
            let g = gb[i * k + j];
            cur += g * beta[i * k + j];
            v += match family {
                Family::Bernoulli => g.max(0.0),
                Family::GaussianUnitVariance => g.abs(),
            };
        }
        best = best.max(v);
    }
    best - cur
}

/// `AIR_{q,eta}(p, belief)`.
pub fn air_eval(p: &Policy, q: &Policy, eta: f64, belief: &JointBelief) -> Result<f64> {
    Air::new(p, q, eta, belief.family())?.value(belief)
}

/// The three retrievable terms of AIR.
pub fn air_terms(p: &Policy, q: &Policy, eta: f64, belief: &JointBelief) -> Result<AirTerms> {
    Air::new(p, q, eta, belief.family())?.terms(belief)
}

/// Analytic gradient of AIR.
pub fn air_grad(p: &Policy, q: &Policy, eta: f64, belief: &JointBelief) -> Result<AirGradient> {
    Air::new(p, q, eta, belief.family())?.gradient(belief)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unif2() -> Policy {
        Policy::uniform(2)
    }

    #[test]
    fn point_mass_example() {
        // 0.5 regret, posterior stays a point mass, KL(e_1, q) = log 2
        let b = JointBelief::point_mass(Family::Bernoulli, &[1.0, 0.0], 0).unwrap();
        let v = air_eval(&unif2(), &unif2(), 1.0, &b).unwrap();
        assert!((v - (0.5 - 2f64.ln())).abs() < 1e-12);
        assert!((v + 0.193147).abs() < 5e-7);
    }

    #[test]
    fn symmetric_example() {
        let b = JointBelief::from_theta(Family::Bernoulli, vec![0.5, 0.5], &[0.8, 0.2, 0.2, 0.8])
            .unwrap();
        let t = air_terms(&unif2(), &unif2(), 1.0, &b).unwrap();
        assert!((t.regret - 0.3).abs() < 1e-12);
        assert!((t.info_gain - 0.192745).abs() < 5e-7);
        assert!(t.regularization.abs() < 1e-15);
        assert!((t.value - 0.107255).abs() < 5e-7);
    }

    #[test]
    fn independent_pistar_gives_zero() {
        // theta rows identical: pi* independent of observations, no regret
        let q = Policy::new(vec![0.2, 0.3, 0.5]).unwrap();
        let theta = [0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4];
        let b = JointBelief::from_theta(Family::Bernoulli, q.as_slice().to_vec(), &theta).unwrap();
        assert!(air_eval(&q, &q, 0.7, &b).unwrap().abs() < 1e-15);
    }

    #[test]
    fn boundary_q_is_rejected() {
        let b = JointBelief::point_mass(Family::Bernoulli, &[1.0, 0.0], 0).unwrap();
        let q = Policy::point_mass(2, 0);
        assert!(matches!(air_eval(&unif2(), &q, 1.0, &b), Err(Error::Boundary(_))));
        assert!(matches!(air_grad(&unif2(), &unif2(), 1.0, &b), Err(Error::Boundary(_))));
    }

    #[test]
    fn p_coefficients_reproduce_value() {
        let b = JointBelief::from_theta(
            Family::Bernoulli,
            vec![0.2, 0.5, 0.3],
            &[0.9, 0.3, 0.1, 0.2, 0.6, 0.5, 0.4, 0.1, 0.7],
        )
        .unwrap();
        let q = Policy::new(vec![0.3, 0.3, 0.4]).unwrap();
        let air = Air::new(&Policy::uniform(3), &q, 0.4, Family::Bernoulli).unwrap();
        let (c0, c) = air.p_coefficients(&b).unwrap();
        for p in [[0.1, 0.2, 0.7], [1.0, 0.0, 0.0], [0.3, 0.3, 0.4]] {
            let pp = Policy::new(p.to_vec()).unwrap();
            let v = air_eval(&pp, &q, 0.4, &b).unwrap();
            let lin = c0 + crate::num::dot(&c, &p);
            assert!((v - lin).abs() < 1e-12);
        }
    }
}
