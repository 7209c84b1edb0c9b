use alloc::vec::Vec;

use super::belief::JointBelief;
use crate::error::arg_err;
use crate::num::exp;
use crate::prob::{Family, Observation, Policy};
use crate::{Error, Result};

/// Bayes update of the marginal of `pi*` after observing `o` at decision `pi`.
///
/// Bernoulli: posterior(i) is proportional to `beta[i][pi]` after a success
/// and to `alpha(i) - beta[i][pi]` after a failure. Gaussian: the belief is
/// read as one unit-variance model per `pi*` with means `theta_i`.
pub fn marginal_posterior(belief: &JointBelief, pi: usize, o: Observation) -> Result<Policy> {
    let k = belief.k();
    if pi >= k {
        return Err(arg_err!("decision {pi} out of range (K = {k})"));
    }
    let w: Vec<f64> = match belief.family() {
        Family::Bernoulli => {
            let bit = o
                .as_bit()
                .ok_or_else(|| arg_err!("Bernoulli observation must be 0 or 1, got {}", o.value))?;
            (0..k)
                .map(|i| {
                    let b = belief.beta_at(i, pi);
                    let x = if bit { b } else { belief.alpha()[i] - b };
                    x.max(0.0)
                })
                .collect()
        }
        Family::GaussianUnitVariance => {
            let lik: Vec<f64> = (0..k)
                .map(|i| {
                    let d = o.value - belief.theta(i, pi);
                    -0.5 * d * d
                })
                .collect();
            let top = lik.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (0..k).map(|i| belief.alpha()[i] * exp(lik[i] - top)).collect()
        }
    };
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroLikelihood { pi, obs: o.value });
    }
    Policy::from_unnormalized(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> JointBelief {
        JointBelief::from_theta(Family::Bernoulli, alloc::vec![0.5, 0.5], &[0.8, 0.2, 0.2, 0.8])
            .unwrap()
    }

    #[test]
    fn hand_bayes() {
        let post = marginal_posterior(&sym(), 0, Observation::bit(true)).unwrap();
        assert!((post.get(0) - 0.8).abs() < 1e-12 && (post.get(1) - 0.2).abs() < 1e-12);
        let post = marginal_posterior(&sym(), 0, Observation::bit(false)).unwrap();
        assert!((post.get(0) - 0.2).abs() < 1e-12 && (post.get(1) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn point_mass_stays() {
        let b = JointBelief::point_mass(Family::Bernoulli, &[0.6, 0.3], 1).unwrap();
        let post = marginal_posterior(&b, 0, Observation::bit(true)).unwrap();
        assert_eq!(post.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn impossible_observation_errors() {
        let b = JointBelief::point_mass(Family::Bernoulli, &[1.0, 0.0], 0).unwrap();
        let err = marginal_posterior(&b, 0, Observation::bit(false)).unwrap_err();
        assert_eq!(err, Error::ZeroLikelihood { pi: 0, obs: 0.0 });
        assert!(marginal_posterior(&b, 0, Observation::new(0.5)).is_err());
    }
}
