use crate::num::{exp, ln, ln1p, logit, sigmoid};
use crate::prob::{clamp_prob, Family};

/// Natural-parameter view of the observation family.
///
/// Bernoulli: `g(theta) = logit(theta)`, `A(g) = log(1 + e^g)`.
/// Gaussian (unit variance): `g(theta) = theta`, `A(g) = g^2 / 2`.
/// The AIR gradients are differences of `g` and of `A(g(theta))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpFamilyView {
    /// Family tag.
    pub family: Family,
}

impl ExpFamilyView {
    /// View for `family`.
    pub fn new(family: Family) -> Self {
        Self { family }
    }

    /// Natural parameter `g(theta)`; Bernoulli means are clamped first.
    pub fn natural_param(&self, theta: f64) -> f64 {
        match self.family {
            Family::Bernoulli => logit(clamp_prob(theta)),
            Family::GaussianUnitVariance => theta,
        }
    }

    /// Log-partition `A(g)`.
    pub fn log_partition(&self, g: f64) -> f64 {
        match self.family {
            // log(1 + e^g) without overflow
            Family::Bernoulli => {
                if g > 0.0 {
                    g + ln1p(exp(-g))
                } else {
                    ln1p(exp(g))
                }
            }
            Family::GaussianUnitVariance => 0.5 * g * g,
        }
    }

    /// Mean from natural parameter, `A'(g)`.
    pub fn mean_of(&self, g: f64) -> f64 {
        match self.family {
            Family::Bernoulli => sigmoid(g),
            Family::GaussianUnitVariance => g,
        }
    }

    /// `A(g(theta))` evaluated directly in the mean parameter.
    pub fn log_partition_at_mean(&self, theta: f64) -> f64 {
        match self.family {
            Family::Bernoulli => -ln(1.0 - clamp_prob(theta)),
            Family::GaussianUnitVariance => 0.5 * theta * theta,
        }
    }
}
