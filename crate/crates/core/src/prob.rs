//! Policies, observation models and divergences.
//!
//! Probabilities that enter a logarithm are clamped to `[EPS_MIN, 1 - EPS_MIN]`
//! by the callers that need it; the divergences themselves follow the usual
//! `0 log 0 = 0` convention and return `f64::INFINITY` when absolute
//! continuity fails.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::arg_err;
use crate::num::{exp, ln, sqrt, xlogxy};
use crate::{Error, Result};

/// Smallest probability treated as interior.
pub const EPS_MIN: f64 = 1e-12;

/// Tolerance on `sum(weights) == 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Clamp a probability into `[EPS_MIN, 1 - EPS_MIN]`.
#[inline]
pub fn clamp_prob(x: f64) -> f64 {
    x.clamp(EPS_MIN, 1.0 - EPS_MIN)
}

/// A probability vector over decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    w: Vec<f64>,
}

impl Policy {
    /// Validate and wrap `weights`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(arg_err!("policy must have at least one entry"));
        }
        let mut sum = 0.0;
        for (i, &x) in weights.iter().enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(arg_err!("policy weight {i} = {x} is not a probability"));
            }
            sum += x;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOL * (weights.len() as f64).max(1.0) {
            return Err(arg_err!("policy weights sum to {sum}, not 1"));
        }
        Ok(Self { w: weights })
    }

    /// Normalize a nonnegative vector with positive mass.
    pub fn from_unnormalized(mut weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s.is_finite() && s > 0.0) || weights.iter().any(|x| !(*x >= 0.0)) {
            return Err(arg_err!("cannot normalize weights with total {s}"));
        }
        for x in weights.iter_mut() {
            *x /= s;
        }
        Self::new(weights)
    }

    /// Normalize log-weights (softmax).
    pub fn from_log_weights(lw: &[f64]) -> Result<Self> {
        let mut v = lw.to_vec();
        crate::num::softmax_in_place(&mut v);
        Self::from_unnormalized(v)
    }

    /// Uniform policy over `k` decisions.
    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "uniform policy needs k > 0");
        Self {
            w: vec![1.0 / k as f64; k],
        }
    }

    /// Point mass on decision `i`.
    pub fn point_mass(k: usize, i: usize) -> Self {
        assert!(i < k, "point mass index out of range");
        let mut w = vec![0.0; k];
        w[i] = 1.0;
        Self { w }
    }

    /// Number of decisions.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// The weights.
    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Consume into the weight vector.
    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    /// Weight of decision `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.w[i]
    }

    /// Interior iff every weight is at least `eps`.
    pub fn is_interior(&self, eps: f64) -> bool {
        self.w.iter().all(|&x| x >= eps)
    }

    /// `(1 - gamma) * self + gamma * uniform`.
    pub fn mix_uniform(&self, gamma: f64) -> Self {
        if gamma == 0.0 {
            return self.clone();
        }
        let k = self.w.len() as f64;
        let w = self.w.iter().map(|&x| (1.0 - gamma) * x + gamma / k).collect();
        Self { w }
    }

    /// Mix with the uniform distribution on `support` only.
    pub fn mix_uniform_on(&self, gamma: f64, support: &[usize]) -> Self {
        if gamma == 0.0 || support.is_empty() {
            return self.clone();
        }
        let mut w: Vec<f64> = self.w.iter().map(|&x| (1.0 - gamma) * x).collect();
        let share = gamma / support.len() as f64;
        for &i in support {
            w[i] += share;
        }
        Self { w }
    }

    /// Inverse-CDF sample from a uniform draw `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &x) in self.w.iter().enumerate() {
            if x > 0.0 {
                last = i;
                acc += x;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    /// Draw a decision.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng.random::<f64>())
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Policy) -> f64 {
        self.w
            .iter()
            .zip(&other.w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Observation noise family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    /// Rewards are Bernoulli draws; means in `[0, 1]`.
    Bernoulli,
    /// Rewards are mean plus unit Gaussian noise; means in `[-1, 1]`.
    GaussianUnitVariance,
}

impl Family {
    /// Admissible range of mean rewards.
    pub fn mean_range(self) -> (f64, f64) {
        match self {
            Family::Bernoulli => (0.0, 1.0),
            Family::GaussianUnitVariance => (-1.0, 1.0),
        }
    }

    /// Squared Hellinger distance between the observation laws with the
    /// given means.
    pub fn hellinger_sq(self, a: f64, b: f64) -> f64 {
        match self {
            Family::Bernoulli => hellinger_bernoulli(a, b),
            Family::GaussianUnitVariance => {
                let d = a - b;
                2.0 * (1.0 - exp(-d * d / 8.0))
            }
        }
    }

    /// KL divergence between the observation laws with the given means.
    pub fn kl(self, a: f64, b: f64) -> f64 {
        match self {
            Family::Bernoulli => kl_bernoulli(a, b),
            Family::GaussianUnitVariance => 0.5 * (a - b) * (a - b),
        }
    }
}

/// One observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Observed value: 0/1 for Bernoulli, real for Gaussian.
    pub value: f64,
}

impl Observation {
    /// Wrap a raw value.
    pub fn new(value: f64) -> Self {
        Self { value }
    }

    /// Bernoulli observation from a bool.
    pub fn bit(b: bool) -> Self {
        Self {
            value: if b { 1.0 } else { 0.0 },
        }
    }

    /// The value as a bit, if it is exactly 0 or 1.
    pub fn as_bit(self) -> Option<bool> {
        if self.value == 1.0 {
            Some(true)
        } else if self.value == 0.0 {
            Some(false)
        } else {
            None
        }
    }
}

/// A mapping from decisions to observation laws, summarized by its means.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    means: Vec<f64>,
    family: Family,
}

impl Model {
    /// Build and validate a model.
    pub fn new(means: Vec<f64>, family: Family) -> Result<Self> {
        if means.is_empty() {
            return Err(arg_err!("model needs at least one decision"));
        }
        let (lo, hi) = family.mean_range();
        for (i, &m) in means.iter().enumerate() {
            if !(m >= lo && m <= hi) {
                return Err(arg_err!("mean {m} of decision {i} outside [{lo}, {hi}]"));
            }
        }
        Ok(Self { means, family })
    }

    /// Bernoulli model shorthand.
    pub fn bernoulli(means: Vec<f64>) -> Result<Self> {
        Self::new(means, Family::Bernoulli)
    }

    /// Mean rewards `f_M`.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Mean reward of decision `pi`.
    pub fn mean(&self, pi: usize) -> f64 {
        self.means[pi]
    }

    /// Noise family.
    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of decisions.
    pub fn num_decisions(&self) -> usize {
        self.means.len()
    }

    /// Optimal decision, lowest index on ties.
    pub fn optimal_decision(&self) -> usize {
        argmax(&self.means)
    }

    /// Probability of a Bernoulli observation at decision `pi`.
    pub fn bernoulli_prob(&self, pi: usize, o: bool) -> f64 {
        let m = self.means[pi];
        if o {
            m
        } else {
            1.0 - m
        }
    }
}

/// Lowest-index argmax.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// A finite, non-empty model class sharing `K` and family.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelClass {
    models: Vec<Model>,
    optimal: Vec<usize>,
}

impl ModelClass {
    /// Validate and build.
    pub fn new(models: Vec<Model>) -> Result<Self> {
        let first = models
            .first()
            .ok_or_else(|| arg_err!("model class must be non-empty"))?;
        let k = first.num_decisions();
        let fam = first.family();
        for (i, m) in models.iter().enumerate() {
            if m.num_decisions() != k || m.family() != fam {
                return Err(arg_err!("model {i} disagrees on K or family"));
            }
        }
        let optimal: Vec<usize> = models.iter().map(Model::optimal_decision).collect();
        for (m, &o) in models.iter().zip(&optimal) {
            debug_assert!(m.means().iter().all(|&x| x <= m.mean(o)));
        }
        Ok(Self { models, optimal })
    }

    /// Bernoulli class from rows of means.
    pub fn bernoulli(rows: &[&[f64]]) -> Result<Self> {
        let models = rows
            .iter()
            .map(|r| Model::bernoulli(r.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(models)
    }

    /// The models.
    pub fn models(&self) -> &[Model] {
        &self.models
    }

    /// Number of models.
    pub fn len(&self) -> usize {
        self.models.len()
    }

    /// Always false: classes are non-empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of decisions.
    pub fn num_decisions(&self) -> usize {
        self.models[0].num_decisions()
    }

    /// Shared family.
    pub fn family(&self) -> Family {
        self.models[0].family()
    }

    /// `pi_M` for model `m`.
    pub fn optimal_decision(&self, m: usize) -> usize {
        self.optimal[m]
    }

    /// All `pi_M`.
    pub fn optimal_decisions(&self) -> &[usize] {
        &self.optimal
    }

    /// Law of `pi_M` under a distribution `mu` over models.
    pub fn induced_policy(&self, mu: &[f64]) -> Result<Policy> {
        let mut w = vec![0.0; self.num_decisions()];
        for (m, &x) in mu.iter().enumerate() {
            w[self.optimal[m]] += x;
        }
        Policy::from_unnormalized(w)
    }

    /// Mixture model `sum_m mu(m) M` (means average for both families).
    pub fn mixture(&self, mu: &[f64]) -> Result<Model> {
        let k = self.num_decisions();
        let mut means = vec![0.0; k];
        for (m, &w) in mu.iter().enumerate() {
            for (j, x) in means.iter_mut().enumerate() {
                *x += w * self.models[m].mean(j);
            }
        }
        let (lo, hi) = self.family().mean_range();
        for x in means.iter_mut() {
            *x = x.clamp(lo, hi);
        }
        Model::new(means, self.family())
    }
}

/// Binary KL `kl(x, y)`.
///
/// Returns `f64::INFINITY` when `y` sits on the boundary opposite to `x`.
/// Otherwise `y` is clamped into `[EPS_MIN, 1 - EPS_MIN]`.
pub fn kl_bernoulli(x: f64, y: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
    if (y == 0.0 && x > 0.0) || (y == 1.0 && x < 1.0) {
        return f64::INFINITY;
    }
    let y = clamp_prob(y);
    xlogxy(x, y) + xlogxy(1.0 - x, 1.0 - y)
}

/// Categorical KL `sum p_i log(p_i / q_i)`.
pub fn kl_categorical(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Argument(alloc::format!(
            "length mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            s += a * ln(a / b);
        }
    }
    Ok(s.max(0.0))
}

/// Squared Hellinger distance `sum (sqrt p_i - sqrt q_i)^2`, range `[0, 2]`.
pub fn hellinger_sq(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(arg_err!("length mismatch: {} vs {}", p.len(), q.len()));
    }
    Ok(p.iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = sqrt(a) - sqrt(b);
            d * d
        })
        .sum())
}

/// Squared Hellinger distance between `Bern(a)` and `Bern(b)`.
pub fn hellinger_bernoulli(a: f64, b: f64) -> f64 {
    let d1 = sqrt(a) - sqrt(b);
    let d0 = sqrt(1.0 - a) - sqrt(1.0 - b);
    d1 * d1 + d0 * d0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kl_bernoulli_examples() {
        assert_eq!(kl_bernoulli(0.5, 0.5), 0.0);
        // categorical oracle over {0, 1}
        let cat = 0.8 * (0.8f64 / 0.5).ln() + 0.2 * (0.2f64 / 0.5).ln();
        assert!(close(kl_bernoulli(0.8, 0.5), cat, 1e-15));
        assert!(close(kl_bernoulli(0.8, 0.5), 0.192745, 5e-7));
        assert!(close(kl_bernoulli(1.0, 0.5), core::f64::consts::LN_2, 1e-15));
    }

    #[test]
    fn kl_bernoulli_boundary_is_infinite() {
        assert_eq!(kl_bernoulli(0.3, 0.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.3, 1.0), f64::INFINITY);
        assert!(kl_bernoulli(0.0, 0.0).is_finite());
        assert!(kl_bernoulli(1.0, 1.0).is_finite());
    }

    #[test]
    fn kl_categorical_examples() {
        assert_eq!(kl_categorical(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        let v = kl_categorical(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!(close(v, 2f64.ln() , 1e-15));
        let v = kl_categorical(&[0.8, 0.2], &[0.5, 0.5]).unwrap();
        assert!(close(v, kl_bernoulli(0.8, 0.5), 1e-15));
        assert_eq!(
            kl_categorical(&[0.5, 0.5], &[1.0, 0.0]).unwrap(),
            f64::INFINITY
        );
        assert!(matches!(
            kl_categorical(&[1.0], &[0.5, 0.5]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn hellinger_examples() {
        assert_eq!(hellinger_sq(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!(close(hellinger_sq(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0, 1e-15));
        let by_hand = (0.8f64.sqrt() - 0.5f64.sqrt()).powi(2)
            + (0.2f64.sqrt() - 0.5f64.sqrt()).powi(2);
        let v = hellinger_sq(&[0.8, 0.2], &[0.5, 0.5]).unwrap();
        assert!(close(v, by_hand, 1e-15));
        // 0.051317 is this value under the 1/2-normalized convention; the
        // unnormalized sum used throughout the crate is twice that
        assert!(close(v, 0.102633, 5e-7));
        assert!(close(v / 2.0, 0.051317, 5e-7));
        assert!(close(hellinger_bernoulli(0.8, 0.5), v, 1e-15));
    }

    #[test]
    fn policy_validation() {
        assert!(Policy::new(vec![0.5, 0.5]).is_ok());
        assert!(Policy::new(vec![0.5, 0.6]).is_err());
        assert!(Policy::new(vec![-0.1, 1.1]).is_err());
        assert!(Policy::new(vec![]).is_err());
        assert!(Policy::uniform(4).is_interior(EPS_MIN));
        assert!(!Policy::point_mass(3, 1).is_interior(EPS_MIN));
        let p = Policy::point_mass(3, 1).mix_uniform(0.3);
        assert!(p.is_interior(0.09));
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sample_with_skips_zero_mass() {
        let p = Policy::new(vec![0.0, 0.25, 0.0, 0.75]).unwrap();
        assert_eq!(p.sample_with(0.0), 1);
        assert_eq!(p.sample_with(0.3), 3);
        assert_eq!(p.sample_with(0.999_999_999), 3);
    }

    #[test]
    fn model_class_ties_take_lowest_index() {
        let c = ModelClass::bernoulli(&[&[0.5, 0.5, 0.2], &[0.1, 0.9, 0.9]]).unwrap();
        assert_eq!(c.optimal_decisions(), &[0, 1]);
        assert!(ModelClass::bernoulli(&[&[0.5], &[0.1, 0.2]]).is_err());
        assert!(Model::bernoulli(vec![1.2]).is_err());
        assert!(Model::new(vec![-0.5], Family::GaussianUnitVariance).is_ok());
    }

    #[test]
    fn gaussian_hellinger_matches_closed_form() {
        // both equal 2(1 - BC) with BC the Bhattacharyya coefficient
        let bc: f64 = (-(0.6f64 * 0.6) / 8.0).exp();
        let h = Family::GaussianUnitVariance.hellinger_sq(0.3, -0.3);
        assert!(close(h, 2.0 * (1.0 - bc), 1e-15));
    }
}
