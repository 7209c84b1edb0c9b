//! Simplified APS for Gaussian linear bandits over a finite action set.
//!
//! Rewards are `theta^T a` plus noise. The agent runs exponential weights on
//! the modified inverse-propensity estimate
//! `r(a) = a^T S^{-1} a_t r_t + (eta/2) (a^T S^{-1} a - (a^T S^{-1} a_t)^2)`
//! with `S = E_{a~p}[a a^T]`, then mixes in uniform exploration over an
//! exploration set that keeps `S` well conditioned.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::RngCore;

use crate::agents::{Agent, EtaSchedule};
use crate::error::arg_err;
use crate::num::ln;
use crate::prob::{Observation, Policy};
use crate::{Error, Result};

/// Default eigenvalue floor for inverting the second-moment matrix.
pub const LAMBDA_FLOOR: f64 = 1e-8;

/// A finite set of actions in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearActionSet {
    d: usize,
    actions: Vec<Vec<f64>>,
}

impl LinearActionSet {
    /// Validate that the actions are non-empty, share a dimension and span it.
    pub fn new(actions: Vec<Vec<f64>>) -> Result<Self> {
        let d = actions.first().map(|a| a.len()).unwrap_or(0);
        if d == 0 {
            return Err(arg_err!("action set must contain at least one non-empty action"));
        }
        if let Some(i) = actions.iter().position(|a| a.len() != d || a.iter().any(|x| !x.is_finite())) {
            return Err(arg_err!("action {i} has the wrong dimension or a non-finite entry"));
        }
        let set = Self { d, actions };
        let lmin = min_eigenvalue(&set.second_moment(&Policy::uniform(set.len()))?);
        if !(lmin > 1e-12) {
            return Err(arg_err!("actions do not span R^{d} (lambda_min = {lmin:e})"));
        }
        Ok(set)
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of actions.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    /// Always false: construction rejects empty sets.
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Action `i`.
    pub fn action(&self, i: usize) -> &[f64] {
        &self.actions[i]
    }

    /// All actions.
    pub fn actions(&self) -> &[Vec<f64>] {
        &self.actions
    }

    /// `E_{a~p}[a a^T]`.
    pub fn second_moment(&self, p: &Policy) -> Result<DMatrix<f64>> {
        if p.len() != self.len() {
            return Err(arg_err!("policy has {} entries for {} actions", p.len(), self.len()));
        }
        let mut s = DMatrix::zeros(self.d, self.d);
        for (a, &w) in self.actions.iter().zip(p.as_slice()) {
            if w == 0.0 {
                continue;
            }
            let v = DVector::from_column_slice(a);
            s += w * &v * v.transpose();
        }
        Ok(s)
    }

    /// Mean rewards `theta^T a` for every action.
    pub fn means(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.d {
            return Err(arg_err!("theta has dimension {}, actions {}", theta.len(), self.d));
        }
        Ok(self.actions.iter().map(|a| crate::num::dot(a, theta)).collect())
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Inverse through a symmetric eigendecomposition, refusing eigenvalues
/// below `floor`.
pub fn floored_inverse(m: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    let eig = m.clone().symmetric_eigen();
    let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmin >= floor) {
        return Err(Error::Conditioning { lambda_min: lmin });
    }
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
    Ok(&eig.eigenvectors * inv * eig.eigenvectors.transpose())
}

/// Per-action reward estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEstimate {
    /// `r(a)` for every action.
    pub rhat: Vec<f64>,
}

/// Modified IPW estimate with the default eigenvalue floor.
pub fn modified_ipw(
    actions: &LinearActionSet,
    p: &Policy,
    chosen: usize,
    r: f64,
    eta: f64,
) -> Result<LinearEstimate> {
    modified_ipw_floor(actions, p, chosen, r, eta, LAMBDA_FLOOR)
}

/// Modified IPW estimate with an explicit eigenvalue floor.
pub fn modified_ipw_floor(
    actions: &LinearActionSet,
    p: &Policy,
    chosen: usize,
    r: f64,
    eta: f64,
    floor: f64,
) -> Result<LinearEstimate> {
    if chosen >= actions.len() {
        return Err(arg_err!("action {chosen} out of range"));
    }
    let sinv = floored_inverse(&actions.second_moment(p)?, floor)?;
    let at = DVector::from_column_slice(actions.action(chosen));
    let u = &sinv * at;
    let rhat = actions
        .actions()
        .iter()
        .map(|a| {
            let v = DVector::from_column_slice(a);
            let x = v.dot(&u);
            let y = v.dot(&(&sinv * &v));
            x * r + 0.5 * eta * (y - x * x)
        })
        .collect();
    Ok(LinearEstimate { rhat })
}

/// Which actions receive forced exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExplorationSet {
    /// Every action.
    #[default]
    Full,
    /// A greedy log-det subset of at most `d(d+1)/2` actions.
    GreedyLogDet,
}

/// Indices of the exploration set.
pub fn exploration_indices(actions: &LinearActionSet, kind: ExplorationSet) -> Vec<usize> {
    let n = actions.len();
    match kind {
        ExplorationSet::Full => (0..n).collect(),
        ExplorationSet::GreedyLogDet => {
            let d = actions.dim();
            let target = (d * (d + 1) / 2).min(n);
            let mut chosen: Vec<usize> = Vec::with_capacity(target);
            // small ridge keeps the log-det finite before the set spans R^d
            let mut m = DMatrix::<f64>::identity(d, d) * 1e-6;
            while chosen.len() < target {
                let mut best = (usize::MAX, f64::NEG_INFINITY);
                let minv = match floored_inverse(&m, 0.0) {
                    Ok(x) => x,
                    Err(_) => break,
                };
                for i in (0..n).filter(|i| !chosen.contains(i)) {
                    let v = DVector::from_column_slice(actions.action(i));
                    // det(M + a a^T) = det(M) (1 + a^T M^{-1} a)
                    let gain = ln(1.0 + v.dot(&(&minv * &v)));
                    if gain > best.1 {
                        best = (i, gain);
                    }
                }
                if best.0 == usize::MAX {
                    break;
                }
                let v = DVector::from_column_slice(actions.action(best.0));
                m += &v * v.transpose();
                chosen.push(best.0);
            }
            chosen.sort_unstable();
            let mut w = vec![0.0; n];
            for &i in &chosen {
                w[i] = 1.0 / chosen.len() as f64;
            }
            let spans = Policy::new(w)
                .ok()
                .and_then(|p| actions.second_moment(&p).ok())
                .map(|s| min_eigenvalue(&s) > 1e-12)
                .unwrap_or(false);
            if spans {
                chosen
            } else {
                (0..n).collect()
            }
        }
    }
}

/// One exponential-weights step on the modified IPW estimate, followed by
/// the exploration mix.
pub fn glb_step(
    actions: &LinearActionSet,
    p: &Policy,
    chosen: usize,
    r: f64,
    eta: f64,
    gamma: f64,
    exploration: &[usize],
) -> Result<Policy> {
    let est = modified_ipw(actions, p, chosen, r, eta)?;
    Ok(exp_weights(p, &est.rhat, eta)?.mix_uniform_on(gamma, exploration))
}

/// `p(a) exp(eta r(a))`, normalized.
pub fn exp_weights(p: &Policy, rhat: &[f64], eta: f64) -> Result<Policy> {
    let lw: Vec<f64> = p
        .as_slice()
        .iter()
        .zip(rhat)
        .map(|(&w, &r)| if w > 0.0 { ln(w) + eta * r } else { f64::NEG_INFINITY })
        .collect();
    Policy::from_log_weights(&lw)
}

/// Simplified APS for Gaussian linear bandits.
#[derive(Debug, Clone)]
pub struct Glb {
    actions: LinearActionSet,
    explore: Vec<usize>,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
}

impl Glb {
    /// Start from uniform exploration over the exploration set.
    pub fn new(actions: LinearActionSet, eta: EtaSchedule, gamma: f64, kind: ExplorationSet) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(arg_err!("the linear agent needs forced exploration gamma in (0, 1]"));
        }
        let explore = exploration_indices(&actions, kind);
        let p = Policy::uniform(actions.len());
        Ok(Self {
            actions,
            explore,
            p,
            eta,
            gamma,
        })
    }

    /// Exploration set in use.
    pub fn exploration(&self) -> &[usize] {
        &self.explore
    }

    /// Action set.
    pub fn actions(&self) -> &LinearActionSet {
        &self.actions
    }
}

impl Agent for Glb {
    fn name(&self) -> &'static str {
        "glb"
    }
    fn num_decisions(&self) -> usize {
        self.actions.len()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        self.p.sample(rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        let eta = self.eta.eta(self.actions.len(), t);
        self.p = glb_step(&self.actions, &self.p, chosen, obs.value, eta, self.gamma, &self.explore)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> LinearActionSet {
        LinearActionSet::new(vec![vec![0.5], vec![1.0]]).unwrap()
    }

    #[test]
    fn one_dimensional_example() {
        let e = modified_ipw(&line(), &Policy::uniform(2), 1, 1.0, 0.1).unwrap();
        assert!((e.rhat[0] - 0.788).abs() < 1e-12);
        assert!((e.rhat[1] - 1.552).abs() < 1e-12);
    }

    #[test]
    fn symmetric_actions_have_no_regularizer() {
        let set = LinearActionSet::new(vec![vec![-1.0], vec![1.0]]).unwrap();
        let p = Policy::new(vec![0.3, 0.7]).unwrap();
        for chosen in 0..2 {
            let with = modified_ipw(&set, &p, chosen, 0.0, 0.7).unwrap();
            assert!(with.rhat.iter().all(|x| x.abs() < 1e-15));
        }
    }

    #[test]
    fn exp_weights_ratio() {
        let p = Policy::uniform(2);
        let est = modified_ipw(&line(), &p, 1, 1.0, 0.1).unwrap();
        let next = exp_weights(&p, &est.rhat, 0.1).unwrap();
        let want = (0.1f64 * (1.552 - 0.788)).exp();
        assert!((next.get(1) / next.get(0) - want).abs() < 1e-12);
        let same = exp_weights(&p, &[0.0, 0.0], 0.1).unwrap().mix_uniform(0.1);
        assert!(same.max_abs_diff(&p) < 1e-15);
    }

    #[test]
    fn rank_deficient_sets_are_rejected() {
        assert!(LinearActionSet::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]]).is_err());
        let set = LinearActionSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let p = Policy::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            modified_ipw(&set, &p, 0, 1.0, 0.1),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn greedy_subset_spans() {
        let acts: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let a = i as f64 * 0.5;
                vec![libm::cos(a), libm::sin(a), 0.3 * (i % 3) as f64 - 0.3]
            })
            .collect();
        let set = LinearActionSet::new(acts).unwrap();
        let idx = exploration_indices(&set, ExplorationSet::GreedyLogDet);
        assert!(idx.len() <= 6 && !idx.is_empty());
        let mut w = vec![0.0; set.len()];
        for &i in &idx {
            w[i] = 1.0 / idx.len() as f64;
        }
        let s = set.second_moment(&Policy::new(w).unwrap()).unwrap();
        assert!(min_eigenvalue(&s) > 1e-6);
    }
}
