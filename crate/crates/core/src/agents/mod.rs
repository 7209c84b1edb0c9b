//! Decision-making agents behind one step interface.
//!
//! A round is `select` (draw a decision from the current law), then `update`
//! with the observation. Policy-based agents keep two laws: the reference
//! `q_t` produced by their update rule, and the played law
//! `p_t = (1 - gamma) q_t + gamma * uniform`. Forced exploration is applied
//! after the update so the reference chain is exactly the algorithm's.

use rand::RngCore;

use crate::num::{ln, sqrt};
use crate::prob::{Observation, Policy, EPS_MIN};
use crate::Result;

mod aps;
mod baselines;

pub use aps::{
    simplified_aps_update, simplified_aps_update_loss, Ams, AmsConfig, Aps, SimplifiedAps,
};
pub use baselines::{
    bernoulli_reduce, exp3_update, thompson_sample, thompson_step, ucb1_select, Exp3, Scheduled,
    Thompson, Ucb1, UniformAgent,
};

/// Default forced-exploration rate.
pub const DEFAULT_GAMMA: f64 = 0.001;

/// Per-round diagnostics of the belief-based agents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoundDiagnostics {
    /// Learning rate used this round.
    pub eta: f64,
    /// AIR (or MAIR) of the played law at the round's belief.
    pub air: f64,
    /// Frank-Wolfe gap of the belief at the played law.
    pub fw_gap: f64,
    /// Duality gap of the saddle solve, for minimax agents.
    pub duality_gap: Option<f64>,
    /// Whether the inner solver met its tolerance.
    pub converged: bool,
    /// Per-round summand of the agent's regret bound.
    pub bound_term: f64,
    /// Constant part of the bound: `log |Pi| / eta` or `log |M| / eta`.
    pub bound_offset: f64,
}

/// A sequential decision maker.
pub trait Agent {
    /// Short identifier.
    fn name(&self) -> &'static str;

    /// Number of decisions.
    fn num_decisions(&self) -> usize;

    /// Law of the next decision, for randomized policy-based agents.
    fn policy(&self) -> Option<&Policy>;

    /// Choose the decision for round `t` (0-based).
    fn select(&mut self, t: usize, rng: &mut dyn RngCore) -> usize;

    /// Feed back the observation of round `t`.
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()>;

    /// Diagnostics of the last completed round, if the agent records them.
    fn diagnostics(&self) -> Option<&RoundDiagnostics> {
        None
    }
}

/// Learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSchedule {
    /// Constant.
    Fixed(f64),
    /// `sqrt(log K / (2KT + 4T))` for a known horizon `T`.
    Horizon(usize),
    /// `sqrt(log K / ((2K + 4) t))` with `t` counted from 1.
    Anytime,
}

impl EtaSchedule {
    /// Learning rate at round `t` (0-based) for `k` decisions.
    pub fn eta(&self, k: usize, t: usize) -> f64 {
        // with one decision nothing is learned; any positive rate will do
        let lk = if k > 1 { ln(k as f64) } else { 1.0 };
        let kf = k as f64;
        match *self {
            EtaSchedule::Fixed(e) => e,
            EtaSchedule::Horizon(n) => sqrt(lk / ((2.0 * kf + 4.0) * n.max(1) as f64)),
            EtaSchedule::Anytime => sqrt(lk / ((2.0 * kf + 4.0) * (t + 1) as f64)),
        }
    }

    /// Whether the rate is the same every round.
    pub fn is_constant(&self) -> bool {
        !matches!(self, EtaSchedule::Anytime)
    }
}

/// Raise every weight to at least `EPS_MIN` (by a tiny uniform mix) so that
/// logs of the reference stay finite.
pub fn ensure_interior(q: Policy) -> Policy {
    if q.is_interior(EPS_MIN) {
        q
    } else {
        q.mix_uniform((q.len() as f64 * EPS_MIN).min(1.0))
    }
}

/// Decode a binary reward.
pub(crate) fn reward_bit(obs: Observation) -> Result<bool> {
    obs.as_bit()
        .ok_or_else(|| crate::error::arg_err!("expected a binary observation, got {}", obs.value))
}

pub(crate) fn check_index(k: usize, chosen: usize) -> Result<()> {
    if chosen >= k {
        return Err(crate::error::arg_err!("decision {chosen} out of range for K = {k}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizon_rate() {
        let e = EtaSchedule::Horizon(2000).eta(16, 0);
        let want = (16f64.ln() / (2.0 * 16.0 * 2000.0 + 4.0 * 2000.0)).sqrt();
        assert!((e - want).abs() < 1e-15);
        let a = EtaSchedule::Anytime;
        assert!(a.eta(16, 0) > a.eta(16, 10));
    }

    #[test]
    fn interior_floor() {
        let q = ensure_interior(Policy::point_mass(3, 1));
        assert!(q.is_interior(EPS_MIN));
    }
}
