//! Classical baselines and reward plumbing.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_distr::{Beta, Distribution};

use super::{check_index, reward_bit, Agent, EtaSchedule};
use crate::error::arg_err;
use crate::num::{exp, ln, sqrt};
use crate::prob::{Observation, Policy};
use crate::Result;

/// Exponential-weights step: multiply the chosen weight by
/// `exp(eta * r / p(chosen))` and renormalize.
pub fn exp3_update(weights: &[f64], chosen: usize, r: f64, eta: f64) -> Result<Policy> {
    check_index(weights.len(), chosen)?;
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(arg_err!("EXP3 weights must be positive and finite"));
    }
    let total: f64 = weights.iter().sum();
    let pc = weights[chosen] / total;
    let mut w = weights.to_vec();
    w[chosen] *= exp(eta * r / pc);
    Policy::from_unnormalized(w)
}

/// UCB1 choice at round `t >= 1`: an untried decision if any, otherwise the
/// argmax of `mean + sqrt(2 ln t / n)` (lowest index on ties).
pub fn ucb1_select(counts: &[u64], means: &[f64], t: u64) -> usize {
    if let Some(i) = counts.iter().position(|&n| n == 0) {
        return i;
    }
    let lt = ln(t.max(1) as f64);
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (&n, &m)) in counts.iter().zip(means).enumerate() {
        let v = m + sqrt(2.0 * lt / n as f64);
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Beta-Bernoulli conjugate update: success adds to `a`, failure to `b`.
pub fn thompson_step(betas: &[(f64, f64)], chosen: usize, r: bool) -> Vec<(f64, f64)> {
    let mut out = betas.to_vec();
    if r {
        out[chosen].0 += 1.0;
    } else {
        out[chosen].1 += 1.0;
    }
    out
}

/// Argmax of one posterior sample per decision (lowest index on ties).
pub fn thompson_sample<R: Rng + ?Sized>(betas: &[(f64, f64)], rng: &mut R) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &(a, b)) in betas.iter().enumerate() {
        let x = Beta::new(a, b).map(|d| d.sample(rng)).unwrap_or(f64::NAN);
        if x > best.1 {
            best = (i, x);
        }
    }
    best.0
}

/// Turn a bounded reward into a binary one: `Bernoulli((r - lo) / (hi - lo))`.
pub fn bernoulli_reduce<R: Rng + ?Sized>(r: f64, lo: f64, hi: f64, rng: &mut R) -> Result<bool> {
    if !(lo < hi) {
        return Err(arg_err!("need lo < hi, got [{lo}, {hi}]"));
    }
    if !(r >= lo && r <= hi) {
        return Err(arg_err!("reward {r} outside [{lo}, {hi}]"));
    }
    let prob = (r - lo) / (hi - lo);
    Ok(rng.random::<f64>() < prob)
}

fn unit_reward(obs: Observation) -> Result<f64> {
    let r = obs.value;
    if !(0.0..=1.0).contains(&r) {
        return Err(arg_err!("reward {r} outside [0, 1]"));
    }
    Ok(r)
}

/// EXP3 with forced exploration; the estimator uses the played law.
#[derive(Debug, Clone)]
pub struct Exp3 {
    log_w: Vec<f64>,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
}

impl Exp3 {
    /// Uniform start.
    pub fn new(k: usize, eta: EtaSchedule, gamma: f64) -> Self {
        Self {
            log_w: vec![0.0; k],
            p: Policy::uniform(k),
            eta,
            gamma,
        }
    }
}

impl Agent for Exp3 {
    fn name(&self) -> &'static str {
        "exp3"
    }
    fn num_decisions(&self) -> usize {
        self.log_w.len()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        self.p.sample(rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        check_index(self.log_w.len(), chosen)?;
        let r = unit_reward(obs)?;
        let eta = self.eta.eta(self.log_w.len(), t);
        self.log_w[chosen] += eta * r / self.p.get(chosen);
        let m = self.log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for x in &mut self.log_w {
            *x -= m;
        }
        self.p = Policy::from_log_weights(&self.log_w)?.mix_uniform(self.gamma);
        Ok(())
    }
}

/// UCB1 on rewards in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Ucb1 {
    counts: Vec<u64>,
    means: Vec<f64>,
}

impl Ucb1 {
    /// No plays yet.
    pub fn new(k: usize) -> Self {
        Self {
            counts: vec![0; k],
            means: vec![0.0; k],
        }
    }
}

impl Agent for Ucb1 {
    fn name(&self) -> &'static str {
        "ucb1"
    }
    fn num_decisions(&self) -> usize {
        self.counts.len()
    }
    fn policy(&self) -> Option<&Policy> {
        None
    }
    fn select(&mut self, t: usize, _rng: &mut dyn RngCore) -> usize {
        ucb1_select(&self.counts, &self.means, t as u64 + 1)
    }
    fn update(&mut self, _t: usize, chosen: usize, obs: Observation) -> Result<()> {
        check_index(self.counts.len(), chosen)?;
        let r = unit_reward(obs)?;
        self.counts[chosen] += 1;
        let n = self.counts[chosen] as f64;
        self.means[chosen] += (r - self.means[chosen]) / n;
        Ok(())
    }
}

/// Thompson sampling with a `Beta(a0, b0)` prior on every decision.
#[derive(Debug, Clone)]
pub struct Thompson {
    betas: Vec<(f64, f64)>,
}

impl Thompson {
    /// Prior `Beta(a0, b0)`; both must be positive.
    pub fn new(k: usize, a0: f64, b0: f64) -> Result<Self> {
        if !(a0 > 0.0 && b0 > 0.0) {
            return Err(arg_err!("Beta prior parameters must be positive"));
        }
        Ok(Self {
            betas: vec![(a0, b0); k],
        })
    }

    /// Current posterior parameters.
    pub fn betas(&self) -> &[(f64, f64)] {
        &self.betas
    }
}

impl Agent for Thompson {
    fn name(&self) -> &'static str {
        "thompson"
    }
    fn num_decisions(&self) -> usize {
        self.betas.len()
    }
    fn policy(&self) -> Option<&Policy> {
        None
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        thompson_sample(&self.betas, rng)
    }
    fn update(&mut self, _t: usize, chosen: usize, obs: Observation) -> Result<()> {
        check_index(self.betas.len(), chosen)?;
        let r = reward_bit(obs)?;
        self.betas = thompson_step(&self.betas, chosen, r);
        Ok(())
    }
}

/// Uniformly random decisions.
#[derive(Debug, Clone)]
pub struct UniformAgent {
    p: Policy,
}

impl UniformAgent {
    /// Uniform over `k` decisions.
    pub fn new(k: usize) -> Self {
        Self {
            p: Policy::uniform(k),
        }
    }
}

impl Agent for UniformAgent {
    fn name(&self) -> &'static str {
        "uniform"
    }
    fn num_decisions(&self) -> usize {
        self.p.len()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        self.p.sample(rng)
    }
    fn update(&mut self, _t: usize, chosen: usize, _obs: Observation) -> Result<()> {
        check_index(self.p.len(), chosen)
    }
}

/// Plays a fixed decision sequence (the last entry repeats past its end).
/// With the per-round best decisions this is the oracle benchmark.
#[derive(Debug, Clone)]
pub struct Scheduled {
    k: usize,
    plan: Vec<usize>,
}

impl Scheduled {
    /// Plan of decisions, all below `k`.
    pub fn new(k: usize, plan: Vec<usize>) -> Result<Self> {
        if plan.is_empty() || plan.iter().any(|&a| a >= k) {
            return Err(arg_err!("plan must be non-empty with decisions below K = {k}"));
        }
        Ok(Self { k, plan })
    }
}

impl Agent for Scheduled {
    fn name(&self) -> &'static str {
        "scheduled"
    }
    fn num_decisions(&self) -> usize {
        self.k
    }
    fn policy(&self) -> Option<&Policy> {
        None
    }
    fn select(&mut self, t: usize, _rng: &mut dyn RngCore) -> usize {
        self.plan[t.min(self.plan.len() - 1)]
    }
    fn update(&mut self, _t: usize, chosen: usize, _obs: Observation) -> Result<()> {
        check_index(self.k, chosen)
    }
}
