//! Posterior-sampling agents built on AIR.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::{check_index, ensure_interior, reward_bit, Agent, EtaSchedule, RoundDiagnostics};
use crate::air::{
    closed_form_belief, fw_gap_full, marginal_posterior, posterior_mass, Air, AirMaximizer,
    BeliefDomain, WarmStart,
};
use crate::num::ln;
use crate::prob::{Family, Observation, Policy, EPS_MIN};
use crate::saddle::{air_fw_gap, air_saddle, AirPoint, SaddleOptions, SaddleResult};
use crate::{Error, Result};

fn closed_form_step(p: &Policy, chosen: usize, s: f64) -> Result<Policy> {
    let k = p.len();
    check_index(k, chosen)?;
    if k == 1 {
        return Ok(Policy::uniform(1));
    }
    let pc = p.get(chosen);
    if pc < EPS_MIN {
        return Err(Error::Boundary(alloc::format!(
            "p({chosen}) = {pc:e} is below the interior floor; mix in forced exploration"
        )));
    }
    if pc >= 1.0 {
        return Ok(p.clone());
    }
    let own = posterior_mass(s, pc);
    let scale = (1.0 - own) / (1.0 - pc);
    let w: Vec<f64> = p
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &x)| if i == chosen { own } else { x * scale })
        .collect();
    Policy::from_unnormalized(w)
}

/// One step of the Bernoulli closed form from a binary reward.
///
/// The chosen decision gets `(1 - e^{-eta}) / (1 - e^{-eta/p})` after a
/// success and `(1 - e^{eta}) / (1 - e^{eta/p})` after a failure; the rest
/// keep their relative weights.
pub fn simplified_aps_update(p: &Policy, chosen: usize, r: bool, eta: f64) -> Result<Policy> {
    let s = eta * (2.0 * f64::from(u8::from(r)) - 1.0);
    closed_form_step(p, chosen, s)
}

/// The same step written for a binary loss `l = 1 - r`, with the two branches
/// exchanged.
pub fn simplified_aps_update_loss(p: &Policy, chosen: usize, loss: bool, eta: f64) -> Result<Policy> {
    let s = eta * (1.0 - 2.0 * f64::from(u8::from(loss)));
    closed_form_step(p, chosen, s)
}

fn sample_policy(p: &Policy, rng: &mut dyn RngCore) -> usize {
    p.sample(rng)
}

/// Simplified APS for Bernoulli bandits.
#[derive(Debug, Clone)]
pub struct SimplifiedAps {
    q: Policy,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
    track: bool,
    diag: Option<RoundDiagnostics>,
}

impl SimplifiedAps {
    /// Start from the uniform law.
    pub fn new(k: usize, eta: EtaSchedule, gamma: f64) -> Self {
        let q = Policy::uniform(k);
        Self {
            p: q.mix_uniform(gamma),
            q,
            eta,
            gamma,
            track: false,
            diag: None,
        }
    }

    /// Record AIR and Frank-Wolfe diagnostics every round (`O(K^2)` each).
    pub fn with_diagnostics(mut self, on: bool) -> Self {
        self.track = on;
        self
    }

    /// Reference law `q_t`.
    pub fn reference(&self) -> &Policy {
        &self.q
    }

    fn round_diagnostics(&self, eta: f64) -> Result<RoundDiagnostics> {
        let k = self.p.len();
        let air = Air::new(&self.p, &self.q, eta, Family::Bernoulli)?;
        let b = closed_form_belief(&self.p, eta)?;
        let v = air.value_raw(b.alpha(), b.beta());
        let mut ga = vec![0.0; k];
        let mut gb = vec![0.0; k * k];
        air.gradient_raw(b.alpha(), b.beta(), &mut ga, &mut gb);
        let gap = fw_gap_full(Family::Bernoulli, b.alpha(), b.beta(), &ga, &gb);
        Ok(RoundDiagnostics {
            eta,
            air: v,
            fw_gap: gap,
            duality_gap: None,
            converged: true,
            bound_term: v + gap,
            bound_offset: ln(k as f64) / eta,
        })
    }
}

impl Agent for SimplifiedAps {
    fn name(&self) -> &'static str {
        "simplified_aps"
    }
    fn num_decisions(&self) -> usize {
        self.p.len()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        sample_policy(&self.p, rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        let r = reward_bit(obs)?;
        let eta = self.eta.eta(self.p.len(), t);
        if self.track {
            self.diag = Some(self.round_diagnostics(eta)?);
        }
        self.q = ensure_interior(simplified_aps_update(&self.p, chosen, r, eta)?);
        self.p = self.q.mix_uniform(self.gamma);
        Ok(())
    }
    fn diagnostics(&self) -> Option<&RoundDiagnostics> {
        self.diag.as_ref()
    }
}

fn warm_of(belief: crate::air::JointBelief, joint: Option<Vec<f64>>) -> WarmStart {
    match joint {
        Some(j) => WarmStart::Joint(j),
        None => WarmStart::Belief(belief),
    }
}

/// Adaptive posterior sampling: maximize AIR at the played law, then set the
/// reference to the maximizer's posterior.
#[derive(Debug, Clone)]
pub struct Aps {
    maximizer: AirMaximizer,
    q: Policy,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
    warm: Option<WarmStart>,
    diag: Option<RoundDiagnostics>,
}

impl Aps {
    /// APS over every belief of `family`.
    pub fn new(k: usize, family: Family, eta: EtaSchedule, gamma: f64) -> Self {
        Self::with_maximizer(AirMaximizer::full(family, k), eta, gamma)
    }

    /// APS with a custom maximizer (for example over a finite model class).
    pub fn with_maximizer(maximizer: AirMaximizer, eta: EtaSchedule, gamma: f64) -> Self {
        let q = Policy::uniform(maximizer.domain.k());
        Self {
            maximizer,
            p: q.mix_uniform(gamma),
            q,
            eta,
            gamma,
            warm: None,
            diag: None,
        }
    }

    /// Reference law `q_t`.
    pub fn reference(&self) -> &Policy {
        &self.q
    }
}

impl Agent for Aps {
    fn name(&self) -> &'static str {
        "aps"
    }
    fn num_decisions(&self) -> usize {
        self.p.len()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        sample_policy(&self.p, rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        let k = self.p.len();
        check_index(k, chosen)?;
        let eta = self.eta.eta(k, t);
        let air = Air::new(&self.p, &self.q, eta, self.maximizer.domain.family())?;
        let r = self.maximizer.maximize_air(&air, self.warm.as_ref())?;
        self.diag = Some(RoundDiagnostics {
            eta,
            air: r.value,
            fw_gap: r.fw_gap,
            duality_gap: None,
            converged: r.status.is_ok(),
            bound_term: r.value + r.fw_gap.max(0.0),
            bound_offset: ln(k as f64) / eta,
        });
        let post = match marginal_posterior(&r.belief, chosen, obs) {
            Ok(post) => post,
            // the observation is impossible under the belief; keep q
            Err(Error::ZeroLikelihood { .. }) => self.q.clone(),
            Err(e) => return Err(e),
        };
        self.q = ensure_interior(post);
        self.p = self.q.mix_uniform(self.gamma);
        self.warm = Some(warm_of(r.belief, r.joint));
        Ok(())
    }
    fn diagnostics(&self) -> Option<&RoundDiagnostics> {
        self.diag.as_ref()
    }
}

/// Settings of [`Ams`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AmsConfig {
    /// Saddle solver settings.
    pub saddle: SaddleOptions,
}

/// Adaptive minimax sampling: play the minimax law of AIR at the current
/// reference, then update the reference with the maximin belief.
#[derive(Debug, Clone)]
pub struct Ams {
    domain: BeliefDomain,
    q: Policy,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
    config: AmsConfig,
    current: SaddleResult<AirPoint>,
    diag: Option<RoundDiagnostics>,
}

impl Ams {
    /// AMS over `domain`, starting from the uniform reference.
    pub fn new(domain: BeliefDomain, eta: EtaSchedule, gamma: f64, config: AmsConfig) -> Result<Self> {
        let k = domain.k();
        let q = Policy::uniform(k);
        let current = air_saddle(&q, eta.eta(k, 0), domain.clone(), None, &config.saddle)?;
        Ok(Self {
            p: current.p.mix_uniform(gamma),
            q,
            domain,
            eta,
            gamma,
            config,
            current,
            diag: None,
        })
    }

    /// Reference law `q_t`.
    pub fn reference(&self) -> &Policy {
        &self.q
    }

    /// Saddle solution for the upcoming round.
    pub fn saddle(&self) -> &SaddleResult<AirPoint> {
        &self.current
    }
}

impl Agent for Ams {
    fn name(&self) -> &'static str {
        "ams"
    }
    fn num_decisions(&self) -> usize {
        self.p.len()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        sample_policy(&self.p, rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        let k = self.p.len();
        check_index(k, chosen)?;
        let eta = self.eta.eta(k, t);
        let point = &self.current.point;
        let air = Air::new(&self.p, &self.q, eta, self.domain.family())?;
        let v = air.value_raw(point.belief.alpha(), point.belief.beta());
        let gap = air_fw_gap(&air, point, &self.domain).max(0.0);
        self.diag = Some(RoundDiagnostics {
            eta,
            air: v,
            fw_gap: gap,
            duality_gap: Some(self.current.gap),
            converged: self.current.gap <= self.config.saddle.tol,
            bound_term: v + gap,
            bound_offset: ln(k as f64) / eta,
        });
        let post = match marginal_posterior(&point.belief, chosen, obs) {
            Ok(post) => post,
            Err(Error::ZeroLikelihood { .. }) => self.q.clone(),
            Err(e) => return Err(e),
        };
        self.q = ensure_interior(post);
        let next_eta = self.eta.eta(k, t + 1);
        let warm = self.current.point.clone();
        self.current = air_saddle(&self.q, next_eta, self.domain.clone(), Some(&warm), &self.config.saddle)?;
        self.p = self.current.p.mix_uniform(self.gamma);
        Ok(())
    }
    fn diagnostics(&self) -> Option<&RoundDiagnostics> {
        self.diag.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ModelClass;
    use rand::SeedableRng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn closed_form_examples() {
        let p = Policy::uniform(2);
        let up = simplified_aps_update(&p, 0, true, 0.5).unwrap();
        assert!(close(up.as_slice(), &[0.622459, 0.377541], 5e-7));
        let down = simplified_aps_update(&p, 0, false, 0.5).unwrap();
        assert!(close(down.as_slice(), &[0.377541, 0.622459], 5e-7));
        for r in [false, true] {
            let one = simplified_aps_update(&Policy::uniform(1), 0, r, 3.0).unwrap();
            assert_eq!(one.as_slice(), &[1.0]);
        }
    }

    #[test]
    fn boundary_is_an_error() {
        let p = Policy::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            simplified_aps_update(&p, 1, true, 0.5),
            Err(Error::Boundary(_))
        ));
    }

    #[test]
    fn aps_one_step_matches_closed_form() {
        for (eta, r) in [(0.5, true), (0.5, false), (0.2, true)] {
            let mut aps = Aps::new(2, Family::Bernoulli, EtaSchedule::Fixed(eta), 0.0);
            aps.update(0, 0, Observation::bit(r)).unwrap();
            let want = simplified_aps_update(&Policy::uniform(2), 0, r, eta).unwrap();
            assert!(aps.reference().max_abs_diff(&want) < 2e-3);
        }
    }

    #[test]
    fn aps_on_constant_singleton_keeps_policy() {
        let class = ModelClass::bernoulli(&[&[0.5, 0.5, 0.5]]).unwrap();
        let mut aps = Aps::with_maximizer(AirMaximizer::finite(class), EtaSchedule::Fixed(0.5), 0.0);
        aps.update(0, 1, Observation::bit(true)).unwrap();
        assert!(aps.reference().max_abs_diff(&Policy::uniform(3)) < 1e-6);
    }

    #[test]
    fn aps_ten_steps_stay_interior() {
        let mut aps = Aps::new(3, Family::Bernoulli, EtaSchedule::Fixed(0.5), 0.001);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for t in 0..10 {
            let a = aps.select(t, &mut rng);
            aps.update(t, a, Observation::bit(a == 2)).unwrap();
            let p = aps.policy().unwrap();
            assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.is_interior(1e-4));
        }
    }

    #[test]
    fn ams_singleton_plays_best_decision() {
        let class = ModelClass::bernoulli(&[&[0.1, 0.9]]).unwrap();
        let ams = Ams::new(
            BeliefDomain::Finite(class),
            EtaSchedule::Fixed(0.5),
            0.0,
            AmsConfig::default(),
        )
        .unwrap();
        assert_eq!(ams.policy().unwrap().as_slice(), &[0.0, 1.0]);
        assert!(ams.saddle().gap < 1e-6);
    }
}
