//! Minimax solver for objectives linear in the decision law `p` and concave
//! in the belief.
//!
//! `inf_p sup_x V(p, x)` equals `sup_x G(x)` with `G(x) = min_j c_j(x) + c0(x)`,
//! where `V(p, x) = c0(x) + <p, c(x)>`. `G` is concave but not smooth, so the
//! solver maximizes the entropy-smoothed dual
//! `G_tau(x) = c0(x) - tau log sum_j exp(-c_j(x) / tau)` (within `tau log K`
//! of `G`) for a decreasing sequence of temperatures, warm starting each stage.
//! Every stage is certified: the lower bound is `G(x)`, the upper bound is
//! `sup_x V(p, x)` at the candidate `p`, bounded above by a best-response run
//! plus its Frank-Wolfe gap. The duality gap reported is `upper - lower`.

use alloc::vec;
use alloc::vec::Vec;

use crate::air::{
    ascend, fw_gap_full, Air, AirMaximizer, BeliefDomain, JointBelief, MaximizeOptions, Objective, WarmStart,
};
use crate::num::{ln, log_sum_exp};
use crate::prob::Policy;
use crate::Result;

/// A game linear in `p`, concave in the other player.
pub trait SaddleProblem {
    /// The maximizing player's state.
    type Point: Clone;

    /// Number of decisions.
    fn k(&self) -> usize;

    /// Write `c` and return `c0` with `V(p, x) = c0 + <p, c>`.
    fn coefficients(&self, x: &Self::Point, c: &mut [f64]) -> f64;

    /// Approximately maximize the smoothed dual at temperature `tau`.
    fn smoothed_ascent(&self, tau: f64, warm: Option<&Self::Point>) -> Self::Point;

    /// Best response to `p`: a point and a certified upper bound on
    /// `sup_x V(p, x)`.
    fn best_response(&self, p: &Policy, warm: &Self::Point) -> (Self::Point, f64);
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleOptions {
    /// Target duality gap.
    pub tol: f64,
    /// Maximum number of temperature stages.
    pub max_stages: usize,
    /// Temperature decay per stage.
    pub decay: f64,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_stages: 12,
            decay: 0.2,
        }
    }
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct SaddleResult<X> {
    /// Minimax decision law (the candidate with the smallest upper bound).
    pub p: Policy,
    /// Maximin point (the candidate with the largest lower bound).
    pub point: X,
    /// `G(point)`, a lower bound on the saddle value.
    pub lower: f64,
    /// Upper bound on `sup_x V(p, x)`.
    pub upper: f64,
    /// `upper - lower`.
    pub gap: f64,
    /// Stages used.
    pub stages: usize,
}

fn min_coeff(c: &[f64]) -> (usize, f64) {
    let mut best = (0, c[0]);
    for (j, &v) in c.iter().enumerate() {
        if v < best.1 {
            best = (j, v);
        }
    }
    best
}

/// Softmax of `-c / tau`.
pub fn soft_best_response(c: &[f64], tau: f64) -> Vec<f64> {
    let z: Vec<f64> = c.iter().map(|&x| -x / tau).collect();
    let lse = log_sum_exp(&z);
    z.iter().map(|&x| crate::num::exp(x - lse)).collect()
}

/// Solve `inf_p sup_x V(p, x)` to the requested duality gap (or stage cap).
pub fn solve<S: SaddleProblem>(
    s: &S,
    warm: Option<&S::Point>,
    opts: &SaddleOptions,
) -> SaddleResult<S::Point> {
    let k = s.k();
    let mut c = vec![0.0; k];
    let start = match warm {
        Some(w) => w.clone(),
        None => s.smoothed_ascent(f64::INFINITY, None),
    };
    let c0 = s.coefficients(&start, &mut c);
    let spread = c.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - c.iter().copied().fold(f64::INFINITY, f64::min);
    let mut tau = (0.5 * spread).max(opts.tol);
    let (j0, m0) = min_coeff(&c);
    let mut best_lower = (c0 + m0, start.clone());
    let (_, up0) = s.best_response(&Policy::point_mass(k, j0), &start);
    let mut best_upper = (up0, Policy::point_mass(k, j0));
    let mut x = start;
    let mut stages = 0;
    let log_k = ln(k as f64).max(1e-12);
    while stages < opts.max_stages && best_upper.0 - best_lower.0 > opts.tol {
        stages += 1;
        x = s.smoothed_ascent(tau, Some(&x));
        let c0 = s.coefficients(&x, &mut c);
        let (jmin, cmin) = min_coeff(&c);
        if c0 + cmin > best_lower.0 {
            best_lower = (c0 + cmin, x.clone());
        }
        let mut cands = vec![Policy::point_mass(k, jmin)];
        if let Ok(p) = Policy::from_unnormalized(soft_best_response(&c, tau)) {
            cands.push(p);
        }
        for p in cands {
            let (_, up) = s.best_response(&p, &x);
            if up < best_upper.0 {
                best_upper = (up, p);
            }
        }
        if tau * log_k <= 0.25 * opts.tol && stages > 1 {
            // smoothing bias is already below the target; only the inner
            // accuracy can improve things now
            tau *= 0.5;
        } else {
            tau *= opts.decay;
        }
    }
    let gap = (best_upper.0 - best_lower.0).max(0.0);
    SaddleResult {
        p: best_upper.1,
        point: best_lower.1,
        lower: best_lower.0,
        upper: best_upper.0,
        gap,
        stages,
    }
}

/// Belief state of the AIR game.
#[derive(Debug, Clone, PartialEq)]
pub struct AirPoint {
    /// The belief.
    pub belief: JointBelief,
    /// Joint law over (model, decision) for finite domains.
    pub joint: Option<Vec<f64>>,
}

impl AirPoint {
    fn warm(&self) -> WarmStart {
        match &self.joint {
            Some(j) => WarmStart::Joint(j.clone()),
            None => WarmStart::Belief(self.belief.clone()),
        }
    }
}

/// `inf_p sup_nu AIR_{q,eta}(p, nu)` over a belief domain.
#[derive(Debug, Clone)]
pub struct AirSaddle {
    air: Air,
    maximizer: AirMaximizer,
}

impl AirSaddle {
    /// Game at reference `q` and learning rate `eta`.
    pub fn new(q: &Policy, eta: f64, domain: BeliefDomain) -> Result<Self> {
        let air = Air::new(q, q, eta, domain.family())?;
        Ok(Self {
            air,
            maximizer: AirMaximizer {
                domain,
                options: MaximizeOptions::default(),
            },
        })
    }

    /// The underlying AIR at the given `p`.
    pub fn air_at(&self, p: &[f64]) -> Air {
        self.air.with_p(p)
    }
}

struct SmoothedAir<'a> {
    base: &'a Air,
    tau: f64,
}

impl Objective for SmoothedAir<'_> {
    fn default_alpha(&self) -> Vec<f64> {
        self.base.q().to_vec()
    }
    fn step_scale(&self) -> f64 {
        self.base.eta()
    }
    fn value(&self, alpha: &[f64], beta: &[f64]) -> f64 {
        let mut c = vec![0.0; self.base.k()];
        let c0 = self.base.p_coefficients_raw(alpha, beta, &mut c);
        if self.tau.is_infinite() {
            return c0 + c.iter().sum::<f64>() / c.len() as f64;
        }
        let z: Vec<f64> = c.iter().map(|&x| -x / self.tau).collect();
        c0 - self.tau * log_sum_exp(&z)
    }
    fn value_grad(&self, alpha: &[f64], beta: &[f64], ga: &mut [f64], gb: &mut [f64]) -> f64 {
        let k = self.base.k();
        let mut c = vec![0.0; k];
        let c0 = self.base.p_coefficients_raw(alpha, beta, &mut c);
        let (p, v) = if self.tau.is_infinite() {
            (vec![1.0 / k as f64; k], c0 + c.iter().sum::<f64>() / k as f64)
        } else {
            let z: Vec<f64> = c.iter().map(|&x| -x / self.tau).collect();
            (soft_best_response(&c, self.tau), c0 - self.tau * log_sum_exp(&z))
        };
        self.base.with_p(&p).gradient_raw(alpha, beta, ga, gb);
        v
    }
}

impl SaddleProblem for AirSaddle {
    type Point = AirPoint;

    fn k(&self) -> usize {
        self.air.k()
    }

    fn coefficients(&self, x: &AirPoint, c: &mut [f64]) -> f64 {
        self.air.p_coefficients_raw(x.belief.alpha(), x.belief.beta(), c)
    }

    fn smoothed_ascent(&self, tau: f64, warm: Option<&AirPoint>) -> AirPoint {
        let obj = SmoothedAir {
            base: &self.air,
            tau,
        };
        let w = warm.map(AirPoint::warm);
        let a = ascend(&obj, &self.maximizer.domain, w.as_ref(), &self.maximizer.options);
        let belief = match (&a.joint, &self.maximizer.domain) {
            (Some(j), BeliefDomain::Finite(class)) => JointBelief::from_joint(class, j)
                .unwrap_or_else(|_| JointBelief::raw(self.air.family(), a.alpha.clone(), a.beta.clone())),
            _ => JointBelief::raw(self.air.family(), a.alpha, a.beta),
        };
        AirPoint {
            belief,
            joint: a.joint,
        }
    }

    fn best_response(&self, p: &Policy, warm: &AirPoint) -> (AirPoint, f64) {
        let air = self.air.with_p(p.as_slice());
        match self.maximizer.maximize_air(&air, Some(&warm.warm())) {
            Ok(r) => {
                let up = r.value + r.fw_gap.max(0.0);
                (
                    AirPoint {
                        belief: r.belief,
                        joint: r.joint,
                    },
                    up,
                )
            }
            Err(_) => (warm.clone(), f64::INFINITY),
        }
    }
}

/// Frank-Wolfe gap of `air` at `point` over `domain`: an upper bound on
/// `sup_nu AIR - AIR(point)`.
pub fn air_fw_gap(air: &Air, point: &AirPoint, domain: &BeliefDomain) -> f64 {
    let k = air.k();
    let (alpha, beta) = (point.belief.alpha(), point.belief.beta());
    let mut ga = vec![0.0; k];
    let mut gb = vec![0.0; k * k];
    air.gradient_raw(alpha, beta, &mut ga, &mut gb);
    match (domain, &point.joint) {
        (BeliefDomain::Finite(class), Some(nu)) => {
            let mut best = f64::NEG_INFINITY;
            let mut avg = 0.0;
            for (m, model) in class.models().iter().enumerate() {
                for i in 0..k {
                    let g = ga[i]
                        + (0..k).map(|j| gb[i * k + j] * model.mean(j)).sum::<f64>();
                    best = best.max(g);
                    avg += nu[m * k + i] * g;
                }
            }
            best - avg
        }
        _ => fw_gap_full(air.family(), alpha, beta, &ga, &gb),
    }
}

/// Approximate saddle point of AIR, as used by adaptive minimax sampling.
pub fn air_saddle(
    q: &Policy,
    eta: f64,
    domain: BeliefDomain,
    warm: Option<&AirPoint>,
    opts: &SaddleOptions,
) -> Result<SaddleResult<AirPoint>> {
    let game = AirSaddle::new(q, eta, domain)?;
    Ok(solve(&game, warm, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Family, ModelClass};

    #[test]
    fn singleton_class_plays_optimal_decision() {
        let class = ModelClass::bernoulli(&[&[0.2, 0.7, 0.4]]).unwrap();
        let q = Policy::uniform(3);
        let r = air_saddle(&q, 0.5, BeliefDomain::Finite(class), None, &SaddleOptions::default())
            .unwrap();
        assert_eq!(r.p.as_slice(), &[0.0, 1.0, 0.0]);
        assert!(r.gap < 1e-6, "gap {}", r.gap);
    }

    #[test]
    fn two_arm_full_domain_converges() {
        let q = Policy::new(vec![0.4, 0.6]).unwrap();
        let r = air_saddle(
            &q,
            0.5,
            BeliefDomain::Full {
                family: Family::Bernoulli,
                k: 2,
            },
            None,
            &SaddleOptions::default(),
        )
        .unwrap();
        assert!(r.gap <= 1e-4, "gap {} after {} stages", r.gap, r.stages);
    }
}
