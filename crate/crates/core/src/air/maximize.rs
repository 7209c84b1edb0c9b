//! Mirror ascent over algorithmic beliefs.
//!
//! Two belief domains are supported. `Full` is every belief of the family,
//! parameterized by the marginal `alpha` (entropic mirror map) and the
//! conditional means `theta` (logit mirror map, or `atanh` for the Gaussian
//! box). `Finite` restricts the belief to a joint law over a given model class
//! and decision, optimized with the entropic map on that joint simplex. AIR is
//! concave in `(alpha, beta)`, and both parameterizations are diffeomorphic on
//! the interior, so stationary points are maxima.

use alloc::vec;
use alloc::vec::Vec;

use super::belief::{joint_moments, JointBelief};
use super::eval::{fw_gap_full, Air};
use crate::num::{atanh, ln, sigmoid, softmax_in_place, tanh};
use crate::prob::{Family, ModelClass, Policy};
use crate::Result;

/// Which beliefs the maximizer may return.
#[derive(Debug, Clone, PartialEq)]
pub enum BeliefDomain {
    /// All beliefs of the family over `k` decisions.
    Full {
        /// Observation family.
        family: Family,
        /// Number of decisions.
        k: usize,
    },
    /// Joint laws over (model in the class, optimal decision).
    Finite(ModelClass),
}

impl BeliefDomain {
    /// Number of decisions.
    pub fn k(&self) -> usize {
        match self {
            BeliefDomain::Full { k, .. } => *k,
            BeliefDomain::Finite(c) => c.num_decisions(),
        }
    }

    /// Family.
    pub fn family(&self) -> Family {
        match self {
            BeliefDomain::Full { family, .. } => *family,
            BeliefDomain::Finite(c) => c.family(),
        }
    }

    fn dim(&self) -> usize {
        let k = self.k();
        match self {
            BeliefDomain::Full { .. } => k + k * k,
            BeliefDomain::Finite(c) => c.len() * k,
        }
    }
}

/// Stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizeOptions {
    /// Stop when the sup-norm of the gradient in mirror coordinates is below
    /// this and the Frank-Wolfe gap is below `1e-6`.
    pub tol: f64,
    /// Stop when the Frank-Wolfe gap (a certified suboptimality bound) is below this.
    pub gap_tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            gap_tol: 1e-10,
            max_iter: 5000,
        }
    }
}

/// Why the maximizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxStatus {
    /// Mirror-gradient norm below `tol`.
    Converged,
    /// Frank-Wolfe gap below `gap_tol`.
    Certified,
    /// Iteration cap reached.
    IterationCap,
    /// Line search could not make progress (rounding floor).
    Stalled,
}

impl MaxStatus {
    /// True unless the cap was hit.
    pub fn is_ok(self) -> bool {
        !matches!(self, MaxStatus::IterationCap)
    }
}

/// Output of the maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeResult {
    /// Best belief found.
    pub belief: JointBelief,
    /// Joint law over (model, decision) for the finite domain.
    pub joint: Option<Vec<f64>>,
    /// Objective at `belief`.
    pub value: f64,
    /// Stop reason.
    pub status: MaxStatus,
    /// Iterations used.
    pub iterations: usize,
    /// Final mirror-gradient sup-norm.
    pub residual: f64,
    /// Final Frank-Wolfe gap: `sup - value <= fw_gap` for concave objectives.
    pub fw_gap: f64,
}

/// Warm start.
#[derive(Debug, Clone, PartialEq)]
pub enum WarmStart {
    /// Start from a belief (for the finite domain only usable as a fallback).
    Belief(JointBelief),
    /// Start from a joint law over (model, decision).
    Joint(Vec<f64>),
}

/// A concave objective over beliefs, differentiable in `(alpha, beta)`.
pub(crate) trait Objective {
    fn default_alpha(&self) -> Vec<f64>;
    /// Natural step length of the mirror iteration.
    fn step_scale(&self) -> f64;
    fn value(&self, alpha: &[f64], beta: &[f64]) -> f64;
    fn value_grad(&self, alpha: &[f64], beta: &[f64], ga: &mut [f64], gb: &mut [f64]) -> f64;
}

impl Objective for Air {
    fn default_alpha(&self) -> Vec<f64> {
        self.q().to_vec()
    }
    fn step_scale(&self) -> f64 {
        self.eta()
    }
    fn value(&self, alpha: &[f64], beta: &[f64]) -> f64 {
        self.value_raw(alpha, beta)
    }
    fn value_grad(&self, alpha: &[f64], beta: &[f64], ga: &mut [f64], gb: &mut [f64]) -> f64 {
        self.gradient_raw(alpha, beta, ga, gb);
        self.value_raw(alpha, beta)
    }
}

const U_CLAMP: f64 = 30.0;

// Frank-Wolfe gap below which a small mirror residual counts as convergence.
const RESIDUAL_GAP: f64 = 1e-6;

fn theta_of(family: Family, u: f64) -> f64 {
    match family {
        Family::Bernoulli => sigmoid(u),
        Family::GaussianUnitVariance => tanh(u),
    }
}

fn dtheta_of(family: Family, t: f64) -> f64 {
    match family {
        Family::Bernoulli => t * (1.0 - t),
        Family::GaussianUnitVariance => 1.0 - t * t,
    }
}

fn u_of(family: Family, t: f64) -> f64 {
    match family {
        Family::Bernoulli => {
            let t = t.clamp(1e-9, 1.0 - 1e-9);
            ln(t) - ln(1.0 - t)
        }
        Family::GaussianUnitVariance => atanh(t.clamp(-1.0 + 1e-9, 1.0 - 1e-9)),
    }
}

struct Point {
    x: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    theta: Vec<f64>,
    nu: Vec<f64>,
}

impl Point {
    fn new(domain: &BeliefDomain, x: Vec<f64>) -> Self {
        let k = domain.k();
        let mut p = Point {
            x,
            alpha: vec![0.0; k],
            beta: vec![0.0; k * k],
            theta: vec![0.0; k * k],
            nu: Vec::new(),
        };
        p.decode(domain);
        p
    }

    fn decode(&mut self, domain: &BeliefDomain) {
        let k = domain.k();
        match domain {
            BeliefDomain::Full { family, .. } => {
                self.alpha.copy_from_slice(&self.x[..k]);
                softmax_in_place(&mut self.alpha);
                for i in 0..k {
                    for j in 0..k {
                        let t = theta_of(*family, self.x[k + i * k + j]);
                        self.theta[i * k + j] = t;
                        self.beta[i * k + j] = self.alpha[i] * t;
                    }
                }
            }
            BeliefDomain::Finite(class) => {
                self.nu.clear();
                self.nu.extend_from_slice(&self.x);
                softmax_in_place(&mut self.nu);
                let (a, b) = joint_moments(class, &self.nu);
                self.alpha = a;
                self.beta = b;
            }
        }
    }
}

struct Engine<'a, O: Objective> {
    obj: &'a O,
    domain: &'a BeliefDomain,
    ga: Vec<f64>,
    gb: Vec<f64>,
    dir: Vec<f64>,
}

impl<'a, O: Objective> Engine<'a, O> {
    /// Ascent direction in mirror coordinates; returns (inner, residual, fw gap).
    fn direction(&mut self, pt: &Point) -> (f64, f64, f64) {
        let k = self.domain.k();
        match self.domain {
            BeliefDomain::Full { family, .. } => {
                let mut gbar = 0.0;
                for i in 0..k {
                    let mut g = self.ga[i];
                    for j in 0..k {
                        g += self.gb[i * k + j] * pt.theta[i * k + j];
                    }
                    self.dir[i] = g;
                    gbar += pt.alpha[i] * g;
                }
                let mut inner = 0.0;
                let mut res: f64 = 0.0;
                for i in 0..k {
                    let d = self.dir[i] - gbar;
                    self.dir[i] = d;
                    inner += pt.alpha[i] * d * d;
                    res = res.max(pt.alpha[i] * d.abs());
                    for j in 0..k {
                        let g = self.gb[i * k + j];
                        let w = pt.alpha[i] * dtheta_of(*family, pt.theta[i * k + j]);
                        self.dir[k + i * k + j] = g;
                        inner += w * g * g;
                        res = res.max(w * g.abs());
                    }
                }
                let gap = fw_gap_full(*family, &pt.alpha, &pt.beta, &self.ga, &self.gb);
                (inner, res, gap)
            }
            BeliefDomain::Finite(class) => {
                let mut gbar = 0.0;
                let mut gmax = f64::NEG_INFINITY;
                for (m, model) in class.models().iter().enumerate() {
                    for i in 0..k {
                        let mut g = self.ga[i];
                        for j in 0..k {
                            g += self.gb[i * k + j] * model.mean(j);
                        }
                        self.dir[m * k + i] = g;
                        gbar += pt.nu[m * k + i] * g;
                        gmax = gmax.max(g);
                    }
                }
                let mut inner = 0.0;
                let mut res: f64 = 0.0;
                for (d, &w) in self.dir.iter_mut().zip(&pt.nu) {
                    *d -= gbar;
                    inner += w * *d * *d;
                    res = res.max(w * d.abs());
                }
                (inner, res, gmax - gbar)
            }
        }
    }

    fn initial_x(&self, start: Option<&WarmStart>) -> Vec<f64> {
        let k = self.domain.k();
        let fam = self.domain.family();
        let alpha0 = self.obj.default_alpha();
        match self.domain {
            BeliefDomain::Full { .. } => {
                let mut x = vec![0.0; self.domain.dim()];
                let (t0, tilt) = match fam {
                    Family::Bernoulli => (0.5, 0.05),
                    Family::GaussianUnitVariance => (0.0, 0.05),
                };
                for i in 0..k {
                    x[i] = ln(alpha0[i].max(1e-300));
                    for j in 0..k {
                        let t = if i == j { t0 + tilt } else { t0 };
                        x[k + i * k + j] = u_of(fam, t);
                    }
                }
                if let Some(WarmStart::Belief(b)) = start {
                    for i in 0..k {
                        let a = b.alpha()[i];
                        x[i] = ln(a.max(1e-12));
                        if a > 0.0 {
                            for j in 0..k {
                                x[k + i * k + j] = u_of(fam, b.theta(i, j));
                            }
                        }
                    }
                }
                x
            }
            BeliefDomain::Finite(class) => {
                if let Some(WarmStart::Joint(nu)) = start {
                    if nu.len() == self.domain.dim() {
                        return nu.iter().map(|&w| ln(w.max(1e-15))).collect();
                    }
                }
                let nm = class.len() as f64;
                let mut x = vec![0.0; self.domain.dim()];
                for m in 0..class.len() {
                    for i in 0..k {
                        x[m * k + i] = ln((alpha0[i] / nm).max(1e-300));
                    }
                }
                x
            }
        }
    }

    fn clamp_x(&self, x: &mut [f64]) {
        if let BeliefDomain::Full { k, .. } = self.domain {
            for u in x[*k..].iter_mut() {
                *u = u.clamp(-U_CLAMP, U_CLAMP);
            }
        }
    }

    fn run(&mut self, start: Option<&WarmStart>, opts: &MaximizeOptions) -> (Point, f64, MaxStatus, usize, f64, f64) {
        let mut pt = Point::new(self.domain, self.initial_x(start));
        let mut value = self.obj.value_grad(&pt.alpha, &pt.beta, &mut self.ga, &mut self.gb);
        let scale = self.obj.step_scale();
        let mut step = scale;
        let max_step = 1e6 * scale;
        let mut trial = Point::new(self.domain, pt.x.clone());
        let mut it = 0;
        loop {
            let (inner, res, gap) = self.direction(&pt);
            // the residual is weighted by theta (1 - theta), so it vanishes on
            // saturated conditionals whatever the gradient; trust it only when
            // the certificate agrees
            if res <= opts.tol && gap <= RESIDUAL_GAP {
                return (pt, value, MaxStatus::Converged, it, res, gap);
            }
            if gap <= opts.gap_tol {
                return (pt, value, MaxStatus::Certified, it, res, gap);
            }
            if it >= opts.max_iter {
                return (pt, value, MaxStatus::IterationCap, it, res, gap);
            }
            it += 1;
            loop {
                for ((t, x), d) in trial.x.iter_mut().zip(&pt.x).zip(&self.dir) {
                    *t = x + step * d;
                }
                let mut tx = core::mem::take(&mut trial.x);
                self.clamp_x(&mut tx);
                trial.x = tx;
                trial.decode(self.domain);
                let v = self.obj.value(&trial.alpha, &trial.beta);
                if v.is_finite() && v >= value + 1e-4 * step * inner {
                    core::mem::swap(&mut pt, &mut trial);
                    value = self.obj.value_grad(&pt.alpha, &pt.beta, &mut self.ga, &mut self.gb);
                    step = (step * 2.0).min(max_step);
                    break;
                }
                step *= 0.5;
                if step < 1e-30 * scale {
                    return (pt, value, MaxStatus::Stalled, it, res, gap);
                }
            }
        }
    }
}

pub(crate) struct Ascent {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub joint: Option<Vec<f64>>,
    pub status: MaxStatus,
    pub iterations: usize,
    pub residual: f64,
    pub fw_gap: f64,
}

/// Run mirror ascent on an arbitrary objective.
pub(crate) fn ascend<O: Objective>(
    obj: &O,
    domain: &BeliefDomain,
    start: Option<&WarmStart>,
    opts: &MaximizeOptions,
) -> Ascent {
    let k = domain.k();
    let mut eng = Engine {
        obj,
        domain,
        ga: vec![0.0; k],
        gb: vec![0.0; k * k],
        dir: vec![0.0; domain.dim()],
    };
    let (pt, _value, status, iterations, residual, fw_gap) = eng.run(start, opts);
    let joint = match domain {
        BeliefDomain::Finite(_) => Some(pt.nu),
        BeliefDomain::Full { .. } => None,
    };
    Ascent {
        alpha: pt.alpha,
        beta: pt.beta,
        joint,
        status,
        iterations,
        residual,
        fw_gap,
    }
}

/// Configurable AIR maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct AirMaximizer {
    /// Belief domain.
    pub domain: BeliefDomain,
    /// Stopping rule.
    pub options: MaximizeOptions,
}

impl AirMaximizer {
    /// Maximizer over every belief of `family` with default options.
    pub fn full(family: Family, k: usize) -> Self {
        Self {
            domain: BeliefDomain::Full { family, k },
            options: MaximizeOptions::default(),
        }
    }

    /// Maximizer over joint laws on a model class.
    pub fn finite(class: ModelClass) -> Self {
        Self {
            domain: BeliefDomain::Finite(class),
            options: MaximizeOptions::default(),
        }
    }

    /// `argmax_nu AIR_{q,eta}(p, nu)` from the default or a warm start.
    ///
    /// The returned value is never below the warm start's value.
    pub fn maximize(
        &self,
        p: &Policy,
        q: &Policy,
        eta: f64,
        warm: Option<&WarmStart>,
    ) -> Result<MaximizeResult> {
        let air = Air::new(p, q, eta, self.domain.family())?;
        self.maximize_air(&air, warm)
    }

    pub(crate) fn maximize_air(&self, air: &Air, warm: Option<&WarmStart>) -> Result<MaximizeResult> {
        let a = ascend(air, &self.domain, warm, &self.options);
        let belief = JointBelief::new(self.domain.family(), a.alpha, a.beta)
            .or_else(|_| repair(self.domain.family(), air.k(), a.joint.as_deref(), &self.domain))?;
        let mut out = MaximizeResult {
            value: air.value(&belief)?,
            belief,
            joint: a.joint,
            status: a.status,
            iterations: a.iterations,
            residual: a.residual,
            fw_gap: a.fw_gap,
        };
        if let Some(WarmStart::Belief(b)) = warm {
            if let Ok(v) = air.value(b) {
                if v > out.value {
                    out.fw_gap += v - out.value;
                    out.value = v;
                    out.belief = b.clone();
                }
            }
        }
        Ok(out)
    }
}

// Rounding can push beta a hair outside its box after many softmax steps;
// rebuild from theta (or the joint law) when that happens.
fn repair(family: Family, k: usize, joint: Option<&[f64]>, domain: &BeliefDomain) -> Result<JointBelief> {
    if let (Some(nu), BeliefDomain::Finite(class)) = (joint, domain) {
        let nu = Policy::from_unnormalized(nu.to_vec())?;
        return JointBelief::from_joint(class, nu.as_slice());
    }
    Err(crate::error::arg_err!("maximizer produced an invalid belief (family {family:?}, K = {k})"))
}

/// `argmax_nu AIR_{q,eta}(p, nu)` over every belief of `family`, default
/// options, default start (`alpha = q`, slight tilt of `theta_i(i)`).
pub fn air_maximize(p: &Policy, q: &Policy, eta: f64, family: Family) -> Result<MaximizeResult> {
    AirMaximizer::full(family, p.len()).maximize(p, q, eta, None)
}
