//! Model-index information ratio over a finite model class.
//!
//! For a belief `mu` and a reference `rho` over models,
//! `MAIR(p, mu) = E_{M~mu, pi~p}[f_M(pi_M) - f_M(pi)] - (1/eta) E[KL(mu(.|pi,o), rho)]`
//! with the expectation over `o ~ M(pi)` computed exactly (Bernoulli
//! observations). MAIR is linear in `p` and concave in `mu`.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::agents::{ensure_interior, Agent, EtaSchedule, RoundDiagnostics};
use crate::error::arg_err;
use crate::num::{exp, ln, xlogxy};
use crate::prob::{Family, ModelClass, Observation, Policy, EPS_MIN};
use crate::saddle::{self, soft_best_response, SaddleOptions, SaddleProblem, SaddleResult};
use crate::{Error, Result};

fn check_simplex(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(arg_err!("{name} has {} entries for {n} models", v.len()));
    }
    let s: f64 = v.iter().sum();
    if v.iter().any(|x| !(*x >= 0.0)) || (s - 1.0).abs() > 1e-9 {
        return Err(arg_err!("{name} is not a distribution over models"));
    }
    Ok(())
}

/// Per-decision pieces of MAIR at a fixed `mu`:
/// `info[pi] = E_o KL(mu(.|pi,o), rho)` and
/// `score[M][pi] = sum_o M_pi(o) ln(mu(M|pi,o) / rho(M))`.
struct Pieces {
    info: Vec<f64>,
    score: Vec<f64>,
}

fn pieces(models: &ModelClass, rho: &[f64], mu: &[f64], want_score: bool) -> Pieces {
    let n = models.len();
    let k = models.num_decisions();
    let mut info = vec![0.0; k];
    let mut score = if want_score { vec![0.0; n * k] } else { Vec::new() };
    let mut post = vec![0.0; n];
    for pi in 0..k {
        for bit in [false, true] {
            let mut total = 0.0;
            for (m, model) in models.models().iter().enumerate() {
                post[m] = mu[m] * model.bernoulli_prob(pi, bit);
                total += post[m];
            }
            if total <= 0.0 {
                continue;
            }
            let mut kl = 0.0;
            for m in 0..n {
                post[m] /= total;
                kl += xlogxy(post[m], rho[m]);
            }
            info[pi] += total * kl;
            if want_score {
                for (m, model) in models.models().iter().enumerate() {
                    let lik = model.bernoulli_prob(pi, bit);
                    if lik > 0.0 {
                        score[m * k + pi] += lik * ln(post[m].max(1e-300) / rho[m]);
                    }
                }
            }
        }
    }
    Pieces { info, score }
}

/// MAIR as a function of `mu` at fixed `(rho, eta)`.
#[derive(Debug, Clone)]
pub struct Mair<'a> {
    models: &'a ModelClass,
    rho: Vec<f64>,
    eta: f64,
}

impl<'a> Mair<'a> {
    /// Validate: Bernoulli class, `rho` interior distribution, `eta > 0`.
    pub fn new(models: &'a ModelClass, rho: &[f64], eta: f64) -> Result<Self> {
        if models.family() != Family::Bernoulli {
            return Err(arg_err!("MAIR is implemented for Bernoulli model classes"));
        }
        check_simplex("rho", rho, models.len())?;
        if rho.iter().any(|&r| r < EPS_MIN) {
            return Err(Error::Boundary(alloc::format!("rho must be interior")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(arg_err!("eta must be positive, got {eta}"));
        }
        Ok(Self {
            models,
            rho: rho.to_vec(),
            eta,
        })
    }

    /// Model class.
    pub fn models(&self) -> &ModelClass {
        self.models
    }

    /// `(c0, c)` with `MAIR(p, mu) = c0 + <p, c>`.
    pub fn coefficients(&self, mu: &[f64]) -> (f64, Vec<f64>) {
        let k = self.models.num_decisions();
        let pc = pieces(self.models, &self.rho, mu, false);
        let mut c0 = 0.0;
        let mut c: Vec<f64> = pc.info.iter().map(|t| -t / self.eta).collect();
        for (m, model) in self.models.models().iter().enumerate() {
            c0 += mu[m] * model.mean(self.models.optimal_decision(m));
            for (pi, cp) in c.iter_mut().enumerate().take(k) {
                *cp -= mu[m] * model.mean(pi);
            }
        }
        (c0, c)
    }

    /// Value at `(p, mu)`.
    pub fn value(&self, p: &[f64], mu: &[f64]) -> f64 {
        let (c0, c) = self.coefficients(mu);
        c0 + crate::num::dot(p, &c)
    }

    /// Value and gradient in `mu` at `(p, mu)`.
    pub fn value_grad(&self, p: &[f64], mu: &[f64], g: &mut [f64]) -> f64 {
        let k = self.models.num_decisions();
        let pc = pieces(self.models, &self.rho, mu, true);
        let mut v = 0.0;
        for (m, model) in self.models.models().iter().enumerate() {
            let reg = model.mean(self.models.optimal_decision(m)) - crate::num::dot(p, model.means());
            let sc: f64 = (0..k).map(|pi| p[pi] * pc.score[m * k + pi]).sum();
            g[m] = reg - sc / self.eta;
            v += mu[m] * reg;
        }
        v - crate::num::dot(p, &pc.info) / self.eta
    }
}

/// `MAIR_{rho,eta}(p, mu)` by exact enumeration of Bernoulli observations.
pub fn mair_eval(p: &Policy, rho: &[f64], eta: f64, mu: &[f64], models: &ModelClass) -> Result<f64> {
    if p.len() != models.num_decisions() {
        return Err(arg_err!("policy length does not match the class"));
    }
    check_simplex("mu", mu, models.len())?;
    Ok(Mair::new(models, rho, eta)?.value(p.as_slice(), mu))
}

/// Gradient of MAIR with respect to `mu`.
pub fn mair_grad(p: &Policy, rho: &[f64], eta: f64, mu: &[f64], models: &ModelClass) -> Result<Vec<f64>> {
    check_simplex("mu", mu, models.len())?;
    let mut g = vec![0.0; models.len()];
    Mair::new(models, rho, eta)?.value_grad(p.as_slice(), mu, &mut g);
    Ok(g)
}

/// Output of [`simplex_ascent`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexAscent {
    /// Final point.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub value: f64,
    /// Frank-Wolfe gap at `x`.
    pub fw_gap: f64,
    /// Iterations used.
    pub iterations: usize,
}

/// Entropic mirror ascent of a concave function on the simplex, with
/// Armijo backtracking. `f` writes the gradient and returns the value.
pub fn simplex_ascent(
    x0: Vec<f64>,
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    gap_tol: f64,
    max_iter: usize,
) -> SimplexAscent {
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut gc = vec![0.0; n];
    let mut v = f(&x, &mut g);
    let mut step = 1.0;
    let mut iterations = 0;
    let gap_of = |x: &[f64], g: &[f64]| {
        g.iter().copied().fold(f64::NEG_INFINITY, f64::max) - crate::num::dot(x, g)
    };
    let mut gap = gap_of(&x, &g);
    while iterations < max_iter && gap > gap_tol {
        iterations += 1;
        let gmax = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = false;
        while step > 1e-18 {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(&xi, &gi)| xi * exp(step * (gi - gmax))).collect();
            let s: f64 = cand.iter().sum();
            cand.iter_mut().for_each(|c| *c /= s);
            let vc = f(&cand, &mut gc);
            let lin: f64 = g.iter().zip(cand.iter().zip(&x)).map(|(gi, (c, xi))| gi * (c - xi)).sum();
            if vc >= v + 1e-4 * lin && vc.is_finite() {
                x = cand;
                v = vc;
                core::mem::swap(&mut g, &mut gc);
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        gap = gap_of(&x, &g);
        if !accepted {
            break;
        }
    }
    SimplexAscent {
        x,
        value: v,
        fw_gap: gap,
        iterations,
    }
}

/// `argmax_mu MAIR(p, mu)` from `warm` (default: `rho`).
pub fn mair_maximize(
    p: &Policy,
    rho: &[f64],
    eta: f64,
    models: &ModelClass,
    warm: Option<&[f64]>,
) -> Result<SimplexAscent> {
    let mair = Mair::new(models, rho, eta)?;
    let start = warm.map(|w| w.to_vec()).unwrap_or_else(|| rho.to_vec());
    check_simplex("warm start", &start, models.len())?;
    // keep the start interior so mirror steps can move every coordinate
    let start = Policy::from_unnormalized(start.iter().map(|&x| x.max(1e-300)).collect())?.into_vec();
    Ok(simplex_ascent(start, |mu, g| mair.value_grad(p.as_slice(), mu, g), 1e-10, 5000))
}

/// Closed-form adaptive belief:
/// `mu(M) ~ rho(M) exp(eta (f_M(pi_M) - E_p f_M) - E_p H^2(M(pi), rho_{o|pi}) / 3)`.
pub fn closed_form_belief(rho: &[f64], p: &Policy, eta: f64, models: &ModelClass) -> Result<Vec<f64>> {
    check_simplex("rho", rho, models.len())?;
    if p.len() != models.num_decisions() {
        return Err(arg_err!("policy length does not match the class"));
    }
    let fam = models.family();
    let nominal = models.mixture(rho)?;
    let lw: Vec<f64> = models
        .models()
        .iter()
        .enumerate()
        .map(|(m, model)| {
            let reg = model.mean(models.optimal_decision(m)) - crate::num::dot(p.as_slice(), model.means());
            let h: f64 = (0..p.len())
                .map(|pi| p.get(pi) * fam.hellinger_sq(model.mean(pi), nominal.mean(pi)))
                .sum();
            if rho[m] > 0.0 {
                ln(rho[m]) + eta * reg - h / 3.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    Ok(Policy::from_log_weights(&lw)?.into_vec())
}

/// Bayes update of a model belief after observing `o` at `pi`.
pub fn model_posterior(mu: &[f64], models: &ModelClass, pi: usize, o: Observation) -> Result<Vec<f64>> {
    check_simplex("mu", mu, models.len())?;
    if pi >= models.num_decisions() {
        return Err(arg_err!("decision {pi} out of range"));
    }
    let lik = |m: &crate::prob::Model| -> Result<f64> {
        match models.family() {
            Family::Bernoulli => {
                let b = o
                    .as_bit()
                    .ok_or_else(|| arg_err!("Bernoulli models need a binary observation, got {}", o.value))?;
                Ok(m.bernoulli_prob(pi, b))
            }
            Family::GaussianUnitVariance => {
                let d = o.value - m.mean(pi);
                Ok(exp(-0.5 * d * d))
            }
        }
    };
    let mut w = Vec::with_capacity(mu.len());
    for (m, model) in models.models().iter().enumerate() {
        w.push(mu[m] * lik(model)?);
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroLikelihood { pi, obs: o.value });
    }
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// Per-round summand of the closed-form-belief regret bound:
/// `E_{mu,p}[f_M(pi_M) - f_M(pi) - H^2(M(pi), rho_{o|pi}) / (3 eta)] - KL(mu, rho) / (3 eta)`.
pub fn closed_form_bound_term(
    p: &Policy,
    rho: &[f64],
    eta: f64,
    mu: &[f64],
    models: &ModelClass,
) -> Result<f64> {
    let fam = models.family();
    let nominal = models.mixture(rho)?;
    let mut acc = 0.0;
    for (m, model) in models.models().iter().enumerate() {
        let best = model.mean(models.optimal_decision(m));
        let inner: f64 = (0..p.len())
            .map(|pi| {
                p.get(pi)
                    * (best - model.mean(pi) - fam.hellinger_sq(model.mean(pi), nominal.mean(pi)) / (3.0 * eta))
            })
            .sum();
        acc += mu[m] * inner;
    }
    let kl = crate::prob::kl_categorical(mu, rho)?;
    Ok(acc - kl / (3.0 * eta))
}

/// Fixed point of `mu -> closed_form_belief(rho, induced(mu))`, started at
/// `rho`; returns the decision law it induces.
pub fn maps_policy(rho: &[f64], eta: f64, models: &ModelClass) -> Result<Policy> {
    let mut mu = rho.to_vec();
    for _ in 0..50 {
        let p = models.induced_policy(&mu)?;
        let next = closed_form_belief(rho, &p, eta, models)?;
        let change = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        mu = next;
        if change < 1e-12 {
            break;
        }
    }
    models.induced_policy(&mu)
}

fn model_rate(eta: &EtaSchedule, n: usize, t: usize) -> f64 {
    // the schedules count models, not decisions, for model-index agents
    eta.eta(n, t)
}

/// Model-index adaptive posterior sampling with closed-form beliefs.
#[derive(Debug, Clone)]
pub struct Maps {
    models: ModelClass,
    rho: Vec<f64>,
    mu: Vec<f64>,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
    t_next: usize,
    diag: Option<RoundDiagnostics>,
}

impl Maps {
    /// Uniform reference over the class.
    pub fn new(models: ModelClass, eta: EtaSchedule, gamma: f64) -> Result<Self> {
        let n = models.len();
        let rho = vec![1.0 / n as f64; n];
        let mut s = Self {
            p: Policy::uniform(models.num_decisions()),
            mu: rho.clone(),
            rho,
            models,
            eta,
            gamma,
            t_next: 0,
            diag: None,
        };
        s.prepare(0)?;
        Ok(s)
    }

    fn prepare(&mut self, t: usize) -> Result<()> {
        let eta = model_rate(&self.eta, self.models.len(), t);
        let p = maps_policy(&self.rho, eta, &self.models)?.mix_uniform(self.gamma);
        self.mu = closed_form_belief(&self.rho, &p, eta, &self.models)?;
        self.p = p;
        self.t_next = t;
        Ok(())
    }

    /// Reference `rho_t`.
    pub fn reference(&self) -> &[f64] {
        &self.rho
    }

    /// Belief `mu_t` of the upcoming round.
    pub fn belief(&self) -> &[f64] {
        &self.mu
    }
}

impl Agent for Maps {
    fn name(&self) -> &'static str {
        "maps"
    }
    fn num_decisions(&self) -> usize {
        self.models.num_decisions()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        self.p.sample(rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        if t != self.t_next {
            self.prepare(t)?;
        }
        let n = self.models.len();
        let eta = model_rate(&self.eta, n, t);
        let term = closed_form_bound_term(&self.p, &self.rho, eta, &self.mu, &self.models)?;
        let mair = Mair::new(&self.models, &self.rho, eta)?.value(self.p.as_slice(), &self.mu);
        self.diag = Some(RoundDiagnostics {
            eta,
            air: mair,
            fw_gap: 0.0,
            duality_gap: None,
            converged: true,
            bound_term: term,
            bound_offset: ln(n as f64) / eta,
        });
        self.rho = match model_posterior(&self.mu, &self.models, chosen, obs) {
            Ok(r) => ensure_interior(Policy::new(r)?).into_vec(),
            Err(Error::ZeroLikelihood { .. }) => self.rho.clone(),
            Err(e) => return Err(e),
        };
        self.prepare(t + 1)
    }
    fn diagnostics(&self) -> Option<&RoundDiagnostics> {
        self.diag.as_ref()
    }
}

/// `inf_p sup_mu MAIR_{rho,eta}(p, mu)`.
#[derive(Debug, Clone)]
pub struct MairSaddle<'a> {
    mair: Mair<'a>,
}

impl<'a> MairSaddle<'a> {
    /// Game at reference `rho`.
    pub fn new(models: &'a ModelClass, rho: &[f64], eta: f64) -> Result<Self> {
        Ok(Self {
            mair: Mair::new(models, rho, eta)?,
        })
    }
}

impl SaddleProblem for MairSaddle<'_> {
    type Point = Vec<f64>;

    fn k(&self) -> usize {
        self.mair.models.num_decisions()
    }

    fn coefficients(&self, mu: &Vec<f64>, c: &mut [f64]) -> f64 {
        let (c0, cc) = self.mair.coefficients(mu);
        c.copy_from_slice(&cc);
        c0
    }

    fn smoothed_ascent(&self, tau: f64, warm: Option<&Vec<f64>>) -> Vec<f64> {
        let k = self.k();
        let start = warm.cloned().unwrap_or_else(|| self.mair.rho.clone());
        let r = simplex_ascent(
            start,
            |mu, g| {
                let (c0, c) = self.mair.coefficients(mu);
                let (p, v) = if tau.is_infinite() {
                    (vec![1.0 / k as f64; k], c0 + c.iter().sum::<f64>() / k as f64)
                } else {
                    let z: Vec<f64> = c.iter().map(|&x| -x / tau).collect();
                    (soft_best_response(&c, tau), c0 - tau * crate::num::log_sum_exp(&z))
                };
                self.mair.value_grad(&p, mu, g);
                v
            },
            1e-10,
            5000,
        );
        r.x
    }

    fn best_response(&self, p: &Policy, warm: &Vec<f64>) -> (Vec<f64>, f64) {
        let start = Policy::from_unnormalized(warm.iter().map(|&x| x.max(1e-300)).collect())
            .map(Policy::into_vec)
            .unwrap_or_else(|_| self.mair.rho.clone());
        let r = simplex_ascent(start, |mu, g| self.mair.value_grad(p.as_slice(), mu, g), 1e-10, 5000);
        let up = r.value + r.fw_gap.max(0.0);
        (r.x, up)
    }
}

/// Approximate saddle point of MAIR.
pub fn mair_saddle(
    models: &ModelClass,
    rho: &[f64],
    eta: f64,
    warm: Option<&Vec<f64>>,
    opts: &SaddleOptions,
) -> Result<SaddleResult<Vec<f64>>> {
    let game = MairSaddle::new(models, rho, eta)?;
    Ok(saddle::solve(&game, warm, opts))
}

/// Model-index adaptive minimax sampling.
#[derive(Debug, Clone)]
pub struct Mams {
    models: ModelClass,
    rho: Vec<f64>,
    p: Policy,
    eta: EtaSchedule,
    gamma: f64,
    opts: SaddleOptions,
    current: SaddleResult<Vec<f64>>,
    t_next: usize,
    diag: Option<RoundDiagnostics>,
}

impl Mams {
    /// Uniform reference over the class.
    pub fn new(models: ModelClass, eta: EtaSchedule, gamma: f64, opts: SaddleOptions) -> Result<Self> {
        let n = models.len();
        let rho = vec![1.0 / n as f64; n];
        let current = mair_saddle(&models, &rho, model_rate(&eta, n, 0), None, &opts)?;
        Ok(Self {
            p: current.p.mix_uniform(gamma),
            models,
            rho,
            eta,
            gamma,
            opts,
            current,
            t_next: 0,
            diag: None,
        })
    }

    /// Saddle solution of the upcoming round.
    pub fn saddle(&self) -> &SaddleResult<Vec<f64>> {
        &self.current
    }

    /// Reference `rho_t`.
    pub fn reference(&self) -> &[f64] {
        &self.rho
    }

    fn prepare(&mut self, t: usize) -> Result<()> {
        let eta = model_rate(&self.eta, self.models.len(), t);
        let warm = self.current.point.clone();
        self.current = mair_saddle(&self.models, &self.rho, eta, Some(&warm), &self.opts)?;
        self.p = self.current.p.mix_uniform(self.gamma);
        self.t_next = t;
        Ok(())
    }
}

impl Agent for Mams {
    fn name(&self) -> &'static str {
        "mams"
    }
    fn num_decisions(&self) -> usize {
        self.models.num_decisions()
    }
    fn policy(&self) -> Option<&Policy> {
        Some(&self.p)
    }
    fn select(&mut self, _t: usize, rng: &mut dyn RngCore) -> usize {
        self.p.sample(rng)
    }
    fn update(&mut self, t: usize, chosen: usize, obs: Observation) -> Result<()> {
        if t != self.t_next {
            self.prepare(t)?;
        }
        let n = self.models.len();
        let eta = model_rate(&self.eta, n, t);
        let mair = Mair::new(&self.models, &self.rho, eta)?;
        let mu = &self.current.point;
        let mut g = vec![0.0; n];
        let v = mair.value_grad(self.p.as_slice(), mu, &mut g);
        let gap = (g.iter().copied().fold(f64::NEG_INFINITY, f64::max) - crate::num::dot(mu, &g)).max(0.0);
        self.diag = Some(RoundDiagnostics {
            eta,
            air: v,
            fw_gap: gap,
            duality_gap: Some(self.current.gap),
            converged: self.current.gap <= self.opts.tol,
            bound_term: v + gap,
            bound_offset: ln(n as f64) / eta,
        });
        self.rho = match model_posterior(mu, &self.models, chosen, obs) {
            Ok(r) => ensure_interior(Policy::new(r)?).into_vec(),
            Err(Error::ZeroLikelihood { .. }) => self.rho.clone(),
            Err(e) => return Err(e),
        };
        self.prepare(t + 1)
    }
    fn diagnostics(&self) -> Option<&RoundDiagnostics> {
        self.diag.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mair_examples() {
        let one = ModelClass::bernoulli(&[&[0.2, 0.9]]).unwrap();
        let v = mair_eval(&Policy::point_mass(2, 1), &[1.0], 0.7, &[1.0], &one).unwrap();
        assert!(v.abs() < 1e-15);
        let two = ModelClass::bernoulli(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let v = mair_eval(&Policy::uniform(2), &[0.5, 0.5], 1.0, &[1.0, 0.0], &two).unwrap();
        assert!((v - (0.5 - 2f64.ln())).abs() < 1e-12);
        assert!((v + 0.193147).abs() < 5e-7);
    }

    #[test]
    fn closed_form_examples() {
        let same = ModelClass::bernoulli(&[&[0.3, 0.6], &[0.3, 0.6]]).unwrap();
        let rho = [0.3, 0.7];
        let mu = closed_form_belief(&rho, &Policy::uniform(2), 2.0, &same).unwrap();
        assert!((mu[0] - 0.3).abs() < 1e-15 && (mu[1] - 0.7).abs() < 1e-15);
        // f-terms 0.3 and 0.1 at p = point mass on decision 1, where both
        // models agree (equal Hellinger terms, both zero)
        let c = ModelClass::bernoulli(&[&[0.8, 0.5], &[0.6, 0.5]]).unwrap();
        let p = Policy::point_mass(2, 1);
        let mu = closed_form_belief(&[0.5, 0.5], &p, 1.0, &c).unwrap();
        assert!((mu[0] - 0.549834).abs() < 5e-7 && (mu[1] - 0.450166).abs() < 5e-7);
        let mu = closed_form_belief(&[0.5, 0.5], &p, 1e-8, &c).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn posterior_examples() {
        let c = ModelClass::bernoulli(&[&[0.8], &[0.2]]).unwrap();
        let up = model_posterior(&[0.5, 0.5], &c, 0, Observation::bit(true)).unwrap();
        assert!((up[0] - 0.8).abs() < 1e-15 && (up[1] - 0.2).abs() < 1e-15);
        let down = model_posterior(&[0.5, 0.5], &c, 0, Observation::bit(false)).unwrap();
        assert!((down[0] - 0.2).abs() < 1e-15);
        assert_eq!(model_posterior(&[1.0, 0.0], &c, 0, Observation::bit(false)).unwrap(), vec![1.0, 0.0]);
        let sure = ModelClass::bernoulli(&[&[1.0], &[1.0]]).unwrap();
        assert!(matches!(
            model_posterior(&[0.5, 0.5], &sure, 0, Observation::bit(false)),
            Err(Error::ZeroLikelihood { .. })
        ));
    }

    #[test]
    fn maps_induced_policy() {
        let c = ModelClass::bernoulli(&[&[0.9, 0.1], &[0.1, 0.9]]).unwrap();
        assert_eq!(c.induced_policy(&[0.7, 0.3]).unwrap().as_slice(), &[0.7, 0.3]);
        let shared = ModelClass::bernoulli(&[&[0.9, 0.1], &[0.6, 0.5]]).unwrap();
        let p = maps_policy(&[0.5, 0.5], 0.5, &shared).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn maximizer_certifies() {
        let c = ModelClass::bernoulli(&[&[0.9, 0.2, 0.4], &[0.3, 0.8, 0.5], &[0.5, 0.5, 0.7]]).unwrap();
        let rho = [0.2, 0.5, 0.3];
        let p = Policy::new(vec![0.5, 0.3, 0.2]).unwrap();
        let r = mair_maximize(&p, &rho, 0.8, &c, None).unwrap();
        assert!(r.fw_gap < 1e-8, "gap {}", r.fw_gap);
        // no vertex beats the maximizer
        for m in 0..3 {
            let mut e = [0.0; 3];
            e[m] = 1.0;
            assert!(mair_eval(&p, &rho, 0.8, &e, &c).unwrap() <= r.value + 1e-12);
        }
    }

    #[test]
    fn mams_singleton() {
        let c = ModelClass::bernoulli(&[&[0.1, 0.6, 0.3]]).unwrap();
        let m = Mams::new(c, EtaSchedule::Fixed(0.5), 0.0, SaddleOptions::default()).unwrap();
        assert_eq!(m.policy().unwrap().as_slice(), &[0.0, 1.0, 0.0]);
        assert!(m.saddle().gap < 1e-9);
    }
}
