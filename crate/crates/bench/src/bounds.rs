//! Checks of realized regret against the agents' regret bounds.
//!
//! Every bound is evaluated per run and compared with that run's regret
//! against the single best decision. A bound passes when the mean excess
//! `regret - rhs` is at most three standard errors of that excess.

use std::fmt;

use algobelief::envs::Benchmark;

use crate::config::Experiment;
use crate::error::{config_err, BenchError, Result};
use crate::registry::AgentKind;
use crate::regret::{dynamic_regret, mean_stderr};
use crate::run::ExperimentOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `log K / eta + sum_t (AIR_t + FW gap_t)` for agents built on
    /// approximate AIR maximizers.
    AirGeneric,
    /// `2 sqrt(2 (K + 2) T log K)` for simplified APS on Bernoulli arms.
    MabClosedForm,
    /// `log |M| / eta + sum_t (MAIR_t + gap_t)` for MAMS.
    MairMinimax,
    /// `log |M| / eta + sum_t term_t` with the closed-form-belief terms, for
    /// MAPS.
    MairClosedForm,
}

pub const BOUND_NAMES: [&str; 4] = ["air-generic", "mab-closed-form", "mair-minimax", "mair-closed-form"];

impl Bound {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "air-generic" => Bound::AirGeneric,
            "mab-closed-form" => Bound::MabClosedForm,
            "mair-minimax" => Bound::MairMinimax,
            "mair-closed-form" => Bound::MairClosedForm,
            _ => return Err(config_err(format!("unknown bound {s:?}; known: {}", BOUND_NAMES.join(", ")))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Bound::AirGeneric => BOUND_NAMES[0],
            Bound::MabClosedForm => BOUND_NAMES[1],
            Bound::MairMinimax => BOUND_NAMES[2],
            Bound::MairClosedForm => BOUND_NAMES[3],
        }
    }

    fn agents(self) -> &'static [AgentKind] {
        match self {
            Bound::AirGeneric => &[AgentKind::SimplifiedAps, AgentKind::Aps, AgentKind::Ams],
            Bound::MabClosedForm => &[AgentKind::SimplifiedAps],
            Bound::MairMinimax => &[AgentKind::Mams],
            Bound::MairClosedForm => &[AgentKind::Maps],
        }
    }
}

/// `2 sqrt(2 (K + 2) T log K)`.
pub fn mab_closed_form_rhs(k: usize, horizon: usize) -> f64 {
    2.0 * (2.0 * (k as f64 + 2.0) * horizon as f64 * (k as f64).ln()).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound: Bound,
    pub runs: usize,
    pub mean_regret: f64,
    pub mean_rhs: f64,
    /// Mean of `regret - rhs` over runs.
    pub mean_excess: f64,
    /// Standard error of the excess.
    pub excess_se: f64,
    pub pass: bool,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} runs, mean regret {:.4} vs bound {:.4} (excess {:.4}, 3 SE {:.4}): {}",
            self.bound.name(),
            self.runs,
            self.mean_regret,
            self.mean_rhs,
            self.mean_excess,
            3.0 * self.excess_se,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Compare the runs in `out` (produced from `exp`) with `bound`.
///
/// The diagnostic bounds use the constant term recorded in the last round;
/// with an anytime learning rate that is `log |Pi| / eta_T`.
pub fn theorem_bound_check(exp: &Experiment, out: &ExperimentOutput, bound: Bound) -> Result<BoundReport> {
    let kind = exp.agent.kind;
    if !bound.agents().contains(&kind) {
        let names: Vec<&str> = bound.agents().iter().map(|a| a.name()).collect();
        return Err(config_err(format!(
            "bound {} applies to agent {}, not {}",
            bound.name(),
            names.join(" or "),
            kind.name()
        )));
    }
    let k = exp.env.num_decisions();
    let mut regrets = Vec::with_capacity(out.traces.len());
    let mut rhs = Vec::with_capacity(out.traces.len());
    for tr in &out.traces {
        let horizon = tr.decisions.len();
        regrets.push(dynamic_regret(&tr.decisions, &exp.env, Benchmark::SingleBest)?);
        let value = match bound {
            Bound::MabClosedForm => mab_closed_form_rhs(k, horizon),
            _ if horizon == 0 => {
                let n = match &exp.agent.models {
                    Some(class) if bound != Bound::AirGeneric => class.len(),
                    _ => k,
                };
                let eta = exp.agent.eta.eta(n, 0);
                (n as f64).ln() / eta
            }
            _ => {
                if tr.diagnostics.len() != horizon {
                    let hint = if kind == AgentKind::SimplifiedAps {
                        "set \"diagnostics\": true in the agent block (or pass --diagnostics)".to_string()
                    } else {
                        format!("agent {} should record them every round", kind.name())
                    };
                    return Err(BenchError::MissingDiagnostics(format!(
                        "bound {} needs per-round AIR diagnostics; {hint}",
                        bound.name()
                    )));
                }
                let offset = tr.diagnostics.last().map_or(0.0, |d| d.bound_offset);
                offset + tr.diagnostics.iter().map(|d| d.bound_term).sum::<f64>()
            }
        };
        rhs.push(value);
    }
    let excess: Vec<f64> = regrets.iter().zip(&rhs).map(|(r, b)| r - b).collect();
    let (mean_excess, excess_se) = mean_stderr(&excess);
    Ok(BoundReport {
        bound,
        runs: regrets.len(),
        mean_regret: mean_stderr(&regrets).0,
        mean_rhs: mean_stderr(&rhs).0,
        mean_excess,
        excess_se,
        pass: mean_excess <= 3.0 * excess_se,
    })
}
