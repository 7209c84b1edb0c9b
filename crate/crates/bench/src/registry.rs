//! Agent names and construction.

use algobelief::agents::{Agent, Ams, AmsConfig, Aps, Exp3, Scheduled, SimplifiedAps, Thompson, Ucb1, UniformAgent};
use algobelief::air::BeliefDomain;
use algobelief::envs::{benchmark_decisions, Benchmark, Environment};
use algobelief::linear::Glb;
use algobelief::mair::{Mams, Maps};
use algobelief::saddle::SaddleOptions;

use crate::config::AgentSpec;
use crate::error::{config_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    SimplifiedAps,
    Aps,
    Ams,
    Exp3,
    Ucb1,
    Thompson,
    Uniform,
    /// Plays the per-round best decision.
    Oracle,
    Glb,
    Maps,
    Mams,
}

pub const AGENT_NAMES: [&str; 11] = [
    "simplified_aps",
    "aps",
    "ams",
    "exp3",
    "ucb1",
    "thompson",
    "uniform",
    "oracle",
    "glb",
    "maps",
    "mams",
];

const KINDS: [AgentKind; 11] = [
    AgentKind::SimplifiedAps,
    AgentKind::Aps,
    AgentKind::Ams,
    AgentKind::Exp3,
    AgentKind::Ucb1,
    AgentKind::Thompson,
    AgentKind::Uniform,
    AgentKind::Oracle,
    AgentKind::Glb,
    AgentKind::Maps,
    AgentKind::Mams,
];

impl AgentKind {
    pub fn parse(name: &str) -> Result<Self> {
        AGENT_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| KINDS[i])
            .ok_or_else(|| config_err(format!("unknown agent {name:?}; known: {}", AGENT_NAMES.join(", "))))
    }

    pub fn name(self) -> &'static str {
        AGENT_NAMES[KINDS.iter().position(|k| *k == self).unwrap_or(0)]
    }

    /// Agents whose update takes binary (or `[0, 1]`) rewards.
    pub fn needs_bits(self) -> bool {
        matches!(
            self,
            AgentKind::SimplifiedAps
                | AgentKind::Exp3
                | AgentKind::Ucb1
                | AgentKind::Thompson
                | AgentKind::Maps
                | AgentKind::Mams
        )
    }

    pub fn needs_models(self) -> bool {
        matches!(self, AgentKind::Maps | AgentKind::Mams)
    }

    /// Agents whose rounds can carry regret-bound diagnostics.
    pub fn has_diagnostics(self) -> bool {
        matches!(
            self,
            AgentKind::SimplifiedAps | AgentKind::Aps | AgentKind::Ams | AgentKind::Maps | AgentKind::Mams
        )
    }
}

/// A fresh agent for one run.
pub fn build_agent(spec: &AgentSpec, env: &Environment, horizon: usize) -> Result<Box<dyn Agent>> {
    let k = env.num_decisions();
    let wrap = |e: algobelief::Error| config_err(format!("agent {}: {e}", spec.kind.name()));
    Ok(match spec.kind {
        AgentKind::SimplifiedAps => {
            Box::new(SimplifiedAps::new(k, spec.eta, spec.gamma).with_diagnostics(spec.diagnostics))
        }
        AgentKind::Aps => Box::new(Aps::new(k, spec.family, spec.eta, spec.gamma)),
        AgentKind::Ams => {
            let domain = match &spec.models {
                Some(class) => BeliefDomain::Finite(class.clone()),
                None => BeliefDomain::Full { family: spec.family, k },
            };
            Box::new(Ams::new(domain, spec.eta, spec.gamma, AmsConfig::default()).map_err(wrap)?)
        }
        AgentKind::Exp3 => Box::new(Exp3::new(k, spec.eta, spec.gamma)),
        AgentKind::Ucb1 => Box::new(Ucb1::new(k)),
        AgentKind::Thompson => Box::new(Thompson::new(k, spec.prior.0, spec.prior.1).map_err(wrap)?),
        AgentKind::Uniform => Box::new(UniformAgent::new(k)),
        AgentKind::Oracle => {
            let plan = benchmark_decisions(env, Benchmark::PerRoundBest, horizon.max(1)).map_err(wrap)?;
            Box::new(Scheduled::new(k, plan).map_err(wrap)?)
        }
        AgentKind::Glb => {
            let actions = spec.actions.clone().ok_or_else(|| config_err("agent glb needs actions"))?;
            Box::new(Glb::new(actions, spec.eta, spec.gamma, spec.exploration).map_err(wrap)?)
        }
        AgentKind::Maps => {
            let class = spec.models.clone().ok_or_else(|| config_err("agent maps needs models"))?;
            Box::new(Maps::new(class, spec.eta, spec.gamma).map_err(wrap)?)
        }
        AgentKind::Mams => {
            let class = spec.models.clone().ok_or_else(|| config_err("agent mams needs models"))?;
            Box::new(Mams::new(class, spec.eta, spec.gamma, SaddleOptions::default()).map_err(wrap)?)
        }
    })
}
