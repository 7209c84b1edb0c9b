//! Experiment configuration: one JSON document, optionally overridden by CLI
//! flags, resolved into an [`Experiment`] before anything is simulated.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use algobelief::agents::{EtaSchedule, DEFAULT_GAMMA};
use algobelief::envs::{build_env, presets, Benchmark, EnvSpec, Environment};
use algobelief::linear::{ExplorationSet, LinearActionSet};
use algobelief::{Family, ModelClass};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, BenchError, Result};
use crate::io;
use crate::registry::AgentKind;
use crate::sweep::SweepGrid;

/// A built-in instance by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetEnv {
    pub preset: String,
}

/// A scripted environment read from CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptEnv {
    pub script_csv: PathBuf,
}

/// A Gaussian linear environment whose actions come from CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearFileEnv {
    pub actions_csv: PathBuf,
    pub theta: Vec<f64>,
}

/// Where the environment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvConfig {
    Preset(PresetEnv),
    Script(ScriptEnv),
    LinearFile(LinearFileEnv),
    Inline(EnvSpec),
}

impl EnvConfig {
    /// Interpret a `--env` argument: a preset name, a `.csv` script, or a
    /// `.json` file holding an environment block.
    pub fn from_arg(arg: &str) -> Result<Self> {
        let lower = arg.to_ascii_lowercase();
        if lower.ends_with(".csv") {
            return Ok(EnvConfig::Script(ScriptEnv {
                script_csv: PathBuf::from(arg),
            }));
        }
        if lower.ends_with(".json") {
            let text = std::fs::read_to_string(arg).map_err(|e| BenchError::io(arg, e))?;
            return Ok(serde_json::from_str(&text)?);
        }
        if presets::by_name(arg).is_none() {
            return Err(config_err(format!(
                "unknown environment {arg:?}; presets are {}, or pass a .csv script or .json spec",
                presets::listing()
            )));
        }
        Ok(EnvConfig::Preset(PresetEnv { preset: arg.into() }))
    }
}

/// Learning rate: a number, `"horizon"` or `"anytime"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaConfig {
    Fixed(f64),
    Named(String),
}

impl Default for EtaConfig {
    fn default() -> Self {
        EtaConfig::Named("horizon".into())
    }
}

impl EtaConfig {
    pub fn parse(s: &str) -> Result<Self> {
        match s.parse::<f64>() {
            Ok(v) => Ok(EtaConfig::Fixed(v)),
            Err(_) => Ok(EtaConfig::Named(s.into())),
        }
    }

    fn resolve(&self, horizon: usize) -> Result<EtaSchedule> {
        match self {
            EtaConfig::Fixed(v) if v.is_finite() && *v > 0.0 => Ok(EtaSchedule::Fixed(*v)),
            EtaConfig::Fixed(v) => Err(config_err(format!("eta must be positive, got {v}"))),
            EtaConfig::Named(s) if s == "horizon" => Ok(EtaSchedule::Horizon(horizon)),
            EtaConfig::Named(s) if s == "anytime" => Ok(EtaSchedule::Anytime),
            EtaConfig::Named(s) => Err(config_err(format!(
                "eta must be a number, \"horizon\" or \"anytime\", got {s:?}"
            ))),
        }
    }
}

/// Inline rows or a CSV path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Rows(Vec<Vec<f64>>),
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub name: String,
    #[serde(default)]
    pub eta: EtaConfig,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Beta prior `(a, b)` of Thompson sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<(f64, f64)>,
    /// Model class for `maps`, `mams` and optionally `ams`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<MatrixSource>,
    /// Forced-exploration set of `glb`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploration: Option<ExplorationSet>,
    /// Record per-round AIR diagnostics (`simplified_aps`; the other
    /// belief-based agents always record them).
    #[serde(default)]
    pub diagnostics: bool,
    /// Reduce real rewards in `[lo, hi]` to bits before the agent sees them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_range: Option<(f64, f64)>,
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

impl AgentConfig {
    pub fn named(name: &str) -> Self {
        AgentConfig {
            name: name.into(),
            eta: EtaConfig::default(),
            gamma: DEFAULT_GAMMA,
            prior: None,
            models: None,
            exploration: None,
            diagnostics: false,
            reward_range: None,
        }
    }
}

/// Seed list, or `count` consecutive seeds from `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedsConfig {
    List(Vec<u64>),
    Range {
        count: u64,
        #[serde(default)]
        start: u64,
    },
}

impl Default for SeedsConfig {
    fn default() -> Self {
        SeedsConfig::Range { count: 10, start: 0 }
    }
}

impl SeedsConfig {
    /// `N` (seeds `0..N`), `a..b`, or a comma-separated list.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || config_err(format!("bad seeds {s:?}: use N, a..b or a comma-separated list"));
        if let Some((a, b)) = s.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            return Ok(SeedsConfig::Range { count: b - a, start: a });
        }
        if s.contains(',') {
            let list = s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<Vec<u64>>>()?;
            return Ok(SeedsConfig::List(list));
        }
        let n: u64 = s.trim().parse().map_err(|_| bad())?;
        Ok(SeedsConfig::Range { count: n, start: 0 })
    }

    pub fn to_list(&self) -> Vec<u64> {
        match self {
            SeedsConfig::List(v) => v.clone(),
            SeedsConfig::Range { count, start } => (*start..start.saturating_add(*count)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub agent: AgentConfig,
    /// Required unless the environment has its own horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub seeds: SeedsConfig,
    /// Defaults to `single-best`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<Benchmark>,
    /// Output directory for CSV files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Path of the regret plot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    /// Sweep grid, e.g. `eta=geom:0.01:1:9`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
}

impl ExperimentConfig {
    pub fn new(env: EnvConfig, agent: AgentConfig) -> Self {
        ExperimentConfig {
            env,
            agent,
            horizon: None,
            seeds: SeedsConfig::default(),
            benchmark: None,
            out: None,
            svg: None,
            sweep: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid config JSON: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Agent settings after validation.
#[derive(Debug, Clone)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub eta: EtaSchedule,
    pub gamma: f64,
    pub prior: (f64, f64),
    pub models: Option<ModelClass>,
    pub actions: Option<LinearActionSet>,
    pub exploration: ExplorationSet,
    pub diagnostics: bool,
    pub reward_range: Option<(f64, f64)>,
    /// Observation family the agent works with after any reduction.
    pub family: Family,
}

/// A validated experiment, ready to simulate.
#[derive(Debug, Clone)]
pub struct Experiment {
    /// The config with defaults filled in (horizon, seeds, benchmark).
    pub config: ExperimentConfig,
    pub env_spec: EnvSpec,
    pub env: Environment,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub benchmark: Benchmark,
    pub agent: AgentSpec,
}

fn resolve_path(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn env_spec(env: &EnvConfig, base: &Path) -> Result<EnvSpec> {
    match env {
        EnvConfig::Preset(p) => presets::by_name(&p.preset).ok_or_else(|| {
            config_err(format!("unknown preset {:?}; known: {}", p.preset, presets::listing()))
        }),
        EnvConfig::Script(s) => Ok(EnvSpec::Scripted {
            table: io::load_scripted_csv(&resolve_path(base, &s.script_csv))?,
        }),
        EnvConfig::LinearFile(l) => Ok(EnvSpec::GaussianLinear {
            actions: io::load_actions_csv(&resolve_path(base, &l.actions_csv))?,
            theta: l.theta.clone(),
        }),
        EnvConfig::Inline(spec) => Ok(spec.clone()),
    }
}

impl Experiment {
    /// Validate `config`; relative paths are taken from `base`.
    pub fn resolve(config: ExperimentConfig, base: &Path) -> Result<Self> {
        let kind = AgentKind::parse(&config.agent.name)?;
        let env_spec = env_spec(&config.env, base)?;
        let env = build_env(&env_spec).map_err(|e| config_err(format!("environment: {e}")))?;

        let horizon = match (config.horizon, env.horizon()) {
            (Some(h), Some(max)) if h > max => {
                return Err(config_err(format!("horizon {h} exceeds the environment's {max} rounds")))
            }
            (Some(h), _) => h,
            (None, Some(h)) => h,
            (None, None) => return Err(config_err("horizon is required for this environment")),
        };

        let seeds = config.seeds.to_list();
        if seeds.is_empty() {
            return Err(config_err("seeds must be non-empty"));
        }
        if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
            return Err(config_err("seeds must be distinct"));
        }

        let benchmark = config.benchmark.unwrap_or(Benchmark::SingleBest);
        if benchmark == Benchmark::PerBatchBest && env.batches().is_none() {
            return Err(config_err("benchmark per-batch-best needs a changepoint environment"));
        }

        let agent = resolve_agent(&config.agent, kind, &env_spec, &env, horizon, base)?;
        if let Some(grid) = &config.sweep {
            SweepGrid::parse(grid)?;
        }

        let mut config = config;
        config.horizon = Some(horizon);
        config.seeds = SeedsConfig::List(seeds.clone());
        config.benchmark = Some(benchmark);
        Ok(Experiment {
            config,
            env_spec,
            env,
            horizon,
            seeds,
            benchmark,
            agent,
        })
    }
}

fn resolve_agent(
    cfg: &AgentConfig,
    kind: AgentKind,
    spec: &EnvSpec,
    env: &Environment,
    horizon: usize,
    base: &Path,
) -> Result<AgentSpec> {
    let k = env.num_decisions();
    let eta = cfg.eta.resolve(horizon)?;
    if !(0.0..=1.0).contains(&cfg.gamma) {
        return Err(config_err(format!("gamma must lie in [0, 1], got {}", cfg.gamma)));
    }
    let prior = cfg.prior.unwrap_or((1.0, 1.0));
    if !(prior.0 > 0.0 && prior.1 > 0.0) {
        return Err(config_err("prior parameters must be positive"));
    }
    if let Some((lo, hi)) = cfg.reward_range {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(config_err("reward_range must be finite with lo < hi"));
        }
        if kind == AgentKind::Glb {
            return Err(config_err("glb uses real rewards; drop reward_range"));
        }
    }
    let reduced = cfg.reward_range.is_some();
    let family = if reduced { Family::Bernoulli } else { env.family() };
    if family != Family::Bernoulli && kind.needs_bits() {
        return Err(config_err(format!(
            "agent {} needs binary rewards; set agent.reward_range to reduce the {} environment's rewards",
            kind.name(),
            env.kind()
        )));
    }

    let models = match &cfg.models {
        None => None,
        Some(src) => {
            let rows = match src {
                MatrixSource::Rows(r) => r.clone(),
                MatrixSource::Csv(p) => io::load_models_csv(&resolve_path(base, p))?,
            };
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let class = ModelClass::bernoulli(&refs).map_err(|e| config_err(format!("models: {e}")))?;
            if class.num_decisions() != k {
                return Err(config_err(format!(
                    "models have {} decisions, the environment {k}",
                    class.num_decisions()
                )));
            }
            Some(class)
        }
    };
    if kind.needs_models() && models.is_none() {
        return Err(config_err(format!("agent {} needs agent.models", kind.name())));
    }
    if models.is_some() && !matches!(kind, AgentKind::Maps | AgentKind::Mams | AgentKind::Ams) {
        return Err(config_err(format!("agent {} takes no models", kind.name())));
    }

    let actions = if kind == AgentKind::Glb {
        match spec {
            EnvSpec::GaussianLinear { actions, .. } => {
                Some(LinearActionSet::new(actions.clone()).map_err(|e| config_err(format!("actions: {e}")))?)
            }
            _ => return Err(config_err("agent glb needs a gaussian_linear environment")),
        }
    } else {
        None
    };

    Ok(AgentSpec {
        kind,
        eta,
        gamma: cfg.gamma,
        prior,
        models,
        actions,
        exploration: cfg.exploration.unwrap_or_default(),
        diagnostics: cfg.diagnostics,
        reward_range: cfg.reward_range,
        family,
    })
}
