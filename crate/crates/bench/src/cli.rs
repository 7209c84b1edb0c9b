//! Command-line interface. Exit codes: 0 success, 1 runtime failure,
//! 2 config error, 3 failed bound check.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use algobelief::envs::{presets, synthetic_adversarial_script, Benchmark};
use clap::{Args, Parser, Subcommand};

use crate::bounds::{theorem_bound_check, Bound};
use crate::config::{AgentConfig, EnvConfig, EtaConfig, Experiment, ExperimentConfig, SeedsConfig};
use crate::error::{config_err, BenchError, Result};
use crate::registry::AGENT_NAMES;
use crate::run::{run_experiment, write_outputs};
use crate::sweep::{envelope_csv, sweep, sweep_csv, SweepGrid};
use crate::{io, regret_svg, sweep_svg};

#[derive(Debug, Parser)]
#[command(name = "algobelief", version, about = "Seeded bandit experiments: runs, sweeps and regret-bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate every seed and write traces and summaries.
    Run(Overrides),
    /// Run the experiment over a grid of eta, gamma or prior values.
    Sweep(Overrides),
    /// Run, then compare realized regret with a regret bound.
    Check {
        /// air-generic, mab-closed-form, mair-minimax or mair-closed-form.
        #[arg(long)]
        bound: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write a synthetic adversarial script as CSV.
    GenScript {
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long, default_value_t = 2000)]
        horizon: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List agents, environment presets and bounds.
    List,
}

/// Flags shared by the simulating subcommands; each overrides the matching
/// key of the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub agent: Option<String>,
    /// Preset name, scripted .csv, or .json environment block.
    #[arg(long)]
    pub env: Option<String>,
    /// A number, "horizon" or "anytime".
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// N, a..b, or a comma-separated list.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// single-best, per-round-best or per-batch-best.
    #[arg(long)]
    pub benchmark: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot file.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// e.g. eta=geom:0.01:1:9 or prior=lin:0.5:5:10.
    #[arg(long = "sweep-grid")]
    pub sweep_grid: Option<String>,
    /// Record per-round AIR diagnostics.
    #[arg(long)]
    pub diagnostics: bool,
}

impl Overrides {
    /// The config file (if any) with the flags applied, and the directory
    /// relative paths inside it refer to.
    pub fn build(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let (base_cfg, base) = match &self.config {
            Some(path) => {
                let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (Some(ExperimentConfig::load(path)?), dir)
            }
            None => (None, PathBuf::from(".")),
        };
        let mut cfg = match base_cfg {
            Some(c) => c,
            None => {
                let agent = self.agent.as_deref().ok_or_else(|| config_err("--agent is required without --config"))?;
                let env = self.env.as_deref().ok_or_else(|| config_err("--env is required without --config"))?;
                ExperimentConfig::new(EnvConfig::from_arg(env)?, AgentConfig::named(agent))
            }
        };
        if let Some(a) = &self.agent {
            cfg.agent.name = a.clone();
        }
        if let (Some(e), true) = (&self.env, self.config.is_some()) {
            cfg.env = EnvConfig::from_arg(e)?;
        }
        if let Some(e) = &self.eta {
            cfg.agent.eta = EtaConfig::parse(e)?;
        }
        if let Some(g) = self.gamma {
            cfg.agent.gamma = g;
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = SeedsConfig::parse(s)?;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = Some(h);
        }
        if let Some(b) = &self.benchmark {
            cfg.benchmark = Some(Benchmark::parse(b).map_err(|e| config_err(e.to_string()))?);
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(s) = &self.svg {
            cfg.svg = Some(s.clone());
        }
        if let Some(g) = &self.sweep_grid {
            cfg.sweep = Some(g.clone());
        }
        if self.diagnostics {
            cfg.agent.diagnostics = true;
        }
        Ok((cfg, base))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

fn label(exp: &Experiment) -> String {
    format!("{} / {}", exp.agent.kind.name(), exp.env.kind())
}

fn cmd_run(o: &Overrides) -> Result<i32> {
    let (cfg, base) = o.build()?;
    let exp = Experiment::resolve(cfg, &base)?;
    let out = run_experiment(&exp)?;
    let (m, se) = out.final_stats();
    println!(
        "{}: {} seeds, T = {}, {} regret {m:.4} +- {se:.4}",
        label(&exp),
        exp.seeds.len(),
        exp.horizon,
        exp.benchmark.name()
    );
    if let Some(dir) = &exp.config.out {
        write_outputs(&exp, &out, dir)?;
    }
    if let Some(path) = &exp.config.svg {
        write(path, &regret_svg(&label(&exp), exp.agent.kind.name(), &out.summary))?;
    }
    Ok(0)
}

fn cmd_sweep(o: &Overrides) -> Result<i32> {
    let (cfg, base) = o.build()?;
    let grid = cfg
        .sweep
        .as_deref()
        .ok_or_else(|| config_err("sweep needs --sweep-grid or a \"sweep\" key"))
        .and_then(SweepGrid::parse)?;
    let result = sweep(&cfg, &base, &grid)?;
    let table = sweep_csv(&result);
    print!("{table}");
    let best = result.best();
    println!("best {} = {} (mean final regret {:.4})", grid.param.name(), best.value, best.mean_final);
    if let Some(dir) = &cfg.out {
        write(&dir.join("sweep.csv"), &table)?;
        write(&dir.join("envelope.csv"), &envelope_csv(&result))?;
    }
    if let Some(path) = &cfg.svg {
        write(path, &sweep_svg(&format!("{} sweep: {}", grid.param.name(), cfg.agent.name), &result))?;
    }
    Ok(0)
}

fn cmd_check(bound: &str, o: &Overrides) -> Result<i32> {
    let bound = Bound::parse(bound)?;
    let (cfg, base) = o.build()?;
    let exp = Experiment::resolve(cfg, &base)?;
    let out = run_experiment(&exp)?;
    let report = theorem_bound_check(&exp, &out, bound)?;
    println!("{report}");
    if let Some(dir) = &exp.config.out {
        write_outputs(&exp, &out, dir)?;
    }
    Ok(if report.pass { 0 } else { 3 })
}

fn cmd_gen_script(k: usize, horizon: usize, seed: u64, out: &Path) -> Result<i32> {
    let table = synthetic_adversarial_script(k, horizon, seed).map_err(|e| config_err(e.to_string()))?;
    io::write_scripted_csv(out, &table)?;
    println!("wrote {} rounds x {k} arms to {}", horizon, out.display());
    Ok(0)
}

fn cmd_list() -> Result<i32> {
    println!("agents: {}", AGENT_NAMES.join(", "));
    println!("environments: {}", presets::listing());
    println!("bounds: {}", crate::bounds::BOUND_NAMES.join(", "));
    Ok(0)
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Run(o) => cmd_run(o),
        Command::Sweep(o) => cmd_sweep(o),
        Command::Check { bound, overrides } => cmd_check(bound, overrides),
        Command::GenScript { k, horizon, seed, out } => cmd_gen_script(*k, *horizon, *seed, out),
        Command::List => cmd_list(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
