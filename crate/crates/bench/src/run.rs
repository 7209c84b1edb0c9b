//! Seeded simulation and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use algobelief::agents::{bernoulli_reduce, RoundDiagnostics};
use algobelief::envs::benchmark_means;
use algobelief::rng::{stream, Purpose};
use algobelief::Observation;
use rayon::prelude::*;

use crate::config::Experiment;
use crate::error::{BenchError, Result};
use crate::registry::build_agent;
use crate::regret::mean_stderr;

/// One seed's run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub seed: u64,
    pub decisions: Vec<usize>,
    /// Raw environment observations, before any reward reduction.
    pub observations: Vec<f64>,
    /// Comparator mean minus the played decision's mean.
    pub inst_regret: Vec<f64>,
    pub cum_regret: Vec<f64>,
    /// Empty unless the agent records diagnostics.
    pub diagnostics: Vec<RoundDiagnostics>,
}

impl RunTrace {
    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }
}

/// Per-round mean cumulative regret across seeds and its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    /// Sorted by seed.
    pub traces: Vec<RunTrace>,
    pub summary: Summary,
}

impl ExperimentOutput {
    pub fn final_regrets(&self) -> Vec<f64> {
        self.traces.iter().map(RunTrace::final_regret).collect()
    }

    /// Mean final regret and its standard error.
    pub fn final_stats(&self) -> (f64, f64) {
        mean_stderr(&self.final_regrets())
    }
}

/// Simulate one seed.
pub fn run_seed(exp: &Experiment, seed: u64) -> Result<RunTrace> {
    let horizon = exp.horizon;
    let mut agent = build_agent(&exp.agent, &exp.env, horizon)?;
    let comparator = benchmark_means(&exp.env, exp.benchmark, horizon)?;
    let mut trace = RunTrace {
        seed,
        decisions: Vec::with_capacity(horizon),
        observations: Vec::with_capacity(horizon),
        inst_regret: Vec::with_capacity(horizon),
        cum_regret: Vec::with_capacity(horizon),
        diagnostics: Vec::new(),
    };
    let sim = |round: usize| move |source| BenchError::Sim { seed, round, source };
    let mut cum = 0.0;
    for t in 0..horizon {
        let round = t as u64;
        let pi = agent.select(t, &mut stream(seed, round, Purpose::Agent));
        let obs = exp.env.sample(seed, t, pi);
        let fed = match exp.agent.reward_range {
            // Gaussian noise can leave the range; clamp before reducing
            Some((lo, hi)) => Observation::bit(
                bernoulli_reduce(obs.value.clamp(lo, hi), lo, hi, &mut stream(seed, round, Purpose::Reduce))
                    .map_err(sim(t))?,
            ),
            None => obs,
        };
        agent.update(t, pi, fed).map_err(sim(t))?;
        if let Some(d) = agent.diagnostics() {
            trace.diagnostics.push(*d);
        }
        let inst = comparator[t] - exp.env.mean(t, pi);
        cum += inst;
        trace.decisions.push(pi);
        trace.observations.push(obs.value);
        trace.inst_regret.push(inst);
        trace.cum_regret.push(cum);
    }
    Ok(trace)
}

pub fn summarize(traces: &[RunTrace], horizon: usize) -> Summary {
    let mut mean = Vec::with_capacity(horizon);
    let mut stderr = Vec::with_capacity(horizon);
    let mut col = Vec::with_capacity(traces.len());
    for t in 0..horizon {
        col.clear();
        col.extend(traces.iter().map(|tr| tr.cum_regret[t]));
        let (m, se) = mean_stderr(&col);
        mean.push(m);
        stderr.push(se);
    }
    Summary { mean, stderr }
}

/// Run every seed in parallel. Aggregation uses the traces sorted by seed,
/// so the result does not depend on scheduling.
pub fn run_experiment(exp: &Experiment) -> Result<ExperimentOutput> {
    let mut traces = exp
        .seeds
        .par_iter()
        .map(|&seed| run_seed(exp, seed))
        .collect::<Result<Vec<_>>>()?;
    traces.sort_by_key(|t| t.seed);
    let summary = summarize(&traces, exp.horizon);
    Ok(ExperimentOutput { traces, summary })
}

pub const TRACE_HEADER: &str = "round,seed,decision,observation,inst_regret,cum_regret";
pub const SUMMARY_HEADER: &str = "round,mean_cum_regret,stderr";
pub const DIAGNOSTICS_HEADER: &str = "round,seed,eta,air,fw_gap,duality_gap,converged,bound_term,bound_offset";

pub fn trace_csv(out: &ExperimentOutput) -> String {
    let mut s = String::new();
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for tr in &out.traces {
        for t in 0..tr.decisions.len() {
            let _ = writeln!(
                s,
                "{t},{},{},{},{},{}",
                tr.seed, tr.decisions[t], tr.observations[t], tr.inst_regret[t], tr.cum_regret[t]
            );
        }
    }
    s
}

pub fn summary_csv(summary: &Summary) -> String {
    let mut s = String::new();
    s.push_str(SUMMARY_HEADER);
    s.push('\n');
    for (t, (m, se)) in summary.mean.iter().zip(&summary.stderr).enumerate() {
        let _ = writeln!(s, "{t},{m},{se}");
    }
    s
}

/// `None` when no trace carries diagnostics.
pub fn diagnostics_csv(out: &ExperimentOutput) -> Option<String> {
    if out.traces.iter().all(|t| t.diagnostics.is_empty()) {
        return None;
    }
    let mut s = String::new();
    s.push_str(DIAGNOSTICS_HEADER);
    s.push('\n');
    for tr in &out.traces {
        for (t, d) in tr.diagnostics.iter().enumerate() {
            let gap = d.duality_gap.map(|g| g.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{t},{},{},{},{},{gap},{},{},{}",
                tr.seed, d.eta, d.air, d.fw_gap, d.converged as u8, d.bound_term, d.bound_offset
            );
        }
    }
    Some(s)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

/// Write `trace.csv`, `summary.csv`, `diagnostics.csv` (when recorded) and
/// the resolved `config.json` into `dir`.
pub fn write_outputs(exp: &Experiment, out: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    write_file(&dir.join("trace.csv"), &trace_csv(out))?;
    write_file(&dir.join("summary.csv"), &summary_csv(&out.summary))?;
    if let Some(d) = diagnostics_csv(out) {
        write_file(&dir.join("diagnostics.csv"), &d)?;
    }
    let mut json = serde_json::to_string_pretty(&exp.config)?;
    json.push('\n');
    write_file(&dir.join("config.json"), &json)
}
