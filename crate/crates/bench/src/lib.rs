//! Experiment harness for the `algobelief` agents.
//!
//! A JSON [`ExperimentConfig`] names an environment, an agent, a horizon and
//! a list of seeds. [`run_experiment`] simulates every seed (in parallel,
//! aggregated in seed order), and the results can be written as CSV traces,
//! summarized, swept over a hyperparameter grid, checked against regret
//! bounds and plotted as SVG. Output is byte-identical across reruns.

pub mod bounds;
pub mod cli;
pub mod config;
mod error;
pub mod io;
pub mod registry;
pub mod regret;
pub mod run;
pub mod svg;
pub mod sweep;

pub use bounds::{theorem_bound_check, Bound, BoundReport};
pub use config::{AgentConfig, EnvConfig, EtaConfig, Experiment, ExperimentConfig, SeedsConfig};
pub use error::{BenchError, Result};
pub use regret::{dynamic_regret, mean_stderr};
pub use run::{run_experiment, run_seed, write_outputs, ExperimentOutput, RunTrace, Summary};
pub use sweep::{sweep, SweepGrid, SweepParam, SweepResult};

/// Mean cumulative regret with a one-standard-error band.
pub fn regret_svg(title: &str, label: &str, summary: &Summary) -> String {
    let lower = summary.mean.iter().zip(&summary.stderr).map(|(m, s)| m - s).collect();
    let upper = summary.mean.iter().zip(&summary.stderr).map(|(m, s)| m + s).collect();
    svg::line_plot(
        title,
        "cumulative regret",
        &[svg::Series {
            label: label.into(),
            y: summary.mean.clone(),
            band: Some((lower, upper)),
        }],
    )
}

/// The sweep's envelope as a band, with its lower edge drawn as a line.
pub fn sweep_svg(title: &str, result: &SweepResult) -> String {
    svg::line_plot(
        title,
        "mean cumulative regret",
        &[svg::Series {
            label: format!("{} sweep", result.param.name()),
            y: result.envelope_min.clone(),
            band: Some((result.envelope_min.clone(), result.envelope_max.clone())),
        }],
    )
}
