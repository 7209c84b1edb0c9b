//! Sensitivity sweeps over the learning rate, the exploration rate or the
//! Thompson prior.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{EtaConfig, Experiment, ExperimentConfig};
use crate::error::{config_err, Result};
use crate::registry::AgentKind;
use crate::run::{run_experiment, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Eta,
    Gamma,
    /// Thompson prior `Beta(c, 1)`.
    Prior,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::Gamma => "gamma",
            SweepParam::Prior => "prior",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepGrid {
    /// `PARAM=v1,v2,...`, `PARAM=lin:a:b:n` or `PARAM=geom:a:b:n`, with
    /// `PARAM` one of `eta`, `gamma`, `prior`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |why: &str| config_err(format!("bad sweep grid {s:?}: {why}"));
        let (name, spec) = s.split_once('=').ok_or_else(|| bad("expected PARAM=VALUES"))?;
        let param = match name.trim() {
            "eta" => SweepParam::Eta,
            "gamma" => SweepParam::Gamma,
            "prior" => SweepParam::Prior,
            _ => return Err(bad("PARAM must be eta, gamma or prior")),
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let values = if let Some(rest) = spec.strip_prefix("lin:").or_else(|| spec.strip_prefix("geom:")) {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("ranges are lin:a:b:n or geom:a:b:n"));
            }
            let (a, b) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| bad("n must be a count"))?;
            if n == 0 {
                return Err(bad("empty grid"));
            }
            let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            if spec.starts_with("lin:") {
                (0..n).map(|i| a + (b - a) * frac(i)).collect()
            } else {
                if !(a > 0.0 && b > 0.0) {
                    return Err(bad("geometric ranges need positive ends"));
                }
                (0..n).map(|i| (a.ln() + (b.ln() - a.ln()) * frac(i)).exp()).collect()
            }
        } else {
            spec.split(',').map(num).collect::<Result<Vec<f64>>>()?
        };
        if values.is_empty() {
            return Err(bad("empty grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite"));
        }
        Ok(SweepGrid { param, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_final: f64,
    pub stderr_final: f64,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
    /// Per-round minimum of the points' mean cumulative regret.
    pub envelope_min: Vec<f64>,
    pub envelope_max: Vec<f64>,
}

impl SweepResult {
    /// Grid point with the smallest mean final regret.
    pub fn best(&self) -> &SweepPoint {
        self.points
            .iter()
            .min_by(|a, b| a.mean_final.total_cmp(&b.mean_final))
            .expect("grids are non-empty")
    }
}

/// `config` with the swept parameter set to `value`.
pub fn with_param(config: &ExperimentConfig, param: SweepParam, value: f64) -> Result<ExperimentConfig> {
    let mut c = config.clone();
    c.sweep = None;
    match param {
        SweepParam::Eta => c.agent.eta = EtaConfig::Fixed(value),
        SweepParam::Gamma => c.agent.gamma = value,
        SweepParam::Prior => {
            if AgentKind::parse(&c.agent.name)? != AgentKind::Thompson {
                return Err(config_err("a prior sweep needs agent thompson"));
            }
            c.agent.prior = Some((value, 1.0));
        }
    }
    Ok(c)
}

/// Run `config` at every grid point.
pub fn sweep(config: &ExperimentConfig, base: &Path, grid: &SweepGrid) -> Result<SweepResult> {
    // validate every point before simulating any
    let exps = grid
        .values
        .iter()
        .map(|&v| Experiment::resolve(with_param(config, grid.param, v)?, base))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(exps.len());
    for (exp, &value) in exps.iter().zip(&grid.values) {
        let out = run_experiment(exp)?;
        let (mean_final, stderr_final) = out.final_stats();
        points.push(SweepPoint {
            value,
            mean_final,
            stderr_final,
            summary: out.summary,
        });
    }
    let horizon = exps[0].horizon;
    let envelope = |pick: fn(f64, f64) -> f64, init: f64| -> Vec<f64> {
        (0..horizon)
            .map(|t| points.iter().map(|p| p.summary.mean[t]).fold(init, pick))
            .collect()
    };
    let envelope_min = envelope(f64::min, f64::INFINITY);
    let envelope_max = envelope(f64::max, f64::NEG_INFINITY);
    Ok(SweepResult {
        param: grid.param,
        points,
        envelope_min,
        envelope_max,
    })
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut s = String::from("param,value,mean_final_regret,stderr\n");
    for p in &result.points {
        let _ = writeln!(s, "{},{},{},{}", result.param.name(), p.value, p.mean_final, p.stderr_final);
    }
    s
}

pub fn envelope_csv(result: &SweepResult) -> String {
    let mut s = String::from("round,envelope_min,envelope_max\n");
    for (t, (lo, hi)) in result.envelope_min.iter().zip(&result.envelope_max).enumerate() {
        let _ = writeln!(s, "{t},{lo},{hi}");
    }
    s
}
