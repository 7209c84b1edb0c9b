//! Environments as mean schedules plus observation noise.
//!
//! Rounds are 0-based. Every environment is oblivious: its mean vector at
//! round `t` is fixed in advance, and observations are drawn from the
//! `(seed, t, Env)` stream, so a run is reproducible from `(spec, seed)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::arg_err;
use crate::num::sin;
use crate::prob::{argmax, Family, Observation};
use crate::rng::{stream, Purpose};
use crate::Result;

/// One stationary stretch of a change-point environment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Batch {
    /// Means during the batch.
    pub means: Vec<f64>,
    /// Number of rounds.
    pub rounds: usize,
}

#[cfg(feature = "serde")]
fn bernoulli_family() -> Family {
    Family::Bernoulli
}

/// Environment description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum EnvSpec {
    /// Constant means.
    Stochastic {
        /// Mean of every decision.
        means: Vec<f64>,
        /// Observation noise.
        #[cfg_attr(feature = "serde", serde(default = "bernoulli_family"))]
        family: Family,
    },
    /// Explicit `T x K` table of Bernoulli means.
    Scripted {
        /// Row `t` holds the means of round `t`.
        table: Vec<Vec<f64>>,
    },
    /// Concatenated stationary batches.
    Changepoint {
        /// Batches in order.
        batches: Vec<Batch>,
    },
    /// `clip(offset + amp sin(2 pi t / period + phase), 0, 1)` per decision.
    Sine {
        /// Per-decision offsets.
        offset: Vec<f64>,
        /// Per-decision amplitudes.
        amp: Vec<f64>,
        /// Per-decision periods (rounds).
        period: Vec<f64>,
        /// Per-decision phases (radians).
        phase: Vec<f64>,
    },
    /// Linear rewards `theta^T a` with unit Gaussian noise.
    GaussianLinear {
        /// One action per entry.
        actions: Vec<Vec<f64>>,
        /// Reward parameter.
        theta: Vec<f64>,
    },
    /// Generated adversarial script (see [`synthetic_adversarial_script`]).
    SyntheticAdversarial {
        /// Decisions.
        k: usize,
        /// Rounds.
        horizon: usize,
        /// Generator seed.
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Schedule {
    Constant(Vec<f64>),
    Table(Vec<Vec<f64>>),
    Batches { starts: Vec<usize>, batches: Vec<Batch> },
    Sine { offset: Vec<f64>, amp: Vec<f64>, period: Vec<f64>, phase: Vec<f64> },
}

/// A built environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    schedule: Schedule,
    family: Family,
    k: usize,
    horizon: Option<usize>,
    kind: &'static str,
}

fn check_means(family: Family, means: &[f64], what: &dyn core::fmt::Display) -> Result<()> {
    let (lo, hi) = match family {
        Family::Bernoulli => (0.0, 1.0),
        Family::GaussianUnitVariance => (f64::NEG_INFINITY, f64::INFINITY),
    };
    for (i, &m) in means.iter().enumerate() {
        if !(m.is_finite() && m >= lo && m <= hi) {
            return Err(arg_err!("{what}: mean {m} of arm{} out of range", i + 1));
        }
    }
    Ok(())
}

/// Build an environment from its description.
pub fn build_env(spec: &EnvSpec) -> Result<Environment> {
    match spec {
        EnvSpec::Stochastic { means, family } => {
            if means.is_empty() {
                return Err(arg_err!("stochastic environment needs at least one arm"));
            }
            check_means(*family, means, &"stochastic environment")?;
            Ok(Environment {
                k: means.len(),
                schedule: Schedule::Constant(means.clone()),
                family: *family,
                horizon: None,
                kind: "stochastic",
            })
        }
        EnvSpec::Scripted { table } => scripted(table.clone()),
        EnvSpec::SyntheticAdversarial { k, horizon, seed } => {
            scripted(synthetic_adversarial_script(*k, *horizon, *seed)?)
        }
        EnvSpec::Changepoint { batches } => {
            let k = batches.first().map(|b| b.means.len()).unwrap_or(0);
            if k == 0 {
                return Err(arg_err!("changepoint environment needs non-empty batches"));
            }
            let mut starts = Vec::with_capacity(batches.len());
            let mut t = 0;
            for (i, b) in batches.iter().enumerate() {
                if b.means.len() != k || b.rounds == 0 {
                    return Err(arg_err!("batch {i} must have {k} means and at least one round"));
                }
                check_means(Family::Bernoulli, &b.means, &alloc::format!("batch {i}"))?;
                starts.push(t);
                t += b.rounds;
            }
            Ok(Environment {
                k,
                schedule: Schedule::Batches {
                    starts,
                    batches: batches.clone(),
                },
                family: Family::Bernoulli,
                horizon: Some(t),
                kind: "changepoint",
            })
        }
        EnvSpec::Sine {
            offset,
            amp,
            period,
            phase,
        } => {
            let k = offset.len();
            if k == 0 || amp.len() != k || period.len() != k || phase.len() != k {
                return Err(arg_err!("sine parameters must be non-empty and of equal length"));
            }
            let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
            if !(finite(offset) && finite(amp) && finite(phase) && period.iter().all(|&p| p.is_finite() && p > 0.0)) {
                return Err(arg_err!("sine parameters must be finite with positive periods"));
            }
            Ok(Environment {
                k,
                schedule: Schedule::Sine {
                    offset: offset.clone(),
                    amp: amp.clone(),
                    period: period.clone(),
                    phase: phase.clone(),
                },
                family: Family::Bernoulli,
                horizon: None,
                kind: "sine",
            })
        }
        EnvSpec::GaussianLinear { actions, theta } => {
            let set = crate::linear::LinearActionSet::new(actions.clone())?;
            let means = set.means(theta)?;
            Ok(Environment {
                k: means.len(),
                schedule: Schedule::Constant(means),
                family: Family::GaussianUnitVariance,
                horizon: None,
                kind: "gaussian_linear",
            })
        }
    }
}

fn scripted(table: Vec<Vec<f64>>) -> Result<Environment> {
    let k = table.first().map(|r| r.len()).unwrap_or(0);
    if k == 0 {
        return Err(arg_err!("scripted environment needs at least one row and one arm"));
    }
    for (t, row) in table.iter().enumerate() {
        if row.len() != k {
            return Err(arg_err!("row {t} has {} columns, expected {k}", row.len()));
        }
        check_means(Family::Bernoulli, row, &alloc::format!("row {t}"))?;
    }
    Ok(Environment {
        k,
        horizon: Some(table.len()),
        schedule: Schedule::Table(table),
        family: Family::Bernoulli,
        kind: "scripted",
    })
}

impl Environment {
    /// Number of decisions.
    pub fn num_decisions(&self) -> usize {
        self.k
    }

    /// Observation family.
    pub fn family(&self) -> Family {
        self.family
    }

    /// Built-in horizon, if the environment has one.
    pub fn horizon(&self) -> Option<usize> {
        self.horizon
    }

    /// `stochastic`, `scripted`, `changepoint`, `sine` or `gaussian_linear`.
    pub fn kind(&self) -> &'static str {
        self.kind
    }

    /// Mean of decision `pi` at round `t`.
    pub fn mean(&self, t: usize, pi: usize) -> f64 {
        match &self.schedule {
            Schedule::Constant(m) => m[pi],
            Schedule::Table(rows) => rows[t.min(rows.len() - 1)][pi],
            Schedule::Batches { starts, batches } => {
                let b = starts.partition_point(|&s| s <= t).saturating_sub(1);
                batches[b].means[pi]
            }
            Schedule::Sine {
                offset,
                amp,
                period,
                phase,
            } => {
                let x = 2.0 * core::f64::consts::PI * t as f64 / period[pi] + phase[pi];
                (offset[pi] + amp[pi] * sin(x)).clamp(0.0, 1.0)
            }
        }
    }

    /// All means at round `t`.
    pub fn means_at(&self, t: usize) -> Vec<f64> {
        (0..self.k).map(|pi| self.mean(t, pi)).collect()
    }

    /// Batch boundaries `(start, length)`; only change-point environments
    /// have them.
    pub fn batches(&self) -> Option<Vec<(usize, usize)>> {
        match &self.schedule {
            Schedule::Batches { starts, batches } => {
                Some(starts.iter().zip(batches).map(|(&s, b)| (s, b.rounds)).collect())
            }
            _ => None,
        }
    }

    /// Draw the observation of decision `pi` at round `t` with `rng`.
    pub fn sample_with<R: Rng + ?Sized>(&self, t: usize, pi: usize, rng: &mut R) -> Observation {
        let m = self.mean(t, pi);
        match self.family {
            Family::Bernoulli => Observation::bit(rng.random::<f64>() < m),
            Family::GaussianUnitVariance => {
                let z: f64 = StandardNormal.sample(rng);
                Observation::new(m + z)
            }
        }
    }

    /// Draw the observation of decision `pi` at round `t` from the run's
    /// environment stream.
    pub fn sample(&self, seed: u64, t: usize, pi: usize) -> Observation {
        let mut rng = stream(seed, t as u64, Purpose::Env);
        self.sample_with(t, pi, &mut rng)
    }
}

/// Comparator for regret.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Benchmark {
    /// Best fixed decision over the horizon.
    SingleBest,
    /// Best decision of every round.
    PerRoundBest,
    /// Best fixed decision within each batch (change-point environments).
    PerBatchBest,
}

impl Benchmark {
    /// Parse `single-best`, `per-round-best` or `per-batch-best`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "single-best" => Ok(Self::SingleBest),
            "per-round-best" => Ok(Self::PerRoundBest),
            "per-batch-best" => Ok(Self::PerBatchBest),
            other => Err(arg_err!("unknown benchmark {other:?}")),
        }
    }

    /// Canonical name.
    pub fn name(self) -> &'static str {
        match self {
            Self::SingleBest => "single-best",
            Self::PerRoundBest => "per-round-best",
            Self::PerBatchBest => "per-batch-best",
        }
    }
}

fn best_fixed(env: &Environment, from: usize, len: usize) -> usize {
    let mut sums = vec![0.0; env.k];
    for t in from..from + len {
        for (pi, s) in sums.iter_mut().enumerate() {
            *s += env.mean(t, pi);
        }
    }
    argmax(&sums)
}

/// The comparator's decision at every round of `0..horizon`.
pub fn benchmark_decisions(env: &Environment, mode: Benchmark, horizon: usize) -> Result<Vec<usize>> {
    if let Some(h) = env.horizon() {
        if horizon > h {
            return Err(arg_err!("horizon {horizon} exceeds the environment's {h} rounds"));
        }
    }
    match mode {
        Benchmark::SingleBest => Ok(vec![best_fixed(env, 0, horizon); horizon]),
        Benchmark::PerRoundBest => Ok((0..horizon).map(|t| argmax(&env.means_at(t))).collect()),
        Benchmark::PerBatchBest => {
            let batches = env
                .batches()
                .ok_or_else(|| arg_err!("per-batch-best needs a changepoint environment"))?;
            let mut out = Vec::with_capacity(horizon);
            for (start, len) in batches {
                if start >= horizon {
                    break;
                }
                let len = len.min(horizon - start);
                let best = best_fixed(env, start, len);
                out.extend(core::iter::repeat(best).take(len));
            }
            Ok(out)
        }
    }
}

/// The comparator's mean reward at every round of `0..horizon`.
pub fn benchmark_means(env: &Environment, mode: Benchmark, horizon: usize) -> Result<Vec<f64>> {
    Ok(benchmark_decisions(env, mode, horizon)?
        .into_iter()
        .enumerate()
        .map(|(t, a)| env.mean(t, a))
        .collect())
}

/// Synthetic stand-in for an image-derived adversarial script: each arm
/// follows a piecewise-linear trend through random knots, and at every knot
/// one randomly chosen arm is lifted so that the best arm keeps changing.
/// Values stay in `[0.05, 0.95]`.
pub fn synthetic_adversarial_script(k: usize, horizon: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if k == 0 || horizon == 0 {
        return Err(arg_err!("script needs k >= 1 and horizon >= 1"));
    }
    let mut rng = stream(seed, 0, Purpose::Script);
    let segments = 8.min(horizon);
    let seg_len = horizon.div_ceil(segments);
    // knots[s][a] for s in 0..=segments
    let mut knots: Vec<Vec<f64>> = Vec::with_capacity(segments + 1);
    for _ in 0..=segments {
        let mut row: Vec<f64> = (0..k).map(|_| 0.15 + 0.5 * rng.random::<f64>()).collect();
        let lift = rng.random_range(0..k);
        row[lift] = (row[lift] + 0.3).min(0.95);
        knots.push(row);
    }
    let mut table = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let s = (t / seg_len).min(segments - 1);
        let w = (t - s * seg_len) as f64 / seg_len as f64;
        let row = (0..k)
            .map(|a| ((1.0 - w) * knots[s][a] + w * knots[s + 1][a]).clamp(0.05, 0.95))
            .collect();
        table.push(row);
    }
    Ok(table)
}

/// Declared instances used by the experiments.
pub mod presets {
    use super::*;

    /// Names accepted by [`by_name`].
    pub const NAMES: [&str; 5] = ["stochastic16", "scripted16", "changepoint16", "sine4", "flip2"];

    /// 16 arms with means evenly spaced on `[0.3, 0.7]`.
    pub fn stochastic16() -> EnvSpec {
        EnvSpec::Stochastic {
            means: (0..16).map(|i| 0.3 + 0.4 * i as f64 / 15.0).collect(),
            family: Family::Bernoulli,
        }
    }

    /// Synthetic adversarial script with 16 arms and 2000 rounds.
    pub fn scripted16() -> EnvSpec {
        EnvSpec::SyntheticAdversarial {
            k: 16,
            horizon: 2000,
            seed: 2024,
        }
    }

    /// Four batches of 1000 rounds over 16 arms; in batch `b` arm `k` has
    /// mean `0.2 + 0.6 ((5k + 3b) mod 16) / 15`.
    pub fn changepoint16() -> EnvSpec {
        EnvSpec::Changepoint {
            batches: (0..4)
                .map(|b| Batch {
                    means: (0..16).map(|k| 0.2 + 0.6 * ((5 * k + 3 * b) % 16) as f64 / 15.0).collect(),
                    rounds: 1000,
                })
                .collect(),
        }
    }

    /// Four arms, offset 0.5, amplitude 0.5, period 2000, phases `k pi / 2`.
    pub fn sine4() -> EnvSpec {
        EnvSpec::Sine {
            offset: vec![0.5; 4],
            amp: vec![0.5; 4],
            period: vec![2000.0; 4],
            phase: (0..4).map(|k| k as f64 * core::f64::consts::FRAC_PI_2).collect(),
        }
    }

    /// Two arms whose means swap after 1000 rounds.
    pub fn flip2() -> EnvSpec {
        EnvSpec::Changepoint {
            batches: vec![
                Batch {
                    means: vec![0.9, 0.1],
                    rounds: 1000,
                },
                Batch {
                    means: vec![0.1, 0.9],
                    rounds: 1000,
                },
            ],
        }
    }

    /// Look up a preset.
    pub fn by_name(name: &str) -> Option<EnvSpec> {
        Some(match name {
            "stochastic16" => stochastic16(),
            "scripted16" => scripted16(),
            "changepoint16" => changepoint16(),
            "sine4" => sine4(),
            "flip2" => flip2(),
            _ => return None,
        })
    }

    /// Comma-separated preset names, for error messages.
    pub fn listing() -> String {
        NAMES.join(", ")
    }
}
