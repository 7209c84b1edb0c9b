//! Regret ledgers and summary statistics.

use algobelief::envs::{Benchmark, Environment};

use crate::error::{config_err, Result};

/// Sample mean and standard error (`sd / sqrt(n)`, with the `n - 1`
/// variance; zero for a single value).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

// best total mean over rounds from..to, by direct summation
fn best_sum(env: &Environment, from: usize, to: usize) -> f64 {
    (0..env.num_decisions())
        .map(|a| (from..to).map(|t| env.mean(t, a)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Regret of a decision sequence against `mode`, recomputed from the mean
/// schedule alone: comparator total minus the expected reward of the
/// decisions played. Realized noise plays no part.
pub fn dynamic_regret(decisions: &[usize], env: &Environment, mode: Benchmark) -> Result<f64> {
    let horizon = decisions.len();
    if let Some(h) = env.horizon() {
        if horizon > h {
            return Err(config_err(format!("trace has {horizon} rounds, environment {h}")));
        }
    }
    let k = env.num_decisions();
    if let Some(&bad) = decisions.iter().find(|&&d| d >= k) {
        return Err(config_err(format!("decision {bad} out of range for K = {k}")));
    }
    let earned: f64 = decisions.iter().enumerate().map(|(t, &d)| env.mean(t, d)).sum();
    let comparator = match mode {
        Benchmark::SingleBest => best_sum(env, 0, horizon),
        Benchmark::PerRoundBest => (0..horizon)
            .map(|t| env.means_at(t).into_iter().fold(f64::NEG_INFINITY, f64::max))
            .sum(),
        Benchmark::PerBatchBest => {
            let batches = env
                .batches()
                .ok_or_else(|| config_err("per-batch-best needs a changepoint environment"))?;
            batches
                .into_iter()
                .filter(|&(start, _)| start < horizon)
                .map(|(start, len)| best_sum(env, start, (start + len).min(horizon)))
                .sum()
        }
    };
    if horizon == 0 {
        return Ok(0.0);
    }
    Ok(comparator - earned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use algobelief::envs::{build_env, presets, EnvSpec};
    use algobelief::Family;

    #[test]
    fn stderr_of_known_sample() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample variance 5/3
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn constant_env_benchmarks_agree() {
        let env = build_env(&EnvSpec::Stochastic {
            means: vec![0.2, 0.5, 0.4],
            family: Family::Bernoulli,
        })
        .unwrap();
        let d = [0, 1, 2, 2, 0];
        let a = dynamic_regret(&d, &env, Benchmark::SingleBest).unwrap();
        let b = dynamic_regret(&d, &env, Benchmark::PerRoundBest).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - (0.3 + 0.0 + 0.1 + 0.1 + 0.3)).abs() < 1e-12);
    }

    #[test]
    fn locked_arm_on_flip() {
        let env = build_env(&presets::flip2()).unwrap();
        let d = vec![0; 2000];
        // first batch free, second batch costs the 0.8 gap every round
        let r = dynamic_regret(&d, &env, Benchmark::PerBatchBest).unwrap();
        assert!((r - 0.8 * 1000.0).abs() < 1e-9);
        // both arms earn 1000 over the horizon, so the locked arm is a best one
        assert!(dynamic_regret(&d, &env, Benchmark::SingleBest).unwrap().abs() < 1e-9);
        assert!((dynamic_regret(&d, &env, Benchmark::PerRoundBest).unwrap() - 800.0).abs() < 1e-9);
    }
}
