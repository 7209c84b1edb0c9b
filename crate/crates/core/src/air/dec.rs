use alloc::vec;
use alloc::vec::Vec;

use crate::error::arg_err;
use crate::prob::{Model, ModelClass};
use crate::{Error, Result};

/// Largest decision count the brute-force DEC accepts.
pub const DEC_MAX_K: usize = 4;
/// Largest model count the brute-force DEC accepts.
pub const DEC_MAX_MODELS: usize = 8;

/// Result of [`dec_bruteforce`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecValue {
    /// `min over grid p of max over M`.
    pub value: f64,
    /// Minimizing grid point.
    pub p: Vec<f64>,
}

/// Visit every point of the simplex lattice `{c / n : sum c = n}` in `k`
/// dimensions.
pub fn for_each_simplex_point(k: usize, n: usize, mut f: impl FnMut(&[f64])) {
    let mut counts = vec![0usize; k];
    let mut p = vec![0.0; k];
    fn rec(
        idx: usize,
        left: usize,
        n: usize,
        counts: &mut [usize],
        p: &mut [f64],
        f: &mut dyn FnMut(&[f64]),
    ) {
        let k = counts.len();
        if idx == k - 1 {
            counts[idx] = left;
            for (x, &c) in p.iter_mut().zip(counts.iter()) {
                *x = c as f64 / n as f64;
            }
            f(p);
            return;
        }
        for c in 0..=left {
            counts[idx] = c;
            rec(idx + 1, left - c, n, counts, p, f);
        }
    }
    rec(0, n, n, &mut counts, &mut p, &mut f);
}

/// Brute-force decision-estimation coefficient `dec_eta(models, nominal)`
/// with `p` on a simplex lattice of spacing `step`.
///
/// This is a test oracle: `K <= 4` and at most 8 models. The grid minimum is
/// never below the true infimum.
pub fn dec_bruteforce(models: &ModelClass, nominal: &Model, eta: f64, step: f64) -> Result<DecValue> {
    let k = models.num_decisions();
    if k > DEC_MAX_K || models.len() > DEC_MAX_MODELS {
        return Err(Error::Capacity(alloc::format!(
            "dec_bruteforce supports K <= {DEC_MAX_K} and |M| <= {DEC_MAX_MODELS}, got K = {k}, |M| = {}",
            models.len()
        )));
    }
    if nominal.num_decisions() != k || nominal.family() != models.family() {
        return Err(arg_err!("nominal model does not match the class"));
    }
    if !(eta > 0.0 && step > 0.0 && step <= 1.0) {
        return Err(arg_err!("need eta > 0 and step in (0, 1]"));
    }
    let n = libm::round(1.0 / step) as usize;
    let fam = models.family();
    // per-model, per-decision loss: f_M(pi_M) - f_M(pi) - H^2(M(pi), nominal(pi)) / eta
    let table: Vec<Vec<f64>> = models
        .models()
        .iter()
        .enumerate()
        .map(|(m, model)| {
            let best = model.mean(models.optimal_decision(m));
            (0..k)
                .map(|j| best - model.mean(j) - fam.hellinger_sq(model.mean(j), nominal.mean(j)) / eta)
                .collect()
        })
        .collect();
    let mut out = DecValue {
        value: f64::INFINITY,
        p: vec![0.0; k],
    };
    for_each_simplex_point(k, n, |p| {
        let worst = table
            .iter()
            .map(|row| crate::num::dot(row, p))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < out.value {
            out.value = worst;
            out.p.copy_from_slice(p);
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_size() {
        let mut n = 0;
        for_each_simplex_point(3, 10, |p| {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            n += 1;
        });
        assert_eq!(n, 66);
    }

    #[test]
    fn singleton_is_zero_at_optimal_decision() {
        let c = ModelClass::bernoulli(&[&[0.3, 0.7, 0.5]]).unwrap();
        let d = dec_bruteforce(&c, &c.models()[0], 1.0, 0.02).unwrap();
        assert!(d.value.abs() < 1e-15);
        assert_eq!(d.p, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_resolutions_agree() {
        let c = ModelClass::bernoulli(&[&[0.8, 0.2], &[0.2, 0.8]]).unwrap();
        let nominal = c.mixture(&[0.5, 0.5]).unwrap();
        let coarse = dec_bruteforce(&c, &nominal, 1.0, 0.02).unwrap();
        let fine = dec_bruteforce(&c, &nominal, 1.0, 0.001).unwrap();
        // both losses are linear in p, so the lattice error is at most the
        // step times the loss spread
        assert!(fine.value <= coarse.value + 1e-15);
        assert!(coarse.value - fine.value <= 0.02 * 2.0);
        // symmetric instance: p = (1/2, 1/2) lies on both grids
        assert!((coarse.value - fine.value).abs() < 1e-12);
    }

    #[test]
    fn capacity_enforced() {
        let c = ModelClass::bernoulli(&[&[0.1, 0.2, 0.3, 0.4, 0.5]]).unwrap();
        assert!(matches!(
            dec_bruteforce(&c, &c.models()[0], 1.0, 0.1),
            Err(Error::Capacity(_))
        ));
    }
}
