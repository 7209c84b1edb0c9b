//! Exact identities linking AIR, its gradient and the one-step log-loss of
//! the posterior, as checkable residuals.

use super::belief::JointBelief;
use super::eval::Air;
use super::posterior::marginal_posterior;
use crate::error::arg_err;
use crate::num::ln;
use crate::prob::{Family, Model, Observation, Policy};
use crate::Result;

/// `E_{pi~p, o~M(pi)}[f_M(pibar) - f_M(pi) - log(post(pibar) / q(pibar)) / eta]`
/// where `post` is the marginal posterior of `belief` (Bernoulli only).
pub fn posterior_log_loss(
    belief: &JointBelief,
    p: &Policy,
    q: &Policy,
    eta: f64,
    env_means: &[f64],
    pibar: usize,
) -> Result<f64> {
    if belief.family() != Family::Bernoulli {
        return Err(arg_err!("posterior log-loss is implemented for Bernoulli beliefs"));
    }
    let k = belief.k();
    if env_means.len() != k || pibar >= k {
        return Err(arg_err!("environment model or pibar does not match K = {k}"));
    }
    let mut acc = 0.0;
    for pi in 0..k {
        let w = p.get(pi);
        if w == 0.0 {
            continue;
        }
        for bit in [false, true] {
            let po = if bit { env_means[pi] } else { 1.0 - env_means[pi] };
            if po == 0.0 {
                continue;
            }
            let post = marginal_posterior(belief, pi, Observation::bit(bit))?;
            let term = env_means[pibar] - env_means[pi] - ln(post.get(pibar) / q.get(pibar)) / eta;
            acc += w * po * term;
        }
    }
    Ok(acc)
}

/// `AIR(nu) + <grad AIR(nu), delta(M, pibar) - nu>` in `(alpha, beta)`
/// coordinates; the point mass maps to `alpha = e_pibar`, `beta[pibar] = f_M`.
pub fn linearized_air(
    belief: &JointBelief,
    p: &Policy,
    q: &Policy,
    eta: f64,
    env_means: &[f64],
    pibar: usize,
) -> Result<f64> {
    let air = Air::new(p, q, eta, belief.family())?;
    let k = belief.k();
    let mut ga = alloc::vec![0.0; k];
    let mut gb = alloc::vec![0.0; k * k];
    air.gradient_raw(belief.alpha(), belief.beta(), &mut ga, &mut gb);
    // only coordinates that actually move contribute; this keeps point
    // masses (infinite derivatives on empty rows) well defined
    let mut lin = 0.0;
    for i in 0..k {
        let da = if i == pibar { 1.0 } else { 0.0 } - belief.alpha()[i];
        if da != 0.0 {
            lin += ga[i] * da;
        }
        for j in 0..k {
            let target = if i == pibar { env_means[j] } else { 0.0 };
            let db = target - belief.beta_at(i, j);
            if db != 0.0 {
                lin += gb[i * k + j] * db;
            }
        }
    }
    Ok(air.value(belief)? + lin)
}

/// `|LHS - RHS|` of the identity between the posterior log-loss and the
/// linearized AIR, for the environment pair `(env_model, env_pistar)`.
pub fn log_loss_identity_residual(
    belief: &JointBelief,
    p: &Policy,
    q: &Policy,
    eta: f64,
    env_model: &Model,
    env_pistar: usize,
) -> Result<f64> {
    let lhs = posterior_log_loss(belief, p, q, eta, env_model.means(), env_pistar)?;
    let rhs = linearized_air(belief, p, q, eta, env_model.means(), env_pistar)?;
    Ok((lhs - rhs).abs())
}

/// `sup over (M, pibar)` of the posterior log-loss, over Bernoulli models.
///
/// The log-loss is linear in the means of `M`, so the supremum over
/// `[0, 1]^K` is attained at a vertex; all `2^K K` vertices are enumerated.
pub fn sup_posterior_log_loss(belief: &JointBelief, p: &Policy, q: &Policy, eta: f64) -> Result<f64> {
    let k = belief.k();
    if k > 16 {
        return Err(arg_err!("vertex enumeration limited to K <= 16"));
    }
    let mut best = f64::NEG_INFINITY;
    let mut means = alloc::vec![0.0; k];
    for mask in 0u32..(1u32 << k) {
        for (j, m) in means.iter_mut().enumerate() {
            *m = if mask >> j & 1 == 1 { 1.0 } else { 0.0 };
        }
        for pibar in 0..k {
            best = best.max(posterior_log_loss(belief, p, q, eta, &means, pibar)?);
        }
    }
    Ok(best)
}
