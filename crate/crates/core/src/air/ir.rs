use super::belief::JointBelief;
use super::eval::Air;
use crate::prob::Policy;
use crate::Result;

/// Information ratio `(expected regret)^2 / (expected information gain)`.
///
/// Returns `f64::INFINITY` when no information is gained but regret is
/// nonzero, and `0` when both vanish.
pub fn info_ratio(belief: &JointBelief, p: &Policy) -> Result<f64> {
    // q only enters the regularizer, which IR ignores
    let q = Policy::uniform(p.len());
    let t = Air::new(p, &q, 1.0, belief.family())?.terms(belief)?;
    let num = t.regret * t.regret;
    let den = t.info_gain.max(0.0);
    Ok(if den <= 1e-300 {
        if num <= 1e-300 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    })
}
