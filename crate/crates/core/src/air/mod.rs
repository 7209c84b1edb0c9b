//! The algorithmic information ratio.
//!
//! For a decision law `p`, reference `q` and learning rate `eta`,
//!
//! ```text
//! AIR(p, nu) = E[f_M(pi*) - f_M(pi)] - (1/eta) E[KL(nu_{pi*|pi,o}, nu_{pi*})] - (1/eta) KL(nu_{pi*}, q)
//! ```
//!
//! Beliefs are stored in the `(alpha, beta)` coordinates in which AIR is
//! concave ([`JointBelief`]). Values, gradients and the linear-in-`p`
//! coefficients are exact; see [`Air`].

mod belief;
mod closed_form;
mod dec;
mod eval;
mod expfam;
mod identity;
mod ir;
mod maximize;
mod posterior;

pub use belief::JointBelief;
pub use closed_form::{closed_form_belief, posterior_mass, posterior_masses};
pub use dec::{dec_bruteforce, for_each_simplex_point, DecValue, DEC_MAX_K, DEC_MAX_MODELS};
pub use eval::{air_eval, air_grad, air_terms, fw_gap_full, Air, AirGradient, AirTerms};
pub use expfam::ExpFamilyView;
pub use identity::{log_loss_identity_residual, linearized_air, posterior_log_loss, sup_posterior_log_loss};
pub use ir::info_ratio;
pub use maximize::{
    air_maximize, AirMaximizer, BeliefDomain, MaxStatus, MaximizeOptions, MaximizeResult, WarmStart,
};
pub(crate) use maximize::{ascend, Objective};
pub use posterior::marginal_posterior;
