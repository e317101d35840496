//! Hardy-state analysis toolkit.
//!
//! - [`qcore`]: kets, tensor products and inner products in 2 and 4 dimensions.
//! - [`hardy`]: the Hardy state for a measurement family, its joint
//!   probabilities, constraint report, implication table and the
//!   maximization of `p(11−+)`.
//! - [`lhv`]: enumeration of local deterministic strategies and a
//!   re-checkable no-go certificate.
//! - [`counterfactuals`]: grounded counterfactual evaluation, proposition
//!   derivability, context-mixing detection and frame narration.
//! - [`sim`]: seeded Monte Carlo sampling with z-score comparison.
//! - [`cli`]: the `hardy` command-line front end.

pub mod cli;
pub mod counterfactuals;
pub mod hardy;
pub mod lhv;
pub mod qcore;
pub mod sim;
