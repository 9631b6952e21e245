//! The second-order nonlinear difference equations for `β_n`, `p(n, t)` and
//! `H_n`: residuals against the table, and forward iteration of the `β_n`
//! recurrence from its two initial values.

mod iterate;
mod residuals;

pub use iterate::{btd_iterate, max_rel_gap, write_iterate_csv, BetaIteration};
pub use residuals::{btd_residual, btd_terms, hnd_residual, pnd_residual, rn_from_h};
