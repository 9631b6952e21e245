//! Ladder-operator coefficients `A_n(z)`, `B_n(z)`, the auxiliary
//! quantities `R_n`, `r_n`, `H_n`, and residual checks of the identities
//! that tie them to `β_n` and `p(n, t)`.

mod aux;
mod coeffs;
mod identities;

pub use aux::{aux_by_integral, build_aux_by_integral, build_aux_table, AuxTable, Provenance};
pub use coeffs::{potential_derivative, sum_a_closed, LadderCoeffs};
pub use identities::{identity_residuals, pn_ode_residual, sum_a_consistency, IDENTITY_NAMES};
