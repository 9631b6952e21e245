//! Dependence on `t`: derivative identities for `h_n` and `p(n, t)`, the
//! coupled first-order system for `(R_n, r_n)`, its Painlevé V reduction,
//! and the second-order ODEs for `β_n` and `H_n`, all checked against
//! finite differences of pipeline values.

mod checks;
mod grid;
mod riccati;

pub use checks::{
    btde_residual, btde_terms, dln_h_check, dp_check, hn_ode_residual, hn_ode_terms,
    log_hankel_derivative_check, pv_residual,
};
pub use grid::{central_jet, default_step, FdCheck, FdGrid, FdPoint, GridFunction, Jet, Sampler};
pub use riccati::{
    integrate_from, pipeline_state, riccati_integrate, riccati_rhs, RiccatiOptions, RiccatiSolution,
    RiccatiState,
};
