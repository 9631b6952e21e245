//! Large-`n` expansions of `β_n`, `p(n, t)` and `ln D_n(t)`, the closed
//! forms of `D_n(0)`, and empirical order fits against the table.

mod hankel;
mod series;
mod study;

pub use hankel::{
    dn0_barnes, dn0_exact, dn0_forms, dn0_product, dn_asymptotic, hankel_prefactor, hankel_series,
    log_ratio_by_integral, ratio_series,
};
pub use series::{beta_series, p_series, shift_consistency, shifted_difference, AsymSeries, Regime};
pub use study::{convergence_study, doubling_ladder, order_fit, ConvergenceStudy, OrderFit, Quantity, StudyRow};
