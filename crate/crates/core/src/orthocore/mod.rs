//! The ground-truth pipeline: moments → LDLᵀ of the moment matrix → `h_n`,
//! `β_n`, `p(n, t)`, `ln D_n`, plus monic polynomial evaluation and an
//! independent double-exponential quadrature.

mod export;
mod poly;
mod quadrature;
mod table;

pub use export::write_table_csv;
pub use poly::{eval_monic, eval_monic_all, eval_monic_derivs};
pub use quadrature::{
    integrate_interval, integrate_interval_vec, quad_inner_product, weight_at_node, ExtraFactor, Node,
    QuadratureRule,
};
pub use table::{build_ortho_table, build_ortho_table_with, FactorPath, OrthoTable, TableMeta};
