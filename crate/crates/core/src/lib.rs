//! Orthogonal polynomials, Hankel determinants and their verification for the
//! symmetric semi-classical Jacobi weight
//!
//! ```text
//! w(x, t) = (1 - x^2)^alpha exp(-t x^2),   x in [-1, 1],   alpha > -1.
//! ```
//!
//! The ground truth is [`orthocore::build_ortho_table`]: moments in closed
//! form, an extended-precision LDLᵀ factorization of the moment matrix, and
//! the recurrence data read off the factors. Everything else checks an
//! identity, difference equation, differential equation or large-`n`
//! expansion against that table.

pub mod asymptotics;
pub mod error;
pub mod evolution;
pub mod ladder;
pub mod mp;
pub mod orthocore;
pub mod precision;
pub mod recur;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
pub use precision::{Accepted, Agree, Mixed, PrecisionContext};
pub use specfun::WeightParams;
