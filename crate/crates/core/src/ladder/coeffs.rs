use rug::Float;

use super::aux::AuxTable;
use crate::mp::float;
use crate::orthocore::OrthoTable;

/// `A_n(z) = 2t + R_n/(1-z²)` and `B_n(z) = z r_n/(1-z²)`, kept as their
/// constant part and pole coefficients.
#[derive(Debug, Clone)]
pub struct LadderCoeffs {
    pub a_const: Float,
    pub a_pole: Float,
    pub b_pole: Float,
}

impl LadderCoeffs {
    /// Coefficients written through `β_n`, `β_{n+1}` only.
    pub fn from_table(table: &OrthoTable, n: usize) -> Self {
        let prec = table.prec();
        let params = table.params();
        let two_t = float(prec, 2.0 * params.t());
        let beta_sum = Float::with_val(prec, table.beta(n) + table.beta(n + 1));
        let a_pole = Float::with_val(prec, 2 * n + 1) + float(prec, 2.0 * params.alpha())
            - beta_sum * &two_t;
        let b_pole = Float::with_val(prec, n) - Float::with_val(prec, &two_t * table.beta(n));
        Self {
            a_const: two_t,
            a_pole,
            b_pole,
        }
    }

    pub fn from_aux(aux: &AuxTable, n: usize) -> Self {
        let prec = aux.prec();
        Self {
            a_const: float(prec, 2.0 * aux.params().t()),
            a_pole: aux.big_r(n).clone(),
            b_pole: aux.small_r(n).clone(),
        }
    }

    fn inv_gap(z: &Float) -> Float {
        let gap = Float::with_val(z.prec(), 1) - Float::with_val(z.prec(), z.square_ref());
        gap.recip()
    }

    pub fn a(&self, z: &Float) -> Float {
        Float::with_val(z.prec(), &self.a_pole * Self::inv_gap(z)) + &self.a_const
    }

    pub fn a_prime(&self, z: &Float) -> Float {
        let g = Self::inv_gap(z);
        Float::with_val(z.prec(), &self.a_pole * z) * 2u32 * Float::with_val(z.prec(), g.square_ref())
    }

    pub fn b(&self, z: &Float) -> Float {
        Float::with_val(z.prec(), &self.b_pole * z) * Self::inv_gap(z)
    }

    pub fn b_prime(&self, z: &Float) -> Float {
        let g = Self::inv_gap(z);
        let z2 = Float::with_val(z.prec(), z.square_ref()) + 1u32;
        Float::with_val(z.prec(), &self.b_pole * &z2) * Float::with_val(z.prec(), g.square_ref())
    }
}

/// `v'(z) = 2tz + 2αz/(1-z²)` for `v = -ln w`.
pub fn potential_derivative(alpha: f64, t: f64, z: &Float) -> Float {
    let prec = z.prec();
    let gap = Float::with_val(prec, 1) - Float::with_val(prec, z.square_ref());
    let pole = Float::with_val(prec, z * 2u32) * alpha / gap;
    Float::with_val(prec, z * 2u32) * t + pole
}

/// Closed form of `Σ_{j<n} A_j(z)` in terms of `β_n`, `β_{n+1}`.
pub fn sum_a_closed(table: &OrthoTable, n: usize, z: &Float) -> Float {
    let prec = table.prec().max(z.prec());
    let params = table.params();
    let (alpha, t) = (float(prec, params.alpha()), float(prec, params.t()));
    let nf = Float::with_val(prec, n);
    let two_t = Float::with_val(prec, &t * 2u32);
    let beta = table.beta(n);
    let beta_next = table.beta(n + 1);
    let gap = Float::with_val(prec, 1) - Float::with_val(prec, z.square_ref());

    // n² - 2n(t - α) + 2tβ_n(2t + 1 - 2tβ_{n+1})
    let mut first = Float::with_val(prec, nf.square_ref());
    first -= Float::with_val(prec, &t - &alpha) * &nf * 2u32;
    let inner = Float::with_val(prec, &two_t + 1u32) - Float::with_val(prec, &two_t * beta_next);
    first += Float::with_val(prec, &two_t * beta) * inner;

    // 2t(n - 2tβ_n)(n + 2α - 2tβ_n) / (2n + 1 + 2α - 2t(β_n + β_{n+1}))
    let two_t_beta = Float::with_val(prec, &two_t * beta);
    let r = Float::with_val(prec, &nf - &two_t_beta);
    let s = Float::with_val(prec, &nf + Float::with_val(prec, &alpha * 2u32)) - &two_t_beta;
    let big_r = Float::with_val(prec, 2 * n + 1) + Float::with_val(prec, &alpha * 2u32)
        - Float::with_val(prec, beta + beta_next) * &two_t;
    let second = Float::with_val(prec, &two_t * &r) * s / big_r;

    Float::with_val(prec, &two_t * &nf) + (first + second) / gap
}
