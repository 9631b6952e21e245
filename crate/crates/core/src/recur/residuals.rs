use rug::Float;

use crate::error::{Error, Result};
use crate::ladder::AuxTable;
use crate::mp::{float, neg, scaled_residual};
use crate::orthocore::OrthoTable;

fn check_interior(n: usize, n_max: usize) -> Result<()> {
    Error::check_index(n, 1, n_max.saturating_sub(1).max(1))
}

/// Signed terms of the `β_n` recurrence
/// `r² + 2αr - β_n(2n-1+2α-2tβ_{n-1}-2tβ_n)(2n+1+2α-2tβ_n-2tβ_{n+1})`,
/// `r = n - 2tβ_n`.
pub fn btd_terms(table: &OrthoTable, n: usize) -> Result<[Float; 3]> {
    check_interior(n, table.n_max())?;
    let prec = table.prec();
    let params = table.params();
    let two_t = float(prec, 2.0 * params.t());
    let two_alpha = float(prec, 2.0 * params.alpha());
    let (prev, cur, next) = (table.beta(n - 1), table.beta(n), table.beta(n + 1));
    let r = Float::with_val(prec, n) - Float::with_val(prec, &two_t * cur);
    let left = Float::with_val(prec, &two_alpha + (2 * n - 1) as u32)
        - Float::with_val(prec, prev + cur) * &two_t;
    let right = Float::with_val(prec, &two_alpha + (2 * n + 1) as u32)
        - Float::with_val(prec, cur + next) * &two_t;
    Ok([
        Float::with_val(prec, r.square_ref()),
        Float::with_val(prec, &two_alpha * &r),
        neg(left * right * cur),
    ])
}

/// Scaled residual of the `β_n` recurrence at `(β_{n-1}, β_n, β_{n+1})`.
pub fn btd_residual(table: &OrthoTable, n: usize) -> Result<Float> {
    Ok(scaled_residual(&btd_terms(table, n)?))
}

/// Scaled residual of the `p(n, t)` recurrence at `(p(n-1), p(n), p(n+1))`.
pub fn pnd_residual(table: &OrthoTable, n: usize) -> Result<Float> {
    check_interior(n, table.n_max())?;
    let prec = table.prec();
    let params = table.params();
    let two_t = float(prec, 2.0 * params.t());
    let two_alpha = float(prec, 2.0 * params.alpha());
    let (prev, cur, next) = (table.p(n - 1), table.p(n), table.p(n + 1));
    // u = n - 2t p(n) + 2t p(n+1)
    let u = Float::with_val(prec, n) + Float::with_val(prec, next - cur) * &two_t;
    let left = Float::with_val(prec, &two_alpha + (2 * n - 1) as u32)
        - Float::with_val(prec, prev - next) * &two_t;
    let step = Float::with_val(prec, cur - next);
    let step_prev = Float::with_val(prec, prev - cur) - 1u32;
    let right = Float::with_val(prec, cur * 2u32) + n as u32 + step * step_prev * &two_t;
    Ok(scaled_residual(&[
        Float::with_val(prec, u.square_ref()),
        Float::with_val(prec, &two_alpha * &u),
        neg(left * right),
    ]))
}

/// `X = 2t + H_n - H_{n-1}`, `Y = 2t + H_{n+1} - H_n`, and `2t(2nt + H_n)`.
fn h_factors(aux: &AuxTable, n: usize) -> (Float, Float, Float) {
    let prec = aux.prec();
    let t = float(prec, aux.params().t());
    let two_t = Float::with_val(prec, &t * 2u32);
    let x = Float::with_val(prec, aux.big_h(n) - aux.big_h(n - 1)) + &two_t;
    let y = Float::with_val(prec, aux.big_h(n + 1) - aux.big_h(n)) + &two_t;
    let inner = Float::with_val(prec, &two_t * n as u32) + aux.big_h(n);
    (x, y, inner * two_t)
}

/// Scaled residual of the `H_n` recurrence at `(H_{n-1}, H_n, H_{n+1})`.
pub fn hnd_residual(aux: &AuxTable, n: usize) -> Result<Float> {
    Error::check_index(n, 1, aux.n_max())?;
    let prec = aux.prec();
    let alpha = float(prec, aux.params().alpha());
    let t = float(prec, aux.params().t());
    let (h_prev, h, h_next) = (aux.big_h(n - 1), aux.big_h(n), aux.big_h(n + 1));
    let (x, y, c) = h_factors(aux, n);
    let xy = Float::with_val(prec, &x * &y);
    let xy2 = Float::with_val(prec, xy.square_ref());
    // XY(2t - n - 2α + H_{n+1} - H_{n-1}) + 2t(2nt + H_n)
    let spread = Float::with_val(prec, h_next - h_prev) + Float::with_val(prec, &t * 2u32)
        - Float::with_val(prec, &alpha * 2u32)
        - n as u32;
    let second = Float::with_val(prec, &xy * &spread) + &c;
    Ok(scaled_residual(&[
        Float::with_val(prec, &xy2 * h),
        Float::with_val(prec, &xy2 * h_prev) * n as u32,
        neg(Float::with_val(prec, &xy2 * h_next) * n as u32),
        Float::with_val(prec, &xy * &second) * n as u32,
        neg(Float::with_val(prec, &c * &second)),
    ]))
}

/// `r_n` from `H_{n-1}, H_n, H_{n+1}`: `(nXY - 2t(2nt + H_n)) / (XY)`.
pub fn rn_from_h(aux: &AuxTable, n: usize) -> Result<Float> {
    Error::check_index(n, 1, aux.n_max())?;
    if aux.params().t() == 0.0 {
        return Err(Error::domain("r_n from H_n needs t != 0"));
    }
    let (x, y, c) = h_factors(aux, n);
    let xy = Float::with_val(aux.prec(), &x * &y);
    if xy.is_zero() {
        return Err(Error::Singular(format!("2t + H_n - H_(n-1) vanishes at n = {n}")));
    }
    Ok((Float::with_val(aux.prec(), &xy * n as u32) - c) / xy)
}
