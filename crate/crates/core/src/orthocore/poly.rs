use rug::{Assign, Float};

use super::table::OrthoTable;
use crate::error::{Error, Result};

fn check_degree(table: &OrthoTable, n: usize) -> Result<()> {
    Error::check_index(n, 0, table.last_index() + 1)
}

/// `P_0(x), …, P_n(x)` by the three-term recurrence.
pub fn eval_monic_all(table: &OrthoTable, n: usize, x: &Float) -> Result<Vec<Float>> {
    check_degree(table, n)?;
    let prec = table.prec().max(x.prec());
    let mut out = Vec::with_capacity(n + 1);
    out.push(Float::with_val(prec, 1));
    if n >= 1 {
        out.push(Float::with_val(prec, x));
    }
    let mut tmp = Float::new(prec);
    for k in 1..n {
        let mut next = Float::with_val(prec, x * &out[k]);
        tmp.assign(table.beta(k) * &out[k - 1]);
        next -= &tmp;
        out.push(next);
    }
    Ok(out)
}

/// `P_n(x)`.
pub fn eval_monic(table: &OrthoTable, n: usize, x: &Float) -> Result<Float> {
    Ok(eval_monic_all(table, n, x)?.pop().expect("nonempty"))
}

/// `(P_n, P_n', P_n'')` at `x`.
pub fn eval_monic_derivs(table: &OrthoTable, n: usize, x: &Float) -> Result<[Float; 3]> {
    check_degree(table, n)?;
    let prec = table.prec().max(x.prec());
    let zero = || Float::with_val(prec, 0);
    let mut prev = [zero(), zero(), zero()];
    let mut cur = [Float::with_val(prec, 1), zero(), zero()];
    let mut tmp = Float::new(prec);
    for k in 0..n {
        let beta = table.beta(k);
        let mut next = [zero(), zero(), zero()];
        for d in 0..3 {
            next[d].assign(x * &cur[d]);
            tmp.assign(beta * &prev[d]);
            next[d] -= &tmp;
        }
        next[1] += &cur[0];
        tmp.assign(&cur[1] * 2u32);
        next[2] += &tmp;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthocore::build_ortho_table;
    use crate::{PrecisionContext, WeightParams};

    fn legendre() -> OrthoTable {
        let params = WeightParams::new(0.0, 0.0).unwrap();
        build_ortho_table(params, 6, &PrecisionContext::for_table(6, 30)).unwrap()
    }

    #[test]
    fn legendre_quadratic() {
        let table = legendre();
        let x = Float::with_val(256, 0.75);
        let p2 = eval_monic(&table, 2, &x).unwrap();
        let expected = Float::with_val(256, 0.5625) - Float::with_val(256, 1) / 3u32;
        assert!((p2 - expected).abs().to_f64() < 1e-60);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let table = legendre();
        let prec = 256;
        let x = Float::with_val(prec, 0.3);
        let h = Float::with_val(prec, 1e-20);
        let [v, d1, d2] = eval_monic_derivs(&table, 5, &x).unwrap();
        let plus = eval_monic(&table, 5, &Float::with_val(prec, &x + &h)).unwrap();
        let minus = eval_monic(&table, 5, &Float::with_val(prec, &x - &h)).unwrap();
        let fd1 = Float::with_val(prec, &plus - &minus) / Float::with_val(prec, &h * 2u32);
        let fd2 = (Float::with_val(prec, &plus + &minus) - Float::with_val(prec, &v * 2u32))
            / Float::with_val(prec, h.square_ref());
        assert!((fd1 - d1).abs().to_f64() < 1e-30);
        assert!((fd2 - d2).abs().to_f64() < 1e-30);
        assert!((v - eval_monic(&table, 5, &x).unwrap()).is_zero());
    }

    #[test]
    fn degree_out_of_range() {
        let table = legendre();
        assert!(eval_monic(&table, 100, &Float::with_val(64, 0.1)).is_err());
    }
}
