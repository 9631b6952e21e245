//! `ln Γ` and `ln G` by shifted asymptotic series.
//!
//! Both functions move the argument up to a point where the Stirling-type
//! series reaches the working precision within a bounded number of terms,
//! then undo the shift with the exact recursions `Γ(z+1) = zΓ(z)` and
//! `G(z+1) = Γ(z)G(z)`.

use rug::float::Constant;
use rug::Float;

use super::bernoulli::bernoulli_even;
use crate::error::{Error, Result};

/// Glaisher–Kinkelin constant to 64 significant digits (OEIS A074962).
pub const GLAISHER_A: &str = "1.282427129100622636875342568869791727767688927325001192063740022";

/// `ln A` at the requested precision; only 64 digits of `A` are stored.
pub fn glaisher_ln(prec: u32) -> Float {
    let a = Float::parse(GLAISHER_A).expect("valid literal");
    Float::with_val(prec, a).ln()
}

struct Plan {
    terms: usize,
    anchor: f64,
}

fn ln_factorial(n: f64) -> f64 {
    if n < 1.0 {
        return 0.0;
    }
    n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n)
}

/// `ln |B_{2m}|` from `|B_{2m}| ≈ 2 (2m)! / (2π)^{2m}`.
fn ln_abs_bernoulli(m: usize) -> f64 {
    let m2 = 2.0 * m as f64;
    std::f64::consts::LN_2 + ln_factorial(m2) - m2 * (2.0 * std::f64::consts::PI).ln()
}

fn terms_for(wp: u32) -> usize {
    (wp as usize / 12).clamp(10, 300)
}

/// Stirling series for `ln Γ(x)`, `x ≥ anchor`.
fn gamma_plan(wp: u32) -> Plan {
    let k = terms_for(wp);
    let next = k + 1;
    let target = -(f64::from(wp) + 4.0) * std::f64::consts::LN_2;
    let num = ln_abs_bernoulli(next) - ((2 * next) as f64 * (2 * next - 1) as f64).ln() - target;
    let anchor = (num / (2 * next - 1) as f64).exp().max(k as f64).ceil();
    Plan { terms: k, anchor }
}

/// Asymptotic series for `ln G(x + 1)`, `x ≥ anchor`.
fn barnes_plan(wp: u32) -> Plan {
    let k = terms_for(wp);
    let next = k + 1;
    let target = -(f64::from(wp) + 4.0) * std::f64::consts::LN_2;
    let num = ln_abs_bernoulli(next + 1)
        - (4.0 * next as f64 * (next + 1) as f64).ln()
        - target;
    let anchor = (num / (2 * next) as f64).exp().max(k as f64).ceil();
    Plan { terms: k, anchor }
}

fn check_arg(z: &Float, what: &str) -> Result<()> {
    if z.is_finite() && *z > 0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires a positive argument, got {z}")))
    }
}

fn shift_count(z: &Float, anchor: f64) -> u64 {
    let zf = z.to_f64();
    if zf >= anchor {
        0
    } else {
        (anchor - zf).ceil() as u64
    }
}

/// `ln Γ(z)` for `z > 0` at `prec` bits.
pub fn ln_gamma_prec(z: &Float, prec: u32) -> Result<Float> {
    check_arg(z, "ln_gamma")?;
    let plan = gamma_plan(prec + 64);
    let m = shift_count(z, plan.anchor);
    let wp = prec + 64 + 64u64.saturating_sub(m.leading_zeros() as u64) as u32;
    let z = Float::with_val(wp, z);
    let x = Float::with_val(wp, &z + m);
    let mut value = stirling(&x, plan.terms, wp);
    if m > 0 {
        value -= ln_rising(&z, m, wp);
    }
    Ok(Float::with_val(prec, value))
}

fn stirling(x: &Float, terms: usize, wp: u32) -> Float {
    let bern = bernoulli_even(terms);
    let ln_x = Float::with_val(wp, x.ln_ref());
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let mut sum = Float::with_val(wp, x - 0.5f64) * &ln_x - x + two_pi.ln() / 2u32;
    let inv = Float::with_val(wp, x.recip_ref());
    let inv2 = Float::with_val(wp, inv.square_ref());
    let mut pow = inv;
    for (i, b) in bern.iter().enumerate() {
        let k = (i + 1) as u32;
        let term = Float::with_val(wp, &pow * b) / (2 * k * (2 * k - 1));
        sum += term;
        pow *= &inv2;
    }
    sum
}

/// `ln (z)_m = ln z(z+1)…(z+m-1)`.
fn ln_rising(z: &Float, m: u64, wp: u32) -> Float {
    let mut acc = Float::with_val(wp, 0);
    let mut prod = Float::with_val(wp, 1);
    let mut term = Float::with_val(wp, z);
    for i in 0..m {
        prod *= &term;
        term += 1u32;
        if i % 512 == 511 {
            acc += Float::with_val(wp, prod.ln_ref());
            prod.assign_one();
        }
    }
    acc + prod.ln()
}

trait AssignOne {
    fn assign_one(&mut self);
}

impl AssignOne for Float {
    fn assign_one(&mut self) {
        use rug::Assign;
        self.assign(1u32);
    }
}

/// `ln G(z)` for `z > 0` at `prec` bits.
pub fn ln_barnes_g_prec(z: &Float, prec: u32) -> Result<Float> {
    check_arg(z, "ln_barnes_g")?;
    let plan = barnes_plan(prec + 64);
    // anchor refers to x in G(x + 1), so shift until z + m - 1 >= anchor.
    let m = shift_count(z, plan.anchor + 1.0);
    let guard = 64 + 2 * (64 - (plan.anchor as u64 + m).leading_zeros());
    let wp = prec + guard;
    let z = Float::with_val(wp, z);
    let x = Float::with_val(wp, &z + m) - 1u32;
    let mut value = barnes_series(&x, plan.terms, wp);
    if m > 0 {
        value -= ln_gamma_prec(&z, wp)? * m;
        // Σ_{k=1}^{m-1} ln (z)_k, flushing the running product before it overflows.
        let mut acc = Float::with_val(wp, 0);
        let mut prod = Float::with_val(wp, 1);
        let mut rising = Float::with_val(wp, 1);
        let mut factor = Float::with_val(wp, &z);
        for k in 1..m {
            rising *= &factor;
            factor += 1u32;
            prod *= &rising;
            if k % 64 == 0 {
                acc += Float::with_val(wp, prod.ln_ref());
                prod.assign_one();
            }
        }
        acc += prod.ln();
        value -= acc;
    }
    Ok(Float::with_val(prec, value))
}

/// `ln G(x + 1)` for large `x`.
fn barnes_series(x: &Float, terms: usize, wp: u32) -> Float {
    let bern = bernoulli_even(terms + 1);
    let ln_x = Float::with_val(wp, x.ln_ref());
    let x2 = Float::with_val(wp, x.square_ref());
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let mut sum = Float::with_val(wp, &ln_x / 2u32) - 0.75f64;
    sum *= &x2;
    sum += Float::with_val(wp, x * two_pi.ln()) / 2u32;
    sum -= Float::with_val(wp, &ln_x / 12u32);
    sum += Float::with_val(wp, 1) / 12u32;
    sum -= glaisher_ln(wp);
    let inv2 = Float::with_val(wp, x2.recip_ref());
    let mut pow = Float::with_val(wp, &inv2);
    for k in 1..=terms {
        // B_{2k+2} / (4 k (k+1) x^{2k})
        let term = Float::with_val(wp, &pow * &bern[k]) / (4 * k as u64 * (k as u64 + 1));
        sum += term;
        pow *= &inv2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::rel_diff;

    #[test]
    fn matches_mpfr_ln_gamma() {
        for prec in [64u32, 200, 1000] {
            for z in [0.01, 0.5, 1.25, 3.0, 7.3, 49.9, 1234.5] {
                let zf = Float::with_val(prec, z);
                let ours = ln_gamma_prec(&zf, prec).unwrap();
                let mpfr = Float::with_val(prec + 64, zf.ln_gamma_ref());
                let err = Float::with_val(prec + 64, &ours - &mpfr).abs().to_f64();
                let scale = mpfr.to_f64().abs().max(1.0);
                assert!(
                    err <= scale * 2f64.powi(-(prec as i32) + 4),
                    "prec={prec} z={z} err={err:e}"
                );
            }
        }
    }

    #[test]
    fn barnes_recursion_small_args() {
        let prec = 150;
        for z in [0.1, 0.5, 0.9, 2.3] {
            let zf = Float::with_val(prec, z);
            let z1 = Float::with_val(prec, &zf + 1u32);
            let lhs = ln_barnes_g_prec(&z1, prec).unwrap() - ln_barnes_g_prec(&zf, prec).unwrap();
            let rhs = ln_gamma_prec(&zf, prec).unwrap();
            assert!(rel_diff(&lhs, &rhs) < 1e-40, "z={z}");
        }
    }

    #[test]
    fn plans_are_sane() {
        for wp in [64, 128, 512, 4096, 8192] {
            let g = gamma_plan(wp);
            let b = barnes_plan(wp);
            assert!(g.anchor >= 10.0 && g.anchor < 1e6, "{wp}: {}", g.anchor);
            assert!(b.anchor >= 10.0 && b.anchor < 1e6, "{wp}: {}", b.anchor);
        }
    }
}
