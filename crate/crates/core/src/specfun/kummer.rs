use rug::Float;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

/// `Φ(a, b; z)` by its power series at `prec` bits.
///
/// Negative arguments go through `Φ(a, b; z) = e^z Φ(b - a, b; -z)` so that
/// the summed series has no alternating cancellation.
pub fn kummer_phi_prec(a: &Float, b: &Float, z: &Float, prec: u32) -> Result<Float> {
    if b.is_integer() && *b <= 0 {
        return Err(Error::Domain(format!(
            "kummer_phi: b must not be a nonpositive integer, got {b}"
        )));
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("kummer_phi: non-finite argument"));
    }
    let wp = prec + 16;
    if *z < 0 {
        let neg = Float::with_val(wp, -z);
        let a2 = Float::with_val(wp, b - a);
        let series = series(&a2, b, &neg, wp)?;
        let scale = Float::with_val(wp, z.exp_ref());
        return Ok(Float::with_val(prec, series * scale));
    }
    Ok(Float::with_val(prec, series(a, b, z, wp)?))
}

fn series(a: &Float, b: &Float, z: &Float, wp: u32) -> Result<Float> {
    let mut sum = Float::with_val(wp, 1);
    let mut term = Float::with_val(wp, 1);
    if z.is_zero() {
        return Ok(sum);
    }
    let mut ak = Float::with_val(wp, a);
    let mut bk = Float::with_val(wp, b);
    let mut small = 0;
    for k in 1..=MAX_TERMS {
        term *= &ak;
        term /= &bk;
        term *= z;
        term /= k as u64;
        sum += &term;
        ak += 1u32;
        bk += 1u32;
        let threshold = Float::with_val(wp, sum.abs_ref()) >> (wp + 8);
        if Float::with_val(wp, term.abs_ref()) <= threshold {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Precision {
        what: "kummer_phi series".into(),
        bits: wp,
        agreed_digits: 0.0,
    })
}
