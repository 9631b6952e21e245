//! Small helpers around `rug::Float`.

use rug::ops::NegAssign;
use rug::Float;

/// Converts an `f64` exactly into a float of the given precision.
pub fn float(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

/// `|a - b| / max(|a|, |b|)`, or zero when both vanish.
pub fn rel_diff(a: &Float, b: &Float) -> f64 {
    let prec = a.prec().max(b.prec());
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    if scale.is_zero() {
        return 0.0;
    }
    let diff = Float::with_val(prec, a - b).abs();
    (diff / scale).to_f64()
}

/// Relative difference with an absolute floor of one, for quantities that may pass through zero.
pub fn mixed_diff(a: &Float, b: &Float) -> f64 {
    let prec = a.prec().max(b.prec());
    let scale = Float::with_val(prec, a.abs_ref())
        .max(&Float::with_val(prec, b.abs_ref()))
        .max(&Float::with_val(prec, 1));
    let diff = Float::with_val(prec, a - b).abs();
    (diff / scale).to_f64()
}

/// `|Σ terms| / max |term|`; zero when every term vanishes.
///
/// Identities are written as lists of signed terms that should sum to zero.
pub fn scaled_residual(terms: &[Float]) -> Float {
    let prec = terms.iter().map(Float::prec).max().unwrap_or(64);
    let mut sum = Float::with_val(prec, 0);
    let mut scale = Float::with_val(prec, 0);
    for term in terms {
        sum += term;
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > scale {
            scale = mag;
        }
    }
    if scale.is_zero() {
        return scale;
    }
    sum.abs() / scale
}

/// Scientific notation with `digits` significant digits.
pub fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    format!("{:.*e}", digits.max(1), x)
}

pub fn neg(mut x: Float) -> Float {
    x.neg_assign();
    x
}

/// Number of decimal digits represented by `bits` of mantissa.
pub fn bits_to_digits(bits: u32) -> f64 {
    f64::from(bits) * std::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_residual_of_cancelling_terms() {
        let terms = [float(128, 3.0), float(128, -1.0), float(128, -2.0)];
        assert!(scaled_residual(&terms).is_zero());
        let terms = [float(128, 4.0), float(128, -2.0)];
        assert_eq!(scaled_residual(&terms).to_f64(), 0.5);
    }

    #[test]
    fn rel_diff_handles_zero() {
        assert_eq!(rel_diff(&float(64, 0.0), &float(64, 0.0)), 0.0);
        assert_eq!(rel_diff(&float(64, 1.0), &float(64, 0.5)), 0.5);
    }

    #[test]
    fn formats_with_requested_digits() {
        assert_eq!(format_float(&float(64, 0.25), 3), "2.50e-1");
        assert_eq!(format_float(&float(64, 1.0 / 3.0), 3), "3.33e-1");
        assert_eq!(format_float(&float(64, 0.0), 3), "0");
    }
}
