//! Extended-precision scalar special functions and the closed-form moments
//! of the weight `(1 - x^2)^alpha exp(-t x^2)` on [-1, 1].

mod bernoulli;
mod gamma;
mod kummer;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::float;
use crate::precision::{Mixed, PrecisionContext};

pub use gamma::{glaisher_ln, ln_barnes_g_prec, ln_gamma_prec, GLAISHER_A};
pub use kummer::kummer_phi_prec;

/// The pair `(alpha, t)` defining the weight; `alpha > -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    alpha: f64,
    t: f64,
}

impl WeightParams {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        if !alpha.is_finite() || !t.is_finite() {
            return Err(Error::domain("alpha and t must be finite"));
        }
        if alpha <= -1.0 {
            return Err(Error::domain(format!("alpha must exceed -1, got {alpha}")));
        }
        Ok(WeightParams { alpha, t })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        WeightParams::new(self.alpha, t)
    }
}

/// `ln Γ(z)` for `z > 0`, accepted under the doubling policy.
pub fn log_gamma(z: f64, ctx: &PrecisionContext) -> Result<Float> {
    check_positive(z, "log_gamma")?;
    let acc = ctx.accept("log_gamma", |bits| ln_gamma_prec(&float(bits, z), bits).map(Mixed))?;
    Ok(acc.value.0)
}

/// Kummer's confluent hypergeometric function `Φ(a, b; z)`.
pub fn kummer_phi(a: f64, b: f64, z: f64, ctx: &PrecisionContext) -> Result<Float> {
    let acc = ctx.accept("kummer_phi", |bits| {
        kummer_phi_prec(&float(bits, a), &float(bits, b), &float(bits, z), bits)
    })?;
    Ok(acc.value)
}

/// `ln G(z)` for the Barnes G-function, `z > 0`.
///
/// Accuracy is capped near 60 digits by the stored Glaisher–Kinkelin constant.
pub fn log_barnes_g(z: f64, ctx: &PrecisionContext) -> Result<Float> {
    check_positive(z, "log_barnes_g")?;
    let acc = ctx.accept("log_barnes_g", |bits| {
        ln_barnes_g_prec(&float(bits, z), bits).map(Mixed)
    })?;
    Ok(acc.value.0)
}

/// The moment `μ_j(t) = ∫ x^j w(x, t) dx`; exactly zero for odd `j`.
pub fn moment(j: usize, params: WeightParams, ctx: &PrecisionContext) -> Result<Float> {
    if j % 2 == 1 {
        return Ok(Float::with_val(ctx.mantissa_bits(), 0));
    }
    let acc = ctx.accept("moment", |bits| even_moment_prec(j / 2, params, bits))?;
    Ok(acc.value)
}

/// `μ_{2k}` at fixed precision, evaluated directly from the gamma ratio.
pub fn even_moment_prec(k: usize, params: WeightParams, prec: u32) -> Result<Float> {
    let wp = prec + 32;
    let alpha = float(wp, params.alpha());
    let half = float(wp, 0.5);
    let kf = Float::with_val(wp, k);
    let a = Float::with_val(wp, &kf + &half);
    let b = Float::with_val(wp, &a + 1u32) + &alpha;
    let ln_ratio = ln_gamma_prec(&(Float::with_val(wp, &alpha + 1u32)), wp)?
        + ln_gamma_prec(&a, wp)?
        - ln_gamma_prec(&b, wp)?;
    let phi = kummer_phi_prec(&a, &b, &float(wp, -params.t()), wp)?;
    Ok(Float::with_val(prec, ln_ratio.exp() * phi))
}

/// `μ_0, μ_1, …, μ_{count-1}` at fixed precision.
///
/// The gamma ratio is advanced by its exact recursion, so only two log-gamma
/// evaluations are needed for the whole batch.
pub fn moments_prec(count: usize, params: WeightParams, prec: u32) -> Result<Vec<Float>> {
    let wp = prec + 32;
    let alpha = float(wp, params.alpha());
    let neg_t = float(wp, -params.t());
    let mut ratio = {
        let a1 = Float::with_val(wp, &alpha + 1u32);
        let b0 = Float::with_val(wp, &alpha + 1.5f64);
        (ln_gamma_prec(&a1, wp)? + ln_gamma_prec(&float(wp, 0.5), wp)? - ln_gamma_prec(&b0, wp)?)
            .exp()
    };
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let a = Float::with_val(wp, k) + 0.5f64;
        let b = Float::with_val(wp, &a + 1u32) + &alpha;
        let phi = kummer_phi_prec(&a, &b, &neg_t, wp)?;
        out.push(Float::with_val(prec, &ratio * &phi));
        if out.len() < count {
            out.push(Float::with_val(prec, 0));
        }
        ratio *= &a;
        ratio /= &b;
        k += 1;
    }
    Ok(out)
}

fn check_positive(z: f64, what: &str) -> Result<()> {
    if z.is_finite() && z > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} requires z > 0, got {z}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 30).unwrap()
    }

    #[test]
    fn weight_params_validate_alpha() {
        assert!(WeightParams::new(-1.0, 0.0).is_err());
        assert!(WeightParams::new(-1.5, 0.0).is_err());
        assert!(WeightParams::new(-0.999, 2.0).is_ok());
        assert!(WeightParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_classical_values() {
        let c = ctx();
        assert!(log_gamma(1.0, &c).unwrap().to_f64().abs() < 1e-35);
        assert!(log_gamma(2.0, &c).unwrap().to_f64().abs() < 1e-35);
        let half = log_gamma(0.5, &c).unwrap();
        let ln_sqrt_pi = Float::with_val(256, rug::float::Constant::Pi).sqrt().ln();
        assert!(crate::mp::rel_diff(&half, &ln_sqrt_pi) < 1e-30);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0, &ctx()), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5, &ctx()), Err(Error::Domain(_))));
    }

    #[test]
    fn kummer_at_zero_argument() {
        let v = kummer_phi(0.5, 1.5, 0.0, &ctx()).unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn kummer_closed_form() {
        // Φ(1, 2; z) = (e^z - 1) / z
        let v = kummer_phi(1.0, 2.0, 1.0, &ctx()).unwrap();
        let e = Float::with_val(256, 1).exp() - 1u32;
        assert!(crate::mp::rel_diff(&v, &e) < 1e-30);
        let v = kummer_phi(1.0, 2.0, -3.0, &ctx()).unwrap();
        let e = (1 - Float::with_val(256, -3).exp()) / 3u32;
        assert!(crate::mp::rel_diff(&v, &e) < 1e-30);
    }

    #[test]
    fn kummer_rejects_nonpositive_integer_b() {
        for b in [0.0, -1.0, -4.0] {
            assert!(matches!(kummer_phi(0.5, b, 0.3, &ctx()), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let p = WeightParams::new(0.7, 1.3).unwrap();
        for j in [1, 3, 7] {
            assert!(moment(j, p, &ctx()).unwrap().is_zero());
        }
    }

    #[test]
    fn legendre_moments() {
        let p = WeightParams::new(0.0, 0.0).unwrap();
        let m0 = moment(0, p, &ctx()).unwrap();
        let m2 = moment(2, p, &ctx()).unwrap();
        assert!((m0 - 2u32).abs().to_f64() < 1e-35);
        assert!((m2 - Float::with_val(256, 2) / 3u32).abs().to_f64() < 1e-35);
    }

    #[test]
    fn batch_moments_match_direct() {
        let p = WeightParams::new(1.5, 2.0).unwrap();
        let batch = moments_prec(12, p, 160).unwrap();
        for k in 0..6 {
            let direct = even_moment_prec(k, p, 160).unwrap();
            assert!(crate::mp::rel_diff(&batch[2 * k], &direct) < 1e-44, "k={k}");
            assert!(batch[2 * k + 1].is_zero());
        }
    }

    #[test]
    fn barnes_g_integer_points() {
        let c = ctx();
        assert!(log_barnes_g(1.0, &c).unwrap().to_f64().abs() < 1e-35);
        assert!(log_barnes_g(2.0, &c).unwrap().to_f64().abs() < 1e-35);
        // G(5) = 1! 2! 3! = 12
        let g5 = log_barnes_g(5.0, &c).unwrap();
        assert!((g5 - Float::with_val(256, 12).ln()).abs().to_f64() < 1e-35);
    }

    #[test]
    fn barnes_g_at_one_half() {
        let c = ctx();
        let got = log_barnes_g(0.5, &c).unwrap();
        let p = 256;
        let pi = Float::with_val(p, rug::float::Constant::Pi);
        let expected = Float::with_val(p, 2).ln() / 24u32 - pi.ln() / 4u32
            + Float::with_val(p, 0.125)
            - glaisher_ln(p) * 1.5f64;
        assert!((got - expected).abs().to_f64() < 1e-35);
    }
}
