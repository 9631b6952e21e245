use rug::float::Constant;
use rug::Float;

use super::series::AsymSeries;
use crate::error::{Error, Result};
use crate::orthocore::{build_ortho_table, integrate_interval};
use crate::precision::{Mixed, PrecisionContext};
use crate::specfun::{ln_barnes_g_prec, ln_gamma_prec, WeightParams};

/// `ln D_n(0)` as `n(n+2α) ln 2 - ln n! + Σ_{j=1}^{n} [ln Γ(j+1) + 2 ln Γ(j+α) - ln Γ(j+n+2α)]`.
///
/// The gamma values are advanced by `Γ(z+1) = zΓ(z)` from one evaluation each.
pub fn dn0_product(alpha: f64, n: usize, prec: u32) -> Result<Float> {
    check_n(n)?;
    let wp = prec + 32;
    let a = Float::with_val(wp, alpha);
    let nf = Float::with_val(wp, n);
    let two_a = Float::with_val(wp, &a * 2u32);
    let mut sum = Float::with_val(wp, &nf + &two_a) * &nf * Float::with_val(wp, 2).ln();
    // ln j!, ln Γ(j+α), ln Γ(j+n+2α) at the current j
    let mut ln_fact = Float::with_val(wp, 0);
    let mut ln_g_ja = ln_gamma_prec(&Float::with_val(wp, &a + 1u32), wp)?;
    let mut ln_g_top = ln_gamma_prec(&(Float::with_val(wp, &nf + 1u32) + &two_a), wp)?;
    for j in 1..=n {
        ln_fact += Float::with_val(wp, j).ln();
        if j > 1 {
            ln_g_ja += (Float::with_val(wp, j - 1) + &a).ln();
            ln_g_top += (Float::with_val(wp, j + n - 1) + &two_a).ln();
        }
        sum += &ln_fact;
        sum += Float::with_val(wp, &ln_g_ja * 2u32);
        sum -= &ln_g_top;
    }
    sum -= ln_fact;
    Ok(Float::with_val(prec, sum))
}

/// `ln D_n(0)` through Barnes G:
/// `n(n+2α) ln 2 + ln G(n+1) + ln G(n+1+2α) + 2 ln G(n+α+1) - ln G(2n+2α+1) - 2 ln G(α+1)`.
pub fn dn0_barnes(alpha: f64, n: usize, prec: u32) -> Result<Float> {
    check_n(n)?;
    let wp = prec + 32;
    let a = Float::with_val(wp, alpha);
    let nf = Float::with_val(wp, n);
    let two_a = Float::with_val(wp, &a * 2u32);
    let g = |z: Float| ln_barnes_g_prec(&z, wp);
    let mut sum = Float::with_val(wp, &nf + &two_a) * &nf * Float::with_val(wp, 2).ln();
    sum += g(Float::with_val(wp, &nf + 1u32))?;
    sum += g(Float::with_val(wp, &nf + 1u32) + &two_a)?;
    sum += g(Float::with_val(wp, &nf + 1u32) + &a)? * 2u32;
    sum -= g(Float::with_val(wp, &nf * 2u32) + &two_a + 1u32)?;
    sum -= g(Float::with_val(wp, &a + 1u32))? * 2u32;
    Ok(Float::with_val(prec, sum))
}

/// Both closed forms of `ln D_n(0)`, each accepted under the doubling policy.
pub fn dn0_forms(alpha: f64, n: usize, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    check_alpha(alpha)?;
    let product = ctx.accept("dn0_product", |bits| dn0_product(alpha, n, bits).map(Mixed))?;
    let barnes = ctx.accept("dn0_barnes", |bits| dn0_barnes(alpha, n, bits).map(Mixed))?;
    Ok((product.value.0, barnes.value.0))
}

/// `ln D_n(0)`; the product and Barnes forms must agree to the context tolerance.
pub fn dn0_exact(alpha: f64, n: usize, ctx: &PrecisionContext) -> Result<Float> {
    let (product, barnes) = dn0_forms(alpha, n, ctx)?;
    let gap = crate::mp::mixed_diff(&product, &barnes);
    if gap > ctx.tolerance() {
        return Err(Error::Precision {
            what: format!("ln D_{n}(0) closed forms"),
            bits: product.prec(),
            agreed_digits: -gap.log10(),
        });
    }
    Ok(product)
}

/// The exponent of the large-`n` expansion of `D_n(t)`, without the prefactor:
/// `-nt/2 + t(t+8α)/16 + c_1/n + c_2/n² + c_3/n³`.
pub fn hankel_series(params: WeightParams, prec: u32) -> AsymSeries {
    let a = Float::with_val(prec, params.alpha());
    let t = Float::with_val(prec, params.t());
    let a2 = Float::with_val(prec, a.square_ref());
    let k = 1 - Float::with_val(prec, &a2 * 4u32);
    let at = Float::with_val(prec, &a * &t);
    let t2 = Float::with_val(prec, t.square_ref());
    let c1 = Float::with_val(prec, &t - Float::with_val(prec, &a * 2u32)) * &k / 8u32;
    let c2 = (Float::with_val(prec, &t2 * 6u32) - Float::with_val(prec, &at * 24u32)
        + Float::with_val(prec, &a2 * 28u32)
        - 3u32)
        * &k
        / 192u32;
    let c3 = (Float::with_val(prec, &t2 * &t) - Float::with_val(prec, &at * &t) * 6u32
        + (Float::with_val(prec, &a2 * 4u32) + 1u32) * &t * 3u32
        + Float::with_val(prec, &a * &k) * 3u32)
        * &k
        / 96u32;
    AsymSeries {
        linear: Float::with_val(prec, &t / -2i32),
        constant: Float::with_val(prec, &t + Float::with_val(prec, &a * 8u32)) * &t / 16u32,
        coeffs: vec![c1, c2, c3],
    }
}

/// Expansion of `ln(D_n(t)/D_n(0))`.
pub fn ratio_series(params: WeightParams, prec: u32) -> AsymSeries {
    let a = Float::with_val(prec, params.alpha());
    let t = Float::with_val(prec, params.t());
    let a2 = Float::with_val(prec, a.square_ref());
    let kt = (1 - Float::with_val(prec, &a2 * 4u32)) * &t;
    let c1 = Float::with_val(prec, &kt / 8u32);
    let c2 = Float::with_val(prec, &t - Float::with_val(prec, &a * 4u32)) * &kt / 32u32;
    let c3 = (Float::with_val(prec, t.square_ref()) - Float::with_val(prec, &a * &t) * 6u32
        + Float::with_val(prec, &a2 * 12u32)
        + 3u32)
        * &kt
        / 96u32;
    AsymSeries {
        linear: Float::with_val(prec, &t / -2i32),
        constant: Float::with_val(prec, &t + Float::with_val(prec, &a * 8u32)) * &t / 16u32,
        coeffs: vec![c1, c2, c3],
    }
}

/// `ln` of the `n`-dependent prefactor
/// `π^{n+α+1/2} n^{α²-1/4} G²(1/2) / (2^{n²+(2α-1)(n+α)} G²(α+1))`.
pub fn hankel_prefactor(alpha: f64, n: usize, prec: u32) -> Result<Float> {
    check_n(n)?;
    check_alpha(alpha)?;
    let wp = prec + 32;
    let a = Float::with_val(wp, alpha);
    let nf = Float::with_val(wp, n);
    let ln_pi = Float::with_val(wp, Constant::Pi).ln();
    let ln2 = Float::with_val(wp, 2).ln();
    let mut out = (Float::with_val(wp, &nf + &a) + 0.5f64) * ln_pi;
    out += (Float::with_val(wp, a.square_ref()) - 0.25f64) * Float::with_val(wp, nf.ln_ref());
    out += ln_barnes_g_prec(&Float::with_val(wp, 0.5), wp)? * 2u32;
    let two_exp = Float::with_val(wp, nf.square_ref())
        + (Float::with_val(wp, &a * 2u32) - 1u32) * (Float::with_val(wp, &nf + &a));
    out -= two_exp * ln2;
    out -= ln_barnes_g_prec(&Float::with_val(wp, &a + 1u32), wp)? * 2u32;
    Ok(Float::with_val(prec, out))
}

/// Large-`n` estimate of `ln D_n(t)`, truncated after `n^{-3}`.
pub fn dn_asymptotic(params: WeightParams, n: usize, prec: u32) -> Result<Float> {
    let series = hankel_series(params, prec);
    Ok(hankel_prefactor(params.alpha(), n, prec)? + series.eval(n))
}

/// `ln(D_n(t)/D_n(0))` by quadrature of
/// `2β_n(n+α+s-sβ_n-sβ_{n-1}-sβ_{n+1}) - n` over `s ∈ [0, t]`, with `β`
/// taken from a fresh table at each node.
pub fn log_ratio_by_integral(params: WeightParams, n: usize, tol: f64, ctx: &PrecisionContext) -> Result<Float> {
    check_n(n)?;
    let t = params.t();
    let prec = ctx.mantissa_bits();
    if t == 0.0 {
        return Ok(Float::with_val(prec, 0));
    }
    let table_ctx = PrecisionContext::for_table(n, ctx.agreement_digits());
    let (lo, hi) = if t > 0.0 { (0.0, t) } else { (t, 0.0) };
    let value = integrate_interval(lo, hi, prec, 0.0, tol, |node| {
        let s = node.x.to_f64();
        let table = build_ortho_table(params.with_t(s)?, n, &table_ctx)?;
        let sf = Float::with_val(prec, s);
        let b = Float::with_val(prec, table.beta(n));
        let neighbours = Float::with_val(prec, table.beta(n - 1) + table.beta(n + 1)) + &b;
        let inner = Float::with_val(prec, n) + params.alpha() + &sf - sf * neighbours;
        Ok(b * inner * 2u32 - n as u32)
    })?;
    Ok(if t > 0.0 { value } else { -value })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    WeightParams::new(alpha, 0.0).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::series::Regime;
    use crate::mp::mixed_diff;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 25).unwrap()
    }

    fn params(alpha: f64, t: f64) -> WeightParams {
        WeightParams::new(alpha, t).unwrap()
    }

    #[test]
    fn single_moment() {
        // D_1(0) = μ_0 = 2 for the Legendre weight.
        let v = dn0_exact(0.0, 1, &ctx()).unwrap();
        assert!((v - Float::with_val(256, 2).ln()).abs().to_f64() < 1e-28);
    }

    #[test]
    fn closed_forms_agree() {
        for (alpha, n) in [(1.5, 10), (0.0, 3), (-0.6, 25), (2.5, 60)] {
            let (p, b) = dn0_forms(alpha, n, &ctx()).unwrap();
            assert!(mixed_diff(&p, &b) < 1e-25, "alpha={alpha} n={n}");
        }
    }

    #[test]
    fn closed_forms_match_factorization() {
        for alpha in [-0.4, 0.5, 1.5] {
            let table = build_ortho_table(params(alpha, 0.0), 12, &PrecisionContext::for_table(12, 25)).unwrap();
            for n in [1, 5, 12] {
                let exact = dn0_exact(alpha, n, &ctx()).unwrap();
                assert!(mixed_diff(&exact, table.log_d(n)) < 1e-24, "alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn rejects_empty_determinant() {
        assert!(dn0_exact(0.5, 0, &ctx()).is_err());
        assert!(dn0_exact(-1.5, 3, &ctx()).is_err());
    }

    #[test]
    fn hankel_series_at_t0_is_dn0_expansion() {
        for alpha in [-0.3, 0.0, 1.25] {
            let s = hankel_series(params(alpha, 0.0), 128);
            let k = 1.0 - 4.0 * alpha * alpha;
            let expected = [
                -alpha * k / 4.0,
                k * (28.0 * alpha * alpha - 3.0) / 192.0,
                alpha * k * k / 32.0,
            ];
            assert!(s.linear.is_zero() && s.constant.is_zero());
            for (c, e) in s.coeffs.iter().zip(expected) {
                assert!((c.to_f64() - e).abs() < 1e-15, "{c} vs {e}");
            }
        }
    }

    #[test]
    fn hankel_series_is_ratio_plus_dn0() {
        let (alpha, t) = (0.7, 1.9);
        let full = hankel_series(params(alpha, t), 128);
        let ratio = ratio_series(params(alpha, t), 128);
        let zero = hankel_series(params(alpha, 0.0), 128);
        for j in -1..=3 {
            let sum = Float::with_val(128, ratio.coeff(j).unwrap() + zero.coeff(j).unwrap());
            assert!((sum - full.coeff(j).unwrap()).abs().to_f64() < 1e-30, "j={j}");
        }
    }

    #[test]
    fn ratio_series_at_alpha0_t1() {
        let s = ratio_series(params(0.0, 1.0), 128);
        let n = 100.0;
        let expected = -n / 2.0 + 1.0 / 16.0 + 1.0 / (8.0 * n) + 1.0 / (32.0 * n * n) + 4.0 / (96.0 * n * n * n);
        assert!((s.eval(100).to_f64() - expected).abs() < 1e-12);
        assert_eq!(s.regime(100), Regime::Asymptotic);
    }

    #[test]
    fn asymptotic_estimate_tracks_pipeline() {
        let p = params(1.0, 1.0);
        let n = 40;
        let table = build_ortho_table(p, n, &PrecisionContext::for_table(n, 25)).unwrap();
        let est = dn_asymptotic(p, n, 256).unwrap();
        let gap = Float::with_val(256, &est - table.log_d(n)).abs().to_f64();
        assert!(gap < 1e-5, "{gap}");
    }

    #[test]
    fn chebyshev_second_kind_is_exact() {
        // α = 1/2, t = 0: β_n = 1/4 and D_n(0) equals its prefactor exactly.
        for n in [1, 4, 30] {
            let est = dn_asymptotic(params(0.5, 0.0), n, 200).unwrap();
            let exact = dn0_exact(0.5, n, &ctx()).unwrap();
            assert!(mixed_diff(&est, &exact) < 1e-25, "n={n}");
        }
    }

    #[test]
    fn integral_route_matches_pipeline() {
        let p = params(1.5, 1.0);
        let n = 6;
        let tctx = PrecisionContext::for_table(n, 25);
        let at_t = build_ortho_table(p, n, &tctx).unwrap();
        let at_0 = build_ortho_table(params(1.5, 0.0), n, &tctx).unwrap();
        let expected = Float::with_val(256, at_t.log_d(n) - at_0.log_d(n));
        let got = log_ratio_by_integral(p, n, 1e-14, &ctx()).unwrap();
        assert!((got - expected).abs().to_f64() < 1e-12);
    }
}
