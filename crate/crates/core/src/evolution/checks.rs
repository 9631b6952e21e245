use rug::Float;

use super::grid::{fd_check, FdCheck, FdGrid, Jet, Sampler};
use crate::error::Result;
use crate::mp::float;
use crate::precision::PrecisionContext;

fn neg(x: Float) -> Float {
    -x
}

/// `2t (ln h_n)' = R_n - 2n - 1 - 2α`.
pub fn dln_h_check(alpha: f64, n: usize, grid: &FdGrid, ctx: &PrecisionContext) -> Result<FdCheck> {
    let mut sampler = Sampler::new(alpha, n + 2, ctx)?;
    dln_h_with(&mut sampler, n, grid)
}

pub(crate) fn dln_h_with(sampler: &mut Sampler, n: usize, grid: &FdGrid) -> Result<FdCheck> {
    let alpha = sampler.alpha();
    fd_check(
        "log_norm_derivative",
        sampler,
        n,
        grid,
        &|_, table, aux| vec![table.h(n).clone().ln(), aux.big_r(n).clone()],
        &|t, jet: &Jet| {
            let prec = t.prec();
            Some(vec![
                Float::with_val(prec, t * &jet.d1[0]) * 2u32,
                neg(jet.value[1].clone()),
                float(prec, 2.0 * n as f64 + 1.0 + 2.0 * alpha),
            ])
        },
    )
}

/// `2t p' = β_n R_n - r_n - 2p` and `p' = β_n β_{n-1}`, in that order.
pub fn dp_check(alpha: f64, n: usize, grid: &FdGrid, ctx: &PrecisionContext) -> Result<Vec<FdCheck>> {
    let mut sampler = Sampler::new(alpha, n + 2, ctx)?;
    let quantities = |_: f64, table: &crate::orthocore::OrthoTable, aux: &crate::ladder::AuxTable| {
        vec![
            table.p(n).clone(),
            table.beta(n).clone(),
            table.beta(n - 1).clone(),
            aux.big_r(n).clone(),
            aux.small_r(n).clone(),
        ]
    };
    let via_aux = fd_check("p_derivative_aux", &mut sampler, n, grid, &quantities, &|t, jet| {
        let prec = t.prec();
        let v = &jet.value;
        Some(vec![
            Float::with_val(prec, t * &jet.d1[0]) * 2u32,
            neg(Float::with_val(prec, &v[1] * &v[3])),
            v[4].clone(),
            Float::with_val(prec, &v[0] * 2u32),
        ])
    })?;
    let via_product = fd_check("p_derivative_product", &mut sampler, n, grid, &quantities, &|t, jet| {
        let prec = t.prec();
        Some(vec![
            jet.d1[0].clone(),
            neg(Float::with_val(prec, &jet.value[1] * &jet.value[2])),
        ])
    })?;
    Ok(vec![via_aux, via_product])
}

/// `H_n - n(n+2α) = 2t (ln D_n)'`.
pub fn log_hankel_derivative_check(
    alpha: f64,
    n: usize,
    grid: &FdGrid,
    ctx: &PrecisionContext,
) -> Result<FdCheck> {
    let mut sampler = Sampler::new(alpha, n + 2, ctx)?;
    fd_check(
        "log_hankel_derivative",
        &mut sampler,
        n,
        grid,
        &|_, table, aux| vec![aux.big_h(n).clone(), table.log_d(n).clone()],
        &|t, jet| {
            let prec = t.prec();
            let nf = n as f64;
            Some(vec![
                jet.value[0].clone(),
                float(prec, -nf * (nf + 2.0 * alpha)),
                neg(Float::with_val(prec, t * &jet.d1[1]) * 2u32),
            ])
        },
    )
}

/// The Painlevé V equation for `W_n = 1 + 2t/R_n` with
/// `μ₁ = α²/2`, `μ₂ = -1/8`, `μ₃ = (2n+1+2α)/2`, `μ₄ = -1/2`.
///
/// Points where `W_n` is 0 or 1 are skipped.
pub fn pv_residual(alpha: f64, n: usize, grid: &FdGrid, ctx: &PrecisionContext) -> Result<FdCheck> {
    let mut sampler = Sampler::new(alpha, n + 2, ctx)?;
    fd_check(
        "painleve_v",
        &mut sampler,
        n,
        grid,
        &|t, _, aux| {
            let prec = aux.prec();
            vec![float(prec, 2.0 * t) / aux.big_r(n) + 1u32]
        },
        &|t, jet| {
            let prec = t.prec();
            let w = &jet.value[0];
            let (w1, w2) = (&jet.d1[0], &jet.d2[0]);
            let wm1 = Float::with_val(prec, w - 1u32);
            if w.is_zero() || wm1.is_zero() {
                return None;
            }
            let mu1 = float(prec, alpha * alpha / 2.0);
            let mu2 = float(prec, -0.125);
            let mu3 = float(prec, (2.0 * n as f64 + 1.0 + 2.0 * alpha) / 2.0);
            let mu4 = float(prec, -0.5);
            let t2 = Float::with_val(prec, t.square_ref());
            let wm1_sq = Float::with_val(prec, wm1.square_ref());
            let first = Float::with_val(prec, w * 3u32) - 1u32;
            let first = first * Float::with_val(prec, w1.square_ref())
                / (Float::with_val(prec, w * &wm1) * 2u32);
            Some(vec![
                w2.clone(),
                neg(first),
                Float::with_val(prec, w1 / t),
                neg(Float::with_val(prec, &wm1_sq * &mu1) * w / &t2),
                neg(Float::with_val(prec, &wm1_sq * &mu2) / w / &t2),
                neg(Float::with_val(prec, &mu3 * w) / t),
                neg(Float::with_val(prec, &mu4 * w) * Float::with_val(prec, w + 1u32) / &wm1),
            ])
        },
    )
}

/// The second-order ODE for `β_n(t)`, with `r_n` read as `n - 2tβ_n`.
pub fn btde_residual(alpha: f64, n: usize, grid: &FdGrid, ctx: &PrecisionContext) -> Result<FdCheck> {
    let mut sampler = Sampler::new(alpha, n + 2, ctx)?;
    fd_check(
        "beta_ode",
        &mut sampler,
        n,
        grid,
        &|_, table, _| vec![table.beta(n).clone()],
        &|t, jet| Some(btde_terms(alpha, n, t, &jet.value[0], &jet.d1[0], &jet.d2[0]).to_vec()),
    )
}

/// `[LHS, -RHS]` of the `β_n` ODE, both sides squared as printed.
pub fn btde_terms(alpha: f64, n: usize, t: &Float, b: &Float, b1: &Float, b2: &Float) -> [Float; 2] {
    let prec = t.prec().max(b.prec());
    let f = |x: f64| float(prec, x);
    let (a, nf) = (f(alpha), f(n as f64));
    // u = (tβ)', v = (tβ)'' / 1, s = n - 2tβ
    let u = Float::with_val(prec, t * b1) + b;
    let v = Float::with_val(prec, t * b2) + Float::with_val(prec, b1 * 2u32);
    let tb = Float::with_val(prec, t * b);
    let s = Float::with_val(prec, &nf - Float::with_val(prec, &tb * 2u32));
    let u2 = Float::with_val(prec, u.square_ref());
    let s2 = Float::with_val(prec, s.square_ref());
    let s3 = Float::with_val(prec, &s2 * &s);
    let s4 = Float::with_val(prec, s2.square_ref());
    let t2 = Float::with_val(prec, t.square_ref());
    let na = Float::with_val(prec, &nf * &a);
    let n_minus_2a = Float::with_val(prec, &nf - Float::with_val(prec, &a * 2u32));

    // 2nα + 2(n-2α)s - 3s²
    let bracket = Float::with_val(prec, &na * 2u32) + Float::with_val(prec, &n_minus_2a * &s) * 2u32
        - Float::with_val(prec, &s2 * 3u32);
    let mut lhs = Float::with_val(prec, &t2 * &u) * &v * 8u32;
    // 4t(2t - 2n + 1 - 2α + 4tβ)u²
    let coef = Float::with_val(prec, t * 2u32) - Float::with_val(prec, &nf * 2u32) + 1u32
        - Float::with_val(prec, &a * 2u32)
        + Float::with_val(prec, &tb * 4u32);
    lhs += Float::with_val(prec, t * &coef) * &u2 * 4u32;
    lhs -= Float::with_val(prec, t * &u) * &bracket * 4u32;
    lhs += Float::with_val(prec, &s4 * 4u32);
    let c3 = Float::with_val(prec, &nf - Float::with_val(prec, &a * 3u32)) + t;
    lhs -= c3 * &s3 * 4u32;
    let t_minus_a = Float::with_val(prec, t - &a);
    let c2 = Float::with_val(prec, t - Float::with_val(prec, &a * 3u32)) * &nf
        - Float::with_val(prec, &a * &t_minus_a) * 2u32;
    lhs += c2 * &s2 * 4u32;
    lhs += Float::with_val(prec, &na * &t_minus_a) * &s * 8u32;
    let lhs = Float::with_val(prec, lhs.square_ref());

    // [2t v + (2t - 2α + 1 - 2r)u + 3s² - 2(n-2α)s - 2nα]², r = s
    let coef_r = Float::with_val(prec, t * 2u32) - Float::with_val(prec, &a * 2u32) + 1u32
        - Float::with_val(prec, &s * 2u32);
    let mut inner = Float::with_val(prec, t * &v) * 2u32;
    inner += coef_r * &u;
    inner += Float::with_val(prec, &s2 * 3u32);
    inner -= Float::with_val(prec, &n_minus_2a * &s) * 2u32;
    inner -= Float::with_val(prec, &na * 2u32);
    let inner_sq = Float::with_val(prec, inner.square_ref());
    // 16t²[β s (n + 2α - 2tβ) + u²]
    let pos = Float::with_val(prec, &s + Float::with_val(prec, &a * 2u32));
    let last = Float::with_val(prec, b * &s) * &pos + &u2;
    let rhs = inner_sq * last * &t2 * 16u32;
    [lhs, -rhs]
}

/// The second-order ODE for `H_n(t)`, the branch choice
/// `r_n = -t - α + √((t+α)² + H_n - 2tH_n')`, and the quadratic
/// `r_n² + 2(t+α)r_n + 2tH_n' - H_n = 0`, in that order.
pub fn hn_ode_residual(alpha: f64, n: usize, grid: &FdGrid, ctx: &PrecisionContext) -> Result<Vec<FdCheck>> {
    let mut sampler = Sampler::new(alpha, n + 2, ctx)?;
    let quantities = |_: f64, _: &crate::orthocore::OrthoTable, aux: &crate::ladder::AuxTable| {
        vec![aux.big_h(n).clone(), aux.small_r(n).clone()]
    };
    let ode = fd_check("partial_sum_ode", &mut sampler, n, grid, &quantities, &|t, jet| {
        Some(hn_ode_terms(alpha, n, t, &jet.value[0], &jet.d1[0], &jet.d2[0]).to_vec())
    })?;
    let branch = fd_check("partial_sum_branch", &mut sampler, n, grid, &quantities, &|t, jet| {
        let prec = t.prec();
        let shift = Float::with_val(prec, t + alpha);
        let disc = Float::with_val(prec, shift.square_ref()) + &jet.value[0]
            - Float::with_val(prec, t * &jet.d1[0]) * 2u32;
        if disc < 0 {
            return None;
        }
        let r = disc.sqrt() - shift;
        Some(vec![r, neg(jet.value[1].clone())])
    })?;
    let quadratic = fd_check("partial_sum_quadratic", &mut sampler, n, grid, &quantities, &|t, jet| {
        let prec = t.prec();
        let r = &jet.value[1];
        Some(vec![
            Float::with_val(prec, r.square_ref()),
            Float::with_val(prec, t + alpha) * r * 2u32,
            Float::with_val(prec, t * &jet.d1[0]) * 2u32,
            neg(jet.value[0].clone()),
        ])
    })?;
    Ok(vec![ode, branch, quadratic])
}

/// `[LHS, -RHS]` of the `H_n` ODE, both sides squared as printed.
pub fn hn_ode_terms(alpha: f64, n: usize, t: &Float, h: &Float, h1: &Float, h2: &Float) -> [Float; 2] {
    let prec = t.prec().max(h.prec());
    let f = |x: f64| float(prec, x);
    let (a, nf) = (f(alpha), f(n as f64));
    let ta = Float::with_val(prec, t + &a);
    let ta2 = Float::with_val(prec, ta.square_ref());
    let t2 = Float::with_val(prec, t.square_ref());
    let t3 = Float::with_val(prec, &t2 * t);
    let nt = Float::with_val(prec, &nf * t);
    let h_sq = Float::with_val(prec, h.square_ref());
    let h1_sq = Float::with_val(prec, h1.square_ref());
    // 2n(t+α) + 1
    let g = Float::with_val(prec, &nf * &ta) * 2u32 + 1u32;

    let mut lhs = Float::with_val(prec, h2.square_ref()) * &t3 * 4u32;
    lhs += Float::with_val(prec, &t2 * h2) * (Float::with_val(prec, h1 - Float::with_val(prec, &ta * 2u32))) * 4u32;
    lhs += Float::with_val(prec, &h1_sq * h1) * &t2 * 8u32;
    let c = Float::with_val(prec, h * 4u32) + Float::with_val(prec, &ta2 * 4u32)
        - Float::with_val(prec, &nt * 32u32)
        - 1u32;
    lhs -= Float::with_val(prec, t * &h1_sq) * c;
    let k = Float::with_val(prec, &nf * 2u32) + &a + t;
    let k = Float::with_val(prec, &k * h) * 4u32;
    let m = Float::with_val(prec, t * 3u32) + &a;
    let q = Float::with_val(prec, &nt * 4u32) + Float::with_val(prec, &nf * &a) * 4u32 + 1u32;
    lhs -= Float::with_val(prec, t * h1) * (k + m * q) * 4u32;
    let nat = Float::with_val(prec, &nf + &a) + t;
    lhs += Float::with_val(prec, &nat * &h_sq) * 8u32;
    let mut poly = Float::with_val(prec, &t3 * 2u32);
    poly += Float::with_val(prec, &t2 * 6u32) * Float::with_val(prec, &nf + &a);
    poly += t.clone()
        * (Float::with_val(prec, &nf * &a) * 8u32 + Float::with_val(prec, a.square_ref()) * 6u32 + 1u32);
    poly += Float::with_val(prec, a.square_ref()) * Float::with_val(prec, &nf + &a) * 2u32;
    lhs += poly * h * 4u32;
    lhs += Float::with_val(prec, t * &ta2) * &g * 8u32;
    let lhs = Float::with_val(prec, lhs.square_ref());

    let front = Float::with_val(prec, h - Float::with_val(prec, t * h1) * 2u32) + &ta2;
    let mut inner = Float::with_val(prec, &t2 * h2) * 2u32;
    let e = Float::with_val(prec, h * 4u32) + Float::with_val(prec, &nt * 8u32) + 1u32;
    inner += Float::with_val(prec, t * &e) * h1;
    inner -= Float::with_val(prec, &h_sq * 2u32);
    inner -= Float::with_val(prec, h * 2u32) * (Float::with_val(prec, &nt * 2u32) + &ta2);
    inner -= Float::with_val(prec, t * &ta) * &g * 2u32;
    let rhs = front * Float::with_val(prec, inner.square_ref()) * 16u32;
    [lhs, -rhs]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 25).unwrap()
    }

    fn coarse(step: f64) -> FdGrid {
        FdGrid::uniform(0.5, 1.5, 0.25, step).unwrap()
    }

    #[test]
    fn log_norm_derivative() {
        let check = dln_h_check(0.5, 5, &coarse(1.0 / 32.0), &ctx()).unwrap();
        assert!(check.within_truncation(10.0, 1e-22), "{check:?}");
        assert!(check.max_residual() < 1e-6);
    }

    #[test]
    fn p_derivative_forms() {
        for check in dp_check(1.0, 4, &coarse(1.0 / 32.0), &ctx()).unwrap() {
            assert!(check.within_truncation(10.0, 1e-22), "{check:?}");
        }
    }

    #[test]
    fn painleve_v() {
        let check = pv_residual(1.0, 4, &coarse(1.0 / 32.0), &ctx()).unwrap();
        assert!(check.within_truncation(10.0, 1e-22), "{check:?}");
        assert_eq!(check.skipped(), 0);
    }

    #[test]
    fn beta_ode() {
        let check = btde_residual(0.5, 5, &coarse(1.0 / 32.0), &ctx()).unwrap();
        assert!(check.within_truncation(10.0, 1e-22), "{check:?}");
    }

    #[test]
    fn partial_sum_ode() {
        for check in hn_ode_residual(1.0, 3, &coarse(1.0 / 32.0), &ctx()).unwrap() {
            assert!(check.within_truncation(10.0, 1e-22), "{check:?}");
            assert_eq!(check.skipped(), 0);
        }
    }

    #[test]
    fn log_hankel_derivative() {
        let check = log_hankel_derivative_check(1.5, 6, &coarse(1.0 / 32.0), &ctx()).unwrap();
        assert!(check.within_truncation(10.0, 1e-22), "{check:?}");
    }

    #[test]
    fn wrong_equation_is_not_truncation() {
        // A perturbed μ-free identity: 2t (ln h_n)' = R_n - 2n - 2α (off by one).
        let mut sampler = Sampler::new(0.5, 7, &ctx()).unwrap();
        let check = fd_check(
            "broken",
            &mut sampler,
            5,
            &coarse(1.0 / 32.0),
            &|_, table, aux| vec![table.h(5).clone().ln(), aux.big_r(5).clone()],
            &|t, jet| {
                let prec = t.prec();
                Some(vec![
                    Float::with_val(prec, t * &jet.d1[0]) * 2u32,
                    neg(jet.value[1].clone()),
                    float(prec, 11.0),
                ])
            },
        )
        .unwrap();
        assert!(!check.within_truncation(10.0, 1e-22));
    }
}
