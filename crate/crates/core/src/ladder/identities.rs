use rug::Float;

use super::aux::AuxTable;
use super::coeffs::{potential_derivative, sum_a_closed, LadderCoeffs};
use crate::error::{Error, Result};
use crate::mp::{float, neg, scaled_residual};
use crate::orthocore::{eval_monic_derivs, OrthoTable};
use crate::report::{GridPoint, ResidualReport};

/// Report keys written by [`identity_residuals`].
pub const IDENTITY_NAMES: [&str; 8] = [
    "r_pair_sum",
    "r_from_beta",
    "r_quadratic",
    "partial_sum_r",
    "beta_r_p",
    "big_r_from_beta",
    "compatibility_poles",
    "p_from_partial_sum",
];

/// Sample points for the z-dependent compatibility check.
const COMPAT_Z: [f64; 2] = [0.3, 0.7];

/// Scaled residuals of every algebraic identity among `β_n`, `p(n,t)`,
/// `R_n`, `r_n`, `H_n` for `1 ≤ n ≤ n_max - 1`.
pub fn identity_residuals(table: &OrthoTable, aux: &AuxTable) -> ResidualReport {
    let prec = table.prec().max(aux.prec());
    let params = table.params();
    let (alpha_f, t_f) = (params.alpha(), params.t());
    let alpha = float(prec, alpha_f);
    let t = float(prec, t_f);
    let two_t = Float::with_val(prec, &t * 2u32);
    let two_alpha = Float::with_val(prec, &alpha * 2u32);
    let mut report = ResidualReport::new(table.meta().agreement_digits as usize + 5);
    let top = table.n_max().min(aux.n_max());
    for n in 1..top {
        let point = GridPoint {
            alpha: alpha_f,
            t: t_f,
            n,
        };
        let nf = float(prec, n as f64);
        let beta = table.beta(n);
        let beta_prev = table.beta(n - 1);
        let beta_next = table.beta(n + 1);
        let r = aux.small_r(n);
        let r_next = aux.small_r(n + 1);
        let big_r = aux.big_r(n);
        let big_r_prev = aux.big_r(n - 1);
        let big_h = aux.big_h(n);
        let p = table.p(n);
        let r_sq = Float::with_val(prec, r.square_ref());
        let two_t_beta = Float::with_val(prec, &two_t * beta);

        report.record(
            "r_pair_sum",
            point,
            scaled_residual(&[
                r_next.clone(),
                r.clone(),
                neg(big_r.clone()),
                two_alpha.clone(),
            ]),
        );
        report.record(
            "r_from_beta",
            point,
            scaled_residual(&[r.clone(), neg(nf.clone()), two_t_beta.clone()]),
        );
        report.record(
            "r_quadratic",
            point,
            scaled_residual(&[
                r_sq.clone(),
                Float::with_val(prec, &two_alpha * r),
                neg(Float::with_val(prec, beta * big_r) * big_r_prev),
            ]),
        );
        report.record(
            "partial_sum_r",
            point,
            scaled_residual(&[
                Float::with_val(prec, &t - &alpha) * r * 2u32,
                neg(r_sq.clone()),
                big_h.clone(),
                neg(Float::with_val(prec, &two_t_beta * big_r)),
                neg(Float::with_val(prec, &two_t_beta * big_r_prev)),
            ]),
        );
        report.record(
            "beta_r_p",
            point,
            scaled_residual(&[
                Float::with_val(prec, beta * big_r),
                neg(r.clone()),
                neg(Float::with_val(prec, p * 2u32)),
                neg(Float::with_val(prec, &two_t_beta * beta_prev)),
            ]),
        );
        report.record(
            "big_r_from_beta",
            point,
            scaled_residual(&[
                big_r.clone(),
                neg(Float::with_val(prec, &two_alpha + (2 * n + 1) as u32)),
                two_t_beta.clone(),
                Float::with_val(prec, &two_t * beta_next),
            ]),
        );
        // B_{n+1}(z) + B_n(z) = z A_n(z) - v'(z) at sample points.
        let this = LadderCoeffs::from_aux(aux, n);
        let next = LadderCoeffs::from_aux(aux, n + 1);
        let worst = COMPAT_Z
            .iter()
            .map(|&zf| {
                let z = float(prec, zf);
                scaled_residual(&[
                    next.b(&z),
                    this.b(&z),
                    neg(Float::with_val(prec, this.a(&z) * &z)),
                    potential_derivative(alpha_f, t_f, &z),
                ])
            })
            .fold(Float::with_val(prec, 0), |acc, v| if v > acc { v } else { acc });
        report.record("compatibility_poles", point, worst);
        report.record(
            "p_from_partial_sum",
            point,
            scaled_residual(&[
                Float::with_val(prec, &t * p) * 4u32,
                neg(big_h.clone()),
                r.clone(),
                Float::with_val(prec, n * (n - 1)) + Float::with_val(prec, &two_alpha * n),
            ]),
        );
    }
    report
}

/// Largest scaled residual of the second-order ODE satisfied by `P_n(z)`,
/// with `A_n`, `B_n`, `Σ_{j<n} A_j` in their `β`-only closed forms.
pub fn pn_ode_residual(table: &OrthoTable, n: usize, z_samples: &[f64]) -> Result<Float> {
    let prec = table.prec();
    let params = table.params();
    Error::check_index(n, 0, table.n_max())?;
    let coeffs = LadderCoeffs::from_table(table, n);
    let mut worst = Float::with_val(prec, 0);
    for &zf in z_samples {
        if !zf.is_finite() || zf.abs() == 1.0 {
            return Err(Error::domain(format!("sample z = {zf} hits a pole")));
        }
        let z = float(prec, zf);
        let [p, dp, ddp] = eval_monic_derivs(table, n, &z)?;
        let a = coeffs.a(&z);
        let a_ratio = coeffs.a_prime(&z) / &a;
        let first_coeff = potential_derivative(params.alpha(), params.t(), &z) + &a_ratio;
        let zero_coeff = coeffs.b_prime(&z) - coeffs.b(&z) * &a_ratio + sum_a_closed(table, n, &z);
        let residual = scaled_residual(&[ddp, neg(first_coeff * dp), zero_coeff * p]);
        if residual > worst {
            worst = residual;
        }
    }
    Ok(worst)
}

/// `|closed - direct| / |direct|` for `Σ_{j<n} A_j(z)`.
pub fn sum_a_consistency(table: &OrthoTable, aux: &AuxTable, n: usize, z: f64) -> Float {
    let prec = table.prec();
    let zf = float(prec, z);
    let mut direct = Float::with_val(prec, 0);
    for j in 0..n {
        direct += LadderCoeffs::from_aux(aux, j).a(&zf);
    }
    let closed = sum_a_closed(table, n, &zf);
    scaled_residual(&[closed, neg(direct)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{build_aux_by_integral, build_aux_table};
    use crate::orthocore::build_ortho_table;
    use crate::{PrecisionContext, WeightParams};

    fn table(alpha: f64, t: f64, n_max: usize) -> OrthoTable {
        let params = WeightParams::new(alpha, t).unwrap();
        build_ortho_table(params, n_max, &PrecisionContext::for_table(n_max, 25)).unwrap()
    }

    #[test]
    fn identities_hold_on_algebraic_aux() {
        let tb = table(1.5, 2.0, 40);
        let report = identity_residuals(&tb, &build_aux_table(&tb));
        for name in IDENTITY_NAMES {
            let e = report.get(name).unwrap();
            assert!(e.max_f64() <= 1e-25, "{name}: {}", e.max_f64());
        }
    }

    #[test]
    fn identities_hold_on_integral_aux() {
        let tb = table(0.5, 1.0, 12);
        let report = identity_residuals(&tb, &build_aux_by_integral(&tb, 1e-28).unwrap());
        assert!(report.passes(1e-24), "{}", report.to_json());
    }

    #[test]
    fn corrupted_beta_is_detected() {
        let mut tb = table(0.5, 1.0, 12);
        let aux = build_aux_table(&tb);
        tb.perturb_beta(5, 1e-6);
        let report = identity_residuals(&tb, &aux);
        assert!(report.worst() > 1e-8);
    }

    #[test]
    fn polynomial_ode() {
        for (alpha, t) in [(0.5, 1.0), (1.0, 0.0), (-0.5, 3.0)] {
            let tb = table(alpha, t, 10);
            for n in 0..=10 {
                let res = pn_ode_residual(&tb, n, &[0.1, 0.3, 0.7]).unwrap();
                assert!(res.to_f64() < 1e-24, "alpha={alpha} t={t} n={n}: {res}");
            }
        }
    }

    #[test]
    fn ode_refuses_pole() {
        let tb = table(0.5, 1.0, 4);
        assert!(pn_ode_residual(&tb, 2, &[1.0]).is_err());
    }

    #[test]
    fn closed_partial_sum() {
        let tb = table(0.5, 5.0, 10);
        let aux = build_aux_table(&tb);
        for n in 1..=10 {
            assert!(sum_a_consistency(&tb, &aux, n, 0.6).to_f64() < 1e-26);
        }
    }
}
