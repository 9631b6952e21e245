use proptest::prelude::*;
use rug::Float;

use semijacobi::asymptotics::{dn0_forms, order_fit, shift_consistency};
use semijacobi::ladder::{build_aux_table, identity_residuals};
use semijacobi::mp::{mixed_diff, rel_diff};
use semijacobi::orthocore::{build_ortho_table, build_ortho_table_with, FactorPath};
use semijacobi::recur::{btd_residual, hnd_residual, pnd_residual};
use semijacobi::{PrecisionContext, WeightParams};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn beta_series_is_the_shifted_p_series(alpha in -0.95f64..4.0, t in -4.0f64..6.0) {
        let params = WeightParams::new(alpha, t).unwrap();
        prop_assert!(shift_consistency(params, 200) < 1e-45);
    }

    #[test]
    fn order_fit_recovers_power_laws(scale in 1e-3f64..1e3, order in 1.0f64..9.0, n0 in 4usize..40) {
        let points: Vec<(f64, f64)> = (0..5)
            .map(|k| {
                let n = (n0 << k) as f64;
                (n, scale * n.powf(-order))
            })
            .collect();
        let fit = order_fit(&points).unwrap();
        prop_assert!((fit.slope + order).abs() < 1e-9);
        prop_assert!((fit.intercept - scale.ln()).abs() < 1e-7);
    }

    #[test]
    fn beta_at_t_zero_is_rational(alpha in -0.9f64..3.0) {
        let params = WeightParams::new(alpha, 0.0).unwrap();
        let table = build_ortho_table(params, 12, &PrecisionContext::for_table(12, 25)).unwrap();
        let prec = table.prec();
        for n in 2..=12usize {
            let nf = n as f64;
            let a2 = Float::with_val(prec, alpha) * 2u32;
            let num = Float::with_val(prec, &a2 + nf) * nf;
            let den = Float::with_val(prec, &a2 + (2.0 * nf - 1.0)) * Float::with_val(prec, &a2 + (2.0 * nf + 1.0));
            prop_assert!(rel_diff(table.beta(n), &(num / den)) < 1e-25, "n={}", n);
        }
    }

    #[test]
    fn log_hankel_is_the_sum_of_log_norms(alpha in -0.9f64..3.0, t in -3.0f64..8.0) {
        let params = WeightParams::new(alpha, t).unwrap();
        let table = build_ortho_table(params, 10, &PrecisionContext::for_table(10, 25)).unwrap();
        let mut sum = Float::with_val(table.prec(), 0);
        for n in 0..=10 {
            prop_assert!(*table.h(n) > 0);
            if n > 0 {
                prop_assert!(*table.beta(n) > 0);
            }
            prop_assert!(mixed_diff(table.log_d(n), &sum) < 1e-28);
            sum += Float::with_val(table.prec(), table.h(n).ln_ref());
        }
    }

    #[test]
    fn factor_paths_agree(alpha in -0.5f64..2.0, t in -2.0f64..5.0) {
        let params = WeightParams::new(alpha, t).unwrap();
        let ctx = PrecisionContext::for_table(16, 25);
        let full = build_ortho_table_with(params, 16, &ctx, FactorPath::Full).unwrap();
        let split = build_ortho_table_with(params, 16, &ctx, FactorPath::EvenOdd).unwrap();
        for n in 0..=16 {
            prop_assert!(rel_diff(full.h(n), split.h(n)) < 1e-25);
            prop_assert!(mixed_diff(full.p(n), split.p(n)) < 1e-25);
        }
    }

    #[test]
    fn difference_equations_hold(alpha in 0.05f64..3.0, t in 0.05f64..6.0) {
        let params = WeightParams::new(alpha, t).unwrap();
        let table = build_ortho_table(params, 16, &PrecisionContext::for_table(16, 25)).unwrap();
        let aux = build_aux_table(&table);
        for n in 1..=15 {
            prop_assert!(btd_residual(&table, n).unwrap().to_f64() < 1e-22);
            prop_assert!(pnd_residual(&table, n).unwrap().to_f64() < 1e-22);
            prop_assert!(hnd_residual(&aux, n).unwrap().to_f64() < 1e-22);
        }
        prop_assert!(identity_residuals(&table, &aux).passes(1e-22));
    }

    #[test]
    fn hankel_closed_forms_agree(alpha in -0.9f64..3.0, n in 1usize..60) {
        let ctx = PrecisionContext::new(128, 25).unwrap();
        let (product, barnes) = dn0_forms(alpha, n, &ctx).unwrap();
        prop_assert!(mixed_diff(&product, &barnes) < 1e-25);
    }
}
