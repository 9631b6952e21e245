use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::mp::float;
use crate::orthocore::{
    eval_monic_all, integrate_interval_vec, quad_inner_product, ExtraFactor, OrthoTable,
    QuadratureRule,
};
use crate::specfun::WeightParams;

/// How an entry of an [`AuxTable`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// From `β_n` through `r_n = n - 2tβ_n` and `R_n = 2n+1+2α - 2t(β_n+β_{n+1})`.
    Algebraic,
    /// From the defining integrals against `w/(1-y²)`.
    Integral,
}

/// `R_n`, `r_n` for `n = 0..=n_max` and `H_n = Σ_{j<n} R_j` for `n = 0..=n_max+1`.
#[derive(Debug, Clone)]
pub struct AuxTable {
    params: WeightParams,
    n_max: usize,
    big_r: Vec<Float>,
    small_r: Vec<Float>,
    big_h: Vec<Float>,
    provenance: Vec<Provenance>,
}

impl AuxTable {
    fn assemble(
        params: WeightParams,
        big_r: Vec<Float>,
        small_r: Vec<Float>,
        provenance: Vec<Provenance>,
    ) -> Self {
        let prec = big_r[0].prec();
        let mut big_h = Vec::with_capacity(big_r.len() + 1);
        big_h.push(Float::with_val(prec, 0));
        for (j, r) in big_r.iter().enumerate() {
            let next = Float::with_val(prec, &big_h[j] + r);
            big_h.push(next);
        }
        Self {
            params,
            n_max: big_r.len() - 1,
            big_r,
            small_r,
            big_h,
            provenance,
        }
    }

    pub fn params(&self) -> WeightParams {
        self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Pole coefficient of `A_n` at `z = ±1`.
    pub fn big_r(&self, n: usize) -> &Float {
        &self.big_r[n]
    }

    /// Pole coefficient of `B_n / z` at `z = ±1`.
    pub fn small_r(&self, n: usize) -> &Float {
        &self.small_r[n]
    }

    /// `H_n = Σ_{j<n} R_j`.
    pub fn big_h(&self, n: usize) -> &Float {
        &self.big_h[n]
    }

    pub fn provenance(&self, n: usize) -> Provenance {
        self.provenance[n]
    }

    pub fn prec(&self) -> u32 {
        self.big_r[0].prec()
    }
}

pub fn build_aux_table(table: &OrthoTable) -> AuxTable {
    let prec = table.prec();
    let params = table.params();
    let two_t = float(prec, 2.0 * params.t());
    let alpha = float(prec, params.alpha());
    let mut big_r = Vec::with_capacity(table.n_max() + 1);
    let mut small_r = Vec::with_capacity(table.n_max() + 1);
    let mut tmp = Float::new(prec);
    for n in 0..=table.n_max() {
        let mut r = Float::with_val(prec, n);
        tmp.assign(&two_t * table.beta(n));
        r -= &tmp;
        small_r.push(r);

        let mut cap = Float::with_val(prec, &alpha * 2u32) + (2 * n + 1) as u32;
        tmp.assign(table.beta(n) + table.beta(n + 1));
        tmp *= &two_t;
        cap -= &tmp;
        big_r.push(cap);
    }
    let provenance = vec![Provenance::Algebraic; big_r.len()];
    AuxTable::assemble(params, big_r, small_r, provenance)
}

fn require_positive_alpha(params: WeightParams) -> Result<()> {
    if params.alpha() <= 0.0 {
        return Err(Error::domain(format!(
            "integral auxiliary quantities need alpha > 0, got {}",
            params.alpha()
        )));
    }
    Ok(())
}

/// `(R_n, r_n)` from the integrals with a fixed rule.
pub fn aux_by_integral(table: &OrthoTable, rule: &QuadratureRule, n: usize) -> Result<(Float, Float)> {
    let params = table.params();
    require_positive_alpha(params)?;
    let prec = rule.prec();
    let two_alpha = float(prec, 2.0 * params.alpha());
    let diag = quad_inner_product(table, n, n, ExtraFactor::InvOneMinusY2, rule)?;
    let big_r = Float::with_val(prec, &two_alpha * &diag) / table.h(n);
    let small_r = if n == 0 {
        Float::with_val(prec, 0)
    } else {
        let off = quad_inner_product(table, n, n - 1, ExtraFactor::YOverOneMinusY2, rule)?;
        Float::with_val(prec, &two_alpha * &off) / table.h(n - 1)
    };
    Ok((big_r, small_r))
}

/// Every `R_n`, `r_n` from one adaptive quadrature pass; the step is halved
/// until each integral is stable to `tol` relative to its absolute mass.
pub fn build_aux_by_integral(table: &OrthoTable, tol: f64) -> Result<AuxTable> {
    let params = table.params();
    require_positive_alpha(params)?;
    let prec = table.prec();
    let top = table.n_max();
    let (alpha, t) = (params.alpha(), params.t());
    let mut tmp = Float::new(prec);
    let sums = integrate_interval_vec(-1.0, 1.0, prec, alpha - 1.0, tol, |node| {
        let values = eval_monic_all(table, top, &node.x)?;
        let w = crate::orthocore::weight_at_node(node, alpha, t, 1, prec);
        let mut out = Vec::with_capacity(2 * top + 1);
        for v in &values {
            tmp.assign(v * v);
            out.push(Float::with_val(prec, &tmp * &w));
        }
        let yw = Float::with_val(prec, &w * &node.x);
        for k in 1..=top {
            tmp.assign(&values[k] * &values[k - 1]);
            out.push(Float::with_val(prec, &tmp * &yw));
        }
        Ok(out)
    })?;
    let two_alpha = float(prec, 2.0 * alpha);
    let mut big_r = Vec::with_capacity(top + 1);
    let mut small_r = Vec::with_capacity(top + 1);
    for n in 0..=top {
        big_r.push(Float::with_val(prec, &two_alpha * &sums[n]) / table.h(n));
        small_r.push(if n == 0 {
            Float::with_val(prec, 0)
        } else {
            Float::with_val(prec, &two_alpha * &sums[top + n]) / table.h(n - 1)
        });
    }
    let provenance = vec![Provenance::Integral; big_r.len()];
    Ok(AuxTable::assemble(params, big_r, small_r, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::rel_diff;
    use crate::orthocore::build_ortho_table;
    use crate::specfun::kummer_phi_prec;
    use crate::PrecisionContext;

    fn table(alpha: f64, t: f64, n_max: usize) -> OrthoTable {
        let params = WeightParams::new(alpha, t).unwrap();
        build_ortho_table(params, n_max, &PrecisionContext::for_table(n_max, 30)).unwrap()
    }

    #[test]
    fn t_zero_values() {
        let tb = table(0.7, 0.0, 12);
        let aux = build_aux_table(&tb);
        for n in 0..=12 {
            let expected = Float::with_val(256, 2 * n + 1) + Float::with_val(256, 0.7) * 2u32;
            assert!(rel_diff(aux.big_r(n), &expected) < 1e-30);
            assert_eq!(*aux.small_r(n), n as f64);
            assert_eq!(aux.provenance(n), Provenance::Algebraic);
        }
    }

    #[test]
    fn first_partial_sum_is_kummer_ratio() {
        let alpha = 0.8;
        let tb = table(alpha, 1.3, 6);
        let aux = build_aux_table(&tb);
        let prec = tb.prec();
        let a = Float::with_val(prec, alpha);
        let phi = |b: Float| {
            kummer_phi_prec(&Float::with_val(prec, 0.5), &b, &Float::with_val(prec, -1.3), prec).unwrap()
        };
        let expected = Float::with_val(prec, &a * 2u32) + 1u32;
        let expected = expected * phi(Float::with_val(prec, &a + 0.5)) / phi(Float::with_val(prec, &a + 1.5));
        assert!(rel_diff(aux.big_h(1), &expected) < 1e-28);
    }

    #[test]
    fn integral_route_at_t_zero() {
        let tb = table(1.0, 0.0, 4);
        let rule = QuadratureRule::tanh_sinh(7, tb.prec(), 0.0).unwrap();
        let (big_r, _) = aux_by_integral(&tb, &rule, 2).unwrap();
        assert!((big_r - 7u32).abs().to_f64() < 1e-25);
        let (_, small_r) = aux_by_integral(&tb, &rule, 3).unwrap();
        assert!((small_r - 3u32).abs().to_f64() < 1e-25);
    }

    #[test]
    fn integral_matches_algebraic() {
        let tb = table(0.5, 1.0, 8);
        let alg = build_aux_table(&tb);
        let int = build_aux_by_integral(&tb, 1e-30).unwrap();
        for n in 0..=8 {
            assert!(rel_diff(alg.big_r(n), int.big_r(n)) < 1e-25, "R n={n}");
            assert!(crate::mp::mixed_diff(alg.small_r(n), int.small_r(n)) < 1e-25, "r n={n}");
            assert_eq!(int.provenance(n), Provenance::Integral);
        }
        let rule = QuadratureRule::tanh_sinh(8, tb.prec(), -0.5).unwrap();
        let (big_r, small_r) = aux_by_integral(&tb, &rule, 4).unwrap();
        assert!(rel_diff(&big_r, alg.big_r(4)) < 1e-25);
        assert!(rel_diff(&small_r, alg.small_r(4)) < 1e-25);
    }

    #[test]
    fn integral_refused_for_nonpositive_alpha() {
        let tb = table(0.0, 1.0, 3);
        assert!(matches!(build_aux_by_integral(&tb, 1e-20), Err(Error::Domain(_))));
    }
}
