use std::io::Write;

use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{float, format_float, rel_diff};
use crate::orthocore::OrthoTable;
use crate::precision::{Agree, PrecisionContext};
use crate::specfun::{kummer_phi_prec, WeightParams};

/// `β_0, …, β_{n_target}` from forward iteration.
#[derive(Debug, Clone)]
pub struct BetaIteration {
    pub params: WeightParams,
    pub beta: Vec<Float>,
    /// Running total of decimal digits cancelled when solving for each `β_{n+1}`.
    pub digits_lost: Vec<f64>,
    /// Working precision of the accepted run.
    pub bits: u32,
}

impl Agree for BetaIteration {
    fn discrepancy(&self, other: &Self) -> f64 {
        self.beta.discrepancy(&other.beta)
    }
}

/// Iterates the `β_n` recurrence, solved for `β_{n+1}`, from `β_0 = 0` and
/// the closed-form `β_1`.
pub fn btd_iterate(params: WeightParams, n_target: usize, ctx: &PrecisionContext) -> Result<BetaIteration> {
    if params.t() == 0.0 {
        return Err(Error::domain(
            "the beta recurrence is degenerate at t = 0; use the closed form",
        ));
    }
    let accepted = ctx.accept("beta iteration", |bits| iterate_at(params, n_target, bits, ctx))?;
    Ok(accepted.value)
}

fn first_beta(params: WeightParams, prec: u32) -> Result<Float> {
    let alpha = float(prec, params.alpha());
    let z = float(prec, -params.t());
    let num = kummer_phi_prec(&float(prec, 1.5), &Float::with_val(prec, &alpha + 2.5f64), &z, prec)?;
    let den = kummer_phi_prec(&float(prec, 0.5), &Float::with_val(prec, &alpha + 1.5f64), &z, prec)?;
    let scale = Float::with_val(prec, &alpha * 2u32) + 3u32;
    Ok(num / (den * scale))
}

fn iterate_at(params: WeightParams, n_target: usize, bits: u32, ctx: &PrecisionContext) -> Result<BetaIteration> {
    let budget = crate::mp::bits_to_digits(bits) - f64::from(ctx.agreement_digits());
    let singular_floor = ctx.tolerance();
    let two_t = float(bits, 2.0 * params.t());
    let two_alpha = float(bits, 2.0 * params.alpha());
    let mut beta = vec![Float::with_val(bits, 0)];
    let mut digits_lost = vec![0.0];
    if n_target >= 1 {
        beta.push(first_beta(params, bits)?);
        digits_lost.push(0.0);
    }
    let mut lost = 0.0;
    for n in 1..n_target {
        let (prev, cur) = (&beta[n - 1], &beta[n]);
        let r = Float::with_val(bits, n) - Float::with_val(bits, &two_t * cur);
        let quad = Float::with_val(bits, &r + &two_alpha) * &r;
        let factor = Float::with_val(bits, &two_alpha + (2 * n - 1) as u32)
            - Float::with_val(bits, prev + cur) * &two_t;
        let coeff = Float::with_val(bits, &factor * cur);
        let slope = Float::with_val(bits, &coeff * &two_t);
        if slope.to_f64().abs() < singular_floor {
            return Err(Error::Singular(format!(
                "coefficient of beta_{} vanishes at n = {n}",
                n + 1
            )));
        }
        let terms = [
            Float::with_val(bits, &two_alpha + (2 * n + 1) as u32),
            -Float::with_val(bits, &two_t * cur),
            -(quad / &coeff),
        ];
        let sum = Float::with_val(bits, &terms[0] + &terms[1]) + &terms[2];
        let biggest = terms
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max);
        let here = sum.to_f64().abs();
        lost += if here > 0.0 { (biggest / here).log10().max(0.0) } else { budget };
        if lost > budget {
            return Err(Error::Precision {
                what: format!("beta iteration at n = {n}"),
                bits,
                agreed_digits: (crate::mp::bits_to_digits(bits) - lost).max(0.0),
            });
        }
        beta.push(sum / &two_t);
        digits_lost.push(lost);
    }
    Ok(BetaIteration {
        params,
        beta,
        digits_lost,
        bits,
    })
}

/// CSV: `n, beta_iter, beta_oracle, abs_diff, digits_lost` for the indices
/// both sequences cover.
pub fn write_iterate_csv<W: Write>(iter: &BetaIteration, table: &OrthoTable, out: W) -> Result<()> {
    let digits = table.meta().agreement_digits as usize + 5;
    let err = |e: csv::Error| Error::InvalidInput(format!("write failed: {e}"));
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["n", "beta_iter", "beta_oracle", "abs_diff", "digits_lost"])
        .map_err(err)?;
    let top = (iter.beta.len() - 1).min(table.last_index());
    for n in 0..=top {
        let diff = Float::with_val(iter.bits, &iter.beta[n] - table.beta(n)).abs();
        writer
            .write_record([
                n.to_string(),
                format_float(&iter.beta[n], digits),
                format_float(table.beta(n), digits),
                format_float(&diff, 6),
                format!("{:.2}", iter.digits_lost[n]),
            ])
            .map_err(err)?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
    Ok(())
}

/// Largest relative gap between iterated and tabulated `β_n`, `n ≤ top`.
pub fn max_rel_gap(iter: &BetaIteration, table: &OrthoTable, top: usize) -> f64 {
    (1..=top)
        .map(|n| rel_diff(&iter.beta[n], table.beta(n)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthocore::build_ortho_table;

    #[test]
    fn matches_table() {
        let params = WeightParams::new(0.5, 1.0).unwrap();
        let ctx = PrecisionContext::new(128, 25).unwrap();
        let iter = btd_iterate(params, 20, &ctx).unwrap();
        let table = build_ortho_table(params, 20, &PrecisionContext::for_table(20, 25)).unwrap();
        assert!(max_rel_gap(&iter, &table, 20) < 1e-20);
        assert!(iter.digits_lost.windows(2).all(|w| w[1] >= w[0]));

        let mut buf = Vec::new();
        write_iterate_csv(&iter, &table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 22);
        assert!(text.starts_with("n,beta_iter,beta_oracle,abs_diff,digits_lost"));
    }

    #[test]
    fn small_t_stays_near_closed_form() {
        let params = WeightParams::new(1.0, 1e-3).unwrap();
        let iter = btd_iterate(params, 10, &PrecisionContext::new(256, 20).unwrap()).unwrap();
        for n in 1..=10 {
            let nf = n as f64;
            let closed = nf * (nf + 2.0) / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0));
            assert!((iter.beta[n].to_f64() - closed).abs() < 1e-2, "n={n}");
        }
    }

    #[test]
    fn refuses_t_zero() {
        let params = WeightParams::new(1.0, 0.0).unwrap();
        assert!(matches!(
            btd_iterate(params, 5, &PrecisionContext::new(128, 20).unwrap()),
            Err(Error::Domain(_))
        ));
    }
}
