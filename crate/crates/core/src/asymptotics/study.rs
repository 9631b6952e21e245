use std::io::Write;

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use super::hankel::{dn_asymptotic, hankel_series};
use super::series::{beta_series, p_series, AsymSeries, Regime};
use crate::error::{Error, Result};
use crate::mp::format_float;
use crate::orthocore::OrthoTable;

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// Points that entered the fit.
    pub used: usize,
    /// Indices of points dropped for a nonpositive or non-finite error.
    pub dropped: Vec<usize>,
}

/// Least-squares slope of `ln|error|` against `ln n`.
///
/// Needs at least four points; nonpositive errors are dropped with a
/// warning on stderr, and at least two must survive.
pub fn order_fit(points: &[(f64, f64)]) -> Result<OrderFit> {
    if points.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "order fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    let mut dropped = Vec::new();
    let mut logs = Vec::new();
    for (i, &(n, e)) in points.iter().enumerate() {
        if e > 0.0 && e.is_finite() && n > 0.0 {
            logs.push((n.ln(), e.ln()));
        } else {
            eprintln!("warning: order fit drops n = {n} (error {e:e})");
            dropped.push(i);
        }
    }
    let mut fit = fit_logs(&logs)?;
    fit.dropped = dropped;
    Ok(fit)
}

/// Least squares on `(ln n, ln|error|)` pairs.
fn fit_logs(xy: &[(f64, f64)]) -> Result<OrderFit> {
    if xy.len() < 2 {
        return Err(Error::InvalidInput(
            "fewer than two usable points for the order fit".into(),
        ));
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("order fit needs distinct n".into()));
    }
    let slope = sxy / sxx;
    Ok(OrderFit {
        slope,
        intercept: my - slope * mx,
        used: xy.len(),
        dropped: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Beta,
    P,
    Hankel,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Beta => "beta",
            Quantity::P => "p",
            Quantity::Hankel => "hankel",
        }
    }

    /// Exponent the truncation error should decay with.
    pub fn expected_slope(&self) -> f64 {
        match self {
            Quantity::Beta => -7.0,
            Quantity::P => -6.0,
            Quantity::Hankel => -4.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyRow {
    pub n: usize,
    pub oracle: Float,
    pub series: Float,
    pub abs_error: Float,
    /// `ln |error|`, kept separately because the error may underflow `f64`.
    pub ln_error: Option<f64>,
    /// Slope against the previous row.
    pub running_slope: Option<f64>,
    pub regime: Regime,
    /// The error is below what the table resolves.
    pub at_floor: bool,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub quantity: Quantity,
    pub alpha: f64,
    pub t: f64,
    pub rows: Vec<StudyRow>,
    /// Fit over rows inside the asymptotic regime and above the floor.
    pub fit: Option<OrderFit>,
    pub fit_error: Option<String>,
    pub exponential_regime: bool,
}

impl ConvergenceStudy {
    /// CSV: `n, oracle, series, abs_error, running_slope`.
    pub fn write_csv<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let err = |e: csv::Error| Error::InvalidInput(format!("write failed: {e}"));
        let mut writer = csv::Writer::from_writer(out);
        writer
            .write_record(["n", "oracle", "series", "abs_error", "running_slope"])
            .map_err(err)?;
        for row in &self.rows {
            writer
                .write_record([
                    row.n.to_string(),
                    format_float(&row.oracle, digits),
                    format_float(&row.series, digits),
                    format_float(&row.abs_error, 6),
                    row.running_slope.map(|s| format!("{s:.4}")).unwrap_or_default(),
                ])
                .map_err(err)?;
        }
        writer
            .flush()
            .map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
        Ok(())
    }
}

/// Compares the table against the expansion of `quantity` at each `n`.
///
/// One table of size `max(ns)` serves every row.
pub fn convergence_study(quantity: Quantity, table: &OrthoTable, ns: &[usize]) -> Result<ConvergenceStudy> {
    let params = table.params();
    let prec = table.prec();
    let top = match quantity {
        Quantity::P => table.last_index(),
        _ => table.n_max(),
    };
    for &n in ns {
        Error::check_index(n, 1, top)?;
    }
    let series: AsymSeries = match quantity {
        Quantity::Beta => beta_series(params, prec),
        Quantity::P => p_series(params, prec),
        Quantity::Hankel => hankel_series(params, prec),
    };
    let digits = table.meta().agreed_digits.floor() as i32;
    let mut rows: Vec<StudyRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let (oracle, estimate) = match quantity {
            Quantity::Beta => (table.beta(n).clone(), series.eval(n)),
            Quantity::P => (table.p(n).clone(), series.eval(n)),
            Quantity::Hankel => (table.log_d(n).clone(), dn_asymptotic(params, n, prec)?),
        };
        let abs_error = Float::with_val(prec, &oracle - &estimate).abs();
        let floor = Float::with_val(prec, oracle.abs_ref()).max(&Float::with_val(prec, 1))
            * Float::with_val(prec, 10).pow(-digits);
        let ln_error = (!abs_error.is_zero()).then(|| Float::with_val(prec, abs_error.ln_ref()).to_f64());
        let running_slope = match (rows.last(), ln_error) {
            (Some(prev), Some(e1)) => prev.ln_error.map(|e0| (e1 - e0) / (n as f64 / prev.n as f64).ln()),
            _ => None,
        };
        rows.push(StudyRow {
            n,
            at_floor: abs_error <= floor,
            oracle,
            series: estimate,
            abs_error,
            ln_error,
            running_slope,
            regime: series.regime(n),
        });
    }
    let exponential_regime = rows.iter().all(|r| r.regime == Regime::Exponential);
    let usable: Vec<&StudyRow> = rows
        .iter()
        .filter(|r| r.regime != Regime::Outside && !r.at_floor)
        .collect();
    let points: Vec<(f64, f64)> = usable
        .iter()
        .filter_map(|r| r.ln_error.map(|e| ((r.n as f64).ln(), e)))
        .collect();
    let fitted = if usable.len() < 4 {
        Err(Error::InvalidInput(format!(
            "order fit needs at least 4 points, got {}",
            usable.len()
        )))
    } else {
        fit_logs(&points)
    };
    let (fit, fit_error) = match fitted {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ConvergenceStudy {
        quantity,
        alpha: params.alpha(),
        t: params.t(),
        rows,
        fit,
        fit_error,
        exponential_regime,
    })
}

/// `n_min, 2 n_min, 4 n_min, …` up to `n_max`.
pub fn doubling_ladder(n_min: usize, n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = n_min.max(1);
    while n <= n_max {
        out.push(n);
        n *= 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthocore::{build_ortho_table_with, FactorPath};
    use crate::precision::PrecisionContext;
    use crate::specfun::WeightParams;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n.powi(-7)))
            .collect();
        let fit = order_fit(&pts).unwrap();
        assert!((fit.slope + 7.0).abs() < 1e-6);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn drops_nonpositive_points() {
        let pts = [(8.0, 1e-3), (16.0, 0.0), (32.0, 1e-3 / 16.0), (64.0, -1.0)];
        let fit = order_fit(&pts).unwrap();
        assert_eq!(fit.dropped, vec![1, 3]);
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!(order_fit(&pts[..3]).is_err());
        assert!(order_fit(&[(8.0, 0.0), (16.0, 0.0), (32.0, 0.0), (64.0, 1.0)]).is_err());
    }

    #[test]
    fn ladder() {
        assert_eq!(doubling_ladder(64, 512), vec![64, 128, 256, 512]);
        assert_eq!(doubling_ladder(5, 30), vec![5, 10, 20]);
    }

    #[test]
    fn beta_study_at_moderate_n() {
        let params = WeightParams::new(0.0, 1.0).unwrap();
        let table = build_ortho_table_with(params, 64, &PrecisionContext::for_table(64, 25), FactorPath::EvenOdd).unwrap();
        let study = convergence_study(Quantity::Beta, &table, &[8, 16, 32, 64]).unwrap();
        let fit = study.fit.as_ref().unwrap();
        assert!((fit.slope + 7.0).abs() < 0.6, "slope {}", fit.slope);
        assert!(!study.exponential_regime);
        let mut buf = Vec::new();
        study.write_csv(&mut buf, 30).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("n,oracle,series,abs_error,running_slope"));
    }

    #[test]
    fn half_alpha_is_exponential() {
        let params = WeightParams::new(0.5, 1.0).unwrap();
        let table = build_ortho_table_with(params, 64, &PrecisionContext::for_table(64, 25), FactorPath::EvenOdd).unwrap();
        let study = convergence_study(Quantity::P, &table, &[8, 16, 32, 64]).unwrap();
        assert!(study.exponential_regime);
        assert!(study.rows.last().unwrap().abs_error.to_f64() < 1e-15);
    }

    #[test]
    fn rejects_rows_beyond_table() {
        let params = WeightParams::new(0.0, 1.0).unwrap();
        let table = build_ortho_table_with(params, 10, &PrecisionContext::for_table(10, 25), FactorPath::EvenOdd).unwrap();
        assert!(convergence_study(Quantity::Hankel, &table, &[4, 8, 12]).is_err());
    }
}
