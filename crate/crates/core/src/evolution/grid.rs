use std::collections::HashMap;
use std::io::Write;

use rug::Float;

use crate::error::{Error, Result};
use crate::ladder::{build_aux_table, AuxTable};
use crate::mp::{float, format_float};
use crate::orthocore::{build_ortho_table_with, FactorPath, OrthoTable};
use crate::precision::PrecisionContext;
use crate::specfun::WeightParams;

/// Values of one quantity on a uniform `t` grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub alpha: f64,
    pub n: usize,
    t: Vec<f64>,
    values: Vec<Float>,
}

impl GridFunction {
    /// Fails unless `t` is strictly increasing with spacing uniform to 1 part in 10¹².
    pub fn new(alpha: f64, n: usize, t: Vec<f64>, values: Vec<Float>) -> Result<Self> {
        if t.len() != values.len() {
            return Err(Error::Grid("t and values differ in length".into()));
        }
        if t.len() >= 2 {
            let h = t[1] - t[0];
            for w in t.windows(2) {
                let step = w[1] - w[0];
                if !(step > 0.0) {
                    return Err(Error::Grid("t grid must be strictly increasing".into()));
                }
                if ((step - h) / h).abs() > 1e-12 {
                    return Err(Error::Grid(format!("non-uniform spacing near t = {}", w[0])));
                }
            }
        }
        Ok(Self { alpha, n, t, values })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn write_csv<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let err = |e: csv::Error| Error::InvalidInput(format!("write failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"]).map_err(err)?;
        for (t, v) in self.t.iter().zip(&self.values) {
            w.write_record([t.to_string(), format_float(v, digits)]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
        Ok(())
    }
}

/// Stencil centres and the finite-difference step.
///
/// Every abscissa `centre + k·step`, `|k| ≤ 4`, must be exact in `f64` so
/// the stencil is truly uniform; dyadic centres and power-of-two steps are.
#[derive(Debug, Clone, PartialEq)]
pub struct FdGrid {
    centres: Vec<f64>,
    step: f64,
}

impl FdGrid {
    pub fn new(centres: Vec<f64>, step: f64) -> Result<Self> {
        if centres.is_empty() || !(step > 0.0) {
            return Err(Error::Grid("need at least one centre and a positive step".into()));
        }
        for &c in &centres {
            if c - 4.0 * step <= 0.0 {
                return Err(Error::Grid(format!(
                    "stencil around t = {c} reaches the singular point t = 0"
                )));
            }
            for k in -4i32..=4 {
                let kh = f64::from(k) * step;
                if (c + kh) - c != kh {
                    return Err(Error::Grid(format!(
                        "t = {c} with step {step} is not exactly representable"
                    )));
                }
            }
        }
        Ok(Self { centres, step })
    }

    /// `lo, lo + spacing, …, hi`.
    pub fn uniform(lo: f64, hi: f64, spacing: f64, step: f64) -> Result<Self> {
        if !(hi >= lo) || !(spacing > 0.0) {
            return Err(Error::Grid(format!("bad interval [{lo}, {hi}]")));
        }
        let count = ((hi - lo) / spacing).round() as usize;
        let centres = (0..=count).map(|i| lo + i as f64 * spacing).collect();
        Self::new(centres, step)
    }

    /// `[0.5, 1.5]` in steps of `1/8`, with the step size balancing
    /// truncation against the context's precision floor.
    pub fn standard(ctx: &PrecisionContext) -> Self {
        Self::uniform(0.5, 1.5, 0.125, default_step(ctx)).expect("dyadic grid")
    }

    pub fn centres(&self) -> &[f64] {
        &self.centres
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn with_step(&self, step: f64) -> Result<Self> {
        Self::new(self.centres.clone(), step)
    }
}

/// Power of two nearest `(10^-digits)^(1/6)`, at most `1/16`.
pub fn default_step(ctx: &PrecisionContext) -> f64 {
    let ideal = 10f64.powf(-f64::from(ctx.agreement_digits()) / 6.0);
    2f64.powi(ideal.log2().round() as i32).min(1.0 / 16.0)
}

/// Pipeline tables at fixed `α` and degree, cached by `t`.
pub struct Sampler {
    alpha: f64,
    n_max: usize,
    ctx: PrecisionContext,
    cache: HashMap<u64, (OrthoTable, AuxTable)>,
}

impl Sampler {
    /// Tables cover degrees up to `n_max` (plus the two extra rows every table carries).
    pub fn new(alpha: f64, n_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        WeightParams::new(alpha, 0.0)?;
        let base = PrecisionContext::for_table(n_max, ctx.agreement_digits());
        let bits = base.mantissa_bits().max(ctx.mantissa_bits());
        Ok(Self {
            alpha,
            n_max,
            ctx: base.with_mantissa_bits(bits).with_max_doublings(ctx.max_doublings()),
            cache: HashMap::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn at(&mut self, t: f64) -> Result<&(OrthoTable, AuxTable)> {
        let key = t.to_bits();
        if !self.cache.contains_key(&key) {
            let params = WeightParams::new(self.alpha, t)?;
            let table = build_ortho_table_with(params, self.n_max, &self.ctx, FactorPath::EvenOdd)?;
            let aux = build_aux_table(&table);
            self.cache.insert(key, (table, aux));
        }
        Ok(&self.cache[&key])
    }

    /// Samples `quantity` on `t`.
    pub fn grid_function(
        &mut self,
        n: usize,
        t: Vec<f64>,
        quantity: impl Fn(&OrthoTable, &AuxTable) -> Float,
    ) -> Result<GridFunction> {
        let mut values = Vec::with_capacity(t.len());
        for &ti in &t {
            let (table, aux) = self.at(ti)?;
            values.push(quantity(table, aux));
        }
        GridFunction::new(self.alpha, n, t, values)
    }
}

/// Values and the first two `t`-derivatives of several quantities at one point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: Vec<Float>,
    pub d1: Vec<Float>,
    pub d2: Vec<Float>,
}

/// Fourth-order central differences from samples at `t0 + k·h`, `k = -2..=2`.
pub fn central_jet(samples: &[Vec<Float>; 5], h: f64) -> Jet {
    let prec = samples[2][0].prec();
    let h = float(prec, h);
    let twelve_h = Float::with_val(prec, &h * 12u32);
    let twelve_h2 = Float::with_val(prec, h.square_ref()) * 12u32;
    let count = samples[2].len();
    let mut jet = Jet {
        value: samples[2].clone(),
        d1: Vec::with_capacity(count),
        d2: Vec::with_capacity(count),
    };
    for q in 0..count {
        let [m2, m1, c, p1, p2] = [&samples[0][q], &samples[1][q], &samples[2][q], &samples[3][q], &samples[4][q]];
        let mut d1 = Float::with_val(prec, p1 - m1) * 8u32;
        d1 -= Float::with_val(prec, p2 - m2);
        jet.d1.push(d1 / &twelve_h);
        let mut d2 = Float::with_val(prec, p1 + m1) * 16u32;
        d2 -= Float::with_val(prec, p2 + m2);
        d2 -= Float::with_val(prec, c * 30u32);
        jet.d2.push(d2 / &twelve_h2);
    }
    jet
}

/// One stencil centre of an [`FdCheck`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdPoint {
    pub t: f64,
    /// Signed scaled residual with step `h`.
    pub residual: f64,
    /// The same with step `2h`.
    pub coarse_residual: f64,
    /// Richardson estimate of the truncation part of `residual`.
    pub estimate: f64,
    /// The point was skipped (singular term); residuals are zero.
    pub skipped: bool,
}

/// A differential identity checked with finite-difference derivatives.
#[derive(Debug, Clone)]
pub struct FdCheck {
    pub name: String,
    pub alpha: f64,
    pub n: usize,
    pub step: f64,
    pub points: Vec<FdPoint>,
}

impl FdCheck {
    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual.abs()).fold(0.0, f64::max)
    }

    pub fn max_estimate(&self) -> f64 {
        self.points.iter().map(|p| p.estimate).fold(0.0, f64::max)
    }

    /// Every point's residual is at most `factor` times its truncation
    /// estimate, or below `floor`.
    pub fn within_truncation(&self, factor: f64, floor: f64) -> bool {
        !self.points.iter().all(|p| p.skipped)
            && self
                .points
                .iter()
                .all(|p| p.skipped || p.residual.abs() <= floor || p.residual.abs() <= factor * p.estimate)
    }

    pub fn skipped(&self) -> usize {
        self.points.iter().filter(|p| p.skipped).count()
    }
}

/// Signed `Σ terms / max |term|`.
pub(crate) fn signed_scaled(terms: &[Float]) -> f64 {
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
        0.0
    } else {
        (sum / scale).to_f64()
    }
}

pub(crate) type Quantities<'a> = &'a dyn Fn(f64, &OrthoTable, &AuxTable) -> Vec<Float>;
/// Returns the signed terms of a residual, or `None` to skip the point.
pub(crate) type Terms<'a> = &'a dyn Fn(&Float, &Jet) -> Option<Vec<Float>>;

pub(crate) fn fd_check(
    name: &str,
    sampler: &mut Sampler,
    n: usize,
    grid: &FdGrid,
    quantities: Quantities<'_>,
    terms: Terms<'_>,
) -> Result<FdCheck> {
    let h = grid.step();
    let mut points = Vec::with_capacity(grid.centres().len());
    for &t0 in grid.centres() {
        let mut residuals = [0.0f64; 2];
        let mut skipped = false;
        for (slot, step) in [h, 2.0 * h].into_iter().enumerate() {
            let mut samples: [Vec<Float>; 5] = Default::default();
            for (i, k) in (-2i32..=2).enumerate() {
                let t = t0 + f64::from(k) * step;
                let (table, aux) = sampler.at(t)?;
                samples[i] = quantities(t, table, aux);
            }
            let prec = samples[2][0].prec();
            let jet = central_jet(&samples, step);
            match terms(&float(prec, t0), &jet) {
                Some(ts) => residuals[slot] = signed_scaled(&ts),
                None => skipped = true,
            }
        }
        points.push(if skipped {
            FdPoint {
                t: t0,
                residual: 0.0,
                coarse_residual: 0.0,
                estimate: 0.0,
                skipped: true,
            }
        } else {
            FdPoint {
                t: t0,
                residual: residuals[0],
                coarse_residual: residuals[1],
                estimate: (residuals[1] - residuals[0]).abs() / 15.0,
                skipped: false,
            }
        });
    }
    Ok(FdCheck {
        name: name.to_string(),
        alpha: sampler.alpha(),
        n,
        step: h,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_of_a_quartic_is_exact() {
        // f = t⁴: fourth-order stencils are exact through degree 4 (d1) and 5 (d2).
        let prec = 200;
        let (t0, h) = (0.75, 0.125);
        let samples: [Vec<Float>; 5] = std::array::from_fn(|i| {
            let t = t0 + (i as f64 - 2.0) * h;
            vec![Float::with_val(prec, t).square().square()]
        });
        let jet = central_jet(&samples, h);
        assert!((jet.d1[0].to_f64() - 4.0 * t0.powi(3)).abs() < 1e-40);
        assert!((jet.d2[0].to_f64() - 12.0 * t0.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(FdGrid::new(vec![0.05], 1.0 / 64.0).is_err());
        assert!(FdGrid::new(vec![0.5], 1.0 / 16.0).is_ok());
        assert!(FdGrid::new(vec![0.1], 0.2).is_err());
        let g = FdGrid::standard(&PrecisionContext::new(128, 25).unwrap());
        assert_eq!(g.centres().len(), 9);
        assert_eq!(g.step(), 2f64.powi(-14));
    }

    #[test]
    fn grid_function_spacing() {
        let v = |x: f64| Float::with_val(64, x);
        assert!(GridFunction::new(0.5, 1, vec![0.0, 0.5, 1.0], vec![v(0.0), v(1.0), v(2.0)]).is_ok());
        assert!(GridFunction::new(0.5, 1, vec![0.0, 0.5, 1.1], vec![v(0.0), v(1.0), v(2.0)]).is_err());
        assert!(GridFunction::new(0.5, 1, vec![0.0, 0.0], vec![v(0.0), v(1.0)]).is_err());
    }
}
