use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};

use super::poly::eval_monic_all;
use super::table::OrthoTable;
use crate::error::{Error, Result};

const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 14;

/// A tanh-sinh node mapped onto `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct Node {
    pub x: Float,
    /// `x - lo`, accurate near the lower endpoint.
    pub lo_gap: Float,
    /// `hi - x`, accurate near the upper endpoint.
    pub hi_gap: Float,
    /// Includes the step size and the interval half-width.
    pub weight: Float,
}

impl Node {
    /// `(x - lo)(hi - x)`; equals `1 - x²` on `[-1, 1]`.
    pub fn gap_product(&self) -> Float {
        Float::with_val(self.x.prec(), &self.lo_gap * &self.hi_gap)
    }
}

/// Weight multiplying `P_m P_n w` in [`quad_inner_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtraFactor {
    One,
    /// `1 / (1 - y²)`
    InvOneMinusY2,
    /// `y / (1 - y²)`
    YOverOneMinusY2,
}

/// Tanh-sinh rule on `[-1, 1]` with step `2^-level`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    level: u32,
    prec: u32,
    nodes: Vec<Node>,
}

impl QuadratureRule {
    /// Nodes are kept while `(1 - x²)^endpoint_exponent` times the weight stays
    /// above `2^-prec`.
    pub fn tanh_sinh(level: u32, prec: u32, endpoint_exponent: f64) -> Result<Self> {
        let s_max = truncation_point(prec, endpoint_exponent)?;
        let layout = Layout::new(-1.0, 1.0, prec, s_max)?;
        let count = (s_max * f64::from(1u32 << level)).floor() as i64;
        let mut nodes = Vec::with_capacity(2 * count as usize + 1);
        for j in -count..=count {
            layout.push_nodes(j, level, &mut nodes);
        }
        Ok(Self { level, prec, nodes })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn integrate(&self, mut f: impl FnMut(&Node) -> Result<Float>) -> Result<Float> {
        let mut sum = Float::with_val(self.prec, 0);
        for node in &self.nodes {
            sum += f(node)? * &node.weight;
        }
        Ok(sum)
    }
}

fn truncation_point(prec: u32, endpoint_exponent: f64) -> Result<f64> {
    let decay = 1.0 + endpoint_exponent;
    if !(decay > 0.0) {
        return Err(Error::Integration(format!(
            "endpoint exponent {endpoint_exponent} is not integrable"
        )));
    }
    let target = -(f64::from(prec) + 20.0) * std::f64::consts::LN_2;
    let mut s: f64 = 0.0;
    while s < 12.0 {
        let u = std::f64::consts::FRAC_PI_2 * s.sinh();
        let log_mag = s.cosh().ln() + decay * (4f64.ln() - 2.0 * u);
        if log_mag < target {
            return Ok(s);
        }
        s += 1.0 / 64.0;
    }
    Ok(s)
}

struct Layout {
    wp: u32,
    centre: Float,
    half: Float,
    half_pi: Float,
    s_max: f64,
}

impl Layout {
    fn new(lo: f64, hi: f64, prec: u32, s_max: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Integration(format!("bad interval [{lo}, {hi}]")));
        }
        let wp = prec + 16;
        let lo_f = Float::with_val(wp, lo);
        let hi_f = Float::with_val(wp, hi);
        Ok(Self {
            wp,
            centre: Float::with_val(wp, &lo_f + &hi_f) / 2u32,
            half: Float::with_val(wp, &hi_f - &lo_f) / 2u32,
            half_pi: Float::with_val(wp, Constant::Pi) / 2u32,
            s_max,
        })
    }

    /// Node(s) at abscissa `s = j 2^-level`: one for `j = 0`, otherwise none
    /// (the caller visits `±j` separately).
    fn push_nodes(&self, j: i64, level: u32, out: &mut Vec<Node>) {
        let wp = self.wp;
        let step = Float::with_val(wp, Float::i_exp(1, -(level as i32)));
        let s = Float::with_val(wp, j.unsigned_abs()) * &step;
        if s.to_f64() > self.s_max {
            return;
        }
        let u = Float::with_val(wp, s.sinh_ref()) * &self.half_pi;
        let big = Float::with_val(wp, &u * 2u32).exp();
        let denom = Float::with_val(wp, &big + 1u32);
        // For s ≥ 0: 1 - x = 2/(E+1), 1 + x = 2E/(E+1).
        let near = Float::with_val(wp, 2u32) / &denom;
        let far = Float::with_val(wp, &big * 2u32) / &denom;
        let weight = Float::with_val(wp, s.cosh_ref()) * &self.half_pi * &step * 4u32 * &big
            / Float::with_val(wp, denom.square_ref())
            * &self.half;
        let (lo_unit, hi_unit) = if j >= 0 { (far, near) } else { (near, far) };
        let lo_gap = Float::with_val(wp, &lo_unit * &self.half);
        let hi_gap = Float::with_val(wp, &hi_unit * &self.half);
        let x = Float::with_val(wp, &self.centre - &self.half) + &lo_gap;
        out.push(Node {
            x,
            lo_gap,
            hi_gap,
            weight,
        });
    }
}

/// Adaptive vector-valued tanh-sinh on `[lo, hi]`.
///
/// Halves the step until every component changes by at most
/// `tol · Σ|w f|` between consecutive levels.
pub fn integrate_interval_vec(
    lo: f64,
    hi: f64,
    prec: u32,
    endpoint_exponent: f64,
    tol: f64,
    mut f: impl FnMut(&Node) -> Result<Vec<Float>>,
) -> Result<Vec<Float>> {
    let s_max = truncation_point(prec, endpoint_exponent)?;
    let layout = Layout::new(lo, hi, prec, s_max)?;
    let mut sums: Vec<Float> = Vec::new();
    let mut abs_sums: Vec<Float> = Vec::new();
    let mut nodes = Vec::new();
    for level in 0..=MAX_LEVEL {
        let count = (s_max * f64::from(1u32 << level)).floor() as i64;
        nodes.clear();
        for j in -count..=count {
            if level == 0 || j % 2 != 0 {
                layout.push_nodes(j, level, &mut nodes);
            }
        }
        let mut fresh: Vec<Float> = Vec::new();
        let mut fresh_abs: Vec<Float> = Vec::new();
        for node in &nodes {
            let values = f(node)?;
            if fresh.is_empty() {
                fresh = vec![Float::with_val(prec, 0); values.len()];
                fresh_abs = fresh.clone();
            }
            for (k, v) in values.iter().enumerate() {
                let term = Float::with_val(prec, v * &node.weight);
                fresh_abs[k] += Float::with_val(prec, term.abs_ref());
                fresh[k] += &term;
            }
        }
        if level == 0 {
            sums = fresh;
            abs_sums = fresh_abs;
            continue;
        }
        let mut converged = level >= MIN_LEVEL;
        for k in 0..sums.len() {
            let previous = sums[k].clone();
            sums[k] /= 2u32;
            sums[k] += &fresh[k];
            abs_sums[k] /= 2u32;
            abs_sums[k] += &fresh_abs[k];
            let change = Float::with_val(prec, &sums[k] - &previous).abs();
            if change.to_f64() > tol * abs_sums[k].to_f64() {
                converged = false;
            }
        }
        if converged {
            return Ok(sums);
        }
    }
    Err(Error::Integration(format!(
        "tanh-sinh did not reach {tol:e} by level {MAX_LEVEL}"
    )))
}

/// Scalar form of [`integrate_interval_vec`].
pub fn integrate_interval(
    lo: f64,
    hi: f64,
    prec: u32,
    endpoint_exponent: f64,
    tol: f64,
    mut f: impl FnMut(&Node) -> Result<Float>,
) -> Result<Float> {
    let mut out = integrate_interval_vec(lo, hi, prec, endpoint_exponent, tol, |node| {
        Ok(vec![f(node)?])
    })?;
    Ok(out.pop().expect("one component"))
}

/// `(1 - y²)^(α - shift) e^{-t y²}` at a node of `[-1, 1]`.
pub fn weight_at_node(node: &Node, alpha: f64, t: f64, shift: u32, prec: u32) -> Float {
    let gap = node.gap_product();
    let exponent = Float::with_val(prec, alpha) - shift;
    let mut out = gap.pow(&exponent);
    let mut damp = Float::with_val(prec, node.x.square_ref());
    damp *= -t;
    out *= damp.exp();
    out
}

/// `∫ P_m P_n · factor · w dy` with a fixed rule.
pub fn quad_inner_product(
    table: &OrthoTable,
    m: usize,
    n: usize,
    factor: ExtraFactor,
    rule: &QuadratureRule,
) -> Result<Float> {
    let params = table.params();
    if factor != ExtraFactor::One && params.alpha() <= 0.0 {
        return Err(Error::domain(
            "singular inner products need alpha > 0",
        ));
    }
    let prec = rule.prec();
    let top = m.max(n);
    let mut tmp = Float::new(prec);
    rule.integrate(|node| {
        let values = eval_monic_all(table, top, &node.x)?;
        let shift = if factor == ExtraFactor::One { 0 } else { 1 };
        let mut out = weight_at_node(node, params.alpha(), params.t(), shift, prec);
        tmp.assign(&values[m] * &values[n]);
        out *= &tmp;
        if factor == ExtraFactor::YOverOneMinusY2 {
            out *= &node.x;
        }
        Ok(out)
    })
}
