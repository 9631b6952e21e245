use rug::Float;
use serde::Serialize;

use crate::specfun::WeightParams;

/// Where an evaluation sits relative to the asymptotic regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Asymptotic,
    /// The last retained correction exceeds 10% of the first.
    Outside,
    /// Every inverse-power coefficient vanishes; the remainder is
    /// exponentially small in `n`.
    Exponential,
}

/// `linear·n + constant + Σ_{j=1}^{J} c_j n^{-j}` with evaluated coefficients.
#[derive(Debug, Clone)]
pub struct AsymSeries {
    pub linear: Float,
    pub constant: Float,
    /// `coeffs[j-1]` multiplies `n^{-j}`.
    pub coeffs: Vec<Float>,
}

impl AsymSeries {
    pub fn prec(&self) -> u32 {
        self.constant.prec()
    }

    /// Highest inverse power retained.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `n^{-j}`; `j = 0` is the constant and `j = -1` the linear term.
    pub fn coeff(&self, j: i32) -> Option<&Float> {
        match j {
            -1 => Some(&self.linear),
            0 => Some(&self.constant),
            j if j > 0 => self.coeffs.get(j as usize - 1),
            _ => None,
        }
    }

    /// The correction terms `c_j n^{-j}`, `j = 1..=J`.
    pub fn corrections(&self, n: usize) -> Vec<Float> {
        let prec = self.prec();
        let inv = Float::with_val(prec, n).recip();
        let mut power = Float::with_val(prec, 1);
        self.coeffs
            .iter()
            .map(|c| {
                power *= &inv;
                Float::with_val(prec, c * &power)
            })
            .collect()
    }

    pub fn eval(&self, n: usize) -> Float {
        let prec = self.prec();
        let mut sum = Float::with_val(prec, &self.linear * n) + &self.constant;
        for term in self.corrections(n) {
            sum += term;
        }
        sum
    }

    /// Term-decay gate on the corrections at `n`.
    pub fn regime(&self, n: usize) -> Regime {
        let terms: Vec<Float> = self
            .corrections(n)
            .into_iter()
            .filter(|c| !c.is_zero())
            .map(Float::abs)
            .collect();
        match terms.as_slice() {
            [] => Regime::Exponential,
            [first, .., last] if last.to_f64() > 0.1 * first.to_f64() => Regime::Outside,
            _ => Regime::Asymptotic,
        }
    }
}

struct Vars {
    a: Float,
    t: Float,
    /// `1 - 4α²`
    k: Float,
}

impl Vars {
    fn new(params: WeightParams, prec: u32) -> Self {
        let a = Float::with_val(prec, params.alpha());
        let t = Float::with_val(prec, params.t());
        let k = 1 - Float::with_val(prec, a.square_ref()) * 4u32;
        Vars { a, t, k }
    }

    fn f(&self, v: f64) -> Float {
        Float::with_val(self.a.prec(), v)
    }

    /// Polynomial in `t` with coefficients listed from the highest power.
    fn poly_t(&self, coeffs: &[Float]) -> Float {
        let mut acc = self.f(0.0);
        for c in coeffs {
            acc *= &self.t;
            acc += c;
        }
        acc
    }
}

/// Large-`n` expansion of `β_n`: `a_0 = 1/4`, then `a_1 … a_6`.
pub fn beta_series(params: WeightParams, prec: u32) -> AsymSeries {
    let v = Vars::new(params, prec);
    let (a, k) = (&v.a, &v.k);
    let a2 = Float::with_val(prec, a.square_ref());
    let a4 = Float::with_val(prec, a2.square_ref());
    let c1 = v.f(0.0);
    let c2 = Float::with_val(prec, k / 16u32);
    let c3 = Float::with_val(prec, &v.t - Float::with_val(prec, a * 2u32)) * k / 16u32;
    let c4 = v.poly_t(&[
        v.f(3.0),
        Float::with_val(prec, a * -12i32),
        Float::with_val(prec, &a2 * 12u32) + 1u32,
    ]) * k
        / 64u32;
    let c5 = v.poly_t(&[
        v.f(2.0),
        Float::with_val(prec, a * -12i32),
        Float::with_val(prec, &a2 * 20u32) + 11u32,
        Float::with_val(prec, a * -4i32) * (Float::with_val(prec, &a2 * 4u32) + 1u32),
    ]) * k
        / 64u32;
    let c6 = v.poly_t(&[
        v.f(5.0),
        Float::with_val(prec, a * -40i32),
        (Float::with_val(prec, &a2 * 4u32) + 5u32) * 20u32,
        Float::with_val(prec, a * -20i32) * (Float::with_val(prec, &a2 * 4u32) + 11u32),
        Float::with_val(prec, &a4 * 80u32) + Float::with_val(prec, &a2 * 40u32) + 1u32,
    ]) * k
        / 256u32;
    AsymSeries {
        linear: v.f(0.0),
        constant: v.f(0.25),
        coeffs: vec![c1, c2, c3, c4, c5, c6],
    }
}

/// Large-`n` expansion of `p(n, t)`: `b_{-1} n + b_0 + Σ_{j=1}^{5} b_j n^{-j}`.
pub fn p_series(params: WeightParams, prec: u32) -> AsymSeries {
    let v = Vars::new(params, prec);
    let (a, k) = (&v.a, &v.k);
    let a2 = Float::with_val(prec, a.square_ref());
    // 1 - 2α
    let m: Float = 1 - Float::with_val(prec, a * 2u32);
    let m2 = Float::with_val(prec, m.square_ref());
    let b0 = (Float::with_val(prec, &v.t + 2u32) + Float::with_val(prec, a * 4u32)) / 16u32;
    let b1 = Float::with_val(prec, k / 16u32);
    let shifted = Float::with_val(prec, &v.t + &m);
    let b2 = Float::with_val(prec, k * &shifted) / 32u32;
    let b3 = Float::with_val(prec, shifted.square_ref()) * k / 64u32;
    let b4 = v.poly_t(&[
        v.f(2.0),
        Float::with_val(prec, &m * 6u32),
        Float::with_val(prec, &a2 * 20u32) - Float::with_val(prec, a * 24u32) + 15u32,
        Float::with_val(prec, &m2 * &m) * 2u32,
    ]) * k
        / 256u32;
    let b5 = v.poly_t(&[
        v.f(1.0),
        Float::with_val(prec, &m * 4u32),
        (Float::with_val(prec, &a2 * 2u32) - Float::with_val(prec, a * 3u32) + 3u32) * 8u32,
        Float::with_val(prec, &m * 2u32)
            * (Float::with_val(prec, &a2 * 4u32) - Float::with_val(prec, a * 8u32) + 11u32),
        Float::with_val(prec, m2.square_ref()),
    ]) * k
        / 256u32;
    AsymSeries {
        linear: v.f(-0.25),
        constant: b0,
        coeffs: vec![b1, b2, b3, b4, b5],
    }
}

/// Re-expands `s(n) - s(n+1)` in powers of `1/n` through `n^{-order}`.
///
/// Uses `(n+1)^{-j} = Σ_{k≥j} (-1)^{k-j} C(k-1, j-1) n^{-k}`. The
/// coefficient of `n^{-k}` only involves `c_1 … c_{k-1}`, so `order` may
/// exceed the stored length by one.
pub fn shifted_difference(series: &AsymSeries, order: usize) -> AsymSeries {
    let prec = series.prec();
    let zero = Float::with_val(prec, 0);
    let coeffs = (1..=order)
        .map(|k| {
            let mut acc = Float::with_val(prec, 0);
            for j in 1..k {
                let c = series.coeffs.get(j - 1).unwrap_or(&zero);
                let binom = Float::with_val(prec, rug::Integer::from(k - 1).binomial((j - 1) as u32));
                let term = binom * c;
                if (k - j) % 2 == 0 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        })
        .collect();
    AsymSeries {
        linear: Float::with_val(prec, 0),
        constant: Float::with_val(prec, -&series.linear),
        coeffs,
    }
}

/// Largest coefficient gap between `beta_series` and the re-expanded
/// `p(n) - p(n+1)`, through `n^{-6}`.
pub fn shift_consistency(params: WeightParams, prec: u32) -> f64 {
    let beta = beta_series(params, prec);
    let diff = shifted_difference(&p_series(params, prec), beta.order());
    (-1..=beta.order() as i32)
        .map(|j| {
            let x = beta.coeff(j).expect("within order");
            let y = diff.coeff(j).expect("within order");
            Float::with_val(prec, x - y).abs().to_f64()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREC: u32 = 200;

    fn params(alpha: f64, t: f64) -> WeightParams {
        WeightParams::new(alpha, t).unwrap()
    }

    fn close(x: &Float, y: f64) -> bool {
        (x.to_f64() - y).abs() <= 1e-15 * y.abs().max(1.0)
    }

    #[test]
    fn beta_coefficients_at_origin() {
        let s = beta_series(params(0.0, 0.0), PREC);
        assert_eq!(s.constant, 0.25);
        assert!(s.coeffs[0].is_zero());
        assert!(close(&s.coeffs[1], 1.0 / 16.0));
        assert!(s.coeffs[2].is_zero());
        assert!(close(&s.coeffs[3], 1.0 / 64.0));
    }

    #[test]
    fn half_integer_alpha_kills_corrections() {
        for alpha in [0.5, -0.5] {
            let s = beta_series(params(alpha, 1.7), PREC);
            assert!(s.coeffs.iter().all(Float::is_zero));
            assert_eq!(s.regime(10), Regime::Exponential);
            let p = p_series(params(alpha, 1.7), PREC);
            assert!(p.coeffs.iter().all(Float::is_zero));
        }
    }

    #[test]
    fn beta_at_t0_matches_closed_expansion() {
        for alpha in [-0.3, 0.0, 0.7, 2.5] {
            let s = beta_series(params(alpha, 0.0), PREC);
            let k = 1.0 - 4.0 * alpha * alpha;
            let a2 = alpha * alpha;
            let expected = [
                0.0,
                k / 16.0,
                -alpha * k / 8.0,
                k * (1.0 + 12.0 * a2) / 64.0,
                -alpha * k * (1.0 + 4.0 * a2) / 16.0,
                k * (1.0 + 40.0 * a2 + 80.0 * a2 * a2) / 256.0,
            ];
            for (c, e) in s.coeffs.iter().zip(expected) {
                assert!(close(c, e), "alpha={alpha}: {c} vs {e}");
            }
        }
    }

    #[test]
    fn p_at_t0_matches_closed_expansion() {
        for alpha in [-0.3, 0.0, 0.7, 2.5] {
            let s = p_series(params(alpha, 0.0), PREC);
            let (m, q) = (1.0 - 2.0 * alpha, 1.0 + 2.0 * alpha);
            assert_eq!(s.linear, -0.25);
            assert!(close(&s.constant, q / 8.0));
            let expected = [
                m * q / 16.0,
                m * m * q / 32.0,
                m.powi(3) * q / 64.0,
                m.powi(4) * q / 128.0,
                m.powi(5) * q / 256.0,
            ];
            for (c, e) in s.coeffs.iter().zip(expected) {
                assert!(close(c, e), "alpha={alpha}: {c} vs {e}");
            }
        }
    }

    #[test]
    fn p_difference_reproduces_beta() {
        for (alpha, t) in [(0.0, 1.0), (1.5, 2.0), (-0.7, 3.3), (0.25, -1.0)] {
            assert!(shift_consistency(params(alpha, t), PREC) < 1e-50, "{alpha} {t}");
        }
    }

    #[test]
    fn p_difference_sums_to_exact_values() {
        // p(n) - p(n+1) summed directly vs the re-expanded series, far out in n.
        let s = p_series(params(0.8, 1.2), PREC);
        let d = shifted_difference(&s, 6);
        let n = 4000;
        let direct = s.eval(n) - s.eval(n + 1);
        let gap = (direct - d.eval(n)).abs().to_f64();
        assert!(gap < 1e-20, "{gap}");
    }

    #[test]
    fn regime_gate() {
        let s = beta_series(params(2.0, 5.0), PREC);
        assert_eq!(s.regime(2), Regime::Outside);
        assert_eq!(s.regime(200), Regime::Asymptotic);
        // t = 2α - 1 leaves b_1 as the only correction.
        let p = p_series(params(1.5, 2.0), PREC);
        assert!(p.coeffs[1..].iter().all(Float::is_zero));
        assert_eq!(p.regime(64), Regime::Asymptotic);
    }

    #[test]
    fn evaluation_sums_terms() {
        let s = p_series(params(1.0, 2.0), PREC);
        let n = 7;
        let mut manual = Float::with_val(PREC, &s.linear * 7u32) + &s.constant;
        for (j, c) in s.coeffs.iter().enumerate() {
            manual += Float::with_val(PREC, c / Float::with_val(PREC, 7u32.pow(j as u32 + 1)));
        }
        assert!((manual - s.eval(n)).abs().to_f64() < 1e-50);
    }
}
