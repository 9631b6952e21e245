use rug::{Assign, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mp::{mixed_diff, rel_diff};
use crate::precision::{Agree, PrecisionContext};
use crate::specfun::{moments_prec, WeightParams};

/// How the moment matrix is factored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorPath {
    /// LDLᵀ of the full `(n_max+2)²` Hankel matrix `(μ_{j+k})`.
    Full,
    /// The even weight makes `(μ_{j+k})` a checkerboard; factor the two
    /// half-size Hankel matrices `(μ_{2(j+k)})` and `(μ_{2(j+k)+2})` instead.
    EvenOdd,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableMeta {
    /// Mantissa bits at which the stored values were accepted.
    pub mantissa_bits: u32,
    pub doublings: u32,
    pub agreed_digits: f64,
    pub agreement_digits: u32,
    pub path: FactorPath,
}

/// `h_n`, `β_n`, `p(n, t)` and `ln D_n` at fixed `(α, t)`.
///
/// Indices: `h`, `β`, `p` cover `0..=n_max+1`; `ln D_n` covers
/// `0..=n_max+2` with `D_0 = 1`.
#[derive(Debug, Clone)]
pub struct OrthoTable {
    params: WeightParams,
    n_max: usize,
    h: Vec<Float>,
    beta: Vec<Float>,
    p: Vec<Float>,
    log_d: Vec<Float>,
    meta: TableMeta,
}

impl OrthoTable {
    pub fn params(&self) -> WeightParams {
        self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    /// Working precision of the stored values.
    pub fn prec(&self) -> u32 {
        self.meta.mantissa_bits
    }

    pub fn h(&self, n: usize) -> &Float {
        &self.h[n]
    }

    pub fn beta(&self, n: usize) -> &Float {
        &self.beta[n]
    }

    pub fn p(&self, n: usize) -> &Float {
        &self.p[n]
    }

    /// `ln D_n`, with `D_0 = 1`.
    pub fn log_d(&self, n: usize) -> &Float {
        &self.log_d[n]
    }

    pub fn betas(&self) -> &[Float] {
        &self.beta
    }

    pub fn hs(&self) -> &[Float] {
        &self.h
    }

    pub fn ps(&self) -> &[Float] {
        &self.p
    }

    /// Largest index with a stored `β_n`, `h_n`, `p(n, t)`.
    pub fn last_index(&self) -> usize {
        self.n_max + 1
    }

    /// Adds `delta` to `β_n`, leaving everything else untouched.
    ///
    /// Test hook for negative-path checks: the table is no longer consistent
    /// afterwards.
    pub fn perturb_beta(&mut self, n: usize, delta: f64) {
        self.beta[n] += delta;
    }
}

impl Agree for OrthoTable {
    fn discrepancy(&self, other: &Self) -> f64 {
        if self.n_max != other.n_max {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for n in 0..self.h.len() {
            worst = worst
                .max(rel_diff(&self.h[n], &other.h[n]))
                .max(rel_diff(&self.beta[n], &other.beta[n]))
                .max(mixed_diff(&self.p[n], &other.p[n]));
        }
        for (a, b) in self.log_d.iter().zip(&other.log_d) {
            worst = worst.max(mixed_diff(a, b));
        }
        worst
    }
}

/// Builds the table through the full factorization.
pub fn build_ortho_table(
    params: WeightParams,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<OrthoTable> {
    build_ortho_table_with(params, n_max, ctx, FactorPath::Full)
}

pub fn build_ortho_table_with(
    params: WeightParams,
    n_max: usize,
    ctx: &PrecisionContext,
    path: FactorPath,
) -> Result<OrthoTable> {
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let acc = ctx.accept("ortho_table", |bits| build_at(params, n_max, bits, path))?;
    let mut table = acc.value;
    table.meta.doublings = acc.doublings;
    table.meta.agreed_digits = acc.agreed_digits;
    table.meta.agreement_digits = ctx.agreement_digits();
    Ok(table)
}

fn build_at(params: WeightParams, n_max: usize, bits: u32, path: FactorPath) -> Result<OrthoTable> {
    let size = n_max + 2;
    let mu = moments_prec(2 * size + 1, params, bits)?;
    let (h, p) = match path {
        FactorPath::Full => {
            let f = ldl_hankel(&mu, size, bits, |j| j)?;
            let p = (0..size)
                .map(|n| {
                    if n < 2 {
                        return Float::with_val(bits, 0);
                    }
                    // (U⁻¹)_{n,n-2} for unit lower-triangular U.
                    let cross = Float::with_val(bits, f.sub(n, 1) * f.sub(n - 1, 1));
                    cross - f.sub(n, 2)
                })
                .collect();
            (f.d, p)
        }
        FactorPath::EvenOdd => {
            let n_even = (size + 1) / 2;
            let n_odd = size / 2;
            let even_seq: Vec<Float> = mu.iter().step_by(2).cloned().collect();
            let odd_seq: Vec<Float> = mu.iter().skip(2).step_by(2).cloned().collect();
            let fe = ldl_hankel(&even_seq, n_even, bits, |j| 2 * j)?;
            let fo = ldl_hankel(&odd_seq, n_odd, bits, |j| 2 * j + 1)?;
            let mut h = Vec::with_capacity(size);
            let mut p = Vec::with_capacity(size);
            for n in 0..size {
                let (f, j) = if n % 2 == 0 { (&fe, n / 2) } else { (&fo, n / 2) };
                h.push(f.d[j].clone());
                p.push(if j == 0 {
                    Float::with_val(bits, 0)
                } else {
                    Float::with_val(bits, -f.sub(j, 1))
                });
            }
            (h, p)
        }
    };
    let mut beta = Vec::with_capacity(size);
    beta.push(Float::with_val(bits, 0));
    for n in 1..size {
        beta.push(Float::with_val(bits, &h[n] / &h[n - 1]));
    }
    let mut log_d = Vec::with_capacity(size + 1);
    log_d.push(Float::with_val(bits, 0));
    for n in 0..size {
        let next = Float::with_val(bits, h[n].ln_ref()) + &log_d[n];
        log_d.push(next);
    }
    Ok(OrthoTable {
        params,
        n_max,
        h,
        beta,
        p,
        log_d,
        meta: TableMeta {
            mantissa_bits: bits,
            doublings: 0,
            agreed_digits: 0.0,
            agreement_digits: 0,
            path,
        },
    })
}

/// Root-free Cholesky factors `M = L D Lᵀ` of a Hankel matrix `M_{ij} = seq[i+j]`.
struct Ldl {
    /// Row `i` holds `L_{i,0..i}`.
    lower: Vec<Vec<Float>>,
    d: Vec<Float>,
}

impl Ldl {
    /// `L_{i, i-offset}`.
    fn sub(&self, i: usize, offset: usize) -> &Float {
        &self.lower[i][i - offset]
    }
}

fn ldl_hankel(
    seq: &[Float],
    size: usize,
    bits: u32,
    degree_of: impl Fn(usize) -> usize,
) -> Result<Ldl> {
    let mut lower: Vec<Vec<Float>> = (0..size).map(|i| Vec::with_capacity(i)).collect();
    let mut d: Vec<Float> = Vec::with_capacity(size);
    let mut scaled = vec![Float::new(bits); size];
    let mut acc = Float::new(bits);
    let mut tmp = Float::new(bits);
    for j in 0..size {
        // scaled_k = L_{jk} d_k
        for k in 0..j {
            scaled[k].assign(&lower[j][k] * &d[k]);
        }
        acc.assign(&seq[2 * j]);
        for k in 0..j {
            tmp.assign(&lower[j][k] * &scaled[k]);
            acc -= &tmp;
        }
        if acc.is_sign_negative() || acc.is_zero() {
            return Err(Error::Conditioning {
                n: degree_of(j),
                bits,
            });
        }
        let pivot = acc.clone();
        for i in (j + 1)..size {
            acc.assign(&seq[i + j]);
            let row = &lower[i];
            for k in 0..j {
                tmp.assign(&row[k] * &scaled[k]);
                acc -= &tmp;
            }
            acc /= &pivot;
            lower[i].push(acc.clone());
        }
        d.push(pivot);
    }
    Ok(Ldl { lower, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn btc(n: usize, alpha: f64, prec: u32) -> Float {
        let n = n as f64;
        let num = Float::with_val(prec, n * (n + 2.0 * alpha));
        let den = Float::with_val(prec, (2.0 * n - 1.0 + 2.0 * alpha) * (2.0 * n + 1.0 + 2.0 * alpha));
        num / den
    }

    #[test]
    fn legendre_table() {
        let params = WeightParams::new(0.0, 0.0).unwrap();
        let ctx = PrecisionContext::for_table(10, 30);
        let table = build_ortho_table(params, 10, &ctx).unwrap();
        assert!(table.beta(0).is_zero());
        for n in 1..=10 {
            assert!(rel_diff(table.beta(n), &btc(n, 0.0, 256)) < 1e-30, "n={n}");
        }
        // D_1 = μ_0 = 2.
        let d1 = Float::with_val(256, table.log_d(1).exp_ref());
        assert!((d1 - 2u32).abs().to_f64() < 1e-30);
    }

    #[test]
    fn jacobi_beta_three() {
        // α = 1, t = 0: β_3 = 3·5/(7·9) = 5/21.
        let params = WeightParams::new(1.0, 0.0).unwrap();
        let table = build_ortho_table(params, 5, &PrecisionContext::for_table(5, 30)).unwrap();
        let expected = Float::with_val(256, 5) / 21u32;
        assert!(rel_diff(table.beta(3), &expected) < 1e-30);
    }

    #[test]
    fn beta_one_is_kummer_ratio() {
        let params = WeightParams::new(0.3, 1.7).unwrap();
        let table = build_ortho_table(params, 4, &PrecisionContext::for_table(4, 30)).unwrap();
        let prec = 256;
        let alpha = Float::with_val(prec, 0.3);
        let f = |a: f64, b_shift: f64| {
            crate::specfun::kummer_phi_prec(
                &Float::with_val(prec, a),
                &Float::with_val(prec, &alpha + b_shift),
                &Float::with_val(prec, -1.7),
                prec,
            )
            .unwrap()
        };
        let two_alpha_plus_3 = Float::with_val(prec, &alpha * 2u32) + 3u32;
        let expected = f(1.5, 2.5) / (f(0.5, 1.5) * two_alpha_plus_3);
        assert!(rel_diff(table.beta(1), &expected) < 1e-30, "{} vs {}", table.beta(1), expected);
    }

    #[test]
    fn even_odd_matches_full() {
        for (alpha, t) in [(0.5, 1.0), (-0.6, 3.0), (2.5, -1.5)] {
            let params = WeightParams::new(alpha, t).unwrap();
            let ctx = PrecisionContext::for_table(30, 30);
            let full = build_ortho_table_with(params, 30, &ctx, FactorPath::Full).unwrap();
            let split = build_ortho_table_with(params, 30, &ctx, FactorPath::EvenOdd).unwrap();
            assert!(full.discrepancy(&split) < 1e-30, "alpha={alpha} t={t}");
        }
    }

    #[test]
    fn telescoping_and_positivity() {
        let params = WeightParams::new(1.5, 5.0).unwrap();
        let table = build_ortho_table(params, 25, &PrecisionContext::for_table(25, 25)).unwrap();
        let prec = table.prec();
        let mut sum = Float::with_val(prec, 0);
        for n in 0..=table.last_index() {
            assert!(*table.h(n) > 0);
            if n >= 1 {
                assert!(*table.beta(n) > 0);
            }
            let tele = Float::with_val(prec, table.p(n) + &sum);
            assert!(tele.abs().to_f64() <= 1e-25 * table.p(n).to_f64().abs().max(1e-300), "n={n}");
            sum += table.beta(n);
        }
    }

    #[test]
    fn rejects_tiny_table() {
        let params = WeightParams::new(0.5, 1.0).unwrap();
        assert!(build_ortho_table(params, 0, &PrecisionContext::for_table(1, 10)).is_err());
    }

    #[test]
    fn insufficient_precision_reports_conditioning() {
        let params = WeightParams::new(0.5, 1.0).unwrap();
        let ctx = PrecisionContext::new(64, 20).unwrap().with_max_doublings(1);
        let err = build_ortho_table(params, 60, &ctx).unwrap_err();
        assert!(
            matches!(err, Error::Conditioning { .. } | Error::Precision { .. }),
            "{err:?}"
        );
    }
}
