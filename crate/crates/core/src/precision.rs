//! Working precision and the doubling acceptance policy.
//!
//! Every top-level quantity is evaluated twice, at `b` and `2b` mantissa
//! bits. The higher-precision value is accepted once the two agree to
//! `agreement_digits` significant digits; otherwise precision keeps
//! doubling, at most `max_doublings` times.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{mixed_diff, rel_diff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionContext {
    mantissa_bits: u32,
    max_doublings: u32,
    agreement_digits: u32,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_DIGITS: u32 = 25;
    pub const DEFAULT_MAX_DOUBLINGS: u32 = 3;

    pub fn new(mantissa_bits: u32, agreement_digits: u32) -> Result<Self> {
        if mantissa_bits < Self::MIN_BITS {
            return Err(Error::InvalidInput(format!(
                "mantissa_bits must be at least {}, got {mantissa_bits}",
                Self::MIN_BITS
            )));
        }
        if agreement_digits == 0 {
            return Err(Error::InvalidInput(
                "agreement_digits must be positive".into(),
            ));
        }
        Ok(PrecisionContext {
            mantissa_bits,
            max_doublings: Self::DEFAULT_MAX_DOUBLINGS,
            agreement_digits,
        })
    }

    /// Starting precision for a Hankel table of size `n_max`.
    ///
    /// Moment matrices on [-1, 1] lose a few bits per row; 6 bits per row on
    /// top of the digits being asked for leaves the doubling policy little
    /// to correct.
    pub fn for_table(n_max: usize, agreement_digits: u32) -> Self {
        let hankel = 64 + 6 * n_max as u32;
        let digits = (f64::from(agreement_digits) / std::f64::consts::LOG10_2).ceil() as u32 + 32;
        PrecisionContext {
            mantissa_bits: hankel.max(digits),
            max_doublings: Self::DEFAULT_MAX_DOUBLINGS,
            agreement_digits,
        }
    }

    pub fn with_max_doublings(mut self, max_doublings: u32) -> Self {
        self.max_doublings = max_doublings.max(1);
        self
    }

    pub fn with_mantissa_bits(mut self, bits: u32) -> Self {
        self.mantissa_bits = bits.max(Self::MIN_BITS);
        self
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn max_doublings(&self) -> u32 {
        self.max_doublings
    }

    pub fn agreement_digits(&self) -> u32 {
        self.agreement_digits
    }

    /// Relative tolerance `10^-agreement_digits`.
    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.agreement_digits as i32))
    }

    /// Runs `eval` at successive precisions until two consecutive results agree.
    ///
    /// `Conditioning` and `Precision` failures of an individual evaluation
    /// count as disagreement and trigger another doubling; any other error is
    /// returned immediately.
    pub fn accept<T, F>(&self, what: &str, mut eval: F) -> Result<Accepted<T>>
    where
        T: Agree,
        F: FnMut(u32) -> Result<T>,
    {
        let tol = self.tolerance();
        let mut bits = self.mantissa_bits;
        let mut lower = retryable(eval(bits))?;
        let mut last_failure = None;
        for doubling in 1..=self.max_doublings {
            bits *= 2;
            let upper = retryable(eval(bits))?;
            match (&lower, &upper) {
                (Ok(lo), Ok(hi)) => {
                    let d = lo.discrepancy(hi);
                    let agreed = digits_from(d, bits / 2);
                    if d <= tol {
                        return Ok(Accepted {
                            value: upper.ok().expect("checked above"),
                            bits,
                            doublings: doubling,
                            agreed_digits: agreed,
                        });
                    }
                    last_failure = Some(Error::Precision {
                        what: what.to_string(),
                        bits,
                        agreed_digits: agreed,
                    });
                }
                (_, Err(e)) | (Err(e), _) => last_failure = Some(e.clone()),
            }
            lower = upper;
        }
        Err(last_failure.unwrap_or(Error::Precision {
            what: what.to_string(),
            bits,
            agreed_digits: 0.0,
        }))
    }
}

fn retryable<T>(r: Result<T>) -> Result<Result<T>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e @ (Error::Conditioning { .. } | Error::Precision { .. })) => Ok(Err(e)),
        Err(e) => Err(e),
    }
}

/// Capped at the digits carried by the lower-precision evaluation.
fn digits_from(discrepancy: f64, lower_bits: u32) -> f64 {
    let cap = crate::mp::bits_to_digits(lower_bits);
    if discrepancy <= 0.0 {
        cap
    } else {
        (-discrepancy.log10()).min(cap)
    }
}

/// A value that passed the doubling policy, with the precision it was accepted at.
#[derive(Debug, Clone)]
pub struct Accepted<T> {
    pub value: T,
    pub bits: u32,
    pub doublings: u32,
    pub agreed_digits: f64,
}

/// Largest relative discrepancy between two evaluations of the same quantity.
pub trait Agree {
    fn discrepancy(&self, other: &Self) -> f64;
}

impl Agree for Float {
    fn discrepancy(&self, other: &Self) -> f64 {
        rel_diff(self, other)
    }
}

/// Compared relative to `max(|x|, 1)`: for logarithms and other values that may sit at zero.
#[derive(Debug, Clone)]
pub struct Mixed(pub Float);

impl Agree for Mixed {
    fn discrepancy(&self, other: &Self) -> f64 {
        mixed_diff(&self.0, &other.0)
    }
}

impl<T: Agree> Agree for Vec<T> {
    fn discrepancy(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.iter()
            .zip(other)
            .map(|(a, b)| a.discrepancy(b))
            .fold(0.0, f64::max)
    }
}

impl<A: Agree, B: Agree> Agree for (A, B) {
    fn discrepancy(&self, other: &Self) -> f64 {
        self.0.discrepancy(&other.0).max(self.1.discrepancy(&other.1))
    }
}
