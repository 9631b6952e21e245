//! Exact even-index Bernoulli numbers from the tangent numbers.

use std::sync::Mutex;

use rug::{Integer, Rational};

static CACHE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// `B_2, B_4, …, B_{2k}` as exact rationals (index 0 holds `B_2`).
pub(crate) fn bernoulli_even(k: usize) -> Vec<Rational> {
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if cache.len() < k {
        *cache = compute(k.max(64));
    }
    cache[..k].to_vec()
}

fn compute(k: usize) -> Vec<Rational> {
    // T_j = (j-1)! then the in-place sweep of Brent & Harvey.
    let mut tangent: Vec<Integer> = Vec::with_capacity(k + 1);
    tangent.push(Integer::new());
    let mut fact = Integer::from(1);
    for j in 1..=k {
        if j > 1 {
            fact *= (j - 1) as u32;
        }
        tangent.push(fact.clone());
    }
    for i in 2..=k {
        for j in i..=k {
            let prev = Integer::from(&tangent[j - 1] * (j - i) as u32);
            tangent[j] *= (j - i + 2) as u32;
            tangent[j] += prev;
        }
    }
    (1..=k)
        .map(|j| {
            let num = Integer::from(&tangent[j] * (2 * j) as u32);
            let pow = Integer::from(1) << (2 * j) as u32;
            let den = Integer::from(&pow * Integer::from(&pow - 1u32));
            let b = Rational::from((num, den));
            if j % 2 == 0 {
                -b
            } else {
                b
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let b = bernoulli_even(6);
        let expected = [(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730)];
        for (got, (n, d)) in b.iter().zip(expected) {
            assert_eq!(*got, Rational::from((n, d)));
        }
    }

    #[test]
    fn b_sixty() {
        // Numerator of B_60 (denominator 56786730).
        let b = bernoulli_even(30);
        let num: Integer = "-1215233140483755572040304994079820246041491".parse().unwrap();
        assert_eq!(b[29], Rational::from((num, 56786730)));
    }
}
