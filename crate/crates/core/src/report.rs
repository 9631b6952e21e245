//! Residual bookkeeping shared by the verification suites.

use std::collections::BTreeMap;

use rug::Float;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::mp::format_float;

/// The parameter points and index range a residual was maximized over.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct GridSummary {
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    pub n_min: usize,
    pub n_max: usize,
}

impl GridSummary {
    fn absorb(&mut self, alpha: f64, t: f64, n: usize) {
        if self.alpha.is_empty() && self.t.is_empty() {
            self.n_min = n;
            self.n_max = n;
        }
        if !self.alpha.contains(&alpha) {
            self.alpha.push(alpha);
        }
        if !self.t.contains(&t) {
            self.t.push(t);
        }
        self.n_min = self.n_min.min(n);
        self.n_max = self.n_max.max(n);
    }

    fn merge(&mut self, other: &GridSummary) {
        for &a in &other.alpha {
            if !self.alpha.contains(&a) {
                self.alpha.push(a);
            }
        }
        for &t in &other.t {
            if !self.t.contains(&t) {
                self.t.push(t);
            }
        }
        self.n_min = self.n_min.min(other.n_min);
        self.n_max = self.n_max.max(other.n_max);
    }
}

/// Where a maximum was attained.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct GridPoint {
    pub alpha: f64,
    pub t: f64,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct ResidualEntry {
    pub max_residual: Float,
    pub argmax: GridPoint,
    pub grid: GridSummary,
    digits: usize,
}

impl ResidualEntry {
    pub fn max_f64(&self) -> f64 {
        self.max_residual.to_f64()
    }
}

impl Serialize for ResidualEntry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ResidualEntry", 4)?;
        st.serialize_field("max_residual", &format_float(&self.max_residual, self.digits))?;
        st.serialize_field("argmax_n", &self.argmax.n)?;
        st.serialize_field("argmax", &self.argmax)?;
        st.serialize_field("grid", &self.grid)?;
        st.end()
    }
}

/// Named maxima of scaled residuals.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    entries: BTreeMap<String, ResidualEntry>,
    digits: usize,
}

impl ResidualReport {
    /// `digits` is the number of significant digits written to JSON.
    pub fn new(digits: usize) -> Self {
        Self {
            entries: BTreeMap::new(),
            digits,
        }
    }

    /// Folds one residual into the running maximum for `name`.
    ///
    /// A NaN residual is kept as the maximum so it cannot hide.
    pub fn record(&mut self, name: &str, point: GridPoint, residual: Float) {
        let digits = self.digits;
        let entry = self
            .entries
            .entry(name.to_string())
            .or_insert_with(|| ResidualEntry {
                max_residual: Float::with_val(residual.prec(), 0),
                argmax: point,
                grid: GridSummary::default(),
                digits,
            });
        entry.grid.absorb(point.alpha, point.t, point.n);
        if !entry.max_residual.is_nan() && (residual.is_nan() || residual > entry.max_residual) {
            entry.max_residual = residual;
            entry.argmax = point;
        }
    }

    pub fn merge(&mut self, other: ResidualReport) {
        for (name, theirs) in other.entries {
            match self.entries.get_mut(&name) {
                None => {
                    self.entries.insert(name, theirs);
                }
                Some(mine) => {
                    mine.grid.merge(&theirs.grid);
                    if !mine.max_residual.is_nan()
                        && (theirs.max_residual.is_nan() || theirs.max_residual > mine.max_residual)
                    {
                        mine.max_residual = theirs.max_residual;
                        mine.argmax = theirs.argmax;
                    }
                }
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &ResidualEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Largest residual over all names, as `f64` (NaN propagates as infinity).
    pub fn worst(&self) -> f64 {
        self.entries
            .values()
            .map(|e| {
                let v = e.max_f64();
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        !self.entries.is_empty() && self.worst() <= tol
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl Serialize for ResidualReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: usize) -> GridPoint {
        GridPoint { alpha: 0.5, t: 1.0, n }
    }

    #[test]
    fn keeps_maximum_and_argmax() {
        let mut r = ResidualReport::new(10);
        r.record("re1", pt(1), Float::with_val(64, 1e-30));
        r.record("re1", pt(2), Float::with_val(64, 1e-28));
        r.record("re1", pt(3), Float::with_val(64, 1e-29));
        let e = r.get("re1").unwrap();
        assert_eq!(e.argmax.n, 2);
        assert_eq!(e.grid.n_min, 1);
        assert_eq!(e.grid.n_max, 3);
        assert!(r.passes(1e-27));
        assert!(!r.passes(1e-29));
    }

    #[test]
    fn nan_is_sticky() {
        let mut r = ResidualReport::new(10);
        r.record("x", pt(1), Float::with_val(64, rug::float::Special::Nan));
        r.record("x", pt(2), Float::with_val(64, 1.0));
        assert!(r.worst().is_infinite());
        assert!(!r.passes(1.0));
    }

    #[test]
    fn json_shape() {
        let mut r = ResidualReport::new(6);
        r.record("re3", pt(4), Float::with_val(64, 2.5e-31));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["re3"]["argmax_n"], 4);
        assert_eq!(v["re3"]["max_residual"], "2.50000e-31");
        assert_eq!(v["re3"]["grid"]["alpha"][0], 0.5);
    }
}
