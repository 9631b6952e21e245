use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use semijacobi::{PrecisionContext, WeightParams};

use crate::args::Cli;
use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
}

/// Everything a run was asked to do, embedded in its JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    pub n_max: usize,
    pub mantissa_bits: Option<u32>,
    pub agreement_digits: u32,
    pub grid: Option<GridSpec>,
    pub output: Option<PathBuf>,
    pub format: &'static str,
}

impl RunConfig {
    pub fn new(cli: &Cli, command: &str, alpha: Vec<f64>, t: Vec<f64>, n_max: usize) -> Self {
        RunConfig {
            command: command.to_string(),
            alpha,
            t,
            n_max,
            mantissa_bits: cli.bits,
            agreement_digits: cli.digits,
            grid: None,
            output: None,
            format: "json",
        }
    }

    /// Every `α > -1`.
    pub fn validate(&self) -> Result<(), Failure> {
        if self.alpha.is_empty() {
            return Err(Failure::Usage("alpha: at least one value is required".into()));
        }
        for &a in &self.alpha {
            WeightParams::new(a, 0.0).map_err(|_| Failure::Usage(format!("alpha must exceed -1, got {a}")))?;
        }
        for &t in &self.t {
            if !t.is_finite() {
                return Err(Failure::Usage(format!("t must be finite, got {t}")));
            }
        }
        if self.agreement_digits == 0 {
            return Err(Failure::Usage("digits must be positive".into()));
        }
        if let Some(g) = &self.grid {
            if g.points < 5 {
                return Err(Failure::Usage(format!("points must be at least 5, got {}", g.points)));
            }
            if !(g.t_start > 0.0) {
                return Err(Failure::Usage(format!("t_start must be positive, got {}", g.t_start)));
            }
            if !(g.t_end > g.t_start) {
                return Err(Failure::Usage("t_end must exceed t_start".into()));
            }
        }
        Ok(())
    }

    /// Context for tables of size `n_max`, honoring `--bits`.
    pub fn table_ctx(&self, n_max: usize) -> Result<PrecisionContext, Failure> {
        let ctx = PrecisionContext::for_table(n_max, self.agreement_digits);
        match self.mantissa_bits {
            Some(bits) => Ok(PrecisionContext::new(bits, self.agreement_digits)?),
            None => Ok(ctx),
        }
    }

    /// Context for scalar work.
    pub fn scalar_ctx(&self) -> Result<PrecisionContext, Failure> {
        Ok(PrecisionContext::new(self.mantissa_bits.unwrap_or(128), self.agreement_digits)?)
    }
}

/// A file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| Failure::Failed(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout()),
    })
}

pub fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = sink(path)?;
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    writeln!(out, "{text}")?;
    Ok(())
}
