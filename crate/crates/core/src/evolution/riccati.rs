use ode_solvers::dop_shared::OutputType;
use ode_solvers::{Dopri5, System, Vector2};
use rug::Float;

use super::grid::GridFunction;
use crate::error::{Error, Result};
use crate::ladder::build_aux_table;
use crate::orthocore::build_ortho_table;
use crate::precision::PrecisionContext;
use crate::specfun::WeightParams;

/// A point on a trajectory of the coupled first-order system for `(R_n, r_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiState {
    pub t: f64,
    pub big_r: f64,
    pub small_r: f64,
}

/// `(dr_n/dt, dR_n/dt)` from
/// `2t r' = 2t(r² + 2αr)/R - (n - r)R` and
/// `2t R' = 4αt - R² + (2α + 1 - 2t)R + 2(2t + R)r`.
pub fn riccati_rhs(state: RiccatiState, alpha: f64, n: usize) -> Result<(f64, f64)> {
    let RiccatiState { t, big_r, small_r: r } = state;
    if t == 0.0 {
        return Err(Error::Singular("the system is singular at t = 0".into()));
    }
    if big_r == 0.0 {
        return Err(Error::Singular(format!("R_n vanishes at t = {t}")));
    }
    let two_t = 2.0 * t;
    let dr = (two_t * (r * r + 2.0 * alpha * r) / big_r - (n as f64 - r) * big_r) / two_t;
    let d_big_r = (4.0 * alpha * t - big_r * big_r
        + (2.0 * alpha + 1.0 - two_t) * big_r
        + 2.0 * (two_t + big_r) * r)
        / two_t;
    Ok((dr, d_big_r))
}

/// Integrator tolerances and optional dense output spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of recorded states; `None` keeps only the accepted steps.
    pub dense_step: Option<f64>,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            dense_step: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub alpha: f64,
    pub n: usize,
    /// Accepted steps, or dense output points when requested.
    pub states: Vec<RiccatiState>,
    pub end: RiccatiState,
}

impl RiccatiSolution {
    /// `(R_n, r_n)` as grid functions; needs uniformly spaced states.
    pub fn grid_functions(&self) -> Result<(GridFunction, GridFunction)> {
        let t: Vec<f64> = self.states.iter().map(|s| s.t).collect();
        let big: Vec<Float> = self.states.iter().map(|s| Float::with_val(53, s.big_r)).collect();
        let small: Vec<Float> = self.states.iter().map(|s| Float::with_val(53, s.small_r)).collect();
        Ok((
            GridFunction::new(self.alpha, self.n, t.clone(), big)?,
            GridFunction::new(self.alpha, self.n, t, small)?,
        ))
    }
}

struct Riccati {
    alpha: f64,
    n: usize,
}

impl System<f64, Vector2<f64>> for Riccati {
    fn system(&self, t: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        let state = RiccatiState {
            t,
            big_r: y[0],
            small_r: y[1],
        };
        let (dr, d_big_r) = riccati_rhs(state, self.alpha, self.n).unwrap_or((f64::NAN, f64::NAN));
        dy[0] = d_big_r;
        dy[1] = dr;
    }
}

/// Pipeline `(R_n, r_n)` at `t`.
pub fn pipeline_state(alpha: f64, n: usize, t: f64, ctx: &PrecisionContext) -> Result<RiccatiState> {
    let params = WeightParams::new(alpha, t)?;
    let table = build_ortho_table(params, n + 1, &PrecisionContext::for_table(n + 1, ctx.agreement_digits()))?;
    let aux = build_aux_table(&table);
    Ok(RiccatiState {
        t,
        big_r: aux.big_r(n).to_f64(),
        small_r: aux.small_r(n).to_f64(),
    })
}

/// Integrates from pipeline values at `t_start` to `t_end`.
pub fn riccati_integrate(
    alpha: f64,
    n: usize,
    t_start: f64,
    t_end: f64,
    options: RiccatiOptions,
    ctx: &PrecisionContext,
) -> Result<RiccatiSolution> {
    if !(t_start > 0.0 && t_end > 0.0) {
        return Err(Error::domain("integration interval must lie in t > 0"));
    }
    let start = pipeline_state(alpha, n, t_start, ctx)?;
    integrate_from(start, alpha, n, t_end, options)
}

/// One sparse-output run; ends exactly at `t_end`.
fn advance(
    start: RiccatiState,
    alpha: f64,
    n: usize,
    t_end: f64,
    options: RiccatiOptions,
) -> Result<Vec<RiccatiState>> {
    let y0 = Vector2::new(start.big_r, start.small_r);
    let mut solver = Dopri5::from_param(
        Riccati { alpha, n },
        start.t,
        t_end,
        0.0,
        y0,
        options.rtol,
        options.atol,
        0.9,
        0.04,
        0.2,
        10.0,
        (t_end - start.t).abs(),
        0.0,
        100_000,
        1000,
        OutputType::Sparse,
    );
    solver
        .integrate()
        .map_err(|e| Error::Integration(e.to_string()))?;
    let states: Vec<RiccatiState> = solver
        .x_out()
        .iter()
        .zip(solver.y_out())
        .map(|(&t, y)| RiccatiState {
            t,
            big_r: y[0],
            small_r: y[1],
        })
        .collect();
    if states.iter().any(|s| !(s.big_r.is_finite() && s.small_r.is_finite())) {
        return Err(Error::Integration("trajectory left the finite range".into()));
    }
    Ok(states)
}

/// Integrates from an arbitrary initial state.
///
/// With a dense step the interval is split into equal pieces of roughly
/// that length and the state is recorded at each piece's end.
pub fn integrate_from(
    start: RiccatiState,
    alpha: f64,
    n: usize,
    t_end: f64,
    options: RiccatiOptions,
) -> Result<RiccatiSolution> {
    if start.t == t_end {
        return Ok(RiccatiSolution {
            alpha,
            n,
            states: vec![start],
            end: start,
        });
    }
    riccati_rhs(start, alpha, n)?;
    let mut states = vec![start];
    match options.dense_step {
        Some(dx) if dx > 0.0 => {
            let span = t_end - start.t;
            let count = (span.abs() / dx).round().max(1.0) as usize;
            let mut current = start;
            for k in 1..=count {
                let target = if k == count {
                    t_end
                } else {
                    start.t + span * k as f64 / count as f64
                };
                current = *advance(current, alpha, n, target, options)?
                    .last()
                    .expect("at least the initial state");
                states.push(current);
            }
        }
        _ => states = advance(start, alpha, n, t_end, options)?,
    }
    let end = *states.last().expect("at least the initial state");
    Ok(RiccatiSolution {
        alpha,
        n,
        states,
        end,
    })
}
