use serde::Serialize;
use serde_json::json;

use semijacobi::evolution::{btde_residual, hn_ode_residual, pv_residual, default_step, FdCheck, FdGrid};
use semijacobi::ladder::{build_aux_table, identity_residuals, pn_ode_residual};
use semijacobi::mp::format_float;
use semijacobi::orthocore::{build_ortho_table, OrthoTable};
use semijacobi::recur::{btd_residual, hnd_residual, pnd_residual};
use semijacobi::report::{GridPoint, GridSummary, ResidualReport};
use semijacobi::{PrecisionContext, WeightParams};

use crate::args::{Cli, Suite, VerifyArgs};
use crate::config::{write_json, GridSpec, RunConfig};
use crate::Failure;

const ODEP_Z: [f64; 3] = [0.1, 0.3, 0.7];
const ODEP_N_MAX: usize = 10;

#[derive(Debug, Serialize)]
struct ResultRow {
    name: String,
    max_residual: String,
    argmax: GridPoint,
    /// Largest accepted value; for differential checks, ten truncation estimates.
    bound: String,
    pass: bool,
}

pub fn run(cli: &Cli, args: &VerifyArgs) -> Result<bool, Failure> {
    let differential = matches!(args.suite, Suite::Ode | Suite::Painleve);
    let alpha = args.alpha.clone().unwrap_or_else(|| match args.suite {
        Suite::Identities | Suite::Difference => vec![0.5, 1.5],
        Suite::Ode => vec![0.5, 1.0],
        Suite::Painleve => vec![0.5],
    });
    let t = args.t.clone().unwrap_or_else(|| vec![0.1, 1.0, 5.0]);
    let mut config = RunConfig::new(cli, &format!("verify {}", args.suite.name()), alpha, t, args.n_max);
    config.output = args.out.clone();
    if differential {
        config.grid = Some(GridSpec {
            t_start: args.t_start,
            t_end: args.t_end,
            points: args.points,
        });
    }
    config.validate()?;
    let corrupt = args.corrupt_beta.as_deref().map(parse_corruption).transpose()?;
    let digits = cli.digits as usize + 5;

    let (tolerance, grid, rows, bits) = match args.suite {
        Suite::Identities | Suite::Difference => {
            if args.n_max < 2 {
                return Err(Failure::Usage("n_max must be at least 2".into()));
            }
            let tol = if args.suite == Suite::Identities { 1e-22 } else { 1e-20 };
            let (report, bits) = algebraic(&config, args.suite, corrupt)?;
            let grid = summary(&report);
            let rows = report
                .entries()
                .map(|(name, e)| ResultRow {
                    name: name.to_string(),
                    max_residual: format_float(&e.max_residual, digits),
                    argmax: e.argmax,
                    bound: format!("{tol:e}"),
                    pass: !e.max_residual.is_nan() && e.max_f64() <= tol,
                })
                .collect();
            (format!("{tol:e}"), grid, rows, bits)
        }
        Suite::Ode | Suite::Painleve => {
            let ns = args.n.clone().unwrap_or_else(|| {
                if args.suite == Suite::Ode {
                    vec![3, 5]
                } else {
                    vec![3, 4]
                }
            });
            if ns.iter().any(|&n| n == 0) {
                return Err(Failure::Usage("n must be positive".into()));
            }
            let (rows, grid, bits) = differential_suite(&config, args, &ns, digits)?;
            ("10x truncation estimate".to_string(), grid, rows, bits)
        }
    };

    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    let value = json!({
        "suite": args.suite.name(),
        "grid": grid,
        "tolerance": tolerance,
        "results": rows,
        "pass": pass,
        "config": config,
        "precision": {
            "mantissa_bits": bits,
            "agreement_digits": cli.digits,
        },
    });
    write_json(args.out.as_deref(), &value)?;
    Ok(pass)
}

fn parse_corruption(s: &str) -> Result<(usize, f64), Failure> {
    let bad = || Failure::Usage(format!("corrupt_beta expects N:DELTA, got {s}"));
    let (n, d) = s.split_once(':').ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?))
}

fn summary(report: &ResidualReport) -> GridSummary {
    let mut out = GridSummary::default();
    for (_, e) in report.entries() {
        for &a in &e.grid.alpha {
            if !out.alpha.contains(&a) {
                out.alpha.push(a);
            }
        }
        for &t in &e.grid.t {
            if !out.t.contains(&t) {
                out.t.push(t);
            }
        }
        if out.n_max == 0 {
            out.n_min = e.grid.n_min;
        }
        out.n_min = out.n_min.min(e.grid.n_min);
        out.n_max = out.n_max.max(e.grid.n_max);
    }
    out
}

fn table_at(config: &RunConfig, params: WeightParams, ctx: &PrecisionContext, corrupt: Option<(usize, f64)>) -> Result<OrthoTable, Failure> {
    let mut table = build_ortho_table(params, config.n_max + 1, ctx)?;
    if let Some((n, delta)) = corrupt {
        if n > table.last_index() {
            return Err(Failure::Usage(format!("corrupt_beta index {n} exceeds the table")));
        }
        table.perturb_beta(n, delta);
    }
    Ok(table)
}

fn algebraic(config: &RunConfig, suite: Suite, corrupt: Option<(usize, f64)>) -> Result<(ResidualReport, u32), Failure> {
    let ctx = config.table_ctx(config.n_max + 1)?;
    let mut report = ResidualReport::new(config.agreement_digits as usize + 5);
    let mut bits = 0;
    for &alpha in &config.alpha {
        for &t in &config.t {
            let params = WeightParams::new(alpha, t)?;
            let table = table_at(config, params, &ctx, corrupt)?;
            bits = bits.max(table.prec());
            let aux = build_aux_table(&table);
            if suite == Suite::Identities {
                report.merge(identity_residuals(&table, &aux));
                continue;
            }
            for n in 1..=config.n_max {
                let point = GridPoint { alpha, t, n };
                report.record("btd", point, btd_residual(&table, n)?);
                report.record("pnd", point, pnd_residual(&table, n)?);
                report.record("hnd", point, hnd_residual(&aux, n)?);
            }
        }
    }
    Ok((report, bits))
}

fn differential_suite(
    config: &RunConfig,
    args: &VerifyArgs,
    ns: &[usize],
    digits: usize,
) -> Result<(Vec<ResultRow>, GridSummary, u32), Failure> {
    let ctx = config.scalar_ctx()?;
    let step = args.step.unwrap_or_else(|| default_step(&ctx));
    let spacing = (args.t_end - args.t_start) / (args.points - 1) as f64;
    let grid = FdGrid::uniform(args.t_start, args.t_end, spacing, step)?;
    let floor = 10f64.powi(-(config.agreement_digits as i32 - 3));
    let mut checks: Vec<FdCheck> = Vec::new();
    for &alpha in &config.alpha {
        for &n in ns {
            match args.suite {
                Suite::Ode => {
                    checks.push(btde_residual(alpha, n, &grid, &ctx)?);
                    checks.extend(hn_ode_residual(alpha, n, &grid, &ctx)?);
                }
                _ => checks.push(pv_residual(alpha, n, &grid, &ctx)?),
            }
        }
    }
    let mut rows = fold_checks(&checks, floor, digits);
    let mut bits = ctx.mantissa_bits();
    if args.suite == Suite::Ode {
        let mut report = ResidualReport::new(digits);
        let tctx = config.table_ctx(ODEP_N_MAX)?;
        for &alpha in &config.alpha {
            for &t in &config.t {
                let table = build_ortho_table(WeightParams::new(alpha, t)?, ODEP_N_MAX, &tctx)?;
                bits = bits.max(table.prec());
                for n in 1..=ODEP_N_MAX {
                    report.record("polynomial_ode", GridPoint { alpha, t, n }, pn_ode_residual(&table, n, &ODEP_Z)?);
                }
            }
        }
        let tol = 1e-18;
        for (name, e) in report.entries() {
            rows.push(ResultRow {
                name: name.to_string(),
                max_residual: format_float(&e.max_residual, digits),
                argmax: e.argmax,
                bound: format!("{tol:e}"),
                pass: !e.max_residual.is_nan() && e.max_f64() <= tol,
            });
        }
    }
    let summary = GridSummary {
        alpha: config.alpha.clone(),
        t: grid.centres().to_vec(),
        n_min: ns.iter().copied().min().unwrap_or(0),
        n_max: ns.iter().copied().max().unwrap_or(0),
    };
    Ok((rows, summary, bits))
}

/// One row per check name: the largest residual over `α` and `n`.
fn fold_checks(checks: &[FdCheck], floor: f64, digits: usize) -> Vec<ResultRow> {
    let mut names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    names
        .into_iter()
        .map(|name| {
            let mine: Vec<&FdCheck> = checks.iter().filter(|c| c.name == name).collect();
            let mut worst = (0.0f64, GridPoint { alpha: mine[0].alpha, t: 0.0, n: mine[0].n }, 0.0f64);
            for c in &mine {
                for p in &c.points {
                    if p.residual.abs() >= worst.0 {
                        worst = (p.residual.abs(), GridPoint { alpha: c.alpha, t: p.t, n: c.n }, 10.0 * p.estimate);
                    }
                }
            }
            let value = format_f64(worst.0, digits);
            ResultRow {
                name: name.to_string(),
                max_residual: value,
                argmax: worst.1,
                bound: format!("{:e}", worst.2.max(floor)),
                pass: mine.iter().all(|c| c.within_truncation(10.0, floor)),
            }
        })
        .collect()
}

fn format_f64(x: f64, digits: usize) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{:.*e}", digits.min(16), x)
    }
}
