use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::json;

use semijacobi::asymptotics::{convergence_study, doubling_ladder, Quantity};
use semijacobi::evolution::{pipeline_state, riccati_integrate, RiccatiOptions};
use semijacobi::ladder::{build_aux_table, AuxTable};
use semijacobi::mp::format_float;
use semijacobi::orthocore::{build_ortho_table, build_ortho_table_with, write_table_csv, FactorPath};
use semijacobi::recur::{btd_iterate, max_rel_gap, write_iterate_csv};
use semijacobi::WeightParams;

use crate::args::{AsymptoticsArgs, Cli, IterateArgs, PathArg, QuantityArg, RiccatiArgs, TableArgs};
use crate::config::{sink, write_json, GridSpec, RunConfig};
use crate::Failure;

pub fn table(cli: &Cli, args: &TableArgs) -> Result<bool, Failure> {
    let mut config = RunConfig::new(cli, "table", args.alpha.clone(), args.t.clone(), args.n_max);
    config.output = args.out.clone();
    config.format = "csv";
    config.validate()?;
    if args.t.is_empty() {
        return Err(Failure::Usage("t: at least one value is required".into()));
    }
    if args.n_max < 1 {
        return Err(Failure::Usage("n_max must be at least 1".into()));
    }
    let pairs: Vec<(f64, f64)> = args
        .alpha
        .iter()
        .flat_map(|&a| args.t.iter().map(move |&t| (a, t)))
        .collect();
    if args.out.is_none() && pairs.len() > 1 {
        return Err(Failure::Usage("several (alpha, t) pairs need --out DIR".into()));
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
    }
    let path = match args.path {
        PathArg::Full => FactorPath::Full,
        PathArg::EvenOdd => FactorPath::EvenOdd,
    };
    let ctx = config.table_ctx(args.n_max)?;
    for (alpha, t) in pairs {
        let table = build_ortho_table_with(WeightParams::new(alpha, t)?, args.n_max, &ctx, path)?;
        let aux = build_aux_table(&table);
        match &args.out {
            None => write_table_csv(&table, std::io::stdout().lock())?,
            Some(dir) => {
                let stem = format!("alpha{alpha}_t{t}");
                write_table_csv(&table, fs::File::create(dir.join(format!("table_{stem}.csv")))?)?;
                write_aux_csv(&aux, args.n_max, fs::File::create(dir.join(format!("aux_{stem}.csv")))?, cli.digits)?;
            }
        }
    }
    Ok(true)
}

/// CSV: `n, R_n, r_n, H_n`.
fn write_aux_csv<W: Write>(aux: &AuxTable, n_max: usize, out: W, digits: u32) -> Result<(), Failure> {
    let digits = digits as usize + 5;
    let err = |e: csv::Error| Failure::Failed(format!("write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "R_n", "r_n", "H_n"]).map_err(err)?;
    for n in 0..=n_max.min(aux.n_max()) {
        w.write_record([
            n.to_string(),
            format_float(aux.big_r(n), digits),
            format_float(aux.small_r(n), digits),
            format_float(aux.big_h(n), digits),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn asymptotics(cli: &Cli, args: &AsymptoticsArgs) -> Result<bool, Failure> {
    let quantity = match args.quantity {
        QuantityArg::Beta => Quantity::Beta,
        QuantityArg::P => Quantity::P,
        QuantityArg::Hankel => Quantity::Hankel,
    };
    let mut config = RunConfig::new(cli, &format!("asymptotics {}", quantity.name()), vec![args.alpha], vec![args.t], args.n_max);
    config.output = args.out.clone();
    config.validate()?;
    let ladder = doubling_ladder(args.n_min, args.n_max);
    if ladder.len() < 4 {
        return Err(Failure::Usage(format!(
            "n ladder {}..{} has {} rungs; at least 4 are needed",
            args.n_min,
            args.n_max,
            ladder.len()
        )));
    }
    let params = WeightParams::new(args.alpha, args.t)?;
    let ctx = config.table_ctx(args.n_max)?;
    let table = build_ortho_table_with(params, args.n_max, &ctx, FactorPath::EvenOdd)?;
    let study = convergence_study(quantity, &table, &ladder)?;
    if let Some(path) = &args.csv {
        study.write_csv(fs::File::create(path)?, cli.digits as usize + 5)?;
    }
    let expected = quantity.expected_slope();
    let slope = study.fit.as_ref().map(|f| f.slope);
    let pass = slope.is_some_and(|s| (s - expected).abs() <= args.slope_tolerance);
    if study.exponential_regime {
        eprintln!("note: every inverse-power coefficient vanishes; exponential regime");
    }
    let rows: Vec<_> = study
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "abs_error": format_float(&r.abs_error, 6),
                "running_slope": r.running_slope,
                "regime": r.regime,
                "at_floor": r.at_floor,
            })
        })
        .collect();
    let value = json!({
        "quantity": quantity.name(),
        "alpha": args.alpha,
        "t": args.t,
        "ladder": ladder,
        "expected_slope": expected,
        "slope": slope,
        "slope_tolerance": args.slope_tolerance,
        "fit": study.fit,
        "fit_error": study.fit_error,
        "exponential_regime": study.exponential_regime,
        "rows": rows,
        "pass": pass,
        "config": config,
        "precision": table.meta(),
    });
    write_json(args.out.as_deref(), &value)?;
    Ok(pass)
}

pub fn riccati(cli: &Cli, args: &RiccatiArgs) -> Result<bool, Failure> {
    let mut config = RunConfig::new(cli, "riccati", vec![args.alpha], vec![args.t_start, args.t_end], args.n);
    config.output = args.out.clone();
    config.grid = Some(GridSpec {
        t_start: args.t_start,
        t_end: args.t_end,
        points: 5,
    });
    config.validate()?;
    if let Some(dx) = args.dense_step {
        if !(dx > 0.0) {
            return Err(Failure::Usage("dense_step must be positive".into()));
        }
    }
    let ctx = config.scalar_ctx()?;
    let options = RiccatiOptions {
        rtol: args.rtol,
        atol: args.atol,
        dense_step: args.dense_step,
    };
    let sol = riccati_integrate(args.alpha, args.n, args.t_start, args.t_end, options, &ctx)?;
    let target = pipeline_state(args.alpha, args.n, args.t_end, &ctx)?;
    if let Some(path) = &args.csv {
        let err = |e: csv::Error| Failure::Failed(format!("write failed: {e}"));
        let mut w = csv::Writer::from_writer(fs::File::create(path)?);
        w.write_record(["t", "R_n", "r_n"]).map_err(err)?;
        for s in &sol.states {
            w.write_record([format!("{:e}", s.t), format!("{:.17e}", s.big_r), format!("{:.17e}", s.small_r)])
                .map_err(err)?;
        }
        w.flush()?;
    }
    let gap_big = (sol.end.big_r - target.big_r).abs();
    let gap_small = (sol.end.small_r - target.small_r).abs();
    let pass = gap_big <= args.tolerance && gap_small <= args.tolerance;
    let value = json!({
        "alpha": args.alpha,
        "n": args.n,
        "end": {"t": sol.end.t, "R_n": sol.end.big_r, "r_n": sol.end.small_r},
        "pipeline": {"t": target.t, "R_n": target.big_r, "r_n": target.small_r},
        "gap_R_n": gap_big,
        "gap_r_n": gap_small,
        "tolerance": args.tolerance,
        "states": sol.states.len(),
        "pass": pass,
        "config": config,
    });
    write_json(args.out.as_deref(), &value)?;
    Ok(pass)
}

pub fn iterate(cli: &Cli, args: &IterateArgs) -> Result<bool, Failure> {
    let mut config = RunConfig::new(cli, "iterate", vec![args.alpha], vec![args.t], args.n_max);
    config.output = args.out.clone();
    config.validate()?;
    if args.n_max < 1 {
        return Err(Failure::Usage("n_max must be at least 1".into()));
    }
    let params = WeightParams::new(args.alpha, args.t)?;
    let iter = btd_iterate(params, args.n_max, &config.scalar_ctx()?)?;
    let table = build_ortho_table(params, args.n_max, &config.table_ctx(args.n_max)?)?;
    if let Some(path) = &args.csv {
        write_iterate_csv(&iter, &table, sink(Some(PathBuf::as_path(path)))?)?;
    }
    let gap = max_rel_gap(&iter, &table, args.n_max);
    let pass = gap <= args.tolerance;
    let value = json!({
        "alpha": args.alpha,
        "t": args.t,
        "n_max": args.n_max,
        "max_rel_gap": gap,
        "tolerance": args.tolerance,
        "digits_lost": iter.digits_lost.last(),
        "mantissa_bits": iter.bits,
        "pass": pass,
        "config": config,
    });
    write_json(args.out.as_deref(), &value)?;
    Ok(pass)
}
