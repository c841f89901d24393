//! Executes a [`RunConfig`] and emits its report.

use std::path::PathBuf;
use std::time::Instant;

use gaussym::fields::{
    builtin_defaults, builtin_description, builtin_field, parse_field, BUILTIN_NAMES,
};
use gaussym::gaussian::equal_measure_grid;
use gaussym::verify::{
    check_interval_bound, check_norm_inequality, convergence_study, Analysis, CheckOptions,
    ConvergenceTable, CurveCheck, IneqReport, CONVERGENCE_SLACK,
};
use gaussym::ScalarField;

use crate::config::{CheckKind, FieldSpec, RunConfig};
use crate::error::CliError;
use crate::report::{curves_csv, file_stem, write_atomic, CheckEntry, Report, REPORT_VERSION};

/// One finished check, with its curves when it has any.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub entry: CheckEntry,
    pub curves: Option<IneqReport>,
}

pub fn build_field(spec: &FieldSpec, dim: usize) -> Result<ScalarField, CliError> {
    Ok(match spec {
        FieldSpec::Expr(src) => parse_field(src, dim)?,
        FieldSpec::Builtin { name, params } => builtin_field(name, params, dim)?,
    })
}

fn entry_from(r: &IneqReport) -> CheckEntry {
    CheckEntry {
        name: r.check_name.clone(),
        field: r.field_label.clone(),
        dim: r.dim,
        n: r.n,
        m: r.m,
        tolerance: r.tolerance,
        max_violation: r.max_violation,
        pass: r.pass,
        runtime_ms: r.runtime_ms,
        curves_file: None,
    }
}

/// Refinement `N/16, N/4, N` of the reformulated check, folded into one
/// entry: the violation is the larger of the excess over the slack rule and
/// the shortfall of the fitted order below ½, against tolerance 0.
fn converge_entry(
    table: &ConvergenceTable,
    field: &ScalarField,
    cfg: &RunConfig,
    started: Instant,
) -> CheckEntry {
    let excess = table
        .rows
        .windows(2)
        .map(|w| {
            w[1].max_violation.max(0.0) - CONVERGENCE_SLACK * w[0].max_violation.max(0.0) - 1e-15
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let max_violation = excess.max(0.5 - table.order);
    CheckEntry {
        name: "converge".into(),
        field: field.label().to_string(),
        dim: field.dim(),
        n: cfg.grid,
        m: cfg.sgrid,
        tolerance: 0.0,
        max_violation,
        pass: max_violation <= 0.0,
        runtime_ms: started.elapsed().as_millis() as u64,
        curves_file: None,
    }
}

/// Runs every requested check; nothing is written.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Outcome>, CliError> {
    let field = build_field(&cfg.field, cfg.dim)?;
    let grid = equal_measure_grid(cfg.dim, cfg.grid)?;
    let analysis = Analysis::new(&field, &grid, cfg.sgrid)?;
    let opts = CheckOptions {
        tolerance: cfg.tol,
        equality: cfg.equality,
        c_grid: None,
    };
    let curve = |r: IneqReport| Outcome {
        entry: entry_from(&r),
        curves: Some(r),
    };

    let mut outcomes = Vec::new();
    for kind in &cfg.checks {
        match kind {
            CheckKind::Uno => outcomes.push(curve(CurveCheck::Reformulated.run(&analysis, &opts))),
            CheckKind::Dos => outcomes.push(curve(CurveCheck::PolyaSzego.run(&analysis, &opts))),
            CheckKind::Mt => outcomes.push(curve(CurveCheck::MazyaTalenti.run(&analysis, &opts))),
            CheckKind::Orlicz => {
                outcomes.push(curve(CurveCheck::OrliczEquality.run(&analysis, &opts)))
            }
            CheckKind::Norm => outcomes.extend(
                check_norm_inequality(&analysis, &cfg.norms, &opts)?
                    .into_iter()
                    .map(curve),
            ),
            CheckKind::Interval => {
                let e = cfg.intervals.as_ref().expect("validated with the config");
                outcomes.push(curve(check_interval_bound(&analysis, e, &opts)));
            }
            CheckKind::Converge => {
                let started = Instant::now();
                let ns = [cfg.grid / 16, cfg.grid / 4, cfg.grid];
                let tables =
                    convergence_study(&field, &[CurveCheck::Reformulated], &ns, cfg.sgrid)?;
                outcomes.push(Outcome {
                    entry: converge_entry(&tables[0], &field, cfg, started),
                    curves: None,
                });
            }
        }
    }
    for o in &outcomes {
        if !(o.entry.max_violation.is_finite() && o.entry.tolerance.is_finite()) {
            return Err(CliError::Runtime(format!(
                "check `{}` produced a non-finite result (violation {}, tolerance {})",
                o.entry.name, o.entry.max_violation, o.entry.tolerance
            )));
        }
    }
    Ok(outcomes)
}

/// Writes curve files first and the JSON report last, each atomically.
pub fn emit(cfg: &RunConfig, outcomes: &mut [Outcome]) -> Result<Report, CliError> {
    if let Some(dir) = &cfg.curves {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        for (i, o) in outcomes.iter_mut().enumerate() {
            if let Some(r) = &o.curves {
                let path: PathBuf = dir.join(format!("{i:02}_{}.csv", file_stem(&r.check_name)));
                write_atomic(&path, &curves_csv(&r.abscissa, &r.lhs_curve, &r.rhs_curve))?;
                o.entry.curves_file = Some(path.display().to_string());
            }
        }
    }
    let report = Report {
        version: REPORT_VERSION,
        checks: outcomes.iter().map(|o| o.entry.clone()).collect(),
    };
    if let Some(out) = &cfg.out {
        write_atomic(out, &report.to_json())?;
    }
    Ok(report)
}

pub fn summary_line(e: &CheckEntry) -> String {
    format!(
        "{} {:<22} field={} dim={} N={} M={} max_violation={:.3e} tolerance={:.3e} ({} ms)",
        if e.pass { "PASS" } else { "FAIL" },
        e.name,
        e.field,
        e.dim,
        e.n,
        e.m,
        e.max_violation,
        e.tolerance,
        e.runtime_ms
    )
}

pub fn corpus_list() -> String {
    let mut out = String::new();
    for name in BUILTIN_NAMES {
        let defaults = builtin_defaults(name).expect("listed names are known");
        let params: Vec<String> = defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("{name:<28} {}\n", params.join(" ")));
    }
    out
}

pub fn corpus_describe(name: &str) -> Result<String, CliError> {
    let description = builtin_description(name)?;
    let defaults = builtin_defaults(name)?;
    let params: Vec<String> = defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Ok(format!(
        "{name}\n  {description}\n  defaults: {}\n",
        params.join(" ")
    ))
}
