//! Flags, the key=value config file, and their merge into a validated
//! [`RunConfig`]. Precedence: flags, then file, then defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gaussym::majorize::{parse_norm_list, RINorm};
use gaussym::rearrange::SGrid;
use gaussym::verify::{IntervalUnion, DEFAULT_SGRID};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "gaussym",
    version,
    about = "Gaussian rearrangement inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run inequality checks on one field.
    Verify(Box<VerifyArgs>),
    /// Inspect the built-in fields.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusAction {
    /// Names and default parameters.
    List,
    /// Formula, gradient and defaults of one field.
    Describe { name: String },
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// key=value file with the same keys as the long flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Field expression in x1, x2, x3.
    #[arg(long, conflicts_with = "builtin")]
    pub expr: Option<String>,
    /// Built-in field name (see `corpus list`).
    #[arg(long)]
    pub builtin: Option<String>,
    /// Built-in parameter override, `k=v`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Cells per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// s-grid points.
    #[arg(long)]
    pub sgrid: Option<usize>,
    /// Comma list from uno, dos, norm, mt, interval, orlicz, converge.
    #[arg(long)]
    pub checks: Option<String>,
    /// `a,b;c,d;...` for the interval check.
    #[arg(long)]
    pub intervals: Option<String>,
    /// Comma list such as `lp:2,lp:inf,lorentz:2,marcinkiewicz:2,orlicz:expsq`.
    #[arg(long)]
    pub norms: Option<String>,
    /// Absolute tolerance replacing the default model.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Compare two-sided.
    #[arg(long)]
    pub equality: bool,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-check CSV curves.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Reserved for randomized corpus extensions; currently unused.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Uno,
    Dos,
    Norm,
    Mt,
    Interval,
    Orlicz,
    Converge,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Uno,
        CheckKind::Dos,
        CheckKind::Norm,
        CheckKind::Mt,
        CheckKind::Interval,
        CheckKind::Orlicz,
        CheckKind::Converge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Uno => "uno",
            CheckKind::Dos => "dos",
            CheckKind::Norm => "norm",
            CheckKind::Mt => "mt",
            CheckKind::Interval => "interval",
            CheckKind::Orlicz => "orlicz",
            CheckKind::Converge => "converge",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        CheckKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Expr(String),
    Builtin {
        name: String,
        params: BTreeMap<String, f64>,
    },
}

/// A fully validated verify request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub dim: usize,
    pub grid: usize,
    pub sgrid: usize,
    pub checks: Vec<CheckKind>,
    pub intervals: Option<IntervalUnion>,
    pub norms: Vec<RINorm>,
    pub tol: Option<f64>,
    pub equality: bool,
    pub out: Option<PathBuf>,
    pub curves: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub const DEFAULT_CHECKS: [CheckKind; 2] = [CheckKind::Uno, CheckKind::Dos];

/// Smallest s-grid accepted.
pub const MIN_SGRID: usize = SGrid::MIN_POINTS;

/// Cells per axis when `--grid` is absent.
pub fn default_grid(dim: usize) -> usize {
    match dim {
        1 => 1024,
        2 => 128,
        _ => 32,
    }
}

/// Raw values from the config file, keyed like the long flags.
#[derive(Debug, Default)]
struct FileValues {
    values: BTreeMap<String, String>,
    params: Vec<String>,
}

fn read_config_file(path: &Path) -> Result<FileValues, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_config_text(text: &str) -> Result<FileValues, CliError> {
    const KEYS: [&str; 14] = [
        "expr",
        "builtin",
        "param",
        "dim",
        "grid",
        "sgrid",
        "checks",
        "intervals",
        "norms",
        "tol",
        "equality",
        "out",
        "curves",
        "seed",
    ];
    let mut file = FileValues::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if key == "param" {
            file.params.push(value.to_string());
        } else {
            file.values.insert(key.to_string(), value.to_string());
        }
    }
    Ok(file)
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::Config(format!("invalid value `{raw}` for {key}")))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("invalid value `{raw}` for {key}"))),
    }
}

fn parse_params(list: &[String], into: &mut BTreeMap<String, f64>) -> Result<(), CliError> {
    for kv in list {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter `{kv}` is not k=v")))?;
        into.insert(k.trim().to_string(), parse_value("param", v.trim())?);
    }
    Ok(())
}

fn parse_checks(raw: &str) -> Result<Vec<CheckKind>, CliError> {
    let mut checks = Vec::new();
    for name in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = CheckKind::parse(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown check `{name}`; expected one of uno, dos, norm, mt, interval, orlicz, converge"
            ))
        })?;
        if !checks.contains(&kind) {
            checks.push(kind);
        }
    }
    if checks.is_empty() {
        return Err(CliError::Config("no checks requested".into()));
    }
    Ok(checks)
}

impl VerifyArgs {
    /// Merges with the config file (if any) and validates.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => FileValues::default(),
        };
        resolve(self, &file)
    }
}

fn resolve(args: &VerifyArgs, file: &FileValues) -> Result<RunConfig, CliError> {
    let from_file = |key: &str| file.values.get(key).map(String::as_str);
    fn pick<T: std::str::FromStr + Clone>(
        flag: &Option<T>,
        file: Option<&str>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        match (flag, file) {
            (Some(v), _) => Ok(Some(v.clone())),
            (None, Some(raw)) => parse_value(key, raw).map(Some),
            (None, None) => Ok(None),
        }
    }

    let dim = pick(&args.dim, from_file("dim"), "dim")?.unwrap_or(1);
    let grid = pick(&args.grid, from_file("grid"), "grid")?.unwrap_or_else(|| default_grid(dim));
    if grid < 2 {
        return Err(CliError::Config(format!("grid must be ≥ 2 (got {grid})")));
    }
    if !(1..=3).contains(&dim) {
        return Err(CliError::Config(format!(
            "dim must be 1, 2 or 3 (got {dim})"
        )));
    }
    let sgrid = pick(&args.sgrid, from_file("sgrid"), "sgrid")?.unwrap_or(DEFAULT_SGRID);
    if sgrid < MIN_SGRID {
        return Err(CliError::Config(format!(
            "sgrid must be ≥ {MIN_SGRID} (got {sgrid})"
        )));
    }

    // A field given by flag replaces the file's field of either kind.
    let (expr, builtin) = if args.expr.is_some() || args.builtin.is_some() {
        (args.expr.clone(), args.builtin.clone())
    } else {
        (
            from_file("expr").map(String::from),
            from_file("builtin").map(String::from),
        )
    };
    let field = match (expr, builtin) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either expr or builtin, not both".into(),
            ))
        }
        (Some(e), None) => {
            if !args.params.is_empty() {
                return Err(CliError::Config("--param applies only to --builtin".into()));
            }
            FieldSpec::Expr(e)
        }
        (None, Some(name)) => {
            let mut params = BTreeMap::new();
            parse_params(&file.params, &mut params)?;
            parse_params(&args.params, &mut params)?;
            FieldSpec::Builtin { name, params }
        }
        (None, None) => {
            return Err(CliError::Config(
                "a field is required: use --expr or --builtin".into(),
            ))
        }
    };

    let checks = match (&args.checks, from_file("checks")) {
        (Some(raw), _) => parse_checks(raw)?,
        (None, Some(raw)) => parse_checks(raw)?,
        (None, None) => DEFAULT_CHECKS.to_vec(),
    };
    let intervals = match args.intervals.as_deref().or(from_file("intervals")) {
        Some(raw) => Some(raw.parse::<IntervalUnion>().map_err(CliError::from)?),
        None => None,
    };
    if checks.contains(&CheckKind::Interval) && intervals.is_none() {
        return Err(CliError::Config(
            "the interval check needs --intervals".into(),
        ));
    }
    let norms = match args.norms.as_deref().or(from_file("norms")) {
        Some(raw) => {
            let norms = parse_norm_list(raw)?;
            if norms.is_empty() {
                return Err(CliError::Config("empty norm list".into()));
            }
            norms
        }
        None => RINorm::default_family(),
    };
    let tol = pick(&args.tol, from_file("tol"), "tol")?;
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Config(format!(
                "tol must be a nonnegative number (got {t})"
            )));
        }
    }
    let equality = args.equality
        || match from_file("equality") {
            Some(raw) => parse_bool("equality", raw)?,
            None => false,
        };
    if checks.contains(&CheckKind::Converge) && grid / 16 < 2 {
        return Err(CliError::Config(format!(
            "the converge check refines from grid/16 and needs grid ≥ 32 (got {grid})"
        )));
    }

    Ok(RunConfig {
        field,
        dim,
        grid,
        sgrid,
        checks,
        intervals,
        norms,
        tol,
        equality,
        out: args
            .out
            .clone()
            .or_else(|| from_file("out").map(PathBuf::from)),
        curves: args
            .curves
            .clone()
            .or_else(|| from_file("curves").map(PathBuf::from)),
        seed: pick(&args.seed, from_file("seed"), "seed")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> VerifyArgs {
        let mut argv = vec!["gaussym", "verify"];
        argv.extend_from_slice(list);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Verify(a) => *a,
            Command::Corpus { .. } => unreachable!(),
        }
    }

    fn resolve_with(list: &[&str], file: &str) -> Result<RunConfig, CliError> {
        resolve(&args(list), &parse_config_text(file).unwrap())
    }

    #[test]
    fn defaults() {
        let c = resolve_with(&["--builtin", "coordinate"], "").unwrap();
        assert_eq!((c.dim, c.grid, c.sgrid), (1, 1024, DEFAULT_SGRID));
        assert_eq!(c.checks, DEFAULT_CHECKS.to_vec());
        assert_eq!(c.norms, RINorm::default_family());
        assert!(!c.equality && c.tol.is_none() && c.out.is_none());
        let c = resolve_with(&["--builtin", "coordinate", "--dim", "2"], "").unwrap();
        assert_eq!(c.grid, 128);
    }

    #[test]
    fn grid_is_validated_first() {
        let e = resolve_with(&["--grid", "0"], "").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("grid must be ≥ 2"), "{e}");
        let e = resolve_with(&["--grid", "1", "--builtin", "coordinate"], "").unwrap_err();
        assert!(e.to_string().contains("grid must be ≥ 2"));
    }

    #[test]
    fn flags_override_file() {
        let file = "# comment\nbuiltin = gaussian_bump\nparam = c=2\ngrid = 256\nchecks = mt\ntol=0.5\nequality = true\n";
        let c = resolve_with(&["--grid", "512", "--param", "c=3"], file).unwrap();
        assert_eq!(c.grid, 512);
        assert_eq!(c.checks, vec![CheckKind::Mt]);
        assert_eq!(c.tol, Some(0.5));
        assert!(c.equality);
        match c.field {
            FieldSpec::Builtin { name, params } => {
                assert_eq!(name, "gaussian_bump");
                assert_eq!(params.get("c"), Some(&3.0));
            }
            FieldSpec::Expr(_) => panic!("expected a builtin"),
        }
        let c = resolve_with(&["--expr", "x1"], file).unwrap();
        assert_eq!(c.field, FieldSpec::Expr("x1".into()));
    }

    #[test]
    fn rejects_bad_input() {
        for (list, file) in [
            (&["--builtin", "coordinate", "--checks", "uno,nope"][..], ""),
            (&["--builtin", "coordinate", "--checks", "interval"][..], ""),
            (
                &["--builtin", "coordinate", "--intervals", "0.5,0.2"][..],
                "",
            ),
            (&["--builtin", "coordinate", "--norms", "lp:0.5"][..], ""),
            (&["--builtin", "coordinate", "--dim", "4"][..], ""),
            (&["--builtin", "coordinate", "--sgrid", "4"][..], ""),
            (&["--builtin", "coordinate", "--tol=-1"][..], ""),
            (
                &[
                    "--builtin",
                    "coordinate",
                    "--grid",
                    "16",
                    "--checks",
                    "converge",
                ][..],
                "",
            ),
            (&["--expr", "x1", "--param", "a=1"][..], ""),
            (&["--builtin", "coordinate", "--param", "a"][..], ""),
            (&[][..], ""),
            (&["--builtin", "coordinate"][..], "grid = many"),
            (&[][..], "expr = x1\nbuiltin = coordinate"),
        ] {
            let e = resolve_with(list, file).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{list:?} {file:?}");
        }
        assert!(parse_config_text("colour = red").is_err());
        assert!(parse_config_text("just words").is_err());
    }

    #[test]
    fn checks_are_deduplicated_in_order() {
        let c = resolve_with(&["--builtin", "coordinate", "--checks", "mt, uno,mt"], "").unwrap();
        assert_eq!(c.checks, vec![CheckKind::Mt, CheckKind::Uno]);
    }
}
