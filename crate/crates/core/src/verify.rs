//! The inequality checks: each one assembles rearrangements of `|f|`, `|∇f|`,
//! the surrogate `(−f*)′·I` and the symmetrized field into a pair of curves
//! on a common abscissa and reports the largest violation.
//!
//! Curves over `s` are reported at the right edges `t_j = (j+1)/M` of the
//! s-grid. The Orlicz equality check is indexed by hinge offsets instead.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::gaussian::{equal_measure_grid, GaussianGrid};
use crate::majorize::{ri_norm, RINorm, DEFAULT_HINGE_COUNT};
use crate::rearrange::{
    abs_values, descending_order, rearrange_cells, surrogate, Profile, SGrid, SampledCurve,
};
use crate::symmetrize::{derivative_resolution, symmetrized_field, Interpolation, IDENTITY_BAND};

/// Default s-grid size.
pub const DEFAULT_SGRID: usize = 4096;

/// One verified inequality (or identity) on one field and grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub check_name: String,
    pub field_label: String,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// Where the curves are sampled: s-grid edges, or hinge offsets.
    pub abscissa: Vec<f64>,
    pub lhs_curve: Vec<f64>,
    pub rhs_curve: Vec<f64>,
    /// `max(lhs − rhs)`, or `max |lhs − rhs|` when two-sided.
    pub max_violation: f64,
    /// `min(rhs − lhs)`.
    pub min_margin: f64,
    pub tolerance: f64,
    pub two_sided: bool,
    pub pass: bool,
    pub runtime_ms: u64,
}

impl IneqReport {
    #[allow(clippy::too_many_arguments)]
    fn from_curves(
        check_name: impl Into<String>,
        a: &Analysis,
        abscissa: Vec<f64>,
        lhs_curve: Vec<f64>,
        rhs_curve: Vec<f64>,
        tolerance: f64,
        two_sided: bool,
        started: Instant,
    ) -> Self {
        debug_assert_eq!(lhs_curve.len(), rhs_curve.len());
        let diffs = lhs_curve.iter().zip(&rhs_curve).map(|(l, r)| l - r);
        let max_violation = if two_sided {
            diffs.map(f64::abs).fold(0.0, nan_max)
        } else {
            diffs.fold(f64::NEG_INFINITY, nan_max)
        };
        let min_margin =
            lhs_curve
                .iter()
                .zip(&rhs_curve)
                .map(|(l, r)| r - l)
                .fold(
                    f64::INFINITY,
                    |m, v| if v.is_nan() { f64::NAN } else { m.min(v) },
                );
        IneqReport {
            check_name: check_name.into(),
            field_label: a.label.clone(),
            dim: a.dim,
            n: a.n,
            m: a.s_grid.len(),
            abscissa,
            lhs_curve,
            rhs_curve,
            max_violation,
            min_margin,
            tolerance,
            two_sided,
            pass: max_violation <= tolerance,
            runtime_ms: started.elapsed().as_millis() as u64,
        }
    }
}

fn nan_max(m: f64, v: f64) -> f64 {
    if v.is_nan() || m.is_nan() {
        f64::NAN
    } else {
        m.max(v)
    }
}

/// Per-run knobs shared by all checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckOptions {
    /// Replaces the default tolerance model.
    pub tolerance: Option<f64>,
    /// Compare two-sided (`|lhs − rhs|`), for equality cases.
    pub equality: bool,
    /// Hinge offsets for the Orlicz equality check.
    pub c_grid: Option<Vec<f64>>,
}

/// Everything the checks share for one `(field, grid, M)`.
#[derive(Debug, Clone)]
pub struct Analysis {
    label: String,
    dim: usize,
    n: usize,
    smooth: bool,
    s_grid: SGrid,
    resolution: usize,
    cell_measure: f64,
    /// `|f|` sorted in descending order.
    sorted_abs: Vec<f64>,
    /// `Σ |∇f|·measure` over the first `k` cells of the descending order.
    grad_prefix: Vec<f64>,
    f_star: Profile,
    grad_sup: f64,
    grad_star: Profile,
    surrogate: SampledCurve,
    surrogate_star: Profile,
    sym_grad: Vec<f64>,
    sym_grad_star: Profile,
}

impl Analysis {
    pub fn new(field: &ScalarField, grid: &GaussianGrid, m: usize) -> Result<Self> {
        if field.dim() != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "field has dimension {} but the grid has {}",
                field.dim(),
                grid.dim()
            )));
        }
        let s_grid = SGrid::new(m)?;
        let resolution = derivative_resolution(grid, m);
        let cell_measure = grid.cell_measure();

        let values = abs_values(field, grid)?;
        let order = descending_order(&values);
        let mut grad = vec![0.0; field.dim()];
        let grad_norms: Vec<f64> = grid
            .points()
            .map(|x| {
                field.gradient_into(x, &mut grad);
                grad.iter().map(|g| g * g).sum::<f64>().sqrt()
            })
            .collect();
        if let Some(g) = grad_norms.iter().find(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!(
                "gradient of `{}` has norm {g}",
                field.label()
            )));
        }
        let mut grad_prefix = Vec::with_capacity(order.len() + 1);
        grad_prefix.push(0.0);
        let mut acc = 0.0;
        for &i in &order {
            acc += grad_norms[i] * cell_measure;
            grad_prefix.push(acc);
        }
        let sorted_abs: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let f_star = Profile::uniform(sorted_abs.clone())?;
        let grad_sup = grad_norms.iter().copied().fold(0.0, f64::max);
        let grad_star = rearrange_cells(&grad_norms)?;

        let surrogate = surrogate(&f_star, s_grid, resolution);
        let surrogate_star = surrogate.rearranged();

        let sym = symmetrized_field(&f_star, Interpolation::Linear { resolution }, field.dim())?;
        let sym_grad: Vec<f64> = grid.points().map(|x| sym.gradient_norm(x)).collect();
        let sym_grad_star = rearrange_cells(&sym_grad)?;

        Ok(Analysis {
            label: field.label().to_string(),
            dim: field.dim(),
            n: grid.cells_per_axis(),
            smooth: field.is_smooth(),
            s_grid,
            resolution,
            cell_measure,
            sorted_abs,
            grad_prefix,
            f_star,
            grad_sup,
            grad_star,
            surrogate,
            surrogate_star,
            sym_grad,
            sym_grad_star,
        })
    }

    pub fn s_grid(&self) -> SGrid {
        self.s_grid
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `f*_μ`.
    pub fn rearrangement(&self) -> &Profile {
        &self.f_star
    }

    /// `|∇f|*_μ`.
    pub fn gradient_rearrangement(&self) -> &Profile {
        &self.grad_star
    }

    /// `|∇f°|*_μ`.
    pub fn symmetrized_gradient_rearrangement(&self) -> &Profile {
        &self.sym_grad_star
    }

    /// `(−f*_μ)′·I` on the s-grid.
    pub fn surrogate(&self) -> &SampledCurve {
        &self.surrogate
    }

    /// Lebesgue rearrangement of the surrogate.
    pub fn surrogate_rearrangement(&self) -> &Profile {
        &self.surrogate_star
    }

    /// Surrogate at `s`, linear between s-grid points.
    pub fn surrogate_at(&self, s: f64) -> f64 {
        let v = self.surrogate.values();
        let u = s * v.len() as f64 - 0.5;
        if u.is_nan() || u <= 0.0 {
            return v[0];
        }
        let j = u.floor() as usize;
        if j + 1 >= v.len() {
            return v[v.len() - 1];
        }
        let frac = u - j as f64;
        v[j] + frac * (v[j + 1] - v[j])
    }

    /// `c₁/√N + c₂/M` with `c₁ = 5·max|∇f|` over cells and `c₂ = 10·max`
    /// surrogate; doubled for non-smooth fields.
    pub fn default_tolerance(&self) -> f64 {
        let c1 = 5.0 * self.grad_sup;
        let c2 = 10.0 * self.surrogate.sup().max(0.0);
        let tol = c1 / (self.n as f64).sqrt() + c2 / self.s_grid.len() as f64;
        if self.smooth {
            tol
        } else {
            2.0 * tol
        }
    }

    fn tolerance(&self, opts: &CheckOptions) -> f64 {
        opts.tolerance.unwrap_or_else(|| self.default_tolerance())
    }

    fn edges(&self) -> Vec<f64> {
        self.s_grid.edges().collect()
    }

    fn cumulative(&self, p: &Profile) -> Vec<f64> {
        self.s_grid.edges().map(|t| p.integral_to(t)).collect()
    }

    /// `∫_{|f| > f*(t)} |∇f| dγₙ` on grid data.
    pub fn level_set_gradient_integral(&self, t: f64) -> f64 {
        let level = self.f_star.value_at(t);
        let count = self.sorted_abs.partition_point(|&v| v > level);
        self.grad_prefix[count]
    }

    /// Half-width of the pointwise stencil: one block, and at least
    /// [`POINTWISE_MIN_CELLS`] cells so that every branch of a level set
    /// contributes several cells.
    pub fn pointwise_half_width(&self) -> f64 {
        (1.0 / self.resolution as f64).max(POINTWISE_MIN_CELLS as f64 * self.cell_measure)
    }

    /// Pointwise Mazya–Talenti sides at `s`: both the surrogate and the
    /// derivative of [`Self::level_set_gradient_integral`] averaged over
    /// `(s − h, s + h)`, `h` = [`Self::pointwise_half_width`].
    pub fn mazya_talenti_pointwise(&self, s: f64) -> (f64, f64) {
        let h = self.pointwise_half_width();
        let (lo, hi) = ((s - h).max(0.0), (s + h).min(1.0));
        let lhs = self.surrogate.integral_between(lo, hi) / (hi - lo);
        let rhs = (self.level_set_gradient_integral(hi) - self.level_set_gradient_integral(lo))
            / (hi - lo);
        (lhs, rhs)
    }
}

/// Pólya–Szegő: `∫₀ᵗ |∇f°|*_μ ≤ ∫₀ᵗ |∇f|*_μ`.
pub fn check_polya_szego(a: &Analysis, opts: &CheckOptions) -> IneqReport {
    let started = Instant::now();
    IneqReport::from_curves(
        "dos",
        a,
        a.edges(),
        a.cumulative(&a.sym_grad_star),
        a.cumulative(&a.grad_star),
        a.tolerance(opts),
        opts.equality,
        started,
    )
}

/// Reformulated principle: `∫₀ᵗ ((−f*)′·I)* ≤ ∫₀ᵗ |∇f|*_μ`.
pub fn check_reformulated(a: &Analysis, opts: &CheckOptions) -> IneqReport {
    let started = Instant::now();
    IneqReport::from_curves(
        "uno",
        a,
        a.edges(),
        a.cumulative(&a.surrogate_star),
        a.cumulative(&a.grad_star),
        a.tolerance(opts),
        opts.equality,
        started,
    )
}

/// `‖((−f*)′·I)*‖_X ≤ ‖|∇f|*_μ‖_X` for each norm. The curves are the
/// cumulative integrals of the two profiles; the verdict compares norms,
/// with the tolerance scaled by `max(1, ‖|∇f|*‖_X)`.
pub fn check_norm_inequality(
    a: &Analysis,
    norms: &[RINorm],
    opts: &CheckOptions,
) -> Result<Vec<IneqReport>> {
    norms
        .iter()
        .map(|x| {
            let started = Instant::now();
            let lhs = ri_norm(&a.surrogate_star, x)?;
            let rhs = ri_norm(&a.grad_star, x)?;
            let tolerance = a.tolerance(opts) * rhs.max(1.0);
            let mut report = IneqReport::from_curves(
                format!("norm[{x}]"),
                a,
                a.edges(),
                a.cumulative(&a.surrogate_star),
                a.cumulative(&a.grad_star),
                tolerance,
                opts.equality,
                started,
            );
            report.max_violation = if opts.equality {
                (lhs - rhs).abs()
            } else {
                lhs - rhs
            };
            report.min_margin = rhs - lhs;
            report.pass = report.max_violation <= tolerance;
            Ok(report)
        })
        .collect()
}

/// Mazya–Talenti, integrated: `∫₀ᵗ (−f*)′·I ≤ ∫_{|f| > f*(t)} |∇f| dγₙ`.
///
/// The pointwise form is also compared at s-grid points in the interior
/// band where `f*` drops across the block stencil and the surrogate is
/// resolved there (see [`RESOLVED_VARIATION`]); the reported violation is
/// the larger of the two.
pub fn check_mazya_talenti(a: &Analysis, opts: &CheckOptions) -> IneqReport {
    let started = Instant::now();
    let lhs = a.surrogate.cumulative();
    let rhs: Vec<f64> = a
        .s_grid
        .edges()
        .map(|t| a.level_set_gradient_integral(t))
        .collect();
    let mut report = IneqReport::from_curves(
        "mt",
        a,
        a.edges(),
        lhs,
        rhs,
        a.tolerance(opts),
        opts.equality,
        started,
    );
    let pointwise = pointwise_mazya_talenti_violation(a, opts.equality);
    if pointwise > report.max_violation || pointwise.is_nan() {
        report.max_violation = pointwise;
        report.pass = pointwise <= report.tolerance;
    }
    report.runtime_ms = started.elapsed().as_millis() as u64;
    report
}

/// Largest relative variation of the surrogate across the pointwise stencil
/// for the derivative there to count as resolved.
pub const RESOLVED_VARIATION: f64 = 0.25;

/// Minimum number of cells in the pointwise stencil's half-width.
pub const POINTWISE_MIN_CELLS: usize = 32;

fn pointwise_mazya_talenti_violation(a: &Analysis, two_sided: bool) -> f64 {
    let h = a.pointwise_half_width();
    let noise = 10.0 * f64::EPSILON.sqrt() * (1.0 + a.f_star.sup());
    let mut worst = f64::NEG_INFINITY;
    for s in a.s_grid.points() {
        if s < IDENTITY_BAND.0 || s > IDENTITY_BAND.1 {
            continue;
        }
        let drop = a.f_star.value_at(s - h) - a.f_star.value_at(s + h);
        if drop <= noise {
            continue;
        }
        let stencil = [
            a.surrogate_at(s - h),
            a.surrogate_at(s),
            a.surrogate_at(s + h),
        ];
        let hi = stencil.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = stencil.iter().copied().fold(f64::INFINITY, f64::min);
        if hi - lo > RESOLVED_VARIATION * hi {
            continue;
        }
        let (lhs, rhs) = a.mazya_talenti_pointwise(s);
        let v = if two_sided {
            (lhs - rhs).abs()
        } else {
            lhs - rhs
        };
        worst = nan_max(worst, v);
    }
    worst
}

/// Validated finite union of disjoint open intervals in (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Requires `0 ≤ aᵢ < bᵢ ≤ 1` and `bᵢ ≤ aᵢ₊₁`.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidIntervals("no intervals given".into()));
        }
        for &(a, b) in &intervals {
            if !(0.0 <= a && a < b && b <= 1.0) {
                return Err(Error::InvalidIntervals(format!(
                    "({a}, {b}) is not a nonempty interval in (0, 1)"
                )));
            }
        }
        if let Some(w) = intervals.windows(2).find(|w| w[0].1 > w[1].0) {
            return Err(Error::InvalidIntervals(format!(
                "({}, {}) and ({}, {}) overlap or are out of order",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(IntervalUnion { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// `E ∩ (0, t)`, as interval pieces.
    fn truncated(&self, t: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.intervals
            .iter()
            .filter(move |(a, _)| *a < t)
            .map(move |&(a, b)| (a, b.min(t)))
    }
}

/// `a,b;c,d;...`
impl FromStr for IntervalUnion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let bounds: Vec<&str> = part.split(',').collect();
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidIntervals(format!("cannot read `{part}`")))
            };
            match bounds.as_slice() {
                [a, b] => intervals.push((parse(a)?, parse(b)?)),
                _ => return Err(Error::InvalidIntervals(format!("`{part}` is not `a,b`"))),
            }
        }
        IntervalUnion::new(intervals)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(a, b)| format!("{a},{b}"))
            .collect();
        f.write_str(&parts.join(";"))
    }
}

/// `∫_{E∩(0,t)} (−f*)′·I ≤ ∫₀^{|E∩(0,t)|} |∇f|*_μ` at every s-grid edge; the
/// last point (`t = 1`) is the statement for `E` itself.
pub fn check_interval_bound(a: &Analysis, e: &IntervalUnion, opts: &CheckOptions) -> IneqReport {
    let started = Instant::now();
    let mut lhs = Vec::with_capacity(a.s_grid.len());
    let mut rhs = Vec::with_capacity(a.s_grid.len());
    for t in a.s_grid.edges() {
        let (mut integral, mut measure) = (0.0, 0.0);
        for (lo, hi) in e.truncated(t) {
            integral += a.surrogate.integral_between(lo, hi);
            measure += hi - lo;
        }
        lhs.push(integral);
        rhs.push(a.grad_star.integral_to(measure));
    }
    IneqReport::from_curves(
        "interval",
        a,
        a.edges(),
        lhs,
        rhs,
        a.tolerance(opts),
        opts.equality,
        started,
    )
}

/// Hinge offsets on `[0, max(sup surrogate, sup |∇f°|)]`.
pub fn default_orlicz_c_grid(a: &Analysis, count: usize) -> Vec<f64> {
    let top = a.surrogate.sup().max(a.sym_grad_star.sup()).max(0.0);
    let count = count.max(2);
    (0..count)
        .map(|i| top * i as f64 / (count - 1) as f64)
        .collect()
}

/// Change of variables, as an identity for each hinge `A_c`:
/// `∫₀¹ A_c((−f*)′·I) ds = ∫ A_c(|∇f°|) dγₙ`. Always two-sided.
pub fn check_orlicz_equality(a: &Analysis, opts: &CheckOptions) -> IneqReport {
    let started = Instant::now();
    let c_grid = opts
        .c_grid
        .clone()
        .unwrap_or_else(|| default_orlicz_c_grid(a, DEFAULT_HINGE_COUNT));
    let s_weight = a.s_grid.spacing();
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = c_grid
        .iter()
        .map(|&c| {
            let l: f64 = a
                .surrogate
                .values()
                .iter()
                .map(|v| (v - c).max(0.0))
                .sum::<f64>()
                * s_weight;
            let r: f64 = a.sym_grad.iter().map(|v| (v - c).max(0.0)).sum::<f64>() * a.cell_measure;
            (l, r)
        })
        .unzip();
    IneqReport::from_curves(
        "orlicz",
        a,
        c_grid,
        lhs,
        rhs,
        a.tolerance(opts),
        true,
        started,
    )
}

/// Checks with curves that can be compared across grid refinements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveCheck {
    PolyaSzego,
    Reformulated,
    MazyaTalenti,
    OrliczEquality,
}

impl CurveCheck {
    pub fn name(&self) -> &'static str {
        match self {
            CurveCheck::PolyaSzego => "dos",
            CurveCheck::Reformulated => "uno",
            CurveCheck::MazyaTalenti => "mt",
            CurveCheck::OrliczEquality => "orlicz",
        }
    }

    pub fn run(&self, a: &Analysis, opts: &CheckOptions) -> IneqReport {
        match self {
            CurveCheck::PolyaSzego => check_polya_szego(a, opts),
            CurveCheck::Reformulated => check_reformulated(a, opts),
            CurveCheck::MazyaTalenti => check_mazya_talenti(a, opts),
            CurveCheck::OrliczEquality => check_orlicz_equality(a, opts),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    /// Sup distance of both curves from the reference run.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub check: String,
    pub reference_n: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `−log defect` against `log N`; infinite when
    /// fewer than two defects are nonzero.
    pub order: f64,
    /// `v_{k+1} ≤ v_k + ½|v_k|` along the refinement, on `max(v, 0)`.
    pub non_increasing: bool,
}

/// Slack factor for non-increase along refinement.
pub const CONVERGENCE_SLACK: f64 = 1.5;

/// Runs each check at every `N` in `ns` and against a reference at `4·max N`.
pub fn convergence_study(
    field: &ScalarField,
    checks: &[CurveCheck],
    ns: &[usize],
    m: usize,
) -> Result<Vec<ConvergenceTable>> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "refinement sizes must be increasing, got {ns:?}"
        )));
    }
    let reference_n = 4 * ns[ns.len() - 1];
    let reference_grid = equal_measure_grid(field.dim(), reference_n)?;
    let reference = Analysis::new(field, &reference_grid, m)?;
    let runs = ns
        .iter()
        .map(|&n| {
            let grid = equal_measure_grid(field.dim(), n)?;
            Analysis::new(field, &grid, m)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tables = Vec::with_capacity(checks.len());
    for check in checks {
        let mut opts = CheckOptions::default();
        if *check == CurveCheck::OrliczEquality {
            opts.c_grid = Some(default_orlicz_c_grid(&reference, DEFAULT_HINGE_COUNT));
        }
        let target = check.run(&reference, &opts);
        let rows: Vec<ConvergenceRow> = runs
            .iter()
            .map(|a| {
                let r = check.run(a, &opts);
                let defect = curve_distance(&r.lhs_curve, &target.lhs_curve)
                    .max(curve_distance(&r.rhs_curve, &target.rhs_curve));
                ConvergenceRow {
                    n: r.n,
                    max_violation: r.max_violation,
                    tolerance: r.tolerance,
                    defect,
                }
            })
            .collect();
        let non_increasing = rows.windows(2).all(|w| {
            let (prev, next) = (w[0].max_violation.max(0.0), w[1].max_violation.max(0.0));
            next <= CONVERGENCE_SLACK * prev + 1e-15
        });
        let order = fitted_order(
            &rows
                .iter()
                .map(|r| (r.n as f64, r.defect))
                .collect::<Vec<_>>(),
        );
        tables.push(ConvergenceTable {
            check: check.name().to_string(),
            reference_n,
            rows,
            order,
            non_increasing,
        });
    }
    Ok(tables)
}

fn curve_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, nan_max)
}

/// `−slope` of the least-squares line through `(log N, log e)` over positive `e`.
pub fn fitted_order(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| (n.ln(), e.ln()))
        .collect();
    if logs.len() < 2 {
        return f64::INFINITY;
    }
    let k = logs.len() as f64;
    let (mx, my) = (
        logs.iter().map(|p| p.0).sum::<f64>() / k,
        logs.iter().map(|p| p.1).sum::<f64>() / k,
    );
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}
