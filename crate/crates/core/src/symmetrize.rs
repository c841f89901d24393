//! Gaussian symmetrization along the first coordinate:
//! `f°(x) = f*_μ(Φ(x₁))`.

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::gaussian::{cdf_value, quantile, GaussianGrid};
use crate::rearrange::{decreasing_rearrangement, surrogate, LinearInterpolant, Profile, SGrid};

/// How the step profile is read off between its knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// The step function itself: `f°` takes exactly the rearranged values.
    Constant,
    /// Block averages at the given resolution, joined linearly in `x₁`, so
    /// `f°` has a nontrivial gradient.
    Linear { resolution: usize },
}

/// Interior band of the s-grid used by the pointwise identity.
pub const IDENTITY_BAND: (f64, f64) = (0.05, 0.95);

enum Reader {
    Constant(Profile),
    Linear(LinearInterpolant),
}

impl Reader {
    fn eval(&self, x1: f64) -> f64 {
        match self {
            Reader::Constant(p) => p.value_at(cdf_value(x1)),
            Reader::Linear(q) => q.eval(x1),
        }
    }
}

/// `x ↦ p(Φ(x₁))` on ℝ^`dim`, with a finite-difference gradient.
pub fn symmetrized_field(
    p: &Profile,
    interpolation: Interpolation,
    dim: usize,
) -> Result<ScalarField> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "field dimension must be positive".into(),
        ));
    }
    let reader = match interpolation {
        Interpolation::Constant => Reader::Constant(p.clone()),
        Interpolation::Linear { resolution } => {
            if resolution < 2 {
                return Err(Error::InvalidArgument(format!(
                    "interpolation resolution must be at least 2, got {resolution}"
                )));
            }
            Reader::Linear(p.linear_interpolant(resolution))
        }
    };
    Ok(ScalarField::from_fn(dim, "symmetrized", move |x| {
        reader.eval(x[0])
    }))
}

/// Block resolution for differentiating rearrangements on `grid` against an
/// s-grid of `m` points: `min(M, N/2)`. A block then holds at least two
/// axis rows of cells, the tie plateau of a field that depends on `|x₁|`
/// only, so plateaus average out instead of producing alternating slopes.
pub fn derivative_resolution(grid: &GaussianGrid, m: usize) -> usize {
    m.min(grid.cells_per_axis() / 2).max(2)
}

/// `max |(−f*)′(s)·I(s) − |∇f°|(Φ⁻¹(s))|` over s-grid points in
/// [`IDENTITY_BAND`], with `f°` in linear mode and `∇f°` by central
/// differences.
pub fn pointwise_identity_gap(field: &ScalarField, grid: &GaussianGrid, m: usize) -> Result<f64> {
    if !field.is_smooth() {
        return Err(Error::NonSmoothField(field.label().to_string()));
    }
    let s_grid = SGrid::new(m)?;
    let p = decreasing_rearrangement(field, grid)?;
    let r = derivative_resolution(grid, m);
    let lhs_curve = surrogate(&p, s_grid, r);
    let sym = symmetrized_field(&p, Interpolation::Linear { resolution: r }, 1)?;
    let mut gap = 0.0f64;
    for (s, &lhs) in s_grid.points().zip(lhs_curve.values()) {
        if s < IDENTITY_BAND.0 || s > IDENTITY_BAND.1 {
            continue;
        }
        let x = quantile(s)?;
        let rhs = sym.gradient_norm(&[x]);
        gap = gap.max((lhs - rhs).abs());
    }
    Ok(gap)
}

/// `sup_s |(f°)*(s) − f*(s)|` at the cell midpoints `(k + 1/2)/Nⁿ`, with `f°`
/// in constant mode.
pub fn symmetrization_preserves_rearrangement(
    field: &ScalarField,
    grid: &GaussianGrid,
) -> Result<f64> {
    let p = decreasing_rearrangement(field, grid)?;
    let sym = symmetrized_field(&p, Interpolation::Constant, field.dim())?;
    let q = decreasing_rearrangement(&sym, grid)?;
    let len = grid.len() as f64;
    Ok((0..grid.len())
        .map(|k| {
            let s = (k as f64 + 0.5) / len;
            (q.value_at(s) - p.value_at(s)).abs()
        })
        .fold(0.0, f64::max))
}
