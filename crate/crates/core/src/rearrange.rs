//! Distribution functions and decreasing rearrangements with respect to the
//! Gaussian measure (on grid data) and to Lebesgue measure on (0, 1).

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::gaussian::{iso_profile, quantile, GaussianGrid};
use crate::majorize::YoungFunction;

/// Nonincreasing step function on (0, 1].
///
/// Knots `0 = s₀ < s₁ < … < s_K = 1`; the value on `(s_{k-1}, s_k]` is
/// `v_k`, so the value at the knot `s_k` is `v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    knots: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Profile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || knots.len() != values.len() + 1 {
            return Err(Error::InvalidProfile(format!(
                "{} knots for {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
            return Err(Error::InvalidProfile("knots must run from 0 to 1".into()));
        }
        if knots
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
        {
            return Err(Error::InvalidProfile(
                "knots must be strictly increasing".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("profile value {v}")));
        }
        if let Some(k) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidProfile(format!(
                "values increase at piece {}: {} < {}",
                k + 1,
                values[k],
                values[k + 1]
            )));
        }
        let mut cumulative = Vec::with_capacity(knots.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for (w, v) in knots.windows(2).zip(&values) {
            acc += v * (w[1] - w[0]);
            cumulative.push(acc);
        }
        Ok(Profile {
            knots,
            values,
            cumulative,
        })
    }

    /// Profile with `values.len()` pieces of equal width.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let k = values.len();
        let knots = (0..=k).map(|i| i as f64 / k as f64).collect();
        Profile::new(knots, values)
    }

    pub fn constant(c: f64) -> Self {
        Profile::new(vec![0.0, 1.0], vec![c]).expect("single-piece profile")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `v₁`, the supremum.
    pub fn sup(&self) -> f64 {
        self.values[0]
    }

    /// Value at `s`, with `s ≤ 0` mapped to `v₁` and `s ≥ 1` to `v_K`.
    pub fn value_at(&self, s: f64) -> f64 {
        let k = self.knots[1..].partition_point(|&kn| kn < s);
        self.values[k.min(self.values.len() - 1)]
    }

    /// `∫₀ᵗ p(s) ds` for `t` clamped to [0, 1].
    pub fn integral_to(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return self.total();
        }
        let k = self.knots[1..].partition_point(|&kn| kn < t);
        self.cumulative[k] + self.values[k] * (t - self.knots[k])
    }

    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Lebesgue measure of `{s : p(s) > λ}`; a knot of the profile.
    pub fn superlevel_measure(&self, lambda: f64) -> f64 {
        self.knots[self.values.partition_point(|&v| v > lambda)]
    }

    /// Pieces as `(left, right, value)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.knots
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn scaled(&self, alpha: f64) -> Result<Profile> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be nonnegative, got {alpha}"
            )));
        }
        Profile::new(
            self.knots.clone(),
            self.values.iter().map(|v| v * alpha).collect(),
        )
    }

    /// Averages over `r` equal blocks of (0, 1]. Blocks inside a single piece
    /// keep that piece's value exactly.
    pub fn block_average(&self, r: usize) -> Profile {
        assert!(r > 0, "block count must be positive");
        let mut out = Vec::with_capacity(r);
        let mut k = 0;
        for j in 0..r {
            let (a, b) = (j as f64 / r as f64, (j + 1) as f64 / r as f64);
            while self.knots[k + 1] <= a && k + 1 < self.values.len() {
                k += 1;
            }
            let mut value = if self.knots[k + 1] >= b {
                self.values[k]
            } else {
                let mut acc = 0.0;
                let mut i = k;
                while i < self.values.len() && self.knots[i] < b {
                    let lo = self.knots[i].max(a);
                    let hi = self.knots[i + 1].min(b);
                    acc += self.values[i] * (hi - lo);
                    i += 1;
                }
                acc / (b - a)
            };
            // Round-off on tied pieces must not break monotonicity.
            if let Some(&prev) = out.last() {
                value = f64::min(value, prev);
            }
            out.push(value);
        }
        Profile::uniform(out).expect("block averages of a profile form a profile")
    }

    /// Interpolant of `block_average(r)` that is linear in `x = Φ⁻¹(s)`.
    ///
    /// Block `j` covers `s ∈ (j/r, (j+1)/r]` and its node sits at the
    /// Gaussian centroid `E[X | Φ(X) ∈ block] = r·(φ(x_lo) − φ(x_hi))`, so a
    /// profile that is affine in `x` is reproduced exactly.
    pub fn linear_interpolant(&self, r: usize) -> LinearInterpolant {
        let blocks = self.block_average(r);
        let rf = r as f64;
        let edge_density = |k: usize| -> f64 {
            if k == 0 || k == r {
                0.0
            } else {
                iso_profile(k as f64 / rf)
            }
        };
        let nodes = (0..r)
            .map(|j| rf * (edge_density(j) - edge_density(j + 1)))
            .collect();
        LinearInterpolant {
            nodes,
            values: blocks.values,
        }
    }
}

/// Continuous function of `x ∈ ℝ`, linear between the points `(x_j, B_j)`
/// and constant outside `[x_0, x_{r-1}]`.
///
/// Read as a function of `s = Φ(x)`, it interpolates block averages of a
/// profile; `-d/dx` of it approximates the profile's `(−p)′(s)·I(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInterpolant {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl LinearInterpolant {
    pub fn resolution(&self) -> usize {
        self.values.len()
    }

    /// `x_j`, increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `B_j`, nonincreasing.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let r = self.values.len();
        let j = self.nodes.partition_point(|&n| n <= x);
        if j == 0 {
            return self.values[0];
        }
        if j >= r {
            return self.values[r - 1];
        }
        let (x0, x1) = (self.nodes[j - 1], self.nodes[j]);
        let frac = (x - x0) / (x1 - x0);
        self.values[j - 1] + frac * (self.values[j] - self.values[j - 1])
    }

    /// `-d/dx` at each node: the mean of the two adjacent secant slopes, or
    /// the one secant at the ends. This is what a symmetric difference of
    /// [`Self::eval`] across a node returns.
    pub fn node_neg_slopes(&self) -> Vec<f64> {
        let (x, v) = (&self.nodes, &self.values);
        let r = v.len();
        if r < 2 {
            return vec![0.0; r];
        }
        let secants: Vec<f64> = (0..r - 1)
            .map(|j| (v[j] - v[j + 1]) / (x[j + 1] - x[j]))
            .collect();
        (0..r)
            .map(|j| match j {
                0 => secants[0],
                j if j == r - 1 => secants[r - 2],
                j => 0.5 * (secants[j - 1] + secants[j]),
            })
            .collect()
    }
}

/// Uniform grid of `M` midpoints `s_j = (j + 1/2)/M` in (0, 1).
///
/// Cumulative curves built on it are reported at the right cell edges
/// `t_j = (j + 1)/M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SGrid {
    m: usize,
}

impl SGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(m: usize) -> Result<Self> {
        if m < Self::MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "s-grid needs at least {} points, got {m}",
                Self::MIN_POINTS
            )));
        }
        Ok(SGrid { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.m as f64
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> {
        let m = self.m as f64;
        (0..self.m).map(move |j| (j as f64 + 0.5) / m)
    }

    /// Right cell edges `t_j = (j + 1)/M`.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = f64> {
        let m = self.m as f64;
        (0..self.m).map(move |j| (j as f64 + 1.0) / m)
    }
}

/// Samples of a (not necessarily monotone) function on an [`SGrid`]; sample
/// `j` stands for the function on the cell `[j/M, (j+1)/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    grid: SGrid,
    values: Vec<f64>,
}

impl SampledCurve {
    pub fn new(grid: SGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples for an s-grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledCurve { grid, values })
    }

    pub fn grid(&self) -> SGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫₀^{t_j}` of the cell function, at every right edge.
    pub fn cumulative(&self) -> Vec<f64> {
        let h = self.grid.spacing();
        self.values
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v * h;
                Some(*acc)
            })
            .collect()
    }

    /// Integral of the cell function over `[a, b]`.
    pub fn integral_between(&self, a: f64, b: f64) -> f64 {
        let m = self.grid.len();
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        if b <= a {
            return 0.0;
        }
        let first = ((a * m as f64).floor() as usize).min(m - 1);
        let last = ((b * m as f64).ceil() as usize).clamp(first + 1, m);
        (first..last)
            .map(|j| {
                let lo = (j as f64 / m as f64).max(a);
                let hi = ((j + 1) as f64 / m as f64).min(b);
                self.values[j] * (hi - lo).max(0.0)
            })
            .sum()
    }

    /// Decreasing rearrangement with respect to Lebesgue measure on (0, 1).
    pub fn rearranged(&self) -> Profile {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        Profile::uniform(sorted).expect("sorted finite samples")
    }
}

/// `|f(rep)|` on every cell of the grid.
pub fn abs_values(field: &ScalarField, grid: &GaussianGrid) -> Result<Vec<f64>> {
    grid.points()
        .map(|x| {
            let v = field.value(x).abs();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!(
                    "field `{}` evaluates to {v} at {x:?}",
                    field.label()
                )))
            }
        })
        .collect()
}

/// `γₙ({|f| > λ})` on grid data.
pub fn distribution_function(field: &ScalarField, grid: &GaussianGrid, lambda: f64) -> f64 {
    let count = grid
        .points()
        .filter(|x| field.value(x).abs() > lambda)
        .count();
    count as f64 / grid.len() as f64
}

/// Stable descending order of `values`; ties keep cell order.
pub fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap_or(Ordering::Equal));
    idx
}

/// Decreasing rearrangement of equal-weight cell samples.
pub fn rearrange_cells(values: &[f64]) -> Result<Profile> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("cell value {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Profile::uniform(sorted)
}

/// `f*_μ`: the decreasing rearrangement of `|f|` with respect to γₙ, on grid
/// data. Knots sit at the cumulative cell measures.
pub fn decreasing_rearrangement(field: &ScalarField, grid: &GaussianGrid) -> Result<Profile> {
    rearrange_cells(&abs_values(field, grid)?)
}

/// Decreasing rearrangement of `(weight, value)` samples with respect to
/// Lebesgue measure on (0, 1).
pub fn lebesgue_rearrangement(samples: &[(f64, f64)]) -> Result<Profile> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if let Some(&(w, _)) = samples
        .iter()
        .find(|(w, _)| w.is_nan() || *w <= 0.0 || !w.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "weight {w} is not positive"
        )));
    }
    let sum: f64 = samples.iter().map(|(w, _)| w).sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum(sum));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut knots = Vec::with_capacity(sorted.len() + 1);
    knots.push(0.0);
    let mut acc = 0.0;
    for (w, _) in &sorted[..sorted.len() - 1] {
        acc += w;
        knots.push(acc);
    }
    knots.push(1.0);
    Profile::new(knots, sorted.into_iter().map(|(_, v)| v).collect())
}

/// `(-p)'` sampled on `s_grid`, differentiating at the s-grid resolution.
pub fn neg_derivative(p: &Profile, s_grid: SGrid) -> SampledCurve {
    neg_derivative_at_resolution(p, s_grid, s_grid.len())
}

/// `(-p)'` on `s_grid` from `p` averaged over `resolution` equal blocks.
///
/// Node derivatives are central differences of the block averages; samples
/// between nodes are linearly interpolated. Negative round-off is clamped
/// to zero.
pub fn neg_derivative_at_resolution(p: &Profile, s_grid: SGrid, resolution: usize) -> SampledCurve {
    let b = p.block_average(resolution.max(2)).values;
    let r = b.len();
    let rf = r as f64;
    let slopes: Vec<f64> = (0..r)
        .map(|j| match j {
            0 => (b[0] - b[1]) * rf,
            j if j == r - 1 => (b[r - 2] - b[r - 1]) * rf,
            j => (b[j - 1] - b[j + 1]) * rf * 0.5,
        })
        .collect();
    SampledCurve {
        grid: s_grid,
        values: interpolate_nodes(&slopes, s_grid),
    }
}

/// `(−p)′(s)·I(s)` on `s_grid`, computed as `−d/dx p(Φ(x))` at
/// `x = Φ⁻¹(s)` from the interpolant of `p` at `resolution` blocks: node
/// slopes are interpolated linearly in `x` and clamped below at 0.
///
/// Differentiating in `x` keeps the quotient well conditioned where `p`
/// steepens towards `s = 0`.
pub fn surrogate(p: &Profile, s_grid: SGrid, resolution: usize) -> SampledCurve {
    let q = p.linear_interpolant(resolution.max(2));
    let slopes = LinearInterpolant {
        nodes: q.nodes.clone(),
        values: q.node_neg_slopes(),
    };
    let values = s_grid
        .points()
        .map(|s| {
            slopes
                .eval(quantile(s).expect("s-grid point in (0, 1)"))
                .max(0.0)
        })
        .collect();
    SampledCurve {
        grid: s_grid,
        values,
    }
}

// Node values at (j + 1/2)/r, linearly interpolated in s to the grid points
// and clamped below at 0.
fn interpolate_nodes(nodes: &[f64], s_grid: SGrid) -> Vec<f64> {
    let r = nodes.len() as f64;
    s_grid
        .points()
        .map(|s| {
            let u = s * r - 0.5;
            let d = if u.is_nan() || u <= 0.0 {
                nodes[0]
            } else if u >= r - 1.0 {
                nodes[nodes.len() - 1]
            } else {
                let j = u.floor() as usize;
                let frac = u - j as f64;
                nodes[j] + frac * (nodes[j + 1] - nodes[j])
            };
            d.max(0.0)
        })
        .collect()
}

/// `|Σ A(|f|)·measure − ∫₀¹ A(f*_μ)|`; zero up to round-off since both sides
/// sum the same multiset.
pub fn equimeasurability_gap(
    field: &ScalarField,
    grid: &GaussianGrid,
    a: &YoungFunction,
) -> Result<f64> {
    let values = abs_values(field, grid)?;
    let w = grid.cell_measure();
    let direct: f64 = values.iter().map(|&v| a.eval(v) * w).sum();
    let profile = rearrange_cells(&values)?;
    let rearranged = crate::majorize::orlicz_integral(&profile, a);
    Ok((direct - rearranged).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::builtin_field;
    use crate::gaussian::{cdf_value, equal_measure_grid, pdf, quantile, Probability};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn builtin(name: &str, dim: usize) -> ScalarField {
        builtin_field(name, &BTreeMap::new(), dim).unwrap()
    }

    fn half_cells(a: f64, b: f64) -> Profile {
        Profile::new(vec![0.0, 0.5, 1.0], vec![a, b]).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(Profile::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Profile::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Profile::new(vec![0.0, 0.5, 0.5, 1.0], vec![3.0, 2.0, 1.0]).is_err());
        assert!(Profile::new(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(Profile::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn profile_evaluation_and_integrals() {
        let p = half_cells(3.0, 1.0);
        assert_eq!(p.value_at(0.0), 3.0);
        assert_eq!(p.value_at(0.25), 3.0);
        assert_eq!(p.value_at(0.5), 3.0);
        assert_eq!(p.value_at(0.5000001), 1.0);
        assert_eq!(p.value_at(1.0), 1.0);
        assert_eq!(p.integral_to(0.25), 0.75);
        assert_eq!(p.integral_to(0.75), 1.75);
        assert_eq!(p.total(), 2.0);
        assert_eq!(p.superlevel_measure(2.0), 0.5);
        assert_eq!(p.superlevel_measure(0.5), 1.0);
        assert_eq!(p.superlevel_measure(3.0), 0.0);
    }

    #[test]
    fn block_average_keeps_interior_values_exact() {
        let p = Profile::uniform(vec![4.0, 4.0, 4.0, 2.0, 2.0, 2.0]).unwrap();
        let b = p.block_average(3);
        assert_eq!(b.values(), &[4.0, 3.0, 2.0]);
        let q = Profile::uniform(vec![5.0; 7]).unwrap().block_average(3);
        assert!(q.values().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn coordinate_distribution_function() {
        let g = equal_measure_grid(1, 4096).unwrap();
        let f = builtin("coordinate", 1);
        assert_eq!(distribution_function(&f, &g, 0.0), 1.0);
        // 2(1 - Φ(1)) = 0.3173105078629141 (mpmath)
        let d = distribution_function(&f, &g, 1.0);
        assert!((d - 0.317_310_507_862_914_1).abs() <= 1.0 / 4096.0, "{d}");
        assert_eq!(distribution_function(&f, &g, 100.0), 0.0);
    }

    #[test]
    fn distribution_matches_profile_superlevel_sets() {
        let g = equal_measure_grid(2, 32).unwrap();
        for name in ["mixture", "poly_tanh", "gaussian_bump"] {
            let f = builtin(name, 2);
            let p = decreasing_rearrangement(&f, &g).unwrap();
            for lambda in [0.0, 0.05, 0.2, 0.4, 0.7, 1.1] {
                assert_eq!(
                    distribution_function(&f, &g, lambda),
                    p.superlevel_measure(lambda),
                    "{name} λ = {lambda}"
                );
            }
        }
    }

    #[test]
    fn constant_and_indicator_rearrangements() {
        let g = equal_measure_grid(2, 16).unwrap();
        let c = ScalarField::from_fn(2, "const", |_| -1.5);
        let p = decreasing_rearrangement(&c, &g).unwrap();
        assert!(p.values().iter().all(|&v| v == 1.5));

        let a = 0.4;
        let mut params = BTreeMap::new();
        params.insert("a".to_string(), a);
        params.insert("eps".to_string(), 1e-3);
        let f = builtin_field("halfspace_indicator_smooth", &params, 1).unwrap();
        let g = equal_measure_grid(1, 1000).unwrap();
        let p = decreasing_rearrangement(&f, &g).unwrap();
        let jump = cdf_value(a);
        for s in [0.05, 0.3, 0.6] {
            assert!((p.value_at(s) - 1.0).abs() < 1e-6);
        }
        for s in [0.7, 0.9, 0.99] {
            assert!(p.value_at(s) < 1e-6);
        }
        assert!((p.superlevel_measure(0.5) - jump).abs() <= 1e-3);
    }

    #[test]
    fn coordinate_rearrangement_converges_to_closed_form() {
        let f = builtin("coordinate", 1);
        let mut previous = f64::INFINITY;
        for n in [256, 1024, 4096] {
            let g = equal_measure_grid(1, n).unwrap();
            let p = decreasing_rearrangement(&f, &g).unwrap();
            let s_grid = SGrid::new(1000).unwrap();
            let gap = s_grid
                .points()
                .map(|s| {
                    let exact = quantile(Probability::from_upper(s / 2.0)).unwrap();
                    (p.value_at(s) - exact).abs()
                })
                .fold(0.0, f64::max);
            assert!(gap < previous, "n = {n}: {gap} vs {previous}");
            previous = gap;
        }
    }

    #[test]
    fn lebesgue_rearrangement_examples() {
        let p = lebesgue_rearrangement(&[(0.5, 1.0), (0.5, 3.0)]).unwrap();
        assert_eq!(p, half_cells(3.0, 1.0));

        let already = lebesgue_rearrangement(&[(0.25, 4.0), (0.25, 2.0), (0.5, 1.0)]).unwrap();
        assert_eq!(
            already,
            Profile::new(vec![0.0, 0.25, 0.5, 1.0], vec![4.0, 2.0, 1.0]).unwrap()
        );

        assert!(matches!(
            lebesgue_rearrangement(&[(0.5, 1.0), (0.6, 2.0)]),
            Err(Error::WeightSum(_))
        ));
        assert!(lebesgue_rearrangement(&[(1.5, 1.0), (-0.5, 2.0)]).is_err());
    }

    #[test]
    fn neg_derivative_of_constant_and_indicator() {
        let s_grid = SGrid::new(64).unwrap();
        let d = neg_derivative(&Profile::constant(2.0), s_grid);
        assert!(d.values().iter().all(|&v| v == 0.0));

        let p = Profile::new(vec![0.0, 0.3, 1.0], vec![1.0, 0.0]).unwrap();
        let d = neg_derivative(&p, s_grid);
        for (s, v) in s_grid.points().zip(d.values()) {
            if (s - 0.3).abs() > 2.0 * s_grid.spacing() {
                assert_eq!(*v, 0.0, "s = {s}");
            }
        }
        // the jump integrates to its height
        let total: f64 = d.cumulative()[s_grid.len() - 1];
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn neg_derivative_of_coordinate_rearrangement() {
        let f = builtin("coordinate", 1);
        let g = equal_measure_grid(1, 8192).unwrap();
        let p = decreasing_rearrangement(&f, &g).unwrap();
        let s_grid = SGrid::new(4096).unwrap();
        let d = neg_derivative(&p, s_grid);
        for (s, v) in s_grid.points().zip(d.values()) {
            if !(0.05..=0.95).contains(&s) {
                continue;
            }
            // d/ds of -Φ⁻¹(1 - s/2) is 1 / (2 φ(Φ⁻¹(1 - s/2)))
            let u = quantile(Probability::from_upper(s / 2.0)).unwrap();
            let exact = 0.5 / pdf(u);
            assert!((v - exact).abs() <= 0.05 * exact, "s = {s}: {v} vs {exact}");
        }
    }

    #[test]
    fn sampled_curve_integrals() {
        let s_grid = SGrid::new(8).unwrap();
        let c = SampledCurve::new(s_grid, (0..8).map(|j| j as f64).collect()).unwrap();
        let cum = c.cumulative();
        assert_eq!(cum[7], 28.0 / 8.0);
        assert!((c.integral_between(0.0, 1.0) - cum[7]).abs() < 1e-15);
        assert!((c.integral_between(0.0, 0.5) - cum[3]).abs() < 1e-15);
        assert!((c.integral_between(0.1, 0.2) - (0.025 * 0.0 + 0.075 * 1.0)).abs() < 1e-15);
        assert_eq!(c.integral_between(0.4, 0.4), 0.0);
        let r = c.rearranged();
        assert_eq!(r.value_at(0.01), 7.0);
        assert_eq!(r.total(), cum[7]);
    }

    #[test]
    fn equimeasurability_examples() {
        let g = equal_measure_grid(1, 1024).unwrap();
        let f = builtin("coordinate", 1);
        assert!(equimeasurability_gap(&f, &g, &YoungFunction::Power(1.0)).unwrap() <= 1e-12);
        assert!(equimeasurability_gap(&f, &g, &YoungFunction::Power(2.0)).unwrap() <= 1e-12);
        let c = ScalarField::from_fn(1, "c", |_| 0.75);
        for a in [
            YoungFunction::Power(1.0),
            YoungFunction::Hinge(0.5),
            YoungFunction::exp_sq_default(),
        ] {
            assert_eq!(equimeasurability_gap(&c, &g, &a).unwrap(), 0.0);
        }
    }

    proptest! {
        #[test]
        fn rearrangement_ignores_cell_relabeling(
            mut values in prop::collection::vec(0.0f64..10.0, 2..200),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let p = rearrange_cells(&values).unwrap();
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            values.shuffle(&mut rng);
            prop_assert_eq!(rearrange_cells(&values).unwrap(), p.clone());
            prop_assert!(p.values().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn lebesgue_rearrangement_ignores_order(
            raw in prop::collection::vec((1u32..100, 0.0f64..5.0), 1..40),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let total: u32 = raw.iter().map(|(w, _)| w).sum();
            let mut samples: Vec<(f64, f64)> = raw
                .iter()
                .map(|&(w, v)| (w as f64 / total as f64, v))
                .collect();
            let p = lebesgue_rearrangement(&samples);
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            samples.shuffle(&mut rng);
            let q = lebesgue_rearrangement(&samples).unwrap();
            // equal values may land in a different order, so compare the functions
            for s in [0.01, 0.1, 0.33, 0.5, 0.77, 0.99] {
                prop_assert_eq!(p.value_at(s), q.value_at(s));
            }
            prop_assert!((p.total() - q.total()).abs() < 1e-12);
        }

        #[test]
        fn block_average_preserves_integral(
            values in prop::collection::vec(0.0f64..10.0, 1..100),
            r in 1usize..64,
        ) {
            let p = rearrange_cells(&values).unwrap();
            let b = p.block_average(r);
            prop_assert!((b.total() - p.total()).abs() <= 1e-9 * (1.0 + p.total()));
            prop_assert!(b.values().windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
