//! Standard Gaussian special functions, the Gaussian isoperimetric profile and
//! equal-measure grids on ℝⁿ.
//!
//! The isoperimetric profile is taken to be `I(t) = φ(Φ⁻¹(t))`: the Gaussian
//! boundary measure of a half-space of measure `t`. It satisfies
//! `I(t)·I''(t) = -1` and `I'(t) = -Φ⁻¹(t)`.

// msun coefficients below are kept digit for digit.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Smallest tail probability handed to the quantile function.
pub const TAIL_FLOOR: f64 = 1e-300;

/// Default upper bound on the number of cells of an [`GaussianGrid`].
pub const DEFAULT_CELL_BUDGET: usize = 1 << 22;

/// Standard normal density φ.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// A probability stored together with its complement.
///
/// Both tails are kept so that quantiles of values near 1 keep full relative
/// precision: `quantile(cdf(x))` round-trips even where `1 - Φ(x)` is far
/// below the spacing of doubles near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    lower: f64,
    upper: f64,
}

impl Probability {
    /// Probability `p`; the complement is computed as `1 - p`.
    pub fn new(p: f64) -> Self {
        Probability {
            lower: p,
            upper: 1.0 - p,
        }
    }

    /// The probability `num / den` with an exactly formed complement.
    pub fn from_ratio(num: f64, den: f64) -> Self {
        Probability {
            lower: num / den,
            upper: (den - num) / den,
        }
    }

    /// Builds a probability from its upper tail `q = 1 - p`.
    pub fn from_upper(q: f64) -> Self {
        Probability {
            lower: 1.0 - q,
            upper: q,
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.lower
    }

    #[inline]
    pub fn complement(self) -> f64 {
        self.upper
    }
}

impl From<f64> for Probability {
    fn from(p: f64) -> Self {
        Probability::new(p)
    }
}

/// Standard normal distribution function Φ.
pub fn cdf(x: f64) -> Probability {
    let lower = 0.5 * erfc(-x * FRAC_1_SQRT_2);
    let upper = 0.5 * erfc(x * FRAC_1_SQRT_2);
    Probability { lower, upper }
}

/// `Φ(x)` as a plain number.
#[inline]
pub fn cdf_value(x: f64) -> f64 {
    cdf(x).value()
}

/// Standard normal quantile Φ⁻¹.
///
/// Values inside (0, 1) are clamped so that neither tail drops below
/// [`TAIL_FLOOR`]; values outside the open interval are a domain error.
pub fn quantile(p: impl Into<Probability>) -> Result<f64> {
    let p = p.into();
    let (lower, upper) = (p.lower, p.upper);
    if !(lower > 0.0 && upper > 0.0 && lower <= 1.0 && upper <= 1.0) {
        return Err(Error::Domain(lower));
    }
    if lower <= upper {
        Ok(lower_tail_quantile(lower.max(TAIL_FLOOR)))
    } else {
        Ok(-lower_tail_quantile(upper.max(TAIL_FLOOR)))
    }
}

/// Quantile of a lower tail `q ∈ (0, 1/2]`, returning a nonpositive value.
fn lower_tail_quantile(q: f64) -> f64 {
    let mut x = acklam(q);
    // Two Halley steps on Φ(x) - q; the residual is formed from the lower
    // tail so it keeps relative precision deep in the tail.
    for _ in 0..2 {
        let density = pdf(x);
        if density == 0.0 {
            break;
        }
        let e = 0.5 * erfc(-x * FRAC_1_SQRT_2) - q;
        let u = e / density;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

// Acklam's rational approximation, relative error below 1.15e-9.
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Gaussian isoperimetric profile `I(t) = φ(Φ⁻¹(t))`.
///
/// Symmetric about 1/2 with maximum `φ(0)`; vanishes at (and outside) the
/// endpoints of [0, 1].
pub fn iso_profile(t: f64) -> f64 {
    if !(t > 0.0 && t < 1.0) {
        return 0.0;
    }
    let tail = t.min(1.0 - t).max(TAIL_FLOOR);
    pdf(lower_tail_quantile(tail))
}

/// Equal-measure discretization of (ℝⁿ, γₙ).
///
/// Each axis is cut at `Φ⁻¹(k/N)`, `k = 0..=N`, so every cell of the product
/// grid has measure exactly `N⁻ⁿ`. The representative of the `k`-th axis
/// cell is its measure midpoint `Φ⁻¹((k + 1/2)/N)`. Cells are numbered with
/// the first coordinate varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianGrid {
    dim: usize,
    cells_per_axis: usize,
    axis_nodes: Vec<f64>,
    points: Vec<f64>,
}

impl GaussianGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Measure of every cell, `N⁻ⁿ`.
    pub fn cell_measure(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Per-axis representatives `Φ⁻¹((k + 1/2)/N)`.
    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis_nodes
    }

    /// Representative of cell `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    /// Per-axis cell boundaries `Φ⁻¹(k/N)`, with infinite outer ends.
    pub fn axis_boundaries(&self) -> Vec<f64> {
        let n = self.cells_per_axis;
        (0..=n)
            .map(|k| match k {
                0 => f64::NEG_INFINITY,
                k if k == n => f64::INFINITY,
                k => quantile(Probability::from_ratio(k as f64, n as f64))
                    .expect("interior boundary probability"),
            })
            .collect()
    }

    /// Weighted sum `Σ g(rep)·measure` over all cells.
    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        let w = self.cell_measure();
        self.points().map(|x| g(x) * w).sum()
    }
}

/// Builds the equal-measure grid with the default cell budget.
pub fn equal_measure_grid(dim: usize, cells_per_axis: usize) -> Result<GaussianGrid> {
    equal_measure_grid_with_budget(dim, cells_per_axis, DEFAULT_CELL_BUDGET)
}

pub fn equal_measure_grid_with_budget(
    dim: usize,
    cells_per_axis: usize,
    budget: usize,
) -> Result<GaussianGrid> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidGrid(format!(
            "dimension must be 1, 2 or 3, got {dim}"
        )));
    }
    if cells_per_axis < 2 {
        return Err(Error::InvalidGrid(format!(
            "grid must be ≥ 2 cells per axis, got {cells_per_axis}"
        )));
    }
    let cells = (cells_per_axis as u128).pow(dim as u32);
    if cells > budget as u128 {
        return Err(Error::BudgetExceeded { cells, budget });
    }
    let n = cells_per_axis;
    let axis_nodes: Vec<f64> = (0..n)
        .map(|k| {
            quantile(Probability::from_ratio(k as f64 + 0.5, n as f64))
                .expect("midpoint probability lies in (0, 1)")
        })
        .collect();

    let cells = cells as usize;
    let mut points = Vec::with_capacity(cells * dim);
    let mut index = vec![0usize; dim];
    for _ in 0..cells {
        points.extend(index.iter().map(|&k| axis_nodes[k]));
        for d in (0..dim).rev() {
            index[d] += 1;
            if index[d] < n {
                break;
            }
            index[d] = 0;
        }
    }
    Ok(GaussianGrid {
        dim,
        cells_per_axis: n,
        axis_nodes,
        points,
    })
}

// Complementary error function, after the FreeBSD msun implementation
// (Sun Microsystems, 1993; freely redistributable with notice preserved).
// Maximum error is below one ulp on each of the approximation ranges.

const ERX: f64 = 8.45062911510467529297e-01;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let negative = x < 0.0;
    let ax = x.abs();

    if ax < 0.84375 {
        let t = if ax < 1.387_778_780_781_445_7e-17 {
            ax
        } else {
            let z = ax * ax;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if negative {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }
    if ax < 28.0 {
        let s = 1.0 / (ax * ax);
        let (r, big_s) = if ax < 1.0 / 0.35 {
            (
                RA0 + s
                    * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
                1.0 + s
                    * (SA1
                        + s * (SA2
                            + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
            )
        } else {
            if negative && ax > 6.0 {
                return 2.0;
            }
            (
                RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
                1.0 + s
                    * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
            )
        };
        // z carries the high 20 bits of |x| so that exp(-z² - 0.5625) is exact-ish.
        let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
        let e = (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + r / big_s).exp();
        return if negative { 2.0 - e / ax } else { e / ax };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pdf_values() {
        assert_eq!(pdf(0.0), 0.398_942_280_401_432_7);
        assert_eq!(pdf(1.5), pdf(-1.5));
        // mpmath, 40 digits: 0.2419707245191433497978...
        assert_relative_eq!(pdf(1.0), 0.241_970_724_519_143_35, max_relative = 1e-15);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(cdf_value(0.0), 0.5);
        // mpmath: 0.8413447460685429485852...
        assert_relative_eq!(
            cdf_value(1.0),
            0.841_344_746_068_542_9,
            max_relative = 2e-16
        );
        for x in [0.3, 1.7, 4.2] {
            assert!((cdf_value(x) + cdf_value(-x) - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn cdf_tails_agree_with_reference() {
        // mpmath ncdf at 40 digits.
        let cases = [
            (-6.0, 9.865_876_450_376_98e-10),
            (-3.0, 1.349_898_031_630_094_6e-3),
            (-10.0, 7.619_853_024_160_527e-24),
            (-37.0, 5.725_571_222_524_577e-300),
        ];
        for (x, want) in cases {
            assert_relative_eq!(cdf_value(x), want, max_relative = 1e-13);
            assert_relative_eq!(cdf(-x).complement(), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn quantile_values() {
        assert_eq!(quantile(0.5).unwrap(), 0.0);
        assert!((quantile(cdf_value(2.3)).unwrap() - 2.3).abs() <= 1e-12);
        // Inverse of a 16-digit rounding of Φ(1); mpmath gives 0.99999999999999979...
        assert!((quantile(0.841_344_746_068_542_9).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn quantile_domain_errors() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(quantile(p), Err(Error::Domain(_))), "p = {p}");
        }
    }

    #[test]
    fn quantile_clamps_tiny_tails() {
        let x = quantile(1e-320).unwrap();
        assert!(x.is_finite());
        assert_relative_eq!(x, quantile(TAIL_FLOOR).unwrap(), max_relative = 1e-15);
        assert_eq!(quantile(Probability::from_upper(1e-320)).unwrap(), -x);
    }

    #[test]
    fn quantile_inverts_cdf_on_probability_range() {
        let mut p = 1e-10;
        while p < 1.0 - 1e-10 {
            let x = quantile(p).unwrap();
            assert!((cdf_value(x) - p).abs() <= 1e-12, "p = {p}");
            p += 0.000_731;
        }
    }

    #[test]
    fn round_trip_over_wide_range() {
        for i in 0..=1200 {
            let x = -6.0 + 12.0 * i as f64 / 1200.0;
            let back = quantile(cdf(x)).unwrap();
            assert!((back - x).abs() <= 1e-10, "x = {x}, back = {back}");
        }
    }

    #[test]
    fn iso_profile_values() {
        assert_relative_eq!(
            iso_profile(0.5),
            0.398_942_280_401_432_7,
            max_relative = 1e-15
        );
        assert_relative_eq!(iso_profile(0.1), iso_profile(0.9), max_relative = 1e-14);
        // φ(Φ⁻¹(0.1)) = 0.1754983319324868066... (mpmath)
        assert_relative_eq!(
            iso_profile(0.1),
            0.175_498_331_932_486_8,
            max_relative = 1e-14
        );
        assert_eq!(iso_profile(0.0), 0.0);
        assert_eq!(iso_profile(1.0), 0.0);
    }

    #[test]
    fn iso_profile_differential_identities() {
        let h = 1e-4;
        let mut t = 0.02;
        while t < 0.98 {
            let (m, c, p) = (iso_profile(t - h), iso_profile(t), iso_profile(t + h));
            let second = (p - 2.0 * c + m) / (h * h);
            assert!((c * second + 1.0).abs() < 1e-4, "t = {t}: {}", c * second);
            let first = (p - m) / (2.0 * h);
            assert!(
                (first + quantile(t).unwrap()).abs() < 1e-5,
                "t = {t}: {first}"
            );
            t += 0.01;
        }
    }

    #[test]
    fn two_cell_grid() {
        let g = equal_measure_grid(1, 2).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.cell_measure(), 0.5);
        assert_relative_eq!(g.point(0)[0], quantile(0.25).unwrap());
        assert_relative_eq!(g.point(1)[0], quantile(0.75).unwrap());
        assert_eq!(g.point(0)[0], -g.point(1)[0]);
    }

    #[test]
    fn product_grid() {
        let g = equal_measure_grid(2, 4).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.cell_measure(), 1.0 / 16.0);
        assert_eq!((0..16).map(|_| g.cell_measure()).sum::<f64>(), 1.0);
        assert_eq!(g.point(0), &[g.axis_nodes()[0], g.axis_nodes()[0]]);
        assert_eq!(g.point(1), &[g.axis_nodes()[0], g.axis_nodes()[1]]);
        assert_eq!(g.point(4), &[g.axis_nodes()[1], g.axis_nodes()[0]]);
    }

    #[test]
    fn grid_boundaries_bracket_nodes() {
        let g = equal_measure_grid(1, 10).unwrap();
        let b = g.axis_boundaries();
        assert_eq!(b.len(), 11);
        for (k, &x) in g.axis_nodes().iter().enumerate() {
            assert!(b[k] < x && x < b[k + 1]);
        }
    }

    #[test]
    fn grid_second_moment() {
        let g = equal_measure_grid(1, 1024).unwrap();
        let m2 = g.integrate(|x| x[0] * x[0]);
        assert!((m2 - 1.0).abs() <= 5e-3, "m2 = {m2}");
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            equal_measure_grid(4, 4),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            equal_measure_grid(1, 1),
            Err(Error::InvalidGrid(_))
        ));
        match equal_measure_grid_with_budget(3, 100, 10_000) {
            Err(Error::BudgetExceeded { cells, budget }) => {
                assert_eq!(cells, 1_000_000);
                assert_eq!(budget, 10_000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn erfc_reference_values() {
        // mpmath erfc at 40 digits.
        let cases = [
            (0.1, 0.887_537_083_981_715_1),
            (0.5, 0.479_500_122_186_953_5),
            (1.0, 0.157_299_207_050_285_13),
            (2.0, 4.677_734_981_047_266e-3),
            (5.0, 1.537_459_794_428_034_8e-12),
            (-1.0, 1.842_700_792_949_714_9),
        ];
        for (x, want) in cases {
            assert_relative_eq!(erfc(x), want, max_relative = 1e-15);
        }
    }
}
