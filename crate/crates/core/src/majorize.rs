//! Young functions, Orlicz integrals, Hardy–Littlewood–Pólya majorization,
//! rearrangement-invariant norms and the Hardy–Calderón domination check.
//!
//! The quantifier "for every Young function" is realized by hinges
//! `(t - c)₊`. For nonincreasing profiles `∫(g - c)₊ = sup_t (∫₀ᵗ g - c t)`,
//! so the hinge integrals are the Legendre transforms of the partial-sum
//! curves and the two comparisons carry the same information. Both sides
//! are piecewise linear (in `c` and in `t` respectively), so checking them at
//! the profile breakpoints is exact; the user grids are checked as well.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rearrange::Profile;

/// Default cap for [`YoungFunction::ExpSqTruncated`].
pub const DEFAULT_EXP_SQ_CAP: f64 = 20.0;

/// Number of hinge offsets in the default `c`-grid.
pub const DEFAULT_HINGE_COUNT: usize = 256;

/// Convex nondecreasing `A: [0, ∞) → [0, ∞)` with `A(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YoungFunction {
    /// `t^p`, `p ≥ 1`.
    Power(f64),
    /// `(t - c)₊`, `c ≥ 0`.
    Hinge(f64),
    /// `exp(t²) - 1` up to `T`, continued by its tangent line beyond `T`.
    ExpSqTruncated(f64),
}

impl YoungFunction {
    pub fn exp_sq_default() -> Self {
        YoungFunction::ExpSqTruncated(DEFAULT_EXP_SQ_CAP)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            YoungFunction::Power(p) => p >= 1.0 && p.is_finite(),
            YoungFunction::Hinge(c) => c >= 0.0 && c.is_finite(),
            YoungFunction::ExpSqTruncated(cap) => cap > 0.0 && cap <= 26.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid Young function {self}"
            )))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match *self {
            YoungFunction::Power(p) => {
                if p == 1.0 {
                    t
                } else if p == 2.0 {
                    t * t
                } else {
                    t.powf(p)
                }
            }
            YoungFunction::Hinge(c) => (t - c).max(0.0),
            YoungFunction::ExpSqTruncated(cap) => {
                if t <= cap {
                    (t * t).exp_m1()
                } else {
                    let top = (cap * cap).exp();
                    (top - 1.0) + 2.0 * cap * top * (t - cap)
                }
            }
        }
    }

    /// Checks `A(0) = 0`, monotonicity and nonnegative second differences on
    /// `count` points of `[0, upper]`.
    pub fn is_young_on(&self, upper: f64, count: usize) -> bool {
        if self.eval(0.0) != 0.0 {
            return false;
        }
        let h = upper / count as f64;
        let vals: Vec<f64> = (0..=count).map(|i| self.eval(i as f64 * h)).collect();
        let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        vals.windows(2).all(|w| w[1] >= w[0])
            && vals
                .windows(3)
                .all(|w| w[2] - 2.0 * w[1] + w[0] >= -1e-12 * scale)
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungFunction::Power(p) => write!(f, "power:{p}"),
            YoungFunction::Hinge(c) => write!(f, "hinge:{c}"),
            YoungFunction::ExpSqTruncated(cap) if *cap == DEFAULT_EXP_SQ_CAP => write!(f, "expsq"),
            YoungFunction::ExpSqTruncated(cap) => write!(f, "expsq:{cap}"),
        }
    }
}

/// `∫₀¹ A(p(s)) ds`, summed exactly over the pieces.
pub fn orlicz_integral(p: &Profile, a: &YoungFunction) -> f64 {
    p.pieces().map(|(l, r, v)| a.eval(v) * (r - l)).sum()
}

/// Rearrangement-invariant norms evaluated on decreasing profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RINorm {
    /// `Lᵖ`, `p ∈ [1, ∞]`.
    Lp(f64),
    /// `∫₀¹ p*(s) d(s^{1/p})`, `p ≥ 1`.
    LorentzLambda(f64),
    /// `sup_t t^{1/p} · (1/t)∫₀ᵗ p*`, `1 < p < ∞`.
    Marcinkiewicz(f64),
    /// Luxemburg norm of an Orlicz space.
    Orlicz(YoungFunction),
}

impl RINorm {
    /// `Lp` for p ∈ {1, 1.5, 2, 4, ∞}, `Λ(2)`, `M(2)` and the `exp(t²)` Orlicz norm.
    pub fn default_family() -> Vec<RINorm> {
        vec![
            RINorm::Lp(1.0),
            RINorm::Lp(1.5),
            RINorm::Lp(2.0),
            RINorm::Lp(4.0),
            RINorm::Lp(f64::INFINITY),
            RINorm::LorentzLambda(2.0),
            RINorm::Marcinkiewicz(2.0),
            RINorm::Orlicz(YoungFunction::exp_sq_default()),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RINorm::Lp(p) => p >= 1.0,
            RINorm::LorentzLambda(p) => p >= 1.0 && p.is_finite(),
            RINorm::Marcinkiewicz(p) => p > 1.0 && p.is_finite(),
            RINorm::Orlicz(a) => return a.validate(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidNorm(self.to_string()))
        }
    }
}

impl fmt::Display for RINorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RINorm::Lp(p) if p.is_infinite() => write!(f, "lp:inf"),
            RINorm::Lp(p) => write!(f, "lp:{p}"),
            RINorm::LorentzLambda(p) => write!(f, "lorentz:{p}"),
            RINorm::Marcinkiewicz(p) => write!(f, "marcinkiewicz:{p}"),
            RINorm::Orlicz(a) => write!(f, "orlicz:{a}"),
        }
    }
}

/// Parses `lp:2`, `lp:inf`, `lorentz:2`, `marcinkiewicz:2`, `orlicz:expsq`,
/// `orlicz:expsq:<cap>`, `orlicz:power:<p>`, `orlicz:hinge:<c>`.
impl FromStr for RINorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidNorm(s.to_string());
        let num = |t: &str| -> Result<f64> {
            match t {
                "inf" | "infinity" => Ok(f64::INFINITY),
                _ => t.parse::<f64>().map_err(|_| bad()),
            }
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let norm = match parts.as_slice() {
            ["lp", p] => RINorm::Lp(num(p)?),
            ["lorentz", p] => RINorm::LorentzLambda(num(p)?),
            ["marcinkiewicz", p] => RINorm::Marcinkiewicz(num(p)?),
            ["orlicz", "expsq"] => RINorm::Orlicz(YoungFunction::exp_sq_default()),
            ["orlicz", "expsq", cap] => RINorm::Orlicz(YoungFunction::ExpSqTruncated(num(cap)?)),
            ["orlicz", "power", p] => RINorm::Orlicz(YoungFunction::Power(num(p)?)),
            ["orlicz", "hinge", c] => RINorm::Orlicz(YoungFunction::Hinge(num(c)?)),
            _ => return Err(bad()),
        };
        norm.validate().map_err(|_| bad())?;
        Ok(norm)
    }
}

/// Parses a comma-separated norm list.
pub fn parse_norm_list(s: &str) -> Result<Vec<RINorm>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Norm of a decreasing profile.
pub fn ri_norm(p: &Profile, x: &RINorm) -> Result<f64> {
    x.validate()?;
    let v = match *x {
        RINorm::Lp(q) => lp_norm(p, q),
        RINorm::LorentzLambda(q) => {
            let e = 1.0 / q;
            p.pieces()
                .map(|(l, r, v)| v * (r.powf(e) - l.powf(e)))
                .sum()
        }
        RINorm::Marcinkiewicz(q) => marcinkiewicz_norm(p, q),
        RINorm::Orlicz(a) => luxemburg_norm(p, &a)?,
    };
    Ok(v)
}

fn lp_norm(p: &Profile, q: f64) -> f64 {
    let top = p.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if q.is_infinite() || top == 0.0 {
        return top;
    }
    if q == 1.0 {
        return p.pieces().map(|(l, r, v)| v.abs() * (r - l)).sum();
    }
    let s: f64 = p
        .pieces()
        .map(|(l, r, v)| (v.abs() / top).powf(q) * (r - l))
        .sum();
    top * s.powf(1.0 / q)
}

// On a piece, ∫₀ᵗ p = A + v t with A ≥ 0, and t^{1/q - 1}(A + v t) peaks at
// t = (q - 1) A / v.
fn marcinkiewicz_norm(p: &Profile, q: f64) -> f64 {
    let e = 1.0 / q - 1.0;
    let g = |t: f64| t.powf(e) * p.integral_to(t);
    let mut best = 0.0f64;
    for (l, r, v) in p.pieces() {
        best = best.max(g(r));
        if v > 0.0 {
            let a = (p.integral_to(l) - v * l).max(0.0);
            let t = (q - 1.0) * a / v;
            if t > l && t < r {
                best = best.max(g(t));
            }
        }
    }
    best
}

const LUXEMBURG_REL_TOL: f64 = 1e-12;
const BRACKET_STEPS: usize = 400;

/// `inf{λ > 0 : ∫₀¹ A(p/λ) ≤ 1}` by bracketing and bisection.
pub fn luxemburg_norm(p: &Profile, a: &YoungFunction) -> Result<f64> {
    let top = p.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return Ok(0.0);
    }
    let modular = |lambda: f64| -> f64 {
        p.pieces()
            .map(|(l, r, v)| a.eval(v.abs() / lambda) * (r - l))
            .sum()
    };
    let (mut lo, mut hi) = (top, top);
    let mut steps = 0;
    // NaN counts as unbracketed
    while modular(hi).partial_cmp(&1.0).is_none_or(|o| o.is_gt()) {
        hi *= 2.0;
        steps += 1;
        if steps > BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::Bisection(format!(
                "no upper bracket for {a} (modular stays above 1)"
            )));
        }
    }
    steps = 0;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > BRACKET_STEPS || lo == 0.0 {
            return Err(Error::Bisection(format!(
                "no lower bracket for {a} (modular stays below 1)"
            )));
        }
    }
    while hi - lo > LUXEMBURG_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Outcome of a partial-sum comparison `∫₀ᵗ g ≤ ∫₀ᵗ h + tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Majorization {
    pub holds: bool,
    /// `min_t (∫₀ᵗ h − ∫₀ᵗ g)` over the grid edges and all knots.
    pub min_margin: f64,
    pub argmin: f64,
    /// Margins at the s-grid edges `t_j = (j+1)/M`.
    pub margins: Vec<f64>,
}

/// Does `h` majorize `g` (weakly), i.e. `∫₀ᵗ g ≤ ∫₀ᵗ h + tol` for all t?
pub fn majorizes(h: &Profile, g: &Profile, m: usize, tol: f64) -> Majorization {
    let margin = |t: f64| h.integral_to(t) - g.integral_to(t);
    let margins: Vec<f64> = (1..=m).map(|j| margin(j as f64 / m as f64)).collect();
    let mut min_margin = f64::INFINITY;
    let mut argmin = 1.0;
    let candidates = margins
        .iter()
        .enumerate()
        .map(|(j, &v)| ((j + 1) as f64 / m as f64, v))
        .chain(
            h.knots()
                .iter()
                .chain(g.knots())
                .skip(1)
                .map(|&t| (t, margin(t))),
        );
    for (t, v) in candidates {
        if v < min_margin {
            min_margin = v;
            argmin = t;
        }
    }
    Majorization {
        holds: min_margin >= -tol,
        min_margin,
        argmin,
        margins,
    }
}

/// `count` evenly spaced hinge offsets on `[0, max(sup g, sup h)]`.
pub fn default_c_grid(g: &Profile, h: &Profile, count: usize) -> Vec<f64> {
    let top = g.sup().max(h.sup()).max(0.0);
    let count = count.max(2);
    (0..count)
        .map(|i| top * i as f64 / (count - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HlpReport {
    /// `∀c: ∫(g-c)₊ ≤ ∫(h-c)₊ + tol`.
    pub hinge_holds: bool,
    pub hinge_min_margin: f64,
    pub hinge_witness: f64,
    /// `∀t: ∫₀ᵗ g ≤ ∫₀ᵗ h + tol`.
    pub partial_sum_holds: bool,
    pub partial_sum_min_margin: f64,
    pub partial_sum_witness: f64,
}

impl HlpReport {
    pub fn agree(&self) -> bool {
        self.hinge_holds == self.partial_sum_holds
    }
}

/// Compares the hinge-family Orlicz predicate with partial-sum majorization.
pub fn hlp_equivalence_check(
    g: &Profile,
    h: &Profile,
    c_grid: &[f64],
    m: usize,
    tol: f64,
) -> HlpReport {
    let offsets = c_grid
        .iter()
        .copied()
        .chain(g.values().iter().copied())
        .chain(h.values().iter().copied())
        .chain(std::iter::once(0.0))
        .filter(|c| *c >= 0.0);
    let mut hinge_min_margin = f64::INFINITY;
    let mut hinge_witness = 0.0;
    for c in offsets {
        let a = YoungFunction::Hinge(c);
        let margin = orlicz_integral(h, &a) - orlicz_integral(g, &a);
        if margin < hinge_min_margin {
            hinge_min_margin = margin;
            hinge_witness = c;
        }
    }
    let maj = majorizes(h, g, m, tol);
    HlpReport {
        hinge_holds: hinge_min_margin >= -tol,
        hinge_min_margin,
        hinge_witness,
        partial_sum_holds: maj.holds,
        partial_sum_min_margin: maj.min_margin,
        partial_sum_witness: maj.argmin,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormVerdict {
    pub norm: RINorm,
    pub lhs: f64,
    pub rhs: f64,
    /// `‖h‖ − ‖g‖`.
    pub margin: f64,
    pub pass: bool,
}

/// Relative slack used when ordering norms of a majorized pair.
pub const CALDERON_REL_TOL: f64 = 1e-9;

/// Checks `‖g‖_X ≤ ‖h‖_X` for each norm, given that `h` majorizes `g`.
pub fn calderon_check(
    g: &Profile,
    h: &Profile,
    norms: &[RINorm],
    m: usize,
) -> Result<Vec<NormVerdict>> {
    let maj = majorizes(h, g, m, 1e-12 * (1.0 + h.total()));
    if !maj.holds {
        return Err(Error::Precondition(format!(
            "h does not majorize g: margin {:.3e} at t = {}",
            maj.min_margin, maj.argmin
        )));
    }
    norms
        .iter()
        .map(|x| {
            let lhs = ri_norm(g, x)?;
            let rhs = ri_norm(h, x)?;
            Ok(NormVerdict {
                norm: *x,
                lhs,
                rhs,
                margin: rhs - lhs,
                pass: lhs <= rhs + CALDERON_REL_TOL * (1.0 + rhs),
            })
        })
        .collect()
}
