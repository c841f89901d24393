//! Test scalar fields on ℝⁿ: built-in analytic families, parsed expressions,
//! and gradient evaluation.
//!
//! The corpus is restricted to locally Lipschitz fields with Gaussian-integrable
//! gradients. Fields whose expression uses `abs` are flagged as non-smooth.

pub mod expr;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
pub use expr::Expr;

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    Analytic,
    FiniteDifference,
}

/// An evaluable field `f: ℝ^dim → ℝ` with gradient access.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    label: String,
    smooth: bool,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
    expr: Option<Arc<Expr>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("smooth", &self.smooth)
            .field("gradient_mode", &self.gradient_mode())
            .finish()
    }
}

impl ScalarField {
    /// A field whose gradient is taken by central differences.
    pub fn from_fn(
        dim: usize,
        label: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            dim,
            label: label.into(),
            smooth: true,
            value: Arc::new(value),
            gradient: None,
            expr: None,
        }
    }

    /// A field with an analytic gradient written into the output slice.
    pub fn with_gradient(
        dim: usize,
        label: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            gradient: Some(Arc::new(gradient)),
            ..ScalarField::from_fn(dim, label, value)
        }
    }

    pub fn with_smoothness(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn gradient_mode(&self) -> GradientMode {
        if self.gradient.is_some() {
            GradientMode::Analytic
        } else {
            GradientMode::FiniteDifference
        }
    }

    /// The parsed expression, for fields built by [`parse_field`].
    pub fn expression(&self) -> Option<&Expr> {
        self.expr.as_deref()
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    /// Writes `∇f(x)` into `out`.
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.gradient {
            Some(g) => g(x, out),
            None => self.central_difference_into(x, out),
        }
    }

    /// Central-difference gradient with per-axis step `ε^(1/3)·(1 + |xᵢ|)`.
    pub fn central_difference_into(&self, x: &[f64], out: &mut [f64]) {
        let mut probe = x.to_vec();
        for i in 0..self.dim {
            let h = fd_step(x[i]);
            probe[i] = x[i] + h;
            let up = self.value(&probe);
            probe[i] = x[i] - h;
            let down = self.value(&probe);
            probe[i] = x[i];
            out[i] = (up - down) / (2.0 * h);
        }
    }

    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        let mut g = vec![0.0; self.dim];
        self.gradient_into(x, &mut g);
        g.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[inline]
fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.abs())
}

/// Gradient of `field` at `x`: analytic when available, central differences
/// otherwise.
pub fn gradient_at(field: &ScalarField, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; field.dim()];
    field.gradient_into(x, &mut g);
    g
}

/// Parses an expression into a finite-difference field on ℝ^`dim`.
pub fn parse_field(src: &str, dim: usize) -> Result<ScalarField> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "field dimension must be positive".into(),
        ));
    }
    let e = Arc::new(expr::parse(src, dim)?);
    let smooth = !e.uses_abs();
    let eval = Arc::clone(&e);
    let mut field = ScalarField::from_fn(dim, src.trim(), move |x| eval.eval(x));
    field.smooth = smooth;
    field.expr = Some(e);
    Ok(field)
}

/// Names of the built-in families, in listing order.
pub const BUILTIN_NAMES: [&str; 6] = [
    "coordinate",
    "halfspace_indicator_smooth",
    "gaussian_bump",
    "mixture",
    "poly_tanh",
    "monotone1d",
];

/// Default parameters of a built-in family.
pub fn builtin_defaults(name: &str) -> Result<&'static [(&'static str, f64)]> {
    Ok(match name {
        "coordinate" => &[("axis", 1.0)],
        "halfspace_indicator_smooth" => &[("a", 0.0), ("eps", 0.05)],
        "gaussian_bump" => &[("c", 1.0)],
        "mixture" => &[("w", 0.6), ("sep", 1.0), ("width", 0.8)],
        "poly_tanh" => &[("a", 2.0), ("b", 0.3)],
        "monotone1d" => &[("a", 1.0)],
        _ => return Err(Error::UnknownFamily(name.to_string())),
    })
}

/// One-paragraph description of a built-in family.
pub fn builtin_description(name: &str) -> Result<&'static str> {
    Ok(match name {
        "coordinate" => {
            "f(x) = x_axis. Linear, |∇f| ≡ 1; its Gaussian rearrangement is Φ⁻¹(1 - s/2)."
        }
        "halfspace_indicator_smooth" => {
            "f(x) = (1 - tanh((x1 - a)/eps))/2, a smoothed indicator of {x1 < a}; \
             its rearrangement is ≈ 1 on (0, Φ(a)) and ≈ 0 after."
        }
        "gaussian_bump" => "f(x) = exp(-c|x|²). Radial bump with an analytic gradient.",
        "mixture" => {
            "f(x) = w·exp(-|x - sep·e1|²/(2 width²)) + (1-w)·exp(-|x + sep·u|²/(2 width²)), \
             u = (e1 + e2)/√2 in dimension ≥ 2 and e1 otherwise. Two unequal bumps."
        }
        "poly_tanh" => {
            "f(x) = tanh(a·x1) + b·Σ(√(1 + xi²) - 1). Smooth, globally Lipschitz, sign-changing."
        }
        "monotone1d" => {
            "f(x) = exp(-a·x1), a > 0. Nonnegative and strictly decreasing in x1: \
             a fixed point of Gaussian symmetrization (equality case)."
        }
        _ => return Err(Error::UnknownFamily(name.to_string())),
    })
}

fn invalid(family: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        family: family.to_string(),
        reason: reason.into(),
    }
}

/// Builds a built-in field on ℝ^`dim`, overriding defaults with `params`.
pub fn builtin_field(
    name: &str,
    params: &BTreeMap<String, f64>,
    dim: usize,
) -> Result<ScalarField> {
    let defaults = builtin_defaults(name)?;
    if dim == 0 {
        return Err(invalid(name, "dimension must be positive"));
    }
    let mut p: BTreeMap<&str, f64> = defaults.iter().copied().collect();
    for (k, &v) in params {
        match p.get_mut(k.as_str()) {
            Some(slot) => *slot = v,
            None => return Err(invalid(name, format!("unknown parameter `{k}`"))),
        }
        if !v.is_finite() {
            return Err(invalid(name, format!("parameter `{k}` must be finite")));
        }
    }
    let label = if params.is_empty() {
        name.to_string()
    } else {
        let args: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{name}({})", args.join(","))
    };

    let field = match name {
        "coordinate" => {
            let axis = p["axis"];
            if axis.fract() != 0.0 || axis < 1.0 || axis > dim as f64 {
                return Err(invalid(
                    name,
                    format!("axis must be an integer in 1..={dim}"),
                ));
            }
            let i = axis as usize - 1;
            ScalarField::with_gradient(
                dim,
                label,
                move |x| x[i],
                move |_, g| {
                    g.fill(0.0);
                    g[i] = 1.0;
                },
            )
        }
        "halfspace_indicator_smooth" => {
            let (a, eps) = (p["a"], p["eps"]);
            if eps <= 0.0 {
                return Err(invalid(name, "eps must be positive"));
            }
            ScalarField::with_gradient(
                dim,
                label,
                move |x| 0.5 * (1.0 - ((x[0] - a) / eps).tanh()),
                move |x, g| {
                    let t = ((x[0] - a) / eps).tanh();
                    g.fill(0.0);
                    g[0] = -0.5 * (1.0 - t * t) / eps;
                },
            )
        }
        "gaussian_bump" => {
            let c = p["c"];
            if c <= 0.0 {
                return Err(invalid(name, "c must be positive"));
            }
            ScalarField::with_gradient(
                dim,
                label,
                move |x| (-c * norm_sq(x)).exp(),
                move |x, g| {
                    let f = (-c * norm_sq(x)).exp();
                    for (gi, xi) in g.iter_mut().zip(x) {
                        *gi = -2.0 * c * xi * f;
                    }
                },
            )
        }
        "mixture" => {
            let (w, sep, width) = (p["w"], p["sep"], p["width"]);
            if !(0.0..=1.0).contains(&w) {
                return Err(invalid(name, "w must lie in [0, 1]"));
            }
            if width <= 0.0 {
                return Err(invalid(name, "width must be positive"));
            }
            let mut plus = vec![0.0; dim];
            plus[0] = sep;
            let mut minus = vec![0.0; dim];
            if dim >= 2 {
                minus[0] = -sep * std::f64::consts::FRAC_1_SQRT_2;
                minus[1] = -sep * std::f64::consts::FRAC_1_SQRT_2;
            } else {
                minus[0] = -sep;
            }
            let inv = 1.0 / (2.0 * width * width);
            let bump = move |x: &[f64], c: &[f64]| {
                (-inv * x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).exp()
            };
            let (p1, m1) = (plus.clone(), minus.clone());
            ScalarField::with_gradient(
                dim,
                label,
                move |x| w * bump(x, &p1) + (1.0 - w) * bump(x, &m1),
                move |x, g| {
                    let (b1, b2) = (w * bump(x, &plus), (1.0 - w) * bump(x, &minus));
                    for i in 0..x.len() {
                        g[i] = -2.0 * inv * (b1 * (x[i] - plus[i]) + b2 * (x[i] - minus[i]));
                    }
                },
            )
        }
        "poly_tanh" => {
            let (a, b) = (p["a"], p["b"]);
            ScalarField::with_gradient(
                dim,
                label,
                move |x| {
                    (a * x[0]).tanh()
                        + b * x.iter().map(|v| (1.0 + v * v).sqrt() - 1.0).sum::<f64>()
                },
                move |x, g| {
                    for (gi, v) in g.iter_mut().zip(x) {
                        *gi = b * v / (1.0 + v * v).sqrt();
                    }
                    let t = (a * x[0]).tanh();
                    g[0] += a * (1.0 - t * t);
                },
            )
        }
        "monotone1d" => {
            let a = p["a"];
            if a <= 0.0 {
                return Err(invalid(name, "a must be positive"));
            }
            ScalarField::with_gradient(
                dim,
                label,
                move |x| (-a * x[0]).exp(),
                move |x, g| {
                    g.fill(0.0);
                    g[0] = -a * (-a * x[0]).exp();
                },
            )
        }
        _ => unreachable!("defaults lookup rejects unknown names"),
    };
    Ok(field)
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}
