//! Gaussian decreasing rearrangements, first-coordinate Gaussian
//! symmetrization, and numerical checks of the rearrangement inequalities
//! built on them (Pólya–Szegő, Mazya–Talenti, Hardy–Calderón domination,
//! Orlicz equality chains).
//!
//! `I = φ∘Φ⁻¹` throughout is the Gaussian isoperimetric profile.
//!
//! Typical use:
//!
//! ```
//! use std::collections::BTreeMap;
//! use gaussym::{fields::builtin_field, gaussian::equal_measure_grid, verify};
//!
//! let f = builtin_field("gaussian_bump", &BTreeMap::new(), 1).unwrap();
//! let grid = equal_measure_grid(1, 1024).unwrap();
//! let a = verify::Analysis::new(&f, &grid, 512).unwrap();
//! let report = verify::check_reformulated(&a, &verify::CheckOptions::default());
//! assert!(report.pass);
//! ```

pub mod error;
pub mod fields;
pub mod gaussian;
pub mod majorize;
pub mod rearrange;
pub mod symmetrize;
pub mod verify;

pub use error::{Error, Result};
pub use fields::ScalarField;
pub use gaussian::GaussianGrid;
pub use majorize::{RINorm, YoungFunction};
pub use rearrange::Profile;
pub use verify::{Analysis, CheckOptions, IneqReport};
