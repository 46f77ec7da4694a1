//! Numerical and exact-arithmetic laboratory for entire curves.
//!
//! The crate implements, at desk scale, the analytic and arithmetic machinery
//! needed to study rational points of bounded height on entire curves:
//!
//! * [`disk`] — Green/Poisson kernels on disks, the hyperbolic metric,
//!   hyperbolic coverings and Boutroux–Cartan exceptional sets.
//! * [`curve`] — evaluable entire curves (closed-form and interpolation
//!   series), polynomial sections and pullbacks.
//! * [`zeros`] — winding-number zero localization with multiplicities.
//! * [`nevanlinna`] — characteristic functions (both definitions, moving base
//!   point), proximity integrals and First Main Theorem residuals.
//! * [`heights`] — exact rational points, Fubini–Study/Weil heights,
//!   Liouville checks and bounded-height enumeration.
//! * [`siegel`] — desk-scale Siegel lemma over the integers and auxiliary
//!   polynomials vanishing on prescribed point sets.
//! * [`counting`] — counting tables, exponential envelopes, small-diameter
//!   vanishing and polynomial-window scans.
//!
//! All operations are pure functions of their inputs; curves and profiles are
//! immutable after construction.

pub mod config;
pub mod counting;
pub mod curve;
pub mod disk;
pub mod heights;
pub mod nevanlinna;
pub mod quad;
pub mod siegel;
pub mod suite;
pub mod zeros;

pub use curve::{CurveKind, EntireCurve, PolynomialSection};
pub use disk::{AtomicMeasure, Disk, DiskSet, GreenKernel};
pub use heights::{HeightedPoint, RationalPoint};
pub use nevanlinna::{CharacteristicProfile, FmtReport};
pub use zeros::ZeroRecord;

/// Crate version string embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
