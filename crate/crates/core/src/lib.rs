//! Exact spectral criterion for homotopy classes of surface maps with
//! infinitely many minimal periods.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] and [`scalar`]: univariate polynomial algebra generic over the
//!   coefficient field, instantiated with arbitrary-precision rationals.
//! * [`matrix`] and [`homology`]: integer matrix algebra for the first
//!   homology action, characteristic polynomials and invariant factors.
//! * [`unit_circle`]: exact root counts inside, on and outside the unit circle.
//! * [`criterion`]: the pair-based spectral criterion, the torus trace/determinant
//!   rule and Lefschetz numbers of iterates.
//! * [`toral`]: brute-force periodic point census for linear toral maps.
//! * [`interval`], [`bivariate`], [`fixpoint`]: certified fixed-point
//!   localisation for polynomial maps of the unit square.
//! * [`torus_loops`]: signed intersection numbers of PL loops on the flat torus.
//! * [`scan`]: the trace/determinant differential scan.
//!
//! Generic building blocks take a scalar parameter; the concrete exact types
//! used throughout are re-exported below as aliases.

pub mod bivariate;
pub mod criterion;
pub mod error;
pub mod fixpoint;
pub mod homology;
pub mod interval;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod scan;
pub mod toral;
pub mod torus_loops;
pub mod unit_circle;

pub use bivariate::{Axis, PolynomialMap2D};
pub use error::{Error, Result};

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rational, always stored reduced with positive denominator.
pub type Rational = num_rational::BigRational;
/// Univariate polynomial over the rationals.
pub type RationalPoly = poly::Poly<Rational>;
/// Bivariate polynomial over the rationals.
pub type RationalPoly2 = bivariate::Poly2<Rational>;
/// Interval with outward-rounded `f64` endpoints.
pub type Interval64 = interval::Interval<f64>;
/// Interval with exact rational endpoints.
pub type RationalInterval = interval::Interval<Rational>;
/// Squarefree decomposition over the rationals.
pub type RationalSquarefree = poly::SquarefreePart<Rational>;
/// Dense integer matrix.
pub type IntMatrix = matrix::Matrix<Integer>;

pub use homology::{HomologyMatrix, InvariantFactors};

pub use criterion::{CriterionVerdict, Semantics, SpectralClassification, Status, Witness};
pub use fixpoint::{CertifiedBox, FixedPointSquare};
pub use scan::ScanRow;
pub use toral::ToralPeriodReport;
pub use unit_circle::UnitCircleCount;
