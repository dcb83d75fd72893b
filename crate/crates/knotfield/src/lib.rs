//! Explicit real-analytic Beltrami fields on the open solid toroidal annulus
//! whose zero sets are prescribed (p,q)-torus knots.
//!
//! The construction transports a curl eigenfield `B` (eigenvalue +1) from a
//! flat model manifold through an integer twist and an angular chart onto the
//! annulus, carrying the flat metric along. The crate provides:
//!
//! - [`geometry`]: Bézout data, the torus-knot curve, the annulus domain, and
//!   the two coordinate diffeomorphisms with their inverses.
//! - [`fields`]: the base field, the closed-form transported fields, the
//!   trefoil special case, and a numeric-pushforward oracle.
//! - [`metric`]: the transported metrics, their inverses and Christoffel
//!   symbols, and a numeric-pullback oracle.
//! - [`calculus`]: forward-mode jets, metric-aware curl and divergence, and
//!   finite-difference oracles.
//! - [`zeroset`]: grid scan, damped least-squares refinement, and two-sided
//!   certification that the zero set is the prescribed knot.
//! - [`knotcheck`]: arc-length parametrization, curvature, and total-curvature
//!   computation certifying tameness at sample resolution.
//! - [`sample`]: a fixed-seed linear generator for reproducible sample points.
//!
//! Every closed form is generic over [`math::Scalar`], so the same expressions
//! evaluate on plain `f64` and on jet types carrying derivatives.
//!
//! The crate is `no_std`-compatible: disable the default `std` feature and
//! enable `libm` instead. Allocation is required (`alloc`).

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("enable at least one of the `std` or `libm` features");

extern crate alloc;

pub mod calculus;
pub mod fields;
pub mod geometry;
pub mod knotcheck;
pub mod linalg;
pub mod math;
pub mod metric;
pub mod sample;
pub mod zeroset;

pub use geometry::{CartesianPoint, KnotSpec, ToroidalPoint};

/// Crate version, for embedding in generated reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
