//! Hierarchically hyperbolic structures on finite graph models.
//!
//! The crate builds finite Cayley-ball models with hand-built hierarchical
//! structures, verifies the structure axioms with witnesses, applies the
//! maximization procedure (essential-domain filter plus cone-off), and
//! property-tests the transfer statements at desk scale, tracking measured
//! constants across model radii.
//!
//! The graph and structure machinery is generic over the scalar type used
//! for edge lengths; see [`scalar::Scalar`]. The exact rational [`Rat`] is
//! the canonical instantiation and the one the CLI uses.

pub mod boundary;
pub mod error;
pub mod graph;
pub mod hhs;
pub mod io;
pub mod maximize;
pub mod models;
pub mod pipeline;
pub mod report;
pub mod scalar;

pub use scalar::{Rat, Scalar};

/// Canonical concrete aliases (exact rational arithmetic).
pub type RatGraph = graph::MetricGraph<Rat>;
pub type RatGeodesic = graph::Geodesic<Rat>;
pub type RatStructure = hhs::HhsStructure<Rat>;
pub type RatMaximized = maximize::MaximizationResult<Rat>;

/// Float aliases for quick experiments; the exact aliases above are what the
/// bundled models and the CLI use.
pub type F64Graph = graph::MetricGraph<f64>;
pub type F64Structure = hhs::HhsStructure<f64>;
