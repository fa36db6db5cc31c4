//! Exact simplicial subdivisions, regularity certificates for
//! triangulations and complete fans, and the derived-subdivision pipelines
//! that make them regular.
//!
//! All arithmetic is over arbitrary-precision rationals. Complexes are
//! stored by their facets; fans are stored as star-shaped spheres around
//! the origin, so one set of wall tests serves both settings.

pub mod bistellar;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod iso;
pub mod linalg;
pub mod lp;
mod par;
pub mod pipeline;
pub mod regularity;
pub mod subdivision;

pub use complex::{Complex, FVector, Face, Vertex};
pub use error::{Error, Result};
pub use geometry::{fan_from_sphere, realize, realize_with, Fan, GeometricComplex, RealizeOptions};
pub use linalg::{Point, Rat};
