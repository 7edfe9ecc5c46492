//! Weighted analytic regularity toolkit for the Laplacian on polygons and polyhedra.
//!
//! Singular exponents at corners and edges, admissible weights, closed-form fields
//! with exact derivatives, weighted semi-norms and analytic-class fits, spherical
//! cap eigenvalue computations and geometrically graded meshes.

pub mod error;
pub mod exact;
pub mod fields;
pub mod geometry;
pub mod mesher;
pub mod norms;
pub mod quadrature;
pub mod report;
pub mod spectra2d;
pub mod spherical;
pub mod vecmath;
pub mod weights;

pub use error::{Error, Result};
