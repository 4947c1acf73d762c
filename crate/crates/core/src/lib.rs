//! Anisotropic perimeter, anisotropic mean curvature, variation formulas
//! and relative isoperimetric profiles for smooth convex norms.

pub mod body;
pub mod domain;
pub mod error;
pub mod fd;
pub mod geom;
pub mod io;
pub mod poly;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod suite;
pub mod surface;
pub mod tolerance;
pub mod variation;

pub use body::{BodySpec, ConvexBody};
pub use domain::{Domain, DomainSpec};
pub use error::{Error, Result};
pub use surface::Hypersurface;

/// Sizes the global worker pool. Only the first call has an effect.
pub fn set_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}
