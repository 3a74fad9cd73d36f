//! Interpolation between oriented hypersurfaces by Lorentzian geodesic flows.
//!
//! Each tangent hyperplane `n · x = c` of ℝ^d is a point `(n, c, c)` of the
//! unit hyperquadric of Minkowski space ℝ^{d+2,1}. Geodesics of that quadric
//! between corresponding tangent planes have a closed form, and the
//! intermediate hypersurfaces are recovered as envelopes of the flowed
//! hyperplane families.
//!
//! Modules, bottom up:
//! * [`lorentz`]: Minkowski algebra, hyperplane points, the Lorentz and duality maps.
//! * [`weights`]: the scalar weights λ, μ, σ and ∂λ/∂θ.
//! * [`geodesic`]: geodesic segments, the extended Poincaré action, special flows.
//! * [`envelope`]: envelope points, generalized cross products, smoothness tests.
//! * [`frames`]: Lorentzian parallel sections and frame transport.
//! * [`flow`]: surfaces, correspondences, level surfaces and singularity scans.
//! * [`catalog`]: built-in parametric surfaces.

pub mod catalog;
pub mod envelope;
pub mod error;
pub mod flow;
pub mod frames;
pub mod geodesic;
pub mod lorentz;
pub mod weights;

pub use error::{GeomError, Result};
pub use geodesic::{GeodesicSegment, PoincareElement};
pub use lorentz::{DualProjectivePoint, HyperplanePoint, MinkowskiVector};
