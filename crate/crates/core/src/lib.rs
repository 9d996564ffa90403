//! Links of real isolated singularities `(R^4, 0) -> (R^2, 0)`, their
//! suspensions `f + z^r`, and the cyclic branched covers those suspensions
//! realise.
//!
//! The pipeline is:
//!
//! 1. [`polymap`]: exact germs, parsing, substitution and suspension.
//! 2. [`certify`]: interval-arithmetic rank-2 certificates on an annulus.
//! 3. [`trace`]: predictor-corrector tracing of `f^{-1}(0) ∩ S^3_ε`.
//! 4. [`cover`]: pointwise verification that the suspension's link covers
//!    the sphere `r` times, branched along the traced link.
//! 5. [`knot`]: planar diagram, Alexander polynomial and cover homology.

pub mod certify;
pub mod cover;
pub mod error;
pub mod interval;
pub mod knot;
pub mod poly;
pub mod polymap;
pub mod trace;

pub use error::{CertifyError, CoverError, KnotError, PolyMapError, TraceError};
pub use polymap::{catalog, parse_polymap, ParseMode, PolyMap, Substitution};
