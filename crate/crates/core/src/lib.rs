//! Numerical analysis of quasiconformal equivalence between closed discrete
//! planar sets and the integer lattice.
//!
//! The library provides:
//!
//! - [`qs`]: the ratio criterion deciding when a real sequence window is
//!   consistent with equivalence, exact periodic-set checkers, and the
//!   scalar constants tying quasiconformal dilatation to spacing bounds;
//! - [`extension`]: the piecewise-linear boundary homeomorphism through a
//!   window, its quasisymmetry profile, an averaging extension to the plane,
//!   and finite-difference Beltrami/dilatation fields;
//! - [`geometry`]: porosity (largest empty disk) and bounded-turning
//!   (three-point) estimators with witnesses;
//! - [`modulus`]: extremal distance via the analytic annulus value, the
//!   Vuorinen lower bound, and a grid condenser capacity solver;
//! - [`corpus`]: generators for the standard example sets.
//!
//! All public types are immutable values; every operation is a pure function
//! and safe to call concurrently. With the default `parallel` feature the
//! inner loops run on rayon; outputs are bit-identical to the sequential
//! fallback (`--no-default-features`).

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
mod exec;
pub mod extension;
pub mod geometry;
pub mod model;
pub mod modulus;
pub mod qs;

pub use error::{Error, Result};

/// Entry points for benchmarking the sequential kernels against the
/// parallel ones. Not part of the stable API.
#[doc(hidden)]
pub mod internal {
    #[cfg(feature = "parallel")]
    pub use crate::exec::Par;
    pub use crate::exec::{Exec, Seq};
    pub use crate::extension::fill_extension;
    pub use crate::geometry::disk_scan;
    pub use crate::modulus::solve_condenser;

    use crate::model::{Polyline, RealSequenceWindow};

    pub fn ratio_m_hat<E: Exec>(ex: &E, w: &RealSequenceWindow) -> f64 {
        crate::qs::ratio_scan(ex, w.values()).0
    }

    pub fn turning_a_hat<E: Exec>(ex: &E, curve: &Polyline) -> f64 {
        crate::geometry::turning_scan_exhaustive(ex, curve.vertices()).0
    }
}
