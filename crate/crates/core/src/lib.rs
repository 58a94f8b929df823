//! Hausdorff dimensions of self-similar sets, computed and certified two ways.
//!
//! The crate implements both classical routes to the dimension of an IFS
//! attractor:
//!
//! 1. **Bound estimation.** Upper bounds from covering sums Σ|Uᵢ|ˢ over the
//!    natural cell covers ([`covering`]), lower bounds from the mass
//!    distribution principle applied to self-similar measures ([`measure`]).
//! 2. **Similarity dimension.** The Moran equation Σrᵢˢ = 1 solved in closed
//!    form or by certified bisection, promoted to a Hausdorff dimension when
//!    the open set condition holds ([`dimension`]).
//!
//! Both routes are exercised against two analytic worked examples: the unit
//! square (dimension 2, mass constant π/4) and the middle-thirds Cantor set
//! (dimension log 2/log 3, mass constant 4). These double as the oracles for
//! the acceptance suite.
//!
//! All operations are pure and deterministic; randomized sampling (chaos
//! game, mass-distribution certificates) is driven by an explicit 64-bit
//! seed and reproduces bit-identical results for identical inputs.

pub mod covering;
pub mod dimension;
pub mod geometry;
pub mod ifs;
pub mod measure;

mod error;

pub use error::{Error, Result};

/// Number formatting shared by every CSV surface.
pub mod fmt {
    /// Decimal scientific notation with 17 significant digits; parses back
    /// to the identical f64.
    pub fn sig17(x: f64) -> String {
        format!("{x:.16e}")
    }

}
