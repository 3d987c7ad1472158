//! Transfer operators of piecewise-affine expanding maps of the plane.
//!
//! The crate covers exact pushforward of piecewise-constant polygonal
//! densities, bounded-variation norms, Ulam discretization, certification of
//! the expanding-map constants, and the numerical experiments on the
//! two-dimensional tent family `Λ_t`, `t ∈ [τ, 1]`.

pub mod density;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod maps;
pub mod output;
pub mod svg;

mod overlay;
mod par;

pub use error::{Error, Result};
