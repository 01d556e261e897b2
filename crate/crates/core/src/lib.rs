//! S-adic shifts: substitutions, dual substitutions, Rauzy fractals,
//! coincidence checks, continued fraction algorithms and Lyapunov exponents.

pub mod cf;
pub mod coincidence;
pub mod directive;
pub mod dynamics;
pub mod error;
pub mod fractal;
pub mod geometry;
pub mod grid;
pub mod lyapunov;
pub mod matrix;
mod par;
pub mod raster;
pub mod symbolic;

pub use directive::DirectiveSequence;
pub use error::{Result, SadicError};
pub use matrix::{IntMatrix, IntVector};
pub use symbolic::{Letter, Substitution, Word};
