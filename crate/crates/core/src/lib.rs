//! Approximate joint measurements of spin-1 squared projections.
//!
//! The crate builds measurement interactions between a spin-1 system and
//! binary pointers, extracts their Kraus operators and POVMs, evaluates
//! maximal rms errors of retrodiction and prediction, decides Kochen–Specker
//! colourability of finite ray sets, and runs a Monte Carlo comparison of a
//! noisy hidden-variable valuation against quantum outcome statistics.

pub mod accuracy;
pub mod cli;
pub mod coloring;
pub mod context;
pub mod error;
pub mod matrix;
pub mod measure;
pub mod spin1;
pub mod tolerance;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Ket, C64};
pub use spin1::{Triad, UnitVector3};
