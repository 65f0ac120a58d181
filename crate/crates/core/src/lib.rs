//! Aperiodic and random point sets in one dimension: cut and project model
//! sets over Euclidean and Q-adic internal spaces, constant-length
//! substitutions, binary random tilings, and the autocorrelation and
//! diffraction of the resulting Dirac combs.
// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod autocorr;
pub mod cli;
pub mod comb;
pub mod cps;
pub mod error;
pub mod lattice;
pub mod measure;
pub mod randomtiling;
pub mod spectrum;
pub mod substitution;

pub use algebra::{GoldenNumber, ModuleElement, QuadraticModule, TAU, TAU_CONJ};
pub use comb::{Positions, WeightedComb};
pub use error::{Error, Result};
pub use lattice::{dual_lattice, LatticeBasis};
pub use measure::{Atom, Provenance, SpectralMeasure};

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
