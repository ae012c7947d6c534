//! Quasi-Monte Carlo integration with digital nets over `Z_b`.
//!
//! The crate builds digital nets from generating matrices and from
//! higher-order polynomial lattice rules, randomizes them with a
//! digital shift, folds them with the b-adic tent transformation, and
//! evaluates worst-case errors in unanchored Sobolev spaces of smoothness
//! `alpha`. The figure of merit that bounds the mean square worst-case error
//! of folded shifted nets drives a small generating-vector search.
//!
//! Module map:
//!
//! - [`arith`]: exact b-adic digit strings, polynomials over `Z_b`, Laurent
//!   expansions of rational functions.
//! - [`walsh`]: b-adic Walsh functions in exponent form and the digit
//!   functionals built on them.
//! - [`nets`]: digital nets, polynomial lattice point sets, dual nets.
//! - [`transforms`]: random digital shifts and the tent transformation.
//! - [`sobolev`]: kernel, worst-case errors, figure of merit, closed-form
//!   constants.
//! - [`search`]: generating-vector search.
//! - [`experiment`]: convergence experiments and least-squares rate fits.
//! - [`formats`]: text and CSV file formats.

pub mod arith;
pub mod caps;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod nets;
pub mod search;
pub mod sobolev;
pub mod transforms;
pub mod walsh;

pub use arith::{BAdicReal, LaurentPrefix, PolyZb};
pub use caps::Caps;
pub use error::{Error, ErrorKind, Result};
pub use nets::{DigitalNet, GeneratingMatrices, PolyLatticeSpec};
pub use sobolev::{FigureOfMerit, KernelParams, Weights};
pub use transforms::{RngSpec, ShiftVector};
