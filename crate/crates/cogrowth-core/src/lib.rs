//! Exact and modular cogrowth counting for unitriangular matrix groups.
//!
//! The crate compiles a multivariate Diophantine equation into generating
//! sets of a unitriangular group whose cogrowth sequences differ modulo a
//! prime power exactly when the equation has an integer root, and provides
//! the counting engine used to check every step of that construction at
//! desk scale:
//!
//! - [`matrix`]: arbitrary-precision upper-unitriangular matrices,
//! - [`poly`]: multivariate integer polynomials and the binomial basis,
//! - [`gadget`]: the matrix gadgets computing a polynomial in a corner entry,
//! - [`genset`]: weighted symmetric generating sets,
//! - [`engine`]: exact/modular closed-walk (cogrowth) counting,
//! - [`pattern`]: pattern-constrained word counting,
//! - [`congruence`]: the end-to-end congruence scans,
//! - [`charge`]: charged-generator counting and parity facts.

pub mod arith;
pub mod charge;
pub mod congruence;
pub mod engine;
pub mod error;
pub mod gadget;
pub mod genset;
pub mod matrix;
pub mod pattern;
pub mod poly;

pub use error::{Error, Result};
pub use gadget::{GadgetLevel, GadgetSet};
pub use genset::GeneratingSet;
pub use matrix::{CanonicalKey, UniMatrix};
pub use poly::{BinomialForm, MultiPoly};
