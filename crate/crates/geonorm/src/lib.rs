//! Formal geometric normalization of planar diffeomorphisms
//! F(z) = lambda z + O(|z|^2), lambda = e^{2 pi i omega} with omega
//! irrational.
//!
//! The crate computes, to any truncation order:
//! admissible pairs (L, Gamma) with L o F = Gamma o L, the invariant
//! foliation involution tau_F, the balanced series L_F, explicit Morse
//! normalizations Phi with |Phi|^2 = L, continued-fraction arithmetic for
//! Bruno / super-Liouville rotation numbers, constructors for the classical
//! divergent examples, jet extension of area-preserving maps, and
//! coefficient-growth diagnostics.

pub mod arith;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod family;
pub mod io;
pub mod models;
pub mod num;
pub mod areamap;
pub mod involutions;
pub mod series;

pub use error::{Error, Result};
pub use num::Ctx;
