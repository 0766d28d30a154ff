//! Bordered Floer calculus over the torus algebra.
//!
//! Builds type D structures for knot complements from knot Floer complexes,
//! converts them to type A modules, and pairs the two with the box tensor
//! product to compute the rank of hat-HF for splices of knot complements.

pub mod cfk_complex;
pub mod error;
pub mod cfd_builder;
pub mod f2;
pub mod knot_library;
pub mod pairing;
pub mod torus_algebra;
pub mod type_a;
pub mod type_d;
pub mod word_calculus;

pub use error::{Error, ParseError, Result};
pub use torus_algebra::{AlgebraElement, Generator, Idempotent, RhoIndex};
