//! Exact construction of well-tempered complexes for the Hecke
//! correspondences `T_{l,k}` on `GL_n(Z)` (`n = 2, 3`), and the Hecke
//! operators they induce on equivariant cohomology with nebentype
//! coefficients.
//!
//! Everything here is exact: rationals, small cyclotomic fields, integer
//! lattice vectors. There is no floating point anywhere in the crate.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the CLI and
//! parallel orchestration live in the `wtc` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod exactmath;
pub mod lattice;
pub mod hull;
pub mod hecketope;
pub mod temperament;
pub mod complex;
pub mod coefficients;
pub mod cohomology;
pub mod hecke;

mod error;

pub use error::{Error, Result};
