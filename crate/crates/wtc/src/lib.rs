//! Command-line pipeline around `wtc-core`: a hashed text store for well-
//! tempered complexes, parallel builds, verification and Hecke tables.

pub mod cli;
pub mod pipeline;
pub mod store;
