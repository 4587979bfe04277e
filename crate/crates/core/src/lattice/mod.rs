//! Quadratic forms on `L_0 = Z^n`, the rank-one map `psi`, temperament
//! weights, and exact short-vector enumeration.

mod form;
mod short;
mod vec;

pub use form::{eval_form, inner_ee, is_positive_definite, psi, psi_coords, sym_dim, sym_index, Form};
pub(crate) use form::eval_unchecked;
pub use short::{in_m0, minimal_vectors, short_vectors, weight_u, weighted_length, HeckeDatum, Minimal};
pub use vec::{format_vec_set, rank_of, IntMat, LatVec, MAX_N};
