//! Exact scalars, polynomials and dense linear algebra.

mod factor;
mod field;
mod mat;
mod poly;
mod rat;

pub use factor::{factor_cyclo, FactorField, factor_rat, factor_u64, rational_roots, squarefree_decomposition, Factorization};
pub use field::{CycloElem, Field};
pub use mat::{solve_affine, AffineSolution, Mat, Rref};
pub use poly::{Poly, RootInterval};
pub use rat::Rat;
