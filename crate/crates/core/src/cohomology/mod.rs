//! Equivariant cochains with coefficients in a coinduced module, their
//! cohomology, and the cochain maps `q^*`, restriction and transfer that
//! make up a Hecke operator.
//!
//! A cochain assigns to each orbit representative `sigma` a vector of
//! `(rho ⊗ or_sigma)^{Stab sigma}`: equivariance `f(g sigma) = rho(g) f(sigma)`
//! forces exactly this for stabilizer elements. That subspace is the image
//! of `P_sigma = |S|^{-1} sum_s eps(s) rho(s)`; its basis comes from the rref
//! of `P_sigma^t`, so coordinates of a vector in it are its entries at the
//! pivot columns.

mod maps;
mod sparse;

pub use maps::{coset_representatives, divide_set, pullback_q, restriction, transfer_p, gaussian_binomial};
pub use sparse::{map_on_cohomology, reduce, CochainComplex, Reduction, SparseMat};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coefficients::{CoinducedModule, Monomial};
use crate::complex::EqComplex;
use crate::exactmath::{Field, Mat};
use crate::{Error, Result};

/// The coefficient subspace attached to one cell.
#[derive(Clone, Debug)]
pub struct CellBlock<F: Field> {
    pub degree: usize,
    /// Position of the block inside `C^degree`.
    pub offset: usize,
    pub basis: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
}

impl<F: Field> CellBlock<F> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a vector of the subspace.
    pub fn coords(&self, w: &[F]) -> Vec<F> {
        self.pivots.iter().map(|&p| w[p].clone()).collect()
    }
}

/// Cochains of an [`EqComplex`] with coefficients in a coinduced module.
#[derive(Clone, Debug)]
pub struct EquivariantCochains<F: Field> {
    pub blocks: Vec<CellBlock<F>>,
    pub complex: CochainComplex<F>,
}

fn invariant_block<F: Field>(rho: &CoinducedModule, stab: &[(crate::lattice::IntMat, i32)]) -> (Vec<Vec<F>>, Vec<usize>) {
    let d = rho.dim();
    let mut p: Mat<F> = Mat::zeros(d, d);
    for (g, eps) in stab {
        let m: Monomial = rho.action(g);
        let e = F::from_int(*eps as i64);
        for (j, (&t, s)) in m.target.iter().zip(&m.scale).enumerate() {
            p.add_at(t, j, &F::from_cyclo(s).expect("scalar outside the coefficient field").times(&e));
        }
    }
    // scaling by 1/|S| does not change the image
    let r = p.transpose().rref();
    let basis = (0..r.rank).map(|i| r.reduced.row(i).to_vec()).collect();
    (basis, r.pivots)
}

/// `Hom_Gamma(C_*(X), rho)` for the oriented complex `cx`.
pub fn cochain_complex<F: Field>(cx: &EqComplex, rho: &CoinducedModule) -> Result<EquivariantCochains<F>> {
    let top = cx.max_dim();
    let mut dims = alloc::vec![0usize; top + 1];
    let mut blocks = Vec::with_capacity(cx.cells.len());
    for c in &cx.cells {
        let (basis, pivots) = invariant_block::<F>(rho, &c.stabilizer);
        blocks.push(CellBlock { degree: c.dim, offset: dims[c.dim], basis, pivots });
        dims[c.dim] += blocks.last().unwrap().rank();
    }
    // (d f)(sigma) = sum over faces sign rho(gamma) f(tau)
    let mut acc: Vec<Vec<BTreeMap<usize, F>>> = (0..top).map(|i| alloc::vec![BTreeMap::new(); dims[i]]).collect();
    for (s, c) in cx.cells.iter().enumerate() {
        let bs = &blocks[s];
        if c.dim == 0 || bs.rank() == 0 {
            continue;
        }
        for inc in &c.boundary {
            let bt = &blocks[inc.face];
            if bt.degree + 1 != c.dim {
                return Err(Error::Invariant(alloc::format!("face of cell {s} has the wrong dimension")));
            }
            let g = rho.action(&inc.gamma);
            let sign = F::from_int(inc.sign as i64);
            for (j, v) in bt.basis.iter().enumerate() {
                let w = g.apply(v);
                let col = &mut acc[bt.degree][bt.offset + j];
                for (k, x) in bs.coords(&w).into_iter().enumerate() {
                    if !x.is_zero() {
                        let e = col.entry(bs.offset + k).or_insert_with(F::zero);
                        *e = e.plus(&x.times(&sign));
                    }
                }
            }
        }
    }
    let d = acc.into_iter().enumerate().map(|(i, a)| SparseMat::from_accumulators(dims[i + 1], a)).collect();
    let complex = CochainComplex::new(dims, d)?;
    Ok(EquivariantCochains { blocks, complex })
}

impl<F: Field> EquivariantCochains<F> {
    /// Every block of `d f` is stabilizer-invariant (a check that the
    /// boundary data are complete) and `d^2 = 0`.
    pub fn validate(&self, cx: &EqComplex, rho: &CoinducedModule) -> Result<()> {
        self.complex.check_square_zero()?;
        for (i, d) in self.complex.d.iter().enumerate() {
            for col in &d.columns {
                let mut img = alloc::vec![F::zero(); d.rows];
                for (r, v) in col {
                    img[*r] = v.clone();
                }
                for (s, b) in self.blocks.iter().enumerate() {
                    if b.degree != i + 1 || b.rank() == 0 {
                        continue;
                    }
                    let mut w = alloc::vec![F::zero(); rho.dim()];
                    for (k, v) in b.basis.iter().enumerate() {
                        let x = &img[b.offset + k];
                        if !x.is_zero() {
                            for (t, y) in v.iter().enumerate() {
                                w[t] = w[t].plus(&y.times(x));
                            }
                        }
                    }
                    for (g, eps) in &cx.cells[s].stabilizer {
                        let gw = rho.action(g).apply(&w);
                        let e = F::from_int(*eps as i64);
                        if gw.iter().zip(&w).any(|(a, b)| a.times(&e) != *b) {
                            return Err(Error::Invariant(alloc::format!("coboundary block of cell {s} is not invariant")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The cochain value on cell `s` as a vector of the module.
    pub fn value(&self, s: usize, f: &[F]) -> Vec<F> {
        let b = &self.blocks[s];
        let mut w = alloc::vec![F::zero(); b.basis.first().map_or(0, Vec::len)];
        for (k, v) in b.basis.iter().enumerate() {
            let x = &f[b.offset + k];
            if !x.is_zero() {
                for (t, y) in v.iter().enumerate() {
                    w[t] = w[t].plus(&y.times(x));
                }
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{CoinducedModule, Nebentype};
    use crate::complex::fiber_complex;
    use crate::exactmath::{CycloElem, Rat};
    use crate::hecketope::{default_vertex_count, fiber_cells};
    use crate::lattice::HeckeDatum;

    fn gl_complex(n: usize) -> EqComplex {
        let h = HeckeDatum::new(n, 2, n).unwrap();
        fiber_complex(&fiber_cells(&Rat::one(), &h, default_vertex_count(n)).unwrap(), &h).unwrap()
    }

    #[test]
    fn gl2_trivial_coefficients() {
        let cx = gl_complex(2);
        let rho = CoinducedModule::new(&Nebentype::trivial(1).unwrap(), 2);
        let c = cochain_complex::<Rat>(&cx, &rho).unwrap();
        assert!(c.complex.dims.iter().all(|&d| d <= 1));
        assert_eq!(reduce(&c.complex).h_dims(), [1, 0]);
    }

    #[test]
    fn sl3_has_no_low_degree_cohomology() {
        let cx = gl_complex(3);
        let rho = CoinducedModule::new(&Nebentype::trivial(1).unwrap(), 3);
        let c = cochain_complex::<Rat>(&cx, &rho).unwrap();
        c.validate(&cx, &rho).unwrap();
        assert_eq!(reduce(&c.complex).h_dims(), [1, 0, 0, 0]);
    }

    #[test]
    fn gamma0_11_has_three_classes_in_degree_one() {
        let cx = gl_complex(2);
        let rho = CoinducedModule::new(&Nebentype::trivial(11).unwrap(), 2);
        let c = cochain_complex::<Rat>(&cx, &rho).unwrap();
        c.validate(&cx, &rho).unwrap();
        assert_eq!(reduce(&c.complex).h_dims(), [1, 3]);
    }

    #[test]
    fn level_five_cochains_over_gaussian_rationals() {
        let cx = gl_complex(3);
        let eta = Nebentype::parse(5, "chi").unwrap();
        let rho = CoinducedModule::new(&eta, 3);
        let c = cochain_complex::<CycloElem>(&cx, &rho).unwrap();
        c.validate(&cx, &rho).unwrap();
        let r = reduce(&c.complex);
        assert_eq!(r.h_dim(0), 0);
    }
}
