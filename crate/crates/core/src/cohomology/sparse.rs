//! Sparse matrices and cochain complexes, and cohomology by elimination of
//! invertible pairs.
//!
//! Eliminating a pair `(a, b)` with `d e_a = c e_b + alpha` (`c != 0`) splits
//! off the acyclic piece `e_a -> e_b`. The projection onto what remains is
//! `y -> y - alpha c^{-1} y_b` one degree up and forgetting `a`; the section
//! back is `x_a = -c^{-1} <row b, x>`. Repeating until no entries remain
//! leaves a basis of cohomology, and the recorded steps give cocycle
//! representatives and coordinates of classes.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::exactmath::{Field, Mat};
use crate::{Error, Result};

/// Column-major sparse matrix: `columns[j]` lists `(row, value)`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat<F: Field> {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, F)>>,
}

impl<F: Field> SparseMat<F> {
    pub fn zeros(rows: usize, cols: usize) -> SparseMat<F> {
        SparseMat { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Collect accumulated entries, dropping zeros.
    pub fn from_accumulators(rows: usize, acc: Vec<BTreeMap<usize, F>>) -> SparseMat<F> {
        let columns = acc.into_iter().map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();
        SparseMat { rows, columns }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (i, x) in col {
                out[*i] = out[*i].plus(&x.times(&v[j]));
            }
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMat<F>) -> SparseMat<F> {
        let acc = other
            .columns
            .iter()
            .map(|col| {
                let mut m: BTreeMap<usize, F> = BTreeMap::new();
                for (k, y) in col {
                    for (i, x) in &self.columns[*k] {
                        let e = m.entry(*i).or_insert_with(F::zero);
                        *e = e.plus(&x.times(y));
                    }
                }
                m
            })
            .collect();
        SparseMat::from_accumulators(self.rows, acc)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|(_, v)| v.is_zero()))
    }

    pub fn to_dense(&self) -> Mat<F> {
        let mut m = Mat::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn from_dense(m: &Mat<F>) -> SparseMat<F> {
        let columns = (0..m.cols()).map(|j| (0..m.rows()).filter(|&i| !m.get(i, j).is_zero()).map(|i| (i, m.get(i, j).clone())).collect()).collect();
        SparseMat { rows: m.rows(), columns }
    }
}

/// `C^0 -> C^1 -> ...` with `d[i] : C^i -> C^{i+1}`.
#[derive(Clone, Debug)]
pub struct CochainComplex<F: Field> {
    pub dims: Vec<usize>,
    pub d: Vec<SparseMat<F>>,
}

impl<F: Field> CochainComplex<F> {
    pub fn new(dims: Vec<usize>, d: Vec<SparseMat<F>>) -> Result<CochainComplex<F>> {
        if d.len() + 1 != dims.len().max(1) {
            return Err(Error::DimensionMismatch { expected: dims.len().saturating_sub(1), found: d.len() });
        }
        for (i, m) in d.iter().enumerate() {
            if m.cols() != dims[i] || m.rows != dims[i + 1] {
                return Err(Error::Invariant(format!("d_{i} has shape {}x{}", m.rows, m.cols())));
            }
        }
        Ok(CochainComplex { dims, d })
    }

    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    /// `d_{i+1} d_i = 0` in every degree.
    pub fn check_square_zero(&self) -> Result<()> {
        for i in 1..self.d.len() {
            if !self.d[i].mul(&self.d[i - 1]).is_zero() {
                return Err(Error::Invariant(format!("d_{} d_{} != 0", i, i - 1)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Step<F: Field> {
    /// Degree of `a`; `b` sits one degree higher.
    deg: usize,
    a: usize,
    b: usize,
    c_inv: F,
    /// The rest of column `a` when it was eliminated (degree `deg + 1`).
    alpha: Vec<(usize, F)>,
    /// The rest of row `b` (degree `deg`).
    beta: Vec<(usize, F)>,
}

/// The outcome of eliminating all invertible pairs of a cochain complex.
#[derive(Clone, Debug)]
pub struct Reduction<F: Field> {
    pub dims: Vec<usize>,
    steps: Vec<Step<F>>,
    /// Surviving basis vectors per degree: a basis of `H^i`.
    pub survivors: Vec<Vec<usize>>,
}

/// Sparse elimination, always pivoting on the shortest live column.
pub fn reduce<F: Field>(c: &CochainComplex<F>) -> Reduction<F> {
    let nd = c.dims.len();
    let mut offset = vec![0usize; nd + 1];
    for i in 0..nd {
        offset[i + 1] = offset[i] + c.dims[i];
    }
    let total = offset[nd];
    let deg_of = |g: usize| (0..nd).rfind(|&i| offset[i] <= g).unwrap();
    let mut rows: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); total];
    let mut cols: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); total];
    for (i, m) in c.d.iter().enumerate() {
        for (x, col) in m.columns.iter().enumerate() {
            for (y, v) in col {
                let (gx, gy) = (offset[i] + x, offset[i + 1] + y);
                rows[gy].insert(gx, v.clone());
                cols[gx].insert(gy, v.clone());
            }
        }
    }
    let mut alive = vec![true; total];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..total).filter(|&g| !cols[g].is_empty()).map(|g| Reverse((cols[g].len(), g))).collect();
    let mut steps = Vec::new();
    while let Some(Reverse((len, a))) = heap.pop() {
        if !alive[a] || cols[a].len() != len || len == 0 {
            continue;
        }
        let b = *cols[a].keys().min_by_key(|&&y| (rows[y].len(), y)).unwrap();
        let c_inv = cols[a][&b].inverse().expect("nonzero pivot");
        let alpha: Vec<(usize, F)> = cols[a].iter().filter(|(y, _)| **y != b).map(|(y, v)| (*y, v.clone())).collect();
        let beta: Vec<(usize, F)> = rows[b].iter().filter(|(x, _)| **x != a).map(|(x, v)| (*x, v.clone())).collect();
        // D -= alpha c^{-1} beta
        for (y, ay) in &alpha {
            let s = ay.times(&c_inv);
            for (x, bx) in &beta {
                let delta = s.times(bx);
                let e = rows[*y].entry(*x).or_insert_with(F::zero);
                *e = e.minus(&delta);
                if e.is_zero() {
                    rows[*y].remove(x);
                    cols[*x].remove(y);
                } else {
                    cols[*x].insert(*y, e.clone());
                }
            }
        }
        // drop a and b with all their entries
        let mut touched: Vec<usize> = beta.iter().map(|(x, _)| *x).collect();
        for g in [a, b] {
            alive[g] = false;
            for (x, _) in core::mem::take(&mut rows[g]) {
                cols[x].remove(&g);
                touched.push(x);
            }
            for (y, _) in core::mem::take(&mut cols[g]) {
                rows[y].remove(&g);
            }
        }
        for x in touched {
            if alive[x] && !cols[x].is_empty() {
                heap.push(Reverse((cols[x].len(), x)));
            }
        }
        let deg = deg_of(a);
        let loc = |g: usize, d: usize| g - offset[d];
        steps.push(Step {
            deg,
            a: loc(a, deg),
            b: loc(b, deg + 1),
            c_inv,
            alpha: alpha.into_iter().map(|(y, v)| (loc(y, deg + 1), v)).collect(),
            beta: beta.into_iter().map(|(x, v)| (loc(x, deg), v)).collect(),
        });
    }
    let survivors = (0..nd).map(|i| (0..c.dims[i]).filter(|&x| alive[offset[i] + x]).collect()).collect();
    Reduction { dims: c.dims.clone(), steps, survivors }
}

impl<F: Field> Reduction<F> {
    pub fn h_dim(&self, i: usize) -> usize {
        self.survivors.get(i).map_or(0, Vec::len)
    }

    pub fn h_dims(&self) -> Vec<usize> {
        self.survivors.iter().map(Vec::len).collect()
    }

    /// Class of a cocycle in the basis of `H^i`.
    pub fn project(&self, i: usize, z: &[F]) -> Vec<F> {
        let mut z = z.to_vec();
        for s in &self.steps {
            if s.deg + 1 == i && !z[s.b].is_zero() {
                let zb = z[s.b].times(&s.c_inv);
                for (y, v) in &s.alpha {
                    z[*y] = z[*y].minus(&v.times(&zb));
                }
                z[s.b] = F::zero();
            }
        }
        self.survivors[i].iter().map(|&x| z[x].clone()).collect()
    }

    /// A cocycle representing the class with coordinates `h`.
    pub fn lift(&self, i: usize, h: &[F]) -> Vec<F> {
        let mut x = vec![F::zero(); self.dims[i]];
        for (k, &s) in self.survivors[i].iter().enumerate() {
            x[s] = h[k].clone();
        }
        for s in self.steps.iter().rev() {
            if s.deg == i {
                let mut acc = F::zero();
                for (j, v) in &s.beta {
                    acc = acc.plus(&v.times(&x[*j]));
                }
                x[s.a] = acc.times(&s.c_inv).negate();
            }
        }
        x
    }

    /// Matrix whose columns lift the basis of `H^i`.
    pub fn representatives(&self, i: usize) -> Vec<Vec<F>> {
        let h = self.h_dim(i);
        (0..h)
            .map(|k| {
                let mut e = vec![F::zero(); h];
                e[k] = F::one();
                self.lift(i, &e)
            })
            .collect()
    }
}

/// The matrix of `f : C1^i -> C2^i` on cohomology, `H(f) = pi_2 f iota_1`.
pub fn map_on_cohomology<F: Field>(f: &SparseMat<F>, source: &Reduction<F>, target: &Reduction<F>, i: usize) -> Mat<F> {
    let cols: Vec<Vec<F>> = source.representatives(i).iter().map(|z| target.project(i, &f.apply(z))).collect();
    Mat::from_cols(target.h_dim(i), &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Rat;

    fn sm(m: &[&[i64]]) -> SparseMat<Rat> {
        SparseMat::from_dense(&Mat::from_ints(m))
    }

    fn circle() -> CochainComplex<Rat> {
        // two vertices, two edges between them
        CochainComplex::new(vec![2, 2], vec![sm(&[&[-1, 1], &[-1, 1]])]).unwrap()
    }

    #[test]
    fn circle_cohomology() {
        let c = circle();
        let r = reduce(&c);
        assert_eq!(r.h_dims(), [1, 1]);
        let z0 = r.lift(0, &[Rat::one()]);
        assert!(c.d[0].apply(&z0).iter().all(|x| x.is_zero()));
        assert_eq!(z0[0], z0[1]);
        // a coboundary projects to zero, an edge indicator does not
        let bd = c.d[0].apply(&[Rat::one(), Rat::zero()]);
        assert!(r.project(1, &bd).iter().all(|x| x.is_zero()));
        assert!(!r.project(1, &[Rat::one(), Rat::zero()])[0].is_zero());
    }

    #[test]
    fn zero_differentials_keep_everything() {
        let c = CochainComplex::<Rat>::new(vec![2, 3], vec![SparseMat::zeros(3, 2)]).unwrap();
        assert_eq!(reduce(&c).h_dims(), [2, 3]);
    }

    #[test]
    fn exact_complex_has_no_cohomology() {
        let c = CochainComplex::new(vec![1, 2, 1], vec![sm(&[&[1], &[1]]), sm(&[&[1, -1]])]).unwrap();
        c.check_square_zero().unwrap();
        assert_eq!(reduce(&c).h_dims(), [0, 0, 0]);
    }

    #[test]
    fn projection_inverts_lift() {
        // boundary of a tetrahedron's dual: S^2 as a 2-complex
        let d0 = sm(&[&[-1, 1, 0, 0], &[-1, 0, 1, 0], &[-1, 0, 0, 1], &[0, -1, 1, 0], &[0, -1, 0, 1], &[0, 0, -1, 1]]);
        let d1 = sm(&[&[1, -1, 0, 1, 0, 0], &[1, 0, -1, 0, 1, 0], &[0, 1, -1, 0, 0, 1], &[0, 0, 0, 1, -1, 1]]);
        let c = CochainComplex::new(vec![4, 6, 4], vec![d0, d1]).unwrap();
        c.check_square_zero().unwrap();
        let r = reduce(&c);
        assert_eq!(r.h_dims(), [1, 0, 1]);
        let z = r.lift(2, &[Rat::from_int(5)]);
        assert_eq!(r.project(2, &z), [Rat::from_int(5)]);
        assert_eq!(map_on_cohomology(&sm(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]), &r, &r, 2), Mat::identity(1));
    }
}
