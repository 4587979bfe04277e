//! Dense matrices over a [`Field`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::field::Field;
use super::poly::Poly;
use super::rat::Rat;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Output of [`Mat::rref`].
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: Mat<F>,
    /// One vector per free column; together they span the null space.
    pub kernel: Vec<Vec<F>>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Mat<F> {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Mat<F> {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Mat<F> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Mat { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<F>]) -> Mat<F> {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Mat<F> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| F::from_int(v)).collect()).collect())
    }

    pub fn diag(d: &[F]) -> Mat<F> {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &F) {
        let k = i * self.cols + j;
        self.data[k] = self.data[k].plus(v);
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &a.times(b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn sub(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect() }
    }

    pub fn scale(&self, s: &F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.times(s)).collect() }
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat<F> {
        let mut m = Mat::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat<F>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn hstack(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!(self.rows, o.rows);
        let mut m = Mat::zeros(self.rows, self.cols + o.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, o);
        m
    }

    pub fn vstack(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, o.cols);
        let mut m = Mat::zeros(self.rows + o.rows, self.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, 0, o);
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat<F> {
        let mut m = Mat::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat<F> {
        let mut m = Mat::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(ii, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Mat<G> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Reduced row-echelon form together with a null-space basis.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..cols {
                    m.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = m.get(r, c).inverse().unwrap();
            for j in c..cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).minus(&f.times(pv));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        let mut is_pivot = vec![false; cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut kernel = Vec::new();
        for free in (0..cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); cols];
            v[free] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = m.get(i, free).negate();
            }
            kernel.push(v);
        }
        Rref { rank, pivots, reduced: m, kernel }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn kernel(&self) -> Vec<Vec<F>> {
        self.rref().kernel
    }

    pub fn det(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else { return Ok(F::zero()) };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = det.negate();
            }
            let piv = m.get(c, c).clone();
            det = det.times(&piv);
            let inv = piv.inverse().unwrap();
            for i in c + 1..n {
                let f = m.get(i, c).times(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).minus(&f.times(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Mat<F>> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(n)).rref();
        if aug.pivots.len() < n || aug.pivots[n - 1] != n - 1 {
            return Err(Error::Invariant("matrix is singular".into()));
        }
        Ok(aug.reduced.block(0, n, n, 2 * n))
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let bm = Mat::from_cols(self.rows, &[b.to_vec()]);
        let r = self.hstack(&bm).rref();
        if r.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &p) in r.pivots.iter().enumerate() {
            x[p] = r.reduced.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Monic characteristic polynomial `det(X I - A)` via Hessenberg reduction.
    pub fn charpoly(&self) -> Result<Poly<F>> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut h = self.clone();
        // reduce to upper Hessenberg form by similarity
        for c in 0..n.saturating_sub(2) {
            let Some(p) = (c + 1..n).find(|&i| !h.get(i, c).is_zero()) else { continue };
            if p != c + 1 {
                for j in 0..n {
                    h.data.swap(p * n + j, (c + 1) * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + c + 1);
                }
            }
            let inv = h.get(c + 1, c).inverse().unwrap();
            for i in c + 2..n {
                let f = h.get(i, c).times(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = h.get(i, j).minus(&f.times(h.get(c + 1, j)));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = h.get(r, c + 1).plus(&f.times(h.get(r, i)));
                    h.set(r, c + 1, v);
                }
            }
        }
        // p_k = charpoly of leading k x k block
        let x = Poly::<F>::x();
        let mut p: Vec<Poly<F>> = vec![Poly::one()];
        for k in 0..n {
            let mut pk = x.sub(&Poly::constant(h.get(k, k).clone())).mul(&p[k]);
            let mut prod = F::one();
            for i in (0..k).rev() {
                prod = prod.times(h.get(i + 1, i));
                if prod.is_zero() {
                    break;
                }
                let t = prod.times(h.get(i, k));
                pk = pk.sub(&p[i].scale(&t));
            }
            p.push(pk);
        }
        Ok(p.pop().unwrap())
    }

    pub fn commutes_with(&self, o: &Mat<F>) -> bool {
        self.mul(o) == o.mul(self)
    }
}

impl<F: Field> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for v in self.row(i) {
                write!(f, "{v} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Solution of a linear system whose right-hand side is affine in one
/// parameter `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    /// `x(u) = constant + u * slope` for every `u`.
    Unique { constant: Vec<Rat>, slope: Vec<Rat> },
    /// Solvable only at the single parameter value `u`.
    PointOnly { u: Rat, x: Vec<Rat> },
    Infeasible,
}

/// Solve `a * x = b0 + u * b1` for `x` as a function of `u`.
///
/// Errors with `Underdetermined` when `a` has a nontrivial kernel.
pub fn solve_affine(a: &Mat<Rat>, b0: &[Rat], b1: &[Rat]) -> Result<AffineSolution> {
    let n = a.cols();
    let rhs = Mat::from_cols(a.rows(), &[b0.to_vec(), b1.to_vec()]);
    let r = a.hstack(&rhs).rref();
    let lhs_pivots: Vec<usize> = r.pivots.iter().copied().filter(|&p| p < n).collect();
    let rank = lhs_pivots.len();
    // rows below the coefficient rank encode constraints c0 + u c1 = 0
    let mut point: Option<Rat> = None;
    for i in rank..r.reduced.rows() {
        let c0 = r.reduced.get(i, n);
        let c1 = r.reduced.get(i, n + 1);
        if c1.is_zero() {
            if !c0.is_zero() {
                return Ok(AffineSolution::Infeasible);
            }
            continue;
        }
        let u = -&(c0 / c1);
        match &point {
            Some(p) if *p != u => return Ok(AffineSolution::Infeasible),
            _ => point = Some(u),
        }
    }
    if rank < n {
        return Err(Error::Underdetermined { free: n - rank });
    }
    let mut constant = vec![Rat::zero(); n];
    let mut slope = vec![Rat::zero(); n];
    for (i, &p) in lhs_pivots.iter().enumerate() {
        constant[p] = r.reduced.get(i, n).clone();
        slope[p] = r.reduced.get(i, n + 1).clone();
    }
    Ok(match point {
        None => AffineSolution::Unique { constant, slope },
        Some(u) => {
            let x = constant.iter().zip(&slope).map(|(c, s)| c + &(&u * s)).collect();
            AffineSolution::PointOnly { u, x }
        }
    })
}
