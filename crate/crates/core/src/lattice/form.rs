use alloc::vec::Vec;
use core::fmt;

use super::vec::{IntMat, LatVec};
use crate::exactmath::{Mat, Rat};
use crate::{Error, Result};

/// A symmetric rational `n x n` matrix, read as the quadratic form
/// `Z[x] = x Z x^t` on row vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    n: usize,
    // upper triangle, row-major: (0,0),(0,1),..,(0,n-1),(1,1),..
    e: Vec<Rat>,
}

/// Dimension of the space of symmetric `n x n` matrices.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of entry `(i, j)` in upper-triangular order.
pub fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl Form {
    pub fn zero(n: usize) -> Form {
        Form { n, e: alloc::vec![Rat::zero(); sym_dim(n)] }
    }

    pub fn identity(n: usize) -> Form {
        let mut f = Form::zero(n);
        for i in 0..n {
            f.set(i, i, Rat::one());
        }
        f
    }

    pub fn diag(d: &[Rat]) -> Form {
        let mut f = Form::zero(d.len());
        for (i, v) in d.iter().enumerate() {
            f.set(i, i, v.clone());
        }
        f
    }

    /// From a full matrix, which must be symmetric.
    pub fn from_mat(m: &Mat<Rat>) -> Result<Form> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        let mut f = Form::zero(n);
        for i in 0..n {
            for j in i..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Invariant("form is not symmetric".into()));
                }
                f.set(i, j, m.get(i, j).clone());
            }
        }
        Ok(f)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Form {
        Form::from_mat(&Mat::from_ints(rows)).expect("symmetric")
    }

    /// Entries in upper-triangular order.
    pub fn from_upper(n: usize, e: Vec<Rat>) -> Form {
        assert_eq!(e.len(), sym_dim(n));
        Form { n, e }
    }

    /// The form whose values are `Z[x] = sum_{i<=j} nu_ij x_i x_j`, i.e. the
    /// symmetric matrix with `Z_ii = nu_ii`, `Z_ij = nu_ij / 2`.
    pub fn from_functional(n: usize, nu: &[Rat]) -> Form {
        assert_eq!(nu.len(), sym_dim(n));
        let half = Rat::new(1, 2);
        let mut f = Form::zero(n);
        for i in 0..n {
            for j in i..n {
                let v = &nu[sym_index(n, i, j)];
                f.set(i, j, if i == j { v.clone() } else { v * &half });
            }
        }
        f
    }

    /// Inverse of [`Form::from_functional`].
    pub fn functional(&self) -> Vec<Rat> {
        let two = Rat::from_int(2);
        let mut out = Vec::with_capacity(self.e.len());
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                out.push(if i == j { v.clone() } else { v * &two });
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.e[sym_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        let k = sym_index(self.n, i, j);
        self.e[k] = v;
    }

    pub fn upper(&self) -> &[Rat] {
        &self.e
    }

    pub fn to_mat(&self) -> Mat<Rat> {
        Mat::from_rows((0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect()).collect())
    }

    pub fn add(&self, o: &Form) -> Form {
        Form { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Form) -> Form {
        Form { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: &Rat) -> Form {
        Form { n: self.n, e: self.e.iter().map(|a| a * s).collect() }
    }

    /// `g Z g^t`, so that `(g.Z)[x] = Z[x g]`.
    pub fn act(&self, g: &IntMat) -> Form {
        let n = self.n;
        let mut out = Form::zero(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Rat::zero();
                for a in 0..n {
                    let gia = g.get(i, a);
                    if gia == 0 {
                        continue;
                    }
                    for b in 0..n {
                        let gjb = g.get(j, b);
                        if gjb == 0 {
                            continue;
                        }
                        acc += &(self.get(a, b) * &Rat::from_int(gia * gjb));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn det(&self) -> Rat {
        self.to_mat().det().expect("square")
    }

    /// Exact test via leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        let m = self.to_mat();
        (1..=self.n).all(|k| m.block(0, k, 0, k).det().expect("square").is_positive())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `x Z x^t`.
pub fn eval_form(z: &Form, x: &LatVec) -> Result<Rat> {
    if z.n() != x.n() {
        return Err(Error::DimensionMismatch { expected: z.n(), found: x.n() });
    }
    Ok(eval_unchecked(z, x))
}

pub(crate) fn eval_unchecked(z: &Form, x: &LatVec) -> Rat {
    let n = z.n();
    let mut acc = Rat::zero();
    for i in 0..n {
        let xi = x.get(i);
        if xi == 0 {
            continue;
        }
        acc += &(z.get(i, i) * &Rat::from_int(xi * xi));
        for j in i + 1..n {
            let xj = x.get(j);
            if xj != 0 {
                acc += &(z.get(i, j) * &Rat::from_int(2 * xi * xj));
            }
        }
    }
    acc
}

/// The rank-one form `psi(x)_ij = x_i x_j`.
pub fn psi(x: &LatVec) -> Result<Form> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = x.n();
    let mut f = Form::zero(n);
    for i in 0..n {
        for j in i..n {
            f.set(i, j, Rat::from_int(x.get(i) * x.get(j)));
        }
    }
    Ok(f)
}

/// Monomials `x_i x_j` (`i <= j`): the coordinates of `psi(x)` dual to
/// [`Form::functional`], so `Z[x] = <functional(Z), psi_coords(x)>`.
pub fn psi_coords(x: &LatVec) -> Vec<i64> {
    let n = x.n();
    let mut out = Vec::with_capacity(sym_dim(n));
    for i in 0..n {
        for j in i..n {
            out.push(x.get(i) * x.get(j));
        }
    }
    out
}

/// Trace pairing `sum_ij A_ij B_ij` on real symmetric matrices.
pub fn inner_ee(a: &Form, b: &Form) -> Result<Rat> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: b.n() });
    }
    let n = a.n();
    let mut acc = Rat::zero();
    for i in 0..n {
        for j in 0..n {
            acc += &(a.get(i, j) * b.get(i, j));
        }
    }
    Ok(acc)
}

pub fn is_positive_definite(z: &Form) -> bool {
    z.is_positive_definite()
}
