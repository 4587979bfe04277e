use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::exactmath::{Mat, Rat};
use crate::{Error, Result};

/// Largest supported rank.
pub const MAX_N: usize = 4;

/// An integer row vector in `Z^n`, `n <= MAX_N`.
///
/// Vectors used as minimal vectors are kept sign-normalized (first nonzero
/// coordinate positive) so `x` and `-x` share one representative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatVec {
    n: u8,
    c: [i64; MAX_N],
}

impl LatVec {
    pub fn new(coords: &[i64]) -> LatVec {
        assert!(coords.len() <= MAX_N, "rank {} unsupported", coords.len());
        let mut c = [0; MAX_N];
        c[..coords.len()].copy_from_slice(coords);
        LatVec { n: coords.len() as u8, c }
    }

    pub fn zero(n: usize) -> LatVec {
        LatVec::new(&[0; MAX_N][..n])
    }

    pub fn unit(n: usize, i: usize) -> LatVec {
        let mut v = LatVec::zero(n);
        v.c[i] = 1;
        v
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.n as usize]
    }

    pub fn get(&self, i: usize) -> i64 {
        self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    pub fn is_normalized(&self) -> bool {
        self.coords().iter().find(|&&v| v != 0).is_none_or(|&v| v > 0)
    }

    /// `x` or `-x`, whichever has positive first nonzero coordinate.
    pub fn normalized(&self) -> LatVec {
        if self.is_normalized() {
            *self
        } else {
            self.neg()
        }
    }

    pub fn neg(&self) -> LatVec {
        let mut v = *self;
        for x in v.c.iter_mut() {
            *x = -*x;
        }
        v
    }

    pub fn scale(&self, k: i64) -> LatVec {
        let mut v = *self;
        for x in v.c.iter_mut() {
            *x *= k;
        }
        v
    }

    pub fn add(&self, o: &LatVec) -> LatVec {
        let mut v = *self;
        for (x, y) in v.c.iter_mut().zip(o.c) {
            *x += y;
        }
        v
    }

    pub fn dot(&self, o: &LatVec) -> i64 {
        self.c.iter().zip(o.c).map(|(a, b)| a * b).sum()
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> i64 {
        self.coords().iter().fold(0i64, |g, &v| num_integer::gcd(g, v))
    }

    /// Row vector times matrix: `x g`.
    pub fn mul_mat(&self, g: &IntMat) -> LatVec {
        assert_eq!(self.n(), g.n());
        let n = self.n();
        let mut out = LatVec::zero(n);
        for j in 0..n {
            out.c[j] = (0..n).map(|i| self.c[i] * g.get(i, j)).sum();
        }
        out
    }

    pub fn to_rats(&self) -> Vec<Rat> {
        self.coords().iter().map(|&v| Rat::from_int(v)).collect()
    }
}

impl fmt::Display for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LatVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<LatVec> {
        let bad = || Error::Parse(format!("lattice vector: {s}"));
        let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let coords: Vec<i64> =
            inner.split(',').map(|t| t.trim().parse::<i64>()).collect::<core::result::Result<_, _>>().map_err(|_| bad())?;
        if coords.is_empty() || coords.len() > MAX_N {
            return Err(bad());
        }
        Ok(LatVec::new(&coords))
    }
}

/// Render a vector list as `{(..),(..)}`.
pub fn format_vec_set(v: &[LatVec]) -> String {
    let mut s = String::from("{");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{x}"));
    }
    s.push('}');
    s
}

/// Rank over `Q` of a set of vectors.
pub fn rank_of(v: &[LatVec]) -> usize {
    if v.is_empty() {
        return 0;
    }
    Mat::from_rows(v.iter().map(|x| x.to_rats()).collect()).rank()
}

/// A small integer `n x n` matrix (elements of `GL_n(Z)` and of `Delta`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat {
    n: u8,
    e: [[i64; MAX_N]; MAX_N],
}

impl IntMat {
    pub fn zero(n: usize) -> IntMat {
        assert!(n <= MAX_N);
        IntMat { n: n as u8, e: [[0; MAX_N]; MAX_N] }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zero(n);
        for i in 0..n {
            m.e[i][i] = 1;
        }
        m
    }

    pub fn diag(d: &[i64]) -> IntMat {
        let mut m = IntMat::zero(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.e[i][i] = v;
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> IntMat {
        let mut m = IntMat::zero(rows.len());
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), rows.len());
            m.e[i][..r.len()].copy_from_slice(r);
        }
        m
    }

    /// Matrix with the given vectors as rows.
    pub fn from_vecs(rows: &[LatVec]) -> IntMat {
        let mut m = IntMat::zero(rows.len());
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.n(), rows.len());
            m.e[i][..r.n()].copy_from_slice(r.coords());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.e[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.e[i][j] = v;
    }

    pub fn row(&self, i: usize) -> LatVec {
        LatVec::new(&self.e[i][..self.n()])
    }

    pub fn mul(&self, o: &IntMat) -> IntMat {
        let n = self.n();
        assert_eq!(n, o.n());
        let mut m = IntMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.e[i][j] = (0..n).map(|k| self.e[i][k] * o.e[k][j]).sum();
            }
        }
        m
    }

    pub fn transpose(&self) -> IntMat {
        let mut m = IntMat::zero(self.n());
        for i in 0..self.n() {
            for j in 0..self.n() {
                m.e[j][i] = self.e[i][j];
            }
        }
        m
    }

    pub fn det(&self) -> i64 {
        let n = self.n();
        match n {
            0 => 1,
            1 => self.e[0][0],
            2 => self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0],
            _ => (0..n)
                .map(|j| {
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * self.e[0][j] * self.minor(0, j).det()
                })
                .sum(),
        }
    }

    fn minor(&self, r: usize, c: usize) -> IntMat {
        let n = self.n();
        let mut m = IntMat::zero(n - 1);
        let mut ii = 0;
        for i in (0..n).filter(|&i| i != r) {
            let mut jj = 0;
            for j in (0..n).filter(|&j| j != c) {
                m.e[ii][jj] = self.e[i][j];
                jj += 1;
            }
            ii += 1;
        }
        m
    }

    /// Adjugate, so `self * adj = det * I`.
    pub fn adjugate(&self) -> IntMat {
        let n = self.n();
        let mut m = IntMat::zero(n);
        if n == 1 {
            m.e[0][0] = 1;
            return m;
        }
        for i in 0..n {
            for j in 0..n {
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                m.e[j][i] = s * self.minor(i, j).det();
            }
        }
        m
    }

    /// Inverse when it is integral (`det = +-1`, or more generally when the
    /// adjugate is divisible by the determinant).
    pub fn inverse_int(&self) -> Option<IntMat> {
        let d = self.det();
        if d == 0 {
            return None;
        }
        let adj = self.adjugate();
        let mut m = IntMat::zero(self.n());
        for i in 0..self.n() {
            for j in 0..self.n() {
                if adj.e[i][j] % d != 0 {
                    return None;
                }
                m.e[i][j] = adj.e[i][j] / d;
            }
        }
        Some(m)
    }

    pub fn to_mat(&self) -> Mat<Rat> {
        Mat::from_rows((0..self.n()).map(|i| (0..self.n()).map(|j| Rat::from_int(self.e[i][j])).collect()).collect())
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMat::identity(self.n())
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for IntMat {
    type Err = Error;

    /// Parses the `Display` form `[(a,b),(c,d)]`.
    fn from_str(s: &str) -> Result<IntMat> {
        let bad = || Error::Parse(format!("integer matrix: {s}"));
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let mut rows = Vec::new();
        for part in inner.split("),") {
            let p = if part.ends_with(')') { String::from(part) } else { format!("{part})") };
            rows.push(p.parse::<LatVec>()?);
        }
        if rows.iter().any(|r| r.n() != rows.len()) {
            return Err(bad());
        }
        Ok(IntMat::from_vecs(&rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_text() {
        let v = LatVec::new(&[0, -2, 3]);
        assert_eq!(v.normalized(), LatVec::new(&[0, 2, -3]));
        assert_eq!(format!("{}", v), "(0,-2,3)");
        assert_eq!("(0,-2,3)".parse::<LatVec>().unwrap(), v);
    }

    #[test]
    fn intmat_algebra() {
        let g = IntMat::from_rows(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, -1]]);
        assert_eq!(g.det(), -1);
        let gi = g.inverse_int().unwrap();
        assert!(g.mul(&gi).is_identity());
        assert_eq!(format!("{g}").parse::<IntMat>().unwrap(), g);
        let x = LatVec::new(&[1, 0, 0]);
        assert_eq!(x.mul_mat(&g), LatVec::new(&[2, 1, 0]));
        assert_eq!(IntMat::diag(&[1, 2]).inverse_int(), None);
    }
}
