//! Certified short- and minimal-vector enumeration (Fincke-Pohst over `Q`).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::form::{eval_unchecked, Form};
use super::vec::{rank_of, IntMat, LatVec};
use crate::exactmath::Rat;
use crate::{Error, Result};

/// The data of the correspondence `T_{l,k}`: `a = diag(1,..,1,l,..,l)` with
/// `k` trailing `l`'s and `M_0 = L_0 a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HeckeDatum {
    pub n: usize,
    pub ell: i64,
    pub k: usize,
}

impl HeckeDatum {
    pub fn new(n: usize, ell: i64, k: usize) -> Result<HeckeDatum> {
        if !(2..=super::MAX_N).contains(&n) {
            return Err(Error::Invariant(alloc::format!("rank {n} unsupported")));
        }
        if ell < 2 || (2..ell).take_while(|d| d * d <= ell).any(|d| ell % d == 0) {
            return Err(Error::Invariant(alloc::format!("{ell} is not prime")));
        }
        if k == 0 || k > n {
            return Err(Error::Invariant(alloc::format!("k = {k} outside 1..={n}")));
        }
        Ok(HeckeDatum { n, ell, k })
    }

    pub fn a(&self) -> IntMat {
        let d: Vec<i64> = (0..self.n).map(|i| if i >= self.n - self.k { self.ell } else { 1 }).collect();
        IntMat::diag(&d)
    }

    /// `u_0 = 1 / l^2`, the bottom of the temperament range.
    pub fn u0(&self) -> Rat {
        Rat::new(1, self.ell * self.ell)
    }

    /// `tau_0 = l`.
    pub fn tau0(&self) -> i64 {
        self.ell
    }

    /// `x a^{-1}` for `x` in `M_0`.
    pub fn divide_by_a(&self, x: &LatVec) -> Option<LatVec> {
        if !in_m0(x, self) {
            return None;
        }
        let mut c: Vec<i64> = x.coords().to_vec();
        for v in c.iter_mut().skip(self.n - self.k) {
            *v /= self.ell;
        }
        Some(LatVec::new(&c))
    }

    /// `x a`.
    pub fn times_a(&self, x: &LatVec) -> LatVec {
        x.mul_mat(&self.a())
    }
}

/// `x in M_0 = L_0 a`: the last `k` coordinates are divisible by `l`.
pub fn in_m0(x: &LatVec, h: &HeckeDatum) -> bool {
    x.coords()[h.n - h.k..].iter().all(|v| v % h.ell == 0)
}

/// `1` on `M_0`, `1/u` off it.
pub fn weight_u(x: &LatVec, u: &Rat, h: &HeckeDatum) -> Result<Rat> {
    check_u(u)?;
    Ok(if in_m0(x, h) { Rat::one() } else { u.recip().unwrap() })
}

fn check_u(u: &Rat) -> Result<()> {
    if !u.is_positive() || *u > Rat::one() {
        return Err(Error::TemperamentOutOfRange(u.to_text()));
    }
    Ok(())
}

/// Weighted length `weight_u(x) * Z[x]`.
pub fn weighted_length(z: &Form, x: &LatVec, u: &Rat, h: &HeckeDatum) -> Rat {
    let v = eval_unchecked(z, x);
    if in_m0(x, h) {
        v
    } else {
        &v / u
    }
}

/// `Z = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`.
fn completed_squares(z: &Form) -> Result<Vec<Vec<Rat>>> {
    let n = z.n();
    let mut q = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            q[i][j] = z.get(i, j).clone();
        }
    }
    for i in 0..n {
        if !q[i][i].is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let d = &q[k][i] * &q[i][l];
                q[k][l] -= &d;
            }
        }
    }
    Ok(q)
}

/// Smallest integer `s >= 0` with `s^2 >= r`.
fn ceil_sqrt(r: &Rat) -> i64 {
    if !r.is_positive() {
        return 0;
    }
    let c: BigInt = r.ceil();
    let mut s = num_integer::Roots::sqrt(&c).to_i64().expect("enumeration radius fits in i64");
    while Rat::from_int(s * s) < *r {
        s += 1;
    }
    s
}

/// All sign-normalized nonzero `x` with `Z[x] <= bound`, sorted.
pub fn short_vectors(z: &Form, bound: &Rat) -> Result<Vec<LatVec>> {
    let q = completed_squares(z)?;
    let n = z.n();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    enumerate(&q, n - 1, &mut x, bound.clone(), &mut out);
    out.sort();
    Ok(out)
}

fn enumerate(q: &[Vec<Rat>], i: usize, x: &mut [i64], remaining: Rat, out: &mut Vec<LatVec>) {
    let n = x.len();
    let mut c = Rat::zero();
    for j in i + 1..n {
        if x[j] != 0 {
            c -= &(&q[i][j] * &Rat::from_int(x[j]));
        }
    }
    let r = &remaining / &q[i][i];
    let s = ceil_sqrt(&r);
    let lo = (&c - &Rat::from_int(s)).floor().to_i64().unwrap();
    let hi = (&c + &Rat::from_int(s)).ceil().to_i64().unwrap();
    for xi in lo..=hi {
        let d = &Rat::from_int(xi) - &c;
        let used = &q[i][i] * &(&d * &d);
        if used > remaining {
            continue;
        }
        x[i] = xi;
        if i == 0 {
            let v = LatVec::new(x);
            if !v.is_zero() && v.is_normalized() {
                out.push(v);
            }
        } else {
            enumerate(q, i - 1, x, &remaining - &used, out);
        }
    }
    x[i] = 0;
}

/// Result of [`minimal_vectors`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimal {
    pub m: Rat,
    /// Sign-normalized achievers, sorted.
    pub vectors: Vec<LatVec>,
    pub well_rounded: bool,
}

/// Weighted arithmetic minimum of `Z` at temperament `u` and its achievers.
///
/// At `u = u_0` an achiever `x` outside `M_0` is dropped whenever `l x` also
/// achieves the minimum (the two describe the same constraint).
pub fn minimal_vectors(z: &Form, u: &Rat, h: &HeckeDatum) -> Result<Minimal> {
    check_u(u)?;
    if z.n() != h.n {
        return Err(Error::DimensionMismatch { expected: h.n, found: z.n() });
    }
    if !z.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = z.n();
    let mut ub: Option<Rat> = None;
    for i in 0..n {
        let w = weighted_length(z, &LatVec::unit(n, i), u, h);
        if ub.as_ref().is_none_or(|b| w < *b) {
            ub = Some(w);
        }
    }
    // weights are >= 1, so every achiever has Z[x] <= ub
    let cands = short_vectors(z, &ub.unwrap())?;
    let mut m: Option<Rat> = None;
    let mut vectors = Vec::new();
    for x in cands {
        let w = weighted_length(z, &x, u, h);
        match &m {
            Some(best) if w > *best => {}
            Some(best) if w == *best => vectors.push(x),
            _ => {
                m = Some(w);
                vectors.clear();
                vectors.push(x);
            }
        }
    }
    if *u == h.u0() {
        let keep: Vec<LatVec> = vectors
            .iter()
            .copied()
            .filter(|x| in_m0(x, h) || !vectors.contains(&x.scale(h.ell).normalized()))
            .collect();
        vectors = keep;
    }
    let well_rounded = rank_of(&vectors) == n;
    Ok(Minimal { m: m.unwrap(), vectors, well_rounded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn membership_examples() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        assert!(in_m0(&v(&[1, 0]), &h));
        assert!(!in_m0(&v(&[0, 1]), &h));
        let h = HeckeDatum::new(3, 2, 1).unwrap();
        assert!(in_m0(&v(&[5, 3, 2]), &h));
        let h = HeckeDatum::new(3, 3, 2).unwrap();
        assert!(in_m0(&v(&[1, 3, 3]), &h));
        assert!(!in_m0(&v(&[1, 1, 3]), &h));
        assert!(HeckeDatum::new(3, 4, 1).is_err());
    }

    #[test]
    fn weight_examples() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        assert_eq!(weight_u(&v(&[1, 0]), &Rat::new(1, 4), &h).unwrap(), Rat::one());
        assert_eq!(weight_u(&v(&[0, 1]), &Rat::one(), &h).unwrap(), Rat::one());
        assert_eq!(weight_u(&v(&[0, 1]), &Rat::new(1, 4), &h).unwrap(), Rat::from_int(4));
        assert!(weight_u(&v(&[0, 1]), &Rat::from_int(2), &h).is_err());
        assert!(weight_u(&v(&[0, 1]), &Rat::zero(), &h).is_err());
    }

    #[test]
    fn short_vector_examples() {
        let i2 = Form::identity(2);
        assert_eq!(short_vectors(&i2, &Rat::one()).unwrap(), vec![v(&[0, 1]), v(&[1, 0])]);
        assert_eq!(short_vectors(&i2, &Rat::from_int(2)).unwrap(), vec![v(&[0, 1]), v(&[1, -1]), v(&[1, 0]), v(&[1, 1])]);
        let z = Form::diag(&[Rat::one(), Rat::new(1, 4)]);
        let got = short_vectors(&z, &Rat::one()).unwrap();
        // box oracle over |x_i| <= 4
        let mut want = Vec::new();
        for a in -4..=4 {
            for b in -4..=4 {
                let x = v(&[a, b]);
                if !x.is_zero() && x.is_normalized() && eval_unchecked(&z, &x) <= Rat::one() {
                    want.push(x);
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
        assert_eq!(got, vec![v(&[0, 1]), v(&[0, 2]), v(&[1, 0])]);
        assert_eq!(short_vectors(&Form::diag(&[Rat::one(), Rat::zero()]), &Rat::one()), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn minimal_vector_examples() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let r = minimal_vectors(&Form::identity(2), &Rat::one(), &h).unwrap();
        assert_eq!((r.m, r.vectors, r.well_rounded), (Rat::one(), vec![v(&[0, 1]), v(&[1, 0])], true));
        let z = Form::diag(&[Rat::one(), Rat::new(1, 4)]);
        let r = minimal_vectors(&z, &Rat::new(1, 4), &h).unwrap();
        assert_eq!((r.m, r.vectors, r.well_rounded), (Rat::one(), vec![v(&[0, 2]), v(&[1, 0])], true));
        let z = Form::diag(&[Rat::one(), Rat::from_int(5)]);
        let r = minimal_vectors(&z, &Rat::one(), &h).unwrap();
        assert_eq!((r.m, r.vectors, r.well_rounded), (Rat::one(), vec![v(&[1, 0])], false));
    }
}
