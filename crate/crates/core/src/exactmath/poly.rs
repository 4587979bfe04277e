//! Dense univariate polynomials over a [`Field`], plus exact real-root
//! isolation for rational polynomials.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::field::Field;
use super::rat::Rat;
use crate::{Error, Result};

/// `c[0] + c[1] X + ... + c[d] X^d`, trailing zeros stripped.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<F: Field> {
    c: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Poly<F> {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly<F> {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly<F> {
        Poly::constant(F::one())
    }

    pub fn constant(a: F) -> Poly<F> {
        Poly::new(vec![a])
    }

    /// `X`.
    pub fn x() -> Poly<F> {
        Poly::new(vec![F::zero(), F::one()])
    }

    /// `X - a`.
    pub fn linear_root(a: &F) -> Poly<F> {
        Poly::new(vec![a.negate(), F::one()])
    }

    pub fn from_ints(c: &[i64]) -> Poly<F> {
        Poly::new(c.iter().map(|&v| F::from_int(v)).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> F {
        self.c.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.c.last()
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for a in self.c.iter().rev() {
            acc = acc.times(x).plus(a);
        }
        acc
    }

    pub fn add(&self, o: &Poly<F>) -> Poly<F> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly<F>) -> Poly<F> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect())
    }

    pub fn mul(&self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &F) -> Poly<F> {
        Poly::new(self.c.iter().map(|a| a.times(s)).collect())
    }

    pub fn pow(&self, e: u32) -> Poly<F> {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, d: &Poly<F>) -> (Poly<F>, Poly<F>) {
        let dd = d.degree().expect("polynomial division by zero");
        let inv = d.c[dd].inverse().expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = r[k + dd].times(&inv);
            if coef.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] = r[k + j].minus(&coef.times(b));
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly<F>) -> Option<Poly<F>> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Poly<F> {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inverse().expect("nonzero")),
        }
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, o: &Poly<F>) -> Poly<F> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly<F> {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.times(&F::from_int(i as i64)))
                .collect(),
        )
    }

    /// `f / gcd(f, f')`, monic.
    pub fn squarefree_part(&self) -> Result<Poly<F>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        Ok(self.div_exact(&g).expect("gcd divides").monic())
    }

    /// `f(X + a)`.
    pub fn shift(&self, a: &F) -> Poly<F> {
        let lin = Poly::new(vec![a.clone(), F::one()]);
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Coefficients reversed: `X^d f(1/X)` for `d = deg f`.
    pub fn reversed(&self) -> Poly<F> {
        let mut c = self.c.clone();
        c.reverse();
        Poly::new(c)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.c.iter().map(f).collect())
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})X")?,
                _ => write!(f, "({a})X^{i}")?,
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Closed rational interval `[lo, hi]` (possibly a single point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Poly<Rat> {
    fn sign_at(&self, x: &Rat) -> i32 {
        self.eval(x).signum()
    }

    /// Sturm chain `f, f', -rem(f, f'), ...`.
    pub fn sturm_chain(&self) -> Vec<Poly<Rat>> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            // only signs matter; normalize size to keep coefficients small
            let l = r.leading().unwrap().abs();
            chain.push(r.scale(&-l.recip().unwrap()));
        }
        chain
    }

    fn sign_changes(chain: &[Poly<Rat>], x: &Rat) -> usize {
        count_changes(chain.iter().map(|p| p.sign_at(x)))
    }

    fn sign_changes_at_infinity(chain: &[Poly<Rat>], positive: bool) -> usize {
        count_changes(chain.iter().map(|p| {
            let s = p.leading().map_or(0, |l| l.signum());
            let d = p.degree().unwrap_or(0);
            if positive || d % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots_in(&self, chain: &[Poly<Rat>], a: &Rat, b: &Rat) -> usize {
        Self::sign_changes(chain, a) - Self::sign_changes(chain, b)
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = self.sturm_chain();
        Self::sign_changes_at_infinity(&chain, false) - Self::sign_changes_at_infinity(&chain, true)
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> Rat {
        let lead = self.leading().expect("nonzero").abs();
        let mut m = Rat::zero();
        for a in &self.c[..self.c.len() - 1] {
            let v = &a.abs() / &lead;
            if v > m {
                m = v;
            }
        }
        &m + &Rat::one()
    }

    /// Disjoint rational intervals, each holding exactly one real root, in
    /// increasing order. Exact roots found along the way come back as
    /// degenerate intervals.
    pub fn isolate_real_roots(&self) -> Vec<RootInterval> {
        let Some(d) = self.degree() else { return Vec::new() };
        if d == 0 {
            return Vec::new();
        }
        let f = self.squarefree_part().expect("nonzero");
        let chain = f.sturm_chain();
        let b = f.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-&b, b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = f.count_roots_in(&chain, &lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                let (mut lo, mut hi) = (lo, hi);
                // keep closed intervals disjoint: an endpoint may be a neighbouring root
                loop {
                    if f.sign_at(&hi) == 0 {
                        lo = hi.clone();
                        break;
                    }
                    if f.sign_at(&lo) != 0 {
                        break;
                    }
                    let mid = Rat::midpoint(&lo, &hi);
                    if f.count_roots_in(&chain, &mid, &hi) == 1 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(RootInterval { lo, hi });
                continue;
            }
            let mid = Rat::midpoint(&lo, &hi);
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }

    /// Shrink an isolating interval of the squarefree `self` until its width
    /// is at most `width`.
    pub fn refine(&self, iv: &RootInterval, width: &Rat) -> RootInterval {
        let mut iv = iv.clone();
        if iv.lo == iv.hi {
            return iv;
        }
        let chain = self.sturm_chain();
        while &(&iv.hi - &iv.lo) > width {
            let mid = Rat::midpoint(&iv.lo, &iv.hi);
            if self.sign_at(&mid) == 0 {
                return RootInterval { lo: mid.clone(), hi: mid };
            }
            if self.count_roots_in(&chain, &iv.lo, &mid) == 1 {
                iv.hi = mid;
            } else {
                iv.lo = mid;
            }
        }
        iv
    }

    /// Multiply through by the lcm of the denominators and divide out the
    /// content, giving a primitive integer polynomial with positive leading
    /// coefficient.
    pub fn primitive_part(&self) -> Poly<Rat> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        if self.is_zero() {
            return Poly::zero();
        }
        let mut l = BigInt::one();
        for a in &self.c {
            l = l.lcm(&a.denom());
        }
        let ints: Vec<BigInt> = self.c.iter().map(|a| a.numer() * (&l / a.denom())).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        Poly::new(ints.into_iter().map(|v| Rat::from_bigint(v / &g)).collect())
    }
}

fn count_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rat {
        Rat::new(a, b)
    }

    #[test]
    fn division_and_gcd() {
        let f = Poly::<Rat>::from_ints(&[-1, 0, 1]);
        let g = Poly::<Rat>::from_ints(&[-1, 1]);
        let (qq, r) = f.div_rem(&g);
        assert_eq!(qq, Poly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&g.mul(&g)), g);
    }

    #[test]
    fn squarefree_examples() {
        let xm1 = Poly::<Rat>::from_ints(&[-1, 1]);
        assert_eq!(xm1.pow(2).squarefree_part().unwrap(), xm1);
        let f = Poly::<Rat>::from_ints(&[-1, 0, 1]);
        assert_eq!(f.squarefree_part().unwrap(), f);
        let a = Poly::linear_root(&q(1, 2));
        let b = Poly::linear_root(&q(-2, 1));
        assert_eq!(a.pow(3).mul(&b).squarefree_part().unwrap(), a.mul(&b));
        assert_eq!(Poly::<Rat>::zero().squarefree_part(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn isolate_examples() {
        let f = Poly::<Rat>::from_ints(&[-2, 0, 1]);
        let iv = f.isolate_real_roots();
        assert_eq!(iv.len(), 2);
        assert!(iv[0].hi <= Rat::zero() && iv[1].lo >= Rat::zero());
        let r = f.refine(&iv[1], &q(1, 1000));
        assert!(r.lo.pow(2) < q(2, 1) && r.hi.pow(2) > q(2, 1));
        assert!(Poly::<Rat>::from_ints(&[1, 0, 1]).isolate_real_roots().is_empty());
        let g = Poly::x().mul(&Poly::linear_root(&q(1, 4))).mul(&Poly::linear_root(&q(1, 3)));
        let iv = g.isolate_real_roots();
        assert_eq!(iv.len(), 3);
        for (w, want) in iv.iter().zip([q(0, 1), q(1, 4), q(1, 3)]) {
            assert!(w.lo <= want && want <= w.hi);
        }
    }
}
