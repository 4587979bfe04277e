//! Factorization of small-degree polynomials over `Q` and over the quadratic
//! cyclotomic fields.
//!
//! Over `Q`: squarefree decomposition, integer roots of the monic integral
//! transform, then Kronecker's method for the (rare) higher-degree factors.
//! Over `Q(zeta)`: Trager's norm method on top of the rational factorization.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{CycloElem, Field};
use super::poly::Poly;
use super::rat::Rat;
use crate::{Error, Result};

/// `unit * prod(factor^mult)` with monic factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization<F: Field> {
    pub unit: F,
    pub factors: Vec<(Poly<F>, u32)>,
}

impl<F: Field> Factorization<F> {
    pub fn expand(&self) -> Poly<F> {
        let mut acc = Poly::constant(self.unit.clone());
        for (p, e) in &self.factors {
            acc = acc.mul(&p.pow(*e));
        }
        acc
    }
}

/// Yun's squarefree decomposition of a monic polynomial.
pub fn squarefree_decomposition<F: Field>(f: &Poly<F>) -> Vec<(Poly<F>, u32)> {
    let f = f.monic();
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_exact(&a0).unwrap();
    let mut c = df.div_exact(&a0).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).unwrap();
        c = d.div_exact(&a).unwrap();
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Factor over `Q` into monic irreducibles.
pub fn factor_rat(f: &Poly<Rat>) -> Result<Factorization<Rat>> {
    let unit = f.leading().cloned().ok_or(Error::ZeroPolynomial)?;
    let mut factors = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for p in factor_squarefree_rat(&g)? {
            factors.push((p, e));
        }
    }
    sort_factors(&mut factors);
    Ok(Factorization { unit, factors })
}

/// Factor over `Q(zeta_m)` into monic irreducibles.
pub fn factor_cyclo(f: &Poly<CycloElem>, m: u8) -> Result<Factorization<CycloElem>> {
    let unit = f.leading().cloned().ok_or(Error::ZeroPolynomial)?;
    let mut factors = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for p in factor_squarefree_cyclo(&g, m)? {
            factors.push((p, e));
        }
    }
    factors.sort_by_key(|(p, e)| (p.degree(), *e));
    Ok(Factorization { unit, factors })
}

/// Fields whose polynomials [`factor_rat`] / [`factor_cyclo`] can split.
pub trait FactorField: Field {
    /// Factor over the field, `m` being the conductor of the coefficients.
    fn factor(f: &Poly<Self>, m: u8) -> Result<Factorization<Self>>;
}

impl FactorField for Rat {
    fn factor(f: &Poly<Rat>, _m: u8) -> Result<Factorization<Rat>> {
        factor_rat(f)
    }
}

impl FactorField for CycloElem {
    fn factor(f: &Poly<CycloElem>, m: u8) -> Result<Factorization<CycloElem>> {
        if m <= 2 {
            let q = f.map(|c| c.as_rat().expect("rational coefficients"));
            let fr = factor_rat(&q)?;
            return Ok(Factorization {
                unit: CycloElem::rational(fr.unit),
                factors: fr.factors.into_iter().map(|(p, e)| (p.map(|c| CycloElem::rational(c.clone())), e)).collect(),
            });
        }
        factor_cyclo(f, m)
    }
}

fn sort_factors(v: &mut [(Poly<Rat>, u32)]) {
    v.sort_by(|(p, e), (q, f)| {
        p.degree()
            .cmp(&q.degree())
            .then_with(|| p.coeffs().iter().rev().cmp(q.coeffs().iter().rev()))
            .then(e.cmp(f))
    });
}

fn to_big_ints(p: &Poly<Rat>) -> Vec<BigInt> {
    p.coeffs().iter().map(|c| c.numer()).collect()
}

fn eval_big(c: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for a in c.iter().rev() {
        acc = acc * x + a;
    }
    acc
}

/// Roots of a squarefree rational polynomial lying in `Q`.
pub fn rational_roots(f: &Poly<Rat>) -> Vec<Rat> {
    let Ok(sf) = f.squarefree_part() else { return Vec::new() };
    let (g, a) = monic_integral(&sf);
    integer_roots(&g).into_iter().map(|r| &Rat::from_bigint(r) / &Rat::from_bigint(a.clone())).collect()
}

/// For a nonzero `f`, the monic integral `G(Y) = a^(d-1) f*(Y / a)` where `f*`
/// is the primitive part of `f` and `a` its leading coefficient.
fn monic_integral(f: &Poly<Rat>) -> (Vec<BigInt>, BigInt) {
    let p = to_big_ints(&f.primitive_part());
    let d = p.len() - 1;
    let a = p[d].clone();
    let mut g = Vec::with_capacity(d + 1);
    let mut apow = BigInt::one();
    for i in (0..=d).rev() {
        // coefficient of Y^i is p_i * a^(d-1-i); leading stays 1
        if i == d {
            g.push(BigInt::one());
        } else {
            g.push(&p[i] * &apow);
            apow *= &a;
        }
    }
    g.reverse();
    (g, a)
}

/// Fujiwara bound on the absolute values of the roots of a monic integral
/// polynomial, rounded up to an integer.
fn root_bound(g: &[BigInt]) -> BigInt {
    let d = g.len() - 1;
    let mut m = BigInt::zero();
    for k in 1..=d {
        let c = g[d - k].abs();
        if c.is_zero() {
            continue;
        }
        let r = c.nth_root(k as u32) + 1u32;
        if r > m {
            m = r;
        }
    }
    m * 2u32 + 1u32
}

fn integer_roots(g: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::new();
    if g.len() < 2 {
        return out;
    }
    if g[0].is_zero() {
        out.push(BigInt::zero());
    }
    let c0 = g.iter().find(|c| !c.is_zero()).unwrap().abs();
    let bound = root_bound(g).min(c0.clone());
    let mut r = BigInt::one();
    while r <= bound {
        if c0.is_multiple_of(&r) {
            for s in [r.clone(), -r.clone()] {
                if eval_big(g, &s).is_zero() {
                    out.push(s);
                }
            }
        }
        r += 1u32;
    }
    out.sort();
    out
}

fn factor_squarefree_rat(f: &Poly<Rat>) -> Result<Vec<Poly<Rat>>> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d <= 1 {
        return Ok(if d == 1 { vec![f.monic()] } else { Vec::new() });
    }
    let (mut g, a) = monic_integral(f);
    let mut found: Vec<Vec<BigInt>> = Vec::new();
    for r in integer_roots(&g) {
        found.push(vec![-r.clone(), BigInt::one()]);
        g = div_big(&g, &[-r, BigInt::one()]).expect("root divides");
    }
    let mut pending = vec![g];
    while let Some(h) = pending.pop() {
        let deg = h.len() - 1;
        if deg == 0 {
            continue;
        }
        if deg <= 3 {
            found.push(h);
            continue;
        }
        match kronecker_split(&h)? {
            Some(p) => {
                let q = div_big(&h, &p).expect("kronecker factor divides");
                pending.push(p);
                pending.push(q);
            }
            None => found.push(h),
        }
    }
    // back-substitute Y = aX
    let ar = Rat::from_bigint(a);
    Ok(found
        .into_iter()
        .map(|p| {
            let mut s = Rat::one();
            let c: Vec<Rat> = p
                .iter()
                .map(|v| {
                    let t = &Rat::from_bigint(v.clone()) * &s;
                    s = &s * &ar;
                    t
                })
                .collect();
            Poly::new(c).monic()
        })
        .collect())
}

/// Exact division of integer polynomials (monic divisor).
fn div_big(h: &[BigInt], p: &[BigInt]) -> Option<Vec<BigInt>> {
    let dp = p.len() - 1;
    let lead = &p[dp];
    let mut r = h.to_vec();
    if r.len() < p.len() {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - dp];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + dp].div_rem(lead);
        if !rem.is_zero() {
            return None;
        }
        for (j, b) in p.iter().enumerate() {
            r[k + j] -= &c * b;
        }
        q[k] = c;
    }
    r.iter().all(|v| v.is_zero()).then_some(q)
}

/// Find a nontrivial monic factor of a monic integral polynomial without
/// integer roots, or prove there is none.
fn kronecker_split(h: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let d = h.len() - 1;
    // candidate evaluation points ordered by |h(x)|
    let mut pts: Vec<(BigInt, i64, BigInt)> = (-6i64..=6)
        .map(|x| {
            let v = eval_big(h, &BigInt::from(x));
            (v.abs(), x, v)
        })
        .collect();
    pts.sort();
    for k in 2..=d / 2 {
        let chosen = &pts[..k];
        let mut divisor_sets = Vec::with_capacity(k);
        for (abs, _, _) in chosen {
            let n = abs.to_u64().ok_or(Error::Overflow)?;
            divisor_sets.push(signed_divisors(n));
        }
        let xs: Vec<i64> = chosen.iter().map(|c| c.1).collect();
        let mut idx = vec![0usize; k];
        loop {
            let vals: Vec<i64> = (0..k).map(|j| divisor_sets[j][idx[j]]).collect();
            if let Some(p) = monic_interpolant(&xs, &vals) {
                if let Some(_q) = div_big(h, &p) {
                    return Ok(Some(p));
                }
            }
            // odometer
            let mut j = 0;
            loop {
                if j == k {
                    break;
                }
                idx[j] += 1;
                if idx[j] < divisor_sets[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
    }
    Ok(None)
}

/// The monic degree-`k` integer polynomial taking `vals` at `xs`, if integral.
fn monic_interpolant(xs: &[i64], vals: &[i64]) -> Option<Vec<BigInt>> {
    let k = xs.len();
    let mut base = Poly::<Rat>::one();
    for &x in xs {
        base = base.mul(&Poly::linear_root(&Rat::from_int(x)));
    }
    let mut lag = Poly::<Rat>::zero();
    for i in 0..k {
        let mut li = Poly::<Rat>::one();
        let mut den = Rat::one();
        for j in 0..k {
            if i != j {
                li = li.mul(&Poly::linear_root(&Rat::from_int(xs[j])));
                den = &den * &Rat::from_int(xs[i] - xs[j]);
            }
        }
        lag = lag.add(&li.scale(&(&Rat::from_int(vals[i]) / &den)));
    }
    let p = base.add(&lag);
    let mut out = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let c = p.coeff(i);
        if !c.is_integer() {
            return None;
        }
        out.push(c.numer());
    }
    Some(out)
}

fn signed_divisors(n: u64) -> Vec<i64> {
    let mut primes = factor_u64(n);
    primes.sort_unstable();
    let mut divs = vec![1u64];
    let mut i = 0;
    while i < primes.len() {
        let p = primes[i];
        let mut e = 0;
        while i < primes.len() && primes[i] == p {
            e += 1;
            i += 1;
        }
        let cur = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(cur.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs.iter().flat_map(|&d| [d as i64, -(d as i64)]).collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Prime factors with multiplicity.
pub fn factor_u64(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        let mut m = m;
        for p in [2u64, 3, 5, 7, 11, 13] {
            while m % p == 0 {
                out.push(p);
                m /= p;
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            out.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

/// Trager's algorithm for a squarefree polynomial over `Q(zeta_m)`.
fn factor_squarefree_cyclo(g: &Poly<CycloElem>, m: u8) -> Result<Vec<Poly<CycloElem>>> {
    let d = g.degree().ok_or(Error::ZeroPolynomial)?;
    if d <= 1 || matches!(m, 1 | 2) {
        if d <= 1 {
            return Ok(if d == 1 { vec![g.monic()] } else { Vec::new() });
        }
        let gq = to_rat_poly(g).ok_or_else(|| Error::Invariant("coefficients not rational".into()))?;
        return Ok(factor_squarefree_rat(&gq)?.iter().map(from_rat_poly).collect());
    }
    let zeta = CycloElem::root_of_unity(m, 1);
    for s in 0i64..16 {
        let shift = zeta.times(&CycloElem::from_int(-s));
        let gs = g.shift(&shift);
        let conj = gs.map(|c| c.conj());
        let norm = to_rat_poly(&gs.mul(&conj)).expect("norm is rational");
        if norm.gcd(&norm.derivative()).degree() != Some(0) {
            continue;
        }
        let mut out = Vec::new();
        for h in factor_squarefree_rat(&norm)? {
            let f = gs.gcd(&from_rat_poly(&h));
            if f.degree().unwrap_or(0) > 0 {
                out.push(f.shift(&shift.negate()).monic());
            }
        }
        return Ok(out);
    }
    Err(Error::IterationCap("Trager shift search".into()))
}

pub(crate) fn to_rat_poly(p: &Poly<CycloElem>) -> Option<Poly<Rat>> {
    let c: Option<Vec<Rat>> = p.coeffs().iter().map(|c| c.as_rat()).collect();
    c.map(Poly::new)
}

pub(crate) fn from_rat_poly(p: &Poly<Rat>) -> Poly<CycloElem> {
    p.map(|c| CycloElem::rational(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hecke_cubic_splits() {
        let f = Poly::<Rat>::from_ints(&[1, -7, 14, -8]);
        let fac = factor_rat(&f).unwrap();
        assert_eq!(fac.factors.len(), 3);
        assert_eq!(fac.expand(), f);
        let roots: Vec<Rat> = fac.factors.iter().map(|(p, _)| -p.coeff(0)).collect();
        assert!(roots.contains(&Rat::one()) && roots.contains(&Rat::new(1, 2)) && roots.contains(&Rat::new(1, 4)));
    }

    #[test]
    fn irreducible_quadratic_and_trivial_split() {
        let f = Poly::<Rat>::from_ints(&[1, 3, 4]);
        assert_eq!(factor_rat(&f).unwrap().factors.len(), 1);
        let g = Poly::<Rat>::from_ints(&[0, -1, 1]);
        let fac = factor_rat(&g).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(), g);
    }

    #[test]
    fn quartic_product_of_quadratics() {
        // (X^2 + 1)(X^2 - 3X + 5)
        let f = Poly::<Rat>::from_ints(&[1, 0, 1]).mul(&Poly::from_ints(&[5, -3, 1]));
        let fac = factor_rat(&f).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn repeated_factors() {
        let a = Poly::<Rat>::from_ints(&[-1, 1]);
        let b = Poly::<Rat>::from_ints(&[2, 0, 1]);
        let f = a.pow(3).mul(&b.pow(2)).scale(&Rat::new(-3, 2));
        let fac = factor_rat(&f).unwrap();
        assert_eq!(fac.expand(), f);
        assert!(fac.factors.contains(&(a, 3)) && fac.factors.contains(&(b, 2)));
    }

    #[test]
    fn splits_over_gaussian_field() {
        let f = from_rat_poly(&Poly::from_ints(&[1, 0, 1]));
        let fac = factor_cyclo(&f, 4).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(), f);
        // X^2 + X + 1 splits in Q(zeta_3) and Q(zeta_6), not in Q(i)
        let g = from_rat_poly(&Poly::from_ints(&[1, 1, 1]));
        assert_eq!(factor_cyclo(&g, 3).unwrap().factors.len(), 2);
        assert_eq!(factor_cyclo(&g, 6).unwrap().factors.len(), 2);
        assert_eq!(factor_cyclo(&g, 4).unwrap().factors.len(), 1);
    }

    #[test]
    fn integer_factoring() {
        assert_eq!(factor_u64(360), vec![2, 2, 2, 3, 3, 5]);
        assert_eq!(factor_u64(1_000_000_007 * 998_244_353), vec![998_244_353, 1_000_000_007]);
    }
}
