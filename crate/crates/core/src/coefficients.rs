//! Nebentype characters and the coinduced modules that carry them.
//!
//! `Gamma' = Gamma_0(N) ∩ SL_n(Z)` sits in `GL_n(Z)`; a right coset
//! `Gamma' g` is determined by the bottom row of `g` mod `N` up to units and
//! by `det g`. Functions `f` on `Gamma' \ GL_n(Z)` with
//! `f(gamma g) = eta(gamma_nn) f(g)` form `Coind eta`, on which `h` acts by
//! `(h f)(g) = f(g h)`. The same formula makes sense for `a` and `a^{-1}`
//! because `det a` is a unit mod `N`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactmath::{CycloElem, Field, Mat};
use crate::lattice::{HeckeDatum, IntMat};
use crate::{Error, Result};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn units(n: u64) -> Vec<u64> {
    (1..n.max(2)).filter(|&d| gcd(d as i64, n as i64) == 1).collect()
}

fn euler_phi(n: u64) -> u64 {
    if n == 1 {
        1
    } else {
        units(n).len() as u64
    }
}

fn primitive_root(n: u64) -> Option<u64> {
    if n <= 2 {
        return Some(1);
    }
    let phi = euler_phi(n);
    units(n).into_iter().find(|&g| {
        let mut x = 1u64;
        (1..=phi).find(|_| {
            x = x * g % n;
            x == 1
        }) == Some(phi)
    })
}

/// A Dirichlet character mod `N`, valued in `Q(zeta_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nebentype {
    pub level: u64,
    /// Order of the unit group `phi(N)`; values are powers of `zeta_{phi(N)}`.
    pub group_order: u64,
    /// `eta = chi_N^power`.
    pub power: u64,
    /// `values[d]` for `d` mod `N`, `None` off the units.
    values: Vec<Option<CycloElem>>,
}

/// `chi_N`, sending the least primitive root mod `N` to `zeta_{phi(N)}`.
pub fn dirichlet_generator(level: u64) -> Result<Nebentype> {
    if level == 0 || level > 12 {
        return Err(Error::Invariant(format!("level {level} outside 1..=12")));
    }
    let g = primitive_root(level).ok_or(Error::NonCyclicUnits(level))?;
    let phi = euler_phi(level);
    if ![1, 2, 4, 6].contains(&phi) {
        return Err(Error::Invariant(format!("Q(zeta_{phi}) is not a supported coefficient field")));
    }
    let mut values = vec![None; level.max(1) as usize];
    let mut x = 1 % level.max(1);
    for k in 0..phi {
        values[x as usize] = Some(CycloElem::root_of_unity(phi as u8, k as i64));
        x = x * g % level.max(1);
    }
    if level == 1 {
        values[0] = Some(CycloElem::one());
    }
    Ok(Nebentype { level, group_order: phi, power: 1, values })
}

impl Nebentype {
    /// The trivial character, at any level.
    pub fn trivial(level: u64) -> Result<Nebentype> {
        if level == 0 {
            return Err(Error::Invariant(String::from("level 0")));
        }
        let values = (0..level as i64).map(|d| (gcd(d, level as i64) == 1).then(CycloElem::one)).collect();
        Ok(Nebentype { level, group_order: euler_phi(level), power: 0, values })
    }

    /// The unique character with image `{±1}`.
    pub fn quadratic(level: u64) -> Result<Nebentype> {
        let chi = dirichlet_generator(level)?;
        if chi.group_order % 2 != 0 {
            return Err(Error::Invariant(format!("no quadratic character mod {level}")));
        }
        Ok(chi.pow(chi.group_order / 2))
    }

    /// `"triv"`, `"quad"` or `"chi^j"`.
    pub fn parse(level: u64, s: &str) -> Result<Nebentype> {
        match s {
            "triv" | "1" => Nebentype::trivial(level),
            "quad" | "±1" | "+-1" => Nebentype::quadratic(level),
            _ => {
                let j = s
                    .strip_prefix("chi^")
                    .or_else(|| s.strip_prefix("chi").map(|r| if r.is_empty() { "1" } else { r }))
                    .and_then(|j| j.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("nebentype {s}")))?;
                Ok(dirichlet_generator(level)?.pow(j))
            }
        }
    }

    /// All characters mod `N`, as powers `chi_N^j`, `j = 0..phi(N)`.
    pub fn all(level: u64) -> Result<Vec<Nebentype>> {
        let chi = dirichlet_generator(level)?;
        Ok((0..chi.group_order).map(|j| chi.pow(j)).collect())
    }

    pub fn pow(&self, j: u64) -> Nebentype {
        let values = self
            .values
            .iter()
            .map(|v| {
                v.as_ref().map(|x| {
                    let mut acc = CycloElem::one();
                    for _ in 0..j {
                        acc = acc.times(x);
                    }
                    acc
                })
            })
            .collect();
        let power = if self.group_order == 0 { 0 } else { self.power * j % self.group_order };
        Nebentype { level: self.level, group_order: self.group_order, power, values }
    }

    /// Order of the character.
    pub fn order(&self) -> u64 {
        self.group_order / gcd(self.power as i64, self.group_order as i64).max(1) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_quadratic(&self) -> bool {
        self.order() == 2
    }

    /// Conductor of the smallest cyclotomic field holding the values.
    pub fn field(&self) -> u8 {
        match self.order() {
            1 | 2 => 1,
            o => o as u8,
        }
    }

    /// `eta(d)`, or `None` when `d` is not a unit mod `N`.
    pub fn value(&self, d: i64) -> Option<CycloElem> {
        self.values[d.rem_euclid(self.level as i64) as usize].clone()
    }

    /// Label as it appears in reports: `1`, `±1`, or `chi_N^j`.
    pub fn label(&self) -> String {
        if self.is_trivial() {
            String::from("1")
        } else if self.is_quadratic() {
            String::from("±1")
        } else if self.power == 1 {
            format!("chi_{}", self.level)
        } else {
            format!("chi_{}^{}", self.level, self.power)
        }
    }

    /// Representatives of the characters up to Galois conjugacy (powers with
    /// the same order), smallest power first.
    pub fn up_to_galois(level: u64) -> Result<Vec<Nebentype>> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for eta in Nebentype::all(level)? {
            if !seen.contains(&eta.order()) {
                seen.push(eta.order());
                out.push(eta);
            }
        }
        Ok(out)
    }
}

/// A coset `Gamma' g`: canonical bottom row mod `N` and `det g`.
pub type CosetClass = (Vec<i64>, i8);

/// `u v` for the unit `u` making `v` lexicographically least; returns the
/// canonical vector and `d` with `v = d * canonical`.
fn canonical_row(v: &[i64], level: i64) -> (Vec<i64>, i64) {
    let mut best: Option<(Vec<i64>, i64)> = None;
    for u in units(level as u64) {
        let w: Vec<i64> = v.iter().map(|x| (x * u as i64).rem_euclid(level)).collect();
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, u as i64));
        }
    }
    let (w, u) = best.expect("a unit exists");
    let d = (1..level.max(2)).find(|d| (d * u).rem_euclid(level) == 1 % level).unwrap_or(1);
    (w, d)
}

fn is_primitive(v: &[i64], level: i64) -> bool {
    v.iter().fold(level, |g, &x| gcd(g, x)) == 1
}

/// `P^{n-1}(Z/N) × {±1}` in canonical order.
pub fn coset_space(level: u64, n: usize) -> Vec<CosetClass> {
    let nl = level as i64;
    let mut rows = Vec::new();
    let total = (level as usize).pow(n as u32);
    for idx in 0..total {
        let mut v = vec![0i64; n];
        let mut t = idx;
        for c in v.iter_mut().rev() {
            *c = (t % level as usize) as i64;
            t /= level as usize;
        }
        if is_primitive(&v, nl) && canonical_row(&v, nl).0 == v {
            rows.push(v);
        }
    }
    let mut out = Vec::with_capacity(2 * rows.len());
    for s in [1i8, -1] {
        out.extend(rows.iter().map(|r| (r.clone(), s)));
    }
    out
}

/// Unimodular `U` with `w U = e_n`, for primitive `w`.
fn clear_row(w: &[i64]) -> IntMat {
    let n = w.len();
    let mut w = w.to_vec();
    let mut u = IntMat::identity(n);
    // column operations: Euclid down to a single nonzero entry
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| w[i] != 0).collect();
        if nz.len() == 1 {
            break;
        }
        let p = *nz.iter().min_by_key(|&&i| w[i].abs()).unwrap();
        for &j in &nz {
            if j != p {
                let q = w[j].div_euclid(w[p]);
                w[j] -= q * w[p];
                for r in 0..n {
                    let v = u.get(r, j) - q * u.get(r, p);
                    u.set(r, j, v);
                }
            }
        }
    }
    let p = (0..n).find(|&i| w[i] != 0).unwrap();
    if w[p] < 0 {
        for r in 0..n {
            u.set(r, p, -u.get(r, p));
        }
    }
    if p != n - 1 {
        for r in 0..n {
            let (a, b) = (u.get(r, p), u.get(r, n - 1));
            u.set(r, p, b);
            u.set(r, n - 1, a);
        }
    }
    u
}

/// A matrix of `GL_n(Z)` in the coset: bottom row `≡ v` mod `N`, determinant `s`.
pub fn section(class: &CosetClass, level: u64) -> IntMat {
    let (v, s) = class;
    let n = v.len();
    let nl = level as i64;
    let mut w = v.clone();
    // a primitive integer lift
    'search: for t in 0..(nl * nl + 2) {
        for i in 0..n {
            let mut c = v.clone();
            c[i] += nl * t;
            if c.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
                w = c;
                break 'search;
            }
        }
    }
    let g = clear_row(&w).inverse_int().expect("unimodular");
    let mut g = g;
    if (g.det() > 0) != (*s > 0) {
        for j in 0..n {
            g.set(0, j, -g.get(0, j));
        }
    }
    g
}

/// `e_j -> scale[j] e_{target[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub target: Vec<usize>,
    pub scale: Vec<CycloElem>,
}

impl Monomial {
    pub fn identity(d: usize) -> Monomial {
        Monomial { target: (0..d).collect(), scale: vec![CycloElem::one(); d] }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Monomial) -> Monomial {
        let target = other.target.iter().map(|&t| self.target[t]).collect();
        let scale = other.scale.iter().zip(&other.target).map(|(s, &t)| s.times(&self.scale[t])).collect();
        Monomial { target, scale }
    }

    pub fn to_mat<F: Field>(&self) -> Mat<F> {
        let d = self.target.len();
        let mut m = Mat::zeros(d, d);
        for (j, (&t, s)) in self.target.iter().zip(&self.scale).enumerate() {
            m.set(t, j, F::from_cyclo(s).expect("scalar outside the coefficient field"));
        }
        m
    }

    /// `M x` for a dense vector.
    pub fn apply<F: Field>(&self, x: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); x.len()];
        for (j, xj) in x.iter().enumerate() {
            if !xj.is_zero() {
                let s = F::from_cyclo(&self.scale[j]).expect("scalar outside the coefficient field");
                out[self.target[j]] = xj.times(&s);
            }
        }
        out
    }
}

/// `Coind_{Gamma'}^{GL_n(Z)} eta`, extended to the monoid generated by
/// `GL_n(Z)`, `a` and `a^{-1}`.
#[derive(Clone, Debug)]
pub struct CoinducedModule {
    pub eta: Nebentype,
    pub n: usize,
    pub basis: Vec<CosetClass>,
    index: BTreeMap<CosetClass, usize>,
}

/// The coinduced module for `eta`; `h` only fixes `n` and checks `l ∤ N`.
pub fn coinduced(eta: &Nebentype, h: &HeckeDatum) -> Result<CoinducedModule> {
    if gcd(h.ell, eta.level as i64) != 1 {
        return Err(Error::LevelDividesPrime { level: eta.level, prime: h.ell as u64 });
    }
    Ok(CoinducedModule::new(eta, h.n))
}

impl CoinducedModule {
    pub fn new(eta: &Nebentype, n: usize) -> CoinducedModule {
        let basis = coset_space(eta.level, n);
        let index = basis.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        CoinducedModule { eta: eta.clone(), n, basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> u8 {
        self.eta.field()
    }

    /// `(v h, s sign)` renormalized: the class index and `d` with
    /// `v h = d * canonical`.
    pub fn act_on_class(&self, class: &CosetClass, h: &[i64], sign: i8) -> (usize, i64) {
        let nl = self.eta.level as i64;
        let (v, s) = class;
        let n = self.n;
        let vh: Vec<i64> = (0..n).map(|j| (0..n).map(|i| v[i] * h[i * n + j]).sum::<i64>().rem_euclid(nl)).collect();
        let (c, d) = canonical_row(&vh, nl);
        (self.index[&(c, s * sign)], d)
    }

    /// The action of a matrix given mod `N` with the sign of its determinant.
    pub fn action_mod(&self, h: &[i64], sign: i8) -> Monomial {
        let d = self.dim();
        let mut target = vec![0; d];
        let mut scale = vec![CycloElem::one(); d];
        for (i, class) in self.basis.iter().enumerate() {
            let (j, u) = self.act_on_class(class, h, sign);
            // rho(h) delta_j = eta(u)^{-1} delta_i: Gamma_0(N) acts on the
            // line through eta(a_nn) from the right, i.e. by eta^{-1} from the left
            target[j] = i;
            scale[j] = self.eta.value(u).expect("renormalizing scalar is a unit").conj();
        }
        Monomial { target, scale }
    }

    /// `rho(h)` for an integer matrix with `det h` a unit mod `N`.
    pub fn action(&self, h: &IntMat) -> Monomial {
        let n = self.n;
        let flat: Vec<i64> = (0..n * n).map(|k| h.get(k / n, k % n)).collect();
        self.action_mod(&flat, if h.det() < 0 { -1 } else { 1 })
    }

    /// `rho(a^{-1})`.
    pub fn action_a_inverse(&self, hd: &HeckeDatum) -> Monomial {
        let nl = self.eta.level as i64;
        let inv = (1..nl.max(2)).find(|x| (x * hd.ell).rem_euclid(nl) == 1 % nl).unwrap_or(1);
        let n = self.n;
        let a = hd.a();
        let flat: Vec<i64> = (0..n * n).map(|k| if a.get(k / n, k % n) == hd.ell { inv } else { a.get(k / n, k % n) }).collect();
        self.action_mod(&flat, 1)
    }

    /// Canonical label of a basis vector.
    pub fn class_label(&self, i: usize) -> String {
        let (v, s) = &self.basis[i];
        format!("{v:?}{}", if *s > 0 { "+" } else { "-" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Rat;

    #[test]
    fn generators() {
        assert_eq!(dirichlet_generator(3).unwrap().value(2), Some(CycloElem::from_int(-1)));
        assert_eq!(dirichlet_generator(5).unwrap().value(2), Some(CycloElem::root_of_unity(4, 1)));
        assert_eq!(dirichlet_generator(7).unwrap().value(3), Some(CycloElem::root_of_unity(6, 1)));
        assert_eq!(dirichlet_generator(4).unwrap().value(3), Some(CycloElem::from_int(-1)));
        assert!(matches!(dirichlet_generator(8), Err(Error::NonCyclicUnits(8))));
    }

    #[test]
    fn quadratic_characters() {
        let q5 = Nebentype::quadratic(5).unwrap();
        assert_eq!(q5.value(2), Some(CycloElem::from_int(-1)));
        assert_eq!(q5.value(4), Some(CycloElem::one()));
        assert_eq!(q5.field(), 1);
        assert_eq!(Nebentype::parse(7, "chi^3").unwrap(), Nebentype::quadratic(7).unwrap());
        assert_eq!(Nebentype::parse(7, "chi^2").unwrap().field(), 3);
        assert_eq!(Nebentype::parse(5, "chi").unwrap().label(), "chi_5");
    }

    #[test]
    fn coset_counts() {
        assert_eq!(coset_space(2, 3).len(), 14);
        assert_eq!(coset_space(5, 3).len(), 62);
        assert_eq!(coset_space(11, 2).len(), 24);
        assert_eq!(coset_space(4, 3).len(), 56);
        assert_eq!(coset_space(1, 3).len(), 2);
        for p in [2u64, 3, 5, 7] {
            assert_eq!(coset_space(p, 3).len() as u64, 2 * (p * p + p + 1));
        }
    }

    #[test]
    fn sections_land_in_their_cosets() {
        for (level, n) in [(5u64, 3usize), (4, 3), (11, 2), (6, 3)] {
            for class in coset_space(level, n) {
                let g = section(&class, level);
                assert_eq!(g.det(), class.1 as i64);
                let bottom: Vec<i64> = (0..n).map(|j| g.get(n - 1, j)).collect();
                let (c, _) = canonical_row(&bottom.iter().map(|x| x.rem_euclid(level as i64)).collect::<Vec<_>>(), level as i64);
                assert_eq!(c, class.0);
            }
        }
    }

    #[test]
    fn reflection_scales_identity_coset() {
        let m = CoinducedModule::new(&Nebentype::quadratic(3).unwrap(), 3);
        let id = m.index[&(vec![0, 0, 1], 1)];
        let (j, d) = m.act_on_class(&m.basis[id], &[1, 0, 0, 0, 1, 0, 0, 0, -1], -1);
        assert_eq!(m.basis[j], (vec![0, 0, 1], -1));
        assert_eq!(m.eta.value(d), Some(CycloElem::from_int(-1)));
    }

    #[test]
    fn trivial_character_gives_permutations() {
        let m = CoinducedModule::new(&Nebentype::trivial(5).unwrap(), 3);
        let r = m.action(&IntMat::from_rows(&[&[0, 1, 0], &[1, 1, 0], &[2, 0, 1]]));
        assert!(r.scale.iter().all(|s| s.is_one()));
        let mut t = r.target.clone();
        t.sort();
        assert_eq!(t, (0..m.dim()).collect::<Vec<_>>());
    }

    #[test]
    fn a_inverse_undoes_a() {
        let eta = dirichlet_generator(5).unwrap();
        for k in 1..=3 {
            let h = HeckeDatum::new(3, 2, k).unwrap();
            let m = coinduced(&eta, &h).unwrap();
            assert_eq!(m.action(&h.a()).compose(&m.action_a_inverse(&h)), Monomial::identity(m.dim()));
        }
        assert!(coinduced(&eta, &HeckeDatum::new(3, 5, 1).unwrap()).is_err());
    }

    #[test]
    fn level_one_is_one_dimensional_per_sign() {
        let m = CoinducedModule::new(&Nebentype::trivial(1).unwrap(), 3);
        assert_eq!(m.dim(), 2);
        assert_eq!(CoinducedModule::new(&Nebentype::trivial(11).unwrap(), 2).dim(), 24);
        let r: Mat<Rat> = m.action(&IntMat::diag(&[-1, 1, 1])).to_mat();
        assert_eq!(r, Mat::from_ints(&[&[0, 1], &[1, 0]]));
    }
}
