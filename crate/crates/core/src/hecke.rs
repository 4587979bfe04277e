//! Hecke operators as the composition
//! `p_* ∘ (r^* (l^*)^{-1}) ∘ ... ∘ (r^* (l^*)^{-1}) ∘ q^*`
//! through the slabs of a well-tempered complex, Hecke polynomials, common
//! eigenspaces, and the labels of the Galois representations that match them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::coefficients::{CoinducedModule, Nebentype};
use crate::cohomology::{cochain_complex, coset_representatives, divide_set, map_on_cohomology, pullback_q, reduce, restriction, transfer_p, EquivariantCochains, Reduction};
use crate::complex::{fiber_complex, slab_complex, validate, EqComplex, RepIndex};
use crate::exactmath::{CycloElem, FactorField, Field, Mat, Poly, Rat};
use crate::hecketope::{default_vertex_count, fiber_cells, transform_set};
use crate::lattice::{format_vec_set, minimal_vectors, HeckeDatum, IntMat, LatVec};
use crate::temperament::WTComplex;
use crate::{Error, Result};

/// The orbit complex of `GL_n(Z)` on the well-rounded retract.
pub fn gl_complex(n: usize) -> Result<EqComplex> {
    let h = HeckeDatum::new(n, 2, n)?;
    fiber_complex(&fiber_cells(&Rat::one(), &h, default_vertex_count(n))?, &h)
}

/// An oriented complex with its cochains and their reduction.
#[derive(Clone, Debug)]
pub struct Cohomology<F: Field> {
    pub cx: EqComplex,
    pub cochains: EquivariantCochains<F>,
    pub reduction: Reduction<F>,
}

impl<F: Field> Cohomology<F> {
    pub fn new(cx: EqComplex, rho: &CoinducedModule) -> Result<Cohomology<F>> {
        let cochains = cochain_complex(&cx, rho)?;
        let reduction = reduce(&cochains.complex);
        Ok(Cohomology { cx, cochains, reduction })
    }

    pub fn h_dims(&self) -> Vec<usize> {
        self.reduction.h_dims()
    }

    pub fn h_dim(&self, i: usize) -> usize {
        self.reduction.h_dim(i)
    }
}

/// The `rho`-independent data of one correspondence: the oriented critical
/// fibers and slabs of its well-tempered complex, and `Gamma_0 / Gamma`.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub h: HeckeDatum,
    pub fibers: Vec<EqComplex>,
    pub slabs: Vec<EqComplex>,
    pub cosets: Vec<IntMat>,
}

impl Correspondence {
    pub fn new(w: &WTComplex) -> Result<Correspondence> {
        let h = w.h;
        let fibers: Vec<EqComplex> = w.fibers.iter().map(|f| fiber_complex(f, &h)).collect::<Result<_>>()?;
        let slabs = (0..w.slabs.len()).map(|i| slab_complex(w, i, &fibers[i], &fibers[i + 1])).collect::<Result<_>>()?;
        let cosets = coset_representatives(&h);
        Ok(Correspondence { h, fibers, slabs, cosets })
    }

    /// Every fiber and slab passes [`validate`], and all share one orbifold
    /// Euler characteristic.
    pub fn check(&self) -> Result<()> {
        let chi = self.fibers[0].euler();
        for (what, cx) in self.fibers.iter().map(|c| ("fiber", c)).chain(self.slabs.iter().map(|c| ("slab", c))) {
            let v = validate(cx);
            if !v.ok() {
                return Err(Error::Invariant(format!("{what}: {}", v.violations.join("; "))));
            }
            if cx.euler() != chi {
                return Err(Error::Invariant(format!("{what} Euler characteristic {} != {chi}", cx.euler())));
            }
        }
        Ok(())
    }
}

/// `sigma -> a . sigma` carries the bottom fiber `X_{u_0}` onto `X_1`.
///
/// Forward: every cell of the bottom fiber lands on a cell of `base` (the
/// `GL_n(Z)` complex at `u = 1`) of the same dimension, with `M a^{-1}`
/// exactly the minimal vectors of `a Z a^t` and faces going to faces, and
/// every orbit of `base` is reached. Backward: for each
/// cell of the top fiber, `a^{-1} Z a^{-t}` has weighted minimal vectors at
/// `u_0` that divide back to `M`.
pub fn check_bijection(corr: &Correspondence, base: &EqComplex) -> Result<()> {
    let h = &corr.h;
    let n = h.n;
    let a = h.a();
    let index = RepIndex::new(&base.cells, &base.group);
    let bottom = corr.fibers.first().ok_or_else(|| Error::Invariant(String::from("no fibers")))?;
    let mut hit = vec![false; base.cells.len()];
    for c in &bottom.cells {
        let m = divide_set(&c.m, h)?;
        let z = c.witness.act(&a);
        let min = minimal_vectors(&z, &Rat::one(), h)?;
        if min.vectors != m {
            return Err(Error::Invariant(format!("a . {} has minimal vectors {}", format_vec_set(&c.m), format_vec_set(&min.vectors))));
        }
        let (t, g) = index.find(&base.cells, &m, &z, c.dim).ok_or_else(|| Error::Invariant(format!("a . {} is not a cell at u = 1", format_vec_set(&c.m))))?;
        hit[t] = true;
        // the faces of a . sigma are the images of the faces of sigma
        let mut src = Vec::new();
        for b in &c.boundary {
            let face = transform_set(&bottom.cells[b.face].m, &b.gamma.inverse_int().expect("unimodular"));
            src.push(divide_set(&face, h)?);
        }
        let mut dst = Vec::new();
        for b in &base.cells[t].boundary {
            let gg = g.mul(&b.gamma).inverse_int().expect("unimodular");
            dst.push(transform_set(&base.cells[b.face].m, &gg));
        }
        src.sort();
        dst.sort();
        if src != dst {
            return Err(Error::Invariant(format!("faces of a . {} differ from the faces at u = 1", format_vec_set(&c.m))));
        }
    }
    if let Some(t) = hit.iter().position(|x| !x) {
        return Err(Error::Invariant(format!("cell {} at u = 1 is not a . sigma", format_vec_set(&base.cells[t].m))));
    }
    // l a^{-1} is integral
    let d: Vec<i64> = (0..n).map(|i| if i < n - h.k { h.ell } else { 1 }).collect();
    let la_inv = IntMat::diag(&d);
    let l2 = Rat::new(1, h.ell * h.ell);
    let top = corr.fibers.last().expect("nonempty");
    for c in &top.cells {
        let z = c.witness.act(&la_inv).scale(&l2);
        let min = minimal_vectors(&z, &h.u0(), h)?;
        let back = divide_set(&min.vectors, h)?;
        let mut want: Vec<LatVec> = c.m.iter().map(LatVec::normalized).collect();
        want.sort();
        if back != want {
            return Err(Error::Invariant(format!("a^-1 . {} has minimal vectors {}", format_vec_set(&c.m), format_vec_set(&min.vectors))));
        }
    }
    Ok(())
}

/// Diagnostics and result of one Hecke operator on all degrees.
#[derive(Clone, Debug)]
pub struct HeckeOperator<F: Field> {
    pub h: HeckeDatum,
    /// `T` on `H^i` of the base, per degree.
    pub matrices: Vec<Mat<F>>,
    /// `dim H^*` of each critical fiber (ascending temperament).
    pub fiber_dims: Vec<Vec<usize>>,
    /// `dim H^*` of each slab, including degree `vcd + 1`.
    pub slab_dims: Vec<Vec<usize>>,
}

fn mat_or_empty<F: Field>(rows: usize, cols: usize, m: Mat<F>) -> Mat<F> {
    if rows == 0 || cols == 0 {
        Mat::zeros(rows, cols)
    } else {
        m
    }
}

fn compose<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    if a.cols() == 0 {
        Mat::zeros(a.rows(), b.cols())
    } else {
        a.mul(b)
    }
}

fn invert<F: Field>(m: &Mat<F>, what: &str) -> Result<Mat<F>> {
    if m.rows() != m.cols() {
        return Err(Error::Invariant(format!("{what} is {}x{}, not square", m.rows(), m.cols())));
    }
    if m.rows() == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    m.inverse().map_err(|_| Error::Invariant(format!("{what} is not invertible")))
}

/// `T_a` on `H^*_{GL_n(Z)}(X; rho)` for the correspondence, in the basis
/// fixed by `base`.
pub fn hecke_operator<F: Field>(corr: &Correspondence, base: &Cohomology<F>, rho: &CoinducedModule) -> Result<HeckeOperator<F>> {
    let h = &corr.h;
    let fibers: Vec<Cohomology<F>> = corr.fibers.iter().map(|cx| Cohomology::new(cx.clone(), rho)).collect::<Result<_>>()?;
    let slabs: Vec<Cohomology<F>> = corr.slabs.iter().map(|cx| Cohomology::new(cx.clone(), rho)).collect::<Result<_>>()?;
    let top = base.cochains.complex.top();
    let mut matrices = Vec::with_capacity(top + 1);
    for i in 0..=top {
        let hb = base.h_dim(i);
        let bottom = &fibers[0];
        let q = pullback_q(&base.cx, &base.cochains, &bottom.cx, &bottom.cochains, rho, h, i)?;
        let mut m = mat_or_empty(bottom.h_dim(i), hb, map_on_cohomology(&q, &base.reduction, &bottom.reduction, i));
        for (s, slab) in slabs.iter().enumerate() {
            let (lower, upper) = (&fibers[s], &fibers[s + 1]);
            let nl = lower.cx.cells.len();
            let hs = slab.h_dim(i);
            let l = mat_or_empty(lower.h_dim(i), hs, map_on_cohomology(&restriction(&slab.cochains, &lower.cochains, 0, i)?, &slab.reduction, &lower.reduction, i));
            let r = mat_or_empty(upper.h_dim(i), hs, map_on_cohomology(&restriction(&slab.cochains, &upper.cochains, nl, i)?, &slab.reduction, &upper.reduction, i));
            let l_inv = invert(&l, &format!("l^* on H^{i} of slab {s}"))?;
            invert(&r, &format!("r^* on H^{i} of slab {s}"))?;
            m = compose(&r, &compose(&l_inv, &m));
        }
        let top_fiber = fibers.last().unwrap();
        let p = transfer_p(&base.cx, &base.cochains, &top_fiber.cx, &top_fiber.cochains, &corr.cosets, rho, i)?;
        let pm = mat_or_empty(hb, top_fiber.h_dim(i), map_on_cohomology(&p, &top_fiber.reduction, &base.reduction, i));
        matrices.push(compose(&pm, &m));
    }
    Ok(HeckeOperator {
        h: *h,
        matrices,
        fiber_dims: fibers.iter().map(Cohomology::h_dims).collect(),
        slab_dims: slabs.iter().map(Cohomology::h_dims).collect(),
    })
}

/// `sum_k (-1)^k l^{k(k-1)/2} a_k X^k` with `a_0 = 1`, `a_k` the eigenvalue
/// of `T_{l,k}`: for `n = 3` this is `1 - a_1 X + l a_2 X^2 - l^3 a_3 X^3`.
pub fn hecke_polynomial<F: Field>(ell: i64, a: &[F]) -> Poly<F> {
    let mut c = vec![F::one()];
    for (k, ak) in a.iter().enumerate() {
        let k = k + 1;
        let lk = F::from_int(ell.pow((k * (k - 1) / 2) as u32));
        let t = lk.times(ak);
        c.push(if k % 2 == 1 { t.negate() } else { t });
    }
    Poly::new(c)
}

fn poly_at_matrix<F: Field>(p: &Poly<F>, m: &Mat<F>) -> Mat<F> {
    let n = m.rows();
    let mut acc: Mat<F> = Mat::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(m).add(&Mat::identity(n).scale(c));
    }
    acc
}

/// `X` with `m B = B X`, for `B` of full column rank spanning an
/// `m`-invariant subspace.
fn restrict_to<F: Field>(m: &Mat<F>, b: &Mat<F>) -> Result<Mat<F>> {
    let rows = b.transpose().rref().pivots;
    let br = b.select_rows(&rows).inverse()?;
    Ok(br.mul(&m.mul(b).select_rows(&rows)))
}

/// A common generalized eigenspace of commuting operators.
#[derive(Clone, Debug)]
pub struct Eigenspace<F: Field> {
    /// Columns span the space.
    pub basis: Mat<F>,
    /// Per operator, the monic irreducible factor of its minimal polynomial here.
    pub factors: Vec<Poly<F>>,
}

impl<F: Field> Eigenspace<F> {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Eigenvalues when every factor is linear.
    pub fn eigenvalues(&self) -> Option<Vec<F>> {
        self.factors.iter().map(|p| (p.degree() == Some(1)).then(|| p.coeff(0).negate())).collect()
    }
}

/// Simultaneous generalized eigenspaces over the field (conductor `m`).
pub fn decompose<F: FactorField>(mats: &[Mat<F>], m: u8) -> Result<Vec<Eigenspace<F>>> {
    let Some(first) = mats.first() else { return Ok(Vec::new()) };
    let d = first.rows();
    for (i, a) in mats.iter().enumerate() {
        if !a.is_square() || a.rows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: a.rows() });
        }
        for b in &mats[..i] {
            if !a.commutes_with(b) {
                return Err(Error::NonCommuting);
            }
        }
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut spaces = vec![Eigenspace { basis: Mat::<F>::identity(d), factors: Vec::new() }];
    for t in mats {
        let mut next = Vec::new();
        for s in spaces {
            let x = restrict_to(t, &s.basis)?;
            let fac = F::factor(&x.charpoly()?, m)?;
            for (p, e) in fac.factors {
                let k = poly_at_matrix(&p.pow(e), &x).kernel();
                let sub = s.basis.mul(&Mat::from_cols(x.rows(), &k));
                let mut factors = s.factors.clone();
                factors.push(p);
                next.push(Eigenspace { basis: sub, factors });
            }
        }
        spaces = next;
    }
    Ok(spaces)
}

/// `chi_N^j eps^m`, printed as `χ_N^jε^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Summand {
    pub m: u32,
    pub j: u64,
}

fn superscript(k: u64) -> String {
    if k == 1 {
        String::new()
    } else {
        format!("^{k}")
    }
}

impl Summand {
    pub fn render(&self, level: u64) -> String {
        let chi = if self.j == 0 { String::new() } else { format!("χ_{level}{}", superscript(self.j)) };
        match (self.j, self.m) {
            (0, 0) => String::from("1"),
            (_, 0) => chi,
            _ => format!("{chi}ε{}", superscript(self.m as u64)),
        }
    }
}

/// A classical newform known to the labeller, for naming residual factors.
#[derive(Clone, Copy, Debug)]
pub struct Newform {
    pub name: &'static str,
    pub level: u64,
    pub weight: u32,
    /// Its character as a power of `chi_N` (`N` = `level`).
    pub chi: u64,
    /// `(p, a_p)` for small good primes.
    pub ap: &'static [(i64, i64)],
}

/// `11.2.a.a` is the form of the elliptic curve `y^2 + y = x^3 - x^2 - 10x - 20`;
/// `7.3.b.a` is `q - 3q^2 + 5q^4 - 7q^7 - 3q^8 + 9q^9 + ...`.
pub const KNOWN_NEWFORMS: &[Newform] = &[
    Newform { name: "11.2.a.a", level: 11, weight: 2, chi: 0, ap: &[(2, -2), (3, -1), (5, 1), (7, -2)] },
    Newform { name: "7.3.b.a", level: 7, weight: 3, chi: 3, ap: &[(2, -3), (3, 0), (5, 0)] },
];

/// A quadratic residual `1 - a_l X + chi(l) l^{w-1} X^2` shared by all `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspFactor {
    pub weight: u32,
    /// Character as a power of `chi_N`.
    pub chi: u64,
    pub ap: Vec<(i64, CycloElem)>,
    pub name: Option<&'static str>,
}

impl CuspFactor {
    pub fn render(&self, level: u64) -> String {
        if let Some(name) = self.name {
            return format!("({name})");
        }
        let chi = if self.chi == 0 { String::from("1") } else { format!("χ_{level}{}", superscript(self.chi)) };
        let a: Vec<String> = self.ap.iter().map(|(l, a)| format!("a_{l}={a}")).collect();
        format!("cusp(k={}, {chi}; {})", self.weight, a.join(", "))
    }
}

/// Galois-side description of one eigenspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisMatch {
    pub summands: Vec<Summand>,
    pub cusp: Option<CuspFactor>,
    /// Whatever is left at each prime, when it matches nothing.
    pub residual: Vec<(i64, Poly<CycloElem>)>,
    pub dim: usize,
}

impl GaloisMatch {
    pub fn label(&self, level: u64) -> String {
        let mut parts: Vec<String> = self.summands.iter().map(|s| s.render(level)).collect();
        if let Some(c) = &self.cusp {
            parts.push(c.render(level));
        }
        if !self.residual.is_empty() {
            let a: Vec<String> = self.residual.iter().map(|(l, p)| format!("P_{l}={p}")).collect();
            parts.push(format!("unmatched[{}]", a.join(", ")));
        }
        let mut s = parts.join("⊕");
        if self.dim > 1 {
            s.push_str(&format!(" (dim {})", self.dim));
        }
        s
    }
}

fn identify_cusp(level: u64, chars: &[Nebentype], rest: &[(i64, Poly<CycloElem>)]) -> Option<CuspFactor> {
    if rest.is_empty() || rest.iter().any(|(_, p)| p.degree() != Some(2) || !p.coeff(0).is_one()) {
        return None;
    }
    // when few primes are known several characters may fit; a named form wins
    let mut first = None;
    for w in 1..=8u32 {
        for (j, chi) in chars.iter().enumerate() {
            let fits = rest.iter().all(|(l, p)| chi.value(*l).is_some_and(|c| c.times(&CycloElem::from_int(l.pow(w - 1))) == p.coeff(2)));
            if !fits {
                continue;
            }
            let ap: Vec<(i64, CycloElem)> = rest.iter().map(|(l, p)| (*l, p.coeff(1).negate())).collect();
            let j = if level == 1 { 0 } else { j as u64 };
            let name = KNOWN_NEWFORMS
                .iter()
                .find(|f| {
                    f.level == level
                        && f.weight == w
                        && f.chi == j
                        && ap.iter().all(|(l, a)| f.ap.iter().find(|(p, _)| p == l).is_some_and(|(_, b)| *a == CycloElem::from_int(*b)))
                })
                .map(|f| f.name);
            let c = CuspFactor { weight: w, chi: j, ap, name };
            if name.is_some() {
                return Some(c);
            }
            first.get_or_insert(c);
        }
    }
    first
}

/// Split Hecke polynomials `P_l` (one per prime) into factors
/// `1 - chi(l) l^m X` common to every `l`; a quadratic remainder of the
/// shape `1 - a_l X + chi(l) l^{w-1} X^2` becomes a cusp-form candidate, and
/// anything else is reported raw.
pub fn match_galois(eta_level: u64, polys: &[(i64, Poly<CycloElem>)], dim: usize) -> Result<GaloisMatch> {
    // levels whose characters need an unsupported field only see the trivial one
    let chars = match Nebentype::all(eta_level) {
        Ok(all) if eta_level > 1 => all,
        _ => vec![Nebentype::trivial(eta_level)?],
    };
    let mut rest: Vec<(i64, Poly<CycloElem>)> = polys.to_vec();
    let mut summands = Vec::new();
    let top = rest.iter().filter_map(|(_, p)| p.degree()).max().unwrap_or(0) as u32;
    'outer: loop {
        for m in 0..=2 * top {
            for (j, chi) in chars.iter().enumerate() {
                let factors: Option<Vec<Poly<CycloElem>>> = rest
                    .iter()
                    .map(|(l, p)| {
                        let root = chi.value(*l)?.times(&CycloElem::from_int(l.pow(m)));
                        let lin = Poly::new(vec![CycloElem::one(), root.negate()]);
                        let (q, r) = p.div_rem(&lin);
                        (r.is_zero() && p.degree().unwrap_or(0) > 0).then_some(q)
                    })
                    .collect();
                if let Some(qs) = factors {
                    if !qs.is_empty() {
                        for ((_, p), q) in rest.iter_mut().zip(qs) {
                            *p = q;
                        }
                        summands.push(Summand { m, j: if eta_level == 1 { 0 } else { j as u64 } });
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    summands.sort();
    if rest.iter().all(|(_, p)| p.degree().unwrap_or(0) == 0) {
        return Ok(GaloisMatch { summands, cusp: None, residual: Vec::new(), dim });
    }
    match identify_cusp(eta_level, &chars, &rest) {
        Some(c) => Ok(GaloisMatch { summands, cusp: Some(c), residual: Vec::new(), dim }),
        None => Ok(GaloisMatch { summands, cusp: None, residual: rest, dim }),
    }
}

/// One common eigenspace of `H^i` with its eigenvalues `a_{l,k}` and label.
#[derive(Clone, Debug)]
pub struct SpaceReport {
    pub dim: usize,
    /// `(l, k, a_{l,k})`; `None` when the eigenvalue is not in the field.
    pub eigenvalues: Vec<(i64, usize, Option<CycloElem>)>,
    pub label: String,
}

/// The eigenspaces of one degree.
#[derive(Clone, Debug)]
pub struct DegreeReport {
    pub degree: usize,
    pub dim: usize,
    pub spaces: Vec<SpaceReport>,
}

impl DegreeReport {
    pub fn labels(&self) -> Vec<String> {
        self.spaces.iter().map(|s| s.label.clone()).collect()
    }
}

/// One `(N, eta)` row of the Hecke table.
#[derive(Clone, Debug)]
pub struct LevelReport {
    pub level: u64,
    pub eta: String,
    pub degrees: Vec<DegreeReport>,
    /// Violations of `T_{l,n} = eta(l)` and similar consistency checks.
    pub problems: Vec<String>,
}

/// Hecke operators of every correspondence with `l` prime to the level on
/// `H^*(Gamma_0(N); eta)`, decomposed and labelled.
pub fn level_report<F: FactorField>(eta: &Nebentype, base_cx: &EqComplex, corrs: &[&Correspondence]) -> Result<LevelReport> {
    let n = base_cx.group.n;
    let level = eta.level;
    let rho = CoinducedModule::new(eta, n);
    let base: Cohomology<F> = Cohomology::new(base_cx.clone(), &rho)?;
    let mut ops: Vec<(i64, usize, HeckeOperator<F>)> = Vec::new();
    let mut problems = Vec::new();
    for c in corrs.iter().filter(|c| !level.is_multiple_of(c.h.ell as u64)) {
        let t = hecke_operator(c, &base, &rho)?;
        if c.h.k == n {
            let want = F::from_cyclo(&eta.value(c.h.ell).expect("unit")).expect("field holds eta");
            for (i, m) in t.matrices.iter().enumerate() {
                if *m != Mat::identity(m.rows()).scale(&want) {
                    problems.push(format!("T_{{{},{n}}} on H^{i} is not eta({}) = {want}", c.h.ell, c.h.ell));
                }
            }
        }
        ops.push((c.h.ell, c.h.k, t));
    }
    let mut primes: Vec<i64> = ops.iter().map(|o| o.0).collect();
    primes.sort();
    primes.dedup();
    let mut degrees = Vec::new();
    for i in 0..=base.cochains.complex.top() {
        let dim = base.h_dim(i);
        if dim == 0 {
            continue;
        }
        let mats: Vec<Mat<F>> = ops.iter().map(|o| o.2.matrices[i].clone()).collect();
        let mut spaces = Vec::new();
        for e in decompose(&mats, eta.field())? {
            let eigenvalues: Vec<(i64, usize, Option<CycloElem>)> = ops
                .iter()
                .zip(&e.factors)
                .map(|(o, p)| (o.0, o.1, (p.degree() == Some(1)).then(|| p.coeff(0).negate().to_cyclo())))
                .collect();
            let mut polys = Vec::new();
            for &l in &primes {
                let a: Option<Vec<CycloElem>> = (1..=n)
                    .map(|k| eigenvalues.iter().find(|(l2, k2, _)| *l2 == l && *k2 == k).and_then(|x| x.2.clone()))
                    .collect();
                if let Some(a) = a {
                    polys.push((l, hecke_polynomial(l, &a)));
                }
            }
            let label = if polys.len() == primes.len() && !polys.is_empty() {
                match_galois(level, &polys, e.dim())?.label(level)
            } else {
                format!("unresolved (dim {})", e.dim())
            };
            spaces.push(SpaceReport { dim: e.dim(), eigenvalues, label });
        }
        degrees.push(DegreeReport { degree: i, dim, spaces });
    }
    Ok(LevelReport { level, eta: eta.label(), degrees, problems })
}

/// Lay out rows `(N, eta)` against columns `H^0 .. H^top`.
pub fn render_table(rows: &[LevelReport], top: usize) -> String {
    let mut out = String::from("N\teta");
    for i in 0..=top {
        out.push_str(&format!("\tH^{i}"));
    }
    out.push('\n');
    for r in rows {
        let height = r.degrees.iter().map(|d| d.spaces.len()).max().unwrap_or(0).max(1);
        for line in 0..height {
            if line == 0 {
                out.push_str(&format!("{}\t{}", r.level, r.eta));
            } else {
                out.push('\t');
            }
            for i in 0..=top {
                let cell = r.degrees.iter().find(|d| d.degree == i).and_then(|d| d.spaces.get(line)).map(|s| s.label.clone()).unwrap_or_default();
                out.push('\t');
                out.push_str(&cell);
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: i64) -> CycloElem {
        CycloElem::from_int(x)
    }

    #[test]
    fn polynomial_examples() {
        let p = hecke_polynomial(2, &[Rat::from_int(7), Rat::from_int(7), Rat::one()]);
        assert_eq!(p, Poly::from_ints(&[1, -7, 14, -8]));
        let q = hecke_polynomial(2, &[Rat::from_int(-1), Rat::from_int(-1), Rat::one()]);
        assert_eq!(q, Poly::from_ints(&[1, 1, -2, -8]));
        assert_eq!(q, Poly::from_ints(&[1, -2]).mul(&Poly::from_ints(&[1, 3, 4])));
        assert_eq!(hecke_polynomial(5, &[Rat::zero(), Rat::zero(), Rat::zero()]).degree(), Some(0));
    }

    #[test]
    fn decompose_diagonal() {
        let a: Mat<Rat> = Mat::from_ints(&[&[7, 0], &[0, 3]]);
        let b: Mat<Rat> = Mat::from_ints(&[&[7, 0], &[0, 5]]);
        let sp = decompose(&[a.clone(), b], 1).unwrap();
        assert_eq!(sp.len(), 2);
        assert!(sp.iter().all(|s| s.dim() == 1));
        let sc = decompose(&[Mat::<Rat>::identity(3).scale(&Rat::from_int(4))], 1).unwrap();
        assert_eq!(sc.len(), 1);
        assert_eq!(sc[0].eigenvalues(), Some(vec![Rat::from_int(4)]));
        assert!(matches!(decompose(&[a, Mat::from_ints(&[&[0, 1], &[1, 0]])], 1), Err(Error::NonCommuting)));
    }

    #[test]
    fn labels_of_eisenstein_pieces() {
        let polys: Vec<(i64, Poly<CycloElem>)> =
            [3i64, 5].iter().map(|&l| (l, hecke_polynomial(l, &[c(1 + l + l * l), c(1 + l + l * l), c(1)]))).collect();
        assert_eq!(match_galois(2, &polys, 1).unwrap().label(2), "1⊕ε⊕ε^2");
        // chi_3 + eps + eps^2 at l = 2, 5
        let polys: Vec<(i64, Poly<CycloElem>)> = [2i64, 5]
            .iter()
            .map(|&l| {
                let chi = if l % 3 == 1 { 1 } else { -1 };
                let p = Poly::from_ints(&[1, -chi]).mul(&Poly::from_ints(&[1, -l])).mul(&Poly::from_ints(&[1, -l * l]));
                (l, p.map(|x: &Rat| CycloElem::rational(x.clone())))
            })
            .collect();
        assert_eq!(match_galois(3, &polys, 1).unwrap().label(3), "χ_3⊕ε⊕ε^2");
    }

    #[test]
    fn cusp_residual_is_reported() {
        // (1 - 2X)(1 + 3X + 4X^2) at l = 2 only
        let p = Poly::from_ints(&[1, -2]).mul(&Poly::from_ints(&[1, 3, 4])).map(|x: &Rat| CycloElem::rational(x.clone()));
        let g = match_galois(7, &[(2, p)], 1).unwrap();
        assert_eq!(g.summands.len(), 1);
        assert_eq!(g.label(7), "ε⊕(7.3.b.a)");
        // an unknown form keeps its data
        let q2 = Poly::from_ints(&[1, -2]).mul(&Poly::from_ints(&[1, 1, 4])).map(|x: &Rat| CycloElem::rational(x.clone()));
        let q3 = Poly::from_ints(&[1, -3]).mul(&Poly::from_ints(&[1, -1, -9])).map(|x: &Rat| CycloElem::rational(x.clone()));
        assert_eq!(match_galois(7, &[(2, q2), (3, q3)], 1).unwrap().label(7), "ε⊕cusp(k=3, χ_7^3; a_2=-1, a_3=1)");
        let r = Poly::from_ints(&[1, 1, 3]).map(|x: &Rat| CycloElem::rational(x.clone()));
        assert!(match_galois(7, &[(2, r)], 1).unwrap().label(7).starts_with("unmatched"));
    }

    fn operator(n: usize, ell: i64, k: usize, eta: &Nebentype) -> HeckeOperator<Rat> {
        let h = HeckeDatum::new(n, ell, k).unwrap();
        let w = crate::temperament::build_wtc(&h, None).unwrap();
        let corr = Correspondence::new(&w).unwrap();
        corr.check().unwrap();
        let rho = CoinducedModule::new(eta, n);
        let base = Cohomology::new(gl_complex(n).unwrap(), &rho).unwrap();
        hecke_operator(&corr, &base, &rho).unwrap()
    }

    #[test]
    fn degree_zero_counts_sublattices() {
        let t = operator(2, 2, 1, &Nebentype::trivial(1).unwrap());
        assert_eq!(t.matrices[0], Mat::from_ints(&[&[3]]));
        let t = operator(2, 3, 1, &Nebentype::trivial(1).unwrap());
        assert_eq!(t.matrices[0], Mat::from_ints(&[&[4]]));
    }

    #[test]
    fn gamma0_11_at_two() {
        let t = operator(2, 2, 1, &Nebentype::trivial(11).unwrap());
        let cp = t.matrices[1].charpoly().unwrap();
        assert_eq!(cp, Poly::from_ints(&[-3, 1]).mul(&Poly::from_ints(&[2, 1]).pow(2)));
    }

    #[test]
    fn a_carries_bottom_fiber_to_top() {
        use crate::temperament::build_wtc;
        for (n, ell, k) in [(2, 2, 1), (2, 3, 1), (2, 5, 1)] {
            let h = HeckeDatum::new(n, ell, k).unwrap();
            let corr = Correspondence::new(&build_wtc(&h, None).unwrap()).unwrap();
            check_bijection(&corr, &gl_complex(n).unwrap()).unwrap();
        }
    }
}
