//! Sweeping the temperament `u` from 1 down to `u_0 = 1/l^2`: vertex pencils,
//! their validity intervals, the critical temperaments, and the refined
//! well-tempered complex.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactmath::{solve_affine, AffineSolution, Mat, Poly, Rat, RootInterval};
use crate::hecketope::{fiber_with_retry, psi_rank, transporters, Fiber, FiberCell};
use crate::lattice::{in_m0, minimal_vectors, psi_coords, short_vectors, sym_dim, weighted_length, Form, HeckeDatum, IntMat, LatVec};
use crate::{Error, Result};

/// Cap on bisection steps and sample retries.
const CAP: usize = 200;

/// Closure-failure retries allowed per fiber during a sweep.
const DOUBLINGS: usize = 3;

/// A vertex form as a function of the temperament, `Z(u') = constant + u' slope`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    pub m: Vec<LatVec>,
    pub constant: Form,
    pub slope: Form,
}

impl Pencil {
    pub fn at(&self, u: &Rat) -> Form {
        self.constant.add(&self.slope.scale(u))
    }

    /// `det Z(u')`, interpolated through `u' = 0..=n`.
    pub fn det_poly(&self) -> Poly<Rat> {
        let n = self.constant.n();
        let xs: Vec<Rat> = (0..=n as i64).map(Rat::from_int).collect();
        let mut acc = Poly::zero();
        for (i, xi) in xs.iter().enumerate() {
            let mut basis = Poly::constant(self.at(xi).det());
            for (j, xj) in xs.iter().enumerate() {
                if i != j {
                    let d = (xi - xj).recip().unwrap();
                    basis = basis.mul(&Poly::linear_root(xj)).scale(&d);
                }
            }
            acc = acc.add(&basis);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilSolution {
    Pencil(Pencil),
    /// The equalities `weight_{u'}(x) Z[x] = 1` on `M` pin `u'`.
    PointOnly(Rat),
}

/// Solve `Z[x] = 1` (`x` in `M_0`) and `Z[x] = u'` (otherwise) for `x` in `m`.
pub fn vertex_pencil(m: &[LatVec], h: &HeckeDatum) -> Result<PencilSolution> {
    let n = h.n;
    let rows: Vec<Vec<Rat>> = m.iter().map(|x| psi_coords(x).into_iter().map(Rat::from_int).collect()).collect();
    let (mut b0, mut b1) = (Vec::with_capacity(m.len()), Vec::with_capacity(m.len()));
    for x in m {
        let inside = in_m0(x, h);
        b0.push(if inside { Rat::one() } else { Rat::zero() });
        b1.push(if inside { Rat::zero() } else { Rat::one() });
    }
    match solve_affine(&Mat::from_rows(rows), &b0, &b1)? {
        AffineSolution::Unique { constant, slope } => Ok(PencilSolution::Pencil(Pencil {
            m: m.to_vec(),
            constant: Form::from_functional(n, &constant),
            slope: Form::from_functional(n, &slope),
        })),
        AffineSolution::PointOnly { u, .. } => Ok(PencilSolution::PointOnly(u)),
        AffineSolution::Infeasible => Err(Error::Infeasible),
    }
}

/// Where a vertex lives as `u'` varies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexInterval {
    /// `M` is the minimal set of `Z(u')` exactly for `lo < u' < hi` (and at a
    /// clamped end); `lo_plus`, `hi_plus` are the minimal sets at the ends.
    Interval { pencil: Pencil, lo: Rat, lo_plus: Vec<LatVec>, hi: Rat, hi_plus: Vec<LatVec> },
    PointOnly(Rat),
}

impl VertexInterval {
    pub fn lo(&self) -> &Rat {
        match self {
            VertexInterval::Interval { lo, .. } => lo,
            VertexInterval::PointOnly(u) => u,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            VertexInterval::Interval { hi, .. } => hi,
            VertexInterval::PointOnly(u) => u,
        }
    }
}

enum Probe {
    Valid,
    Violators(Vec<LatVec>),
}

/// Does `Z(t)` still have minimal set exactly `m` with minimum 1?
fn probe(p: &Pencil, t: &Rat, h: &HeckeDatum) -> Result<Probe> {
    let z = p.at(t);
    if !z.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let mv = minimal_vectors(&z, t, h)?;
    if mv.m.is_one() && mv.vectors == p.m {
        return Ok(Probe::Valid);
    }
    let one = Rat::one();
    let v = short_vectors(&z, &one)?
        .into_iter()
        .filter(|y| p.m.binary_search(y).is_err() && weighted_length(&z, y, t, h) <= one)
        .collect();
    Ok(Probe::Violators(v))
}

/// Root of `weight_{u'}(y) Z(u')[y] = 1`, which is linear in `u'` after
/// clearing the weight.
fn threshold(p: &Pencil, y: &LatVec, h: &HeckeDatum) -> Rat {
    let c = crate::lattice::eval_unchecked(&p.constant, y);
    let s = crate::lattice::eval_unchecked(&p.slope, y);
    let (alpha, beta) = if in_m0(y, h) { (&c - &Rat::one(), s) } else { (c, &s - &Rat::one()) };
    -&(&alpha / &beta)
}

/// `m` survives in `plus`, allowing the `u_0` replacement of `x` by `l x`.
fn saturates(m: &[LatVec], plus: &[LatVec], at_u0: bool, h: &HeckeDatum) -> bool {
    m.iter().all(|x| plus.binary_search(x).is_ok() || (at_u0 && plus.binary_search(&x.scale(h.ell).normalized()).is_ok()))
}

/// Real roots of `det Z(u')`, isolated.
fn det_roots(p: &Pencil) -> (Poly<Rat>, Vec<RootInterval>) {
    let f = p.det_poly();
    match f.squarefree_part() {
        Ok(sf) => {
            let roots = sf.isolate_real_roots();
            (sf, roots)
        }
        Err(_) => (f, Vec::new()),
    }
}

/// Shrink `iv` until its upper end drops below `bound` (or it becomes exact).
fn refine_below(sf: &Poly<Rat>, iv: &RootInterval, bound: &Rat) -> RootInterval {
    let mut iv = iv.clone();
    while iv.lo != iv.hi && iv.hi >= *bound {
        iv = sf.refine(&iv, &(&(&iv.hi - &iv.lo) / &Rat::from_int(2)));
    }
    iv
}

fn refine_above(sf: &Poly<Rat>, iv: &RootInterval, bound: &Rat) -> RootInterval {
    let mut iv = iv.clone();
    while iv.lo != iv.hi && iv.lo <= *bound {
        iv = sf.refine(&iv, &(&(&iv.hi - &iv.lo) / &Rat::from_int(2)));
    }
    iv
}

/// First point to test between `u` and `end`, just short of the singular
/// wall if one lies in range. Clears `wall` when the whole range is regular.
fn first_probe(wall: &mut Option<RootInterval>, u: &Rat, end: &Rat, left: bool) -> Rat {
    let Some(iv) = wall.as_ref() else { return end.clone() };
    let near = if left { &iv.hi } else { &iv.lo };
    let inside = |r: &Rat| if left { r > end } else { r < end };
    if iv.lo == iv.hi && (inside(near) || near == end) {
        return Rat::midpoint(near, u);
    }
    if iv.lo != iv.hi && inside(near) {
        return near.clone();
    }
    // the root lies strictly beyond the end
    *wall = None;
    end.clone()
}

/// Walk from `u` toward `end` (`u_0` or 1) until new minimal vectors appear.
fn interval_end(p: &Pencil, u: &Rat, left: bool, h: &HeckeDatum) -> Result<(Rat, Vec<LatVec>)> {
    let end = if left { h.u0() } else { Rat::one() };
    let at = |t: &Rat| -> Result<(Rat, Vec<LatVec>)> { Ok((t.clone(), minimal_vectors(&p.at(t), t, h)?.vectors)) };
    if *u == end {
        return at(u);
    }
    let (sf, mut roots) = det_roots(p);
    // u is not a root, so isolating intervals can be pulled off it
    for iv in roots.iter_mut() {
        while iv.lo != iv.hi && iv.lo <= *u && *u <= iv.hi {
            *iv = sf.refine(iv, &(&(&iv.hi - &iv.lo) / &Rat::from_int(2)));
        }
    }
    // the nearest singular temperament on this side of u
    let mut wall: Option<RootInterval> =
        if left { roots.iter().rev().find(|iv| iv.hi < *u).cloned() } else { roots.iter().find(|iv| iv.lo > *u).cloned() };
    // decide which side of the end the wall is on
    if let Some(iv) = wall.as_mut() {
        if sf.eval(&end).is_zero() && iv.lo <= end && end <= iv.hi {
            *iv = RootInterval { lo: end.clone(), hi: end.clone() };
        }
        while iv.lo != iv.hi && iv.lo < end && end < iv.hi {
            *iv = sf.refine(iv, &(&(&iv.hi - &iv.lo) / &Rat::from_int(2)));
        }
    }
    let mut t = first_probe(&mut wall, u, &end, left);
    for _ in 0..CAP {
        match probe(p, &t, h)? {
            Probe::Valid => {
                let Some(iv) = wall.as_mut() else { return at(&t) };
                // still valid next to the singular wall: creep closer
                if iv.lo == iv.hi {
                    t = Rat::midpoint(&iv.lo, &t);
                } else {
                    *iv = if left { refine_below(&sf, iv, &t) } else { refine_above(&sf, iv, &t) };
                    t = first_probe(&mut wall, u, &end, left);
                }
            }
            Probe::Violators(vs) => {
                if vs.is_empty() {
                    return Err(Error::Invariant(format!("no violating vectors at u' = {t}")));
                }
                let roots = vs.iter().map(|y| threshold(p, y, h));
                let r = if left { roots.max().unwrap() } else { roots.min().unwrap() };
                let mv = minimal_vectors(&p.at(&r), &r, h)?;
                let plus = mv.vectors;
                // only at u_0 can a tie already be present at u itself
                let grew = plus != p.m || (r == *u && r == h.u0());
                if !mv.m.is_one() || !saturates(&p.m, &plus, r == h.u0(), h) || !grew {
                    return Err(Error::Invariant(format!("threshold u' = {r} does not saturate {}", crate::lattice::format_vec_set(&p.m))));
                }
                return Ok((r, plus));
            }
        }
    }
    Err(Error::IterationCap(format!("interval search for {}", crate::lattice::format_vec_set(&p.m))))
}

/// The maximal temperament interval on which the vertex with minimal set
/// `m` at `u` keeps exactly that minimal set, clamped to `[u_0, 1]`.
pub fn vertex_interval(m: &[LatVec], u: &Rat, h: &HeckeDatum) -> Result<VertexInterval> {
    let pencil = match vertex_pencil(m, h)? {
        PencilSolution::Pencil(p) => p,
        PencilSolution::PointOnly(v) => return Ok(VertexInterval::PointOnly(v)),
    };
    let mv = minimal_vectors(&pencil.at(u), u, h)?;
    if !mv.m.is_one() || mv.vectors != m {
        return Err(Error::Invariant(format!("{} is not a vertex at u = {u}", crate::lattice::format_vec_set(m))));
    }
    let (lo, lo_plus) = interval_end(&pencil, u, true, h)?;
    let (hi, hi_plus) = interval_end(&pencil, u, false, h)?;
    Ok(VertexInterval::Interval { pencil, lo, lo_plus, hi, hi_plus })
}

/// Intervals of the vertex orbits (dimension-0 cells) of a fiber.
pub fn vertex_intervals(f: &Fiber) -> Result<Vec<VertexInterval>> {
    f.cells.iter().filter(|c| c.dim == 0).map(|c| vertex_interval(&c.m, &f.u, &f.h)).collect()
}

/// Largest temperament below `f.u` where some vertex orbit of `f` stops
/// existing; `f.u` itself when a vertex lives only there, `u_0` at the floor.
pub fn next_critical_below(f: &Fiber) -> Result<Rat> {
    let u0 = f.h.u0();
    if f.u == u0 {
        return Ok(u0);
    }
    Ok(vertex_intervals(f)?.iter().map(|iv| iv.lo().clone()).max().unwrap_or(u0))
}

/// The minimal set of the limit at `u` of a cell whose vertices move along
/// `pencils`, together with the limit's barycenter.
pub fn saturate(pencils: &[&Pencil], u: &Rat, h: &HeckeDatum) -> Result<(Vec<LatVec>, Form)> {
    let mut limits: Vec<Form> = pencils.iter().map(|p| p.at(u)).collect();
    limits.sort();
    limits.dedup();
    let mut bary = Form::zero(h.n);
    for z in &limits {
        bary = bary.add(z);
    }
    let bary = bary.scale(&Rat::new(1, limits.len() as i64));
    if !bary.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let mv = minimal_vectors(&bary, u, h)?;
    if !mv.m.is_one() {
        return Err(Error::Invariant(format!("limit form at u = {u} has minimum {}", mv.m)));
    }
    Ok((mv.vectors, bary))
}

/// Where a slab cell closes up at one end of its slab: the cell
/// `gamma . rep` of the critical fiber, with minimal set `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub m: Vec<LatVec>,
    pub dim: usize,
    /// Index into the critical fiber's cells.
    pub rep: usize,
    pub gamma: IntMat,
}

/// The open slab between two consecutive critical temperaments.
#[derive(Clone, Debug)]
pub struct Slab {
    /// Index of the lower critical temperament; the upper one is `lo + 1`.
    pub lo: usize,
    pub sample: Fiber,
    /// One pencil per vertex of `sample.pool`.
    pub pencils: Vec<Pencil>,
    /// Per sample cell, its closure at the lower and upper ends.
    pub lo_attach: Vec<Attachment>,
    pub hi_attach: Vec<Attachment>,
}

/// The refined well-tempered complex, one representative per orbit.
#[derive(Clone, Debug)]
pub struct WTComplex {
    pub h: HeckeDatum,
    pub vertex_count: usize,
    /// `u_0 = u^(0) < .. < u^(r) = 1`.
    pub criticals: Vec<Rat>,
    /// Number of vertex orbits that end at each critical temperament from
    /// above (0 for the top).
    pub multiplicity: Vec<usize>,
    /// Fiber at each critical temperament.
    pub fibers: Vec<Fiber>,
    /// `slabs[i]` lies between `criticals[i]` and `criticals[i + 1]`.
    pub slabs: Vec<Slab>,
}

/// Locate the closure of `cell` at temperament `end.u`.
pub fn attach(sample: &Fiber, pencils: &[Pencil], cell: &FiberCell, end: &Fiber) -> Result<Attachment> {
    let h = &sample.h;
    let ps: Vec<&Pencil> = cell.vertices.iter().map(|&v| &pencils[v]).collect();
    let (m, bary) = saturate(&ps, &end.u, h)?;
    if !saturates(&cell.m, &m, end.u == h.u0(), h) {
        return Err(Error::Invariant(format!("closure of {} at u = {} loses vectors", crate::lattice::format_vec_set(&cell.m), end.u)));
    }
    let dim = sym_dim(h.n) - psi_rank(&m);
    for (i, rep) in end.cells.iter().enumerate() {
        if rep.dim != dim || rep.m.len() != m.len() {
            continue;
        }
        if let Some(gamma) = transporters(&rep.m, &rep.witness, &m, &bary, h, false).pop() {
            return Ok(Attachment { m, dim, rep: i, gamma });
        }
    }
    Err(Error::Invariant(format!("closure {} at u = {} is not a cell of the critical fiber", crate::lattice::format_vec_set(&m), end.u)))
}

fn sample_pencils(f: &Fiber) -> Result<Vec<Pencil>> {
    f.pool
        .iter()
        .map(|v| match vertex_pencil(&v.m, &f.h)? {
            PencilSolution::Pencil(p) => Ok(p),
            PencilSolution::PointOnly(u) => Err(Error::Invariant(format!("sample vertex pinned at u = {u}"))),
        })
        .collect()
}

/// Starting guess for a sample point below the critical fiber `f`.
fn sample_floor(f: &Fiber) -> Result<Rat> {
    let u0 = f.h.u0();
    Ok(vertex_intervals(f)?.iter().map(|iv| iv.lo().clone()).filter(|lo| *lo < f.u).max().unwrap_or(u0))
}

struct SlabProbe {
    sample: Fiber,
    lo: Rat,
    multiplicity: usize,
}

/// Sample strictly inside the slab just below `cur`, retrying closer to
/// `cur` whenever the sample's structure ends before reaching it.
fn probe_slab(cur: &Rat, floor: &Rat, h: &HeckeDatum, c: &mut usize) -> Result<SlabProbe> {
    let mut s = Rat::midpoint(floor, cur);
    for _ in 0..CAP {
        let sample = fiber_with_retry(&s, h, Some(*c), DOUBLINGS)?;
        *c = sample.vertex_count;
        let ivs = vertex_intervals(&sample)?;
        let lo = ivs.iter().map(|iv| iv.lo().clone()).max().unwrap_or(h.u0());
        let hi = ivs.iter().map(|iv| iv.hi().clone()).min().unwrap_or(Rat::one());
        if !(lo < s && s < hi) {
            // the sample sits on a critical temperament of its own
            s = Rat::midpoint(&s, cur);
            continue;
        }
        if hi < *cur {
            s = Rat::midpoint(&hi, cur);
            continue;
        }
        if hi > *cur {
            return Err(Error::Invariant(format!("sample u' = {s} extends past the critical temperament {cur}")));
        }
        let multiplicity = ivs.iter().filter(|iv| *iv.lo() == lo).count();
        return Ok(SlabProbe { sample, lo, multiplicity });
    }
    Err(Error::IterationCap(format!("sampling below u = {cur}")))
}

/// Sweep from `u = 1` down to `u_0`, producing every critical temperament,
/// the fibers there, and one sampled slab between each consecutive pair.
pub fn build_wtc(h: &HeckeDatum, c: Option<usize>) -> Result<WTComplex> {
    let mut c = c.unwrap_or(crate::hecketope::default_vertex_count(h.n));
    let u0 = h.u0();
    let top = fiber_with_retry(&Rat::one(), h, Some(c), DOUBLINGS)?;
    c = top.vertex_count;
    // collected top-down, reversed at the end
    let mut criticals = vec![Rat::one()];
    let mut multiplicity = vec![0];
    let mut fibers = vec![top];
    let mut slabs: Vec<(SlabProbe, Vec<Pencil>)> = Vec::new();
    let mut cur = Rat::one();
    while cur > u0 {
        let floor = sample_floor(fibers.last().unwrap())?;
        let sp = probe_slab(&cur, &floor, h, &mut c)?;
        let lo = sp.lo.clone();
        let fiber = fiber_with_retry(&lo, h, Some(c), DOUBLINGS)?;
        c = fiber.vertex_count;
        let pencils = sample_pencils(&sp.sample)?;
        criticals.push(lo.clone());
        multiplicity.push(sp.multiplicity);
        fibers.push(fiber);
        slabs.push((sp, pencils));
        cur = lo;
    }
    criticals.reverse();
    multiplicity.reverse();
    // the top fiber has no vertex ending at it from above
    multiplicity.rotate_left(1);
    fibers.reverse();
    slabs.reverse();
    let mut out = Vec::with_capacity(slabs.len());
    for (i, (sp, pencils)) in slabs.into_iter().enumerate() {
        let (below, above) = (&fibers[i], &fibers[i + 1]);
        let lo_attach = sp.sample.cells.iter().map(|cell| attach(&sp.sample, &pencils, cell, below)).collect::<Result<Vec<_>>>()?;
        let hi_attach = sp.sample.cells.iter().map(|cell| attach(&sp.sample, &pencils, cell, above)).collect::<Result<Vec<_>>>()?;
        out.push(Slab { lo: i, sample: sp.sample, pencils, lo_attach, hi_attach });
    }
    Ok(WTComplex { h: *h, vertex_count: c, criticals, multiplicity, fibers, slabs: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecketope::{default_vertex_count, fiber_cells};

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn pencil_reproduces_vertex_forms() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let m = vec![v(&[0, 1]), v(&[1, -1]), v(&[1, 0])];
        let PencilSolution::Pencil(p) = vertex_pencil(&m, &h).unwrap() else { panic!() };
        let u = Rat::new(1, 2);
        let z = p.at(&u);
        for x in &m {
            assert_eq!(weighted_length(&z, x, &u, &h), Rat::one());
        }
        assert_eq!(p.det_poly().eval(&u), z.det());
    }

    #[test]
    fn pinned_temperament_is_point_only() {
        // (1,0), (0,1), (1,1) fix Z(u'); (1,2) in M_0 then forces 4u' - 1 = 1
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let m = vec![v(&[0, 1]), v(&[1, 0]), v(&[1, 1]), v(&[1, 2])];
        assert_eq!(vertex_pencil(&m, &h).unwrap(), PencilSolution::PointOnly(Rat::new(1, 2)));
    }

    #[test]
    fn interval_of_a_generic_vertex() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let u = Rat::new(3, 4);
        let f = fiber_cells(&u, &h, default_vertex_count(2)).unwrap();
        for iv in vertex_intervals(&f).unwrap() {
            let VertexInterval::Interval { pencil, lo, lo_plus, hi, hi_plus } = iv else { panic!("point-only at generic u") };
            assert!(lo < u && u < hi, "{lo} {hi}");
            // just inside, nothing changes; at the ends the set grows
            for t in [Rat::midpoint(&lo, &u), Rat::midpoint(&u, &hi)] {
                assert_eq!(minimal_vectors(&pencil.at(&t), &t, &h).unwrap().vectors, pencil.m);
            }
            assert!(lo_plus.len() > pencil.m.len() || lo == h.u0());
            assert!(hi_plus.len() > pencil.m.len() || hi == Rat::one());
        }
    }

    #[test]
    fn m0_vertex_reaches_the_floor() {
        // at u_0 every minimal vector lies in M_0 and the pencil is constant
        let h = HeckeDatum::new(2, 3, 1).unwrap();
        let f = fiber_cells(&h.u0(), &h, default_vertex_count(2)).unwrap();
        let ivs = vertex_intervals(&f).unwrap();
        assert!(!ivs.is_empty());
        for iv in ivs {
            assert_eq!(*iv.lo(), h.u0());
        }
        assert_eq!(next_critical_below(&f).unwrap(), h.u0());
    }

    #[test]
    fn gl2_sweep() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let w = build_wtc(&h, None).unwrap();
        assert_eq!(w.criticals.first(), Some(&h.u0()));
        assert_eq!(w.criticals.last(), Some(&Rat::one()));
        assert!(w.criticals.len() >= 3, "{:?}", w.criticals);
        assert_eq!(w.slabs.len(), w.criticals.len() - 1);
        for s in &w.slabs {
            let (lo, hi) = (&w.criticals[s.lo], &w.criticals[s.lo + 1]);
            assert!(*lo < s.sample.u && s.sample.u < *hi);
            // fibers of the n = 2 sweep are trivalent trees in the open slabs
            for c in s.sample.cells.iter().filter(|c| c.dim == 0) {
                assert_eq!(c.m.len(), 3);
            }
        }
        // some interior critical fiber has a vertex of valence four
        let interior = &w.fibers[1..w.fibers.len() - 1];
        assert!(interior.iter().any(|f| f.cells.iter().any(|c| c.dim == 0 && c.m.len() == 4)));
    }
}
