//! The fiber `W_u` of the well-tempered complex, read off the truncated
//! Hecketope by face duality.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ball::{hull_point, select_ball};
use super::gamma::{cell_key, transform_set, transporters, CellKey, Marked};
use crate::exactmath::{Mat, Rat};
use crate::hull::convex_hull;
use crate::lattice::{format_vec_set, minimal_vectors, psi_coords, rank_of, sym_dim, Form, HeckeDatum, LatVec};
use crate::{Error, Result};

/// A vertex of the fiber: a facet of the Hecketope, i.e. a form `Z` whose
/// weighted minimal vectors `m` determine it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub m: Vec<LatVec>,
    pub z: Form,
}

/// A cell `sigma_u(M)` of the fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCell {
    /// Minimal vectors, sign-normalized and sorted.
    pub m: Vec<LatVec>,
    pub dim: usize,
    /// Barycenter of the vertex forms; a relative-interior point whose
    /// minimal vectors are exactly `m`.
    pub witness: Form,
    /// Indices into [`Fiber::pool`].
    pub vertices: Vec<usize>,
}

impl Marked for FiberCell {
    fn min_vectors(&self) -> &[LatVec] {
        &self.m
    }
    fn witness(&self) -> &Form {
        &self.witness
    }
    fn dim(&self) -> usize {
        self.dim
    }
}

impl Marked for Vertex {
    fn min_vectors(&self) -> &[LatVec] {
        &self.m
    }
    fn witness(&self) -> &Form {
        &self.z
    }
    fn dim(&self) -> usize {
        0
    }
}

/// The cells of `W_u` around one vertex per `Gamma`-orbit.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub u: Rat,
    pub h: HeckeDatum,
    pub vertex_count: usize,
    /// False when the truncated hull did not certify a closed complex.
    pub closed: bool,
    pub detail: String,
    /// Certified vertices in the stars of the chosen vertex representatives.
    pub pool: Vec<Vertex>,
    /// Every cell containing one of the chosen vertex representatives.
    pub cells: Vec<FiberCell>,
}

/// Hull facets with lazily certified vertex forms.
#[derive(Default)]
struct Facets {
    m: Vec<Vec<LatVec>>,
    z: Vec<Option<Form>>,
    good: Vec<Option<bool>>,
    key: Vec<Option<CellKey>>,
}

impl Facets {
    fn push(&mut self, m: Vec<LatVec>, z: Option<Form>) {
        self.m.push(m);
        self.z.push(z);
        self.good.push(None);
        self.key.push(None);
    }

    /// `Z` is positive definite with weighted minimum 1 attained exactly on `m`.
    fn good(&mut self, i: usize, u: &Rat, h: &HeckeDatum) -> bool {
        if let Some(g) = self.good[i] {
            return g;
        }
        let g = match &self.z[i] {
            Some(z) => {
                rank_of(&self.m[i]) == h.n
                    && z.is_positive_definite()
                    && minimal_vectors(z, u, h).map(|r| r.m.is_one() && r.vectors == self.m[i]).unwrap_or(false)
            }
            None => false,
        };
        self.good[i] = Some(g);
        g
    }

    fn key(&mut self, i: usize, h: &HeckeDatum) -> &CellKey {
        if self.key[i].is_none() {
            self.key[i] = Some(cell_key(&self.m[i], self.z[i].as_ref().unwrap(), 0, h));
        }
        self.key[i].as_ref().unwrap()
    }

    fn same_orbit(&mut self, a: usize, b: usize, h: &HeckeDatum) -> bool {
        if self.m[a].len() != self.m[b].len() || self.z[b].is_none() {
            return false;
        }
        if self.key(a, h).clone() != *self.key(b, h) {
            return false;
        }
        let (za, zb) = (self.z[a].as_ref().unwrap(), self.z[b].as_ref().unwrap());
        !transporters(&self.m[a], za, &self.m[b], zb, h, false).is_empty()
    }
}

/// Rank of `{psi(x) : x in m}` in the space of symmetric matrices.
pub fn psi_rank(m: &[LatVec]) -> usize {
    if m.is_empty() {
        return 0;
    }
    Mat::from_rows(m.iter().map(|x| psi_coords(x).into_iter().map(Rat::from_int).collect()).collect()).rank()
}

fn intersect(a: &[LatVec], b: &[LatVec]) -> Vec<LatVec> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}

fn is_subset(a: &[LatVec], b: &[LatVec]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Barycenter of the vertex forms.
fn barycenter(pool: &[Vertex], idx: &[usize]) -> Form {
    let mut acc = Form::zero(pool[idx[0]].z.n());
    for &i in idx {
        acc = acc.add(&pool[i].z);
    }
    acc.scale(&Rat::new(1, idx.len() as i64))
}

/// Build the fiber at temperament `u` from a hull on `c` candidate vectors.
pub fn fiber_cells(u: &Rat, h: &HeckeDatum, c: usize) -> Result<Fiber> {
    if *u < h.u0() || *u > Rat::one() {
        return Err(Error::TemperamentOutOfRange(u.to_text()));
    }
    let n = h.n;
    let dim_e = sym_dim(n);
    let ball = select_ball(c, u, h)?;
    let points: Vec<Vec<i64>> = ball.iter().map(|x| hull_point(x, u, h)).collect();
    let hull = convex_hull(&points)?;
    let (p, _) = u.small_parts().expect("temperament fits in i64");
    let p = Rat::from_int(p);

    let mut facets = Facets::default();
    for f in &hull {
        let m: Vec<LatVec> = f.points.iter().map(|&i| ball[i]).collect();
        let offset = Rat::from_bigint(f.offset.clone());
        let z = offset.is_positive().then(|| {
            let scale = &p / &offset;
            let nu: Vec<Rat> = f.normal_rat().iter().map(|v| v * &scale).collect();
            Form::from_functional(n, &nu)
        });
        facets.push(m, z);
    }

    let mut search = Search { facets, through: BTreeMap::new(), n };
    for (i, m) in search.facets.m.iter().enumerate() {
        for x in m {
            search.through.entry(*x).or_default().push(i);
        }
    }

    // candidate vertices, central ones first: smallest largest minimal vector
    let fs = &search.facets;
    let mut order: Vec<usize> = (0..fs.m.len()).filter(|&i| fs.z[i].is_some() && rank_of(&fs.m[i]) == n).collect();
    order.sort_by_cached_key(|&i| (fs.m[i].iter().map(|x| x.dot(x)).max().unwrap_or(0), fs.m[i].clone()));

    let mut closed = true;
    let mut detail = String::new();
    let mut vreps: Vec<usize> = Vec::new();
    match order.iter().copied().find(|&i| search.facets.good(i, u, h)) {
        Some(v) => vreps.push(v),
        None => {
            closed = false;
            detail.push_str("no certified vertex; ");
        }
    }

    // one certified cell per orbit, as (m, holders)
    let mut reps: Vec<(Vec<LatVec>, Vec<usize>, Form)> = Vec::new();
    let mut buckets: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    let mut next = 0;
    while closed && next < vreps.len() {
        let v = vreps[next];
        next += 1;
        for face in search.faces_through(v) {
            let found = match search.certified(&face, u, h) {
                Some(holders) => Some((face.clone(), holders)),
                None => search.certified_translate(v, &face, &order, u, h),
            };
            let Some((m, holders)) = found else {
                closed = false;
                detail.push_str(&format!("cell {} has no certified translate; ", format_vec_set(&face)));
                break;
            };
            let zs: Vec<&Form> = holders.iter().map(|&f| search.facets.z[f].as_ref().unwrap()).collect();
            let witness = mean(&zs);
            let dim = dim_e - psi_rank(&m);
            let key = cell_key(&m, &witness, dim, h);
            let bucket = buckets.entry(key).or_default();
            if bucket.iter().any(|&r| !transporters(&reps[r].0, &reps[r].2, &m, &witness, h, false).is_empty()) {
                continue;
            }
            bucket.push(reps.len());
            for &f in &holders {
                if !vreps.iter().any(|&r| search.facets.same_orbit(r, f, h)) {
                    // prefer the most central member of the new orbit
                    let c = order.iter().copied().find(|&w| search.facets.same_orbit(f, w, h)).unwrap_or(f);
                    vreps.push(c);
                }
            }
            reps.push((m, holders, witness));
        }
    }

    let mut pool: Vec<Vertex> = Vec::new();
    let mut pool_index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cells: Vec<FiberCell> = Vec::new();
    if closed {
        for (m, holders, witness) in reps {
            let vertices = holders
                .iter()
                .map(|&f| {
                    *pool_index.entry(f).or_insert_with(|| {
                        pool.push(Vertex { m: search.facets.m[f].clone(), z: search.facets.z[f].clone().unwrap() });
                        pool.len() - 1
                    })
                })
                .collect();
            let dim = dim_e - psi_rank(&m);
            cells.push(FiberCell { m, dim, witness, vertices });
        }
    }
    cells.sort_by(|a, b| (a.dim, &a.m).cmp(&(b.dim, &b.m)));
    Ok(Fiber { u: u.clone(), h: *h, vertex_count: c, closed, detail, pool, cells })
}

fn mean(zs: &[&Form]) -> Form {
    let mut acc = Form::zero(zs[0].n());
    for z in zs {
        acc = acc.add(z);
    }
    acc.scale(&Rat::new(1, zs.len() as i64))
}

struct Search {
    facets: Facets,
    through: BTreeMap<LatVec, Vec<usize>>,
    n: usize,
}

impl Search {
    /// Minimal sets of the cells through vertex `v`: the faces of its dual
    /// facet whose vectors span.
    fn faces_through(&self, v: usize) -> Vec<Vec<LatVec>> {
        let mv = &self.facets.m[v];
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for x in mv {
            for &f in &self.through[x] {
                if f != v {
                    *count.entry(f).or_default() += 1;
                }
            }
        }
        let adjacent: Vec<Vec<LatVec>> = count
            .into_iter()
            .filter(|&(_, k)| k >= self.n)
            .map(|(f, _)| intersect(mv, &self.facets.m[f]))
            .filter(|t| rank_of(t) == self.n)
            .collect();
        let mut faces: BTreeSet<Vec<LatVec>> = BTreeSet::new();
        faces.insert(mv.clone());
        let mut frontier = alloc::vec![mv.clone()];
        while let Some(f) = frontier.pop() {
            for a in &adjacent {
                let t = intersect(&f, a);
                if t.len() < f.len() && rank_of(&t) == self.n && faces.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
        faces.into_iter().collect()
    }

    /// Hull facets containing every vector of `m`.
    fn holders(&self, m: &[LatVec]) -> Vec<usize> {
        match m.first().and_then(|x| self.through.get(x)) {
            Some(list) => list.iter().copied().filter(|&f| is_subset(m, &self.facets.m[f])).collect(),
            None => Vec::new(),
        }
    }

    /// The vertices of the cell `m` when all of them are certified.
    fn certified(&mut self, m: &[LatVec], u: &Rat, h: &HeckeDatum) -> Option<Vec<usize>> {
        let hs = self.holders(m);
        (!hs.is_empty() && hs.iter().all(|&f| self.facets.good(f, u, h))).then_some(hs)
    }

    /// A certified image `face * gamma^{-1}` of a cell through `v`, found by
    /// moving `v` onto other vertices of its orbit.
    fn certified_translate(
        &mut self,
        v: usize,
        face: &[LatVec],
        order: &[usize],
        u: &Rat,
        h: &HeckeDatum,
    ) -> Option<(Vec<LatVec>, Vec<usize>)> {
        for &w in order {
            if w == v || self.facets.m[w].len() != self.facets.m[v].len() {
                continue;
            }
            if self.facets.key(v, h).clone() != *self.facets.key(w, h) {
                continue;
            }
            let (zv, zw) = (self.facets.z[v].as_ref().unwrap(), self.facets.z[w].as_ref().unwrap());
            for g in transporters(&self.facets.m[v], zv, &self.facets.m[w], zw, h, true) {
                let m = transform_set(face, &g.inverse_int().expect("unimodular"));
                if let Some(hs) = self.certified(&m, u, h) {
                    return Some((m, hs));
                }
            }
        }
        None
    }
}

/// Codimension-one faces of a cell, computed from its vertices.
pub fn cell_facets(fiber: &Fiber, cell: &FiberCell) -> Vec<FiberCell> {
    let dim_e = sym_dim(fiber.h.n);
    let r = psi_rank(&cell.m);
    let mut extra: BTreeSet<LatVec> = BTreeSet::new();
    for &v in &cell.vertices {
        extra.extend(fiber.pool[v].m.iter().copied().filter(|x| cell.m.binary_search(x).is_err()));
    }
    let mut out: BTreeMap<Vec<LatVec>, FiberCell> = BTreeMap::new();
    for x in extra {
        let holders: Vec<usize> = cell.vertices.iter().copied().filter(|&v| fiber.pool[v].m.binary_search(&x).is_ok()).collect();
        let mut m = fiber.pool[holders[0]].m.clone();
        for &v in &holders[1..] {
            m = intersect(&m, &fiber.pool[v].m);
        }
        if out.contains_key(&m) || psi_rank(&m) != r + 1 {
            continue;
        }
        let vs: Vec<usize> = cell.vertices.iter().copied().filter(|&v| is_subset(&m, &fiber.pool[v].m)).collect();
        let witness = barycenter(&fiber.pool, &vs);
        out.insert(m.clone(), FiberCell { m, dim: dim_e - r - 1, witness, vertices: vs });
    }
    out.into_values().collect()
}

/// Fiber dump line: `CELL dim=<d> M={(..),(..)} u=<p/q>`.
pub fn dump_line(cell: &FiberCell, u: &Rat) -> String {
    format!("CELL dim={} M={} u={}", cell.dim, format_vec_set(&cell.m), u)
}

/// Build with the default vertex count, doubling on closure failure.
pub fn fiber_with_retry(u: &Rat, h: &HeckeDatum, start: Option<usize>, max_doublings: usize) -> Result<Fiber> {
    let mut c = start.unwrap_or(default_vertex_count(h.n));
    for _ in 0..=max_doublings {
        let f = fiber_cells(u, h, c)?;
        if f.closed {
            return Ok(f);
        }
        c *= 2;
    }
    Err(Error::ClosureFailure { vertex_count: c / 2, detail: format!("u = {u}") })
}

pub fn default_vertex_count(n: usize) -> usize {
    if n == 2 {
        60
    } else {
        100
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecketope::gamma_classify;
    use crate::lattice::{in_m0, IntMat};

    fn fiber(n: usize, ell: i64, k: usize, u: Rat) -> Fiber {
        let h = HeckeDatum::new(n, ell, k).unwrap();
        let f = fiber_cells(&u, &h, default_vertex_count(n)).unwrap();
        assert!(f.closed, "{}", f.detail);
        f
    }

    fn orbits_by_dim(f: &Fiber) -> Vec<usize> {
        let t = gamma_classify(&f.cells, &f.h);
        let mut out = alloc::vec![0; 4];
        for &r in &t.reps {
            out[f.cells[r].dim] += 1;
        }
        out
    }

    #[test]
    fn gl2_tree() {
        let f = fiber(2, 2, 2, Rat::one());
        assert_eq!(orbits_by_dim(&f), [1, 1, 0, 0]);
        let v = &f.cells[0];
        assert_eq!((v.dim, v.m.len()), (0, 3));
        assert_eq!(f.cells[1].m.len(), 2);
        // three edges at the vertex
        let edges = (0..3).filter(|&i| {
            let e: Vec<LatVec> = v.m.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| *x).collect();
            rank_of(&e) == 2
        });
        assert_eq!(edges.count(), 3);
    }

    #[test]
    fn level_two_orbits() {
        let f = fiber(2, 2, 1, Rat::one());
        assert_eq!(orbits_by_dim(&f), [1, 2, 0, 0]);
    }

    #[test]
    fn small_vertex_count_is_not_closed() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let f = fiber_cells(&Rat::one(), &h, 6).unwrap();
        assert!(!f.closed);
        assert!(fiber_with_retry(&Rat::one(), &h, Some(6), 2).unwrap().closed);
    }

    #[test]
    fn witnesses_certify_their_cells() {
        for (n, ell, u) in [(2, 3, Rat::new(1, 2)), (2, 5, Rat::new(1, 3)), (3, 2, Rat::new(1, 2))] {
            let f = fiber(n, ell, 1, u.clone());
            for c in &f.cells {
                let r = minimal_vectors(&c.witness, &u, &f.h).unwrap();
                assert!(r.m.is_one() && r.vectors == c.m, "{}", dump_line(c, &u));
                assert_eq!(c.dim, sym_dim(n) - psi_rank(&c.m));
            }
        }
    }

    fn check_bottom_is_top_times_a(n: usize, ell: i64, k: usize) {
        let top = fiber(n, ell, k, Rat::one());
        let h = top.h;
        let bottom = fiber(n, ell, k, h.u0());
        assert_eq!(orbits_by_dim(&top), orbits_by_dim(&bottom));
        for c in &bottom.cells {
            assert!(c.m.iter().all(|x| in_m0(x, &h)), "{}", dump_line(c, &h.u0()));
        }
        // Z -> a^{-1} Z a^{-t}, computed as (l a^{-1}) Z (l a^{-1})^t / l^2
        let la = IntMat::diag(&(0..n).map(|i| if i >= n - k { 1 } else { ell }).collect::<Vec<_>>());
        let s = Rat::new(1, ell * ell);
        for c in &top.cells {
            let m = transform_set(&c.m, &h.a());
            let z = c.witness.act(&la).scale(&s);
            let hit = bottom.cells.iter().any(|b| !transporters(&b.m, &b.witness, &m, &z, &h, false).is_empty());
            assert!(hit, "{}", dump_line(c, &Rat::one()));
        }
    }

    #[test]
    fn bottom_fiber_is_top_fiber_times_a() {
        check_bottom_is_top_times_a(2, 2, 1);
        check_bottom_is_top_times_a(2, 3, 1);
        check_bottom_is_top_times_a(3, 2, 1);
    }

    #[test]
    fn dump_format() {
        let f = fiber(2, 2, 2, Rat::one());
        assert_eq!(dump_line(&f.cells[1], &Rat::new(1, 4)).split(' ').next(), Some("CELL"));
        assert!(dump_line(&f.cells[0], &Rat::new(1, 4)).starts_with("CELL dim=0 M={("));
        assert!(dump_line(&f.cells[0], &Rat::new(1, 4)).ends_with(" u=1/4"));
    }
}
