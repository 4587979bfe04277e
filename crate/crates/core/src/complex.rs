//! Oriented `Gamma`-equivariant cell complexes: fibers, the slabs between
//! consecutive critical fibers, and their orbit-level boundary data.
//!
//! A cell with minimal set `M` is oriented by the rref basis of its tangent
//! space `V_M = {nu : <nu, psi(x)> = 0 for x in M}`, in functional
//! coordinates. That basis depends only on the span of `psi(M)`, so a slab
//! cell and the end cell it closes onto share it. Incidences put the outward
//! normal first.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::exactmath::{Mat, Rat};
use crate::hecketope::{cell_facets, cell_key, gamma_classify, stabilizer, transform_set, transporters, CellKey, Fiber};
use crate::lattice::{psi_coords, sym_dim, Form, HeckeDatum, IntMat, LatVec};
use crate::temperament::WTComplex;
use crate::{Error, Result};

/// Orientation of a tangent space `V_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    /// Free columns of the rref of `psi(M)`; a vector of `V_M` is read off
    /// in the basis by its entries there.
    pub free: Vec<usize>,
    pub basis: Vec<Vec<Rat>>,
}

impl Orientation {
    pub fn of(m: &[LatVec], n: usize) -> Orientation {
        let e = sym_dim(n);
        let rows: Vec<Vec<Rat>> = m.iter().map(|x| psi_coords(x).into_iter().map(Rat::from_int).collect()).collect();
        let r = if rows.is_empty() { Mat::<Rat>::zeros(0, e).rref() } else { Mat::from_rows(rows).rref() };
        let free = (0..e).filter(|c| !r.pivots.contains(c)).collect();
        Orientation { free, basis: r.kernel }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, w: &[Rat]) -> Vec<Rat> {
        self.free.iter().map(|&c| w[c].clone()).collect()
    }
}

/// `g . nu`: the functional of `g Z g^t` where `nu` is that of `Z`.
pub fn act_functional(nu: &[Rat], g: &IntMat) -> Vec<Rat> {
    Form::from_functional(g.n(), nu).act(g).functional()
}

fn det_sign(cols: Vec<Vec<Rat>>) -> i32 {
    if cols.is_empty() {
        return 1;
    }
    let k = cols.len();
    Mat::from_cols(k, &cols).det().expect("square").signum()
}

/// Sign of `g` carrying the orientation `src` to `dst` (`g V_src = V_dst`).
pub fn transport_sign(src: &Orientation, g: &IntMat, dst: &Orientation) -> i32 {
    let s = det_sign(src.basis.iter().map(|b| dst.coords(&act_functional(b, g))).collect());
    assert!(s != 0, "transport does not map tangent spaces onto each other");
    s
}

/// `[sigma : tau]` for a codimension-one face, outward normal first.
pub fn incidence_sign(cell: &Orientation, z_cell: &Form, face: &Orientation, z_face: &Form) -> i32 {
    let normal = z_face.sub(z_cell).functional();
    let mut cols = Vec::with_capacity(cell.dim());
    cols.push(cell.coords(&normal));
    cols.extend(face.basis.iter().map(|b| cell.coords(b)));
    let s = det_sign(cols);
    assert!(s != 0, "degenerate incidence");
    s
}

/// Where a cell of a complex comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    Fiber,
    /// The critical fiber at the bottom of a slab.
    Lower,
    /// The critical fiber at the top of a slab.
    Upper,
    /// A sample cell swept across the open slab (one dimension up).
    Prism,
}

/// `sign * (gamma . face)`, in `face`'s orientation transported by `gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub face: usize,
    pub gamma: IntMat,
    pub sign: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedCell {
    pub m: Vec<LatVec>,
    pub dim: usize,
    pub witness: Form,
    pub layer: Layer,
    /// Orientation of the fiber directions; prisms add `d/du` last.
    pub orientation: Orientation,
    /// Stabilizer elements with their orientation characters.
    pub stabilizer: Vec<(IntMat, i32)>,
    pub boundary: Vec<Incidence>,
}

impl OrientedCell {
    /// No stabilizer element reverses the orientation.
    pub fn orientable(&self) -> bool {
        self.stabilizer.iter().all(|(_, s)| *s == 1)
    }
}

/// One representative per orbit of the acting group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqComplex {
    /// The acting group is `GL_n(Z) ∩ a^{-1} GL_n(Z) a` for this datum.
    pub group: HeckeDatum,
    pub cells: Vec<OrientedCell>,
}

impl EqComplex {
    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut out = alloc::vec![0; self.max_dim() + 1];
        for c in &self.cells {
            out[c.dim] += 1;
        }
        out
    }

    /// Orbifold Euler characteristic `sum (-1)^d / |Stab|`.
    pub fn euler(&self) -> Rat {
        let mut acc = Rat::zero();
        for c in &self.cells {
            let t = Rat::new(1, c.stabilizer.len() as i64);
            if c.dim % 2 == 0 {
                acc += &t;
            } else {
                acc -= &t;
            }
        }
        acc
    }
}

/// Representatives bucketed by their invariants, for transporter lookups.
pub struct RepIndex {
    group: HeckeDatum,
    buckets: BTreeMap<CellKey, Vec<usize>>,
}

impl RepIndex {
    pub fn new(cells: &[OrientedCell], group: &HeckeDatum) -> RepIndex {
        let mut buckets: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
        for (i, c) in cells.iter().enumerate() {
            if c.layer != Layer::Prism {
                buckets.entry(cell_key(&c.m, &c.witness, c.dim, group)).or_default().push(i);
            }
        }
        RepIndex { group: *group, buckets }
    }

    /// `(r, gamma)` with `gamma . cells[r]` the cell `(m, witness)`.
    pub fn find(&self, cells: &[OrientedCell], m: &[LatVec], witness: &Form, dim: usize) -> Option<(usize, IntMat)> {
        let key = cell_key(m, witness, dim, &self.group);
        for &r in self.buckets.get(&key)? {
            if let Some(g) = transporters(&cells[r].m, &cells[r].witness, m, witness, &self.group, false).pop() {
                return Some((r, g));
            }
        }
        None
    }
}

fn with_characters(m: &[LatVec], z: &Form, or: &Orientation, group: &HeckeDatum) -> Vec<(IntMat, i32)> {
    stabilizer(m, z, group).into_iter().map(|g| {
        let s = transport_sign(or, &g, or);
        (g, s)
    }).collect()
}

/// The fiber as a complex for `group` (the fiber's own `Gamma`, or
/// `GL_n(Z)` at `u = 1`).
pub fn fiber_complex(f: &Fiber, group: &HeckeDatum) -> Result<EqComplex> {
    let n = f.h.n;
    let reps: Vec<usize> = if *group == f.h { (0..f.cells.len()).collect() } else { gamma_classify(&f.cells, group).reps };
    let mut cells: Vec<OrientedCell> = reps
        .iter()
        .map(|&r| {
            let c = &f.cells[r];
            let orientation = Orientation::of(&c.m, n);
            OrientedCell {
                m: c.m.clone(),
                dim: c.dim,
                witness: c.witness.clone(),
                layer: Layer::Fiber,
                stabilizer: with_characters(&c.m, &c.witness, &orientation, group),
                orientation,
                boundary: Vec::new(),
            }
        })
        .collect();
    let index = RepIndex::new(&cells, group);
    for (i, &r) in reps.iter().enumerate() {
        let cell = &f.cells[r];
        let mut boundary = Vec::new();
        for face in cell_facets(f, cell) {
            let Some((t, gamma)) = index.find(&cells, &face.m, &face.witness, face.dim) else {
                return Err(Error::Invariant(format!("face {} of a fiber cell has no representative", crate::lattice::format_vec_set(&face.m))));
            };
            let own = Orientation::of(&face.m, n);
            let sign = incidence_sign(&cells[i].orientation, &cells[i].witness, &own, &face.witness)
                * transport_sign(&cells[t].orientation, &gamma, &own);
            boundary.push(Incidence { face: t, gamma, sign });
        }
        cells[i].boundary = boundary;
    }
    Ok(EqComplex { group: *group, cells })
}

/// The slab `W_[u^(i), u^(i+1)]`: both critical fibers (as given, in that
/// order) followed by one prism per sample cell.
pub fn slab_complex(w: &WTComplex, i: usize, lower: &EqComplex, upper: &EqComplex) -> Result<EqComplex> {
    let slab = &w.slabs[i];
    let h = w.h;
    let sample = fiber_complex(&slab.sample, &h)?;
    let (nl, nu) = (lower.cells.len(), upper.cells.len());
    let mut cells = Vec::with_capacity(nl + nu + sample.cells.len());
    for c in &lower.cells {
        cells.push(OrientedCell { layer: Layer::Lower, ..c.clone() });
    }
    for c in &upper.cells {
        let mut c = OrientedCell { layer: Layer::Upper, ..c.clone() };
        for b in c.boundary.iter_mut() {
            b.face += nl;
        }
        cells.push(c);
    }
    let base = nl + nu;
    for (j, c) in sample.cells.iter().enumerate() {
        let d = c.dim;
        let flip = if d % 2 == 0 { 1 } else { -1 };
        let mut boundary: Vec<Incidence> =
            c.boundary.iter().map(|b| Incidence { face: base + b.face, gamma: b.gamma, sign: b.sign }).collect();
        for (att, end, offset, sign) in [(&slab.hi_attach[j], upper, nl, flip), (&slab.lo_attach[j], lower, 0, -flip)] {
            if att.dim != d {
                continue;
            }
            let own = Orientation::of(&att.m, h.n);
            if own != c.orientation {
                return Err(Error::Invariant(String::from("end cell of a prism has a different tangent space")));
            }
            let t = transport_sign(&end.cells[att.rep].orientation, &att.gamma, &own);
            boundary.push(Incidence { face: offset + att.rep, gamma: att.gamma, sign: sign * t });
        }
        cells.push(OrientedCell { dim: d + 1, layer: Layer::Prism, boundary, ..c.clone() });
    }
    Ok(EqComplex { group: h, cells })
}

/// Orbit-level boundary matrices with trivial coefficients: `out[d]` maps
/// `d`-cells to `(d-1)`-cells (`out[0]` is empty). Orbits with an
/// orientation-reversing stabilizer carry zero rows and columns.
pub fn boundary_matrices(cx: &EqComplex) -> Vec<Mat<Rat>> {
    let top = cx.max_dim();
    let mut pos = alloc::vec![0usize; cx.cells.len()];
    let mut counts = alloc::vec![0usize; top + 1];
    for (i, c) in cx.cells.iter().enumerate() {
        pos[i] = counts[c.dim];
        counts[c.dim] += 1;
    }
    let mut out: Vec<Mat<Rat>> = (0..=top).map(|d| Mat::zeros(if d == 0 { 0 } else { counts[d - 1] }, counts[d])).collect();
    for (i, c) in cx.cells.iter().enumerate() {
        if c.dim == 0 || !c.orientable() {
            continue;
        }
        for b in &c.boundary {
            if cx.cells[b.face].orientable() {
                out[c.dim].add_at(pos[b.face], pos[i], &Rat::from_int(b.sign as i64));
            }
        }
    }
    out
}

/// Sparse `d i j v` lines of [`boundary_matrices`], sorted.
pub fn boundary_triplets(cx: &EqComplex) -> Vec<String> {
    let mut out = Vec::new();
    for (d, m) in boundary_matrices(cx).iter().enumerate() {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if !v.is_zero() {
                    out.push(format!("{d} {i} {j} {v}"));
                }
            }
        }
    }
    out
}

/// Problems found by [`validate`].
#[derive(Clone, Debug, Default)]
pub struct Validation {
    pub violations: Vec<String>,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `d^2 = 0` on actual cells, boundary dimensions, and the orientation
/// characters being homomorphisms.
pub fn validate(cx: &EqComplex) -> Validation {
    let n = cx.group.n;
    let mut v = Validation::default();
    for (i, c) in cx.cells.iter().enumerate() {
        for b in &c.boundary {
            if b.face >= cx.cells.len() || cx.cells[b.face].dim + 1 != c.dim {
                v.violations.push(format!("cell {i}: face {} has the wrong dimension", b.face));
            }
        }
        if c.dim > 0 && c.boundary.is_empty() && c.layer != Layer::Prism {
            v.violations.push(format!("cell {i}: empty boundary"));
        }
        if c.layer != Layer::Prism && c.dim + Orientation::of(&c.m, n).free.len() != c.dim * 2 {
            v.violations.push(format!("cell {i}: tangent space does not match dimension"));
        }
        for (g1, s1) in &c.stabilizer {
            for (g2, s2) in &c.stabilizer {
                let g = g1.mul(g2);
                match c.stabilizer.iter().find(|(x, _)| *x == g) {
                    Some((_, s)) if *s == s1 * s2 => {}
                    _ => v.violations.push(format!("cell {i}: orientation character is not a homomorphism")),
                }
            }
        }
    }
    if !v.ok() {
        return v;
    }
    // d^2 on actual cells: (rep, M gamma^{-1}, gamma . witness) -> coefficient
    for (i, c) in cx.cells.iter().enumerate() {
        let mut acc: BTreeMap<(usize, Vec<LatVec>, Form), i64> = BTreeMap::new();
        for b1 in &c.boundary {
            for b2 in &cx.cells[b1.face].boundary {
                let g = b1.gamma.mul(&b2.gamma);
                let rep = &cx.cells[b2.face];
                let m = transform_set(&rep.m, &g.inverse_int().expect("unimodular"));
                let own = Orientation::of(&m, n);
                let t = transport_sign(&rep.orientation, &g, &own);
                *acc.entry((b2.face, m, rep.witness.act(&g))).or_default() += (b1.sign * b2.sign * t) as i64;
            }
        }
        if acc.values().any(|&x| x != 0) {
            v.violations.push(format!("cell {i}: boundary of the boundary is nonzero"));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecketope::{default_vertex_count, fiber_cells};
    use crate::temperament::build_wtc;

    fn fiber(n: usize, ell: i64, k: usize, u: Rat) -> Fiber {
        let h = HeckeDatum::new(n, ell, k).unwrap();
        fiber_cells(&u, &h, default_vertex_count(n)).unwrap()
    }

    #[test]
    fn identity_preserves_orientation() {
        let m = [LatVec::new(&[1, 0, 0]), LatVec::new(&[0, 1, 0])];
        let o = Orientation::of(&m, 3);
        assert_eq!(o.dim(), 4);
        assert_eq!(transport_sign(&o, &IntMat::identity(3), &o), 1);
    }

    #[test]
    fn edge_flip_reverses_orientation() {
        // the n = 2 edge {(1,0),(0,1)} runs along the off-diagonal entry:
        // the swap fixes it pointwise, a sign change reverses it
        let m = [LatVec::new(&[0, 1]), LatVec::new(&[1, 0])];
        let o = Orientation::of(&m, 2);
        assert_eq!(o.dim(), 1);
        let swap = IntMat::from_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(transport_sign(&o, &swap, &o), 1);
        assert_eq!(transport_sign(&o, &IntMat::diag(&[-1, 1]), &o), -1);
    }

    #[test]
    fn vertices_are_always_positively_oriented() {
        let f = fiber(2, 2, 2, Rat::one());
        let cx = fiber_complex(&f, &f.h).unwrap();
        let v = cx.cells.iter().find(|c| c.dim == 0).unwrap();
        assert!(v.stabilizer.len() >= 6);
        assert!(v.orientable());
    }

    #[test]
    fn gl2_fiber_complex() {
        let f = fiber(2, 2, 2, Rat::one());
        let cx = fiber_complex(&f, &f.h).unwrap();
        assert!(validate(&cx).ok());
        assert_eq!(cx.count_by_dim(), [1, 1]);
        // the edge is flipped by its stabilizer, so it drops out rationally
        let e = cx.cells.iter().find(|c| c.dim == 1).unwrap();
        assert!(!e.orientable());
        assert!(boundary_matrices(&cx)[1].is_zero());
        // orbifold Euler characteristic of GL_2(Z): 1/12 - 1/8 = -1/24
        assert_eq!(cx.euler(), Rat::new(-1, 24));
    }

    #[test]
    fn gl3_fiber_complex() {
        let f = fiber(3, 2, 3, Rat::one());
        let cx = fiber_complex(&f, &f.h).unwrap();
        let report = validate(&cx);
        assert!(report.ok(), "{:?}", report.violations);
        // chi(GL_3(Z)) vanishes
        assert_eq!(cx.euler(), Rat::zero());
    }

    #[test]
    fn level_fibers_validate_and_share_euler_characteristic() {
        for (n, ell) in [(2, 3), (3, 2)] {
            let h = HeckeDatum::new(n, ell, 1).unwrap();
            let mut chis = Vec::new();
            for u in [Rat::one(), Rat::new(1, 2), h.u0()] {
                let cx = fiber_complex(&fiber(n, ell, 1, u), &h).unwrap();
                let report = validate(&cx);
                assert!(report.ok(), "{:?}", report.violations);
                chis.push(cx.euler());
            }
            assert!(chis.iter().all(|c| *c == chis[0]), "{chis:?}");
        }
    }

    #[test]
    fn gl_n_complex_of_a_level_fiber() {
        let f = fiber(3, 2, 1, Rat::one());
        let g0 = HeckeDatum::new(3, 2, 3).unwrap();
        let cx = fiber_complex(&f, &g0).unwrap();
        assert!(validate(&cx).ok());
        assert_eq!(cx.count_by_dim(), fiber_complex(&fiber(3, 2, 3, Rat::one()), &g0).unwrap().count_by_dim());
    }

    #[test]
    fn slabs_validate() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let w = build_wtc(&h, None).unwrap();
        let fibers: Vec<EqComplex> = w.fibers.iter().map(|f| fiber_complex(f, &h).unwrap()).collect();
        for i in 0..w.slabs.len() {
            let cx = slab_complex(&w, i, &fibers[i], &fibers[i + 1]).unwrap();
            let report = validate(&cx);
            assert!(report.ok(), "slab {i}: {:?}", report.violations);
            assert_eq!(cx.max_dim(), 2);
            // a slab retracts onto either of its fibers
            assert_eq!(cx.euler(), fibers[i].euler(), "slab {i}");
            assert_eq!(boundary_matrices(&cx)[1].mul(&boundary_matrices(&cx)[2]), Mat::zeros(cx.count_by_dim()[0], cx.count_by_dim()[2]));
        }
    }
}
