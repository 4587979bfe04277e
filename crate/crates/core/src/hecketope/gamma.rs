//! The group `Gamma = GL_n(Z) ∩ a^{-1} GL_n(Z) a` acting on marked cells, and
//! orbit classification by exact transporter search.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactmath::Rat;
use crate::lattice::{in_m0, rank_of, Form, HeckeDatum, IntMat, LatVec};

/// A cell marked by its minimal vectors and a canonical witness form.
pub trait Marked {
    fn min_vectors(&self) -> &[LatVec];
    fn witness(&self) -> &Form;
    fn dim(&self) -> usize;
}

/// `det g = +-1` and `a g a^{-1}` integral.
pub fn gamma_member(g: &IntMat, h: &HeckeDatum) -> bool {
    if g.n() != h.n || g.det().abs() != 1 {
        return false;
    }
    let cut = h.n - h.k;
    (0..cut).all(|i| (cut..h.n).all(|j| g.get(i, j) % h.ell == 0))
}

/// `M g`, sign-normalized and sorted.
pub fn transform_set(m: &[LatVec], g: &IntMat) -> Vec<LatVec> {
    let mut out: Vec<LatVec> = m.iter().map(|x| x.mul_mat(g).normalized()).collect();
    out.sort();
    out
}

fn bilinear(z: &Form, x: &LatVec, y: &LatVec) -> Rat {
    let n = z.n();
    let mut acc = Rat::zero();
    for i in 0..n {
        if x.get(i) == 0 {
            continue;
        }
        for j in 0..n {
            if y.get(j) != 0 {
                acc += &(z.get(i, j) * &Rat::from_int(x.get(i) * y.get(j)));
            }
        }
    }
    acc
}

/// Invariants of a marked cell under `Gamma`, used to bucket candidates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellKey {
    dim: usize,
    size: usize,
    in_m0: usize,
    det: Rat,
    gram: Vec<Rat>,
}

pub fn cell_key(m: &[LatVec], z: &Form, dim: usize, h: &HeckeDatum) -> CellKey {
    let mut gram = Vec::with_capacity(m.len() * (m.len() + 1) / 2);
    for (i, x) in m.iter().enumerate() {
        for y in &m[i..] {
            gram.push(bilinear(z, x, y).abs());
        }
    }
    gram.sort();
    CellKey { dim, size: m.len(), in_m0: m.iter().filter(|x| in_m0(x, h)).count(), det: z.det(), gram }
}

/// Elements `gamma` of `Gamma` with `gamma . (m, z) = (m2, z2)`, i.e.
/// `m gamma^{-1} = m2` as sign-normalized sets and `gamma z gamma^t = z2`.
/// Returns at most one element unless `all` is set.
pub fn transporters(m: &[LatVec], z: &Form, m2: &[LatVec], z2: &Form, h: &HeckeDatum, all: bool) -> Vec<IntMat> {
    let n = h.n;
    if m.len() != m2.len() || z.det() != z2.det() {
        return Vec::new();
    }
    // an independent subset of m, in order
    let mut basis: Vec<LatVec> = Vec::with_capacity(n);
    for x in m {
        basis.push(*x);
        if rank_of(&basis) < basis.len() {
            basis.pop();
        }
        if basis.len() == n {
            break;
        }
    }
    if basis.len() < n {
        return Vec::new();
    }
    let targets: Vec<(LatVec, Rat, bool)> =
        m2.iter().flat_map(|y| [*y, y.neg()]).map(|y| (y, bilinear(z2, &y, &y), in_m0(&y, h))).collect();
    let cands: Vec<Vec<LatVec>> = basis
        .iter()
        .map(|b| {
            let zb = bilinear(z, b, b);
            let mb = in_m0(b, h);
            targets.iter().filter(|(_, zy, my)| *zy == zb && *my == mb).map(|(y, _, _)| *y).collect()
        })
        .collect();
    let gram: Vec<Vec<Rat>> = basis.iter().map(|x| basis.iter().map(|y| bilinear(z, x, y)).collect()).collect();
    let bmat = IntMat::from_vecs(&basis);
    let bdet = bmat.det();
    let badj = bmat.adjugate();
    let target_set: Vec<LatVec> = {
        let mut t = m2.to_vec();
        t.sort();
        t
    };

    let mut out = Vec::new();
    let mut chosen: Vec<LatVec> = Vec::with_capacity(n);
    let mut idx = vec![0usize; n];
    let mut level = 0usize;
    // iterative backtracking over candidate images of the basis
    loop {
        if idx[level] >= cands[level].len() {
            if level == 0 {
                break;
            }
            idx[level] = 0;
            level -= 1;
            chosen.pop();
            idx[level] += 1;
            continue;
        }
        let y = cands[level][idx[level]];
        let ok = chosen.iter().enumerate().all(|(j, yj)| bilinear(z2, &y, yj) == gram[level][j]);
        if !ok {
            idx[level] += 1;
            continue;
        }
        chosen.push(y);
        if level + 1 < n {
            level += 1;
            continue;
        }
        // leaf: g = B^{-1} Y must be integral and in Gamma
        if let Some(g) = solve_integral(&badj, bdet, &IntMat::from_vecs(&chosen)) {
            if gamma_member(&g, h) && transform_set(m, &g) == target_set {
                let gamma = g.inverse_int().expect("unimodular");
                if z.act(&gamma) == *z2 {
                    out.push(gamma);
                    if !all {
                        return out;
                    }
                }
            }
        }
        chosen.pop();
        idx[level] += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// `adj * y / det` when integral.
fn solve_integral(adj: &IntMat, det: i64, y: &IntMat) -> Option<IntMat> {
    let p = adj.mul(y);
    let n = p.n();
    let mut g = IntMat::zero(n);
    for i in 0..n {
        for j in 0..n {
            let v = p.get(i, j);
            if v % det != 0 {
                return None;
            }
            g.set(i, j, v / det);
        }
    }
    Some(g)
}

pub fn stabilizer(m: &[LatVec], z: &Form, h: &HeckeDatum) -> Vec<IntMat> {
    transporters(m, z, m, z, h, true)
}

/// Orbit representatives of a list of marked cells under `Gamma`.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    /// Indices (into the classified list) of the representatives.
    pub reps: Vec<usize>,
    /// For each cell, the position in `reps` of its representative.
    pub orbit_of: Vec<usize>,
    /// For each cell, `gamma` with `gamma . rep = cell`.
    pub transporter: Vec<IntMat>,
    /// Full stabilizer of each representative.
    pub stabilizers: Vec<Vec<IntMat>>,
}

pub fn gamma_classify<C: Marked>(cells: &[C], h: &HeckeDatum) -> OrbitTable {
    let mut buckets: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut orbit_of = Vec::with_capacity(cells.len());
    let mut transporter = Vec::with_capacity(cells.len());
    for (i, c) in cells.iter().enumerate() {
        let key = cell_key(c.min_vectors(), c.witness(), c.dim(), h);
        let bucket = buckets.entry(key).or_default();
        let mut found = None;
        for &r in bucket.iter() {
            let rc = &cells[reps[r]];
            if let Some(g) = transporters(rc.min_vectors(), rc.witness(), c.min_vectors(), c.witness(), h, false).pop() {
                found = Some((r, g));
                break;
            }
        }
        match found {
            Some((r, g)) => {
                orbit_of.push(r);
                transporter.push(g);
            }
            None => {
                bucket.push(reps.len());
                orbit_of.push(reps.len());
                transporter.push(IntMat::identity(h.n));
                reps.push(i);
            }
        }
    }
    let stabilizers = reps.iter().map(|&r| stabilizer(cells[r].min_vectors(), cells[r].witness(), h)).collect();
    OrbitTable { reps, orbit_of, transporter, stabilizers }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        assert!(gamma_member(&IntMat::identity(2), &h));
        assert!(!gamma_member(&IntMat::from_rows(&[&[1, 1], &[0, 1]]), &h));
        assert!(gamma_member(&IntMat::from_rows(&[&[1, 2], &[0, 1]]), &h));
        assert!(gamma_member(&IntMat::from_rows(&[&[1, 0], &[1, 1]]), &h));
        assert!(!gamma_member(&IntMat::diag(&[1, 2]), &h));
    }

    #[test]
    fn constructed_pair_is_recovered() {
        let h = HeckeDatum::new(3, 2, 1).unwrap();
        let m: Vec<LatVec> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0], [0, 1, -1], [1, 0, -1]]
            .iter()
            .map(|c| LatVec::new(c))
            .collect();
        // the form taking value 1 on every vector of m
        let half = Rat::new(1, 2);
        let z = Form::from_upper(3, vec![Rat::one(), half.clone(), half.clone(), Rat::one(), half, Rat::one()]);
        let gamma = IntMat::from_rows(&[&[1, 1, 2], &[0, 1, 0], &[1, 0, 3]]);
        assert!(gamma_member(&gamma, &h));
        let ginv = gamma.inverse_int().unwrap();
        let m2 = transform_set(&m, &ginv);
        let z2 = z.act(&gamma);
        let found = transporters(&m, &z, &m2, &z2, &h, false);
        assert_eq!(found.len(), 1);
        assert_eq!(transform_set(&m, &found[0].inverse_int().unwrap()), m2);
        assert_eq!(z.act(&found[0]), z2);
    }
}
