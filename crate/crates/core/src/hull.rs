//! Exact convex hulls of integer point sets (beneath-beyond / quickhull).
//!
//! Arithmetic runs in checked `i128` first and falls back to `BigInt` on
//! overflow, so results are always exact. Inputs may be highly degenerate
//! (many points per facet); facets are reported as true facets, each with
//! every input point lying on its hyperplane.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exactmath::Rat;
use crate::{Error, Result};

/// Integer arithmetic the hull needs; checked variants return `None` on
/// overflow.
trait HullInt: Clone + Eq + Ord + Debug {
    fn from_i64(v: i64) -> Self;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> i32;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl HullInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn signum(&self) -> i32 {
        i128::signum(*self) as i32
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        *self / *o
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl HullInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

type Ovf<T> = core::result::Result<T, Error>;

fn ck<T>(v: Option<T>) -> Ovf<T> {
    v.ok_or(Error::Overflow)
}

fn dot<T: HullInt>(a: &[T], b: &[T]) -> Ovf<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = ck(acc.add(&ck(x.mul(y))?))?;
    }
    Ok(acc)
}

/// Rank of a list of integer vectors (fraction-free elimination).
fn rank_of<T: HullInt>(rows: &[Vec<T>]) -> Ovf<usize> {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            for j in (c..cols).rev() {
                let a = ck(m[i][j].mul(&m[r][c]))?;
                let b = ck(m[i][c].mul(&m[r][j]))?;
                m[i][j] = ck(a.sub(&b))?;
            }
            let g = m[i].iter().fold(T::zero(), |g, v| g.gcd(v));
            if !g.is_zero() {
                for v in m[i].iter_mut() {
                    *v = v.div_exact(&g);
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    Ok(r)
}

/// Primitive normal of the hyperplane through `pts` (exactly `D` points in
/// `Z^D`): the kernel of the difference vectors, read off a fraction-free
/// Gauss-Jordan reduction.
fn hyperplane<T: HullInt>(pts: &[&[T]]) -> Ovf<(Vec<T>, T)> {
    let d = pts[0].len();
    let r = d - 1;
    let mut m: Vec<T> = Vec::with_capacity(r * d);
    for p in &pts[1..] {
        for (a, b) in p.iter().zip(pts[0]) {
            m.push(ck(a.sub(b))?);
        }
    }
    let mut prev = T::from_i64(1);
    let mut pivots: Vec<usize> = Vec::with_capacity(r);
    let mut free = None;
    let mut k = 0;
    for c in 0..d {
        if k == r {
            free.get_or_insert(c);
            break;
        }
        let Some(p) = (k..r).find(|&i| !m[i * d + c].is_zero()) else {
            if free.replace(c).is_some() {
                return Err(Error::DegenerateHull);
            }
            continue;
        };
        if p != k {
            for j in 0..d {
                m.swap(k * d + j, p * d + j);
            }
        }
        let piv = m[k * d + c].clone();
        for i in (0..r).filter(|&i| i != k) {
            let f = m[i * d + c].clone();
            for j in 0..d {
                let a = ck(m[i * d + j].mul(&piv))?;
                let b = ck(f.mul(&m[k * d + j]))?;
                m[i * d + j] = ck(a.sub(&b))?.div_exact(&prev);
            }
        }
        prev = piv;
        pivots.push(c);
        k += 1;
    }
    let f = free.ok_or(Error::DegenerateHull)?;
    if pivots.len() != r {
        return Err(Error::DegenerateHull);
    }
    // every pivot entry now equals the last pivot `prev`
    let mut nu = vec![T::zero(); d];
    nu[f] = prev;
    for (row, &c) in pivots.iter().enumerate() {
        nu[c] = m[row * d + f].neg();
    }
    let g = nu.iter().fold(T::zero(), |g, v| g.gcd(v));
    if !g.is_zero() {
        for v in nu.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
    let b = dot(&nu, pts[0])?;
    Ok((nu, b))
}

struct Facet<T> {
    verts: Vec<usize>,
    normal: Vec<T>,
    offset: T,
    neighbors: Vec<usize>,
    outside: Vec<usize>,
    alive: bool,
}

/// One facet of the hull: `<normal, p> >= offset` on the hull, with equality
/// exactly on `points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullFacet {
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
    /// Indices of all input points on the facet hyperplane, sorted.
    pub points: Vec<usize>,
}

impl HullFacet {
    pub fn normal_rat(&self) -> Vec<Rat> {
        self.normal.iter().map(|v| Rat::from_bigint(v.clone())).collect()
    }
}

/// Facets of the convex hull of full-dimensional integer points.
pub fn convex_hull(points: &[Vec<i64>]) -> Result<Vec<HullFacet>> {
    match hull_generic::<i128>(points) {
        Err(Error::Overflow) => hull_generic::<BigInt>(points),
        other => other,
    }
}

fn hull_generic<T: HullInt>(input: &[Vec<i64>]) -> Result<Vec<HullFacet>> {
    let d = input.first().map_or(0, |p| p.len());
    if d == 0 || input.len() < d + 1 {
        return Err(Error::DegenerateHull);
    }
    let pts: Vec<Vec<T>> = input.iter().map(|p| p.iter().map(|&v| T::from_i64(v)).collect()).collect();

    // initial simplex: greedy affinely independent points
    let mut simplex = vec![0usize];
    let mut diffs: Vec<Vec<T>> = Vec::new();
    for i in 1..pts.len() {
        if simplex.len() == d + 1 {
            break;
        }
        let diff: Vec<T> = pts[i].iter().zip(&pts[0]).map(|(a, b)| ck(a.sub(b))).collect::<Ovf<_>>()?;
        diffs.push(diff);
        if rank_of(&diffs)? == diffs.len() {
            simplex.push(i);
        } else {
            diffs.pop();
        }
    }
    if simplex.len() < d + 1 {
        return Err(Error::DegenerateHull);
    }
    // interior reference point, scaled by d + 1
    let mut interior = vec![T::zero(); d];
    for &s in &simplex {
        for (c, v) in interior.iter_mut().zip(&pts[s]) {
            *c = ck(c.add(v))?;
        }
    }
    let scale = T::from_i64(d as i64 + 1);

    let mut facets: Vec<Facet<T>> = Vec::new();
    let make = |verts: Vec<usize>, neighbors: Vec<usize>| -> Ovf<Facet<T>> {
        let refs: Vec<&[T]> = verts.iter().map(|&v| pts[v].as_slice()).collect();
        let (mut normal, mut offset) = hyperplane(&refs)?;
        let side = ck(dot(&normal, &interior)?.sub(&ck(offset.mul(&scale))?))?;
        if side.signum() < 0 {
            normal = normal.iter().map(|v| v.neg()).collect();
            offset = offset.neg();
        }
        Ok(Facet { verts, normal, offset, neighbors, outside: Vec::new(), alive: true })
    };
    for i in 0..=d {
        let verts: Vec<usize> = (0..=d).filter(|&j| j != i).map(|j| simplex[j]).collect();
        let neighbors: Vec<usize> = (0..=d).filter(|&j| j != i).collect();
        facets.push(make(verts, neighbors)?);
    }
    let outside_of = |f: &Facet<T>, p: usize| -> Ovf<bool> { Ok(dot(&f.normal, &pts[p])? < f.offset) };
    let in_simplex = |p: usize| simplex.contains(&p);
    for p in 0..pts.len() {
        if in_simplex(p) {
            continue;
        }
        for fi in 0..facets.len() {
            if outside_of(&facets[fi], p)? {
                facets[fi].outside.push(p);
                break;
            }
        }
    }

    let mut stack: Vec<usize> = (0..facets.len()).collect();
    let mut mark = vec![0u32; facets.len()];
    let mut epoch = 0u32;
    while let Some(fi) = stack.pop() {
        if !facets[fi].alive || facets[fi].outside.is_empty() {
            continue;
        }
        // furthest outside point
        let mut best: Option<(T, usize)> = None;
        for &p in &facets[fi].outside {
            let dist = ck(facets[fi].offset.sub(&dot(&facets[fi].normal, &pts[p])?))?;
            if best.as_ref().is_none_or(|(b, _)| dist > *b) {
                best = Some((dist, p));
            }
        }
        let apex = best.unwrap().1;

        // visible region
        epoch += 1;
        mark.resize(facets.len(), 0);
        let mut visible = vec![fi];
        mark[fi] = epoch;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut k = 0;
        while k < visible.len() {
            let v = visible[k];
            k += 1;
            for slot in 0..d {
                let nb = facets[v].neighbors[slot];
                if mark[nb] == epoch {
                    continue;
                }
                if outside_of(&facets[nb], apex)? {
                    mark[nb] = epoch;
                    visible.push(nb);
                } else {
                    horizon.push((v, slot));
                }
            }
        }
        // horizon entries whose neighbour later turned out visible are not horizon
        horizon.retain(|&(v, slot)| {
            let nb = facets[v].neighbors[slot];
            !visible.contains(&nb)
        });

        // new facets on the horizon ridges
        let mut ridge_map: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        let mut new_ids = Vec::with_capacity(horizon.len());
        for &(v, slot) in &horizon {
            let nb = facets[v].neighbors[slot];
            let mut verts: Vec<usize> = facets[v].verts.iter().enumerate().filter(|(i, _)| *i != slot).map(|(_, &x)| x).collect();
            verts.push(apex);
            let mut neighbors = vec![usize::MAX; d];
            neighbors[d - 1] = nb;
            let id = facets.len();
            facets.push(make(verts, neighbors)?);
            let back = facets[nb].neighbors.iter().position(|&x| x == v).expect("adjacency is symmetric");
            facets[nb].neighbors[back] = id;
            new_ids.push(id);
            for i in 0..d - 1 {
                let mut key: Vec<usize> = facets[id].verts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &x)| x).collect();
                key.sort_unstable();
                if let Some((other, oslot)) = ridge_map.remove(&key) {
                    facets[id].neighbors[i] = other;
                    facets[other].neighbors[oslot] = id;
                } else {
                    ridge_map.insert(key, (id, i));
                }
            }
        }
        if !ridge_map.is_empty() {
            return Err(Error::Invariant("hull horizon is not closed".into()));
        }
        // redistribute outside points
        let mut orphans = Vec::new();
        for &v in &visible {
            facets[v].alive = false;
            orphans.append(&mut facets[v].outside);
        }
        for p in orphans {
            if p == apex {
                continue;
            }
            for &id in &new_ids {
                if outside_of(&facets[id], p)? {
                    facets[id].outside.push(p);
                    break;
                }
            }
        }
        for &id in &new_ids {
            if !facets[id].outside.is_empty() {
                stack.push(id);
            }
        }
    }

    // merge coplanar simplices into true facets
    let mut groups: BTreeMap<(Vec<T>, T), ()> = BTreeMap::new();
    for f in facets.iter().filter(|f| f.alive) {
        groups.insert((f.normal.clone(), f.offset.clone()), ());
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((normal, offset), ()) in groups {
        let mut on = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            let v = dot(&normal, p)?;
            if v == offset {
                on.push(i);
            } else if v < offset {
                return Err(Error::Invariant("point outside final hull".into()));
            }
        }
        out.push(HullFacet { normal: normal.iter().map(|v| v.to_big()).collect(), offset: offset.to_big(), points: on });
    }
    Ok(out)
}

/// A face of a polytope given by its vertex-index set and dimension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Face {
    pub dim: usize,
    pub points: Vec<usize>,
}

/// All nonempty proper faces, as intersections of facet point sets. The
/// dimension of a face is the affine rank of its points. Intended for small
/// polytopes; callers with large hulls walk the lattice locally instead.
pub fn face_lattice(points: &[Vec<i64>], facets: &[HullFacet]) -> Vec<Face> {
    let mut seen: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    let mut frontier: Vec<Vec<usize>> = facets.iter().map(|f| f.points.clone()).collect();
    for f in &frontier {
        seen.insert(f.clone(), ());
    }
    while let Some(s) = frontier.pop() {
        for f in facets {
            let inter: Vec<usize> = s.iter().copied().filter(|i| f.points.binary_search(i).is_ok()).collect();
            if !inter.is_empty() && !seen.contains_key(&inter) {
                seen.insert(inter.clone(), ());
                frontier.push(inter);
            }
        }
    }
    let mut out: Vec<Face> = seen.into_keys().map(|s| Face { dim: affine_dim(points, &s), points: s }).collect();
    out.sort();
    out
}

/// Affine dimension of a subset of integer points.
pub fn affine_dim(points: &[Vec<i64>], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let p0 = &points[idx[0]];
    let diffs: Vec<Vec<BigInt>> =
        idx[1..].iter().map(|&i| points[i].iter().zip(p0).map(|(a, b)| BigInt::from(a - b)).collect()).collect();
    rank_of(&diffs).expect("bigint never overflows")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn faces_by_dim(points: &[Vec<i64>]) -> Vec<usize> {
        let facets = convex_hull(points).unwrap();
        let faces = face_lattice(points, &facets);
        let d = points[0].len();
        (0..d).map(|k| faces.iter().filter(|f| f.dim == k).count()).collect()
    }

    #[test]
    fn square_with_interior_points() {
        let mut pts = vec![vec![0, 0], vec![2, 0], vec![2, 2], vec![0, 2]];
        pts.push(vec![1, 1]);
        pts.push(vec![1, 0]);
        let facets = convex_hull(&pts).unwrap();
        assert_eq!(facets.len(), 4);
        assert!(facets.iter().any(|f| f.points == vec![0, 1, 5]));
        let faces = face_lattice(&pts, &facets);
        // vertices, edges; the midpoint (1,0) is on an edge but is not a vertex
        assert_eq!(faces.iter().filter(|f| f.dim == 0).count(), 4);
        assert_eq!(faces.iter().filter(|f| f.dim == 1).count(), 4);
    }

    #[test]
    fn simplex_and_cube() {
        let simplex = vec![vec![0, 0, 0], vec![3, 0, 0], vec![0, 5, 0], vec![0, 0, 7]];
        assert_eq!(faces_by_dim(&simplex), vec![4, 6, 4]);
        let mut cube = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    cube.push(vec![a, b, c]);
                }
            }
        }
        assert_eq!(faces_by_dim(&cube), vec![8, 12, 6]);
    }

    #[test]
    fn degenerate_input_is_reported() {
        let line = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        assert_eq!(convex_hull(&line), Err(Error::DegenerateHull));
    }

    #[test]
    fn bigint_fallback_agrees() {
        let big = 1i64 << 40;
        let pts = vec![vec![0, 0, 0], vec![big, 0, 0], vec![0, big, 0], vec![0, 0, big], vec![big, big, big]];
        let a = convex_hull(&pts).unwrap();
        let b = hull_generic::<BigInt>(&pts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
    }
}
