//! The cochain maps making up a Hecke operator.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{EquivariantCochains, SparseMat};
use crate::coefficients::{CoinducedModule, Monomial};
use crate::complex::{transport_sign, EqComplex, Orientation, RepIndex};
use crate::exactmath::Field;
use crate::hecketope::transform_set;
use crate::lattice::{in_m0, HeckeDatum, IntMat, LatVec};
use crate::{Error, Result};

/// Number of `j`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, j: usize, q: u64) -> u64 {
    if j > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..j {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Row-reduced basis of the row span mod `p`.
fn rref_mod(rows: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let inv = |x: i64| (1..p).find(|y| (x * y).rem_euclid(p) == 1).unwrap();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let iv = inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = (*x * iv).rem_euclid(p);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - f * m[r][j]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Representatives `g` of `Gamma_0 / Gamma`, `Gamma_0 = GL_n(Z)`: `Gamma`
/// is the stabilizer of `W_0 = M_0 mod l`, and `g Gamma` corresponds to the
/// subspace `W_0 g^{-1}`.
pub fn coset_representatives(h: &HeckeDatum) -> Vec<IntMat> {
    let n = h.n;
    let p = h.ell;
    let w0: Vec<Vec<i64>> = (0..n - h.k).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut gens: Vec<IntMat> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                for s in [1, -1] {
                    let mut t = IntMat::identity(n);
                    t.set(i, j, s);
                    gens.push(t);
                }
            }
        }
    }
    let mut flip = IntMat::identity(n);
    flip.set(0, 0, -1);
    gens.push(flip);
    let times = |w: &[Vec<i64>], t: &IntMat| -> Vec<Vec<i64>> {
        let rows: Vec<Vec<i64>> = w.iter().map(|r| LatVec::new(r).mul_mat(t).coords().to_vec()).collect();
        rref_mod(&rows, p)
    };
    let start = rref_mod(&w0, p);
    let mut seen: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    seen.insert(start.clone());
    let mut out = vec![IntMat::identity(n)];
    let mut queue = VecDeque::from([(start, IntMat::identity(n))]);
    while let Some((w, g)) = queue.pop_front() {
        for t in &gens {
            let w2 = times(&w, t);
            if seen.insert(w2.clone()) {
                let g2 = t.inverse_int().expect("unimodular").mul(&g);
                out.push(g2);
                queue.push_back((w2, g2));
            }
        }
    }
    out
}

/// Coordinate projection of slab cochains onto the end fiber whose cells
/// start at `first` in the slab's cell list.
pub fn restriction<F: Field>(slab: &EquivariantCochains<F>, fiber: &EquivariantCochains<F>, first: usize, i: usize) -> Result<SparseMat<F>> {
    let mut out = SparseMat::zeros(fiber.complex.dims[i], slab.complex.dims.get(i).copied().unwrap_or(0));
    for (s, fb) in fiber.blocks.iter().enumerate() {
        let sb = &slab.blocks[first + s];
        if sb.degree != fb.degree || sb.rank() != fb.rank() {
            return Err(Error::Invariant(format!("slab block {} differs from its fiber block", first + s)));
        }
        if fb.degree == i {
            for k in 0..fb.rank() {
                out.columns[sb.offset + k].push((fb.offset + k, F::one()));
            }
        }
    }
    Ok(out)
}

fn accumulate<F: Field>(acc: &mut [BTreeMap<usize, F>], col: usize, row0: usize, coords: Vec<F>) {
    for (k, x) in coords.into_iter().enumerate() {
        if !x.is_zero() {
            let e = acc[col].entry(row0 + k).or_insert_with(F::zero);
            *e = e.plus(&x);
        }
    }
}

fn scaled<F: Field>(v: Vec<F>, s: i32) -> Vec<F> {
    if s == 1 {
        v
    } else {
        v.into_iter().map(|x| x.negate()).collect()
    }
}

/// `x a^{-1}`, using `l x` for the tie partners outside `M_0` at `u_0`.
pub fn divide_set(m: &[LatVec], h: &HeckeDatum) -> Result<Vec<LatVec>> {
    let mut out = Vec::with_capacity(m.len());
    for x in m {
        let y = if in_m0(x, h) { *x } else { x.scale(h.ell) };
        let z = h.divide_by_a(&y).ok_or_else(|| Error::Invariant(format!("{x} a^-1 is not integral")))?;
        out.push(z.normalized());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `q^* : C^i_{Gamma_0}(X_1) -> C^i_Gamma(X_{u_0})`,
/// `(q^* f)(sigma) = rho(a^{-1}) f(a . sigma)`.
pub fn pullback_q<F: Field>(
    base: &EqComplex,
    base_c: &EquivariantCochains<F>,
    bottom: &EqComplex,
    bottom_c: &EquivariantCochains<F>,
    rho: &CoinducedModule,
    h: &HeckeDatum,
    i: usize,
) -> Result<SparseMat<F>> {
    let n = h.n;
    let a = h.a();
    let a_inv: Monomial = rho.action_a_inverse(h);
    let index = RepIndex::new(&base.cells, &base.group);
    let rows = bottom_c.complex.dims[i];
    let mut acc: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); base_c.complex.dims[i]];
    for (s, c) in bottom.cells.iter().enumerate() {
        let bs = &bottom_c.blocks[s];
        if c.dim != i || bs.rank() == 0 {
            continue;
        }
        let m = divide_set(&c.m, h)?;
        let z = c.witness.act(&a);
        let (t, g) = index
            .find(&base.cells, &m, &z, c.dim)
            .ok_or_else(|| Error::Invariant(format!("a . sigma for {} is not a cell at u = 1", crate::lattice::format_vec_set(&c.m))))?;
        let own = Orientation::of(&m, n);
        let sign = transport_sign(&c.orientation, &a, &own) * transport_sign(&base.cells[t].orientation, &g, &own);
        let rg = rho.action(&g);
        let bt = &base_c.blocks[t];
        for (j, v) in bt.basis.iter().enumerate() {
            let w = scaled(a_inv.apply(&rg.apply(v)), sign);
            accumulate(&mut acc, bt.offset + j, bs.offset, bs.coords(&w));
        }
    }
    Ok(SparseMat::from_accumulators(rows, acc))
}

/// The transfer `p_* : C^i_Gamma(X_1) -> C^i_{Gamma_0}(X_1)`,
/// `(p_* f)(sigma) = sum_{g in Gamma_0/Gamma} rho(g) f(g^{-1} sigma)`.
#[allow(clippy::too_many_arguments)]
pub fn transfer_p<F: Field>(
    base: &EqComplex,
    base_c: &EquivariantCochains<F>,
    top: &EqComplex,
    top_c: &EquivariantCochains<F>,
    cosets: &[IntMat],
    rho: &CoinducedModule,
    i: usize,
) -> Result<SparseMat<F>> {
    let n = base.group.n;
    let index = RepIndex::new(&top.cells, &top.group);
    let rows = base_c.complex.dims[i];
    let mut acc: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); top_c.complex.dims[i]];
    let inverses: Vec<IntMat> = cosets.iter().map(|g| g.inverse_int().expect("unimodular")).collect();
    let actions: Vec<Monomial> = cosets.iter().map(|g| rho.action(g)).collect();
    for (s, c) in base.cells.iter().enumerate() {
        let bs = &base_c.blocks[s];
        if c.dim != i || bs.rank() == 0 {
            continue;
        }
        for (k, g_inv) in inverses.iter().enumerate() {
            let m = transform_set(&c.m, &cosets[k]);
            let z = c.witness.act(g_inv);
            let (t, gamma) = index
                .find(&top.cells, &m, &z, c.dim)
                .ok_or_else(|| Error::Invariant(format!("translate of {} has no representative", crate::lattice::format_vec_set(&c.m))))?;
            let own = Orientation::of(&m, n);
            let sign = transport_sign(&c.orientation, g_inv, &own) * transport_sign(&top.cells[t].orientation, &gamma, &own);
            let rgam = rho.action(&gamma);
            let bt = &top_c.blocks[t];
            for (j, v) in bt.basis.iter().enumerate() {
                let w = scaled(actions[k].apply(&rgam.apply(v)), sign);
                accumulate(&mut acc, bt.offset + j, bs.offset, bs.coords(&w));
            }
        }
    }
    Ok(SparseMat::from_accumulators(rows, acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coset_counts_match_subspace_counts() {
        for (n, ell, k, want) in [(2, 2, 1, 3), (2, 3, 1, 4), (3, 2, 1, 7), (3, 2, 2, 7), (3, 3, 1, 13), (3, 5, 2, 31), (3, 2, 3, 1)] {
            let h = HeckeDatum::new(n, ell, k).unwrap();
            let cs = coset_representatives(&h);
            assert_eq!(cs.len() as u64, want, "{n} {ell} {k}");
            assert_eq!(gaussian_binomial(n, n - k, ell as u64), want);
            for g in &cs {
                assert_eq!(g.det().abs(), 1);
            }
        }
    }

    #[test]
    fn cosets_are_distinct() {
        use crate::hecketope::gamma_member;
        let h = HeckeDatum::new(3, 2, 1).unwrap();
        let cs = coset_representatives(&h);
        for (i, g) in cs.iter().enumerate() {
            for g2 in &cs[..i] {
                assert!(!gamma_member(&g2.inverse_int().unwrap().mul(g), &h));
            }
        }
    }

    #[test]
    fn tie_partners_divide() {
        let h = HeckeDatum::new(2, 2, 1).unwrap();
        let m = [LatVec::new(&[1, 0]), LatVec::new(&[0, 2]), LatVec::new(&[1, 1])];
        let d = divide_set(&m, &h).unwrap();
        assert_eq!(d, [LatVec::new(&[0, 1]), LatVec::new(&[1, 0]), LatVec::new(&[2, 1])]);
    }
}
