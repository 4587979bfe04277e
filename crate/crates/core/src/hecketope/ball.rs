use alloc::vec::Vec;

use crate::exactmath::Rat;
use crate::lattice::{in_m0, psi_coords, short_vectors, sym_dim, Form, HeckeDatum, LatVec};
use crate::{Error, Result};

/// Shortest sign-normalized vectors of the lattice with Gram form `g`, at least
/// `want` of them, ties at the cut-off norm included.
fn shortest(g: &Form, want: usize) -> Result<Vec<(Rat, LatVec)>> {
    let mut bound = Rat::one();
    loop {
        let v = short_vectors(g, &bound)?;
        if v.len() >= want {
            let mut scored: Vec<(Rat, LatVec)> = v.into_iter().map(|x| (crate::lattice::eval_unchecked(g, &x), x)).collect();
            scored.sort();
            let cut = scored[want - 1].0.clone();
            scored.retain(|(r, _)| *r <= cut);
            return Ok(scored);
        }
        bound = &bound * &Rat::from_int(2);
    }
}

/// Score of `x`: sum of squares of the diagonal entries of `psi_u(x)`, read
/// in the coordinates of the reference form `diag(1,..,1,u,..,u)` (which is
/// well rounded at every temperament). At `u = 1` this is `sum x_i^4`.
pub fn ball_score(x: &LatVec, u: &Rat, h: &HeckeDatum) -> Rat {
    let cut = h.n - h.k;
    let mut s = Rat::zero();
    for (i, &v) in x.coords().iter().enumerate() {
        let d = Rat::from_int(v * v);
        let d = if i >= cut { &d * u } else { d };
        s += &(&d * &d);
    }
    if in_m0(x, h) {
        s
    } else {
        let w = u.recip().unwrap();
        &(&w * &w) * &s
    }
}

/// The candidate set `B` for the truncated hull at temperament `u`.
///
/// About `1.25c` shortest vectors of `L_0` and of `M_0` are pooled, scored by
/// [`ball_score`], and the best `c` kept (extended through ties). At `u = u_0`
/// a vector `x` outside `M_0` is dropped when `l x` is present, since both
/// give the same point `psi_u`.
pub fn select_ball(c: usize, u: &Rat, h: &HeckeDatum) -> Result<Vec<LatVec>> {
    let n = h.n;
    if c < sym_dim(n) + 1 {
        return Err(Error::Invariant(alloc::format!("vertex count {c} below {}", sym_dim(n) + 1)));
    }
    let want = (5 * c).div_ceil(4);
    let l1 = shortest(&Form::identity(n), want)?;
    let a = h.a();
    let a2: Vec<Rat> = (0..n).map(|i| Rat::from_int(a.get(i, i) * a.get(i, i))).collect();
    let l2: Vec<LatVec> = shortest(&Form::diag(&a2), want)?.into_iter().map(|(_, x)| x.mul_mat(&a)).collect();
    let mut pool: Vec<LatVec> = l1.into_iter().map(|(_, x)| x).filter(|x| !l2.contains(x)).collect();
    pool.extend(l2);
    let mut scored: Vec<(Rat, LatVec)> = pool.into_iter().map(|x| (ball_score(&x, u, h), x)).collect();
    scored.sort();
    let keep = c.min(scored.len());
    let cut = scored[keep - 1].0.clone();
    let mut out: Vec<LatVec> = scored.into_iter().filter(|(s, _)| *s <= cut).map(|(_, x)| x).collect();
    if *u == h.u0() {
        let snapshot = out.clone();
        out.retain(|x| in_m0(x, h) || !snapshot.contains(&x.scale(h.ell).normalized()));
    }
    out.sort();
    Ok(out)
}

/// Integer coordinates of `q * u * psi_u(x)` for `u = p/q`: `p psi(x)` on
/// `M_0`, `q psi(x)` off it.
pub fn hull_point(x: &LatVec, u: &Rat, h: &HeckeDatum) -> Vec<i64> {
    let (p, q) = u.small_parts().expect("temperament fits in i64");
    let s = if in_m0(x, h) { p } else { q };
    psi_coords(x).into_iter().map(|v| v * s).collect()
}
