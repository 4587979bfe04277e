use wtc_core::coefficients::{CoinducedModule, Nebentype};
use wtc_core::cohomology::cochain_complex;
use wtc_core::complex::boundary_matrices;
use wtc_core::exactmath::{CycloElem, Mat, Rat};
use wtc_core::hecke::{check_bijection, gl_complex, hecke_operator, Cohomology, Correspondence};
use wtc_core::lattice::HeckeDatum;
use wtc_core::temperament::build_wtc;

fn corr(n: usize, ell: i64, k: usize) -> Correspondence {
    let c = Correspondence::new(&build_wtc(&HeckeDatum::new(n, ell, k).unwrap(), None).unwrap()).unwrap();
    c.check().unwrap();
    c
}

fn small() -> Vec<Correspondence> {
    [(2, 2, 1), (2, 3, 1), (2, 5, 1), (2, 2, 2), (3, 2, 1), (3, 2, 2), (3, 2, 3)].iter().map(|&(n, l, k)| corr(n, l, k)).collect()
}

fn etas() -> Vec<Nebentype> {
    let mut out = vec![Nebentype::trivial(1).unwrap()];
    for level in [3, 4, 5, 7] {
        out.extend(Nebentype::up_to_galois(level).unwrap());
    }
    out
}

#[test]
fn boundaries_square_to_zero() {
    for c in small() {
        for cx in c.fibers.iter().chain(&c.slabs) {
            let d = boundary_matrices(cx);
            for w in d.windows(2) {
                if w[0].cols() > 0 && w[1].cols() > 0 && w[0].rows() > 0 {
                    assert!(w[0].mul(&w[1]).is_zero(), "{:?}", c.h);
                }
            }
        }
    }
}

#[test]
fn coboundaries_square_to_zero_with_nebentype() {
    for c in small() {
        for eta in etas() {
            let rho = CoinducedModule::new(&eta, c.h.n);
            for cx in c.fibers.iter().chain(&c.slabs) {
                let cc = cochain_complex::<CycloElem>(cx, &rho).unwrap();
                cc.complex.check_square_zero().unwrap();
                cc.validate(cx, &rho).unwrap();
            }
        }
    }
}

#[test]
fn slabs_vanish_above_vcd() {
    for c in small() {
        let vcd = c.h.n * (c.h.n - 1) / 2;
        for eta in etas() {
            let rho = CoinducedModule::new(&eta, c.h.n);
            let dims: Vec<Vec<usize>> = c.fibers.iter().map(|cx| Cohomology::<CycloElem>::new(cx.clone(), &rho).unwrap().h_dims()).collect();
            for s in &c.slabs {
                let d = Cohomology::<CycloElem>::new(s.clone(), &rho).unwrap().h_dims();
                assert!(d.iter().skip(vcd + 1).all(|&x| x == 0), "{:?} {} {d:?}", c.h, eta.label());
            }
            let trim = |v: &Vec<usize>| v.iter().copied().take(vcd + 1).collect::<Vec<_>>();
            assert!(dims.iter().all(|d| trim(d) == trim(&dims[0])), "{:?} {} {dims:?}", c.h, eta.label());
        }
    }
}

#[test]
fn hecke_matrices_commute() {
    let by_n = |n: usize| small().into_iter().filter(|c| c.h.n == n).collect::<Vec<_>>();
    for n in [2, 3] {
        let corrs = by_n(n);
        let base_cx = gl_complex(n).unwrap();
        for level in [1u64, 3, 5, 7] {
            for eta in if level == 1 { vec![Nebentype::trivial(1).unwrap()] } else { Nebentype::up_to_galois(level).unwrap() } {
                let rho = CoinducedModule::new(&eta, n);
                let base: Cohomology<CycloElem> = Cohomology::new(base_cx.clone(), &rho).unwrap();
                let ts: Vec<Vec<Mat<CycloElem>>> = corrs
                    .iter()
                    .filter(|c| level % c.h.ell as u64 != 0)
                    .map(|c| hecke_operator(c, &base, &rho).unwrap().matrices)
                    .collect();
                for a in &ts {
                    for b in &ts {
                        for (x, y) in a.iter().zip(b) {
                            if x.rows() > 0 {
                                assert_eq!(x.mul(y), y.mul(x), "n = {n}, {}", eta.label());
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn top_operator_is_the_character() {
    for (n, l) in [(2, 3), (3, 2)] {
        let c = corr(n, l, n);
        let base_cx = gl_complex(n).unwrap();
        for eta in Nebentype::up_to_galois(7).unwrap() {
            let rho = CoinducedModule::new(&eta, n);
            let base: Cohomology<CycloElem> = Cohomology::new(base_cx.clone(), &rho).unwrap();
            let want = eta.value(l).unwrap();
            for m in hecke_operator(&c, &base, &rho).unwrap().matrices {
                assert_eq!(m, Mat::identity(m.rows()).scale(&want));
            }
        }
    }
}

#[test]
fn bottom_fiber_maps_onto_top() {
    for c in small() {
        check_bijection(&c, &gl_complex(c.h.n).unwrap()).unwrap();
    }
}

#[test]
fn criticals_survive_doubling_the_vertex_count() {
    for (n, l, k) in [(2, 2, 1), (2, 3, 1), (2, 5, 1), (3, 2, 1), (3, 2, 2)] {
        let h = HeckeDatum::new(n, l, k).unwrap();
        let w = build_wtc(&h, None).unwrap();
        let w2 = build_wtc(&h, Some(2 * w.vertex_count)).unwrap();
        assert_eq!(w.criticals, w2.criticals, "{h:?}");
        assert_eq!(w.multiplicity, w2.multiplicity, "{h:?}");
        let orbits = |w: &wtc_core::temperament::WTComplex| Correspondence::new(w).unwrap().fibers.iter().map(|f| f.count_by_dim()).collect::<Vec<_>>();
        assert_eq!(orbits(&w), orbits(&w2));
    }
}

#[test]
fn rational_and_cyclotomic_agree_on_trivial_coefficients() {
    let c = corr(2, 2, 1);
    let rho = CoinducedModule::new(&Nebentype::trivial(11).unwrap(), 2);
    let base_cx = gl_complex(2).unwrap();
    let q: Vec<Mat<Rat>> = hecke_operator(&c, &Cohomology::new(base_cx.clone(), &rho).unwrap(), &rho).unwrap().matrices;
    let z: Vec<Mat<CycloElem>> = hecke_operator(&c, &Cohomology::new(base_cx, &rho).unwrap(), &rho).unwrap().matrices;
    for (a, b) in q.iter().zip(&z) {
        assert_eq!(a.charpoly().unwrap().coeffs().iter().map(|x| CycloElem::rational(x.clone())).collect::<Vec<_>>(), b.charpoly().unwrap().coeffs().to_vec());
    }
}
