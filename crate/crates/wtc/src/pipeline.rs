//! Build, load, verify and tabulate, on top of the store.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use wtc_core::coefficients::{CoinducedModule, Nebentype};
use wtc_core::cohomology::gaussian_binomial;
use wtc_core::complex::boundary_matrices;
use wtc_core::exactmath::{CycloElem, Mat, Rat};
use wtc_core::hecke::{check_bijection, gl_complex, hecke_operator, level_report, Cohomology, Correspondence, LevelReport};
use wtc_core::lattice::HeckeDatum;
use wtc_core::temperament::build_wtc;

use crate::store::{self, StoreEntry};

/// Load the entry for `h` from `dir`, building and saving it first when it
/// is absent. A present file is never rebuilt; its hash is checked on load.
pub fn build(dir: &Path, h: &HeckeDatum, vertex_count: Option<usize>) -> Result<(StoreEntry, PathBuf, bool)> {
    let path = store::store_path(dir, h);
    if path.exists() {
        let e = store::load_file(&path).with_context(|| format!("loading {}", path.display()))?;
        return Ok((e, path, false));
    }
    let requested = vertex_count.unwrap_or(wtc_core::hecketope::default_vertex_count(h.n));
    let w = build_wtc(h, Some(requested)).with_context(|| format!("building T_{{{},{}}} for n = {}", h.ell, h.k, h.n))?;
    let corr = Correspondence::new(&w)?;
    corr.check()?;
    let entry = StoreEntry::new(&w, &corr, requested);
    let path = store::save(dir, &entry)?;
    Ok((entry, path, true))
}

/// Every `T_{l,k}`, `k = 1..n`, for each prime.
pub fn build_all(dir: &Path, n: usize, primes: &[i64], vertex_count: Option<usize>) -> Result<Vec<StoreEntry>> {
    let data: Vec<HeckeDatum> =
        primes.iter().flat_map(|&l| (1..=n).map(move |k| HeckeDatum::new(n, l, k))).collect::<wtc_core::Result<_>>()?;
    data.par_iter().map(|h| build(dir, h, vertex_count).map(|r| r.0)).collect()
}

fn report_for(eta: &Nebentype, n: usize, corrs: &[Correspondence]) -> Result<LevelReport> {
    let base = gl_complex(n)?;
    let refs: Vec<&Correspondence> = corrs.iter().collect();
    Ok(if eta.field() == 1 { level_report::<Rat>(eta, &base, &refs)? } else { level_report::<CycloElem>(eta, &base, &refs)? })
}

/// One row: every operator with `l` prime to the level.
pub fn hecke(entries: &[StoreEntry], eta: &Nebentype) -> Result<LevelReport> {
    let n = entries.first().map(|e| e.h.n).context("no correspondences")?;
    if entries.iter().all(|e| eta.level.is_multiple_of(e.h.ell as u64)) {
        bail!("every requested prime divides the level {}", eta.level);
    }
    let corrs: Vec<Correspondence> = entries.iter().map(StoreEntry::correspondence).collect();
    report_for(eta, n, &corrs)
}

/// Rows for all nebentypes up to Galois conjugacy at each level.
pub fn table(entries: &[StoreEntry], levels: &[u64]) -> Result<Vec<LevelReport>> {
    let n = entries.first().map(|e| e.h.n).context("no correspondences")?;
    let corrs: Vec<Correspondence> = entries.iter().map(StoreEntry::correspondence).collect();
    let mut etas = Vec::new();
    for &level in levels {
        etas.extend(Nebentype::up_to_galois(level)?);
    }
    etas.par_iter().map(|eta| report_for(eta, n, &corrs)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

fn check(name: &str, r: Result<String>) -> Check {
    match r {
        Ok(detail) => Check { name: name.into(), ok: true, detail },
        Err(e) => Check { name: name.into(), ok: false, detail: format!("{e:#}") },
    }
}

/// Structural checks of one stored correspondence. Hash and syntax were
/// already checked when the entry was loaded.
pub fn verify(entry: &StoreEntry) -> Vec<Check> {
    let h = entry.h;
    let corr = entry.correspondence();
    let trivial = Nebentype::trivial(1).expect("level 1");
    let rho = CoinducedModule::new(&trivial, h.n);
    let mut out = Vec::new();
    out.push(check("complexes", corr.check().map(|_| format!("{} fibers, {} slabs valid, equal Euler characteristics", corr.fibers.len(), corr.slabs.len())).map_err(Into::into)));
    out.push(check(
        "d^2 = 0",
        (|| {
            for cx in corr.fibers.iter().chain(&corr.slabs) {
                let d = boundary_matrices(cx);
                for (i, w) in d.windows(2).enumerate() {
                    if w[0].cols() > 0 && w[1].rows() > 0 && w[1].cols() > 0 && !w[0].mul(&w[1]).is_zero() {
                        bail!("boundary composition nonzero in degree {}", i + 1);
                    }
                }
            }
            Ok("all fibers and slabs".into())
        })(),
    ));
    let cohomology = (|| -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
        let f = corr.fibers.iter().map(|cx| Cohomology::<Rat>::new(cx.clone(), &rho).map(|c| c.h_dims())).collect::<wtc_core::Result<Vec<_>>>()?;
        let s = corr.slabs.iter().map(|cx| Cohomology::<Rat>::new(cx.clone(), &rho).map(|c| c.h_dims())).collect::<wtc_core::Result<Vec<_>>>()?;
        Ok((f, s))
    })();
    out.push(check(
        "fiber cohomology",
        cohomology.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")).and_then(|(f, _)| {
            let first = trimmed(&f[0]);
            if f.iter().any(|d| trimmed(d) != first) {
                bail!("dims differ across fibers: {f:?}");
            }
            Ok(format!("dim H^* = {first:?} on each of {} fibers", f.len()))
        }),
    ));
    let vcd = h.n * (h.n - 1) / 2;
    out.push(check(
        "slab H^{vcd+1} = 0",
        cohomology.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")).and_then(|(_, s)| {
            for (i, d) in s.iter().enumerate() {
                if d.iter().skip(vcd + 1).any(|&x| x != 0) {
                    bail!("slab {i} has dim H^* = {d:?}");
                }
            }
            Ok(format!("{} slabs, vcd = {vcd}", s.len()))
        }),
    ));
    let op = gl_complex(h.n).and_then(|b| Cohomology::<Rat>::new(b, &rho)).and_then(|base| hecke_operator(&corr, &base, &rho));
    out.push(check(
        "r* invertible",
        op.as_ref().map(|t| format!("every restriction to a critical fiber is an isomorphism; slab dims {:?}", t.slab_dims)).map_err(|e| anyhow::anyhow!("{e}")),
    ));
    out.push(check(
        "degree on H^0",
        (|| {
            let t = op.as_ref().map_err(|e| anyhow::anyhow!("{e}"))?;
            let want = gaussian_binomial(h.n, h.k, h.ell as u64);
            if t.matrices[0] != Mat::from_ints(&[&[want as i64]]) {
                bail!("T on H^0 is {:?}, expected {want}", t.matrices[0]);
            }
            Ok(format!("T = {want} sublattices"))
        })(),
    ));
    out.push(check("a-bijection", gl_complex(h.n).and_then(|b| check_bijection(&corr, &b)).map(|_| "u_0 fiber -> u = 1 fiber".to_string()).map_err(Into::into)));
    out.push(Check {
        name: "vertex count".into(),
        ok: true,
        detail: if entry.vertex_count == entry.requested_vertex_count {
            format!("{}", entry.vertex_count)
        } else {
            format!("{} (raised from requested {})", entry.vertex_count, entry.requested_vertex_count)
        },
    });
    out
}

fn trimmed(d: &[usize]) -> Vec<usize> {
    let mut v = d.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Serializable view of a report row.
#[derive(Serialize)]
pub struct RowJson {
    pub level: u64,
    pub eta: String,
    pub degrees: Vec<DegreeJson>,
    pub problems: Vec<String>,
}

#[derive(Serialize)]
pub struct DegreeJson {
    pub degree: usize,
    pub dim: usize,
    pub spaces: Vec<SpaceJson>,
}

#[derive(Serialize)]
pub struct SpaceJson {
    pub dim: usize,
    pub label: String,
    /// `(l, k, a_{l,k})`, the eigenvalue printed exactly.
    pub eigenvalues: Vec<(i64, usize, Option<String>)>,
}

impl From<&LevelReport> for RowJson {
    fn from(r: &LevelReport) -> RowJson {
        RowJson {
            level: r.level,
            eta: r.eta.clone(),
            problems: r.problems.clone(),
            degrees: r
                .degrees
                .iter()
                .map(|d| DegreeJson {
                    degree: d.degree,
                    dim: d.dim,
                    spaces: d
                        .spaces
                        .iter()
                        .map(|s| SpaceJson {
                            dim: s.dim,
                            label: s.label.clone(),
                            eigenvalues: s.eigenvalues.iter().map(|(l, k, a)| (*l, *k, a.as_ref().map(|x| x.to_string()))).collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
