//! Argument parsing and the four commands.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wtc_core::coefficients::Nebentype;
use wtc_core::hecke::{render_table, LevelReport};
use wtc_core::lattice::HeckeDatum;

use crate::pipeline::{self, RowJson};
use crate::store;

#[derive(Parser, Debug)]
#[command(name = "wtc", version, about = "Well-tempered complexes and Hecke operators on GL_n(Z)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory holding `.wtc` store files.
    #[arg(long, global = true, default_value = "wtc-store")]
    pub store_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Datum {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Primes `l`, comma separated.
    #[arg(long = "ell", alias = "primes", value_delimiter = ',', default_value = "2")]
    pub primes: Vec<i64>,
    /// `k`; every `k = 1..n` when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    /// Hull sample size; doubled automatically if a fiber fails to close.
    #[arg(long)]
    pub vertex_count: Option<usize>,
}

impl Datum {
    fn data(&self) -> Result<Vec<HeckeDatum>> {
        let ks: Vec<usize> = match self.k {
            Some(k) => vec![k],
            None => (1..=self.n).collect(),
        };
        let mut out = Vec::new();
        for &l in &self.primes {
            for &k in &ks {
                out.push(HeckeDatum::new(self.n, l, k)?);
            }
        }
        Ok(out)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build (or load, if already stored) the well-tempered complexes.
    Build(Datum),
    /// Hecke eigenvalues and labels on H^*(Gamma_0(N); eta).
    Hecke {
        #[command(flatten)]
        datum: Datum,
        #[arg(long, default_value_t = 1)]
        level: u64,
        /// `triv`, `quad` or `chi^j`.
        #[arg(long, default_value = "triv")]
        nebentype: String,
        /// Only report these degrees.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
    },
    /// Re-check stored complexes: hash, structure, cohomology, bijection.
    Verify {
        #[command(flatten)]
        datum: Datum,
        /// Verify this file instead of looking one up.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Table rows for every level and nebentype up to Galois conjugacy.
    Table {
        #[command(flatten)]
        datum: Datum,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        levels: Vec<u64>,
    },
}

/// Run a command, writing results to `out`. `Ok(false)` means the command
/// ran but something failed to verify.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    if let Some(j) = cli.jobs {
        // a second call in one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let dir = &cli.store_dir;
    match &cli.command {
        Command::Build(d) => {
            let mut rows = Vec::new();
            for h in d.data()? {
                let (e, path, built) = pipeline::build(dir, &h, d.vertex_count)?;
                let orbits: Vec<Vec<usize>> = e.fibers.iter().map(|f| f.count_by_dim()).collect();
                rows.push(serde_json::json!({
                    "n": h.n, "ell": h.ell, "k": h.k,
                    "path": path.display().to_string(),
                    "built": built,
                    "vertex_count": e.vertex_count,
                    "criticals": e.criticals.iter().map(|u| u.to_text()).collect::<Vec<_>>(),
                    "fiber_orbits": orbits,
                }));
                if !cli.json {
                    writeln!(out, "{} T_{{{},{}}} n={}: {} critical temperaments, vertex count {} -> {}", if built { "built" } else { "loaded" }, h.ell, h.k, h.n, e.criticals.len(), e.vertex_count, path.display())?;
                }
            }
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
            }
            Ok(true)
        }
        Command::Hecke { datum, level, nebentype, degrees } => {
            for &l in &datum.primes {
                if level % l as u64 == 0 {
                    bail!("prime {l} divides the level {level}; T_{{{l},k}} is only defined for l prime to N");
                }
            }
            let eta = Nebentype::parse(*level, nebentype).with_context(|| format!("nebentype {nebentype:?} at level {level}"))?;
            let entries = load_or_build(dir, datum)?;
            let mut report = pipeline::hecke(&entries, &eta)?;
            if let Some(keep) = degrees {
                report.degrees.retain(|d| keep.contains(&d.degree));
            }
            print_rows(cli.json, out, std::slice::from_ref(&report), datum.n)?;
            Ok(report.problems.is_empty())
        }
        Command::Verify { datum, file } => {
            let entries = match file {
                Some(p) => vec![store::load_file(p).with_context(|| format!("verifying {}", p.display()))?],
                None => datum.data()?.iter().map(|h| store::load(dir, h).with_context(|| format!("loading T_{{{},{}}}", h.ell, h.k))).collect::<Result<_>>()?,
            };
            let mut all_ok = true;
            let mut json = Vec::new();
            for e in &entries {
                let checks = pipeline::verify(e);
                all_ok &= checks.iter().all(|c| c.ok);
                if cli.json {
                    json.push(serde_json::json!({"n": e.h.n, "ell": e.h.ell, "k": e.h.k, "hash": "ok", "checks": checks}));
                } else {
                    writeln!(out, "T_{{{},{}}} n={}: hash ok", e.h.ell, e.h.k, e.h.n)?;
                    for c in &checks {
                        writeln!(out, "  {} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail)?;
                    }
                }
            }
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
            }
            Ok(all_ok)
        }
        Command::Table { datum, levels } => {
            let entries = load_or_build(dir, datum)?;
            let rows = pipeline::table(&entries, levels)?;
            print_rows(cli.json, out, &rows, datum.n)?;
            Ok(rows.iter().all(|r| r.problems.is_empty()))
        }
    }
}

fn load_or_build(dir: &std::path::Path, d: &Datum) -> Result<Vec<store::StoreEntry>> {
    let data = d.data()?;
    use rayon::prelude::*;
    data.par_iter().map(|h| pipeline::build(dir, h, d.vertex_count).map(|r| r.0)).collect()
}

fn print_rows(json: bool, out: &mut dyn Write, rows: &[LevelReport], n: usize) -> Result<()> {
    if json {
        let v: Vec<RowJson> = rows.iter().map(RowJson::from).collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        return Ok(());
    }
    for r in rows {
        for d in &r.degrees {
            for s in &d.spaces {
                let ev: Vec<String> = s
                    .eigenvalues
                    .iter()
                    .map(|(l, k, a)| format!("T_{{{l},{k}}}={}", a.as_ref().map_or("?".to_string(), |x| x.pretty())))
                    .collect();
                writeln!(out, "N={} eta={} H^{} dim {}: {}  [{}]", r.level, r.eta, d.degree, s.dim, s.label, ev.join(" "))?;
            }
        }
        for p in &r.problems {
            writeln!(out, "N={} eta={} PROBLEM {p}", r.level, r.eta)?;
        }
    }
    write!(out, "{}", render_table(rows, n * (n - 1) / 2))?;
    Ok(())
}
