//! The `WTC/1` text store: the one-time artifact of a correspondence.
//!
//! ```text
//! WTC/1
//! n 3
//! ell 2
//! k 1
//! vertex_count 100
//! requested_vertex_count 100
//! version 0.1.0
//! CRITICAL <count>
//! <u> <multiplicity>
//! COMPLEX <fiber|slab> <index> <cells>
//! CELLS
//! C <i> dim=<d> layer=<layer> M={(..),..} Z=<upper triangle> free=<cols> basis=<row>;<row>
//! S <i> <±1> <g>
//! BOUNDARY
//! B <d> <i> <face> <±1> <gamma>
//! ORBITS <count per dim>
//! END
//! SHA256 <hex digest of every preceding byte>
//! ```
//!
//! Everything is written in construction order, which is canonical, so two
//! builds with equal parameters give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;
use wtc_core::complex::{EqComplex, Incidence, Layer, OrientedCell, Orientation};
use wtc_core::exactmath::Rat;
use wtc_core::hecke::Correspondence;
use wtc_core::cohomology::coset_representatives;
use wtc_core::lattice::{Form, HeckeDatum, IntMat, LatVec};
use wtc_core::temperament::WTComplex;

pub const FORMAT: &str = "WTC/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0}: no such store")]
    Missing(PathBuf),
    #[error("hash mismatch: recorded {recorded}, computed {computed}")]
    HashMismatch { recorded: String, computed: String },
    #[error("line {line}: {what}")]
    Syntax { line: usize, what: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The persisted part of a well-tempered complex: its critical temperaments
/// and the oriented orbit complexes of every critical fiber and slab.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreEntry {
    pub h: HeckeDatum,
    pub vertex_count: usize,
    /// The vertex count asked for; differs from `vertex_count` when some
    /// fiber failed to close and the build doubled it.
    pub requested_vertex_count: usize,
    pub version: String,
    pub criticals: Vec<Rat>,
    pub multiplicity: Vec<usize>,
    pub fibers: Vec<EqComplex>,
    pub slabs: Vec<EqComplex>,
}

impl StoreEntry {
    pub fn new(w: &WTComplex, corr: &Correspondence, requested: usize) -> StoreEntry {
        StoreEntry {
            h: w.h,
            vertex_count: w.vertex_count,
            requested_vertex_count: requested,
            version: VERSION.to_string(),
            criticals: w.criticals.clone(),
            multiplicity: w.multiplicity.clone(),
            fibers: corr.fibers.clone(),
            slabs: corr.slabs.clone(),
        }
    }

    pub fn correspondence(&self) -> Correspondence {
        Correspondence { h: self.h, fibers: self.fibers.clone(), slabs: self.slabs.clone(), cosets: coset_representatives(&self.h) }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let h = &self.h;
        let _ = writeln!(s, "{FORMAT}");
        let _ = writeln!(s, "n {}\nell {}\nk {}", h.n, h.ell, h.k);
        let _ = writeln!(s, "vertex_count {}\nrequested_vertex_count {}", self.vertex_count, self.requested_vertex_count);
        let _ = writeln!(s, "version {}", self.version);
        let _ = writeln!(s, "CRITICAL {}", self.criticals.len());
        for (u, m) in self.criticals.iter().zip(&self.multiplicity) {
            let _ = writeln!(s, "{} {m}", u.to_text());
        }
        for (kind, list) in [("fiber", &self.fibers), ("slab", &self.slabs)] {
            for (i, cx) in list.iter().enumerate() {
                write_complex(&mut s, kind, i, cx);
            }
        }
        let digest = hex::encode(Sha256::digest(s.as_bytes()));
        let _ = writeln!(s, "SHA256 {digest}");
        s
    }

    pub fn parse(text: &str) -> Result<StoreEntry, StoreError> {
        let body_end = text.rfind("SHA256 ").ok_or(StoreError::Syntax { line: 0, what: "no SHA256 line".into() })?;
        let recorded = text[body_end + 7..].trim().to_string();
        let computed = hex::encode(Sha256::digest(&text.as_bytes()[..body_end]));
        if recorded != computed {
            return Err(StoreError::HashMismatch { recorded, computed });
        }
        Parser { lines: text[..body_end].lines().enumerate().peekable() }.entry()
    }
}

fn layer_name(l: Layer) -> &'static str {
    match l {
        Layer::Fiber => "fiber",
        Layer::Lower => "lower",
        Layer::Upper => "upper",
        Layer::Prism => "prism",
    }
}

fn join<T: ToString>(v: impl IntoIterator<Item = T>, sep: &str) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn write_complex(s: &mut String, kind: &str, index: usize, cx: &EqComplex) {
    let _ = writeln!(s, "COMPLEX {kind} {index} {}", cx.cells.len());
    let _ = writeln!(s, "CELLS");
    for (i, c) in cx.cells.iter().enumerate() {
        let basis = join(c.orientation.basis.iter().map(|r| join(r.iter().map(Rat::to_text), ",")), ";");
        let _ = writeln!(
            s,
            "C {i} dim={} layer={} M={{{}}} Z={} free={} basis={basis}",
            c.dim,
            layer_name(c.layer),
            join(&c.m, ","),
            join(c.witness.upper().iter().map(Rat::to_text), ","),
            join(&c.orientation.free, ","),
        );
        for (g, eps) in &c.stabilizer {
            let _ = writeln!(s, "S {i} {} {g}", sign(*eps));
        }
    }
    let _ = writeln!(s, "BOUNDARY");
    for (i, c) in cx.cells.iter().enumerate() {
        for inc in &c.boundary {
            let _ = writeln!(s, "B {} {i} {} {} {}", c.dim, inc.face, sign(inc.sign), inc.gamma);
        }
    }
    let _ = writeln!(s, "ORBITS {}", join(cx.count_by_dim(), ","));
    let _ = writeln!(s, "END");
}

fn sign(s: i32) -> &'static str {
    if s > 0 {
        "+1"
    } else {
        "-1"
    }
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), StoreError> {
        self.lines.next().map(|(i, l)| (i + 1, l)).ok_or(StoreError::Syntax { line: 0, what: "unexpected end of store".into() })
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str), StoreError> {
        let (no, l) = self.next()?;
        match l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')) {
            Some(rest) => Ok((no, rest)),
            None if l == key => Ok((no, "")),
            None => Err(StoreError::Syntax { line: no, what: format!("expected {key}, found {l:?}") }),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, StoreError> {
        let (no, v) = self.keyed(key)?;
        v.trim().parse().map_err(|_| StoreError::Syntax { line: no, what: format!("bad {key}: {v:?}") })
    }

    fn entry(mut self) -> Result<StoreEntry, StoreError> {
        let (no, tag) = self.next()?;
        if tag != FORMAT {
            return Err(StoreError::Syntax { line: no, what: format!("unknown format tag {tag:?}") });
        }
        let n: usize = self.number("n")?;
        let ell: i64 = self.number("ell")?;
        let k: usize = self.number("k")?;
        let h = HeckeDatum::new(n, ell, k).map_err(|e| StoreError::Syntax { line: 2, what: e.to_string() })?;
        let vertex_count = self.number("vertex_count")?;
        let requested_vertex_count = self.number("requested_vertex_count")?;
        let version = self.keyed("version")?.1.to_string();
        let count: usize = self.number("CRITICAL")?;
        let mut criticals = Vec::with_capacity(count);
        let mut multiplicity = Vec::with_capacity(count);
        for _ in 0..count {
            let (no, l) = self.next()?;
            let (u, m) = l.split_once(' ').ok_or(StoreError::Syntax { line: no, what: "critical line".into() })?;
            criticals.push(syntax(no, u.parse::<Rat>())?);
            multiplicity.push(syntax(no, m.parse::<usize>())?);
        }
        let mut fibers = Vec::new();
        let mut slabs = Vec::new();
        while self.lines.peek().is_some() {
            let (no, head) = self.keyed("COMPLEX")?;
            let parts: Vec<&str> = head.split(' ').collect();
            let [kind, index, cells] = parts[..] else { return Err(StoreError::Syntax { line: no, what: "COMPLEX header".into() }) };
            let cells: usize = syntax(no, cells.parse())?;
            let index: usize = syntax(no, index.parse())?;
            let cx = self.complex(&h, cells)?;
            let list = match kind {
                "fiber" => &mut fibers,
                "slab" => &mut slabs,
                _ => return Err(StoreError::Syntax { line: no, what: format!("complex kind {kind:?}") }),
            };
            if list.len() != index {
                return Err(StoreError::Syntax { line: no, what: "complexes out of order".into() });
            }
            list.push(cx);
        }
        Ok(StoreEntry { h, vertex_count, requested_vertex_count, version, criticals, multiplicity, fibers, slabs })
    }

    fn complex(&mut self, h: &HeckeDatum, count: usize) -> Result<EqComplex, StoreError> {
        self.keyed("CELLS")?;
        let mut cells: Vec<OrientedCell> = Vec::with_capacity(count);
        loop {
            let (no, l) = self.next()?;
            if l == "BOUNDARY" {
                break;
            }
            if let Some(rest) = l.strip_prefix("C ") {
                cells.push(syntax(no, parse_cell(rest, h.n))?);
            } else if let Some(rest) = l.strip_prefix("S ") {
                let mut it = rest.splitn(3, ' ');
                let (i, eps, g) = (it.next(), it.next(), it.next());
                let i: usize = syntax(no, i.unwrap_or("").parse())?;
                let eps = syntax(no, parse_sign(eps.unwrap_or("")))?;
                let g: IntMat = syntax(no, g.unwrap_or("").parse())?;
                cells.get_mut(i).ok_or(StoreError::Syntax { line: no, what: "stabilizer of unknown cell".into() })?.stabilizer.push((g, eps));
            } else {
                return Err(StoreError::Syntax { line: no, what: format!("unexpected {l:?}") });
            }
        }
        loop {
            let (no, l) = self.next()?;
            if let Some(rest) = l.strip_prefix("ORBITS") {
                let cx = EqComplex { group: *h, cells };
                if rest.trim() != join(cx.count_by_dim(), ",") {
                    return Err(StoreError::Syntax { line: no, what: "orbit counts disagree with the cells".into() });
                }
                if cx.cells.len() != count {
                    return Err(StoreError::Syntax { line: no, what: "cell count disagrees with the header".into() });
                }
                self.keyed("END")?;
                return Ok(cx);
            }
            let rest = l.strip_prefix("B ").ok_or(StoreError::Syntax { line: no, what: format!("unexpected {l:?}") })?;
            let mut it = rest.splitn(5, ' ');
            let f: Vec<&str> = (0..5).map(|_| it.next().unwrap_or("")).collect();
            let i: usize = syntax(no, f[1].parse())?;
            let face: usize = syntax(no, f[2].parse())?;
            let sign = syntax(no, parse_sign(f[3]))?;
            let gamma: IntMat = syntax(no, f[4].parse())?;
            let cell = cells.get_mut(i).ok_or(StoreError::Syntax { line: no, what: "boundary of unknown cell".into() })?;
            if f[0] != cell.dim.to_string() {
                return Err(StoreError::Syntax { line: no, what: "boundary dimension disagrees with its cell".into() });
            }
            cell.boundary.push(Incidence { face, gamma, sign });
        }
    }
}

fn syntax<T, E: std::fmt::Display>(line: usize, r: Result<T, E>) -> Result<T, StoreError> {
    r.map_err(|e| StoreError::Syntax { line, what: e.to_string() })
}

fn parse_sign(s: &str) -> Result<i32, String> {
    match s {
        "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("sign {s:?}")),
    }
}

fn field<'a>(parts: &[&'a str], key: &str) -> Result<&'a str, String> {
    parts.iter().find_map(|p| p.strip_prefix(key).and_then(|r| r.strip_prefix('='))).ok_or_else(|| format!("missing {key}"))
}

fn rats(s: &str) -> Result<Vec<Rat>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.parse::<Rat>().map_err(|e| e.to_string())).collect()
}

fn parse_cell(rest: &str, n: usize) -> Result<OrientedCell, String> {
    let parts: Vec<&str> = rest.split(' ').collect();
    let dim = field(&parts, "dim")?.parse().map_err(|_| "dim".to_string())?;
    let layer = match field(&parts, "layer")? {
        "fiber" => Layer::Fiber,
        "lower" => Layer::Lower,
        "upper" => Layer::Upper,
        "prism" => Layer::Prism,
        other => return Err(format!("layer {other:?}")),
    };
    let m_text = field(&parts, "M")?;
    let inner = m_text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or("M braces")?;
    let mut m = Vec::new();
    if !inner.is_empty() {
        for piece in inner.split("),(") {
            let piece = format!("({})", piece.trim_start_matches('(').trim_end_matches(')'));
            m.push(piece.parse::<LatVec>().map_err(|e| e.to_string())?);
        }
    }
    let witness = Form::from_upper(n, rats(field(&parts, "Z")?)?);
    let free_text = field(&parts, "free")?;
    let free = if free_text.is_empty() {
        Vec::new()
    } else {
        free_text.split(',').map(|x| x.parse::<usize>().map_err(|_| "free".to_string())).collect::<Result<_, _>>()?
    };
    let basis_text = field(&parts, "basis")?;
    let basis = if basis_text.is_empty() { Vec::new() } else { basis_text.split(';').map(rats).collect::<Result<_, _>>()? };
    Ok(OrientedCell { m, dim, witness, layer, orientation: Orientation { free, basis }, stabilizer: Vec::new(), boundary: Vec::new() })
}

/// `<dir>/wtc-n<n>-l<ell>-k<k>.wtc`.
pub fn store_path(dir: &Path, h: &HeckeDatum) -> PathBuf {
    dir.join(format!("wtc-n{}-l{}-k{}.wtc", h.n, h.ell, h.k))
}

/// Write atomically: a temporary file in the same directory, then rename.
pub fn save(dir: &Path, entry: &StoreEntry) -> Result<PathBuf, StoreError> {
    fs::create_dir_all(dir)?;
    let path = store_path(dir, &entry.h);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(entry.to_text().as_bytes())?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(&path).map_err(|e| StoreError::Io(e.error))?;
    Ok(path)
}

pub fn load_file(path: &Path) -> Result<StoreEntry, StoreError> {
    if !path.exists() {
        return Err(StoreError::Missing(path.to_path_buf()));
    }
    StoreEntry::parse(&fs::read_to_string(path)?)
}

pub fn load(dir: &Path, h: &HeckeDatum) -> Result<StoreEntry, StoreError> {
    load_file(&store_path(dir, h))
}
