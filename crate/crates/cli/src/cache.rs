//! Content-addressed on-disk cache of intersection lattices.
//!
//! One file per `(spec, level, max_codim)`, named by the SHA-256 of that
//! triple. The file lists one element per line with its provenance and ends
//! with a checksum of everything above it; a file that fails to parse or to
//! verify is discarded and the lattice recomputed.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use arrstab_core::arrangement::{build_lattice, Witness};
use arrstab_core::{ArrangementSpec, Injection, IntersectionLattice, MultiIndex, Subspace};
use log::{info, warn};
use sha2::{Digest, Sha256};

const MAGIC: &str = "# arrstab lattice v1";
const EXTENSION: &str = "lattice";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn sha256(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}

pub fn cache_key(spec: &ArrangementSpec, level: &MultiIndex, max_codim: usize) -> String {
    sha256(&format!("{}\n{}\n{}", spec.serialize(), level.render(), max_codim))
}

/// How a lattice was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// A cached file existed but was unreadable or failed its checksum.
    Corrupt,
}

pub struct LatticeCache {
    dir: PathBuf,
}

impl LatticeCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, spec: &ArrangementSpec, level: &MultiIndex, max_codim: usize) -> PathBuf {
        self.dir
            .join(format!("{}.{EXTENSION}", cache_key(spec, level, max_codim)))
    }

    pub fn get_or_build(
        &self,
        spec: &ArrangementSpec,
        level: &MultiIndex,
        max_codim: usize,
    ) -> arrstab_core::Result<(IntersectionLattice, Lookup)> {
        let path = self.path_for(spec, level, max_codim);
        let status = match fs::read_to_string(&path) {
            Ok(text) => match decode(&text, spec, level, max_codim) {
                Ok(lat) => {
                    info!("cache hit for level {level} ({})", path.display());
                    return Ok((lat, Lookup::Hit));
                }
                Err(why) => {
                    warn!("discarding cached lattice {}: {why}", path.display());
                    Lookup::Corrupt
                }
            },
            Err(_) => Lookup::Miss,
        };
        let lat = build_lattice(spec, level, max_codim)?;
        if let Err(e) = self.store(&path, &encode(spec, &lat)) {
            warn!("could not write {}: {e}", path.display());
        }
        Ok((lat, status))
    }

    fn store(&self, path: &Path, text: &str) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        // write-then-rename so a crash never leaves a half-written entry
        let tmp = path.with_extension(format!("{EXTENSION}.tmp{}", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)
    }

    /// Removes every cache entry; returns how many were deleted.
    pub fn clean(&self) -> io::Result<usize> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        let mut removed = 0;
        for entry in entries {
            let path = entry?.path();
            let name = entry_name(&path);
            let ours = name.ends_with(&format!(".{EXTENSION}"))
                || name.contains(&format!(".{EXTENSION}.tmp"));
            if ours {
                fs::remove_file(&path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

fn entry_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn encode(spec: &ArrangementSpec, lat: &IntersectionLattice) -> String {
    let mut body = format!(
        "{MAGIC}\nspec {}\nlevel {}\nmax_codim {}\nelements {}\n",
        spec.serialize(),
        lat.level().render(),
        lat.max_codim(),
        lat.len()
    );
    for (i, x) in lat.elements().iter().enumerate() {
        let witnesses: Vec<String> = lat
            .provenance(i)
            .iter()
            .map(|(g, f)| format!("{g}:{}", f.render()))
            .collect();
        body.push_str(&format!("{} {}\n", x.serialize(), witnesses.join(";")));
    }
    let sum = sha256(&body);
    body.push_str(&format!("checksum {sum}\n"));
    body
}

pub fn decode(
    text: &str,
    spec: &ArrangementSpec,
    level: &MultiIndex,
    max_codim: usize,
) -> Result<IntersectionLattice, String> {
    let (body, tail) = text
        .trim_end_matches('\n')
        .rsplit_once('\n')
        .ok_or("truncated file")?;
    let body = format!("{body}\n");
    let sum = tail.strip_prefix("checksum ").ok_or("missing checksum")?;
    if sum != sha256(&body) {
        return Err("checksum mismatch".into());
    }
    let mut lines = body.lines();
    let mut header = |key: &str| -> Result<String, String> {
        let line = lines.next().ok_or("truncated header")?;
        line.strip_prefix(key)
            .map(str::to_owned)
            .ok_or_else(|| format!("expected {key:?}"))
    };
    header(MAGIC)?;
    let checks = [
        (header("spec ")?, spec.serialize()),
        (header("level ")?, level.render()),
        (header("max_codim ")?, max_codim.to_string()),
    ];
    if let Some((found, want)) = checks.iter().find(|(a, b)| a != b) {
        return Err(format!("header {found:?} does not match {want:?}"));
    }
    let count: usize = header("elements ")?.parse().map_err(|_| "bad element count")?;
    let mut elements = Vec::with_capacity(count);
    for line in lines {
        let (x, witnesses) = line.split_once(' ').ok_or("malformed element line")?;
        let x = Subspace::parse(x).map_err(|e| e.to_string())?;
        let witnesses = witnesses
            .split(';')
            .filter(|w| !w.is_empty())
            .map(|w| -> Result<Witness, String> {
                let (g, f) = w.split_once(':').ok_or("malformed witness")?;
                let g = g.parse().map_err(|_| "bad generator index")?;
                let f = Injection::parse(level, f).map_err(|e| e.to_string())?;
                Ok((g, f))
            })
            .collect::<Result<Vec<_>, _>>()?;
        elements.push((x, witnesses));
    }
    if elements.len() != count {
        return Err(format!("expected {count} elements, found {}", elements.len()));
    }
    IntersectionLattice::from_parts(level.clone(), spec.r(), max_codim, elements)
        .map_err(|e| e.to_string())
}
