//! On-disk classification cache: a header line, then one JSON record per line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use powercount::powerclass::{is_degenerate, power_profile};
use powercount::MonicPoly;

use crate::error::CliError;

pub const HEADER: &str = "powercount-cache v1";
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub schema: u32,
    pub q: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub poly: String,
    pub degree: usize,
    pub exponent: u64,
    pub m_power: bool,
    pub mstar_power: bool,
    /// Degrees `n` for which the polynomial is degenerate.
    pub degenerate: Vec<u64>,
    /// Factor degrees of `f(x^M)`.
    pub spectrum: Vec<usize>,
}

type Key = (u64, u64, String);

impl CacheRecord {
    /// Classifies an irreducible polynomial from scratch.
    pub fn compute(f: &MonicPoly, m: u64) -> powercount::Result<Self> {
        let prof = power_profile(f, m)?;
        let mut degenerate: Vec<u64> = Vec::new();
        for &d in &prof.spectrum {
            let d = d as u64;
            if d.is_multiple_of(f.degree() as u64) && !degenerate.contains(&d) && is_degenerate(f, m, d)? {
                degenerate.push(d);
            }
        }
        Ok(Self {
            schema: SCHEMA,
            q: f.q(),
            m,
            poly: f.to_text(),
            degree: f.degree(),
            exponent: f.exponent_of()?,
            m_power: prof.is_m_power,
            mstar_power: prof.is_mstar_power,
            degenerate,
            spectrum: prof.spectrum,
        })
    }

    fn key(&self) -> Key {
        (self.q, self.m, self.poly.clone())
    }
}

pub struct Cache {
    path: Option<PathBuf>,
    records: BTreeMap<Key, CacheRecord>,
    dirty: bool,
}

impl Cache {
    /// A cache that never reads or writes.
    pub fn disabled() -> Self {
        Self { path: None, records: BTreeMap::new(), dirty: false }
    }

    pub fn open(path: &Path) -> Result<Self, CliError> {
        let mut cache = Self { path: Some(path.to_path_buf()), records: BTreeMap::new(), dirty: false };
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(CliError::Io(format!("{}: {e}", path.display()))),
        };
        let mut lines = text.lines();
        if lines.next() != Some(HEADER) {
            return Err(CliError::Usage(format!("{}: missing header {HEADER:?}", path.display())));
        }
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let rec: CacheRecord = serde_json::from_str(line)
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 2)))?;
            cache.records.insert(rec.key(), rec);
        }
        Ok(cache)
    }

    pub fn is_enabled(&self) -> bool {
        self.path.is_some()
    }

    pub fn records(&self) -> impl Iterator<Item = &CacheRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Cached record, or a fresh computation that is stored for next time.
    pub fn classify(&mut self, f: &MonicPoly, m: u64) -> powercount::Result<CacheRecord> {
        let key = (f.q(), m, f.to_text());
        if let Some(hit) = self.records.get(&key) {
            return Ok(hit.clone());
        }
        let rec = CacheRecord::compute(f, m)?;
        if self.is_enabled() {
            self.records.insert(key, rec.clone());
            self.dirty = true;
        }
        Ok(rec)
    }

    pub fn clear(&mut self) {
        self.records.clear();
        self.dirty = true;
    }

    pub fn save(&mut self) -> Result<(), CliError> {
        let Some(path) = &self.path else { return Ok(()) };
        if !self.dirty {
            return Ok(());
        }
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut out = Vec::new();
        writeln!(out, "{HEADER}").map_err(io)?;
        for rec in self.records.values() {
            let line = serde_json::to_string(rec).expect("records serialize");
            writeln!(out, "{line}").map_err(io)?;
        }
        fs::write(path, out).map_err(io)?;
        self.dirty = false;
        Ok(())
    }

    /// Records that differ from recomputation, with the recomputed value.
    pub fn audit(&self) -> Vec<(CacheRecord, Result<CacheRecord, String>)> {
        self.records
            .values()
            .filter_map(|rec| {
                let fresh = MonicPoly::parse_text(&rec.poly)
                    .and_then(|f| CacheRecord::compute(&f, rec.m))
                    .map_err(|e| e.to_string());
                match &fresh {
                    Ok(r) if r == rec => None,
                    _ => Some((rec.clone(), fresh)),
                }
            })
            .collect()
    }
}
