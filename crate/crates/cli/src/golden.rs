//! Versioned store of recorded B_n results for regression checks.

use std::io::Write;
use std::path::Path;

use kmilnor::config::CONVENTION_VERSION;
use kmilnor::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Layout version of the store file itself.
pub const STORE_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub command: String,
    pub field: String,
    pub support: String,
    pub n: usize,
    pub convention: u32,
    pub value: Value,
}

impl GoldenEntry {
    fn same_key(&self, o: &GoldenEntry) -> bool {
        self.command == o.command && self.field == o.field && self.support == o.support && self.n == o.n
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldenStore {
    pub format: u32,
    pub entries: Vec<GoldenEntry>,
}

/// Outcome of checking one entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldenStatus {
    Match,
    Mismatch,
    /// Recorded under another convention version; not compared.
    Invalidated,
}

impl GoldenStore {
    pub fn new() -> Self {
        GoldenStore { format: STORE_FORMAT, entries: Vec::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        let store: GoldenStore =
            serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        if store.format != STORE_FORMAT {
            return Err(Error::invalid(format!("golden store format {} is not {STORE_FORMAT}", store.format)));
        }
        Ok(store)
    }

    /// Load, or start empty when the file does not exist.
    pub fn load_or_new(path: &Path) -> Result<Self> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::new())
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::invariant(e.to_string()))?;
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let io = |e: std::io::Error| Error::invalid(format!("{}: {e}", path.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.write_all(b"\n").map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Insert under the current convention, replacing an entry with the same key.
    pub fn record(&mut self, command: &str, field: &str, support: &str, n: usize, value: Value) {
        let e = GoldenEntry {
            command: command.into(),
            field: field.into(),
            support: support.into(),
            n,
            convention: CONVENTION_VERSION,
            value,
        };
        self.entries.retain(|o| !o.same_key(&e));
        self.entries.push(e);
    }

    /// Compare an entry against a fresh value.
    pub fn status(entry: &GoldenEntry, fresh: &Value) -> GoldenStatus {
        if entry.convention != CONVENTION_VERSION {
            GoldenStatus::Invalidated
        } else if &entry.value == fresh {
            GoldenStatus::Match
        } else {
            GoldenStatus::Mismatch
        }
    }
}
