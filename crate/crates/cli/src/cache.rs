//! On-disk cache of truncated K-groups, one JSON file per (field, S, m).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use kmilnor::config::{Caps, CONVENTION_VERSION};
use kmilnor::fields::Support;
use kmilnor::milnor::{KGroupData, KGroupProvider, MemoryKGroups, TruncatedKGroup};
use kmilnor::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
struct CacheFile {
    convention: u32,
    field: String,
    support: String,
    degree: usize,
    data: KGroupData,
}

/// A [`KGroupProvider`] backed by memory and a directory of JSON files.
///
/// Files are written once per key through an atomic rename; unreadable or
/// stale files are recomputed and replaced.
#[derive(Debug)]
pub struct DiskKGroups {
    dir: PathBuf,
    memory: MemoryKGroups,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl DiskKGroups {
    pub fn new(dir: impl Into<PathBuf>, caps: Caps) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        Ok(DiskKGroups { dir, memory: MemoryKGroups::new(caps), hits: AtomicUsize::new(0), misses: AtomicUsize::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Loads served from disk.
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    /// Groups computed because no usable file existed.
    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    /// File holding the group for `(support, degree)`.
    pub fn path_for(&self, support: &Support, degree: usize) -> PathBuf {
        self.dir.join(format!("kgroup-{}.json", cache_key(support, degree)))
    }

    fn load(&self, support: &Support, degree: usize) -> Option<TruncatedKGroup> {
        let text = std::fs::read_to_string(self.path_for(support, degree)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.convention != CONVENTION_VERSION || file.degree != degree || &file.data.support != support {
            return None;
        }
        TruncatedKGroup::from_data(file.data).ok()
    }

    fn store(&self, g: &TruncatedKGroup) -> Result<()> {
        let path = self.path_for(g.support(), g.degree());
        let file = CacheFile {
            convention: CONVENTION_VERSION,
            field: g.field().tag(),
            support: g.support().to_string(),
            degree: g.degree(),
            data: g.data().clone(),
        };
        let text = serde_json::to_string(&file).map_err(|e| Error::invariant(format!("cache encoding: {e}")))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| io_error(&self.dir, e))?;
        tmp.write_all(text.as_bytes()).map_err(|e| io_error(&path, e))?;
        tmp.persist(&path).map_err(|e| io_error(&path, e.error))?;
        Ok(())
    }
}

impl KGroupProvider for DiskKGroups {
    fn caps(&self) -> &Caps {
        self.memory.caps()
    }

    fn k_group(&self, support: &Support, degree: usize) -> Result<Arc<TruncatedKGroup>> {
        if let Some(g) = self.memory.get(support, degree) {
            return Ok(g);
        }
        if let Some(g) = self.load(support, degree) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(self.memory.insert(g));
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let g = TruncatedKGroup::compute(support, degree, self.memory.caps())?;
        self.store(&g)?;
        Ok(self.memory.insert(g))
    }
}

/// Content hash of the convention version and the group parameters.
pub fn cache_key(support: &Support, degree: usize) -> String {
    let mut h = Sha256::new();
    h.update(format!("v{CONVENTION_VERSION}|{}|{}|{degree}", support.field().tag(), support).as_bytes());
    hex::encode(h.finalize())
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::invalid(format!("{}: {e}", path.display()))
}
