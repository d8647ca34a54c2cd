use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::job::JobSpec;
use crate::report::{Report, SCHEMA_VERSION, VERSION};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_VAR: &str = "RBSLAB_CACHE_DIR";

/// One JSON file per job under a directory, named by the SHA-256 of the
/// job and the library version.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    /// `$RBSLAB_CACHE_DIR`, or `rbslab-cache` under the system temp dir.
    pub fn from_env() -> Cache {
        match std::env::var_os(CACHE_DIR_VAR) {
            Some(d) if !d.is_empty() => Cache::new(d),
            _ => Cache::new(std::env::temp_dir().join("rbslab-cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(job: &JobSpec) -> String {
        let mut h = Sha256::new();
        h.update(job.cache_key_material().as_bytes());
        h.update([0]);
        h.update(VERSION.as_bytes());
        format!("{:x}", h.finalize())
    }

    pub fn path(&self, job: &JobSpec) -> PathBuf {
        self.dir.join(format!("{}.json", Cache::key(job)))
    }

    /// A stored report for exactly this job and version. Unreadable or
    /// mismatched entries count as misses.
    pub fn load(&self, job: &JobSpec) -> Option<Report> {
        let text = fs::read_to_string(self.path(job)).ok()?;
        let report: Report = serde_json::from_str(&text).ok()?;
        let fresh = report.version == VERSION
            && report.schema_version == SCHEMA_VERSION
            && report.job.cache_key_material() == job.cache_key_material();
        fresh.then_some(report)
    }

    /// Writes to a temporary file in the same directory and renames it
    /// into place, so readers never see a partial entry.
    pub fn store(&self, job: &JobSpec, report: &Report) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(report.to_json().as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(job)).map_err(|e| e.error)?;
        Ok(())
    }
}
