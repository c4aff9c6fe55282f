use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::Serialize;

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub master_seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    #[serde(skip)]
    clock: Instant,
}

impl<'a, C: Serialize> RunManifest<'a, C> {
    pub fn new(command: &'static str, config: &'a C, master_seed: Option<u64>, clock: Instant) -> Self {
        let started = SystemTime::now() - clock.elapsed();
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            master_seed,
            outputs: Vec::new(),
            started_unix_s: started.duration_since(UNIX_EPOCH).unwrap_or(Duration::ZERO).as_secs(),
            wall_clock_s: 0.0,
            clock,
        }
    }

    /// Stamps the elapsed time and writes the manifest beside `primary`.
    pub fn finish(mut self, primary: &Path) -> anyhow::Result<PathBuf> {
        self.wall_clock_s = self.clock.elapsed().as_secs_f64();
        let path = manifest_path(primary);
        write_json(&path, &self)?;
        Ok(path)
    }
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    sibling(primary, "manifest.json")
}

/// `dir/name.csv` -> `dir/name.<ext>`.
pub fn sibling(primary: &Path, ext: &str) -> PathBuf {
    primary.with_extension(ext)
}

pub fn output_path(explicit: Option<&Path>, out_dir: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => out_dir.unwrap_or(Path::new(".")).join(default_name),
    }
}

pub fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> anyhow::Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
