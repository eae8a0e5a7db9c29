//! Run manifests: what was run, with which seeds, and how it was judged.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// One acceptance check and the tolerance it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `< 0.1` or `in [0.7, 1.3]`.
    pub tolerance: String,
}

impl Verdict {
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < bound,
            value,
            tolerance: format!("< {bound}"),
        }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value > bound,
            value,
            tolerance: format!("> {bound}"),
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            passed: (lo..=hi).contains(&value),
            value,
            tolerance: format!("in [{lo}, {hi}]"),
        }
    }

    /// `count` of `total` per-seed checks held; `need` is the required fraction.
    pub fn majority(name: impl Into<String>, count: usize, total: usize, need: f64) -> Self {
        let required = (need * total as f64).ceil() as usize;
        Self {
            name: name.into(),
            passed: total > 0 && count >= required,
            value: count as f64,
            tolerance: format!(">= {required} of {total}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub seeds_used: Vec<u64>,
    /// Graph resamples per seed, when a graph was rejected.
    pub resamples: Vec<(u64, u32)>,
    /// Regime windows and other harness choices in force.
    pub notes: Vec<String>,
    /// Empty under the determinism flag.
    pub timings: Vec<Timing>,
    pub verdicts: Vec<Verdict>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config_hash: String) -> Self {
        Self {
            command: command.into(),
            config_hash,
            version: env!("CARGO_PKG_VERSION").into(),
            seeds_used: Vec::new(),
            resamples: Vec::new(),
            notes: Vec::new(),
            timings: Vec::new(),
            verdicts: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn file_name(&self) -> String {
        format!("manifest_{}.json", self.command)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.file_name());
        let json = serde_json::to_string_pretty(self)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Writes artifacts into one directory and records them in a manifest.
pub struct Output {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    deterministic: bool,
    clock: Instant,
}

impl Output {
    pub fn new(dir: &Path, manifest: RunManifest, deterministic: bool) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
            deterministic,
            clock: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.artifacts.push(name.into());
        Ok(())
    }

    /// Records the time since the previous lap.
    pub fn lap(&mut self, stage: &str) {
        let seconds = self.clock.elapsed().as_secs_f64();
        self.clock = Instant::now();
        if !self.deterministic {
            self.manifest.timings.push(Timing {
                stage: stage.into(),
                seconds,
            });
        }
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.manifest.verdicts.push(v);
    }

    pub fn finish(self) -> Result<RunManifest> {
        self.manifest.write(&self.dir)?;
        Ok(self.manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_bounds() {
        assert!(Verdict::below("a", 0.09, 0.1).passed);
        assert!(!Verdict::below("a", 0.1, 0.1).passed);
        assert!(Verdict::within("b", 1.3, 0.7, 1.3).passed);
        assert!(!Verdict::within("b", f64::NAN, 0.7, 1.3).passed);
        let m = Verdict::majority("c", 17, 20, 0.85);
        assert!(m.passed);
        assert_eq!(m.tolerance, ">= 17 of 20");
        assert!(!Verdict::majority("c", 16, 20, 0.85).passed);
        assert!(!Verdict::majority("c", 0, 0, 0.85).passed);
    }

    #[test]
    fn deterministic_output_has_no_timings() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::new(dir.path(), RunManifest::new("x", "h".into()), true).unwrap();
        out.write("a.csv", "1\n").unwrap();
        out.lap("stage");
        out.verdict(Verdict::below("v", 0.0, 1.0));
        let m = out.finish().unwrap();
        assert!(m.timings.is_empty());
        let back = RunManifest::read(&dir.path().join("manifest_x.json")).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.artifacts, vec!["a.csv"]);
    }
}
