//! Pipeline orchestration: configuration, input validation, staged
//! execution, and the artifact manifest.

mod manifest;
mod run;
mod validate;

pub use manifest::{Manifest, ManifestEntry};
pub use run::{run_pipeline, slice_weather, RunOutput};
pub use validate::{validate_inputs, ValidationIssue, ValidationReport};

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::weather::DEFAULT_THRESHOLD_C;

/// Complete pipeline configuration. Every key mirrors a CLI flag; values
/// from the config file are overridden by explicit flags.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub grid: PathBuf,
    pub regions: PathBuf,
    pub load: PathBuf,
    /// Optional long-run degree-hour normals; in-sample means otherwise.
    pub normals: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub threshold_c: f64,
    pub knots_hod: usize,
    pub knots_hoy: usize,
    pub interactions: bool,
    /// Select knots by year-out cross-validation over the grid below.
    pub cv: bool,
    pub cv_grid_hod: Vec<usize>,
    pub cv_grid_hoy: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Day-boundary offset for pooled (interconnect/national) series.
    pub pool_offset_hours: i32,
    /// Uniform warming scenario; adds a climate-shifted report set.
    pub delta_t: Option<f64>,
    /// Bartlett bandwidth for Newey-West standard errors; `None` skips them.
    pub newey_west_lag: Option<usize>,
    /// Also write the binary hourly-grid cache.
    pub write_cache: bool,
    /// Emit the per-region alpha-sweep curves.
    pub sweep: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            grid: PathBuf::new(),
            regions: PathBuf::new(),
            load: PathBuf::new(),
            normals: None,
            out_dir: PathBuf::from("out"),
            threshold_c: DEFAULT_THRESHOLD_C,
            knots_hod: 19,
            knots_hoy: 6,
            interactions: false,
            cv: false,
            cv_grid_hod: vec![6, 10, 14, 19, 24],
            cv_grid_hoy: vec![4, 6, 9, 12],
            alphas: vec![0.0, 0.25, 0.5, 1.0],
            pool_offset_hours: -5,
            delta_t: None,
            newey_west_lag: Some(24),
            write_cache: false,
            sweep: true,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.as_ref().display())))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        // Relative paths resolve against the config file's directory.
        if let Some(base) = path.as_ref().parent() {
            for p in [&mut cfg.grid, &mut cfg.regions, &mut cfg.load, &mut cfg.out_dir] {
                if p.is_relative() && !p.as_os_str().is_empty() {
                    *p = base.join(&p);
                }
            }
            if let Some(n) = &mut cfg.normals {
                if n.is_relative() {
                    *n = base.join(&n);
                }
            }
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        for (name, p) in [("grid", &self.grid), ("regions", &self.regions), ("load", &self.load)] {
            if p.as_os_str().is_empty() {
                return Err(Error::Config(format!("missing required path: {name}")));
            }
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("alphas must not be empty".into()));
        }
        for a in &self.alphas {
            if !(0.0..=1.0).contains(a) {
                return Err(Error::Config(format!("alpha {a} outside [0, 1]")));
            }
        }
        if !self.threshold_c.is_finite() {
            return Err(Error::Config("threshold_c must be finite".into()));
        }
        if self.cv && (self.cv_grid_hod.is_empty() || self.cv_grid_hoy.is_empty()) {
            return Err(Error::Config("cv enabled with an empty spec grid".into()));
        }
        Ok(())
    }
}
