//! Self-describing JSON model artifact. Round-trips losslessly: floats
//! serialize with shortest round-trip formatting.

use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::{FitDiagnostics, FittedDemandModel, ModelSpec, SplineEval, HOD_DOMAIN, HOY_DOMAIN};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub schema_version: u32,
    pub region_id: String,
    pub spec: ModelSpec,
    pub threshold_c: f64,
    pub day_boundary_offset_hours: i32,
    /// Knot positions, recorded for self-description; they are always the
    /// equally spaced vectors implied by the spec.
    pub knots_hod: Vec<f64>,
    pub knots_hoy: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha_h: f64,
    pub alpha_c: f64,
    pub gamma_h: Option<f64>,
    pub gamma_c: Option<f64>,
    pub train_start_utc: DateTime<Utc>,
    pub residuals: Vec<Option<f64>>,
    pub diagnostics: FitDiagnostics,
    pub se: Option<Vec<f64>>,
    pub rank: usize,
}

impl ModelArtifact {
    pub fn from_model(model: &FittedDemandModel) -> Result<Self> {
        Ok(ModelArtifact {
            schema_version: MODEL_SCHEMA_VERSION,
            region_id: model.region_id.clone(),
            spec: model.spec,
            threshold_c: model.threshold_c,
            day_boundary_offset_hours: model.day_boundary_offset_hours,
            knots_hod: SplineEval::new(model.spec.knots_hod, HOD_DOMAIN)?.knots(),
            knots_hoy: SplineEval::new(model.spec.knots_hoy, HOY_DOMAIN)?.knots(),
            beta: model.beta.clone(),
            alpha_h: model.alpha_h,
            alpha_c: model.alpha_c,
            gamma_h: model.gamma_h,
            gamma_c: model.gamma_c,
            train_start_utc: model.train_start,
            residuals: model.residuals.clone(),
            diagnostics: model.diagnostics.clone(),
            se: model.se.clone(),
            rank: model.rank,
        })
    }

    pub fn into_model(self) -> Result<FittedDemandModel> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "model artifact schema {} unsupported (expected {})",
                self.schema_version, MODEL_SCHEMA_VERSION
            )));
        }
        if self.beta.len() != self.spec.tensor_count() {
            return Err(Error::invalid(format!(
                "artifact has {} tensor coefficients, spec implies {}",
                self.beta.len(),
                self.spec.tensor_count()
            )));
        }
        if self.knots_hod.len() != self.spec.knots_hod
            || self.knots_hoy.len() != self.spec.knots_hoy
        {
            return Err(Error::invalid("artifact knot vectors disagree with the spec"));
        }
        Ok(FittedDemandModel {
            region_id: self.region_id,
            spec: self.spec,
            threshold_c: self.threshold_c,
            day_boundary_offset_hours: self.day_boundary_offset_hours,
            beta: self.beta,
            alpha_h: self.alpha_h,
            alpha_c: self.alpha_c,
            gamma_h: self.gamma_h,
            gamma_c: self.gamma_c,
            train_start: self.train_start_utc,
            residuals: self.residuals,
            diagnostics: self.diagnostics,
            se: self.se,
            rank: self.rank,
        })
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &FittedDemandModel) -> Result<()> {
    let artifact = ModelArtifact::from_model(model)?;
    let json = serde_json::to_string_pretty(&artifact)?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<FittedDemandModel> {
    let data = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.as_ref().display())))?;
    let artifact: ModelArtifact = serde_json::from_str(&data)?;
    artifact.into_model()
}
