//! Calendar features and the tensor-product design matrix.
//!
//! Each row of the full design is the triple Hadamard product of the
//! hour-of-day spline basis, the hour-of-year spline basis, and the
//! day-of-week indicator block, followed by the HDH and CDH columns and,
//! when enabled, the two climate-interaction columns. Column order is
//! fixed: the hour-of-day index runs fastest, then hour-of-year, then
//! day of week.

use chrono::{DateTime, Datelike, Duration, Timelike, Utc};
use ndarray::Array2;

use super::spline::SplineEval;
use super::ModelSpec;
use crate::error::{Error, Result};
use crate::weather::RegionalWeather;

pub const HOD_DOMAIN: (f64, f64) = (1.0, 24.0);
pub const HOY_DOMAIN: (f64, f64) = (1.0, 8760.0);

/// Per-hour calendar covariates under a region's fixed UTC offset.
#[derive(Debug, Clone)]
pub struct CalendarFeatures {
    /// Hour of day in [1, 24], local standard time.
    pub hod: Vec<f64>,
    /// Hour of year in [1, 8760]; leap years are mapped affinely so the
    /// seasonal spline domain is identical across years.
    pub hoy: Vec<f64>,
    /// Day of week in 1..=7 (Monday = 1), local standard time.
    pub dow: Vec<usize>,
}

impl CalendarFeatures {
    pub fn len(&self) -> usize {
        self.hod.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hod.is_empty()
    }
}

/// Compute calendar features for a list of UTC timestamps under the given
/// day-boundary offset.
pub fn calendar_features(timestamps: &[DateTime<Utc>], offset_hours: i32) -> CalendarFeatures {
    let mut hod = Vec::with_capacity(timestamps.len());
    let mut hoy = Vec::with_capacity(timestamps.len());
    let mut dow = Vec::with_capacity(timestamps.len());
    for ts in timestamps {
        let local = *ts + Duration::hours(offset_hours as i64);
        hod.push(local.hour() as f64 + 1.0);
        dow.push(local.weekday().number_from_monday() as usize);
        let raw = (local.ordinal0() * 24 + local.hour() + 1) as f64;
        let leap = chrono::NaiveDate::from_ymd_opt(local.year(), 12, 31)
            .map(|d| d.ordinal() == 366)
            .unwrap_or(false);
        hoy.push(if leap { 1.0 + (raw - 1.0) * 8759.0 / 8783.0 } else { raw });
    }
    CalendarFeatures { hod, hoy, dow }
}

/// Controls-only design: the K*L*7 tensor block.
pub fn build_controls_design(cal: &CalendarFeatures, spec: &ModelSpec) -> Result<Array2<f64>> {
    spec.validate()?;
    let k = spec.knots_hod;
    let l = spec.knots_hoy;
    let hod_eval = SplineEval::new(k, HOD_DOMAIN)?;
    let hoy_eval = SplineEval::new(l, HOY_DOMAIN)?;

    let n = cal.len();
    let mut design = Array2::zeros((n, k * l * 7));
    let mut bh = vec![0.0; k];
    let mut bd = vec![0.0; l];
    for (t, mut row) in design.rows_mut().into_iter().enumerate() {
        hod_eval.eval_into(cal.hod[t], &mut bh);
        hoy_eval.eval_into(cal.hoy[t], &mut bd);
        let m = cal.dow[t] - 1;
        let row = row.as_slice_mut().expect("row-major design");
        let block = m * l * k;
        for (li, &bdl) in bd.iter().enumerate() {
            let base = block + li * k;
            for (ki, &bhk) in bh.iter().enumerate() {
                row[base + ki] = bhk * bdl;
            }
        }
    }
    Ok(design)
}

/// Full design: tensor block, HDH, CDH, then the interaction columns when
/// the spec enables them.
pub fn build_design(
    cal: &CalendarFeatures,
    weather: &RegionalWeather,
    spec: &ModelSpec,
) -> Result<Array2<f64>> {
    if cal.len() != weather.len() {
        return Err(Error::invalid(format!(
            "calendar has {} rows but weather has {}",
            cal.len(),
            weather.len()
        )));
    }
    let controls = build_controls_design(cal, spec)?;
    let n = cal.len();
    let n_tensor = controls.ncols();
    let p = spec.param_count();
    let mut design = Array2::zeros((n, p));
    design.slice_mut(ndarray::s![.., ..n_tensor]).assign(&controls);
    for t in 0..n {
        design[[t, n_tensor]] = weather.hdh[t];
        design[[t, n_tensor + 1]] = weather.cdh[t];
    }
    if spec.include_climate_interactions {
        let (ihdh, icdh) = match (&weather.hdh_climate_interaction, &weather.cdh_climate_interaction)
        {
            (Some(h), Some(c)) => (h, c),
            _ => {
                return Err(Error::invalid(
                    "spec enables climate interactions but the weather series has none",
                ))
            }
        };
        for t in 0..n {
            design[[t, n_tensor + 2]] = ihdh[t];
            design[[t, n_tensor + 3]] = icdh[t];
        }
    }
    Ok(design)
}
