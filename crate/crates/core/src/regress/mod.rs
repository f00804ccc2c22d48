//! Per-region log-demand regression: tensor-interacted natural splines of
//! hour-of-day and hour-of-year, day-of-week indicators, and weather terms.
//!
//! The estimated model is
//!
//! ```text
//! ln Y_t = sum_{k,l,m} beta_{k,l,m} Dh_k(hod_t) Dd_l(hoy_t) I_m(dow_t)
//!          + alpha_h HDH_t + alpha_c CDH_t
//!          [+ gamma_h iHDH_t + gamma_c iCDH_t] + u_t
//! ```
//!
//! with no global intercept: the seven day-of-week tensor blocks span it.

mod cv;
mod design;
mod hac;
mod ols;
mod spline;

pub use cv::{complete_local_years, cross_validate, CvEntry, CvResult};
pub use design::{
    build_controls_design, build_design, calendar_features, CalendarFeatures, HOD_DOMAIN,
    HOY_DOMAIN,
};
pub use hac::newey_west_se;
pub use ols::{least_squares, LsFit};
pub use spline::{knot_vector, natural_spline_basis, SplineEval};

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weather::RegionalWeather;

/// Hourly observed demand for one region with a per-hour validity mask.
#[derive(Debug, Clone)]
pub struct LoadSeries {
    pub region_id: String,
    pub timestamps: Vec<DateTime<Utc>>,
    pub demand_mw: Vec<f64>,
    pub mask: Vec<bool>,
}

impl LoadSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.timestamps.is_empty() {
            return Err(Error::invalid(format!("load series {} is empty", self.region_id)));
        }
        if self.demand_mw.len() != self.timestamps.len() || self.mask.len() != self.timestamps.len()
        {
            return Err(Error::invalid(format!(
                "load series {} has inconsistent lengths",
                self.region_id
            )));
        }
        for pair in self.timestamps.windows(2) {
            if pair[1] - pair[0] != Duration::hours(1) {
                return Err(Error::invalid(format!(
                    "load series {} is not hourly at {}",
                    self.region_id, pair[0]
                )));
            }
        }
        for (i, (&d, &ok)) in self.demand_mw.iter().zip(&self.mask).enumerate() {
            if ok && !(d.is_finite() && d > 0.0) {
                return Err(Error::invalid(format!(
                    "load series {} has nonpositive or non-finite demand {} at {}",
                    self.region_id, d, self.timestamps[i]
                )));
            }
        }
        Ok(())
    }
}

/// Knot counts for the two splines plus the climate-interaction switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub knots_hod: usize,
    pub knots_hoy: usize,
    pub include_climate_interactions: bool,
}

impl ModelSpec {
    pub fn new(knots_hod: usize, knots_hoy: usize, include_climate_interactions: bool) -> Self {
        ModelSpec { knots_hod, knots_hoy, include_climate_interactions }
    }

    /// K*L*7 tensor coefficients plus HDH/CDH and the optional interactions.
    pub fn param_count(&self) -> usize {
        let base = self.knots_hod * self.knots_hoy * 7 + 2;
        if self.include_climate_interactions {
            base + 2
        } else {
            base
        }
    }

    pub fn tensor_count(&self) -> usize {
        self.knots_hod * self.knots_hoy * 7
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots_hod < 3 || self.knots_hoy < 3 {
            return Err(Error::invalid(format!(
                "model spec needs at least 3 knots per spline, got K={} L={}",
                self.knots_hod, self.knots_hoy
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub in_sample_r2: f64,
    pub cv_r2: Option<f64>,
    pub rmse: f64,
}

/// A fitted per-region demand model in log space.
#[derive(Debug, Clone)]
pub struct FittedDemandModel {
    pub region_id: String,
    pub spec: ModelSpec,
    pub threshold_c: f64,
    pub day_boundary_offset_hours: i32,
    /// Tensor coefficients, hour-of-day index fastest, then hour-of-year,
    /// then day of week.
    pub beta: Vec<f64>,
    pub alpha_h: f64,
    pub alpha_c: f64,
    pub gamma_h: Option<f64>,
    pub gamma_c: Option<f64>,
    /// First training timestamp; residuals are hourly from here, `None`
    /// at masked hours.
    pub train_start: DateTime<Utc>,
    pub residuals: Vec<Option<f64>>,
    pub diagnostics: FitDiagnostics,
    /// Newey-West standard errors in design-column order, when requested.
    pub se: Option<Vec<f64>>,
    pub rank: usize,
}

impl FittedDemandModel {
    /// Residual for a given hour, if it was a valid training hour.
    pub fn residual_at(&self, ts: DateTime<Utc>) -> Option<f64> {
        let offset = (ts - self.train_start).num_hours();
        if offset < 0 || ts - self.train_start != Duration::hours(offset) {
            return None;
        }
        self.residuals.get(offset as usize).copied().flatten()
    }

    /// Coefficients in design-column order.
    pub fn full_coefficients(&self) -> Vec<f64> {
        let mut out = self.beta.clone();
        out.push(self.alpha_h);
        out.push(self.alpha_c);
        if self.spec.include_climate_interactions {
            out.push(self.gamma_h.unwrap_or(0.0));
            out.push(self.gamma_c.unwrap_or(0.0));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    /// Compute Newey-West standard errors at this Bartlett bandwidth.
    pub newey_west_lag: Option<usize>,
}

/// Fit the full model (controls plus weather) for one region.
pub fn fit(
    load: &LoadSeries,
    weather: &RegionalWeather,
    spec: &ModelSpec,
    day_boundary_offset_hours: i32,
    opts: &FitOptions,
) -> Result<FittedDemandModel> {
    fit_impl(load, Some(weather), spec, day_boundary_offset_hours, opts)
}

/// Fit the controls-only baseline (no weather columns). Weather
/// coefficients are zero so predictions ignore weather by construction.
pub fn baseline_fit(
    load: &LoadSeries,
    spec: &ModelSpec,
    day_boundary_offset_hours: i32,
    opts: &FitOptions,
) -> Result<FittedDemandModel> {
    fit_impl(load, None, spec, day_boundary_offset_hours, opts)
}

fn fit_impl(
    load: &LoadSeries,
    weather: Option<&RegionalWeather>,
    spec: &ModelSpec,
    day_boundary_offset_hours: i32,
    opts: &FitOptions,
) -> Result<FittedDemandModel> {
    load.validate()?;
    spec.validate()?;
    if let Some(w) = weather {
        if w.len() != load.len() || w.timestamps != load.timestamps {
            return Err(Error::invalid(format!(
                "load and weather timelines differ for region {}",
                load.region_id
            )));
        }
    }

    let cal = calendar_features(&load.timestamps, day_boundary_offset_hours);
    let design_all = match weather {
        Some(w) => build_design(&cal, w, spec)?,
        None => build_controls_design(&cal, spec)?,
    };

    let valid: Vec<usize> = (0..load.len()).filter(|&i| load.mask[i]).collect();
    if valid.is_empty() {
        return Err(Error::invalid(format!(
            "load series {} has no valid hours to fit",
            load.region_id
        )));
    }
    let design = design_all.select(ndarray::Axis(0), &valid);
    let y: Vec<f64> = valid.iter().map(|&i| load.demand_mw[i].ln()).collect();

    let ls = least_squares(design.view(), &y)?;

    let n = y.len() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    let sse: f64 = ls.residuals.iter().map(|r| r * r).sum();
    let sst: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let diagnostics = FitDiagnostics {
        in_sample_r2: if sst > 0.0 { 1.0 - sse / sst } else { 1.0 },
        cv_r2: None,
        rmse: (sse / n).sqrt(),
    };

    let se = match opts.newey_west_lag {
        Some(lag) => Some(newey_west_se(design.view(), &ls.residuals, lag)?),
        None => None,
    };

    let mut residuals = vec![None; load.len()];
    for (slot, &row) in valid.iter().enumerate() {
        residuals[row] = Some(ls.residuals[slot]);
    }

    let n_tensor = spec.tensor_count();
    let coef = &ls.coefficients;
    let (alpha_h, alpha_c, gamma_h, gamma_c) = if weather.is_some() {
        let gh = spec.include_climate_interactions.then(|| coef[n_tensor + 2]);
        let gc = spec.include_climate_interactions.then(|| coef[n_tensor + 3]);
        (coef[n_tensor], coef[n_tensor + 1], gh, gc)
    } else {
        (0.0, 0.0, None, None)
    };

    Ok(FittedDemandModel {
        region_id: load.region_id.clone(),
        spec: *spec,
        threshold_c: weather.map(|w| w.threshold_c).unwrap_or(crate::weather::DEFAULT_THRESHOLD_C),
        day_boundary_offset_hours,
        beta: coef[..n_tensor].to_vec(),
        alpha_h,
        alpha_c,
        gamma_h,
        gamma_c,
        train_start: load.timestamps[0],
        residuals,
        diagnostics,
        se,
        rank: ls.rank,
    })
}

/// Predicted log demand at the given weather, or at the balance-point
/// counterfactual (all weather terms zero) when `weather` is `None`.
pub fn predict_log(
    model: &FittedDemandModel,
    cal: &CalendarFeatures,
    weather: Option<&RegionalWeather>,
) -> Result<Vec<f64>> {
    let k = model.spec.knots_hod;
    let l = model.spec.knots_hoy;
    let hod_eval = SplineEval::new(k, HOD_DOMAIN)?;
    let hoy_eval = SplineEval::new(l, HOY_DOMAIN)?;

    if let Some(w) = weather {
        if w.len() != cal.len() {
            return Err(Error::invalid("calendar and weather lengths differ"));
        }
        if model.spec.include_climate_interactions && !w.has_interactions() {
            return Err(Error::invalid(
                "model uses climate interactions but the weather series has none",
            ));
        }
    }

    let mut bh = vec![0.0; k];
    let mut bd = vec![0.0; l];
    let mut out = Vec::with_capacity(cal.len());
    for t in 0..cal.len() {
        hod_eval.eval_into(cal.hod[t], &mut bh);
        hoy_eval.eval_into(cal.hoy[t], &mut bd);
        let m = cal.dow[t] - 1;
        let mut acc = 0.0;
        for (li, &bdl) in bd.iter().enumerate() {
            let base = (m * l + li) * k;
            for (ki, &bhk) in bh.iter().enumerate() {
                acc += model.beta[base + ki] * bhk * bdl;
            }
        }
        if let Some(w) = weather {
            acc += model.alpha_h * w.hdh[t] + model.alpha_c * w.cdh[t];
            if let (Some(gh), Some(ih)) = (model.gamma_h, w.hdh_climate_interaction.as_ref()) {
                acc += gh * ih[t];
            }
            if let (Some(gc), Some(ic)) = (model.gamma_c, w.cdh_climate_interaction.as_ref()) {
                acc += gc * ic[t];
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// `exp` of [`predict_log`]; strictly positive.
pub fn predict_level(
    model: &FittedDemandModel,
    cal: &CalendarFeatures,
    weather: Option<&RegionalWeather>,
) -> Result<Vec<f64>> {
    Ok(predict_log(model, cal, weather)?.into_iter().map(f64::exp).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weather::DEFAULT_THRESHOLD_C;
    use chrono::TimeZone;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn hourly(start: (i32, u32, u32), n: usize) -> Vec<DateTime<Utc>> {
        let t0 = Utc.with_ymd_and_hms(start.0, start.1, start.2, 0, 0, 0).unwrap();
        (0..n).map(|i| t0 + Duration::hours(i as i64)).collect()
    }

    pub(crate) fn synthetic_weather(ts: &[DateTime<Utc>], seed: u64) -> RegionalWeather {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ts.len();
        let cdh: Vec<f64> = (0..n)
            .map(|i| {
                let seasonal = 6.0 * (1.0 + (i as f64 / 2000.0).sin());
                (seasonal + rng.random_range(-4.0..4.0)).max(0.0)
            })
            .collect();
        let hdh: Vec<f64> = cdh
            .iter()
            .map(|&c| if c > 0.0 { 0.0 } else { rng.random_range(0.0..8.0) })
            .collect();
        let mut w = RegionalWeather {
            region_id: "r".into(),
            threshold_c: DEFAULT_THRESHOLD_C,
            timestamps: ts.to_vec(),
            mean_temp_c: vec![20.0; n],
            cdh,
            hdh,
            cdh_climate_interaction: None,
            hdh_climate_interaction: None,
            mean_cdh: 0.0,
            mean_hdh: 0.0,
        };
        w.recompute_means();
        w
    }

    /// Demand generated exactly from the model equation with the given
    /// coefficients and additive log noise.
    pub(crate) fn synthetic_load(
        ts: &[DateTime<Utc>],
        weather: &RegionalWeather,
        spec: &ModelSpec,
        offset: i32,
        alpha_h: f64,
        alpha_c: f64,
        noise_sd: f64,
        seed: u64,
    ) -> (LoadSeries, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut beta = vec![0.0; spec.tensor_count()];
        let (k, l) = (spec.knots_hod, spec.knots_hoy);
        for m in 0..7 {
            for li in 0..l {
                for ki in 0..k {
                    let idx = (m * l + li) * k + ki;
                    beta[idx] = if ki == 0 && li == 0 {
                        7.0 + rng.random_range(-0.05..0.05)
                    } else {
                        rng.random_range(-0.06..0.06)
                    };
                }
            }
        }
        let cal = calendar_features(ts, offset);
        let model = FittedDemandModel {
            region_id: "r".into(),
            spec: *spec,
            threshold_c: DEFAULT_THRESHOLD_C,
            day_boundary_offset_hours: offset,
            beta: beta.clone(),
            alpha_h,
            alpha_c,
            gamma_h: None,
            gamma_c: None,
            train_start: ts[0],
            residuals: vec![],
            diagnostics: FitDiagnostics { in_sample_r2: 1.0, cv_r2: None, rmse: 0.0 },
            se: None,
            rank: spec.param_count(),
        };
        let log_pred = predict_log(&model, &cal, Some(weather)).unwrap();
        let normal = rand_distr::Normal::new(0.0, noise_sd.max(f64::MIN_POSITIVE)).unwrap();
        let demand: Vec<f64> = log_pred
            .iter()
            .map(|lp| {
                let noise = if noise_sd > 0.0 {
                    rand_distr::Distribution::sample(&normal, &mut rng)
                } else {
                    0.0
                };
                (lp + noise).exp()
            })
            .collect();
        let load = LoadSeries {
            region_id: "r".into(),
            timestamps: ts.to_vec(),
            demand_mw: demand,
            mask: vec![true; ts.len()],
        };
        (load, beta)
    }

    #[test]
    fn exact_recovery_without_noise() {
        let ts = hourly((2017, 1, 1), 24 * 120);
        let w = synthetic_weather(&ts, 1);
        let spec = ModelSpec::new(4, 3, false);
        let (load, beta) =
            synthetic_load(&ts, &w, &spec, -5, 0.037, 0.044, 0.0, 2);
        let model = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();
        for (est, truth) in model.beta.iter().zip(&beta) {
            assert!((est - truth).abs() <= 1e-8 * truth.abs().max(1.0), "{est} vs {truth}");
        }
        assert!((model.alpha_h - 0.037).abs() < 1e-8);
        assert!((model.alpha_c - 0.044).abs() < 1e-8);
        assert!(model.diagnostics.in_sample_r2 > 1.0 - 1e-12);
    }

    #[test]
    fn residuals_orthogonal_to_design_and_reproduce_observations() {
        let ts = hourly((2017, 1, 1), 24 * 90);
        let w = synthetic_weather(&ts, 3);
        let spec = ModelSpec::new(4, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, -5, 0.03, 0.05, 0.05, 4);
        let model = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();

        let cal = calendar_features(&ts, -5);
        let design = build_design(&cal, &w, &spec).unwrap();
        let resid: Vec<f64> = model.residuals.iter().map(|r| r.unwrap()).collect();
        let resid_norm = resid.iter().map(|r| r * r).sum::<f64>().sqrt();
        for col in design.columns() {
            let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            let col_norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(
                dot.abs() <= 1e-6 * col_norm * resid_norm.max(1e-30),
                "residual not orthogonal: {dot}"
            );
        }

        let pred = predict_log(&model, &cal, Some(&w)).unwrap();
        for i in 0..ts.len() {
            let back = pred[i] + resid[i];
            let obs = load.demand_mw[i].ln();
            assert!((back - obs).abs() <= 1e-10 * obs.abs().max(1.0));
        }
    }

    #[test]
    fn masked_hours_are_dropped() {
        let ts = hourly((2017, 1, 1), 24 * 60);
        let w = synthetic_weather(&ts, 5);
        let spec = ModelSpec::new(3, 3, false);
        let (mut load, _) = synthetic_load(&ts, &w, &spec, 0, 0.02, 0.03, 0.0, 6);
        // poison some masked hours; the fit must not see them
        for i in (0..load.len()).step_by(97) {
            load.mask[i] = false;
            load.demand_mw[i] = 1e12;
        }
        let model = fit(&load, &w, &spec, 0, &FitOptions::default()).unwrap();
        assert!(model.diagnostics.in_sample_r2 > 1.0 - 1e-10);
        for i in (0..load.len()).step_by(97) {
            assert!(model.residuals[i].is_none());
        }
    }

    #[test]
    fn all_masked_rejected() {
        let ts = hourly((2017, 1, 1), 48);
        let w = synthetic_weather(&ts, 7);
        let load = LoadSeries {
            region_id: "r".into(),
            timestamps: ts.clone(),
            demand_mw: vec![1.0; 48],
            mask: vec![false; 48],
        };
        assert!(fit(&load, &w, &ModelSpec::new(3, 3, false), 0, &FitOptions::default()).is_err());
    }

    #[test]
    fn nonfinite_demand_rejected() {
        let ts = hourly((2017, 1, 1), 48);
        let w = synthetic_weather(&ts, 8);
        let load = LoadSeries {
            region_id: "r".into(),
            timestamps: ts.clone(),
            demand_mw: vec![f64::NAN; 48],
            mask: vec![true; 48],
        };
        assert!(fit(&load, &w, &ModelSpec::new(3, 3, false), 0, &FitOptions::default()).is_err());
    }

    #[test]
    fn weather_zeroed_prediction_is_controls_only() {
        let ts = hourly((2017, 1, 1), 24 * 30);
        let w = synthetic_weather(&ts, 9);
        let spec = ModelSpec::new(3, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, -5, 0.03, 0.04, 0.0, 10);
        let model = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();
        let cal = calendar_features(&ts, -5);
        let at_weather = predict_log(&model, &cal, Some(&w)).unwrap();
        let at_threshold = predict_log(&model, &cal, None).unwrap();
        for t in 0..ts.len() {
            let expect = at_threshold[t] + model.alpha_h * w.hdh[t] + model.alpha_c * w.cdh[t];
            assert!((at_weather[t] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn cdh_shift_moves_log_prediction_by_alpha_c() {
        let ts = hourly((2017, 1, 1), 24 * 30);
        let w = synthetic_weather(&ts, 11);
        let spec = ModelSpec::new(3, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, -5, 0.03, 0.04, 0.0, 12);
        let model = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();
        let cal = calendar_features(&ts, -5);
        let base = predict_log(&model, &cal, Some(&w)).unwrap();
        let mut doubled = w.clone();
        for v in &mut doubled.cdh {
            *v *= 2.0;
        }
        let shifted = predict_log(&model, &cal, Some(&doubled)).unwrap();
        for t in 0..ts.len() {
            let expect = base[t] + model.alpha_c * w.cdh[t];
            assert!((shifted[t] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn prediction_invariant_to_column_rescaling() {
        // Scaling a weather column and inversely scaling its coefficient
        // leaves predictions unchanged.
        let ts = hourly((2017, 1, 1), 24 * 30);
        let w = synthetic_weather(&ts, 13);
        let spec = ModelSpec::new(3, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, -5, 0.03, 0.04, 0.0, 14);
        let model = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();
        let cal = calendar_features(&ts, -5);
        let base = predict_log(&model, &cal, Some(&w)).unwrap();

        let c = 3.7;
        let mut scaled_w = w.clone();
        for v in &mut scaled_w.cdh {
            *v *= c;
        }
        let mut scaled_model = model.clone();
        scaled_model.alpha_c /= c;
        let scaled = predict_log(&scaled_model, &cal, Some(&scaled_w)).unwrap();
        for t in 0..ts.len() {
            assert!((base[t] - scaled[t]).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_models_dominance() {
        let ts = hourly((2016, 1, 1), 24 * 366);
        let w = {
            let mut w = synthetic_weather(&ts, 15);
            let normals_cdh = w.mean_cdh;
            let normals_hdh = w.mean_hdh;
            w.cdh_climate_interaction = Some(w.cdh.iter().map(|c| normals_cdh * c).collect());
            w.hdh_climate_interaction = Some(w.hdh.iter().map(|h| normals_hdh * h).collect());
            w
        };
        let spec = ModelSpec::new(4, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, -5, 0.03, 0.04, 0.08, 16);

        let baseline = baseline_fit(&load, &spec, -5, &FitOptions::default()).unwrap();
        let full = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();
        let interact = fit(
            &load,
            &w,
            &ModelSpec::new(4, 3, true),
            -5,
            &FitOptions::default(),
        )
        .unwrap();

        let r2_base = baseline.diagnostics.in_sample_r2;
        let r2_full = full.diagnostics.in_sample_r2;
        let r2_int = interact.diagnostics.in_sample_r2;
        assert!(r2_base <= r2_full + 1e-12, "{r2_base} > {r2_full}");
        assert!(r2_full <= r2_int + 1e-12, "{r2_full} > {r2_int}");
    }

    #[test]
    fn baseline_matches_full_model_on_weatherless_data() {
        let ts = hourly((2017, 1, 1), 24 * 90);
        let w = synthetic_weather(&ts, 17);
        let spec = ModelSpec::new(3, 3, false);
        // alpha_h = alpha_c = 0: weather carries no signal
        let (load, _) = synthetic_load(&ts, &w, &spec, -5, 0.0, 0.0, 0.03, 18);
        let baseline = baseline_fit(&load, &spec, -5, &FitOptions::default()).unwrap();
        let full = fit(&load, &w, &spec, -5, &FitOptions::default()).unwrap();
        assert!(
            (baseline.diagnostics.in_sample_r2 - full.diagnostics.in_sample_r2).abs() < 2e-3
        );
    }
}
