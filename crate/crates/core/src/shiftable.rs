//! Decomposition of observed demand into hard and flexible components.
//!
//! Hard demand is the counterfactual at the balance-point temperature:
//! `hard_t = Y_t * min(1, exp(pred18_t - predT_t))`, where both
//! predictions come from exp of the fitted log model. The ratio is
//! clamped at 1 so a (spurious) negative temperature effect never makes
//! the temperature-sensitive component negative. The flexible component
//! is the `alpha`-scaled gap, applied to observed demand so that
//! `hard + flexible = observed` holds by construction.

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};
use crate::regress::{calendar_features, predict_log, FittedDemandModel, LoadSeries};
use crate::weather::{
    aggregate_region, climate_interaction_aggregates, CellNormals, RegionSpec, RegionalWeather,
    TemperatureGrid,
};

/// Hourly decomposition of observed load for one pool at a given alpha.
///
/// At every valid hour: `hard_mw + flexible_mw = observed_mw`,
/// `flexible_mw >= 0`, and `share = flexible_mw / observed_mw`.
#[derive(Debug, Clone)]
pub struct ShiftableSeries {
    pub pool_id: String,
    pub timestamps: Vec<DateTime<Utc>>,
    pub observed_mw: Vec<f64>,
    pub hard_mw: Vec<f64>,
    pub flexible_mw: Vec<f64>,
    pub share: Vec<f64>,
    pub mask: Vec<bool>,
    pub alpha: f64,
    pub day_boundary_offset_hours: i32,
}

impl ShiftableSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Uniform warming scenario.
#[derive(Debug, Clone, Copy)]
pub struct ClimateScenario {
    /// °C added to every cell-hour before degree-hours are recomputed.
    pub delta_t: f64,
}

impl ClimateScenario {
    pub fn new(delta_t: f64) -> Result<Self> {
        if !delta_t.is_finite() {
            return Err(Error::invalid("climate scenario delta must be finite"));
        }
        Ok(ClimateScenario { delta_t })
    }
}

/// Per-hour hard demand before alpha scaling (the full counterfactual at
/// the balance point), aligned with the load series. Masked hours get 0.
pub fn hard_demand(
    model: &FittedDemandModel,
    weather: &RegionalWeather,
    load: &LoadSeries,
) -> Result<Vec<f64>> {
    load.validate()?;
    if weather.timestamps != load.timestamps {
        return Err(Error::invalid(format!(
            "weather and load timelines differ for {}",
            load.region_id
        )));
    }
    let cal = calendar_features(&load.timestamps, model.day_boundary_offset_hours);
    let at_weather = predict_log(model, &cal, Some(weather))?;
    let at_threshold = predict_log(model, &cal, None)?;
    Ok((0..load.len())
        .map(|t| {
            if !load.mask[t] {
                return 0.0;
            }
            let ratio = (at_threshold[t] - at_weather[t]).exp().min(1.0);
            load.demand_mw[t] * ratio
        })
        .collect())
}

/// Split observed load into hard and flexible components at a given alpha.
///
/// `flexible = alpha * (observed - hard_full)`; the reported hard
/// component is `observed - flexible` so the identity holds exactly.
pub fn shiftable_split(
    hard_full: &[f64],
    load: &LoadSeries,
    alpha: f64,
    day_boundary_offset_hours: i32,
) -> Result<ShiftableSeries> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha {alpha} outside [0, 1]")));
    }
    load.validate()?;
    if hard_full.len() != load.len() {
        return Err(Error::invalid("hard-demand vector does not match the load series"));
    }
    let n = load.len();
    let mut hard = vec![0.0; n];
    let mut flexible = vec![0.0; n];
    let mut share = vec![0.0; n];
    for t in 0..n {
        if !load.mask[t] {
            continue;
        }
        let obs = load.demand_mw[t];
        if hard_full[t] > obs * (1.0 + 1e-9) {
            return Err(Error::invalid(format!(
                "hard demand {} exceeds observed {} at {}",
                hard_full[t], obs, load.timestamps[t]
            )));
        }
        let flex = alpha * (obs - hard_full[t]).max(0.0);
        flexible[t] = flex;
        hard[t] = obs - flex;
        share[t] = flex / obs;
    }
    Ok(ShiftableSeries {
        pool_id: load.region_id.clone(),
        timestamps: load.timestamps.clone(),
        observed_mw: load.demand_mw.clone(),
        hard_mw: hard,
        flexible_mw: flexible,
        share,
        mask: load.mask.clone(),
        alpha,
        day_boundary_offset_hours,
    })
}

/// Convenience: [`hard_demand`] followed by [`shiftable_split`].
pub fn decompose(
    model: &FittedDemandModel,
    weather: &RegionalWeather,
    load: &LoadSeries,
    alpha: f64,
) -> Result<ShiftableSeries> {
    let hard = hard_demand(model, weather, load)?;
    shiftable_split(&hard, load, alpha, model.day_boundary_offset_hours)
}

/// Project demand under a uniform warming scenario and re-derive the
/// shiftable decomposition.
///
/// The shift is applied per grid cell before degree-hours are computed.
/// Shifted log demand is the fitted log at the shifted weather plus the
/// original log residual; hours without a training residual are masked.
pub fn climate_shift(
    model: &FittedDemandModel,
    hourly_grid: &TemperatureGrid,
    region: &RegionSpec,
    normals: Option<&CellNormals>,
    load: &LoadSeries,
    scenario: ClimateScenario,
    alpha: f64,
) -> Result<(LoadSeries, ShiftableSeries)> {
    load.validate()?;
    let shifted_grid = hourly_grid.shifted(scenario.delta_t);
    let shifted_weather = if model.spec.include_climate_interactions {
        let normals = normals.ok_or_else(|| {
            Error::invalid("climate shift with an interaction model needs cell normals")
        })?;
        climate_interaction_aggregates(&shifted_grid, region, normals, model.threshold_c)?
    } else {
        aggregate_region(&shifted_grid, region, model.threshold_c)?
    };
    let shifted_weather = shifted_weather.slice_to(&load.timestamps)?;

    let cal = calendar_features(&load.timestamps, model.day_boundary_offset_hours);
    let pred_shifted = predict_log(model, &cal, Some(&shifted_weather))?;

    let n = load.len();
    let mut demand = vec![0.0; n];
    let mut mask = vec![false; n];
    for t in 0..n {
        if !load.mask[t] {
            continue;
        }
        match model.residual_at(load.timestamps[t]) {
            Some(u) => {
                demand[t] = (pred_shifted[t] + u).exp();
                mask[t] = true;
            }
            None => mask[t] = false,
        }
    }
    let shifted_load = LoadSeries {
        region_id: load.region_id.clone(),
        timestamps: load.timestamps.clone(),
        demand_mw: demand,
        mask,
    };
    shifted_load.validate()?;

    let hard = hard_demand(model, &shifted_weather, &shifted_load)?;
    let series =
        shiftable_split(&hard, &shifted_load, alpha, model.day_boundary_offset_hours)?;
    Ok((shifted_load, series))
}
