//! Seeded synthetic fixtures: a 3-hourly temperature grid, region
//! definitions, and hourly demand generated exactly from the regression
//! model equation with known coefficients plus Gaussian log noise.
//! Ground-truth decompositions are emitted alongside so estimator output
//! can be checked against the generator.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Duration, TimeZone, Timelike, Utc};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::Result;
use crate::io;
use crate::regress::{
    calendar_features, predict_log, FitDiagnostics, FittedDemandModel, LoadSeries, ModelSpec,
};
use crate::weather::{
    aggregate_region, interpolate_to_hourly, GridCell, Interconnect, RegionSpec, RegionalWeather,
    TemperatureGrid, DEFAULT_THRESHOLD_C,
};

/// Seasonal-diurnal sinusoid with AR(1) perturbations, per cell.
#[derive(Debug, Clone, Copy)]
pub struct TempProcess {
    pub base_mean_c: f64,
    /// Spread of per-cell mean temperature across a region's cells.
    pub cell_spread_c: f64,
    pub seasonal_amp_c: f64,
    pub diurnal_amp_c: f64,
    pub ar1_rho: f64,
    /// Stationary standard deviation of the AR(1) anomaly.
    pub ar1_sd_c: f64,
}

impl Default for TempProcess {
    fn default() -> Self {
        TempProcess {
            base_mean_c: 14.0,
            cell_spread_c: 6.0,
            seasonal_amp_c: 11.0,
            diurnal_amp_c: 4.0,
            ar1_rho: 0.85,
            ar1_sd_c: 2.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n_regions: usize,
    pub cells_per_region: usize,
    /// First local calendar year covered.
    pub start_year: i32,
    pub n_years: usize,
    pub knots_hod: usize,
    pub knots_hoy: usize,
    pub alpha_h: f64,
    pub alpha_c: f64,
    /// Standard deviation of the i.i.d. log-demand noise.
    pub noise_sd: f64,
    pub day_boundary_offset_hours: i32,
    pub seed: u64,
    pub temperature: TempProcess,
    /// Intercept-block level of log demand (7.0 is about 1.1 GW).
    pub base_log_level: f64,
    /// Scale of the non-intercept tensor coefficients.
    pub beta_sd: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_regions: 3,
            cells_per_region: 4,
            start_year: 2016,
            n_years: 3,
            knots_hod: 6,
            knots_hoy: 4,
            alpha_h: 0.037,
            alpha_c: 0.044,
            noise_sd: 0.02,
            day_boundary_offset_hours: -5,
            seed: 42,
            temperature: TempProcess::default(),
            base_log_level: 7.0,
            beta_sd: 0.05,
        }
    }
}

/// Ground truth for one generated region.
#[derive(Debug, Clone, Serialize)]
pub struct RegionTruth {
    pub region_id: String,
    pub alpha_h: f64,
    pub alpha_c: f64,
    pub beta: Vec<f64>,
    /// Share of temperature-sensitive load at alpha = 1, per hour.
    #[serde(skip)]
    pub share_alpha1: Vec<f64>,
    /// Counterfactual balance-point demand, per hour.
    #[serde(skip)]
    pub hard_mw: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub spec: SyntheticSpec,
    /// The raw 3-hourly grid (what the grid CSV contains).
    pub grid_3h: TemperatureGrid,
    /// Its hourly interpolation (what the pipeline derives).
    pub grid_hourly: TemperatureGrid,
    pub regions: Vec<RegionSpec>,
    pub weather: Vec<RegionalWeather>,
    pub loads: Vec<LoadSeries>,
    pub truth: Vec<RegionTruth>,
}

fn year_hours(year: i32) -> usize {
    let leap = chrono::NaiveDate::from_ymd_opt(year, 12, 31)
        .map(|d| d.ordinal() == 366)
        .unwrap_or(false);
    if leap {
        8784
    } else {
        8760
    }
}

/// Generate grid, regions, loads, and ground truth from a seed.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    let total_hours: usize =
        (0..spec.n_years).map(|i| year_hours(spec.start_year + i as i32)).sum();
    // Local years start at midnight local time; shift back to UTC.
    let utc_start = Utc
        .with_ymd_and_hms(spec.start_year, 1, 1, 0, 0, 0)
        .unwrap()
        - Duration::hours(spec.day_boundary_offset_hours as i64);
    let n_samples = total_hours / 3;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // --- temperature grid (3-hourly) ---
    let n_cells = spec.n_regions * spec.cells_per_region;
    let mut cells = Vec::with_capacity(n_cells);
    let mut temps = Array2::zeros((n_cells, n_samples));
    let anomaly_innovation_sd =
        spec.temperature.ar1_sd_c * (1.0 - spec.temperature.ar1_rho.powi(2)).sqrt();
    let normal = Normal::new(0.0, anomaly_innovation_sd.max(f64::MIN_POSITIVE)).unwrap();
    for region_idx in 0..spec.n_regions {
        for cell_idx in 0..spec.cells_per_region {
            let row = region_idx * spec.cells_per_region + cell_idx;
            let cell_id = format!("r{region_idx:02}c{cell_idx:03}");
            cells.push(GridCell {
                cell_id,
                latitude: 30.0 + region_idx as f64 * 3.0 + cell_idx as f64 * 0.25,
                longitude: -105.0 + region_idx as f64 * 5.0 + cell_idx as f64 * 0.25,
                population_weight: 0.0,
            });
            let frac = if spec.cells_per_region > 1 {
                cell_idx as f64 / (spec.cells_per_region - 1) as f64 - 0.5
            } else {
                0.0
            };
            let cell_mean = spec.temperature.base_mean_c
                + spec.temperature.cell_spread_c * frac
                + rng.random_range(-1.0..1.0);
            let mut anomaly = 0.0;
            for s in 0..n_samples {
                let ts = utc_start + Duration::hours(3 * s as i64);
                let local = ts + Duration::hours(spec.day_boundary_offset_hours as i64);
                let yh = year_hours(local.year()) as f64;
                let frac_year = (local.ordinal0() * 24 + local.hour()) as f64 / yh;
                let frac_day = local.hour() as f64 / 24.0;
                let seasonal =
                    -spec.temperature.seasonal_amp_c * (std::f64::consts::TAU * (frac_year - 0.04)).cos();
                let diurnal =
                    -spec.temperature.diurnal_amp_c * (std::f64::consts::TAU * (frac_day - 0.625)).cos();
                anomaly = spec.temperature.ar1_rho * anomaly + normal.sample(&mut rng);
                temps[[row, s]] = cell_mean + seasonal + diurnal + anomaly;
            }
        }
    }
    let timestamps_3h: Vec<DateTime<Utc>> =
        (0..n_samples).map(|s| utc_start + Duration::hours(3 * s as i64)).collect();
    let grid_3h = TemperatureGrid { cells, timestamps: timestamps_3h, temps };

    // --- regions ---
    let interconnects = [Interconnect::East, Interconnect::West, Interconnect::Ercot];
    let mut regions = Vec::with_capacity(spec.n_regions);
    for region_idx in 0..spec.n_regions {
        let mut cell_weights = std::collections::BTreeMap::new();
        for cell_idx in 0..spec.cells_per_region {
            cell_weights.insert(
                format!("r{region_idx:02}c{cell_idx:03}"),
                rng.random_range(0.5..3.0),
            );
        }
        regions.push(RegionSpec {
            region_id: format!("region_{region_idx:02}"),
            interconnect: interconnects[region_idx % 3],
            cell_weights,
            day_boundary_offset_hours: spec.day_boundary_offset_hours,
        });
    }

    let mut grid_hourly = interpolate_to_hourly(&grid_3h)?;
    grid_hourly.set_population_weights(&regions);
    debug_assert_eq!(grid_hourly.timestamps.len(), total_hours);

    // --- demand per region, exactly from the model equation ---
    let model_spec = ModelSpec::new(spec.knots_hod, spec.knots_hoy, false);
    let cal = calendar_features(&grid_hourly.timestamps, spec.day_boundary_offset_hours);
    let noise = Normal::new(0.0, spec.noise_sd.max(f64::MIN_POSITIVE)).unwrap();

    let mut weather_all = Vec::with_capacity(spec.n_regions);
    let mut loads = Vec::with_capacity(spec.n_regions);
    let mut truths = Vec::with_capacity(spec.n_regions);
    for region in &regions {
        let weather = aggregate_region(&grid_hourly, region, DEFAULT_THRESHOLD_C)?;

        let mut beta = vec![0.0; model_spec.tensor_count()];
        let (k, l) = (spec.knots_hod, spec.knots_hoy);
        for m in 0..7 {
            for li in 0..l {
                for ki in 0..k {
                    beta[(m * l + li) * k + ki] = if ki == 0 && li == 0 {
                        spec.base_log_level + rng.random_range(-0.05..0.05)
                    } else {
                        rng.random_range(-spec.beta_sd..spec.beta_sd)
                    };
                }
            }
        }
        let truth_model = FittedDemandModel {
            region_id: region.region_id.clone(),
            spec: model_spec,
            threshold_c: DEFAULT_THRESHOLD_C,
            day_boundary_offset_hours: spec.day_boundary_offset_hours,
            beta: beta.clone(),
            alpha_h: spec.alpha_h,
            alpha_c: spec.alpha_c,
            gamma_h: None,
            gamma_c: None,
            train_start: grid_hourly.timestamps[0],
            residuals: vec![],
            diagnostics: FitDiagnostics { in_sample_r2: 1.0, cv_r2: None, rmse: 0.0 },
            se: None,
            rank: model_spec.param_count(),
        };
        let log_pred = predict_log(&truth_model, &cal, Some(&weather))?;

        let mut demand = Vec::with_capacity(total_hours);
        let mut share = Vec::with_capacity(total_hours);
        let mut hard = Vec::with_capacity(total_hours);
        for t in 0..total_hours {
            let eps = if spec.noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            let y = (log_pred[t] + eps).exp();
            let ratio =
                (-(spec.alpha_h * weather.hdh[t] + spec.alpha_c * weather.cdh[t])).exp().min(1.0);
            demand.push(y);
            hard.push(y * ratio);
            share.push(1.0 - ratio);
        }
        loads.push(LoadSeries {
            region_id: region.region_id.clone(),
            timestamps: grid_hourly.timestamps.clone(),
            demand_mw: demand,
            mask: vec![true; total_hours],
        });
        truths.push(RegionTruth {
            region_id: region.region_id.clone(),
            alpha_h: spec.alpha_h,
            alpha_c: spec.alpha_c,
            beta,
            share_alpha1: share,
            hard_mw: hard,
        });
        weather_all.push(weather);
    }

    Ok(SyntheticData {
        spec: spec.clone(),
        grid_3h,
        grid_hourly,
        regions,
        weather: weather_all,
        loads,
        truth: truths,
    })
}

/// Write the CSV fixtures plus ground-truth files; returns the paths.
pub fn write_fixtures(data: &SyntheticData, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let grid = dir.join("grid.csv");
    let regions = dir.join("regions.csv");
    let load = dir.join("load.csv");
    let shares = dir.join("truth_shares.csv");
    let coeffs = dir.join("truth_coefficients.json");

    io::write_grid_csv(&grid, &data.grid_3h)?;
    io::write_regions_csv(&regions, &data.regions)?;
    io::write_load_csv(&load, &data.loads)?;

    {
        use std::io::Write;
        let mut out = std::io::BufWriter::new(std::fs::File::create(&shares)?);
        writeln!(out, "region_id,timestamp_utc,share_alpha1,hard_mw")?;
        for (load, truth) in data.loads.iter().zip(&data.truth) {
            for t in 0..load.len() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    load.region_id,
                    load.timestamps[t].to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                    truth.share_alpha1[t],
                    truth.hard_mw[t]
                )?;
            }
        }
    }
    std::fs::write(&coeffs, serde_json::to_string_pretty(&data.truth)?)?;

    Ok(vec![grid, regions, load, shares, coeffs])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SyntheticSpec {
        SyntheticSpec {
            n_regions: 2,
            cells_per_region: 2,
            start_year: 2017,
            n_years: 1,
            knots_hod: 3,
            knots_hoy: 3,
            noise_sd: 0.0,
            seed: 7,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = small_spec();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.grid_3h.temps, b.grid_3h.temps);
        assert_eq!(a.loads[0].demand_mw, b.loads[0].demand_mw);
        assert_eq!(a.truth[1].beta, b.truth[1].beta);

        let different = generate(&SyntheticSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.loads[0].demand_mw, different.loads[0].demand_mw);
    }

    #[test]
    fn fixtures_are_byte_identical_for_same_seed() {
        use tempfile::tempdir;
        let spec = small_spec();
        let d1 = tempdir().unwrap();
        let d2 = tempdir().unwrap();
        write_fixtures(&generate(&spec).unwrap(), d1.path()).unwrap();
        write_fixtures(&generate(&spec).unwrap(), d2.path()).unwrap();
        for name in ["grid.csv", "regions.csv", "load.csv", "truth_shares.csv"] {
            let a = std::fs::read(d1.path().join(name)).unwrap();
            let b = std::fs::read(d2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between runs");
        }
    }

    #[test]
    fn local_years_are_complete() {
        let spec = small_spec();
        let data = generate(&spec).unwrap();
        let years =
            crate::regress::complete_local_years(&data.loads[0], spec.day_boundary_offset_hours)
                .unwrap();
        assert_eq!(years.len(), 1);
        assert_eq!(years[0].0, 2017);
    }

    #[test]
    fn noiseless_fit_recovers_truth() {
        let spec = small_spec();
        let data = generate(&spec).unwrap();
        let model_spec = ModelSpec::new(spec.knots_hod, spec.knots_hoy, false);
        let model = crate::regress::fit(
            &data.loads[0],
            &data.weather[0],
            &model_spec,
            spec.day_boundary_offset_hours,
            &Default::default(),
        )
        .unwrap();
        assert!((model.alpha_h - spec.alpha_h).abs() < 1e-8);
        assert!((model.alpha_c - spec.alpha_c).abs() < 1e-8);
        for (est, truth) in model.beta.iter().zip(&data.truth[0].beta) {
            assert!((est - truth).abs() < 1e-7, "{est} vs {truth}");
        }
    }
}
