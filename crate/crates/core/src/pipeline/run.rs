//! Staged pipeline execution: weather aggregation, per-region fits,
//! shiftable decompositions, pooled flattening, reports, and the optional
//! climate scenario. Deterministic given inputs: regions process in id
//! order, all maps are ordered, and every artifact is hashed into the
//! manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flatten::{
    alpha_sweep, default_alpha_grid, flatten_series, pool_regions, DayProfile, FlattenedDay,
    FlattenedSeries, PoolLevel,
};
use crate::io;
use crate::metrics::{
    demand_temperature_profile, flatten_report, seasonal_slice, FlattenReport,
    NormalizationBasis, PoolSlice, Season,
};
use crate::pipeline::{validate_inputs, Manifest, PipelineConfig};
use crate::regress::{
    baseline_fit, cross_validate, fit, CvResult, FitOptions, FittedDemandModel, LoadSeries,
    ModelSpec,
};
use crate::shiftable::{climate_shift, hard_demand, shiftable_split, ClimateScenario, ShiftableSeries};
use crate::weather::{
    aggregate_region, climate_interaction_aggregates, in_sample_normals, interpolate_to_hourly,
    CellNormals, RegionSpec, RegionalWeather,
};

pub const POOL_LEVELS: [PoolLevel; 3] = [PoolLevel::Region, PoolLevel::Interconnect, PoolLevel::Nation];
pub const SEASONS: [Season; 3] = [Season::All, Season::Winter, Season::Summer];

/// Restrict a full-grid weather series to the load's hourly span.
pub fn slice_weather(
    weather: &RegionalWeather,
    timestamps: &[DateTime<Utc>],
) -> Result<RegionalWeather> {
    weather.slice_to(timestamps)
}

#[derive(Debug)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub out_dir: PathBuf,
}

struct RegionRun {
    region: RegionSpec,
    load: LoadSeries,
    /// Weather over the load span.
    weather: RegionalWeather,
    model: FittedDemandModel,
    baseline: FittedDemandModel,
    cv: Option<CvResult>,
    /// Full-alpha counterfactual decomposition input.
    hard_full: Vec<f64>,
}

/// Execute every stage and return the written manifest.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutput> {
    cfg.check()?;
    let report = validate_inputs(cfg)?;
    if !report.is_clean() {
        return Err(Error::Validation(report));
    }

    let out = cfg.out_dir.clone();
    for sub in ["weather", "models", "shiftable", "reports"] {
        fs::create_dir_all(out.join(sub))?;
    }
    for level in POOL_LEVELS {
        fs::create_dir_all(out.join("flattened").join(level.as_str()))?;
    }
    let mut manifest = Manifest::new();

    // --- inputs ---
    let grid_3h = io::read_grid_csv(&cfg.grid)?;
    let regions = io::read_regions_csv(&cfg.regions)?;
    let loads = io::read_load_csv(&cfg.load)?;
    let mut grid = interpolate_to_hourly(&grid_3h)?;
    grid.set_population_weights(&regions);
    let normals: CellNormals = match &cfg.normals {
        Some(path) => io::read_normals_csv(path)?,
        None => in_sample_normals(&grid, cfg.threshold_c),
    };

    let region_of: BTreeMap<&str, &RegionSpec> =
        regions.iter().map(|r| (r.region_id.as_str(), r)).collect();
    for load in &loads {
        if !region_of.contains_key(load.region_id.as_str()) {
            return Err(Error::invalid(format!(
                "load region {} has no region definition",
                load.region_id
            )));
        }
    }

    // --- weather stage ---
    let full_weather: Vec<RegionalWeather> = loads
        .par_iter()
        .map(|load| {
            let region = region_of[load.region_id.as_str()];
            if cfg.interactions {
                climate_interaction_aggregates(&grid, region, &normals, cfg.threshold_c)
            } else {
                aggregate_region(&grid, region, cfg.threshold_c)
            }
        })
        .collect::<Result<_>>()?;
    for weather in &full_weather {
        let path = out.join("weather").join(format!("{}.csv", weather.region_id));
        io::write_weather_csv(&path, weather)?;
        manifest.add(&out, &path)?;
    }
    if cfg.write_cache {
        let path = out.join("weather").join("grid_hourly.gfx");
        io::write_grid_cache(&path, &grid)?;
        manifest.add(&out, &path)?;
    }

    // --- fit stage ---
    let fit_opts = FitOptions { newey_west_lag: cfg.newey_west_lag };
    let runs: Vec<RegionRun> = loads
        .into_par_iter()
        .zip(full_weather.par_iter())
        .map(|(load, weather_full)| -> Result<RegionRun> {
            let region = region_of[load.region_id.as_str()].clone();
            let weather = weather_full.slice_to(&load.timestamps)?;
            let offset = region.day_boundary_offset_hours;

            let (spec, cv) = if cfg.cv {
                let grid_specs: Vec<ModelSpec> = cfg
                    .cv_grid_hod
                    .iter()
                    .flat_map(|&k| {
                        cfg.cv_grid_hoy
                            .iter()
                            .map(move |&l| ModelSpec::new(k, l, cfg.interactions))
                    })
                    .collect();
                let cv = cross_validate(&load, &weather, &grid_specs, offset)?;
                (cv.best, Some(cv))
            } else {
                (ModelSpec::new(cfg.knots_hod, cfg.knots_hoy, cfg.interactions), None)
            };

            let mut model = fit(&load, &weather, &spec, offset, &fit_opts)?;
            if let Some(cv) = &cv {
                model.diagnostics.cv_r2 =
                    cv.entries.iter().find(|e| e.spec == cv.best).map(|e| e.mean_r2);
            }
            let baseline = baseline_fit(&load, &spec, offset, &FitOptions::default())?;
            let hard_full = hard_demand(&model, &weather, &load)?;
            Ok(RegionRun { region, load, weather, model, baseline, cv, hard_full })
        })
        .collect::<Result<_>>()?;

    for run in &runs {
        let path = out.join("models").join(format!("{}.json", run.model.region_id));
        io::save_model(&path, &run.model)?;
        manifest.add(&out, &path)?;
        if let Some(cv) = &run.cv {
            let path = out.join("models").join(format!("cv_{}.csv", run.model.region_id));
            write_cv_table(&path, cv)?;
            manifest.add(&out, &path)?;
        }
    }
    {
        let path = out.join("models").join("fit_summary.csv");
        write_fit_summary(&path, &runs)?;
        manifest.add(&out, &path)?;
    }

    // --- shiftable stage ---
    // region-order series per alpha; alpha = 1 is always computed for the sweep
    let mut by_alpha: Vec<Vec<ShiftableSeries>> = Vec::with_capacity(cfg.alphas.len());
    for &alpha in &cfg.alphas {
        let series: Vec<ShiftableSeries> = runs
            .iter()
            .map(|run| {
                shiftable_split(
                    &run.hard_full,
                    &run.load,
                    alpha,
                    run.region.day_boundary_offset_hours,
                )
            })
            .collect::<Result<_>>()?;
        for s in &series {
            let path = out.join("shiftable").join(format!("{}_a{}.csv", s.pool_id, alpha));
            io::write_shiftable_csv(&path, s)?;
            manifest.add(&out, &path)?;
        }
        by_alpha.push(series);
    }
    let base_alpha1: Vec<ShiftableSeries> = runs
        .iter()
        .map(|run| {
            shiftable_split(&run.hard_full, &run.load, 1.0, run.region.day_boundary_offset_hours)
        })
        .collect::<Result<_>>()?;

    // --- flatten stage ---
    let region_specs: Vec<RegionSpec> = runs.iter().map(|r| r.region.clone()).collect();
    let flattened = flatten_all(cfg, &by_alpha, &region_specs, &out, Some(&mut manifest), "flattened")?;

    // --- reports ---
    let reports = assemble_reports(cfg, &flattened, None)?;
    write_reports(&out.join("reports"), "report", &reports, &mut manifest, &out)?;

    if cfg.sweep {
        let path = out.join("reports").join("alpha_sweep.csv");
        write_alpha_sweep(&path, &base_alpha1)?;
        manifest.add(&out, &path)?;
    }
    {
        let path = out.join("reports").join("demand_temperature.csv");
        write_demand_temperature(&path, &runs)?;
        manifest.add(&out, &path)?;
    }

    // --- climate scenario ---
    if let Some(delta_t) = cfg.delta_t {
        let scenario = ClimateScenario::new(delta_t)?;
        for sub in ["scenario/shiftable"] {
            fs::create_dir_all(out.join(sub))?;
        }
        for level in POOL_LEVELS {
            fs::create_dir_all(out.join("scenario/flattened").join(level.as_str()))?;
        }

        let shifted: Vec<(LoadSeries, Vec<f64>)> = runs
            .par_iter()
            .map(|run| -> Result<(LoadSeries, Vec<f64>)> {
                let (shifted_load, base) = climate_shift(
                    &run.model,
                    &grid,
                    &run.region,
                    Some(&normals),
                    &run.load,
                    scenario,
                    1.0,
                )?;
                // recover the unscaled counterfactual for re-splitting
                let hard_full: Vec<f64> = shifted_load
                    .demand_mw
                    .iter()
                    .zip(&base.flexible_mw)
                    .map(|(obs, flex)| obs - flex)
                    .collect();
                Ok((shifted_load, hard_full))
            })
            .collect::<Result<_>>()?;

        let mut scen_by_alpha: Vec<Vec<ShiftableSeries>> = Vec::with_capacity(cfg.alphas.len());
        for &alpha in &cfg.alphas {
            let series: Vec<ShiftableSeries> = runs
                .iter()
                .zip(&shifted)
                .map(|(run, (load, hard))| {
                    shiftable_split(hard, load, alpha, run.region.day_boundary_offset_hours)
                })
                .collect::<Result<_>>()?;
            for s in &series {
                let path =
                    out.join("scenario/shiftable").join(format!("{}_a{}.csv", s.pool_id, alpha));
                io::write_shiftable_csv(&path, s)?;
                manifest.add(&out, &path)?;
            }
            scen_by_alpha.push(series);
        }

        let scen_flattened = flatten_all(
            cfg,
            &scen_by_alpha,
            &region_specs,
            &out,
            Some(&mut manifest),
            "scenario/flattened",
        )?;
        // scenario percentiles are normalized by historic observed means
        let scen_reports = assemble_reports(cfg, &scen_flattened, Some((&flattened, delta_t)))?;
        write_reports(&out.join("reports"), "report_scenario", &scen_reports, &mut manifest, &out)?;
    }

    let manifest_path = manifest.write(&out)?;
    Ok(RunOutput { manifest, manifest_path, out_dir: out })
}

/// Pool each alpha's regional series at every level and flatten. Returns
/// `[level][alpha] -> pooled flattened series`, writing CSVs when an
/// output root is given.
fn flatten_all(
    cfg: &PipelineConfig,
    by_alpha: &[Vec<ShiftableSeries>],
    regions: &[RegionSpec],
    out: &Path,
    mut manifest: Option<&mut Manifest>,
    subdir: &str,
) -> Result<Vec<Vec<Vec<FlattenedSeries>>>> {
    let mut result = Vec::with_capacity(POOL_LEVELS.len());
    for level in POOL_LEVELS {
        let mut per_alpha = Vec::with_capacity(by_alpha.len());
        for (alpha_idx, series) in by_alpha.iter().enumerate() {
            let alpha = cfg.alphas[alpha_idx];
            let pooled = pool_regions(series, regions, level, cfg.pool_offset_hours)?;
            let flattened: Vec<FlattenedSeries> =
                pooled.par_iter().map(flatten_series).collect::<Result<_>>()?;
            if let Some(manifest) = manifest.as_deref_mut() {
                for f in &flattened {
                    let path = out
                        .join(subdir)
                        .join(level.as_str())
                        .join(format!("{}_a{}.csv", f.pool_id, alpha));
                    io::write_flattened_csv(&path, &f.days)?;
                    manifest.add(out, &path)?;
                }
            }
            per_alpha.push(flattened);
        }
        result.push(per_alpha);
    }
    Ok(result)
}

/// Build the full (level x season x alpha) report grid. For scenario
/// reports, percentile normalization uses the historic flattened set.
fn assemble_reports(
    cfg: &PipelineConfig,
    flattened: &[Vec<Vec<FlattenedSeries>>],
    scenario: Option<(&[Vec<Vec<FlattenedSeries>>], f64)>,
) -> Result<Vec<FlattenReport>> {
    let mut rows = Vec::new();
    for (level_idx, level) in POOL_LEVELS.iter().enumerate() {
        for season in SEASONS {
            for (alpha_idx, &alpha) in cfg.alphas.iter().enumerate() {
                let pools_flat = &flattened[level_idx][alpha_idx];
                let mut pools = Vec::with_capacity(pools_flat.len());
                for fs in pools_flat {
                    let all_days: Vec<&(DayProfile, FlattenedDay)> = fs.days.iter().collect();
                    let days = seasonal_slice(&all_days, season);
                    let baseline = scenario.map(|(historic, _)| {
                        historic[level_idx][0]
                            .iter()
                            .find(|h| h.pool_id == fs.pool_id)
                            .map(|h| {
                                let hist_days: Vec<&(DayProfile, FlattenedDay)> =
                                    h.days.iter().collect();
                                let sliced = seasonal_slice(&hist_days, season);
                                NormalizationBasis::from_days(&sliced)
                            })
                            .unwrap_or_else(|| NormalizationBasis::from_days(&days))
                    });
                    pools.push(PoolSlice {
                        pool_id: fs.pool_id.clone(),
                        weight: fs.mean_observed(),
                        days,
                        baseline,
                    });
                }
                if pools.iter().all(|p| p.days.is_empty()) {
                    log::warn!(
                        "no {} days at level {} alpha {alpha}; row skipped",
                        season.as_str(),
                        level.as_str()
                    );
                    continue;
                }
                rows.push(flatten_report(
                    &pools,
                    level.as_str(),
                    season,
                    alpha,
                    scenario.map(|(_, dt)| dt),
                )?);
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// artifact writers

fn write_cv_table(path: &Path, cv: &CvResult) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    write!(out, "knots_hod,knots_hoy,interactions,params,mean_cv_r2")?;
    for year in &cv.years {
        write!(out, ",r2_{year}")?;
    }
    writeln!(out, ",selected")?;
    for entry in &cv.entries {
        write!(
            out,
            "{},{},{},{},{}",
            entry.spec.knots_hod,
            entry.spec.knots_hoy,
            entry.spec.include_climate_interactions,
            entry.spec.param_count(),
            entry.mean_r2
        )?;
        for r2 in &entry.fold_r2 {
            write!(out, ",{r2}")?;
        }
        writeln!(out, ",{}", entry.spec == cv.best)?;
    }
    Ok(())
}

fn write_fit_summary(path: &Path, runs: &[RegionRun]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(
        out,
        "region_id,knots_hod,knots_hoy,interactions,params,in_sample_r2,cv_r2,rmse,\
         baseline_in_sample_r2,baseline_rmse,weather_rmse_reduction_pct,\
         alpha_h,alpha_c,se_alpha_h,se_alpha_c,gamma_h,gamma_c,rank"
    )?;
    for run in runs {
        let m = &run.model;
        let n_tensor = m.spec.tensor_count();
        let (se_h, se_c) = match &m.se {
            Some(se) => (se[n_tensor].to_string(), se[n_tensor + 1].to_string()),
            None => (String::new(), String::new()),
        };
        let rmse_cut = if run.baseline.diagnostics.rmse > 0.0 {
            100.0 * (1.0 - m.diagnostics.rmse / run.baseline.diagnostics.rmse)
        } else {
            0.0
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.region_id,
            m.spec.knots_hod,
            m.spec.knots_hoy,
            m.spec.include_climate_interactions,
            m.spec.param_count(),
            m.diagnostics.in_sample_r2,
            m.diagnostics.cv_r2.map(|v| v.to_string()).unwrap_or_default(),
            m.diagnostics.rmse,
            run.baseline.diagnostics.in_sample_r2,
            run.baseline.diagnostics.rmse,
            rmse_cut,
            m.alpha_h,
            m.alpha_c,
            se_h,
            se_c,
            m.gamma_h.map(|v| v.to_string()).unwrap_or_default(),
            m.gamma_c.map(|v| v.to_string()).unwrap_or_default(),
            m.rank
        )?;
    }
    Ok(())
}

/// Write the report grid as CSV, the percentile grid, and the plain-text
/// metric table, registering each file in the manifest.
pub fn write_report_files(
    dir: &Path,
    stem: &str,
    reports: &[FlattenReport],
    manifest: &mut Manifest,
    root: &Path,
) -> Result<()> {
    let csv_path = dir.join(format!("{stem}.csv"));
    {
        let mut out = BufWriter::new(fs::File::create(&csv_path)?);
        writeln!(
            out,
            "pool_level,season,alpha,scenario_delta_t,n_pools,n_days,\
             daily_peak_reduction_pct,daily_base_increase_pct,daily_sd_reduction_pct,\
             overall_peak_reduction_pct,overall_base_increase_pct,overall_sd_reduction_pct,\
             flattenable_share_pct,\
             daily_peak_reduction_unweighted_pct,daily_base_increase_unweighted_pct,\
             daily_sd_reduction_unweighted_pct,overall_peak_reduction_unweighted_pct,\
             overall_base_increase_unweighted_pct,overall_sd_reduction_unweighted_pct,\
             flattenable_share_unweighted_pct"
        )?;
        for r in reports {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.pool_level,
                r.season.as_str(),
                r.alpha,
                r.scenario_delta_t.map(|v| v.to_string()).unwrap_or_default(),
                r.n_pools,
                r.n_days,
                r.daily.peak_reduction_pct,
                r.daily.base_increase_pct,
                r.daily.sd_reduction_pct,
                r.overall.peak_reduction_pct,
                r.overall.base_increase_pct,
                r.overall.sd_reduction_pct,
                r.flattenable_share_pct,
                r.daily_unweighted.peak_reduction_pct,
                r.daily_unweighted.base_increase_pct,
                r.daily_unweighted.sd_reduction_pct,
                r.overall_unweighted.peak_reduction_pct,
                r.overall_unweighted.base_increase_pct,
                r.overall_unweighted.sd_reduction_pct,
                r.flattenable_share_unweighted_pct
            )?;
        }
    }
    manifest.add(root, &csv_path)?;

    let pct_path = dir.join(format!("{stem}_percentiles.csv"));
    {
        let mut out = BufWriter::new(fs::File::create(&pct_path)?);
        writeln!(out, "pool_level,season,alpha,scenario_delta_t,family,basis,p1,mean,p99")?;
        for r in reports {
            let scen = r.scenario_delta_t.map(|v| v.to_string()).unwrap_or_default();
            for (family, basis, t) in [
                ("base", "daily", r.percentiles.base_daily),
                ("base", "overall", r.percentiles.base_overall),
                ("peak", "daily", r.percentiles.peak_daily),
                ("peak", "overall", r.percentiles.peak_overall),
            ] {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.pool_level,
                    r.season.as_str(),
                    r.alpha,
                    scen,
                    family,
                    basis,
                    t.p1,
                    t.mean,
                    t.p99
                )?;
            }
        }
    }
    manifest.add(root, &pct_path)?;

    let table_path = dir.join(format!("{stem}_table.txt"));
    write_report_table(&table_path, reports)?;
    manifest.add(root, &table_path)?;
    Ok(())
}

/// Plain-text metric grid: rows are pooling level within season blocks,
/// one column family per metric, alphas joined with " | ".
fn write_report_table(path: &Path, reports: &[FlattenReport]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    let mut seasons: Vec<Season> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    for r in reports {
        if !seasons.contains(&r.season) {
            seasons.push(r.season);
        }
        if !alphas.iter().any(|a| a == &r.alpha) {
            alphas.push(r.alpha);
        }
    }
    let alpha_header = alphas
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(" | ");
    writeln!(
        out,
        "Changes in daily peak and base load and within-day variability when demand is flattened"
    )?;
    writeln!(out, "(demand-weighted averages; alpha values: {alpha_header})\n")?;
    let metric = |r: &FlattenReport, m: usize| match m {
        0 => r.daily.peak_reduction_pct,
        1 => r.daily.base_increase_pct,
        2 => r.daily.sd_reduction_pct,
        _ => r.flattenable_share_pct,
    };
    let headers = ["Peak Load Reduction", "Base Load Increase", "SD Reduction", "Flattenable Days"];
    for season in &seasons {
        writeln!(out, "-- {} --", season.as_str())?;
        writeln!(out, "{:<14} {}", "Connectivity", headers.join("  |  "))?;
        for level in POOL_LEVELS {
            let cells: Vec<String> = (0..4)
                .map(|m| {
                    alphas
                        .iter()
                        .map(|a| {
                            reports
                                .iter()
                                .find(|r| {
                                    r.season == *season
                                        && r.pool_level == level.as_str()
                                        && r.alpha == *a
                                })
                                .map(|r| format!("{:.1}", metric(r, m)))
                                .unwrap_or_else(|| "-".into())
                        })
                        .collect::<Vec<_>>()
                        .join(" | ")
                })
                .collect();
            writeln!(out, "{:<14} {}", level.as_str(), cells.join("  |  "))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_alpha_sweep(path: &Path, base_alpha1: &[ShiftableSeries]) -> Result<()> {
    let grid = default_alpha_grid();
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "pool_id,alpha,daily_sd_reduction_pct,overall_sd_reduction_pct")?;
    let mut weighted: Vec<(f64, f64)> = vec![(0.0, 0.0); grid.len()];
    let mut weight_sum = 0.0;
    let curves: Vec<(String, f64, Vec<crate::flatten::AlphaSweepPoint>)> = base_alpha1
        .par_iter()
        .map(|series| -> Result<_> {
            let points = alpha_sweep(series, &grid)?;
            let mean_demand = {
                let valid: Vec<f64> = series
                    .observed_mw
                    .iter()
                    .zip(&series.mask)
                    .filter(|(_, m)| **m)
                    .map(|(o, _)| *o)
                    .collect();
                valid.iter().sum::<f64>() / valid.len().max(1) as f64
            };
            Ok((series.pool_id.clone(), mean_demand, points))
        })
        .collect::<Result<_>>()?;
    for (pool_id, weight, points) in &curves {
        for p in points {
            writeln!(
                out,
                "{},{},{},{}",
                pool_id, p.alpha, p.daily_sd_reduction_pct, p.overall_sd_reduction_pct
            )?;
        }
        weight_sum += weight;
        for (acc, p) in weighted.iter_mut().zip(points) {
            acc.0 += weight * p.daily_sd_reduction_pct;
            acc.1 += weight * p.overall_sd_reduction_pct;
        }
    }
    if weight_sum > 0.0 {
        for (i, alpha) in grid.iter().enumerate() {
            writeln!(
                out,
                "demand_weighted_average,{},{},{}",
                alpha,
                weighted[i].0 / weight_sum,
                weighted[i].1 / weight_sum
            )?;
        }
    }
    Ok(())
}

fn write_demand_temperature(path: &Path, runs: &[RegionRun]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "region_id,covariate,bin_center,mean_demand_index,count")?;
    for run in runs {
        for (name, series) in [
            ("temp_c", &run.weather.mean_temp_c),
            ("cdh", &run.weather.cdh),
            ("hdh", &run.weather.hdh),
        ] {
            let bins =
                demand_temperature_profile(&run.load.demand_mw, &run.load.mask, series, 1.0)?;
            for b in bins {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    run.load.region_id,
                    name,
                    b.center,
                    b.mean_index.map(|v| v.to_string()).unwrap_or_default(),
                    b.count
                )?;
            }
        }
    }
    Ok(())
}
