//! `gridflex`: estimate temperature-sensitive electricity demand from
//! hourly load and gridded temperatures, and simulate within-day load
//! flattening under configurable shiftability and pooling.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gridflex_core::error::Error as CoreError;
use gridflex_core::flatten::{flatten_series, pool_regions, PoolLevel};
use gridflex_core::io;
use gridflex_core::metrics::{seasonal_slice, Season};
use gridflex_core::pipeline::{run_pipeline, validate_inputs, PipelineConfig};
use gridflex_core::regress::{
    baseline_fit, cross_validate, fit, FitOptions, LoadSeries, ModelSpec,
};
use gridflex_core::shiftable::{climate_shift, decompose, shiftable_split, ClimateScenario};
use gridflex_core::synthetic::{generate, write_fixtures, SyntheticSpec};
use gridflex_core::weather::{
    aggregate_region, climate_interaction_aggregates, in_sample_normals, interpolate_to_hourly,
    RegionSpec, RegionalWeather,
};

#[derive(Parser)]
#[command(
    name = "gridflex",
    version,
    about = "Temperature-sensitive demand estimation and within-day load flattening"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check input files for schema, continuity, and range violations.
    Validate(ValidateArgs),
    /// Interpolate the temperature grid to hourly and aggregate
    /// per-region degree-hour series.
    Weather(WeatherArgs),
    /// Fit the per-region demand model.
    Fit(FitArgs),
    /// Cross-validate knot counts over a spec grid and report the table.
    Cv(FitArgs),
    /// Decompose observed load into hard and flexible components.
    Shiftable(ShiftableArgs),
    /// Water-fill daily profiles, optionally pooling regions first.
    Flatten(FlattenArgs),
    /// Aggregate flattened outputs into the report tables.
    Report(ReportArgs),
    /// Generate seeded synthetic fixtures with ground truth.
    Synthetic(SyntheticArgs),
    /// Run the full pipeline and write a hashed artifact manifest.
    Run(RunArgs),
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    regions: PathBuf,
    #[arg(long)]
    load: PathBuf,
    #[arg(long)]
    normals: Option<PathBuf>,
    /// Emit the issue list as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct WeatherArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    regions: PathBuf,
    /// Output directory for per-region weather CSVs.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 18.0)]
    threshold_c: f64,
    /// Also compute climate-interaction aggregates.
    #[arg(long)]
    interactions: bool,
    /// Long-run normals CSV; in-sample means when omitted.
    #[arg(long)]
    normals: Option<PathBuf>,
    /// Also write the binary hourly-grid cache.
    #[arg(long)]
    cache: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    load: PathBuf,
    /// Weather CSV file (single region) or directory of `<region>.csv`.
    #[arg(long)]
    weather: PathBuf,
    /// Region definitions (supplies the day-boundary offsets).
    #[arg(long)]
    regions: PathBuf,
    /// Knot counts as `K,L` (hour-of-day, hour-of-year).
    #[arg(long, value_parser = parse_spec, default_value = "19,6")]
    spec: (usize, usize),
    #[arg(long)]
    interactions: bool,
    /// Select the spec by year-out cross-validation instead.
    #[arg(long)]
    cv: bool,
    #[arg(long, value_delimiter = ',', default_value = "6,10,14,19,24")]
    cv_grid_hod: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4,6,9,12")]
    cv_grid_hoy: Vec<usize>,
    /// Newey-West bandwidth for standard errors; negative disables.
    #[arg(long, default_value_t = 24)]
    nw_lag: i64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShiftableArgs {
    /// Model artifact JSON (single region) or directory of `<region>.json`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    load: PathBuf,
    /// Weather CSV file or directory; unused under `--delta-t`.
    #[arg(long)]
    weather: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Uniform warming in °C; recomputes weather from the grid per cell.
    #[arg(long)]
    delta_t: Option<f64>,
    /// 3-hourly grid CSV, required with `--delta-t`.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Region definitions, required with `--delta-t`.
    #[arg(long)]
    regions: Option<PathBuf>,
    #[arg(long)]
    normals: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FlattenArgs {
    /// Shiftable CSV file or directory of them.
    #[arg(long)]
    shiftable: PathBuf,
    #[arg(long)]
    regions: PathBuf,
    /// Pooling level: region, interconnect, or nation.
    #[arg(long, default_value = "region")]
    pool: String,
    /// Rescale the decomposition to this alpha, treating the input as the
    /// alpha = 1 decomposition.
    #[arg(long)]
    alpha: Option<f64>,
    /// Day-boundary offset for pooled series.
    #[arg(long, default_value_t = -5)]
    pool_offset: i32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding `flattened/{level}/{pool}_a{alpha}.csv`.
    #[arg(long)]
    inputs: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "all,winter,summer")]
    seasons: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,1")]
    alphas: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    regions: usize,
    #[arg(long, default_value_t = 4)]
    cells: usize,
    #[arg(long, default_value_t = 3)]
    years: usize,
    #[arg(long, default_value_t = 2016)]
    start_year: i32,
    #[arg(long, default_value_t = 0.02)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0.037)]
    alpha_h: f64,
    #[arg(long, default_value_t = 0.044)]
    alpha_c: f64,
    #[arg(long, value_parser = parse_spec, default_value = "6,4")]
    knots: (usize, usize),
    #[arg(long, default_value_t = -5)]
    offset: i32,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    regions: Option<PathBuf>,
    #[arg(long)]
    load: Option<PathBuf>,
    #[arg(long)]
    normals: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    threshold_c: Option<f64>,
    #[arg(long, value_parser = parse_spec)]
    spec: Option<(usize, usize)>,
    #[arg(long)]
    interactions: bool,
    #[arg(long)]
    cv: bool,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long)]
    pool_offset: Option<i32>,
    #[arg(long)]
    delta_t: Option<f64>,
    #[arg(long)]
    nw_lag: Option<i64>,
    #[arg(long)]
    cache: bool,
    #[arg(long)]
    no_sweep: bool,
}

fn parse_spec(s: &str) -> std::result::Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected K,L, got {s:?}"));
    }
    let k = parts[0].trim().parse().map_err(|_| format!("bad K in {s:?}"))?;
    let l = parts[1].trim().parse().map_err(|_| format!("bad L in {s:?}"))?;
    Ok((k, l))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<CoreError>() {
                Some(CoreError::Validation(_)) => ExitCode::from(2),
                Some(CoreError::Numerical(_)) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Weather(args) => cmd_weather(args).map(|_| ExitCode::SUCCESS),
        Command::Fit(args) => cmd_fit(args, false).map(|_| ExitCode::SUCCESS),
        Command::Cv(args) => cmd_fit(args, true).map(|_| ExitCode::SUCCESS),
        Command::Shiftable(args) => cmd_shiftable(args).map(|_| ExitCode::SUCCESS),
        Command::Flatten(args) => cmd_flatten(args).map(|_| ExitCode::SUCCESS),
        Command::Report(args) => cmd_report(args).map(|_| ExitCode::SUCCESS),
        Command::Synthetic(args) => cmd_synthetic(args).map(|_| ExitCode::SUCCESS),
        Command::Run(args) => cmd_run(args).map(|_| ExitCode::SUCCESS),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let cfg = PipelineConfig {
        grid: args.grid,
        regions: args.regions,
        load: args.load,
        normals: args.normals,
        ..Default::default()
    };
    let report = validate_inputs(&cfg)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else if report.is_clean() {
        println!("inputs valid");
    } else {
        print!("{report}");
        println!("{} issue(s) found", report.issues.len());
    }
    Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_weather(args: WeatherArgs) -> Result<()> {
    let grid_3h = io::read_grid_csv(&args.grid)?;
    let regions = io::read_regions_csv(&args.regions)?;
    let mut grid = interpolate_to_hourly(&grid_3h)?;
    grid.set_population_weights(&regions);
    std::fs::create_dir_all(&args.out)?;

    let normals = match &args.normals {
        Some(path) => Some(io::read_normals_csv(path)?),
        None if args.interactions => Some(in_sample_normals(&grid, args.threshold_c)),
        None => None,
    };
    for region in &regions {
        let weather = if args.interactions {
            climate_interaction_aggregates(&grid, region, normals.as_ref().unwrap(), args.threshold_c)?
        } else {
            aggregate_region(&grid, region, args.threshold_c)?
        };
        let path = args.out.join(format!("{}.csv", region.region_id));
        io::write_weather_csv(&path, &weather)?;
        println!(
            "{}: {} hours, mean CDH {:.3}, mean HDH {:.3} -> {}",
            region.region_id,
            weather.len(),
            weather.mean_cdh,
            weather.mean_hdh,
            path.display()
        );
    }
    if args.cache {
        let path = args.out.join("grid_hourly.gfx");
        io::write_grid_cache(&path, &grid)?;
        println!("cache -> {}", path.display());
    }
    Ok(())
}

fn weather_for_region(base: &Path, region_id: &str) -> Result<RegionalWeather> {
    let path = if base.is_dir() { base.join(format!("{region_id}.csv")) } else { base.to_path_buf() };
    let weather = io::read_weather_csv(&path)
        .with_context(|| format!("reading weather for {region_id}"))?;
    if weather.region_id != region_id {
        bail!("weather file {} is for region {}, expected {region_id}", path.display(), weather.region_id);
    }
    Ok(weather)
}

fn offsets_by_region(path: &Path) -> Result<BTreeMap<String, RegionSpec>> {
    Ok(io::read_regions_csv(path)?
        .into_iter()
        .map(|r| (r.region_id.clone(), r))
        .collect())
}

fn cmd_fit(args: FitArgs, cv_only: bool) -> Result<()> {
    let loads = io::read_load_csv(&args.load)?;
    let regions = offsets_by_region(&args.regions)?;
    std::fs::create_dir_all(&args.out)?;
    let opts = FitOptions {
        newey_west_lag: if args.nw_lag >= 0 { Some(args.nw_lag as usize) } else { None },
    };

    for load in &loads {
        let region = regions
            .get(&load.region_id)
            .ok_or_else(|| anyhow!("region {} missing from {}", load.region_id, args.regions.display()))?;
        let offset = region.day_boundary_offset_hours;
        let weather_full = weather_for_region(&args.weather, &load.region_id)?;
        let weather = weather_full.slice_to(&load.timestamps)?;

        let run_cv = cv_only || args.cv;
        let (spec, cv) = if run_cv {
            let grid: Vec<ModelSpec> = args
                .cv_grid_hod
                .iter()
                .flat_map(|&k| args.cv_grid_hoy.iter().map(move |&l| ModelSpec::new(k, l, args.interactions)))
                .collect();
            let cv = cross_validate(load, &weather, &grid, offset)?;
            println!("{}: cross-validation over {} specs", load.region_id, cv.entries.len());
            for entry in &cv.entries {
                println!(
                    "  K={:<3} L={:<3} params={:<5} mean CV R2 = {:.6}{}",
                    entry.spec.knots_hod,
                    entry.spec.knots_hoy,
                    entry.spec.param_count(),
                    entry.mean_r2,
                    if entry.spec == cv.best { "  <- selected" } else { "" }
                );
            }
            (cv.best, Some(cv))
        } else {
            (ModelSpec::new(args.spec.0, args.spec.1, args.interactions), None)
        };

        if cv_only {
            if let Some(cv) = &cv {
                let path = args.out.join(format!("cv_{}.csv", load.region_id));
                write_cv_csv(&path, cv)?;
                println!("{} -> {}", load.region_id, path.display());
            }
            continue;
        }

        let mut model = fit(load, &weather, &spec, offset, &opts)?;
        if let Some(cv) = &cv {
            model.diagnostics.cv_r2 =
                cv.entries.iter().find(|e| e.spec == cv.best).map(|e| e.mean_r2);
        }
        let baseline = baseline_fit(load, &spec, offset, &FitOptions::default())?;
        let path = args.out.join(format!("{}.json", load.region_id));
        io::save_model(&path, &model)?;
        println!(
            "{}: K={} L={} R2={:.4} rmse={:.5} (baseline R2={:.4}) alpha_h={:.5} alpha_c={:.5} -> {}",
            load.region_id,
            spec.knots_hod,
            spec.knots_hoy,
            model.diagnostics.in_sample_r2,
            model.diagnostics.rmse,
            baseline.diagnostics.in_sample_r2,
            model.alpha_h,
            model.alpha_c,
            path.display()
        );
    }
    Ok(())
}

fn write_cv_csv(path: &Path, cv: &gridflex_core::regress::CvResult) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "knots_hod,knots_hoy,params,mean_cv_r2")?;
    for year in &cv.years {
        write!(out, ",r2_{year}")?;
    }
    writeln!(out, ",selected")?;
    for e in &cv.entries {
        write!(out, "{},{},{},{}", e.spec.knots_hod, e.spec.knots_hoy, e.spec.param_count(), e.mean_r2)?;
        for r2 in &e.fold_r2 {
            write!(out, ",{r2}")?;
        }
        writeln!(out, ",{}", e.spec == cv.best)?;
    }
    Ok(())
}

fn cmd_shiftable(args: ShiftableArgs) -> Result<()> {
    let loads = io::read_load_csv(&args.load)?;
    std::fs::create_dir_all(&args.out)?;

    for load in &loads {
        let model_path = if args.model.is_dir() {
            args.model.join(format!("{}.json", load.region_id))
        } else {
            args.model.clone()
        };
        let model = io::load_model(&model_path)?;
        if model.region_id != load.region_id {
            bail!("model {} is for region {}, not {}", model_path.display(), model.region_id, load.region_id);
        }

        let series = match args.delta_t {
            Some(delta_t) => {
                let grid_path = args.grid.as_ref().ok_or_else(|| anyhow!("--delta-t needs --grid"))?;
                let regions_path =
                    args.regions.as_ref().ok_or_else(|| anyhow!("--delta-t needs --regions"))?;
                let regions = offsets_by_region(regions_path)?;
                let region = regions
                    .get(&load.region_id)
                    .ok_or_else(|| anyhow!("region {} missing from region file", load.region_id))?;
                let grid = interpolate_to_hourly(&io::read_grid_csv(grid_path)?)?;
                let normals = match &args.normals {
                    Some(p) => Some(io::read_normals_csv(p)?),
                    None if model.spec.include_climate_interactions => {
                        Some(in_sample_normals(&grid, model.threshold_c))
                    }
                    None => None,
                };
                let (_, series) = climate_shift(
                    &model,
                    &grid,
                    region,
                    normals.as_ref(),
                    load,
                    ClimateScenario::new(delta_t)?,
                    args.alpha,
                )?;
                series
            }
            None => {
                let weather_path =
                    args.weather.as_ref().ok_or_else(|| anyhow!("--weather required without --delta-t"))?;
                let weather = weather_for_region(weather_path, &load.region_id)?
                    .slice_to(&load.timestamps)?;
                decompose(&model, &weather, load, args.alpha)?
            }
        };
        let path = args.out.join(format!("{}_a{}.csv", load.region_id, args.alpha));
        io::write_shiftable_csv(&path, &series)?;
        let mean_share = {
            let (mut num, mut den) = (0.0, 0.0);
            for t in 0..series.len() {
                if series.mask[t] {
                    num += series.flexible_mw[t];
                    den += series.observed_mw[t];
                }
            }
            100.0 * num / den.max(f64::MIN_POSITIVE)
        };
        println!(
            "{}: alpha={} demand-weighted mean share {:.2}% -> {}",
            load.region_id,
            args.alpha,
            mean_share,
            path.display()
        );
    }
    Ok(())
}

fn shiftable_inputs(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "csv").unwrap_or(false))
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no CSV files under {}", path.display());
        }
        Ok(files)
    } else {
        Ok(vec![path.to_path_buf()])
    }
}

fn cmd_flatten(args: FlattenArgs) -> Result<()> {
    let level: PoolLevel = args.pool.parse::<PoolLevel>().map_err(|e| anyhow!("{e}"))?;
    let regions = io::read_regions_csv(&args.regions)?;
    let offsets: BTreeMap<String, i32> = regions
        .iter()
        .map(|r| (r.region_id.clone(), r.day_boundary_offset_hours))
        .collect();

    let mut series = Vec::new();
    for file in shiftable_inputs(&args.shiftable)? {
        // the CSV does not carry alpha; inputs are conventionally alpha = 1
        let base_alpha = 1.0;
        let mut s = io::read_shiftable_csv(&file, base_alpha, 0)?;
        let offset = offsets
            .get(&s.pool_id)
            .copied()
            .ok_or_else(|| anyhow!("region {} missing from region file", s.pool_id))?;
        s.day_boundary_offset_hours = offset;
        if let Some(alpha) = args.alpha {
            s = shiftable_split(
                &s.observed_mw
                    .iter()
                    .zip(&s.flexible_mw)
                    .map(|(o, f)| o - f)
                    .collect::<Vec<_>>(),
                &LoadSeries {
                    region_id: s.pool_id.clone(),
                    timestamps: s.timestamps.clone(),
                    demand_mw: s.observed_mw.clone(),
                    mask: s.mask.clone(),
                },
                alpha,
                offset,
            )?;
        }
        series.push(s);
    }

    let pooled = pool_regions(&series, &regions, level, args.pool_offset)?;
    std::fs::create_dir_all(&args.out)?;
    for p in &pooled {
        let flattened = flatten_series(p)?;
        let path = args.out.join(format!("{}_a{}.csv", p.pool_id, p.alpha));
        io::write_flattened_csv(&path, &flattened.days)?;
        let flat_share = 100.0
            * flattened.days.iter().filter(|(_, f)| f.fully_flat).count() as f64
            / flattened.days.len().max(1) as f64;
        println!(
            "{}: {} days flattened ({} skipped), {:.1}% fully flat -> {}",
            p.pool_id,
            flattened.days.len(),
            flattened.skipped_days,
            flat_share,
            path.display()
        );
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    use gridflex_core::metrics::{flatten_report, PoolSlice};

    let seasons: Vec<Season> = args
        .seasons
        .iter()
        .map(|s| s.parse::<Season>().map_err(|e| anyhow!("{e}")))
        .collect::<Result<_>>()?;

    let root = if args.inputs.join("flattened").is_dir() {
        args.inputs.join("flattened")
    } else {
        args.inputs.clone()
    };

    let mut reports = Vec::new();
    for level in [PoolLevel::Region, PoolLevel::Interconnect, PoolLevel::Nation] {
        let dir = root.join(level.as_str());
        if !dir.is_dir() {
            continue;
        }
        for &alpha in &args.alphas {
            let suffix = format!("_a{alpha}.csv");
            let mut pools_days = Vec::new();
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.file_name().map(|n| n.to_string_lossy().ends_with(&suffix)).unwrap_or(false))
                .collect();
            files.sort();
            for file in files {
                let days = io::read_flattened_csv(&file)?;
                let pool_id = days
                    .first()
                    .map(|(d, _)| d.pool_id.clone())
                    .unwrap_or_default();
                pools_days.push((pool_id, days));
            }
            if pools_days.is_empty() {
                continue;
            }
            for &season in &seasons {
                let mut pools = Vec::new();
                for (pool_id, days) in &pools_days {
                    let all: Vec<&_> = days.iter().collect();
                    let sliced = seasonal_slice(&all, season);
                    let weight = {
                        let (mut sum, mut n) = (0.0, 0usize);
                        for (d, _) in &sliced {
                            sum += d.observed.iter().sum::<f64>();
                            n += d.observed.len();
                        }
                        if n > 0 { sum / n as f64 } else { 0.0 }
                    };
                    pools.push(PoolSlice { pool_id: pool_id.clone(), weight, days: sliced, baseline: None });
                }
                if pools.iter().all(|p| p.days.is_empty()) {
                    continue;
                }
                reports.push(flatten_report(&pools, level.as_str(), season, alpha, None)?);
            }
        }
    }
    if reports.is_empty() {
        bail!("no flattened inputs found under {}", root.display());
    }

    std::fs::create_dir_all(&args.out)?;
    let mut manifest = gridflex_core::pipeline::Manifest::new();
    gridflex_core::pipeline::write_report_files(&args.out, "report", &reports, &mut manifest, &args.out)?;
    println!("{} report rows -> {}", reports.len(), args.out.join("report.csv").display());
    Ok(())
}

fn cmd_synthetic(args: SyntheticArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n_regions: args.regions,
        cells_per_region: args.cells,
        start_year: args.start_year,
        n_years: args.years,
        knots_hod: args.knots.0,
        knots_hoy: args.knots.1,
        alpha_h: args.alpha_h,
        alpha_c: args.alpha_c,
        noise_sd: args.noise_sd,
        day_boundary_offset_hours: args.offset,
        seed: args.seed,
        ..SyntheticSpec::default()
    };
    let data = generate(&spec)?;
    let paths = write_fixtures(&data, &args.out)?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::from_toml(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = args.grid {
        cfg.grid = v;
    }
    if let Some(v) = args.regions {
        cfg.regions = v;
    }
    if let Some(v) = args.load {
        cfg.load = v;
    }
    if let Some(v) = args.normals {
        cfg.normals = Some(v);
    }
    if let Some(v) = args.out_dir {
        cfg.out_dir = v;
    }
    if let Some(v) = args.threshold_c {
        cfg.threshold_c = v;
    }
    if let Some((k, l)) = args.spec {
        cfg.knots_hod = k;
        cfg.knots_hoy = l;
    }
    if args.interactions {
        cfg.interactions = true;
    }
    if args.cv {
        cfg.cv = true;
    }
    if let Some(v) = args.alphas {
        cfg.alphas = v;
    }
    if let Some(v) = args.pool_offset {
        cfg.pool_offset_hours = v;
    }
    if let Some(v) = args.delta_t {
        cfg.delta_t = Some(v);
    }
    if let Some(v) = args.nw_lag {
        cfg.newey_west_lag = if v >= 0 { Some(v as usize) } else { None };
    }
    if args.cache {
        cfg.write_cache = true;
    }
    if args.no_sweep {
        cfg.sweep = false;
    }

    let output = run_pipeline(&cfg)?;
    println!(
        "{} artifacts -> {}",
        output.manifest.artifacts.len(),
        output.manifest_path.display()
    );
    Ok(())
}
