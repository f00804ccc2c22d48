//! CSV readers and writers.
//!
//! Input schemas:
//!   grid:     `cell_id,latitude,longitude,timestamp_utc,temp_c`
//!   regions:  `region_id,interconnect,cell_id,population_weight,day_boundary_offset_hours`
//!   normals:  `cell_id,mean_cdh,mean_hdh`
//!   load:     `region_id,timestamp_utc,demand_mw` (empty demand = masked hour)
//!
//! Artifact schemas:
//!   weather:   `region_id,timestamp_utc,cdh,hdh,mean_temp_c,threshold_c[,hdh_climate_interaction,cdh_climate_interaction]`
//!   shiftable: `region_id,timestamp_utc,observed_mw,hard_mw,flexible_mw,share`
//!   flattened: `pool_id,date,hour,observed_mw,hard_mw,flattened_mw,fully_flat`

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, SecondsFormat, Utc};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::flatten::{DayProfile, DayStats, FlattenedDay};
use crate::metrics::sd_reduction;
use crate::regress::LoadSeries;
use crate::shiftable::ShiftableSeries;
use crate::weather::{CellNormals, GridCell, Interconnect, RegionSpec, RegionalWeather, TemperatureGrid};

pub(crate) fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::invalid(format!("bad RFC 3339 timestamp {s:?}: {e}")))
}

pub(crate) fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("bad {what} value {s:?}")))
}

fn fmt_ts(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn open_reader(path: &Path, expected_header: &[&str]) -> Result<csv::Reader<File>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    let got: Vec<&str> = headers.iter().collect();
    if got.len() < expected_header.len() || &got[..expected_header.len()] != expected_header {
        return Err(Error::invalid(format!(
            "{}: header is {:?}, expected {:?}",
            path.display(),
            got,
            expected_header
        )));
    }
    Ok(reader)
}

fn row_context(path: &Path, record: &csv::StringRecord) -> String {
    let line = record.position().map(|p| p.line()).unwrap_or(0);
    format!("{}:{line}", path.display())
}

// ---------------------------------------------------------------------------
// grid

pub const GRID_HEADER: [&str; 5] = ["cell_id", "latitude", "longitude", "timestamp_utc", "temp_c"];

/// Read a long-format grid CSV into a [`TemperatureGrid`]. Every cell must
/// report every timestamp exactly once.
pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<TemperatureGrid> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &GRID_HEADER)?;

    struct CellAcc {
        latitude: f64,
        longitude: f64,
        temps: BTreeMap<DateTime<Utc>, f64>,
    }
    let mut cells: BTreeMap<String, CellAcc> = BTreeMap::new();

    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let cell_id = record[0].to_string();
        let lat = parse_f64(&record[1], "latitude").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let lon = parse_f64(&record[2], "longitude").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let ts = parse_timestamp(&record[3]).map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let temp = parse_f64(&record[4], "temp_c").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        if !temp.is_finite() {
            return Err(Error::invalid(format!("{ctx}: non-finite temperature")));
        }
        let entry = cells.entry(cell_id.clone()).or_insert(CellAcc {
            latitude: lat,
            longitude: lon,
            temps: BTreeMap::new(),
        });
        if entry.latitude != lat || entry.longitude != lon {
            return Err(Error::invalid(format!(
                "{ctx}: cell {cell_id} reports inconsistent coordinates"
            )));
        }
        if entry.temps.insert(ts, temp).is_some() {
            return Err(Error::invalid(format!(
                "{ctx}: duplicate reading for cell {cell_id} at {}",
                fmt_ts(ts)
            )));
        }
    }
    if cells.is_empty() {
        return Err(Error::invalid(format!("{}: no grid rows", path.display())));
    }

    let timestamps: Vec<DateTime<Utc>> =
        cells.values().next().unwrap().temps.keys().copied().collect();
    for (id, acc) in &cells {
        if acc.temps.len() != timestamps.len()
            || !acc.temps.keys().copied().eq(timestamps.iter().copied())
        {
            return Err(Error::invalid(format!(
                "{}: cell {id} does not cover the same timestamps as the other cells",
                path.display()
            )));
        }
    }

    let n_cells = cells.len();
    let n_ts = timestamps.len();
    let mut grid_cells = Vec::with_capacity(n_cells);
    let mut temps = Array2::zeros((n_cells, n_ts));
    for (row, (cell_id, acc)) in cells.into_iter().enumerate() {
        for (col, (_, temp)) in acc.temps.into_iter().enumerate() {
            temps[[row, col]] = temp;
        }
        grid_cells.push(GridCell {
            cell_id,
            latitude: acc.latitude,
            longitude: acc.longitude,
            population_weight: 0.0,
        });
    }

    let grid = TemperatureGrid { cells: grid_cells, timestamps, temps };
    grid.validate()?;
    Ok(grid)
}

/// Write a [`TemperatureGrid`] in long format.
pub fn write_grid_csv(path: impl AsRef<Path>, grid: &TemperatureGrid) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "{}", GRID_HEADER.join(","))?;
    for (cell, row) in grid.cells.iter().zip(grid.temps.rows()) {
        for (ts, temp) in grid.timestamps.iter().zip(row) {
            writeln!(
                out,
                "{},{},{},{},{}",
                cell.cell_id,
                cell.latitude,
                cell.longitude,
                fmt_ts(*ts),
                temp
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// regions

pub const REGIONS_HEADER: [&str; 5] =
    ["region_id", "interconnect", "cell_id", "population_weight", "day_boundary_offset_hours"];

pub fn read_regions_csv(path: impl AsRef<Path>) -> Result<Vec<RegionSpec>> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &REGIONS_HEADER)?;
    let mut regions: BTreeMap<String, RegionSpec> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let region_id = record[0].to_string();
        let interconnect: Interconnect =
            record[1].parse().map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let cell_id = record[2].to_string();
        let weight = parse_f64(&record[3], "population_weight")
            .map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let offset: i32 = record[4]
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("{ctx}: bad day_boundary_offset_hours")))?;
        if weight < 0.0 || !weight.is_finite() {
            return Err(Error::invalid(format!("{ctx}: negative population weight")));
        }

        let entry = regions.entry(region_id.clone()).or_insert_with(|| RegionSpec {
            region_id: region_id.clone(),
            interconnect,
            cell_weights: BTreeMap::new(),
            day_boundary_offset_hours: offset,
        });
        if entry.interconnect != interconnect || entry.day_boundary_offset_hours != offset {
            return Err(Error::invalid(format!(
                "{ctx}: region {region_id} has inconsistent interconnect or offset"
            )));
        }
        if entry.cell_weights.insert(cell_id.clone(), weight).is_some() {
            return Err(Error::invalid(format!(
                "{ctx}: duplicate cell {cell_id} in region {region_id}"
            )));
        }
    }
    if regions.is_empty() {
        return Err(Error::invalid(format!("{}: no region rows", path.display())));
    }
    Ok(regions.into_values().collect())
}

pub fn write_regions_csv(path: impl AsRef<Path>, regions: &[RegionSpec]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "{}", REGIONS_HEADER.join(","))?;
    for r in regions {
        for (cell_id, w) in &r.cell_weights {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.region_id, r.interconnect, cell_id, w, r.day_boundary_offset_hours
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// normals

pub const NORMALS_HEADER: [&str; 3] = ["cell_id", "mean_cdh", "mean_hdh"];

pub fn read_normals_csv(path: impl AsRef<Path>) -> Result<CellNormals> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &NORMALS_HEADER)?;
    let mut normals = CellNormals::default();
    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let cell_id = record[0].to_string();
        let cdh = parse_f64(&record[1], "mean_cdh").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let hdh = parse_f64(&record[2], "mean_hdh").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        if cdh < 0.0 || hdh < 0.0 {
            return Err(Error::invalid(format!("{ctx}: negative normals")));
        }
        normals.by_cell.insert(cell_id, (cdh, hdh));
    }
    Ok(normals)
}

// ---------------------------------------------------------------------------
// load

pub const LOAD_HEADER: [&str; 3] = ["region_id", "timestamp_utc", "demand_mw"];

/// Read hourly load, one series per region. The timeline runs from each
/// region's first to last reported hour; hours without a row (or with an
/// empty demand field) are masked.
pub fn read_load_csv(path: impl AsRef<Path>) -> Result<Vec<LoadSeries>> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &LOAD_HEADER)?;
    let mut by_region: BTreeMap<String, BTreeMap<DateTime<Utc>, Option<f64>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let region_id = record[0].to_string();
        let ts = parse_timestamp(&record[1]).map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let demand = if record[2].trim().is_empty() {
            None
        } else {
            let d = parse_f64(&record[2], "demand_mw")
                .map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::invalid(format!("{ctx}: demand_mw must be > 0, got {d}")));
            }
            Some(d)
        };
        if by_region.entry(region_id.clone()).or_default().insert(ts, demand).is_some() {
            return Err(Error::invalid(format!(
                "{ctx}: duplicate hour {} for region {region_id}",
                fmt_ts(ts)
            )));
        }
    }
    if by_region.is_empty() {
        return Err(Error::invalid(format!("{}: no load rows", path.display())));
    }

    let mut series = Vec::with_capacity(by_region.len());
    for (region_id, rows) in by_region {
        let first = *rows.keys().next().unwrap();
        let last = *rows.keys().last().unwrap();
        let n = ((last - first).num_hours() + 1) as usize;
        let mut timestamps = Vec::with_capacity(n);
        let mut demand_mw = vec![0.0; n];
        let mut mask = vec![false; n];
        for i in 0..n {
            let ts = first + Duration::hours(i as i64);
            timestamps.push(ts);
            if let Some(Some(d)) = rows.get(&ts) {
                demand_mw[i] = *d;
                mask[i] = true;
            }
        }
        let s = LoadSeries { region_id, timestamps, demand_mw, mask };
        s.validate()?;
        series.push(s);
    }
    Ok(series)
}

pub fn write_load_csv(path: impl AsRef<Path>, series: &[LoadSeries]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "{}", LOAD_HEADER.join(","))?;
    for s in series {
        for i in 0..s.len() {
            if s.mask[i] {
                writeln!(out, "{},{},{}", s.region_id, fmt_ts(s.timestamps[i]), s.demand_mw[i])?;
            } else {
                writeln!(out, "{},{},", s.region_id, fmt_ts(s.timestamps[i]))?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// regional weather

const WEATHER_HEADER_BASE: [&str; 6] =
    ["region_id", "timestamp_utc", "cdh", "hdh", "mean_temp_c", "threshold_c"];
const WEATHER_HEADER_FULL: [&str; 8] = [
    "region_id",
    "timestamp_utc",
    "cdh",
    "hdh",
    "mean_temp_c",
    "threshold_c",
    "hdh_climate_interaction",
    "cdh_climate_interaction",
];

pub fn write_weather_csv(path: impl AsRef<Path>, weather: &RegionalWeather) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    let interactions = weather.has_interactions();
    if interactions {
        writeln!(out, "{}", WEATHER_HEADER_FULL.join(","))?;
    } else {
        writeln!(out, "{}", WEATHER_HEADER_BASE.join(","))?;
    }
    for t in 0..weather.len() {
        write!(
            out,
            "{},{},{},{},{},{}",
            weather.region_id,
            fmt_ts(weather.timestamps[t]),
            weather.cdh[t],
            weather.hdh[t],
            weather.mean_temp_c[t],
            weather.threshold_c
        )?;
        if interactions {
            write!(
                out,
                ",{},{}",
                weather.hdh_climate_interaction.as_ref().unwrap()[t],
                weather.cdh_climate_interaction.as_ref().unwrap()[t]
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_weather_csv(path: impl AsRef<Path>) -> Result<RegionalWeather> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &WEATHER_HEADER_BASE)?;
    let has_interactions = {
        let headers = reader.headers()?;
        headers.len() >= WEATHER_HEADER_FULL.len()
            && headers.iter().take(8).eq(WEATHER_HEADER_FULL.iter().copied())
    };

    let mut region_id: Option<String> = None;
    let mut threshold_c = crate::weather::DEFAULT_THRESHOLD_C;
    let mut timestamps = Vec::new();
    let mut cdh = Vec::new();
    let mut hdh = Vec::new();
    let mut mean_temp = Vec::new();
    let mut ihdh = Vec::new();
    let mut icdh = Vec::new();
    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let rid = record[0].to_string();
        match &region_id {
            None => region_id = Some(rid),
            Some(existing) if *existing != rid => {
                return Err(Error::invalid(format!(
                    "{ctx}: weather file mixes regions {existing} and {rid}"
                )))
            }
            _ => {}
        }
        timestamps.push(parse_timestamp(&record[1]).map_err(|e| Error::invalid(format!("{ctx}: {e}")))?);
        cdh.push(parse_f64(&record[2], "cdh").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?);
        hdh.push(parse_f64(&record[3], "hdh").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?);
        mean_temp.push(parse_f64(&record[4], "mean_temp_c").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?);
        threshold_c = parse_f64(&record[5], "threshold_c").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        if has_interactions {
            ihdh.push(parse_f64(&record[6], "hdh_climate_interaction").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?);
            icdh.push(parse_f64(&record[7], "cdh_climate_interaction").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?);
        }
    }
    let region_id =
        region_id.ok_or_else(|| Error::invalid(format!("{}: no weather rows", path.display())))?;
    let mut weather = RegionalWeather {
        region_id,
        threshold_c,
        timestamps,
        cdh,
        hdh,
        mean_temp_c: mean_temp,
        hdh_climate_interaction: has_interactions.then_some(ihdh),
        cdh_climate_interaction: has_interactions.then_some(icdh),
        mean_cdh: 0.0,
        mean_hdh: 0.0,
    };
    weather.recompute_means();
    Ok(weather)
}

// ---------------------------------------------------------------------------
// shiftable

pub const SHIFTABLE_HEADER: [&str; 6] =
    ["region_id", "timestamp_utc", "observed_mw", "hard_mw", "flexible_mw", "share"];

pub fn write_shiftable_csv(path: impl AsRef<Path>, series: &ShiftableSeries) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "{}", SHIFTABLE_HEADER.join(","))?;
    for t in 0..series.len() {
        if !series.mask[t] {
            continue;
        }
        writeln!(
            out,
            "{},{},{},{},{},{}",
            series.pool_id,
            fmt_ts(series.timestamps[t]),
            series.observed_mw[t],
            series.hard_mw[t],
            series.flexible_mw[t],
            series.share[t]
        )?;
    }
    Ok(())
}

/// Read a shiftable decomposition. The CSV does not carry alpha or the
/// day-boundary offset, so the caller supplies them; hours missing from
/// the file are masked.
pub fn read_shiftable_csv(
    path: impl AsRef<Path>,
    alpha: f64,
    day_boundary_offset_hours: i32,
) -> Result<ShiftableSeries> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &SHIFTABLE_HEADER)?;
    let mut pool_id: Option<String> = None;
    let mut rows: BTreeMap<DateTime<Utc>, (f64, f64, f64, f64)> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let rid = record[0].to_string();
        match &pool_id {
            None => pool_id = Some(rid),
            Some(existing) if *existing != rid => {
                return Err(Error::invalid(format!(
                    "{ctx}: shiftable file mixes pools {existing} and {rid}"
                )))
            }
            _ => {}
        }
        let ts = parse_timestamp(&record[1]).map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let observed = parse_f64(&record[2], "observed_mw").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let hard = parse_f64(&record[3], "hard_mw").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let flexible = parse_f64(&record[4], "flexible_mw").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let share = parse_f64(&record[5], "share").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        rows.insert(ts, (observed, hard, flexible, share));
    }
    let pool_id =
        pool_id.ok_or_else(|| Error::invalid(format!("{}: no shiftable rows", path.display())))?;

    let first = *rows.keys().next().unwrap();
    let last = *rows.keys().last().unwrap();
    let n = ((last - first).num_hours() + 1) as usize;
    let mut series = ShiftableSeries {
        pool_id,
        timestamps: Vec::with_capacity(n),
        observed_mw: vec![0.0; n],
        hard_mw: vec![0.0; n],
        flexible_mw: vec![0.0; n],
        share: vec![0.0; n],
        mask: vec![false; n],
        alpha,
        day_boundary_offset_hours,
    };
    for i in 0..n {
        let ts = first + Duration::hours(i as i64);
        series.timestamps.push(ts);
        if let Some(&(o, h, f, s)) = rows.get(&ts) {
            series.observed_mw[i] = o;
            series.hard_mw[i] = h;
            series.flexible_mw[i] = f;
            series.share[i] = s;
            series.mask[i] = true;
        }
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// flattened days

pub const FLATTENED_HEADER: [&str; 7] =
    ["pool_id", "date", "hour", "observed_mw", "hard_mw", "flattened_mw", "fully_flat"];

pub type FlattenedRows = Vec<(DayProfile, FlattenedDay)>;

pub fn write_flattened_csv(
    path: impl AsRef<Path>,
    days: &[(DayProfile, FlattenedDay)],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "{}", FLATTENED_HEADER.join(","))?;
    for (day, flat) in days {
        for h in 0..day.hours() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                day.pool_id,
                day.date,
                h + 1,
                day.observed[h],
                day.hard[h],
                flat.profile[h],
                flat.fully_flat
            )?;
        }
    }
    Ok(())
}

/// Read flattened day records back; per-day stats are recomputed from the
/// stored profiles.
pub fn read_flattened_csv(path: impl AsRef<Path>) -> Result<FlattenedRows> {
    let path = path.as_ref();
    let mut reader = open_reader(path, &FLATTENED_HEADER)?;

    type Row = (usize, f64, f64, f64, bool);
    let mut by_day: BTreeMap<(String, NaiveDate), Vec<Row>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let ctx = row_context(path, &record);
        let pool = record[0].to_string();
        let date: NaiveDate = record[1]
            .parse()
            .map_err(|_| Error::invalid(format!("{ctx}: bad date {:?}", &record[1])))?;
        let hour: usize = record[2]
            .parse()
            .map_err(|_| Error::invalid(format!("{ctx}: bad hour")))?;
        let observed = parse_f64(&record[3], "observed_mw").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let hard = parse_f64(&record[4], "hard_mw").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let flattened = parse_f64(&record[5], "flattened_mw").map_err(|e| Error::invalid(format!("{ctx}: {e}")))?;
        let fully_flat = match record[6].trim() {
            "true" => true,
            "false" => false,
            other => return Err(Error::invalid(format!("{ctx}: bad fully_flat {other:?}"))),
        };
        by_day.entry((pool, date)).or_default().push((hour, observed, hard, flattened, fully_flat));
    }

    let mut out = Vec::with_capacity(by_day.len());
    for ((pool, date), mut rows) in by_day {
        rows.sort_by_key(|r| r.0);
        let observed: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let hard: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let profile: Vec<f64> = rows.iter().map(|r| r.3).collect();
        let fully_flat = rows[0].4;
        let day = DayProfile::new(pool, date, observed, hard)?;
        let max_obs = day.observed.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_obs = day.observed.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_flat = profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_flat = profile.iter().cloned().fold(f64::INFINITY, f64::min);
        let stats = DayStats {
            peak_reduction_pct: if max_obs != 0.0 { 100.0 * (1.0 - max_flat / max_obs) } else { 0.0 },
            base_increase_pct: if min_obs != 0.0 { 100.0 * (min_flat / min_obs - 1.0) } else { 0.0 },
            sd_reduction_pct: sd_reduction(&day.observed, &profile),
        };
        out.push((day, FlattenedDay { profile, fully_flat, stats }));
    }
    Ok(out)
}
