//! Gridded temperature handling: hourly interpolation, degree-hour
//! computation, and population-weighted regional aggregation.
//!
//! Degree-hours are convex in temperature, so they are always computed
//! per grid cell *before* any spatial averaging. Averaging temperature
//! first would understate both measures: a region whose mean sits at the
//! balance point can still contain cells that are heating and cells that
//! are cooling at the same time.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, Utc};
use ndarray::Array2;

use crate::error::{Error, Result};

/// Balance-point temperature (°C) separating heating from cooling demand.
pub const DEFAULT_THRESHOLD_C: f64 = 18.0;

/// Cooling and heating degree-hours for one temperature reading, at the
/// default 18 °C balance point. At most one of the pair is positive.
pub fn degree_hours(temp_c: f64) -> (f64, f64) {
    degree_hours_at(temp_c, DEFAULT_THRESHOLD_C)
}

/// Degree-hours at an explicit balance point: `cdh = max(T - b, 0)`,
/// `hdh = max(b - T, 0)`.
pub fn degree_hours_at(temp_c: f64, threshold_c: f64) -> (f64, f64) {
    ((temp_c - threshold_c).max(0.0), (threshold_c - temp_c).max(0.0))
}

/// One grid cell's coordinates and total population weight. The weight is
/// informational at the grid level; aggregation always uses the per-region
/// weights from [`RegionSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub cell_id: String,
    pub latitude: f64,
    pub longitude: f64,
    pub population_weight: f64,
}

/// Per-cell temperature series on a uniform time grid (3-hourly on
/// ingest, hourly after interpolation).
#[derive(Debug, Clone)]
pub struct TemperatureGrid {
    pub cells: Vec<GridCell>,
    /// Strictly increasing, uniformly spaced UTC marks.
    pub timestamps: Vec<DateTime<Utc>>,
    /// One row per cell, one column per timestamp, °C.
    pub temps: Array2<f64>,
}

impl TemperatureGrid {
    pub fn new(
        cells: Vec<GridCell>,
        timestamps: Vec<DateTime<Utc>>,
        temps: Array2<f64>,
    ) -> Result<Self> {
        let grid = TemperatureGrid { cells, timestamps, temps };
        grid.validate()?;
        Ok(grid)
    }

    /// Uniform spacing between consecutive timestamps.
    pub fn step(&self) -> Result<Duration> {
        if self.timestamps.len() < 2 {
            return Err(Error::invalid("temperature grid needs at least 2 timestamps"));
        }
        let step = self.timestamps[1] - self.timestamps[0];
        if step <= Duration::zero() {
            return Err(Error::invalid("temperature grid timestamps must be strictly increasing"));
        }
        for (i, pair) in self.timestamps.windows(2).enumerate() {
            if pair[1] - pair[0] != step {
                return Err(Error::invalid(format!(
                    "non-uniform timestamp spacing at index {}: {} -> {}",
                    i, pair[0], pair[1]
                )));
            }
        }
        Ok(step)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::invalid("temperature grid has no cells"));
        }
        if self.timestamps.is_empty() {
            return Err(Error::invalid("temperature grid has no timestamps"));
        }
        if self.temps.nrows() != self.cells.len() || self.temps.ncols() != self.timestamps.len() {
            return Err(Error::invalid(format!(
                "temperature matrix is {}x{} but grid has {} cells and {} timestamps",
                self.temps.nrows(),
                self.temps.ncols(),
                self.cells.len(),
                self.timestamps.len()
            )));
        }
        if self.timestamps.len() >= 2 {
            self.step()?;
        }
        if let Some(cell) = self
            .cells
            .iter()
            .zip(self.temps.rows())
            .find(|(_, row)| row.iter().any(|t| !t.is_finite()))
        {
            return Err(Error::invalid(format!(
                "non-finite temperature in cell {}",
                cell.0.cell_id
            )));
        }
        Ok(())
    }

    /// Index of each cell id into the matrix rows.
    pub fn cell_index(&self) -> BTreeMap<&str, usize> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.cell_id.as_str(), i))
            .collect()
    }

    /// Uniform warming scenario: every cell-hour shifted by `delta_c`.
    pub fn shifted(&self, delta_c: f64) -> TemperatureGrid {
        TemperatureGrid {
            cells: self.cells.clone(),
            timestamps: self.timestamps.clone(),
            temps: &self.temps + delta_c,
        }
    }

    /// Fill per-cell population weights as the sum of the weights each
    /// region assigns to the cell.
    pub fn set_population_weights(&mut self, regions: &[RegionSpec]) {
        let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
        for region in regions {
            for (cell_id, w) in &region.cell_weights {
                *totals.entry(cell_id.as_str()).or_insert(0.0) += w;
            }
        }
        for cell in &mut self.cells {
            cell.population_weight = totals.get(cell.cell_id.as_str()).copied().unwrap_or(0.0);
        }
    }
}

/// Linearly interpolate a 3-hourly grid to hourly resolution.
///
/// Values at the original 3-hour marks are preserved bit-for-bit. The two
/// hours past the final sample are held constant at that sample so the
/// hourly series always covers whole 3-hour blocks.
pub fn interpolate_to_hourly(grid: &TemperatureGrid) -> Result<TemperatureGrid> {
    grid.validate()?;
    let step = grid.step()?;
    if step != Duration::hours(3) {
        return Err(Error::invalid(format!(
            "hourly interpolation expects 3-hour spacing, found {} minutes",
            step.num_minutes()
        )));
    }
    let n_samples = grid.timestamps.len();
    let n_hours = (n_samples - 1) * 3 + 3;
    let start = grid.timestamps[0];
    let timestamps: Vec<DateTime<Utc>> =
        (0..n_hours).map(|h| start + Duration::hours(h as i64)).collect();

    let mut temps = Array2::zeros((grid.cells.len(), n_hours));
    for (cell_row, mut out_row) in grid.temps.rows().into_iter().zip(temps.rows_mut()) {
        for h in 0..n_hours {
            let s = h / 3;
            let r = h % 3;
            out_row[h] = if r == 0 {
                cell_row[s]
            } else if s + 1 < n_samples {
                let w = (3 - r) as f64 / 3.0;
                w * cell_row[s] + (1.0 - w) * cell_row[s + 1]
            } else {
                // trailing hours beyond the last sample
                cell_row[n_samples - 1]
            };
        }
    }

    Ok(TemperatureGrid { cells: grid.cells.clone(), timestamps, temps })
}

/// The three synchronized North American grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interconnect {
    East,
    West,
    Ercot,
}

impl fmt::Display for Interconnect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interconnect::East => write!(f, "East"),
            Interconnect::West => write!(f, "West"),
            Interconnect::Ercot => write!(f, "ERCOT"),
        }
    }
}

impl FromStr for Interconnect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "east" | "eastern" => Ok(Interconnect::East),
            "west" | "western" => Ok(Interconnect::West),
            "ercot" => Ok(Interconnect::Ercot),
            other => Err(Error::invalid(format!("unknown interconnect {other:?}"))),
        }
    }
}

/// A demand region: member grid cells with population weights and the
/// fixed UTC offset that defines its local day windows.
#[derive(Debug, Clone)]
pub struct RegionSpec {
    pub region_id: String,
    pub interconnect: Interconnect,
    /// Population weight of each member cell within the region.
    pub cell_weights: BTreeMap<String, f64>,
    pub day_boundary_offset_hours: i32,
}

impl RegionSpec {
    pub fn total_weight(&self) -> f64 {
        self.cell_weights.values().sum()
    }

    pub fn validate_against(&self, grid: &TemperatureGrid) -> Result<()> {
        if self.cell_weights.is_empty() {
            return Err(Error::invalid(format!("region {} has no cells", self.region_id)));
        }
        for (cell_id, w) in &self.cell_weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::invalid(format!(
                    "region {} cell {} has invalid weight {}",
                    self.region_id, cell_id, w
                )));
            }
        }
        if self.total_weight() <= 0.0 {
            return Err(Error::invalid(format!(
                "region {} has zero total population weight",
                self.region_id
            )));
        }
        let index = grid.cell_index();
        for cell_id in self.cell_weights.keys() {
            if !index.contains_key(cell_id.as_str()) {
                return Err(Error::invalid(format!(
                    "region {} references cell {} absent from the grid",
                    self.region_id, cell_id
                )));
            }
        }
        Ok(())
    }
}

/// Long-run mean degree-hours per cell, either supplied from a normals
/// file or computed over the sample.
#[derive(Debug, Clone, Default)]
pub struct CellNormals {
    /// cell id -> (mean CDH, mean HDH)
    pub by_cell: BTreeMap<String, (f64, f64)>,
}

/// In-sample fallback when a long-run normals file is not supplied: the
/// time mean of each cell's degree-hours over the full grid sample.
pub fn in_sample_normals(grid: &TemperatureGrid, threshold_c: f64) -> CellNormals {
    let n = grid.timestamps.len() as f64;
    let by_cell = grid
        .cells
        .iter()
        .zip(grid.temps.rows())
        .map(|(cell, row)| {
            let (mut cdh_sum, mut hdh_sum) = (0.0, 0.0);
            for &t in row {
                let (c, h) = degree_hours_at(t, threshold_c);
                cdh_sum += c;
                hdh_sum += h;
            }
            (cell.cell_id.clone(), (cdh_sum / n, hdh_sum / n))
        })
        .collect();
    CellNormals { by_cell }
}

/// Population-weighted hourly degree-hour series for one region.
#[derive(Debug, Clone)]
pub struct RegionalWeather {
    pub region_id: String,
    pub threshold_c: f64,
    pub timestamps: Vec<DateTime<Utc>>,
    /// °C·h above the balance point, per hour.
    pub cdh: Vec<f64>,
    /// °C·h below the balance point, per hour.
    pub hdh: Vec<f64>,
    /// Population-weighted mean temperature, kept for diagnostics and
    /// demand-temperature profiles.
    pub mean_temp_c: Vec<f64>,
    /// Aggregate of per-cell (mean CDH x hourly CDH) products.
    pub cdh_climate_interaction: Option<Vec<f64>>,
    /// Aggregate of per-cell (mean HDH x hourly HDH) products.
    pub hdh_climate_interaction: Option<Vec<f64>>,
    /// Time mean of the aggregated series over the full sample.
    pub mean_cdh: f64,
    pub mean_hdh: f64,
}

impl RegionalWeather {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn has_interactions(&self) -> bool {
        self.cdh_climate_interaction.is_some() && self.hdh_climate_interaction.is_some()
    }

    /// Recompute the long-run means from the stored series.
    pub fn recompute_means(&mut self) {
        let n = self.cdh.len().max(1) as f64;
        self.mean_cdh = self.cdh.iter().sum::<f64>() / n;
        self.mean_hdh = self.hdh.iter().sum::<f64>() / n;
    }

    /// Restrict the series to a contiguous hourly span. The requested
    /// timestamps must be fully contained in this series. The long-run
    /// means are kept from the full sample.
    pub fn slice_to(&self, timestamps: &[DateTime<Utc>]) -> Result<RegionalWeather> {
        let (Some(first), Some(last)) = (timestamps.first(), timestamps.last()) else {
            return Err(Error::invalid("cannot slice weather to an empty timeline"));
        };
        let start = match self.timestamps.binary_search(first) {
            Ok(i) => i,
            Err(_) => {
                return Err(Error::invalid(format!(
                    "weather for {} does not cover {first}",
                    self.region_id
                )))
            }
        };
        let n = timestamps.len();
        if start + n > self.len() || self.timestamps[start + n - 1] != *last {
            return Err(Error::invalid(format!(
                "weather for {} does not cover {first}..{last}",
                self.region_id
            )));
        }
        let cut = |v: &Vec<f64>| v[start..start + n].to_vec();
        Ok(RegionalWeather {
            region_id: self.region_id.clone(),
            threshold_c: self.threshold_c,
            timestamps: timestamps.to_vec(),
            cdh: cut(&self.cdh),
            hdh: cut(&self.hdh),
            mean_temp_c: cut(&self.mean_temp_c),
            cdh_climate_interaction: self.cdh_climate_interaction.as_ref().map(cut),
            hdh_climate_interaction: self.hdh_climate_interaction.as_ref().map(cut),
            mean_cdh: self.mean_cdh,
            mean_hdh: self.mean_hdh,
        })
    }
}

/// Population-weight-average a region's per-cell degree-hours into hourly
/// CDH/HDH series. Degree-hours are formed per cell first; summation runs
/// in ascending cell-id order so results do not depend on scheduling.
pub fn aggregate_region(
    grid: &TemperatureGrid,
    region: &RegionSpec,
    threshold_c: f64,
) -> Result<RegionalWeather> {
    aggregate_region_impl(grid, region, threshold_c, None)
}

/// As [`aggregate_region`], also populating the climate-interaction
/// aggregates: per-cell products of long-run mean degree-hours and hourly
/// degree-hours, formed at the cell level and then weight-averaged.
pub fn climate_interaction_aggregates(
    grid: &TemperatureGrid,
    region: &RegionSpec,
    normals: &CellNormals,
    threshold_c: f64,
) -> Result<RegionalWeather> {
    aggregate_region_impl(grid, region, threshold_c, Some(normals))
}

fn aggregate_region_impl(
    grid: &TemperatureGrid,
    region: &RegionSpec,
    threshold_c: f64,
    normals: Option<&CellNormals>,
) -> Result<RegionalWeather> {
    grid.validate()?;
    if grid.timestamps.len() >= 2 && grid.step()? != Duration::hours(1) {
        return Err(Error::invalid("regional aggregation expects an hourly grid"));
    }
    region.validate_against(grid)?;

    let index = grid.cell_index();
    // BTreeMap iteration gives ascending cell_id, the fixed summation order.
    let mut members: Vec<(usize, f64, f64, f64)> = Vec::with_capacity(region.cell_weights.len());
    for (cell_id, &w) in &region.cell_weights {
        let row = index[cell_id.as_str()];
        let (ncdh, nhdh) = match normals {
            Some(n) => *n.by_cell.get(cell_id).ok_or_else(|| {
                Error::invalid(format!(
                    "no climate normals for cell {} referenced by region {}",
                    cell_id, region.region_id
                ))
            })?,
            None => (0.0, 0.0),
        };
        members.push((row, w, ncdh, nhdh));
    }
    let total_w = region.total_weight();

    let n_hours = grid.timestamps.len();
    let mut cdh = vec![0.0; n_hours];
    let mut hdh = vec![0.0; n_hours];
    let mut mean_temp = vec![0.0; n_hours];
    let mut icdh = vec![0.0; n_hours];
    let mut ihdh = vec![0.0; n_hours];

    for &(row, w, ncdh, nhdh) in &members {
        let temps = grid.temps.row(row);
        for h in 0..n_hours {
            let t = temps[h];
            let (c, hd) = degree_hours_at(t, threshold_c);
            cdh[h] += w * c;
            hdh[h] += w * hd;
            mean_temp[h] += w * t;
            if normals.is_some() {
                icdh[h] += w * ncdh * c;
                ihdh[h] += w * nhdh * hd;
            }
        }
    }
    for h in 0..n_hours {
        cdh[h] /= total_w;
        hdh[h] /= total_w;
        mean_temp[h] /= total_w;
        icdh[h] /= total_w;
        ihdh[h] /= total_w;
    }

    let mut weather = RegionalWeather {
        region_id: region.region_id.clone(),
        threshold_c,
        timestamps: grid.timestamps.clone(),
        cdh,
        hdh,
        mean_temp_c: mean_temp,
        cdh_climate_interaction: normals.map(|_| icdh),
        hdh_climate_interaction: normals.map(|_| ihdh),
        mean_cdh: 0.0,
        mean_hdh: 0.0,
    };
    weather.recompute_means();
    Ok(weather)
}
