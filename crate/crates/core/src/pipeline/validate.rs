//! Structural validation of input files. Unlike the strict readers, the
//! validator scans whole files and collects every violation with file and
//! row context, so one run reports all problems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use serde::Serialize;

use crate::error::Result;
use crate::pipeline::PipelineConfig;

#[derive(Debug, Clone, Serialize)]
pub struct ValidationIssue {
    pub file: String,
    /// 1-based line number in the file, when attributable to one row.
    pub line: Option<u64>,
    /// Short machine-readable rule name, e.g. `demand_mw > 0`.
    pub rule: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(
        &mut self,
        file: &Path,
        line: Option<u64>,
        rule: &str,
        message: impl Into<String>,
    ) {
        self.issues.push(ValidationIssue {
            file: file.display().to_string(),
            line,
            rule: rule.to_string(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            match issue.line {
                Some(line) => {
                    writeln!(f, "{}:{}: [{}] {}", issue.file, line, issue.rule, issue.message)?
                }
                None => writeln!(f, "{}: [{}] {}", issue.file, issue.rule, issue.message)?,
            }
        }
        Ok(())
    }
}

fn reader_for(path: &Path, header: &[&str], report: &mut ValidationReport) -> Option<csv::Reader<std::fs::File>> {
    let mut reader = match csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path) {
        Ok(r) => r,
        Err(e) => {
            report.push(path, None, "readable", format!("cannot open: {e}"));
            return None;
        }
    };
    match reader.headers() {
        Ok(h) => {
            let got: Vec<&str> = h.iter().collect();
            if got.len() < header.len() || &got[..header.len()] != header {
                report.push(
                    path,
                    Some(1),
                    "header",
                    format!("header is {got:?}, expected {header:?}"),
                );
                return None;
            }
        }
        Err(e) => {
            report.push(path, Some(1), "header", e.to_string());
            return None;
        }
    }
    Some(reader)
}

fn line_of(record: &csv::StringRecord) -> Option<u64> {
    record.position().map(|p| p.line())
}

/// Validate schema conformity, timestamp continuity, and value ranges of
/// every configured input. Returns the full issue list; an empty report
/// means the inputs are fit for the pipeline.
pub fn validate_inputs(cfg: &PipelineConfig) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();

    let grid_cells = scan_grid(&cfg.grid, &mut report);
    let region_cells = scan_regions(&cfg.regions, &grid_cells, &mut report);
    scan_load(&cfg.load, &region_cells, &mut report);
    if let Some(normals) = &cfg.normals {
        scan_normals(normals, &grid_cells, &mut report);
    }
    Ok(report)
}

/// Returns the set of cell ids seen in the grid file.
fn scan_grid(path: &Path, report: &mut ValidationReport) -> BTreeSet<String> {
    let mut cells: BTreeSet<String> = BTreeSet::new();
    let Some(mut reader) = reader_for(
        path,
        &["cell_id", "latitude", "longitude", "timestamp_utc", "temp_c"],
        report,
    ) else {
        return cells;
    };

    let mut per_cell: BTreeMap<String, BTreeSet<DateTime<Utc>>> = BTreeMap::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.push(path, None, "csv", e.to_string());
                continue;
            }
        };
        let line = line_of(&record);
        let cell = record[0].to_string();
        cells.insert(cell.clone());
        for (idx, what) in [(1, "latitude"), (2, "longitude"), (4, "temp_c")] {
            if record[idx].parse::<f64>().map(|v| !v.is_finite()).unwrap_or(true) {
                report.push(path, line, "finite_number", format!("bad {what}: {:?}", &record[idx]));
            }
        }
        match DateTime::parse_from_rfc3339(&record[3]) {
            Ok(ts) => {
                let ts = ts.with_timezone(&Utc);
                if !per_cell.entry(cell.clone()).or_default().insert(ts) {
                    report.push(
                        path,
                        line,
                        "unique_reading",
                        format!("duplicate reading for cell {cell}"),
                    );
                }
            }
            Err(e) => report.push(path, line, "rfc3339_timestamp", e.to_string()),
        }
    }

    // all cells must share one uniform 3-hourly timeline
    if let Some((first_cell, first_set)) = per_cell.iter().next() {
        let reference: Vec<DateTime<Utc>> = first_set.iter().copied().collect();
        for pair in reference.windows(2) {
            if pair[1] - pair[0] != Duration::hours(3) {
                report.push(
                    path,
                    None,
                    "uniform_3h_spacing",
                    format!("cell {first_cell}: gap {} .. {}", pair[0], pair[1]),
                );
            }
        }
        for (cell, set) in &per_cell {
            if set.len() != reference.len() || !set.iter().copied().eq(reference.iter().copied()) {
                report.push(
                    path,
                    None,
                    "complete_coverage",
                    format!(
                        "cell {cell} covers {} timestamps, expected {} matching cell {first_cell}",
                        set.len(),
                        reference.len()
                    ),
                );
            }
        }
    } else {
        report.push(path, None, "nonempty", "no grid rows");
    }
    cells
}

/// Returns region_id -> referenced cell ids (for the load scan).
fn scan_regions(
    path: &Path,
    grid_cells: &BTreeSet<String>,
    report: &mut ValidationReport,
) -> BTreeSet<String> {
    let mut region_ids = BTreeSet::new();
    let Some(mut reader) = reader_for(
        path,
        &["region_id", "interconnect", "cell_id", "population_weight", "day_boundary_offset_hours"],
        report,
    ) else {
        return region_ids;
    };

    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    let mut meta: BTreeMap<String, (String, String)> = BTreeMap::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.push(path, None, "csv", e.to_string());
                continue;
            }
        };
        let line = line_of(&record);
        let region = record[0].to_string();
        region_ids.insert(region.clone());
        if record[1].parse::<crate::weather::Interconnect>().is_err() {
            report.push(
                path,
                line,
                "interconnect",
                format!("unknown interconnect {:?}", &record[1]),
            );
        }
        if !grid_cells.is_empty() && !grid_cells.contains(&record[2]) {
            report.push(
                path,
                line,
                "cell_exists",
                format!("cell {:?} not present in the grid", &record[2]),
            );
        }
        match record[3].parse::<f64>() {
            Ok(w) if w.is_finite() && w >= 0.0 => {
                *totals.entry(region.clone()).or_insert(0.0) += w;
            }
            _ => report.push(
                path,
                line,
                "population_weight >= 0",
                format!("bad weight {:?}", &record[3]),
            ),
        }
        if record[4].parse::<i32>().is_err() {
            report.push(path, line, "day_boundary_offset", "offset must be an integer".to_string());
        }
        let key = (record[1].to_string(), record[4].to_string());
        if let Some(prev) = meta.get(&region) {
            if *prev != key {
                report.push(
                    path,
                    line,
                    "region_consistency",
                    format!("region {region} changes interconnect or offset mid-file"),
                );
            }
        } else {
            meta.insert(region.clone(), key);
        }
    }
    for (region, total) in totals {
        if total <= 0.0 {
            report.push(
                path,
                None,
                "positive_total_weight",
                format!("region {region} has zero total population weight"),
            );
        }
    }
    if region_ids.is_empty() {
        report.push(path, None, "nonempty", "no region rows");
    }
    region_ids
}

fn scan_load(path: &Path, known_regions: &BTreeSet<String>, report: &mut ValidationReport) {
    let Some(mut reader) =
        reader_for(path, &["region_id", "timestamp_utc", "demand_mw"], report)
    else {
        return;
    };

    let mut hours: BTreeMap<String, BTreeSet<DateTime<Utc>>> = BTreeMap::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.push(path, None, "csv", e.to_string());
                continue;
            }
        };
        let line = line_of(&record);
        let region = record[0].to_string();
        if !known_regions.is_empty() && !known_regions.contains(&region) {
            report.push(
                path,
                line,
                "region_known",
                format!("region {region:?} has no definition in the region file"),
            );
        }
        match DateTime::parse_from_rfc3339(&record[1]) {
            Ok(ts) => {
                let ts = ts.with_timezone(&Utc);
                if !hours.entry(region.clone()).or_default().insert(ts) {
                    report.push(path, line, "unique_hour", format!("duplicate hour for {region}"));
                }
            }
            Err(e) => report.push(path, line, "rfc3339_timestamp", e.to_string()),
        }
        if !record[2].is_empty() {
            match record[2].parse::<f64>() {
                Ok(d) if d.is_finite() && d > 0.0 => {}
                _ => report.push(
                    path,
                    line,
                    "demand_mw > 0",
                    format!("demand_mw must be positive, got {:?}", &record[2]),
                ),
            }
        }
    }
    for (region, set) in &hours {
        let ts: Vec<DateTime<Utc>> = set.iter().copied().collect();
        for pair in ts.windows(2) {
            let gap = pair[1] - pair[0];
            if gap != Duration::hours(1) {
                report.push(
                    path,
                    None,
                    "hourly_continuity",
                    format!(
                        "region {region}: {}-hour gap between {} and {}",
                        gap.num_hours(),
                        pair[0],
                        pair[1]
                    ),
                );
            }
        }
    }
    if hours.is_empty() {
        report.push(path, None, "nonempty", "no load rows");
    }
}

fn scan_normals(path: &Path, grid_cells: &BTreeSet<String>, report: &mut ValidationReport) {
    let Some(mut reader) = reader_for(path, &["cell_id", "mean_cdh", "mean_hdh"], report) else {
        return;
    };
    let mut covered = BTreeSet::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.push(path, None, "csv", e.to_string());
                continue;
            }
        };
        let line = line_of(&record);
        covered.insert(record[0].to_string());
        for idx in [1, 2] {
            match record[idx].parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => {}
                _ => report.push(
                    path,
                    line,
                    "normals >= 0",
                    format!("bad value {:?}", &record[idx]),
                ),
            }
        }
    }
    for missing in grid_cells.difference(&covered) {
        report.push(
            path,
            None,
            "normals_cover_grid",
            format!("grid cell {missing} has no normals row"),
        );
    }
}
