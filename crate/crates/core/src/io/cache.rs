//! Compact binary cache for the interpolated hourly grid.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic     8 bytes  b"GFXGRID\x01"
//! n_cells   u64
//! n_hours   u64
//! start     i64      unix seconds of the first hour
//! step      u32      seconds between samples (3600)
//! cells     n_cells x { id_len u32, id bytes, lat f64, lon f64, weight f64 }
//! temps     n_cells x n_hours f32, row-major (cell rows)
//! ```
//!
//! Temperatures are stored as f32; the cache trades the last bits of
//! precision for a 2x size cut on the artifact that dominates disk use.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::weather::{GridCell, TemperatureGrid};

const MAGIC: [u8; 8] = *b"GFXGRID\x01";

pub fn write_grid_cache(path: impl AsRef<Path>, grid: &TemperatureGrid) -> Result<()> {
    grid.validate()?;
    let step_secs = if grid.timestamps.len() >= 2 {
        (grid.timestamps[1] - grid.timestamps[0]).num_seconds() as u32
    } else {
        3600
    };
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    out.write_all(&MAGIC)?;
    out.write_all(&(grid.cells.len() as u64).to_le_bytes())?;
    out.write_all(&(grid.timestamps.len() as u64).to_le_bytes())?;
    out.write_all(&grid.timestamps[0].timestamp().to_le_bytes())?;
    out.write_all(&step_secs.to_le_bytes())?;
    for cell in &grid.cells {
        let id = cell.cell_id.as_bytes();
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id)?;
        out.write_all(&cell.latitude.to_le_bytes())?;
        out.write_all(&cell.longitude.to_le_bytes())?;
        out.write_all(&cell.population_weight.to_le_bytes())?;
    }
    for row in grid.temps.rows() {
        for &t in row {
            out.write_all(&(t as f32).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_grid_cache(path: impl AsRef<Path>) -> Result<TemperatureGrid> {
    let mut input = BufReader::new(File::open(path.as_ref())?);

    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::invalid(format!(
            "{}: not a grid cache (bad magic)",
            path.as_ref().display()
        )));
    }
    let n_cells = read_u64(&mut input)? as usize;
    let n_hours = read_u64(&mut input)? as usize;
    let start_unix = read_i64(&mut input)?;
    let step_secs = read_u32(&mut input)?;
    if n_cells == 0 || n_hours == 0 || step_secs == 0 {
        return Err(Error::invalid("grid cache has empty dimensions"));
    }

    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let id_len = read_u32(&mut input)? as usize;
        if id_len > 4096 {
            return Err(Error::invalid("grid cache cell id too long"));
        }
        let mut id = vec![0u8; id_len];
        input.read_exact(&mut id)?;
        let cell_id = String::from_utf8(id)
            .map_err(|_| Error::invalid("grid cache cell id is not UTF-8"))?;
        let latitude = read_f64(&mut input)?;
        let longitude = read_f64(&mut input)?;
        let population_weight = read_f64(&mut input)?;
        cells.push(GridCell { cell_id, latitude, longitude, population_weight });
    }

    let start = Utc
        .timestamp_opt(start_unix, 0)
        .single()
        .ok_or_else(|| Error::invalid("grid cache start timestamp out of range"))?;
    let timestamps: Vec<DateTime<Utc>> = (0..n_hours)
        .map(|i| start + Duration::seconds(step_secs as i64 * i as i64))
        .collect();

    let mut temps = Array2::zeros((n_cells, n_hours));
    let mut buf = [0u8; 4];
    for r in 0..n_cells {
        for c in 0..n_hours {
            input.read_exact(&mut buf)?;
            temps[[r, c]] = f32::from_le_bytes(buf) as f64;
        }
    }

    let grid = TemperatureGrid { cells, timestamps, temps };
    grid.validate()?;
    Ok(grid)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64(r: &mut impl Read) -> Result<i64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(i64::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn cache_round_trip_at_f32_precision() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("grid.gfx");
        let grid = TemperatureGrid {
            cells: vec![GridCell {
                cell_id: "cell-7".into(),
                latitude: 45.125,
                longitude: -101.75,
                population_weight: 3.5,
            }],
            timestamps: (0..5)
                .map(|i| Utc.with_ymd_and_hms(2016, 1, 1, 0, 0, 0).unwrap() + Duration::hours(i))
                .collect(),
            temps: Array2::from_shape_vec((1, 5), vec![-5.25, 0.0, 12.5, 18.0, 21.75]).unwrap(),
        };
        write_grid_cache(&path, &grid).unwrap();
        let back = read_grid_cache(&path).unwrap();
        assert_eq!(back.cells[0].cell_id, "cell-7");
        assert_eq!(back.cells[0].population_weight, 3.5);
        assert_eq!(back.timestamps, grid.timestamps);
        // values chosen exactly representable in f32
        assert_eq!(back.temps, grid.temps);
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("not_a_cache.bin");
        std::fs::write(&path, b"hello world, definitely not a cache").unwrap();
        assert!(read_grid_cache(&path).is_err());
    }
}
