//! File formats: CSV readers and writers for every pipeline artifact, the
//! JSON model artifact, and the binary hourly-grid cache.
//!
//! All CSV timestamps are RFC 3339 UTC. Floats are written with Rust's
//! shortest round-trip formatting, so every file reads back losslessly.

mod artifact;
mod cache;
mod csv_io;

pub use artifact::{load_model, save_model, ModelArtifact, MODEL_SCHEMA_VERSION};
pub use cache::{read_grid_cache, write_grid_cache};
pub use csv_io::{
    read_flattened_csv, read_grid_csv, read_load_csv, read_normals_csv, read_regions_csv,
    read_shiftable_csv, read_weather_csv, write_flattened_csv, write_grid_csv, write_load_csv,
    write_regions_csv, write_shiftable_csv, write_weather_csv, FlattenedRows,
};
