//! Estimation of temperature-sensitive electricity demand from hourly
//! regional load and gridded temperatures, and simulation of how much
//! within-day shifting of that demand flattens load profiles.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`weather`] converts a 3-hourly temperature grid into hourly
//!    per-region cooling/heating degree-hour series, population-weighted
//!    with per-cell degree-hours formed before any averaging.
//! 2. [`regress`] fits per-region log-demand models: natural splines of
//!    hour-of-day and hour-of-year interacted with day-of-week
//!    indicators, plus the weather terms, with year-out cross-validation
//!    for knot selection and Newey-West standard errors.
//! 3. [`shiftable`] splits observed load into hard demand (the
//!    counterfactual at the balance-point temperature) and an
//!    alpha-scaled flexible component, optionally under a uniform
//!    warming scenario.
//! 4. [`flatten`] levels each day's load by water-filling the flexible
//!    budget over the lowest hard-demand hours, with pooling across
//!    regions to emulate perfect transmission.
//! 5. [`metrics`] reduces flattened profiles to the reported statistics:
//!    peak/base/SD changes, flattenable-day shares, percentile families,
//!    seasonal slices, and demand-temperature profiles.
//!
//! [`synthetic`] generates seeded fixtures from the exact model equation
//! for end-to-end verification, [`io`] holds every file format, and
//! [`pipeline`] orchestrates full runs behind the `gridflex` CLI.

pub mod error;
pub mod flatten;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod regress;
pub mod shiftable;
pub mod synthetic;
pub mod weather;

pub use error::{Error, Result};
pub use flatten::{
    alpha_sweep, flatten_day, flatten_series, pool_regions, DayProfile, FlattenedDay,
    FlattenedSeries, PoolLevel,
};
pub use metrics::{
    daily_stats, demand_temperature_profile, overall_stats, sd_reduction, seasonal_slice,
    FlattenReport, Season,
};
pub use pipeline::{run_pipeline, validate_inputs, Manifest, PipelineConfig, ValidationReport};
pub use regress::{
    baseline_fit, build_design, calendar_features, cross_validate, fit, natural_spline_basis,
    newey_west_se, predict_level, predict_log, CalendarFeatures, FittedDemandModel, LoadSeries,
    ModelSpec,
};
pub use shiftable::{
    climate_shift, decompose, hard_demand, shiftable_split, ClimateScenario, ShiftableSeries,
};
pub use weather::{
    aggregate_region, climate_interaction_aggregates, degree_hours, degree_hours_at,
    interpolate_to_hourly, CellNormals, GridCell, Interconnect, RegionSpec, RegionalWeather,
    TemperatureGrid, DEFAULT_THRESHOLD_C,
};
