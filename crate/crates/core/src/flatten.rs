//! Within-day load leveling by water-filling, day slicing, regional
//! pooling, and the alpha sweep.
//!
//! The water level for a day is found from the sorted hard demands
//! `h_(1) <= ... <= h_(H)`: with `v_k = (sum_{j<=k} h_(j) + flex) / k`,
//! the level is `min_k v_k`, taken at the largest `k` attaining it. Hours
//! in that prefix rise to the level, the rest keep their hard demand.
//! The result is the unique feasible profile (x_h >= hard_h, energy
//! conserved) that simultaneously minimizes variance and peak and
//! maximizes the minimum.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};

use crate::error::{Error, Result};
use crate::metrics::sd_reduction;
use crate::shiftable::ShiftableSeries;
use crate::weather::{Interconnect, RegionSpec};

/// One pool-day: hard profile, observed profile, and the day's flexible
/// budget in MW·h.
#[derive(Debug, Clone)]
pub struct DayProfile {
    pub pool_id: String,
    pub date: NaiveDate,
    pub observed: Vec<f64>,
    pub hard: Vec<f64>,
    pub flex_total: f64,
}

impl DayProfile {
    /// Build a profile from aligned observed/hard vectors; the flexible
    /// budget is their summed gap.
    pub fn new(
        pool_id: impl Into<String>,
        date: NaiveDate,
        observed: Vec<f64>,
        hard: Vec<f64>,
    ) -> Result<Self> {
        if observed.is_empty() || observed.len() != hard.len() {
            return Err(Error::invalid("day profile needs equal-length, non-empty vectors"));
        }
        let mut flex_total = 0.0;
        for (h, (&o, &hd)) in observed.iter().zip(&hard).enumerate() {
            if !o.is_finite() || !hd.is_finite() || hd < 0.0 {
                return Err(Error::invalid(format!("bad day profile values at hour {h}")));
            }
            if o < hd - 1e-9 * hd.abs().max(1.0) {
                return Err(Error::invalid(format!(
                    "observed {o} below hard {hd} at hour {h}"
                )));
            }
            flex_total += o - hd;
        }
        Ok(DayProfile { pool_id: pool_id.into(), date, observed, hard, flex_total })
    }

    pub fn hours(&self) -> usize {
        self.hard.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayStats {
    pub peak_reduction_pct: f64,
    pub base_increase_pct: f64,
    pub sd_reduction_pct: f64,
}

/// Result of leveling one day.
#[derive(Debug, Clone)]
pub struct FlattenedDay {
    pub profile: Vec<f64>,
    /// True when the whole day can be held at a constant load, i.e. peak
    /// hard demand does not exceed mean observed demand.
    pub fully_flat: bool,
    pub stats: DayStats,
}

/// Optimally level one day's load using its flexible budget.
pub fn flatten_day(day: &DayProfile) -> Result<FlattenedDay> {
    let h = day.hours();
    if h == 0 {
        return Err(Error::invalid("empty day profile"));
    }
    if !day.flex_total.is_finite() || day.flex_total < 0.0 {
        return Err(Error::invalid(format!("negative flexible budget {}", day.flex_total)));
    }

    // Stable sort by hard value; ties keep hour order.
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| day.hard[a].partial_cmp(&day.hard[b]).expect("finite hard demand"));

    // v_k = (prefix_k + flex) / k, minimized at the largest k attaining it.
    let mut best_k = 1;
    let mut level = f64::INFINITY;
    let mut prefix = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        prefix += day.hard[idx];
        let v = (prefix + day.flex_total) / (k + 1) as f64;
        if v <= level {
            level = v;
            best_k = k + 1;
        }
    }

    let mut profile = day.hard.clone();
    for &idx in &order[..best_k] {
        profile[idx] = level;
    }

    let hard_sum: f64 = day.hard.iter().sum();
    let mean_obs = (hard_sum + day.flex_total) / h as f64;
    let max_hard = day.hard.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let fully_flat = max_hard <= mean_obs;

    let max_obs = day.observed.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_obs = day.observed.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_flat = profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_flat = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let stats = DayStats {
        peak_reduction_pct: if max_obs != 0.0 { 100.0 * (1.0 - max_flat / max_obs) } else { 0.0 },
        base_increase_pct: if min_obs != 0.0 { 100.0 * (min_flat / min_obs - 1.0) } else { 0.0 },
        sd_reduction_pct: sd_reduction(&day.observed, &profile),
    };

    Ok(FlattenedDay { profile, fully_flat, stats })
}

/// A flattened series: every complete local day leveled, incomplete days
/// counted and skipped.
#[derive(Debug, Clone)]
pub struct FlattenedSeries {
    pub pool_id: String,
    pub alpha: f64,
    pub days: Vec<(DayProfile, FlattenedDay)>,
    pub skipped_days: usize,
}

impl FlattenedSeries {
    /// Mean observed demand over the included days (pool weight for
    /// demand-weighted cross-pool averages).
    pub fn mean_observed(&self) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for (day, _) in &self.days {
            sum += day.observed.iter().sum::<f64>();
            n += day.observed.len();
        }
        if n > 0 {
            sum / n as f64
        } else {
            0.0
        }
    }
}

/// Slice a shiftable series into complete local days and flatten each.
pub fn flatten_series(series: &ShiftableSeries) -> Result<FlattenedSeries> {
    let offset = Duration::hours(series.day_boundary_offset_hours as i64);
    let mut by_day: BTreeMap<NaiveDate, Vec<usize>> = BTreeMap::new();
    for (i, ts) in series.timestamps.iter().enumerate() {
        by_day.entry((*ts + offset).date_naive()).or_default().push(i);
    }

    let mut days = Vec::new();
    let mut skipped = 0usize;
    for (date, idx) in by_day {
        if idx.len() != 24 || idx.iter().any(|&i| !series.mask[i]) {
            skipped += 1;
            continue;
        }
        let observed: Vec<f64> = idx.iter().map(|&i| series.observed_mw[i]).collect();
        let hard: Vec<f64> = idx.iter().map(|&i| series.hard_mw[i]).collect();
        let profile = DayProfile::new(series.pool_id.clone(), date, observed, hard)?;
        let flattened = flatten_day(&profile)?;
        days.push((profile, flattened));
    }
    Ok(FlattenedSeries { pool_id: series.pool_id.clone(), alpha: series.alpha, days, skipped_days: skipped })
}

/// Pooling level for transmission scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolLevel {
    Region,
    Interconnect,
    Nation,
}

impl PoolLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoolLevel::Region => "region",
            PoolLevel::Interconnect => "interconnect",
            PoolLevel::Nation => "nation",
        }
    }
}

impl std::str::FromStr for PoolLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "region" => Ok(PoolLevel::Region),
            "interconnect" => Ok(PoolLevel::Interconnect),
            "nation" | "nationwide" => Ok(PoolLevel::Nation),
            other => Err(Error::invalid(format!("unknown pool level {other:?}"))),
        }
    }
}

/// Pool synchronized regional series by summing hard and flexible
/// components per UTC hour. Pooled series use the reference day-boundary
/// offset; region-level "pooling" is the identity.
pub fn pool_regions(
    series: &[ShiftableSeries],
    regions: &[RegionSpec],
    level: PoolLevel,
    reference_offset_hours: i32,
) -> Result<Vec<ShiftableSeries>> {
    if series.is_empty() {
        return Err(Error::invalid("no series to pool"));
    }
    if let PoolLevel::Region = level {
        return Ok(series.to_vec());
    }

    let interconnect_of: BTreeMap<&str, Interconnect> = regions
        .iter()
        .map(|r| (r.region_id.as_str(), r.interconnect))
        .collect();

    let mut groups: BTreeMap<String, Vec<&ShiftableSeries>> = BTreeMap::new();
    for s in series {
        let key = match level {
            PoolLevel::Nation => "nation".to_string(),
            PoolLevel::Interconnect => interconnect_of
                .get(s.pool_id.as_str())
                .ok_or_else(|| {
                    Error::invalid(format!("no region metadata for pool {}", s.pool_id))
                })?
                .to_string(),
            PoolLevel::Region => unreachable!(),
        };
        groups.entry(key).or_default().push(s);
    }

    let mut pooled = Vec::with_capacity(groups.len());
    for (pool_id, members) in groups {
        let first = members[0];
        for other in &members[1..] {
            if other.timestamps != first.timestamps {
                return Err(Error::invalid(format!(
                    "coverage mismatch pooling {pool_id}: {} spans {}..{} but {} spans {}..{}",
                    first.pool_id,
                    first.timestamps.first().unwrap(),
                    first.timestamps.last().unwrap(),
                    other.pool_id,
                    other.timestamps.first().unwrap(),
                    other.timestamps.last().unwrap(),
                )));
            }
            if other.alpha != first.alpha {
                return Err(Error::invalid(format!(
                    "alpha mismatch pooling {pool_id}: {} vs {}",
                    first.alpha, other.alpha
                )));
            }
        }
        let n = first.len();
        let mut observed = vec![0.0; n];
        let mut hard = vec![0.0; n];
        let mut flexible = vec![0.0; n];
        let mut mask = vec![true; n];
        for m in &members {
            for t in 0..n {
                observed[t] += m.observed_mw[t];
                hard[t] += m.hard_mw[t];
                flexible[t] += m.flexible_mw[t];
                mask[t] &= m.mask[t];
            }
        }
        let share = (0..n)
            .map(|t| if mask[t] && observed[t] > 0.0 { flexible[t] / observed[t] } else { 0.0 })
            .collect();
        pooled.push(ShiftableSeries {
            pool_id,
            timestamps: first.timestamps.clone(),
            observed_mw: observed,
            hard_mw: hard,
            flexible_mw: flexible,
            share,
            mask,
            alpha: first.alpha,
            day_boundary_offset_hours: reference_offset_hours,
        });
    }
    Ok(pooled)
}

#[derive(Debug, Clone, Copy)]
pub struct AlphaSweepPoint {
    pub alpha: f64,
    /// Unweighted mean of per-day SD reductions.
    pub daily_sd_reduction_pct: f64,
    /// SD reduction of the whole-series profile over complete days.
    pub overall_sd_reduction_pct: f64,
}

/// Default sweep grid: alpha in {0.01, 0.02, ..., 1.00}.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 100.0).collect()
}

/// Re-level the series at each alpha and trace the SD-reduction curve.
///
/// The input must carry a positive alpha (conventionally 1); the
/// temperature-sensitive component is rescaled from it. Both curves are
/// checked to be nondecreasing in alpha.
pub fn alpha_sweep(series: &ShiftableSeries, alphas: &[f64]) -> Result<Vec<AlphaSweepPoint>> {
    if series.alpha <= 0.0 {
        return Err(Error::invalid(
            "alpha sweep needs a base decomposition with alpha > 0 (use alpha = 1)",
        ));
    }
    let ts_full: Vec<f64> =
        series.flexible_mw.iter().map(|f| f / series.alpha).collect();

    let offset = Duration::hours(series.day_boundary_offset_hours as i64);
    let mut by_day: BTreeMap<NaiveDate, Vec<usize>> = BTreeMap::new();
    for (i, ts) in series.timestamps.iter().enumerate() {
        by_day.entry((*ts + offset).date_naive()).or_default().push(i);
    }
    let complete: Vec<(NaiveDate, Vec<usize>)> = by_day
        .into_iter()
        .filter(|(_, idx)| idx.len() == 24 && idx.iter().all(|&i| series.mask[i]))
        .collect();
    if complete.is_empty() {
        return Err(Error::invalid("alpha sweep needs at least one complete day"));
    }

    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("sweep alpha {alpha} outside [0, 1]")));
        }
        let mut day_reductions = Vec::with_capacity(complete.len());
        let mut all_obs = Vec::new();
        let mut all_flat = Vec::new();
        for (date, idx) in &complete {
            let observed: Vec<f64> = idx.iter().map(|&i| series.observed_mw[i]).collect();
            let hard: Vec<f64> = idx
                .iter()
                .map(|&i| series.observed_mw[i] - alpha * ts_full[i])
                .collect();
            let day = DayProfile::new(series.pool_id.clone(), *date, observed, hard)?;
            let flat = flatten_day(&day)?;
            day_reductions.push(flat.stats.sd_reduction_pct);
            all_obs.extend_from_slice(&day.observed);
            all_flat.extend_from_slice(&flat.profile);
        }
        let daily = day_reductions.iter().sum::<f64>() / day_reductions.len() as f64;
        let overall = sd_reduction(&all_obs, &all_flat);
        points.push(AlphaSweepPoint {
            alpha,
            daily_sd_reduction_pct: daily,
            overall_sd_reduction_pct: overall,
        });
    }

    for pair in points.windows(2) {
        if pair[1].daily_sd_reduction_pct < pair[0].daily_sd_reduction_pct - 1e-9
            || pair[1].overall_sd_reduction_pct < pair[0].overall_sd_reduction_pct - 1e-9
        {
            return Err(Error::numerical(format!(
                "SD-reduction curve decreased between alpha {} and {}",
                pair[0].alpha, pair[1].alpha
            )));
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::population_sd;
    use chrono::{DateTime, TimeZone, Utc};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn day_from_hard_flex(hard: Vec<f64>, flex: f64) -> DayProfile {
        // Spread the flexible budget evenly so observed >= hard holds.
        let h = hard.len();
        let observed: Vec<f64> = hard.iter().map(|x| x + flex / h as f64).collect();
        DayProfile::new("p", date(2016, 12, 8), observed, hard).unwrap()
    }

    /// Random feasible alternative: hard plus a random nonnegative
    /// allocation of the flexible budget.
    fn random_feasible(day: &DayProfile, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let h = day.hours();
        let w: Vec<f64> = (0..h).map(|_| rng.random_range(0.0..1.0f64)).collect();
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            let mut x = day.hard.clone();
            x[0] += day.flex_total;
            return x;
        }
        day.hard
            .iter()
            .zip(&w)
            .map(|(hd, wi)| hd + day.flex_total * wi / total)
            .collect()
    }

    #[test]
    fn textbook_day() {
        let day = day_from_hard_flex(vec![1.0, 2.0, 3.0, 10.0], 6.0);
        let flat = flatten_day(&day).unwrap();
        assert_eq!(flat.profile, vec![4.0, 4.0, 4.0, 10.0]);
        assert!(!flat.fully_flat);
    }

    #[test]
    fn uniform_day_fully_flattens() {
        let day = day_from_hard_flex(vec![1.0, 1.0, 1.0, 1.0], 4.0);
        let flat = flatten_day(&day).unwrap();
        assert_eq!(flat.profile, vec![2.0, 2.0, 2.0, 2.0]);
        assert!(flat.fully_flat);
    }

    #[test]
    fn peaked_day_keeps_peak() {
        let day = day_from_hard_flex(vec![1.0, 1.0, 1.0, 5.0], 4.0);
        let flat = flatten_day(&day).unwrap();
        let level = 7.0 / 3.0;
        for h in 0..3 {
            assert!((flat.profile[h] - level).abs() < 1e-12);
        }
        assert_eq!(flat.profile[3], 5.0);
        // peak hard 5 exceeds mean observed 3
        assert!(!flat.fully_flat);
    }

    #[test]
    fn negative_budget_rejected() {
        let day = DayProfile {
            pool_id: "p".into(),
            date: date(2016, 1, 1),
            observed: vec![1.0, 1.0],
            hard: vec![1.0, 1.0],
            flex_total: -0.5,
        };
        assert!(flatten_day(&day).is_err());
    }

    #[test]
    fn oracle_brute_force_small_grid() {
        // Exhaustive-ish check on a 3-hour day: the water-filled profile
        // beats a fine grid of feasible redistributions on SD.
        let day = day_from_hard_flex(vec![2.0, 5.0, 11.0], 6.0);
        let flat = flatten_day(&day).unwrap();
        let sd_opt = population_sd(&flat.profile);
        let steps = 60;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let a = day.flex_total * i as f64 / steps as f64;
                let b = day.flex_total * j as f64 / steps as f64;
                let c = day.flex_total - a - b;
                let alt = vec![day.hard[0] + a, day.hard[1] + b, day.hard[2] + c];
                assert!(sd_opt <= population_sd(&alt) + 1e-9);
            }
        }
    }

    #[test]
    fn oracle_random_feasible_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let h = rng.random_range(3..=24);
            let hard: Vec<f64> = (0..h).map(|_| rng.random_range(0.0..50.0f64)).collect();
            let flex = rng.random_range(0.0..100.0f64);
            let day = day_from_hard_flex(hard, flex);
            let flat = flatten_day(&day).unwrap();

            // energy conservation
            let total_obs: f64 = day.observed.iter().sum();
            let total_flat: f64 = flat.profile.iter().sum();
            assert!((total_flat - total_obs).abs() <= 1e-9 * total_obs.abs().max(1.0));

            // feasibility
            for (x, hd) in flat.profile.iter().zip(&day.hard) {
                assert!(*x >= hd - 1e-12 * hd.abs().max(1.0));
            }

            // optimality against random feasible alternatives
            let sd_flat = population_sd(&flat.profile);
            for _ in 0..100 {
                let alt = random_feasible(&day, &mut rng);
                assert!(sd_flat <= population_sd(&alt) + 1e-9);
            }

            // flattenability criterion
            let mean_obs = total_obs / h as f64;
            let max_hard = day.hard.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(flat.fully_flat, max_hard <= mean_obs);
        }
    }

    fn series_from_days(
        pool: &str,
        offset: i32,
        start: DateTime<Utc>,
        observed: Vec<f64>,
        hard: Vec<f64>,
        alpha: f64,
    ) -> ShiftableSeries {
        let n = observed.len();
        let flexible: Vec<f64> = observed.iter().zip(&hard).map(|(o, h)| o - h).collect();
        let share = observed
            .iter()
            .zip(&flexible)
            .map(|(o, f)| if *o > 0.0 { f / o } else { 0.0 })
            .collect();
        ShiftableSeries {
            pool_id: pool.into(),
            timestamps: (0..n).map(|i| start + Duration::hours(i as i64)).collect(),
            observed_mw: observed,
            hard_mw: hard,
            flexible_mw: flexible,
            share,
            mask: vec![true; n],
            alpha,
            day_boundary_offset_hours: offset,
        }
    }

    fn start_utc() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap()
    }

    #[test]
    fn alpha_zero_series_is_identity() {
        let n = 72;
        let observed: Vec<f64> = (0..n).map(|i| 50.0 + (i % 24) as f64).collect();
        let s = series_from_days("r", 0, start_utc(), observed.clone(), observed.clone(), 0.0);
        let flat = flatten_series(&s).unwrap();
        assert_eq!(flat.days.len(), 3);
        assert_eq!(flat.skipped_days, 0);
        for (day, f) in &flat.days {
            assert_eq!(f.profile, day.observed);
            assert_eq!(f.stats.peak_reduction_pct, 0.0);
            assert_eq!(f.stats.base_increase_pct, 0.0);
            assert_eq!(f.stats.sd_reduction_pct, 0.0);
        }
    }

    #[test]
    fn incomplete_day_skipped_and_counted() {
        let n = 48;
        let observed: Vec<f64> = vec![100.0; n];
        let hard: Vec<f64> = vec![90.0; n];
        let mut s = series_from_days("r", 0, start_utc(), observed, hard, 1.0);
        s.mask[30] = false; // hole in the second day
        let flat = flatten_series(&s).unwrap();
        assert_eq!(flat.days.len(), 1);
        assert_eq!(flat.skipped_days, 1);
    }

    #[test]
    fn series_flattening_composes_from_days() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 72;
        let hard: Vec<f64> = (0..n).map(|_| rng.random_range(10.0..60.0f64)).collect();
        let observed: Vec<f64> = hard.iter().map(|h| h + rng.random_range(0.0..20.0)).collect();
        let s = series_from_days("r", -5, start_utc(), observed.clone(), hard.clone(), 1.0);
        let flat = flatten_series(&s).unwrap();
        // -5h boundary splits 72 hours into partial/complete/complete/partial
        assert_eq!(flat.days.len(), 2);
        assert_eq!(flat.skipped_days, 2);
        for (day, f) in &flat.days {
            let alone = flatten_day(day).unwrap();
            assert_eq!(alone.profile, f.profile);
        }
    }

    fn region_meta(id: &str, ic: Interconnect) -> RegionSpec {
        RegionSpec {
            region_id: id.into(),
            interconnect: ic,
            cell_weights: [("c".to_string(), 1.0)].into_iter().collect(),
            day_boundary_offset_hours: -5,
        }
    }

    #[test]
    fn pooling_one_region_is_identity() {
        let s = series_from_days("a", -5, start_utc(), vec![10.0; 24], vec![8.0; 24], 1.0);
        let regions = vec![region_meta("a", Interconnect::Ercot)];
        let pooled =
            pool_regions(&[s.clone()], &regions, PoolLevel::Interconnect, -6).unwrap();
        assert_eq!(pooled.len(), 1);
        assert_eq!(pooled[0].pool_id, "ERCOT");
        assert_eq!(pooled[0].observed_mw, s.observed_mw);
        assert_eq!(pooled[0].hard_mw, s.hard_mw);
        assert_eq!(pooled[0].day_boundary_offset_hours, -6);

        let region_level = pool_regions(&[s.clone()], &regions, PoolLevel::Region, -6).unwrap();
        assert_eq!(region_level[0].pool_id, "a");
        assert_eq!(region_level[0].day_boundary_offset_hours, -5);
    }

    #[test]
    fn pooling_adds_constant_loads() {
        let a = series_from_days("a", -5, start_utc(), vec![10.0; 24], vec![10.0; 24], 0.5);
        let b = series_from_days("b", -6, start_utc(), vec![20.0; 24], vec![20.0; 24], 0.5);
        let regions = vec![
            region_meta("a", Interconnect::East),
            region_meta("b", Interconnect::East),
        ];
        let pooled = pool_regions(&[a, b], &regions, PoolLevel::Nation, -5).unwrap();
        assert_eq!(pooled.len(), 1);
        assert!(pooled[0].observed_mw.iter().all(|&o| o == 30.0));
    }

    #[test]
    fn pooling_rejects_mismatched_coverage() {
        let a = series_from_days("a", -5, start_utc(), vec![10.0; 24], vec![10.0; 24], 0.5);
        let b = series_from_days(
            "b",
            -5,
            start_utc() + Duration::hours(1),
            vec![20.0; 24],
            vec![20.0; 24],
            0.5,
        );
        let regions = vec![
            region_meta("a", Interconnect::East),
            region_meta("b", Interconnect::East),
        ];
        let err = pool_regions(&[a, b], &regions, PoolLevel::Nation, -5).unwrap_err();
        assert!(err.to_string().contains("coverage mismatch"));
    }

    #[test]
    fn pooled_flattening_dominates_sum_of_flattened() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut members = Vec::new();
            for r in 0..3 {
                let hard: Vec<f64> = (0..24).map(|_| rng.random_range(5.0..40.0f64)).collect();
                let observed: Vec<f64> =
                    hard.iter().map(|h| h + rng.random_range(0.0..15.0)).collect();
                members.push(series_from_days(
                    &format!("r{r}"),
                    0,
                    start_utc(),
                    observed,
                    hard,
                    1.0,
                ));
            }
            let regions: Vec<RegionSpec> = (0..3)
                .map(|r| region_meta(&format!("r{r}"), Interconnect::West))
                .collect();

            let pooled =
                pool_regions(&members, &regions, PoolLevel::Nation, 0).unwrap().remove(0);
            let pooled_flat = flatten_series(&pooled).unwrap();

            let mut summed = vec![0.0; 24];
            for m in &members {
                let f = flatten_series(m).unwrap();
                for (h, v) in f.days[0].1.profile.iter().enumerate() {
                    summed[h] += v;
                }
            }
            let sd_pooled = population_sd(&pooled_flat.days[0].1.profile);
            let sd_summed = population_sd(&summed);
            assert!(sd_pooled <= sd_summed + 1e-9);
        }
    }

    #[test]
    fn sweep_endpoints_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 24 * 5;
        let hard: Vec<f64> = (0..n).map(|_| rng.random_range(20.0..30.0f64)).collect();
        let observed: Vec<f64> = hard.iter().map(|h| h + rng.random_range(0.0..40.0)).collect();
        let s = series_from_days("r", 0, start_utc(), observed, hard, 1.0);

        let mut alphas = vec![0.0];
        alphas.extend(default_alpha_grid());
        let points = alpha_sweep(&s, &alphas).unwrap();
        assert_eq!(points[0].daily_sd_reduction_pct, 0.0);
        assert_eq!(points[0].overall_sd_reduction_pct, 0.0);
        for pair in points.windows(2) {
            assert!(
                pair[1].daily_sd_reduction_pct >= pair[0].daily_sd_reduction_pct - 1e-9
            );
        }
    }

    #[test]
    fn sweep_fully_flattenable_reaches_hundred() {
        // hard far below mean: at alpha = 1 every day levels completely
        let n = 48;
        let hard: Vec<f64> = vec![1.0; n];
        let observed: Vec<f64> = (0..n).map(|i| 10.0 + (i % 24) as f64).collect();
        let s = series_from_days("r", 0, start_utc(), observed, hard, 1.0);
        let points = alpha_sweep(&s, &[1.0]).unwrap();
        assert!((points[0].daily_sd_reduction_pct - 100.0).abs() < 1e-9);
    }
}
