//! Summary statistics for flattened-demand reports: daily and overall
//! peak/base/SD changes, flattenable-day shares, percentile families of
//! daily peak and base load, seasonal slices, and binned
//! demand-temperature profiles.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flatten::{DayProfile, FlattenedDay};

/// Population standard deviation (divide by n).
pub fn population_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Percent reduction in population SD: `100 * (1 - SD(flat)/SD(raw))`.
/// Defined as 0 when the raw series is already constant; exactly 100 when
/// the flattened series is constant.
pub fn sd_reduction(raw: &[f64], flattened: &[f64]) -> f64 {
    assert_eq!(raw.len(), flattened.len(), "sd_reduction needs equal lengths");
    let sd_raw = population_sd(raw);
    if sd_raw == 0.0 {
        return 0.0;
    }
    let sd_flat = population_sd(flattened);
    if sd_flat == 0.0 {
        return 100.0;
    }
    100.0 * (1.0 - sd_flat / sd_raw)
}

/// Quantile by linear interpolation between order statistics (inclusive),
/// `p` in [0, 1].
pub fn percentile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of empty slice");
    assert!((0.0..=1.0).contains(&p), "percentile p outside [0, 1]");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Season {
    All,
    Winter,
    Summer,
}

impl Season {
    pub fn as_str(&self) -> &'static str {
        match self {
            Season::All => "all",
            Season::Winter => "winter",
            Season::Summer => "summer",
        }
    }
}

impl std::str::FromStr for Season {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Season::All),
            "winter" => Ok(Season::Winter),
            "summer" => Ok(Season::Summer),
            other => Err(Error::invalid(format!("unknown season {other:?}"))),
        }
    }
}

/// Winter is Dec/Jan/Feb, summer Jun/Jul/Aug, by the day's local date.
pub fn in_season(date: NaiveDate, season: Season) -> bool {
    match season {
        Season::All => true,
        Season::Winter => matches!(date.month(), 12 | 1 | 2),
        Season::Summer => matches!(date.month(), 6 | 7 | 8),
    }
}

/// Filter day records by season membership.
pub fn seasonal_slice<'a>(
    days: &[&'a (DayProfile, FlattenedDay)],
    season: Season,
) -> Vec<&'a (DayProfile, FlattenedDay)> {
    days.iter().filter(|(day, _)| in_season(day.date, season)).copied().collect()
}

/// Peak/base/SD changes on one basis (daily mean-of-days or whole-horizon).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisStats {
    pub peak_reduction_pct: f64,
    pub base_increase_pct: f64,
    pub sd_reduction_pct: f64,
}

impl BasisStats {
    pub fn zero() -> Self {
        BasisStats { peak_reduction_pct: 0.0, base_increase_pct: 0.0, sd_reduction_pct: 0.0 }
    }
}

/// Unweighted means of per-day stats plus the share of fully flattenable
/// days, within one pool.
pub fn daily_stats(days: &[&(DayProfile, FlattenedDay)]) -> Result<(BasisStats, f64)> {
    if days.is_empty() {
        return Err(Error::invalid("daily stats over an empty day set"));
    }
    let n = days.len() as f64;
    let mut peak = 0.0;
    let mut base = 0.0;
    let mut sd = 0.0;
    let mut flat_days = 0usize;
    for (_, f) in days {
        peak += f.stats.peak_reduction_pct;
        base += f.stats.base_increase_pct;
        sd += f.stats.sd_reduction_pct;
        flat_days += f.fully_flat as usize;
    }
    Ok((
        BasisStats {
            peak_reduction_pct: peak / n,
            base_increase_pct: base / n,
            sd_reduction_pct: sd / n,
        },
        100.0 * flat_days as f64 / n,
    ))
}

/// Whole-horizon peak/base/SD changes over the concatenated day profiles.
pub fn overall_stats(days: &[&(DayProfile, FlattenedDay)]) -> Result<BasisStats> {
    if days.is_empty() {
        return Err(Error::invalid("overall stats over an empty day set"));
    }
    let mut obs = Vec::with_capacity(days.len() * 24);
    let mut flat = Vec::with_capacity(days.len() * 24);
    for (day, f) in days {
        obs.extend_from_slice(&day.observed);
        flat.extend_from_slice(&f.profile);
    }
    let max_obs = obs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_obs = obs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_flat = flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_flat = flat.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(BasisStats {
        peak_reduction_pct: if max_obs != 0.0 { 100.0 * (1.0 - max_flat / max_obs) } else { 0.0 },
        base_increase_pct: if min_obs != 0.0 { 100.0 * (min_flat / min_obs - 1.0) } else { 0.0 },
        sd_reduction_pct: sd_reduction(&obs, &flat),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PercentileTriple {
    pub p1: f64,
    pub mean: f64,
    pub p99: f64,
}

/// Daily peak and base levels as percentages of the daily mean and of the
/// overall mean.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PercentileGrid {
    pub base_daily: PercentileTriple,
    pub base_overall: PercentileTriple,
    pub peak_daily: PercentileTriple,
    pub peak_overall: PercentileTriple,
}

/// Normalization constants for percentile families. Scenario reports pass
/// the historic observed means; otherwise the slice's own observed means
/// apply.
#[derive(Debug, Clone)]
pub struct NormalizationBasis {
    pub daily_means: BTreeMap<NaiveDate, f64>,
    pub overall_mean: f64,
}

impl NormalizationBasis {
    pub fn from_days(days: &[&(DayProfile, FlattenedDay)]) -> Self {
        let mut daily = BTreeMap::new();
        let mut total = 0.0;
        let mut count = 0usize;
        for (day, _) in days {
            let sum: f64 = day.observed.iter().sum();
            daily.insert(day.date, sum / day.observed.len() as f64);
            total += sum;
            count += day.observed.len();
        }
        NormalizationBasis {
            daily_means: daily,
            overall_mean: if count > 0 { total / count as f64 } else { 0.0 },
        }
    }
}

/// One pool's day records for report assembly.
#[derive(Debug, Clone)]
pub struct PoolSlice<'a> {
    pub pool_id: String,
    /// Mean observed demand over the slice; the cross-pool weight.
    pub weight: f64,
    pub days: Vec<&'a (DayProfile, FlattenedDay)>,
    /// Historic normalization for percentile families, when the flattened
    /// profiles come from a climate scenario.
    pub baseline: Option<NormalizationBasis>,
}

/// The full statistics block for one (pool level, season, alpha,
/// scenario) grouping.
#[derive(Debug, Clone, Serialize)]
pub struct FlattenReport {
    pub pool_level: String,
    pub season: Season,
    pub alpha: f64,
    pub scenario_delta_t: Option<f64>,
    pub n_pools: usize,
    pub n_days: usize,
    /// Demand-weighted means across pools of per-pool daily stats.
    pub daily: BasisStats,
    /// Unweighted cross-pool means, emitted alongside the headline
    /// demand-weighted figures.
    pub daily_unweighted: BasisStats,
    pub overall: BasisStats,
    pub overall_unweighted: BasisStats,
    pub flattenable_share_pct: f64,
    pub flattenable_share_unweighted_pct: f64,
    pub percentiles: PercentileGrid,
}

/// Aggregate per-pool day records into one report row.
pub fn flatten_report(
    pools: &[PoolSlice<'_>],
    pool_level: &str,
    season: Season,
    alpha: f64,
    scenario_delta_t: Option<f64>,
) -> Result<FlattenReport> {
    let live: Vec<&PoolSlice> = pools.iter().filter(|p| !p.days.is_empty()).collect();
    if live.is_empty() {
        return Err(Error::invalid(format!(
            "no days to report for level {pool_level} season {}",
            season.as_str()
        )));
    }

    let mut weight_sum = 0.0;
    let mut daily_w = [0.0; 3];
    let mut daily_u = [0.0; 3];
    let mut overall_w = [0.0; 3];
    let mut overall_u = [0.0; 3];
    let mut share_w = 0.0;
    let mut share_u = 0.0;
    let mut n_days = 0usize;

    let mut base_daily = Vec::new();
    let mut base_overall = Vec::new();
    let mut peak_daily = Vec::new();
    let mut peak_overall = Vec::new();

    for pool in &live {
        let (daily, share) = daily_stats(&pool.days)?;
        let overall = overall_stats(&pool.days)?;
        let w = pool.weight;
        weight_sum += w;
        for (acc, v) in daily_w.iter_mut().zip([
            daily.peak_reduction_pct,
            daily.base_increase_pct,
            daily.sd_reduction_pct,
        ]) {
            *acc += w * v;
        }
        for (acc, v) in daily_u.iter_mut().zip([
            daily.peak_reduction_pct,
            daily.base_increase_pct,
            daily.sd_reduction_pct,
        ]) {
            *acc += v;
        }
        for (acc, v) in overall_w.iter_mut().zip([
            overall.peak_reduction_pct,
            overall.base_increase_pct,
            overall.sd_reduction_pct,
        ]) {
            *acc += w * v;
        }
        for (acc, v) in overall_u.iter_mut().zip([
            overall.peak_reduction_pct,
            overall.base_increase_pct,
            overall.sd_reduction_pct,
        ]) {
            *acc += v;
        }
        share_w += w * share;
        share_u += share;
        n_days += pool.days.len();

        let own_basis;
        let basis = match &pool.baseline {
            Some(b) => b,
            None => {
                own_basis = NormalizationBasis::from_days(&pool.days);
                &own_basis
            }
        };
        for (day, flat) in &pool.days {
            let day_mean = basis.daily_means.get(&day.date).copied().unwrap_or_else(|| {
                day.observed.iter().sum::<f64>() / day.observed.len() as f64
            });
            let peak = flat.profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let base = flat.profile.iter().cloned().fold(f64::INFINITY, f64::min);
            base_daily.push(100.0 * base / day_mean);
            peak_daily.push(100.0 * peak / day_mean);
            base_overall.push(100.0 * base / basis.overall_mean);
            peak_overall.push(100.0 * peak / basis.overall_mean);
        }
    }

    if weight_sum <= 0.0 {
        return Err(Error::invalid("pool weights must sum to a positive value"));
    }
    let k = live.len() as f64;
    let triple = |v: &[f64]| PercentileTriple {
        p1: percentile(v, 0.01),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        p99: percentile(v, 0.99),
    };

    Ok(FlattenReport {
        pool_level: pool_level.to_string(),
        season,
        alpha,
        scenario_delta_t,
        n_pools: live.len(),
        n_days,
        daily: BasisStats {
            peak_reduction_pct: daily_w[0] / weight_sum,
            base_increase_pct: daily_w[1] / weight_sum,
            sd_reduction_pct: daily_w[2] / weight_sum,
        },
        daily_unweighted: BasisStats {
            peak_reduction_pct: daily_u[0] / k,
            base_increase_pct: daily_u[1] / k,
            sd_reduction_pct: daily_u[2] / k,
        },
        overall: BasisStats {
            peak_reduction_pct: overall_w[0] / weight_sum,
            base_increase_pct: overall_w[1] / weight_sum,
            sd_reduction_pct: overall_w[2] / weight_sum,
        },
        overall_unweighted: BasisStats {
            peak_reduction_pct: overall_u[0] / k,
            base_increase_pct: overall_u[1] / k,
            sd_reduction_pct: overall_u[2] / k,
        },
        flattenable_share_pct: share_w / weight_sum,
        flattenable_share_unweighted_pct: share_u / k,
        percentiles: PercentileGrid {
            base_daily: triple(&base_daily),
            base_overall: triple(&base_overall),
            peak_daily: triple(&peak_daily),
            peak_overall: triple(&peak_overall),
        },
    })
}

/// One bin of the demand-temperature profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TempBin {
    pub center: f64,
    /// Mean demand index (demand over mean demand); `None` for empty bins.
    pub mean_index: Option<f64>,
    pub count: usize,
}

/// Bin the demand index by a covariate (temperature or degree-hours).
/// Bins have the given width; empty bins inside the covariate range are
/// emitted with a zero count.
pub fn demand_temperature_profile(
    demand: &[f64],
    mask: &[bool],
    covariate: &[f64],
    bin_width: f64,
) -> Result<Vec<TempBin>> {
    if demand.len() != covariate.len() || demand.len() != mask.len() {
        return Err(Error::invalid("profile inputs must have equal lengths"));
    }
    if !(bin_width > 0.0) {
        return Err(Error::invalid("bin width must be positive"));
    }
    let valid: Vec<usize> = (0..demand.len())
        .filter(|&i| mask[i] && demand[i].is_finite() && covariate[i].is_finite())
        .collect();
    if valid.is_empty() {
        return Ok(Vec::new());
    }
    let mean_demand: f64 =
        valid.iter().map(|&i| demand[i]).sum::<f64>() / valid.len() as f64;

    let bin_of = |x: f64| (x / bin_width).floor() as i64;
    let lo = valid.iter().map(|&i| bin_of(covariate[i])).min().unwrap();
    let hi = valid.iter().map(|&i| bin_of(covariate[i])).max().unwrap();

    let n_bins = (hi - lo + 1) as usize;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for &i in &valid {
        let b = (bin_of(covariate[i]) - lo) as usize;
        sums[b] += demand[i] / mean_demand;
        counts[b] += 1;
    }
    Ok((0..n_bins)
        .map(|b| TempBin {
            center: (lo + b as i64) as f64 * bin_width + bin_width / 2.0,
            mean_index: if counts[b] > 0 { Some(sums[b] / counts[b] as f64) } else { None },
            count: counts[b],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::flatten_day;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn day(observed: Vec<f64>, hard: Vec<f64>, d: NaiveDate) -> (DayProfile, FlattenedDay) {
        let profile = DayProfile::new("p", d, observed, hard).unwrap();
        let flat = flatten_day(&profile).unwrap();
        (profile, flat)
    }

    #[test]
    fn sd_reduction_examples() {
        assert_eq!(sd_reduction(&[1.0, 3.0], &[2.0, 2.0]), 100.0);
        assert_eq!(sd_reduction(&[1.0, 3.0], &[1.0, 3.0]), 0.0);
        assert_eq!(sd_reduction(&[5.0, 5.0], &[5.0, 5.0]), 0.0);
        // raw SD 2, flattened SD 0.5 -> 75
        let raw = [0.0, 4.0];
        let flat = [1.75, 2.75];
        assert!((population_sd(&raw) - 2.0).abs() < 1e-12);
        assert!((population_sd(&flat) - 0.5).abs() < 1e-12);
        assert!((sd_reduction(&raw, &flat) - 75.0).abs() < 1e-12);
    }

    #[test]
    fn percentile_matches_sort_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let n = rng.random_range(1..200);
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
            let p: f64 = rng.random_range(0.0..1.0);
            let got = percentile(&values, p);

            // direct sort-based linear interpolation
            let mut sorted = values.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let h = (sorted.len() - 1) as f64 * p;
            let expect =
                sorted[h.floor() as usize] * (1.0 - h.fract()) + sorted[h.ceil() as usize] * h.fract();
            assert!((got - expect).abs() < 1e-9);
        }
        assert_eq!(percentile(&[3.0], 0.5), 3.0);
        assert_eq!(percentile(&[1.0, 2.0], 0.0), 1.0);
        assert_eq!(percentile(&[1.0, 2.0], 1.0), 2.0);
        assert_eq!(percentile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn season_membership() {
        assert!(in_season(date(2017, 1, 15), Season::Winter));
        assert!(in_season(date(2017, 7, 4), Season::Summer));
        assert!(!in_season(date(2017, 4, 1), Season::Winter));
        assert!(!in_season(date(2017, 4, 1), Season::Summer));
        assert!(in_season(date(2017, 4, 1), Season::All));
        assert!(in_season(date(2017, 12, 31), Season::Winter));
    }

    #[test]
    fn identity_days_give_zero_stats() {
        let obs = vec![10.0, 12.0, 14.0, 16.0];
        let days = vec![
            day(obs.clone(), obs.clone(), date(2017, 1, 1)),
            day(obs.clone(), obs.clone(), date(2017, 1, 2)),
        ];
        let refs: Vec<&(DayProfile, FlattenedDay)> = days.iter().collect();
        let (stats, share) = daily_stats(&refs).unwrap();
        assert_eq!(stats.peak_reduction_pct, 0.0);
        assert_eq!(stats.base_increase_pct, 0.0);
        assert_eq!(stats.sd_reduction_pct, 0.0);
        assert_eq!(share, 0.0); // no day is constant, so none fully flat
        let overall = overall_stats(&refs).unwrap();
        assert_eq!(overall.peak_reduction_pct, 0.0);
    }

    #[test]
    fn single_day_stats_match_hand_computation() {
        // obs [1,2,3,10] -> flat [4,4,4,10]: peak 0, base +300, SD ~25.42
        let d = day(
            vec![1.0, 2.0, 3.0, 10.0],
            vec![0.0, 0.0, 0.0, 10.0],
            date(2017, 6, 1),
        );
        // hard chosen so the flexible budget levels the three low hours to 4
        assert_eq!(d.1.profile, vec![4.0, 4.0, 4.0, 10.0]);
        assert_eq!(d.1.stats.peak_reduction_pct, 0.0);
        assert!((d.1.stats.base_increase_pct - 300.0).abs() < 1e-12);
        let expect_sd = 100.0
            * (1.0
                - population_sd(&[4.0, 4.0, 4.0, 10.0]) / population_sd(&[1.0, 2.0, 3.0, 10.0]));
        assert!((d.1.stats.sd_reduction_pct - expect_sd).abs() < 1e-12);
        assert!((expect_sd - 25.4).abs() < 0.1);
    }

    #[test]
    fn demand_weighted_cross_pool_average() {
        // Pool a flattens completely (SD reduction 100), pool b not at all
        // (0). With weights 10 and 30 the demand-weighted mean is 25; the
        // unweighted mean is 50.
        let d1 = day(vec![1.0, 3.0], vec![1.0, 1.0], date(2017, 1, 1));
        let d2 = day(vec![1.0, 3.0], vec![1.0, 3.0], date(2017, 1, 1));
        assert_eq!(d1.1.stats.sd_reduction_pct, 100.0);
        assert_eq!(d2.1.stats.sd_reduction_pct, 0.0);
        let days1 = vec![&d1];
        let days2 = vec![&d2];
        let pools = vec![
            PoolSlice { pool_id: "a".into(), weight: 10.0, days: days1, baseline: None },
            PoolSlice { pool_id: "b".into(), weight: 30.0, days: days2, baseline: None },
        ];
        let report = flatten_report(&pools, "region", Season::All, 0.5, None).unwrap();
        assert!((report.daily.sd_reduction_pct - 25.0).abs() < 1e-12);
        assert!((report.daily_unweighted.sd_reduction_pct - 50.0).abs() < 1e-12);
        assert_eq!(report.n_pools, 2);
        assert_eq!(report.n_days, 2);
    }

    #[test]
    fn overall_two_level_series() {
        // 100 for half the hours, 200 for the other half: base is 66.7% of
        // the mean, peak 133.3%.
        let obs: Vec<f64> = (0..24).map(|h| if h < 12 { 100.0 } else { 200.0 }).collect();
        let d = day(obs.clone(), obs.clone(), date(2017, 5, 1));
        let days = vec![&d];
        let pools = vec![PoolSlice {
            pool_id: "a".into(),
            weight: 1.0,
            days,
            baseline: None,
        }];
        let report = flatten_report(&pools, "region", Season::All, 0.0, None).unwrap();
        assert!((report.percentiles.base_overall.mean - 100.0 * 100.0 / 150.0).abs() < 1e-9);
        assert!((report.percentiles.peak_overall.mean - 100.0 * 200.0 / 150.0).abs() < 1e-9);
        assert!((report.percentiles.base_daily.mean - report.percentiles.base_overall.mean).abs() < 1e-9);
    }

    #[test]
    fn constant_series_percentiles_are_all_hundred() {
        let obs = vec![42.0; 24];
        let d = day(obs.clone(), obs, date(2017, 5, 1));
        let days = vec![&d];
        let pools =
            vec![PoolSlice { pool_id: "a".into(), weight: 1.0, days, baseline: None }];
        let report = flatten_report(&pools, "region", Season::All, 0.0, None).unwrap();
        for t in [
            report.percentiles.base_daily,
            report.percentiles.base_overall,
            report.percentiles.peak_daily,
            report.percentiles.peak_overall,
        ] {
            assert!((t.p1 - 100.0).abs() < 1e-9);
            assert!((t.mean - 100.0).abs() < 1e-9);
            assert!((t.p99 - 100.0).abs() < 1e-9);
            assert!(t.p1 <= t.mean && t.mean <= t.p99);
        }
    }

    #[test]
    fn profile_constant_demand_has_unit_index() {
        let demand = vec![70.0; 100];
        let mask = vec![true; 100];
        let x: Vec<f64> = (0..100).map(|i| -5.0 + 0.4 * i as f64).collect();
        let bins = demand_temperature_profile(&demand, &mask, &x, 1.0).unwrap();
        let total: usize = bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 100);
        for b in &bins {
            if let Some(m) = b.mean_index {
                assert!((m - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_recovers_u_shape() {
        let x: Vec<f64> = (0..2000).map(|i| -10.0 + 0.02 * i as f64).collect();
        let demand: Vec<f64> = x.iter().map(|t| 1.0 + 0.02 * (t - 18.0).abs()).collect();
        let mask = vec![true; x.len()];
        let bins = demand_temperature_profile(&demand, &mask, &x, 1.0).unwrap();
        let mean_demand = demand.iter().sum::<f64>() / demand.len() as f64;
        for b in bins.iter().filter(|b| b.count > 0) {
            // generator oracle: mean of 1 + 0.02|t-18| over the bin's samples
            let members: Vec<f64> = x
                .iter()
                .zip(&demand)
                .filter(|(t, _)| (**t / 1.0).floor() * 1.0 + 0.5 == b.center)
                .map(|(_, d)| *d / mean_demand)
                .collect();
            if !members.is_empty() {
                let expect = members.iter().sum::<f64>() / members.len() as f64;
                assert!((b.mean_index.unwrap() - expect).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn profile_counts_exclude_masked_hours() {
        let demand = vec![1.0, 2.0, 3.0, 4.0];
        let mask = vec![true, false, true, true];
        let x = vec![0.5, 0.6, 1.5, 2.5];
        let bins = demand_temperature_profile(&demand, &mask, &x, 1.0).unwrap();
        let total: usize = bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 3);
    }
}
