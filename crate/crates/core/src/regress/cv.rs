//! Year-out cross-validation over a grid of knot specifications.
//!
//! Each fold holds out one full local calendar year, trains on the rest,
//! and scores out-of-sample R^2 on log demand. The selected spec has the
//! highest mean CV R^2, ties broken toward fewer parameters.

use chrono::{Datelike, Duration};
use rayon::prelude::*;

use super::{build_design, calendar_features, least_squares};
use super::{LoadSeries, ModelSpec};
use crate::error::{Error, Result};
use crate::weather::RegionalWeather;

#[derive(Debug, Clone)]
pub struct CvEntry {
    pub spec: ModelSpec,
    /// Out-of-sample R^2 per held-out year, in year order.
    pub fold_r2: Vec<f64>,
    pub mean_r2: f64,
}

#[derive(Debug, Clone)]
pub struct CvResult {
    pub entries: Vec<CvEntry>,
    pub best: ModelSpec,
    /// Held-out years, one per fold.
    pub years: Vec<i32>,
}

/// Group valid hours by complete local calendar year. Errors if any year
/// touched by the series is incomplete, reporting the missing spans.
pub fn complete_local_years(
    load: &LoadSeries,
    offset_hours: i32,
) -> Result<Vec<(i32, Vec<usize>)>> {
    let mut by_year: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
    for (i, ts) in load.timestamps.iter().enumerate() {
        let local = *ts + Duration::hours(offset_hours as i64);
        by_year.entry(local.year()).or_default().push(i);
    }

    let mut problems = Vec::new();
    for (&year, indices) in &by_year {
        let leap = chrono::NaiveDate::from_ymd_opt(year, 12, 31)
            .map(|d| d.ordinal() == 366)
            .unwrap_or(false);
        let expected = if leap { 8784 } else { 8760 };
        let masked = indices.iter().filter(|&&i| !load.mask[i]).count();
        if indices.len() != expected || masked > 0 {
            let first = load.timestamps[indices[0]];
            let last = load.timestamps[*indices.last().unwrap()];
            problems.push(format!(
                "year {year}: {} of {expected} hours present, {masked} masked (span {first} .. {last})",
                indices.len()
            ));
        }
    }
    if !problems.is_empty() {
        return Err(Error::invalid(format!(
            "incomplete years for region {}: {}",
            load.region_id,
            problems.join("; ")
        )));
    }
    Ok(by_year.into_iter().collect())
}

/// Cross-validate every spec in the grid; one fold per complete year.
pub fn cross_validate(
    load: &LoadSeries,
    weather: &RegionalWeather,
    specs: &[ModelSpec],
    offset_hours: i32,
) -> Result<CvResult> {
    load.validate()?;
    if specs.is_empty() {
        return Err(Error::invalid("empty cross-validation grid"));
    }
    let years = complete_local_years(load, offset_hours)?;
    if years.len() < 2 {
        return Err(Error::invalid(format!(
            "cross-validation needs at least 2 complete years, found {}",
            years.len()
        )));
    }

    let cal = calendar_features(&load.timestamps, offset_hours);
    let log_demand: Vec<f64> = load.demand_mw.iter().map(|d| d.ln()).collect();

    let entries: Vec<CvEntry> = specs
        .par_iter()
        .map(|spec| -> Result<CvEntry> {
            spec.validate()?;
            let design = build_design(&cal, weather, spec)?;
            let mut fold_r2 = Vec::with_capacity(years.len());
            for (held_out, _) in &years {
                let train: Vec<usize> = years
                    .iter()
                    .filter(|(y, _)| y != held_out)
                    .flat_map(|(_, idx)| idx.iter().copied())
                    .collect();
                let test = &years.iter().find(|(y, _)| y == held_out).unwrap().1;

                let x_train = design.select(ndarray::Axis(0), &train);
                let y_train: Vec<f64> = train.iter().map(|&i| log_demand[i]).collect();
                let ls = least_squares(x_train.view(), &y_train)?;

                let x_test = design.select(ndarray::Axis(0), test);
                let pred = x_test.dot(&ndarray::Array1::from_vec(ls.coefficients));
                let y_test: Vec<f64> = test.iter().map(|&i| log_demand[i]).collect();
                let mean = y_test.iter().sum::<f64>() / y_test.len() as f64;
                let sse: f64 = pred
                    .iter()
                    .zip(&y_test)
                    .map(|(p, y)| (p - y) * (p - y))
                    .sum();
                let sst: f64 = y_test.iter().map(|y| (y - mean) * (y - mean)).sum();
                fold_r2.push(if sst > 0.0 { 1.0 - sse / sst } else { 1.0 });
            }
            let mean_r2 = fold_r2.iter().sum::<f64>() / fold_r2.len() as f64;
            Ok(CvEntry { spec: *spec, fold_r2, mean_r2 })
        })
        .collect::<Result<_>>()?;

    let best = entries
        .iter()
        .min_by(|a, b| {
            (-a.mean_r2, a.spec.param_count(), a.spec.knots_hod, a.spec.knots_hoy)
                .partial_cmp(&(-b.mean_r2, b.spec.param_count(), b.spec.knots_hod, b.spec.knots_hoy))
                .expect("finite CV scores")
        })
        .expect("non-empty grid")
        .spec;

    Ok(CvResult { entries, best, years: years.into_iter().map(|(y, _)| y).collect() })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{hourly, synthetic_load, synthetic_weather};
    use super::*;

    fn three_year_hours() -> Vec<chrono::DateTime<chrono::Utc>> {
        // 2016 is a leap year: 8784 + 8760 + 8760 hours, UTC-aligned (offset 0).
        hourly((2016, 1, 1), 8784 + 8760 + 8760)
    }

    #[test]
    fn three_years_make_three_folds() {
        let ts = three_year_hours();
        let w = synthetic_weather(&ts, 20);
        let spec = ModelSpec::new(3, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, 0, 0.03, 0.04, 0.05, 21);
        let cv = cross_validate(&load, &w, &[spec], 0).unwrap();
        assert_eq!(cv.years, vec![2016, 2017, 2018]);
        assert_eq!(cv.entries[0].fold_r2.len(), 3);
    }

    #[test]
    fn noiseless_model_in_grid_wins_with_perfect_score() {
        let ts = three_year_hours();
        let w = synthetic_weather(&ts, 22);
        let truth = ModelSpec::new(5, 4, false);
        let (load, _) = synthetic_load(&ts, &w, &truth, 0, 0.03, 0.04, 0.0, 23);
        let grid = [ModelSpec::new(3, 3, false), truth, ModelSpec::new(6, 5, false)];
        let cv = cross_validate(&load, &w, &grid, 0).unwrap();
        let best_entry = cv.entries.iter().find(|e| e.spec == cv.best).unwrap();
        assert_eq!(cv.best, truth);
        assert!((best_entry.mean_r2 - 1.0).abs() < 1e-9, "mean R2 {}", best_entry.mean_r2);
    }

    #[test]
    fn incomplete_years_rejected_with_span_report() {
        let ts = hourly((2016, 1, 1), 8784 + 100);
        let w = synthetic_weather(&ts, 24);
        let spec = ModelSpec::new(3, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, 0, 0.03, 0.04, 0.0, 25);
        let err = cross_validate(&load, &w, &[spec], 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("incomplete years"), "{msg}");
        assert!(msg.contains("2017"), "{msg}");
    }

    #[test]
    fn held_out_rows_never_influence_fold_predictions() {
        // Poison one year's demand; predictions for that fold must not move.
        let ts = three_year_hours();
        let w = synthetic_weather(&ts, 26);
        let spec = ModelSpec::new(3, 3, false);
        let (load, _) = synthetic_load(&ts, &w, &spec, 0, 0.03, 0.04, 0.02, 27);

        let years = complete_local_years(&load, 0).unwrap();
        let (_, idx_2017) = &years[1];

        // Fit on the other two years, predict 2017.
        let cal = calendar_features(&load.timestamps, 0);
        let design = build_design(&cal, &w, &spec).unwrap();
        let train: Vec<usize> = years
            .iter()
            .filter(|(y, _)| *y != 2017)
            .flat_map(|(_, i)| i.iter().copied())
            .collect();
        let predict_fold = |l: &LoadSeries| {
            let y: Vec<f64> = train.iter().map(|&i| l.demand_mw[i].ln()).collect();
            let ls = least_squares(design.select(ndarray::Axis(0), &train).view(), &y).unwrap();
            design
                .select(ndarray::Axis(0), idx_2017)
                .dot(&ndarray::Array1::from_vec(ls.coefficients))
        };

        let base = predict_fold(&load);
        let mut poisoned = load.clone();
        for &i in idx_2017 {
            poisoned.demand_mw[i] = 123456.789;
        }
        let after = predict_fold(&poisoned);
        for (a, b) in base.iter().zip(after.iter()) {
            assert_eq!(a, b);
        }
    }
}
