use chrono::NaiveDate;
use rayon::prelude::*;

use super::response::ImpulseResponse;
use super::spec::{DateExclusion, ExclusionTarget, LpSpec};
use super::{fit_horizon, Row};
use crate::error::Result;
use crate::regress::INTERCEPT;
use crate::timeline::MonthlySeries;

/// Drops rows whose horizon month lies in March through December 2020.
pub fn covid_exclusion() -> DateExclusion {
    DateExclusion::new(
        NaiveDate::from_ymd_opt(2020, 3, 1).expect("date"),
        NaiveDate::from_ymd_opt(2020, 12, 31).expect("date"),
        ExclusionTarget::Target,
    )
}

/// Unweighted long-difference projection of monthly `y` (log employment) on
/// the monthly shock sum.
///
/// Controls are `spec.control_lags` lags of `y` itself and of each series in
/// `controls`, which are used as given (apply log differences beforehand).
/// Months where any lag is missing drop out. Exclusions are tested against
/// the first day of the origin and horizon months.
pub fn run_lp_monthly(
    shock_m: &MonthlySeries,
    y: &MonthlySeries,
    controls: &[&MonthlySeries],
    spec: &LpSpec,
) -> Result<ImpulseResponse> {
    let lags = spec.control_lags;
    let mut w_series: Vec<&MonthlySeries> = vec![y];
    w_series.extend_from_slice(controls);
    let mut labels = vec![INTERCEPT.to_string(), "shock".to_string()];
    for (k, s) in w_series.iter().enumerate() {
        let name = if k == 0 { "y" } else { s.name() };
        labels.extend((1..=lags).map(|l| format!("w_{name}_l{l}")));
    }
    let months: Vec<_> = shock_m.months().collect();
    let raw = (0..=spec.horizons)
        .into_par_iter()
        .map(|h| {
            let rows: Vec<Row> = months
                .iter()
                .filter_map(|&t| {
                    let target = t.offset(h as i64);
                    if spec.excluded(t.first_day(), target.first_day()) {
                        return None;
                    }
                    let dy = y.get(target)? - y.get(t.pred())?;
                    let mut x = Vec::with_capacity(labels.len());
                    x.push(1.0);
                    x.push(shock_m.get(t)?);
                    for s in &w_series {
                        for l in 1..=lags {
                            x.push(s.get(t.offset(-(l as i64)))?);
                        }
                    }
                    Some(Row {
                        date: t.first_day(),
                        x,
                        y: dy,
                        w: 1.0,
                        group: None,
                    })
                })
                .collect();
            fit_horizon(h, labels.clone(), rows, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpulseResponse::new(&spec.name, y.name(), spec.normalization.factor(), raw))
}
