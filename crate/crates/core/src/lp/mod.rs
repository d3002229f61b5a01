//! Local projections of asset prices, probabilities and monthly employment on
//! election shocks.
//!
//! Every estimator runs one regression per horizon `h` on the long difference
//! `y[t+h] - y[t-1]` (or the level, for the probability response) and reports
//! the shock coefficient with a Newey-West standard error whose bandwidth uses
//! the realized sample size at that horizon. Horizons are estimated in
//! parallel and returned in horizon order.

mod daily;
mod monthly;
mod response;
mod spec;

pub use daily::{impact_scale, run_lp_daily, run_lp_onestep, run_lp_prob};
pub use monthly::{covid_exclusion, run_lp_monthly};
pub use response::{
    confidence_bands, parse_irf_csv, write_irf_csv, Band, HorizonEstimate, ImpulseResponse, IrfRow,
    IRF_HEADER,
};
pub use spec::{DateExclusion, ExclusionTarget, LpSpec, Normalization, ShockVariant};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::regress::{fit_wls, newey_west_se, nw_bandwidth, DesignMatrix};

/// One candidate regression row.
pub(crate) struct Row {
    pub date: NaiveDate,
    pub x: Vec<f64>,
    pub y: f64,
    pub w: f64,
    pub group: Option<i32>,
}

/// Fits one horizon and returns the raw (unnormalized) estimate of the
/// coefficient in column `target`.
pub(crate) fn fit_horizon(horizon: usize, labels: Vec<String>, rows: Vec<Row>, target: usize) -> Result<HorizonEstimate> {
    let p = labels.len();
    let active: Vec<&Row> = rows.iter().filter(|r| r.w > 0.0).collect();
    if active.len() < 3 * p {
        return Err(Error::InsufficientSample {
            horizon,
            rows: active.len(),
            params: p,
        });
    }
    let first = active[0].x[target];
    if active.iter().all(|r| r.x[target] == first) {
        return Err(Error::DegenerateShock { horizon });
    }
    let n = rows.len();
    let mut data = Vec::with_capacity(n * p);
    for r in &rows {
        data.extend_from_slice(&r.x);
    }
    let groups = rows
        .iter()
        .all(|r| r.group.is_some())
        .then(|| rows.iter().map(|r| r.group.unwrap_or_default()).collect());
    let x = DesignMatrix::new(
        rows.iter().map(|r| r.date).collect(),
        labels,
        nalgebra::DMatrix::from_row_slice(n, p, &data),
        rows.iter().map(|r| r.w).collect(),
        groups,
    )?;
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let fit = fit_wls(&x, &y)?;
    let bandwidth = nw_bandwidth(fit.n_obs);
    let se = newey_west_se(&fit, &x, bandwidth, target)?;
    Ok(HorizonEstimate {
        horizon,
        coef: fit.coefficients[target],
        se,
        n_obs: fit.n_obs,
        bandwidth,
        nonzero_shock_obs: active.iter().filter(|r| r.x[target] != 0.0).count(),
    })
}
