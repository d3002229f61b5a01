use rayon::prelude::*;

use super::response::{HorizonEstimate, ImpulseResponse};
use super::spec::LpSpec;
use super::{fit_horizon, Row};
use crate::error::{Error, Result};
use crate::regress::INTERCEPT;
use crate::shockgen::{build_onestep_design, DesignOptions, NewsPanel, ShockSeries};
use crate::timeline::{DailySeries, ElectionCycle};

fn same_calendar(shocks: &ShockSeries, y: &DailySeries) -> Result<()> {
    if shocks.calendar.dates() != y.calendar().dates() {
        return Err(Error::Dimension(format!(
            "shock and {} series live on different calendars",
            y.name()
        )));
    }
    Ok(())
}

/// `y[t-1] - y[t-1-m]`, if both exist.
fn lagged_change(y: &DailySeries, t: usize, m: usize) -> Option<f64> {
    if t < m + 1 {
        return None;
    }
    Some(y.get(t - 1)? - y.get(t - 1 - m)?)
}

fn shock_rows(shocks: &ShockSeries, spec: &LpSpec, mut build: impl FnMut(usize) -> Option<(Vec<f64>, f64)>) -> Vec<Row> {
    let cal = &shocks.calendar;
    (0..shocks.len())
        .filter_map(|t| {
            if !shocks.defined[t] {
                return None;
            }
            let w = if spec.weighted { shocks.weights[t] } else { 1.0 };
            if w <= 0.0 {
                return None;
            }
            let (x, y) = build(t)?;
            Some(Row {
                date: cal.date(t),
                x,
                y,
                w,
                group: Some(shocks.cycles[t].unwrap_or(i32::MIN)),
            })
        })
        .collect()
}

fn in_window(spec: &LpSpec, shocks: &ShockSeries, t: usize, h: usize) -> bool {
    let cal = &shocks.calendar;
    t + h < cal.len() && !spec.excluded(cal.date(t), cal.date(t + h))
}

/// Weighted long-difference projection of `y` (log levels) on the shock.
///
/// Regressors: intercept, shock and, if enabled, the lagged one-month change
/// of `y`. Coefficients are reported after `spec.normalization`.
pub fn run_lp_daily(shocks: &ShockSeries, y: &DailySeries, spec: &LpSpec) -> Result<ImpulseResponse> {
    same_calendar(shocks, y)?;
    let mut labels = vec![INTERCEPT.to_string(), "shock".to_string()];
    if spec.lagged_change {
        labels.push("dy_1m_lag".into());
    }
    let raw = (0..=spec.horizons)
        .into_par_iter()
        .map(|h| {
            let rows = shock_rows(shocks, spec, |t| {
                if t == 0 || !in_window(spec, shocks, t, h) {
                    return None;
                }
                let dy = y.get(t + h)? - y.get(t - 1)?;
                let mut x = vec![1.0, shocks.values[t]];
                if spec.lagged_change {
                    x.push(lagged_change(y, t, spec.month_len)?);
                }
                Some((x, dy))
            });
            fit_horizon(h, labels.clone(), rows, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpulseResponse::new(&spec.name, y.name(), spec.normalization.factor(), raw))
}

/// Projection of the probability level `prob[t+h]` on the shock. Rows whose
/// horizon date has no probability (after the cycle ends) drop out.
pub fn run_lp_prob(shocks: &ShockSeries, prob: &DailySeries, spec: &LpSpec) -> Result<ImpulseResponse> {
    same_calendar(shocks, prob)?;
    let labels = vec![INTERCEPT.to_string(), "shock".to_string()];
    let raw = (0..=spec.horizons)
        .into_par_iter()
        .map(|h| {
            let rows = shock_rows(shocks, spec, |t| {
                if !in_window(spec, shocks, t, h) || !shocks.same_cycle(t, t + h) {
                    return None;
                }
                Some((vec![1.0, shocks.values[t]], prob.get(t + h)?))
            });
            fit_horizon(h, labels.clone(), rows, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpulseResponse::new(&spec.name, prob.name(), spec.normalization.factor(), raw))
}

/// Factor that turns raw coefficients into responses per 10pp impact on the
/// probability: `10 / b0`, with `b0` the impact coefficient of the
/// probability on the shock under `spec`'s sample and weights.
///
/// Log-level responses come out in percent, probability responses in pp.
pub fn impact_scale(shocks: &ShockSeries, prob: &DailySeries, spec: &LpSpec) -> Result<f64> {
    let spec0 = LpSpec {
        horizons: 0,
        normalization: super::Normalization::Raw,
        ..spec.clone()
    };
    let b0 = run_lp_prob(shocks, prob, &spec0)?.estimates[0].coef;
    if b0 == 0.0 || !b0.is_finite() {
        return Err(Error::DegenerateShock { horizon: 0 });
    }
    Ok(10.0 / b0)
}

/// One-step projection: `y[t+h] - y[t-1]` on the full probability-equation
/// stack with the contemporaneous probability added (and, if enabled, the
/// lagged one-month change). Reports the coefficient on `pi_l0`.
///
/// `prob` must already carry the resolved outcomes (see
/// [`crate::shockgen::resolve_outcomes`]). With `Normalization::Scale(10.0)`
/// the response is in percent per 10pp move in the probability.
pub fn run_lp_onestep(
    prob: &DailySeries,
    news: &NewsPanel,
    cycles: &[ElectionCycle],
    weights: &[f64],
    y: &DailySeries,
    spec: &LpSpec,
) -> Result<ImpulseResponse> {
    if prob.calendar().dates() != y.calendar().dates() {
        return Err(Error::Dimension("probability and outcome calendars differ".into()));
    }
    let ed = build_onestep_design(
        prob,
        news,
        cycles,
        weights,
        &DesignOptions {
            weighted: spec.weighted,
        },
    )?;
    let mut labels = ed.design.labels().to_vec();
    if spec.lagged_change {
        labels.push("dy_1m_lag".into());
    }
    let target = labels.iter().position(|l| l == "pi_l0").expect("pi_l0 column");
    let cal = prob.calendar();
    let vals = ed.design.values();
    let groups = ed.design.groups().expect("cycle groups");
    let dw = ed.design.weights();
    let raw: Vec<HorizonEstimate> = (0..=spec.horizons)
        .into_par_iter()
        .map(|h| {
            let rows = ed
                .positions
                .iter()
                .enumerate()
                .filter_map(|(r, &t)| {
                    if t + h >= cal.len() || spec.excluded(cal.date(t), cal.date(t + h)) || dw[r] <= 0.0 {
                        return None;
                    }
                    let dy = y.get(t + h)? - y.get(t - 1)?;
                    let mut x: Vec<f64> = vals.row(r).iter().copied().collect();
                    if spec.lagged_change {
                        x.push(lagged_change(y, t, spec.month_len)?);
                    }
                    Some(Row {
                        date: cal.date(t),
                        x,
                        y: dy,
                        w: dw[r],
                        group: Some(groups[r]),
                    })
                })
                .collect();
            fit_horizon(h, labels.clone(), rows, target)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpulseResponse::new(&spec.name, y.name(), spec.normalization.factor(), raw))
}
