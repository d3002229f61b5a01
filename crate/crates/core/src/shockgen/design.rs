use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::news::{NewsPanel, COMPONENTS};
use crate::error::{Error, Result};
use crate::regress::{DesignMatrix, INTERCEPT};
use crate::timeline::{cycle_mask, DailySeries, ElectionCycle, Party, SeriesUnit};

/// Autoregressive and news lags, in business days.
pub const LAGS: usize = 5;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DesignOptions {
    /// Weight first-stage rows by trade volume instead of fitting by OLS.
    #[serde(default)]
    pub weighted: bool,
}

/// Design rows with their calendar positions.
#[derive(Debug, Clone)]
pub struct ElectionDesign {
    pub design: DesignMatrix,
    /// Republican probability at each row.
    pub response: Vec<f64>,
    /// Calendar position of each row.
    pub positions: Vec<usize>,
}

/// Column labels in design order. With `contemporaneous_prob` the stack
/// also carries `pi_l0` (the one-step design).
pub fn column_labels(contemporaneous_prob: bool) -> Vec<String> {
    let mut labels = vec![INTERCEPT.to_string()];
    let first_pi = if contemporaneous_prob { 0 } else { 1 };
    labels.extend((first_pi..=LAGS).map(|s| format!("pi_l{s}")));
    for c in COMPONENTS {
        labels.extend((0..=LAGS).map(|s| format!("{}_l{s}", c.label())));
    }
    labels.push("pres_r".into());
    for c in COMPONENTS {
        labels.extend((0..=LAGS).map(|s| format!("{}_x_pres_l{s}", c.label())));
    }
    labels
}

/// Sets the probability on the first calendar date after each election to
/// the realized outcome (1 for a Republican win, 0 otherwise).
pub fn resolve_outcomes(prob: &DailySeries, cycles: &[ElectionCycle]) -> Result<DailySeries> {
    let cal = prob.calendar().clone();
    let mut values = prob.values().to_vec();
    for c in cycles {
        let Some(winner) = c.winner else { continue };
        let Some(pos) = cal.next_on_or_after(c.election_date.succ_opt().expect("date")) else {
            continue;
        };
        if !c.contains(cal.date(pos)) {
            log::debug!("cycle {}: no calendar date after the election inside the cycle", c.id);
            continue;
        }
        values[pos] = Some(if winner == Party::Republican { 1.0 } else { 0.0 });
    }
    DailySeries::new(prob.name(), SeriesUnit::Probability, cal, values)
}

fn build(
    prob: &DailySeries,
    news: &NewsPanel,
    cycles: &[ElectionCycle],
    weights: &[f64],
    opts: &DesignOptions,
    contemporaneous_prob: bool,
) -> Result<ElectionDesign> {
    let cal = prob.calendar();
    if news.calendar().dates() != cal.dates() || weights.len() != cal.len() {
        return Err(Error::Dimension("probability, news and weights must share one calendar".into()));
    }
    let mask = cycle_mask(cal, cycles)?;
    // lags may use carried-forward values inside the cycle; the response may not
    let carried = prob.carry_forward(|i| mask.cycle_at(i).is_some());
    let labels = column_labels(contemporaneous_prob);
    let p = labels.len();

    let mut data: Vec<f64> = Vec::new();
    let mut response = Vec::new();
    let mut positions = Vec::new();
    let mut rows = Vec::new();
    let mut groups = Vec::new();
    let mut row_w = Vec::new();

    let mut ordered: Vec<&ElectionCycle> = cycles.iter().collect();
    ordered.sort_by_key(|c| c.first_date);
    for c in ordered {
        let pos = mask.positions(c.id);
        if pos.len() <= LAGS {
            return Err(Error::InsufficientHistory {
                cycle: c.id,
                usable: pos.len(),
                needed: LAGS + 1,
            });
        }
        for &i in &pos {
            if !mask.lag_sufficient(i, LAGS) || !carried.is_observed(i) {
                continue;
            }
            let row = (|| -> Option<Vec<f64>> {
                let pres = news.pres_r(i)?;
                let mut r = Vec::with_capacity(p);
                r.push(1.0);
                let first_pi = if contemporaneous_prob { 0 } else { 1 };
                for s in first_pi..=LAGS {
                    r.push(carried.get(i - s)?);
                }
                let mut x = [[0.0; LAGS + 1]; 5];
                for (k, comp) in x.iter_mut().enumerate() {
                    for (s, v) in comp.iter_mut().enumerate() {
                        *v = news.component(k, i - s)?;
                    }
                }
                for comp in &x {
                    r.extend_from_slice(comp);
                }
                r.push(pres);
                for comp in &x {
                    r.extend(comp.iter().map(|v| v * pres));
                }
                Some(r)
            })();
            let Some(r) = row else { continue };
            data.extend(r);
            response.push(carried.get(i).expect("observed"));
            positions.push(i);
            rows.push(cal.date(i));
            groups.push(c.id);
            row_w.push(if opts.weighted { weights[i] } else { 1.0 });
        }
    }
    let n = rows.len();
    let values = DMatrix::from_row_slice(n, p, &data);
    let design = DesignMatrix::new(rows, labels, values, row_w, Some(groups))?;
    Ok(ElectionDesign {
        design,
        response,
        positions,
    })
}

/// Rows and regressors of the probability equation. The first [`LAGS`]
/// dates of each cycle are lost to the lag structure.
pub fn build_election_design(
    prob: &DailySeries,
    news: &NewsPanel,
    cycles: &[ElectionCycle],
    weights: &[f64],
    opts: &DesignOptions,
) -> Result<ElectionDesign> {
    build(prob, news, cycles, weights, opts, false)
}

/// Same rows as [`build_election_design`] with the contemporaneous
/// probability added as column `pi_l0`.
pub fn build_onestep_design(
    prob: &DailySeries,
    news: &NewsPanel,
    cycles: &[ElectionCycle],
    weights: &[f64],
    opts: &DesignOptions,
) -> Result<ElectionDesign> {
    build(prob, news, cycles, weights, opts, true)
}
