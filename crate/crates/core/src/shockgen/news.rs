//! Daily financial and macro news used to orthogonalize probability moves.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ReleaseCalendar, VintageStore};
use crate::timeline::{cycle_mask, DailySeries, ElectionCycle, TradingCalendar};

/// One entry of the news vector, in design-column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewsComponent {
    Yield2y,
    Sp500,
    Employment,
    Cpi,
    IndustrialProduction,
}

pub const COMPONENTS: [NewsComponent; 5] = [
    NewsComponent::Yield2y,
    NewsComponent::Sp500,
    NewsComponent::Employment,
    NewsComponent::Cpi,
    NewsComponent::IndustrialProduction,
];

impl NewsComponent {
    pub fn label(self) -> &'static str {
        match self {
            NewsComponent::Yield2y => "d_yield2y",
            NewsComponent::Sp500 => "d_sp500",
            NewsComponent::Employment => "d_emp",
            NewsComponent::Cpi => "d_cpi",
            NewsComponent::IndustrialProduction => "d_ind",
        }
    }
}

/// How macro releases enter the news vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorMode {
    /// Latest one-month change on its release day, zero on every other day.
    #[default]
    ReleaseDay,
    /// Latest known one-month change on every day (stale and new
    /// information treated alike).
    Persistent,
}

/// Raw inputs for [`NewsPanel::build`].
pub struct NewsInputs<'a> {
    pub calendar: Arc<TradingCalendar>,
    /// 2-year Treasury yield level.
    pub yield_levels: &'a DailySeries,
    pub sp500_levels: &'a DailySeries,
    pub vintages: &'a VintageStore,
    pub releases: &'a ReleaseCalendar,
    /// Series ids of employment, CPI and industrial production.
    pub macro_ids: [&'a str; 3],
    pub cycles: &'a [ElectionCycle],
    pub mode: IndicatorMode,
}

/// Per-date news vector and incumbent-party dummy on the analysis calendar.
#[derive(Debug, Clone)]
pub struct NewsPanel {
    calendar: Arc<TradingCalendar>,
    components: [Vec<Option<f64>>; 5],
    pres_r: Vec<Option<f64>>,
}

impl NewsPanel {
    pub fn from_components(
        calendar: Arc<TradingCalendar>,
        components: [Vec<Option<f64>>; 5],
        pres_r: Vec<Option<f64>>,
    ) -> Result<Self> {
        let n = calendar.len();
        if components.iter().any(|c| c.len() != n) || pres_r.len() != n {
            return Err(Error::Dimension("news panel length differs from calendar".into()));
        }
        if pres_r.iter().flatten().any(|p| *p != 0.0 && *p != 1.0) {
            return Err(Error::OutOfRange {
                what: "incumbent dummy".into(),
                detail: "must be 0 or 1".into(),
            });
        }
        Ok(Self {
            calendar,
            components,
            pres_r,
        })
    }

    /// Builds the panel from levels, vintages and release dates.
    ///
    /// Releases that fall on a non-trading date are attributed to the next
    /// calendar date. A release whose vintage is missing counts as no release.
    pub fn build(inp: NewsInputs<'_>) -> Result<Self> {
        let cal = inp.calendar.clone();
        let n = cal.len();
        let pct = |s: &DailySeries| -> Vec<Option<f64>> {
            (0..n)
                .map(|i| {
                    if i == 0 {
                        return None;
                    }
                    let (a, b) = (s.get(i - 1)?, s.get(i)?);
                    (a != 0.0).then(|| 100.0 * (b / a - 1.0))
                })
                .collect()
        };
        let d_yield = pct(inp.yield_levels);
        let d_sp = pct(inp.sp500_levels);

        let mut macro_cols: Vec<Vec<Option<f64>>> = Vec::with_capacity(3);
        for id in inp.macro_ids {
            let mut on_release = vec![None::<f64>; n];
            for &(date, period) in inp.releases.releases(id) {
                let Some(pos) = cal.next_on_or_after(date) else {
                    continue;
                };
                match inp.vintages.pct_change_as_of(id, period, date) {
                    Ok(v) => on_release[pos] = Some(v),
                    Err(Error::NotYetPublished { .. }) => {
                        log::warn!("{id} {period}: no vintage on release date {date}; treated as no release");
                    }
                    Err(e) => return Err(e),
                }
            }
            let col = match inp.mode {
                IndicatorMode::ReleaseDay => on_release.into_iter().map(|v| Some(v.unwrap_or(0.0))).collect(),
                IndicatorMode::Persistent => {
                    let mut last = 0.0;
                    on_release
                        .into_iter()
                        .map(|v| {
                            if let Some(v) = v {
                                last = v;
                            }
                            Some(last)
                        })
                        .collect()
                }
            };
            macro_cols.push(col);
        }

        let mask = cycle_mask(&cal, inp.cycles)?;
        let pres_r = (0..n)
            .map(|i| {
                let id = mask.cycle_at(i)?;
                let c = inp.cycles.iter().find(|c| c.id == id)?;
                Some(c.incumbent_on(cal.date(i)).republican_dummy())
            })
            .collect();
        let [emp, cpi, ind]: [Vec<Option<f64>>; 3] = macro_cols.try_into().expect("three macro series");
        Self::from_components(cal, [d_yield, d_sp, emp, cpi, ind], pres_r)
    }

    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        &self.calendar
    }

    pub fn component(&self, c: usize, idx: usize) -> Option<f64> {
        self.components[c][idx]
    }

    pub fn pres_r(&self, idx: usize) -> Option<f64> {
        self.pres_r[idx]
    }
}
