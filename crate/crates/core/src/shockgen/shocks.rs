use std::sync::Arc;

use serde::Serialize;

use super::design::{build_election_design, resolve_outcomes, DesignOptions, ElectionDesign};
use super::events::NarrativeEventList;
use super::news::NewsPanel;
use crate::error::{Error, Result};
use crate::regress::{fit_wls, newey_west, nw_bandwidth, FitResult, HacCovariance};
use crate::timeline::{cycle_mask, DailySeries, ElectionCycle, MonthlySeries, Party, SeriesUnit, TradingCalendar, YearMonth};

/// Daily shock values in percentage points, zero outside election cycles.
#[derive(Debug, Clone, Serialize)]
pub struct ShockSeries {
    pub name: String,
    #[serde(skip)]
    pub calendar: Arc<TradingCalendar>,
    pub values: Vec<f64>,
    /// True where the value belongs to the estimation sample of the
    /// variant (a fitted residual, or any cycle date for derived variants).
    pub defined: Vec<bool>,
    /// Regression weight (trade volume) per date; 0 outside the sample.
    pub weights: Vec<f64>,
    pub cycles: Vec<Option<i32>>,
}

impl ShockSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        s.values.iter_mut().for_each(|v| *v *= c);
        s
    }

    /// Copy with new weights on the same calendar.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} shock dates",
                weights.len(),
                self.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::OutOfRange {
                what: "shock weight".into(),
                detail: "weights must be finite and non-negative".into(),
            });
        }
        let mut s = self.clone();
        s.weights = weights;
        Ok(s)
    }

    /// Copy with weights zeroed on every date of the listed cycles.
    pub fn without_cycles(&self, drop: &[i32]) -> Self {
        let mut s = self.clone();
        for (w, c) in s.weights.iter_mut().zip(&self.cycles) {
            if c.is_some_and(|c| drop.contains(&c)) {
                *w = 0.0;
            }
        }
        s
    }

    /// True when both positions fall inside the same cycle.
    pub fn same_cycle(&self, a: usize, b: usize) -> bool {
        matches!((self.cycles.get(a), self.cycles.get(b)), (Some(Some(x)), Some(Some(y))) if x == y)
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }
}

/// Everything the shock regression produces.
#[derive(Debug, Clone)]
pub struct ShockEstimate {
    /// Probability after setting the post-election day to the outcome.
    pub prob: DailySeries,
    pub design: ElectionDesign,
    pub fit: FitResult,
    pub hac: HacCovariance,
    pub shocks: ShockSeries,
}

/// Residuals of the probability equation as a shock series (×100).
pub fn extract_shocks(
    fit: &FitResult,
    design: &ElectionDesign,
    calendar: Arc<TradingCalendar>,
    cycles: &[ElectionCycle],
    weights: &[f64],
) -> Result<ShockSeries> {
    let n = calendar.len();
    if weights.len() != n {
        return Err(Error::Dimension("weights length differs from calendar".into()));
    }
    if fit.residuals.len() != design.positions.len() {
        return Err(Error::Dimension("fit does not belong to this design".into()));
    }
    let mask = cycle_mask(&calendar, cycles)?;
    let mut values = vec![0.0; n];
    let mut defined = vec![false; n];
    let mut w = vec![0.0; n];
    for (r, &i) in design.positions.iter().enumerate() {
        values[i] = 100.0 * fit.residuals[r];
        defined[i] = true;
        w[i] = weights[i];
    }
    Ok(ShockSeries {
        name: "shock".into(),
        calendar,
        values,
        defined,
        weights: w,
        cycles: mask.ids().to_vec(),
    })
}

/// Resolves outcomes, fits the probability equation and extracts shocks.
/// HAC uses the rule-of-thumb bandwidth on the fitted sample, with lag
/// products confined to a cycle.
pub fn estimate_shocks(
    prob: &DailySeries,
    news: &NewsPanel,
    cycles: &[ElectionCycle],
    weights: &[f64],
    opts: &DesignOptions,
) -> Result<ShockEstimate> {
    let prob = resolve_outcomes(prob, cycles)?;
    let design = build_election_design(&prob, news, cycles, weights, opts)?;
    let fit = fit_wls(&design.design, &design.response)?;
    let hac = newey_west(&fit, &design.design, nw_bandwidth(fit.n_obs))?;
    let shocks = extract_shocks(&fit, &design, prob.calendar().clone(), cycles, weights)?;
    Ok(ShockEstimate {
        prob,
        design,
        fit,
        hac,
        shocks,
    })
}

/// Sums shocks over `window` trading days starting at each event date
/// (truncated at the cycle end). Events on non-trading dates move to the
/// next trading date; events outside every cycle are skipped with a warning.
pub fn narrative_shocks(shocks: &ShockSeries, events: &NarrativeEventList, window: usize) -> Result<ShockSeries> {
    if window == 0 {
        return Err(Error::InvalidConfig("narrative window must be at least 1".into()));
    }
    let cal = &shocks.calendar;
    let mut values = vec![0.0; shocks.len()];
    for e in events.events() {
        let Some(i) = cal.next_on_or_after(e.date) else {
            log::warn!("event {} ({}) is after the calendar end", e.label, e.date);
            continue;
        };
        let Some(c) = shocks.cycles[i] else {
            log::warn!("event {} ({}) falls outside every cycle", e.label, e.date);
            continue;
        };
        values[i] = (i..(i + window).min(shocks.len()))
            .take_while(|&j| shocks.cycles[j] == Some(c))
            .map(|j| shocks.values[j])
            .sum();
    }
    Ok(ShockSeries {
        name: format!("narrative{window}"),
        values,
        ..shocks.clone()
    })
}

/// +1 on Republican-victory election dates, -1 on Democratic ones, 0
/// elsewhere. The sample is every cycle date, with unit weight.
pub fn crude_outcome_series(calendar: Arc<TradingCalendar>, cycles: &[ElectionCycle]) -> Result<ShockSeries> {
    let mask = cycle_mask(&calendar, cycles)?;
    let n = calendar.len();
    let mut values = vec![0.0; n];
    for c in cycles {
        let winner = c.winner.ok_or(Error::UnknownOutcome(c.id))?;
        let Some(i) = calendar.position(c.election_date) else {
            return Err(Error::MissingData {
                what: format!("election date of cycle {}", c.id),
                date: c.election_date,
            });
        };
        values[i] = match winner {
            Party::Republican => 1.0,
            Party::Democrat => -1.0,
        };
    }
    let defined: Vec<bool> = mask.ids().iter().map(Option::is_some).collect();
    Ok(ShockSeries {
        name: "crude".into(),
        calendar,
        values,
        weights: defined.iter().map(|d| if *d { 1.0 } else { 0.0 }).collect(),
        defined,
        cycles: mask.ids().to_vec(),
    })
}

/// Calendar-month sums of the daily shocks over the span of the calendar.
pub fn monthly_aggregate(shocks: &ShockSeries) -> MonthlySeries {
    let dates = shocks.calendar.dates();
    let (Some(first), Some(last)) = (dates.first(), dates.last()) else {
        return MonthlySeries::new(&shocks.name, SeriesUnit::PercentagePoints, YearMonth::of(chrono::NaiveDate::MIN), vec![]);
    };
    let start = YearMonth::of(*first);
    let months = start.months_until(YearMonth::of(*last)) as usize + 1;
    let mut sums = vec![0.0; months];
    for (d, v) in dates.iter().zip(&shocks.values) {
        sums[start.months_until(YearMonth::of(*d)) as usize] += v;
    }
    MonthlySeries::new(
        format!("{}_m", shocks.name),
        SeriesUnit::PercentagePoints,
        start,
        sums.into_iter().map(Some).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shockgen::events::NarrativeEvent;
    use chrono::NaiveDate;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn toy(values: Vec<f64>, cycle_len: usize) -> ShockSeries {
        let dates: Vec<NaiveDate> = d(2016, 10, 3)
            .iter_days()
            .filter(|x| chrono::Datelike::weekday(x).number_from_monday() <= 5)
            .take(values.len())
            .collect();
        let n = values.len();
        ShockSeries {
            name: "shock".into(),
            calendar: Arc::new(TradingCalendar::new(dates).unwrap()),
            values,
            defined: vec![true; n],
            weights: vec![1.0; n],
            cycles: (0..n).map(|i| (i < cycle_len).then_some(2016)).collect(),
        }
    }

    fn events(dates: &[NaiveDate]) -> NarrativeEventList {
        NarrativeEventList::new(
            dates
                .iter()
                .map(|d| NarrativeEvent {
                    date: *d,
                    label: "e".into(),
                    description: String::new(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn narrative_window_sum() {
        let s = toy(vec![9.0, 2.0, -1.0, 3.0, 0.0, 1.0, 7.0], 7);
        let ev = events(&[s.calendar.date(1)]);
        let n5 = narrative_shocks(&s, &ev, 5).unwrap();
        assert_eq!(n5.values, vec![0.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let n1 = narrative_shocks(&s, &ev, 1).unwrap();
        assert_eq!(n1.values[1], 2.0);
        let doubled = narrative_shocks(&s.scaled(2.0), &ev, 5).unwrap();
        assert_eq!(doubled.values[1], 10.0);
    }

    #[test]
    fn narrative_truncates_at_cycle_end() {
        let s = toy(vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0], 4);
        let ev = events(&[s.calendar.date(2)]);
        let n = narrative_shocks(&s, &ev, 5).unwrap();
        assert_eq!(n.values[2], 2.0);
        // Saturday event moves to Monday
        let s = toy(vec![0.0, 0.0, 0.0, 0.0, 0.0, 4.0, 1.0], 7);
        let n = narrative_shocks(&s, &events(&[d(2016, 10, 8)]), 1).unwrap();
        assert_eq!(n.values[5], 4.0);
    }

    #[test]
    fn monthly_sum_conserves() {
        let mut s = toy(vec![0.0; 30], 30);
        s.values[0] = 1.5;
        s.values[1] = -0.5;
        s.values[25] = 2.25;
        let m = monthly_aggregate(&s);
        assert_eq!(m.get(YearMonth::new(2016, 10).unwrap()), Some(1.0));
        assert_eq!(m.get(YearMonth::new(2016, 11).unwrap()), Some(2.25));
        let total: f64 = m.values().iter().flatten().sum();
        assert_eq!(total, s.values.iter().sum::<f64>());
    }

    #[test]
    fn crude_signs() {
        let dates: Vec<NaiveDate> = vec![d(2008, 11, 3), d(2008, 11, 4), d(2008, 11, 5), d(2016, 11, 7), d(2016, 11, 8), d(2016, 11, 9)];
        let cal = Arc::new(TradingCalendar::new(dates).unwrap());
        let cycles = vec![
            ElectionCycle::new(2008, d(2008, 11, 3), d(2008, 11, 5), d(2008, 11, 4), Some(Party::Democrat), vec![(d(2008, 1, 1), Party::Republican)]).unwrap(),
            ElectionCycle::new(2016, d(2016, 11, 7), d(2016, 11, 9), d(2016, 11, 8), Some(Party::Republican), vec![(d(2016, 1, 1), Party::Democrat)]).unwrap(),
        ];
        let c = crude_outcome_series(cal, &cycles).unwrap();
        assert_eq!(c.values, vec![0.0, -1.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(c.nonzero_count(), 2);
        let mut open = cycles.clone();
        open[1].winner = None;
        assert!(matches!(crude_outcome_series(c.calendar.clone(), &open), Err(Error::UnknownOutcome(2016))));
    }
}
