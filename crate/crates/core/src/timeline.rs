//! Calendars, election-cycle windows and the series containers every
//! regression consumes.
//!
//! All types here are immutable once built. A [`DailySeries`] shares its
//! [`TradingCalendar`] through an `Arc`, so many series (and many parallel
//! horizon estimations) can read the same calendar.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing list of business dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    dates: Vec<NaiveDate>,
}

impl TradingCalendar {
    pub fn new(dates: Vec<NaiveDate>) -> Result<Self> {
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange {
                what: "calendar".into(),
                detail: format!("dates not strictly increasing at {} -> {}", w[0], w[1]),
            });
        }
        Ok(Self { dates })
    }

    /// Sorts and deduplicates before building.
    pub fn from_unsorted(mut dates: Vec<NaiveDate>) -> Self {
        dates.sort_unstable();
        dates.dedup();
        Self { dates }
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn date(&self, idx: usize) -> NaiveDate {
        self.dates[idx]
    }

    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.position(date).is_some()
    }

    /// Index of the first calendar date on or after `date`.
    pub fn next_on_or_after(&self, date: NaiveDate) -> Option<usize> {
        let idx = self.dates.partition_point(|d| *d < date);
        (idx < self.dates.len()).then_some(idx)
    }

    /// Dates present in both calendars, plus the dates of `self` that were
    /// dropped because `other` lacks them.
    pub fn intersect(&self, other: &TradingCalendar) -> (TradingCalendar, Vec<NaiveDate>) {
        let (kept, dropped): (Vec<_>, Vec<_>) =
            self.dates.iter().partition(|d| other.contains(**d));
        (TradingCalendar { dates: kept }, dropped)
    }
}

/// Calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::OutOfRange {
                what: "month".into(),
                detail: format!("{year}-{month}"),
            });
        }
        Ok(Self { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Self {
            year: date.year(),
            month: date.month(),
        }
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self {
            year: ord.div_euclid(12) as i32,
            month: ord.rem_euclid(12) as u32 + 1,
        }
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: YearMonth) -> i64 {
        other.ordinal() - self.ordinal()
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid year-month")
    }

    pub fn last_day(self) -> NaiveDate {
        self.succ().first_day().pred_opt().expect("valid date")
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::OutOfRange {
            what: "year-month".into(),
            detail: format!("expected YYYY-MM, got {s:?}"),
        };
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        YearMonth::new(year, month)
    }
}

impl TryFrom<String> for YearMonth {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<YearMonth> for String {
    fn from(ym: YearMonth) -> String {
        ym.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    #[serde(alias = "R", alias = "republican")]
    Republican,
    #[serde(alias = "D", alias = "democrat")]
    Democrat,
}

impl Party {
    /// 1.0 for a Republican, 0.0 for a Democrat.
    pub fn republican_dummy(self) -> f64 {
        match self {
            Party::Republican => 1.0,
            Party::Democrat => 0.0,
        }
    }
}

impl FromStr for Party {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r" | "rep" | "republican" => Ok(Party::Republican),
            "d" | "dem" | "democrat" => Ok(Party::Democrat),
            other => Err(Error::InvalidConfig(format!("unknown party {other:?}"))),
        }
    }
}

/// One election's window on the calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionCycle {
    pub id: i32,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub election_date: NaiveDate,
    pub winner: Option<Party>,
    /// Party of the sitting president from each change date onwards. The
    /// first entry applies to every date before it as well.
    pub incumbent: Vec<(NaiveDate, Party)>,
}

impl ElectionCycle {
    pub fn new(
        id: i32,
        first_date: NaiveDate,
        last_date: NaiveDate,
        election_date: NaiveDate,
        winner: Option<Party>,
        incumbent: Vec<(NaiveDate, Party)>,
    ) -> Result<Self> {
        let cycle = Self {
            id,
            first_date,
            last_date,
            election_date,
            winner,
            incumbent,
        };
        cycle.validate()?;
        Ok(cycle)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.first_date <= self.election_date && self.election_date <= self.last_date) {
            return Err(Error::InvalidConfig(format!(
                "cycle {}: need first_date <= election_date <= last_date",
                self.id
            )));
        }
        if self.incumbent.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "cycle {}: incumbent party missing",
                self.id
            )));
        }
        if self.incumbent.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidConfig(format!(
                "cycle {}: incumbent change dates must increase",
                self.id
            )));
        }
        Ok(())
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.first_date <= date && date <= self.last_date
    }

    pub fn incumbent_on(&self, date: NaiveDate) -> Party {
        self.incumbent
            .iter()
            .rev()
            .find(|(d, _)| *d <= date)
            .unwrap_or(&self.incumbent[0])
            .1
    }
}

/// Physical unit of a series' values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesUnit {
    /// In [0, 1].
    Probability,
    /// Natural log of a level.
    LogLevel,
    Level,
    Percent,
    PercentagePoints,
    Count,
}

/// Date-indexed observations on a trading calendar; `None` marks missing.
#[derive(Debug, Clone)]
pub struct DailySeries {
    name: String,
    unit: SeriesUnit,
    calendar: Arc<TradingCalendar>,
    values: Vec<Option<f64>>,
    carried: Vec<bool>,
}

impl DailySeries {
    pub fn new(
        name: impl Into<String>,
        unit: SeriesUnit,
        calendar: Arc<TradingCalendar>,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        let name = name.into();
        if values.len() != calendar.len() {
            return Err(Error::Dimension(format!(
                "series {name}: {} values for {} calendar dates",
                values.len(),
                calendar.len()
            )));
        }
        if unit == SeriesUnit::Probability {
            if let Some((i, v)) = values
                .iter()
                .enumerate()
                .find_map(|(i, v)| v.filter(|v| !(0.0..=1.0).contains(v)).map(|v| (i, v)))
            {
                return Err(Error::OutOfRange {
                    what: format!("probability series {name}"),
                    detail: format!("{v} at {}", calendar.date(i)),
                });
            }
        }
        let n = values.len();
        Ok(Self {
            name,
            unit,
            calendar,
            values,
            carried: vec![false; n],
        })
    }

    /// Builds a series from `(date, value)` pairs. Pairs whose date is not on
    /// the calendar are returned as the audit list.
    pub fn from_pairs(
        name: impl Into<String>,
        unit: SeriesUnit,
        calendar: Arc<TradingCalendar>,
        pairs: impl IntoIterator<Item = (NaiveDate, f64)>,
    ) -> Result<(Self, Vec<NaiveDate>)> {
        let mut values = vec![None; calendar.len()];
        let mut dropped = Vec::new();
        for (d, v) in pairs {
            match calendar.position(d) {
                Some(i) => values[i] = Some(v),
                None => dropped.push(d),
            }
        }
        Ok((Self::new(name, unit, calendar, values)?, dropped))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> SeriesUnit {
        self.unit
    }

    pub fn calendar(&self) -> &Arc<TradingCalendar> {
        &self.calendar
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> Option<f64> {
        self.values.get(idx).copied().flatten()
    }

    pub fn get_date(&self, date: NaiveDate) -> Option<f64> {
        self.calendar.position(date).and_then(|i| self.get(i))
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// True when the value at `idx` was carried forward rather than observed.
    pub fn is_carried(&self, idx: usize) -> bool {
        self.carried[idx]
    }

    pub fn is_observed(&self, idx: usize) -> bool {
        self.get(idx).is_some() && !self.carried[idx]
    }

    /// Fills gaps with the last available value, restricted to positions for
    /// which `within(idx)` holds; carried positions are flagged.
    pub fn carry_forward(&self, within: impl Fn(usize) -> bool) -> Self {
        let mut out = self.clone();
        let mut last: Option<f64> = None;
        for i in 0..out.values.len() {
            if !within(i) {
                last = None;
                continue;
            }
            match out.values[i] {
                Some(v) => last = Some(v),
                None => {
                    if let Some(v) = last {
                        out.values[i] = Some(v);
                        out.carried[i] = true;
                    }
                }
            }
        }
        out
    }

    /// Elementwise transform; missing stays missing.
    pub fn map(&self, name: impl Into<String>, unit: SeriesUnit, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|v| v.map(&f)).collect();
        let mut s = Self::new(name, unit, self.calendar.clone(), values)?;
        s.carried = self.carried.clone();
        Ok(s)
    }

    /// Marks every date in `[start, end]` as missing.
    pub fn mask_range(&self, start: NaiveDate, end: NaiveDate) -> Self {
        let mut out = self.clone();
        for (i, d) in self.calendar.dates().iter().enumerate() {
            if *d >= start && *d <= end {
                out.values[i] = None;
            }
        }
        out
    }

    /// `y[idx + h] - y[idx - 1]` by calendar position.
    pub fn long_difference_at(&self, idx: usize, h: usize) -> Result<f64> {
        let end = idx + h;
        if end >= self.len() {
            return Err(Error::OutOfRange {
                what: format!("series {}", self.name),
                detail: format!("t+{h} beyond the calendar end"),
            });
        }
        if idx == 0 {
            return Err(Error::MissingData {
                what: format!("{} base period", self.name),
                date: self.calendar.date(idx),
            });
        }
        let base = self.get(idx - 1).ok_or_else(|| Error::MissingData {
            what: self.name.clone(),
            date: self.calendar.date(idx - 1),
        })?;
        let last = self.get(end).ok_or_else(|| Error::MissingData {
            what: self.name.clone(),
            date: self.calendar.date(end),
        })?;
        Ok(last - base)
    }
}

/// Contiguous run of months; `None` marks missing.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    name: String,
    unit: SeriesUnit,
    start: YearMonth,
    values: Vec<Option<f64>>,
}

impl MonthlySeries {
    pub fn new(name: impl Into<String>, unit: SeriesUnit, start: YearMonth, values: Vec<Option<f64>>) -> Self {
        Self {
            name: name.into(),
            unit,
            start,
            values,
        }
    }

    /// Builds from `(month, value)` pairs, which must be strictly increasing.
    pub fn from_pairs(
        name: impl Into<String>,
        unit: SeriesUnit,
        pairs: &[(YearMonth, f64)],
    ) -> Result<Self> {
        let name = name.into();
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::OutOfRange {
                what: format!("monthly series {name}"),
                detail: format!("months not strictly increasing at {} -> {}", w[0].0, w[1].0),
            });
        }
        let Some(&(start, _)) = pairs.first() else {
            return Ok(Self::new(name, unit, YearMonth { year: 2000, month: 1 }, Vec::new()));
        };
        let end = pairs.last().unwrap().0;
        let mut values = vec![None; start.months_until(end) as usize + 1];
        for (m, v) in pairs {
            values[start.months_until(*m) as usize] = Some(*v);
        }
        Ok(Self::new(name, unit, start, values))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> SeriesUnit {
        self.unit
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn month(&self, idx: usize) -> YearMonth {
        self.start.offset(idx as i64)
    }

    pub fn months(&self) -> impl Iterator<Item = YearMonth> + '_ {
        (0..self.len()).map(|i| self.month(i))
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, m: YearMonth) -> Option<f64> {
        let off = self.start.months_until(m);
        if off < 0 {
            return None;
        }
        self.values.get(off as usize).copied().flatten()
    }

    pub fn pairs(&self) -> Vec<(YearMonth, f64)> {
        self.months()
            .zip(&self.values)
            .filter_map(|(m, v)| v.map(|v| (m, v)))
            .collect()
    }

    pub fn map(&self, name: impl Into<String>, unit: SeriesUnit, f: impl Fn(f64) -> f64) -> Self {
        Self::new(name, unit, self.start, self.values.iter().map(|v| v.map(&f)).collect())
    }

    /// One-month change `x_m - x_{m-1}`.
    pub fn diff(&self, name: impl Into<String>) -> Self {
        let values = (0..self.len())
            .map(|i| {
                if i == 0 {
                    return None;
                }
                Some(self.values[i]? - self.values[i - 1]?)
            })
            .collect();
        Self::new(name, self.unit, self.start, values)
    }

    /// `y[t + h] - y[t - 1]`.
    pub fn long_difference_month(&self, t: YearMonth, h: usize) -> Result<f64> {
        let base_m = t.pred();
        let end_m = t.offset(h as i64);
        let last_m = self.start.offset(self.len() as i64 - 1);
        if end_m > last_m {
            return Err(Error::OutOfRange {
                what: format!("series {}", self.name),
                detail: format!("{end_m} beyond {last_m}"),
            });
        }
        let base = self.get(base_m).ok_or_else(|| Error::MissingData {
            what: self.name.clone(),
            date: base_m.first_day(),
        })?;
        let last = self.get(end_m).ok_or_else(|| Error::MissingData {
            what: self.name.clone(),
            date: end_m.first_day(),
        })?;
        Ok(last - base)
    }
}

/// Long difference `y_{t+h} - y_{t-1}` keyed by the series' own period type.
pub trait LongDifference {
    type Period;
    fn long_difference(&self, t: Self::Period, h: usize) -> Result<f64>;
}

impl LongDifference for DailySeries {
    type Period = NaiveDate;

    fn long_difference(&self, t: NaiveDate, h: usize) -> Result<f64> {
        let idx = self.calendar.position(t).ok_or_else(|| Error::OutOfRange {
            what: format!("series {}", self.name),
            detail: format!("{t} is not a calendar date"),
        })?;
        self.long_difference_at(idx, h)
    }
}

impl LongDifference for MonthlySeries {
    type Period = YearMonth;

    fn long_difference(&self, t: YearMonth, h: usize) -> Result<f64> {
        self.long_difference_month(t, h)
    }
}

/// Calendar position → containing cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleMask {
    ids: Vec<Option<i32>>,
}

impl CycleMask {
    pub fn cycle_at(&self, idx: usize) -> Option<i32> {
        self.ids[idx]
    }

    pub fn ids(&self) -> &[Option<i32>] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// True when positions `idx - lags ..= idx` all fall in the same cycle.
    pub fn lag_sufficient(&self, idx: usize, lags: usize) -> bool {
        let Some(c) = self.ids[idx] else {
            return false;
        };
        idx >= lags && (idx - lags..idx).all(|j| self.ids[j] == Some(c))
    }

    /// True when `a` and `b` fall in the same cycle.
    pub fn same_cycle(&self, a: usize, b: usize) -> bool {
        matches!((self.ids.get(a), self.ids.get(b)), (Some(Some(x)), Some(Some(y))) if x == y)
    }

    /// Calendar positions inside `cycle`, in order.
    pub fn positions(&self, cycle: i32) -> Vec<usize> {
        self.ids
            .iter()
            .enumerate()
            .filter_map(|(i, c)| (*c == Some(cycle)).then_some(i))
            .collect()
    }
}

/// Maps every calendar date to its election cycle, if any.
pub fn cycle_mask(calendar: &TradingCalendar, cycles: &[ElectionCycle]) -> Result<CycleMask> {
    for (i, a) in cycles.iter().enumerate() {
        for b in &cycles[i + 1..] {
            if a.first_date <= b.last_date && b.first_date <= a.last_date {
                return Err(Error::Overlap {
                    first: a.id,
                    second: b.id,
                });
            }
        }
    }
    let ids = calendar
        .dates()
        .iter()
        .map(|d| cycles.iter().find(|c| c.contains(*d)).map(|c| c.id))
        .collect();
    Ok(CycleMask { ids })
}
