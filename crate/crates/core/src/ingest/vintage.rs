//! Real-time macro data: every value is stamped with the date it was
//! published, so a query "as of" a date never sees later revisions.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use super::csvio::{self, csv_field};
use crate::error::{Error, Result};
use crate::timeline::YearMonth;

const VINTAGE_HEADER: &[&str] = &["series", "obs_period", "publication_date", "value"];
const RELEASE_HEADER: &[&str] = &["series", "release_date", "obs_period"];

#[derive(Debug, Clone, PartialEq)]
pub struct VintageRecord {
    pub series: String,
    pub period: YearMonth,
    pub published: NaiveDate,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VintageStore {
    // (series, period) -> vintages sorted by publication date
    data: BTreeMap<(String, YearMonth), Vec<(NaiveDate, f64)>>,
}

impl VintageStore {
    pub fn new(records: impl IntoIterator<Item = VintageRecord>) -> Result<Self> {
        let mut data: BTreeMap<(String, YearMonth), Vec<(NaiveDate, f64)>> = BTreeMap::new();
        for r in records {
            if r.published < r.period.last_day() {
                return Err(Error::OutOfRange {
                    what: format!("vintage {} {}", r.series, r.period),
                    detail: format!("published {} before the period ends", r.published),
                });
            }
            data.entry((r.series, r.period)).or_default().push((r.published, r.value));
        }
        for ((s, p), v) in data.iter_mut() {
            v.sort_by_key(|(d, _)| *d);
            if let Some(w) = v.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::OutOfRange {
                    what: format!("vintage {s} {p}"),
                    detail: format!("two values published on {}", w[0].0),
                });
            }
        }
        Ok(Self { data })
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn series_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.data.keys().map(|(s, _)| s.as_str()).collect();
        ids.dedup();
        ids
    }

    pub fn records(&self) -> impl Iterator<Item = VintageRecord> + '_ {
        self.data.iter().flat_map(|((s, p), v)| {
            v.iter().map(move |(d, x)| VintageRecord {
                series: s.clone(),
                period: *p,
                published: *d,
                value: *x,
            })
        })
    }

    /// Value of the latest vintage published on or before `as_of`.
    pub fn value_as_of(&self, series: &str, period: YearMonth, as_of: NaiveDate) -> Result<f64> {
        let not_yet = || Error::NotYetPublished {
            series: series.to_string(),
            period: period.to_string(),
            as_of,
        };
        let v = self.data.get(&(series.to_string(), period)).ok_or_else(not_yet)?;
        let n = v.partition_point(|(d, _)| *d <= as_of);
        if n == 0 {
            Err(not_yet())
        } else {
            Ok(v[n - 1].1)
        }
    }

    /// Percent change of `period` over the previous month, both as known on
    /// `as_of`.
    pub fn pct_change_as_of(&self, series: &str, period: YearMonth, as_of: NaiveDate) -> Result<f64> {
        let cur = self.value_as_of(series, period, as_of)?;
        let prev = self.value_as_of(series, period.pred(), as_of)?;
        if prev == 0.0 {
            return Err(Error::OutOfRange {
                what: format!("{series} {}", period.pred()),
                detail: "zero level; percent change undefined".into(),
            });
        }
        Ok(100.0 * (cur / prev - 1.0))
    }
}

pub fn parse_vintage_str(text: &str, label: &str) -> Result<VintageStore> {
    let mut recs = Vec::new();
    for (line, rec) in csvio::records(text, label, VINTAGE_HEADER)? {
        let series = rec.get(0).unwrap_or("").to_string();
        let period: YearMonth = rec.get(1).unwrap_or("").parse().map_err(|_| Error::Value {
            path: label.into(),
            line,
            msg: format!("cannot parse obs_period from {:?}", rec.get(1).unwrap_or("")),
        })?;
        let published = csvio::date_field(&rec, 2, "publication_date", label, line)?;
        let value: f64 = csvio::field(&rec, 3, "value", label, line)?;
        let value = csvio::finite(value, "value", label, line)?;
        recs.push(VintageRecord {
            series,
            period,
            published,
            value,
        });
    }
    VintageStore::new(recs)
}

pub fn parse_vintage_file(path: impl AsRef<Path>) -> Result<VintageStore> {
    let path = path.as_ref();
    parse_vintage_str(&csvio::read_file(path)?, &path.display().to_string())
}

pub fn write_vintage_csv(store: &VintageStore) -> String {
    let mut out = VINTAGE_HEADER.join(",");
    out.push('\n');
    for r in store.records() {
        out.push_str(&format!("{},{},{},{}\n", csv_field(&r.series), r.period, r.published, r.value));
    }
    out
}

/// Publication dates per series, each with the month it reveals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReleaseCalendar {
    releases: BTreeMap<String, Vec<(NaiveDate, YearMonth)>>,
}

impl ReleaseCalendar {
    pub fn new(releases: BTreeMap<String, Vec<(NaiveDate, YearMonth)>>) -> Result<Self> {
        for (s, v) in &releases {
            if let Some(w) = v.windows(2).find(|w| w[0].0 >= w[1].0) {
                return Err(Error::OutOfRange {
                    what: format!("release calendar {s}"),
                    detail: format!("release dates not strictly increasing at {}", w[1].0),
                });
            }
        }
        Ok(Self { releases })
    }

    pub fn releases(&self, series: &str) -> &[(NaiveDate, YearMonth)] {
        self.releases.get(series).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn series_ids(&self) -> impl Iterator<Item = &str> {
        self.releases.keys().map(String::as_str)
    }

    /// 1 on a release date of `series`, 0 otherwise.
    pub fn release_indicator(&self, series: &str, date: NaiveDate) -> u8 {
        u8::from(self.release_on(series, date).is_some())
    }

    /// Period revealed on `date`, if `date` is a release date.
    pub fn release_on(&self, series: &str, date: NaiveDate) -> Option<YearMonth> {
        let v = self.releases(series);
        v.binary_search_by_key(&date, |(d, _)| *d).ok().map(|i| v[i].1)
    }

    /// Latest release on or before `date`.
    pub fn latest_release(&self, series: &str, date: NaiveDate) -> Option<(NaiveDate, YearMonth)> {
        let v = self.releases(series);
        let n = v.partition_point(|(d, _)| *d <= date);
        (n > 0).then(|| v[n - 1])
    }
}

pub fn parse_release_str(text: &str, label: &str) -> Result<ReleaseCalendar> {
    let mut map: BTreeMap<String, Vec<(NaiveDate, YearMonth)>> = BTreeMap::new();
    for (line, rec) in csvio::records(text, label, RELEASE_HEADER)? {
        let series = rec.get(0).unwrap_or("").to_string();
        let date = csvio::date_field(&rec, 1, "release_date", label, line)?;
        let period: YearMonth = rec.get(2).unwrap_or("").parse().map_err(|_| Error::Value {
            path: label.into(),
            line,
            msg: format!("cannot parse obs_period from {:?}", rec.get(2).unwrap_or("")),
        })?;
        map.entry(series).or_default().push((date, period));
    }
    for v in map.values_mut() {
        v.sort_by_key(|(d, _)| *d);
    }
    ReleaseCalendar::new(map)
}

pub fn parse_release_file(path: impl AsRef<Path>) -> Result<ReleaseCalendar> {
    let path = path.as_ref();
    parse_release_str(&csvio::read_file(path)?, &path.display().to_string())
}

pub fn write_release_csv(cal: &ReleaseCalendar) -> String {
    let mut out = RELEASE_HEADER.join(",");
    out.push('\n');
    for (s, v) in &cal.releases {
        for (d, p) in v {
            out.push_str(&format!("{},{},{}\n", csv_field(s), d, p));
        }
    }
    out
}
