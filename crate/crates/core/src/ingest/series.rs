use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use super::csvio::{self, csv_field};
use crate::error::{Error, Result};
use crate::timeline::{MonthlySeries, SeriesUnit, TradingCalendar, YearMonth};

const ASSET_HEADER: &[&str] = &["date", "series", "close"];
const EMPLOYMENT_HEADER: &[&str] = &["month", "industry", "employment"];
const MONTHLY_HEADER: &[&str] = &["month", "series", "value"];

/// Daily closing levels keyed by series id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssetPrices {
    pub series: BTreeMap<String, Vec<(NaiveDate, f64)>>,
}

impl AssetPrices {
    pub fn get(&self, id: &str) -> Option<&[(NaiveDate, f64)]> {
        self.series.get(id).map(Vec::as_slice)
    }

    /// Dates on which every listed series has a close.
    pub fn common_calendar(&self, ids: &[&str]) -> Result<TradingCalendar> {
        let mut cal: Option<TradingCalendar> = None;
        for id in ids {
            let dates = self
                .get(id)
                .ok_or_else(|| Error::InvalidConfig(format!("asset series {id:?} not found")))?
                .iter()
                .map(|(d, _)| *d)
                .collect();
            let c = TradingCalendar::from_unsorted(dates);
            cal = Some(match cal {
                None => c,
                Some(prev) => prev.intersect(&c).0,
            });
        }
        cal.ok_or_else(|| Error::InvalidConfig("no calendar series given".into()))
    }
}

pub fn parse_asset_str(text: &str, label: &str) -> Result<AssetPrices> {
    let mut series: BTreeMap<String, Vec<(NaiveDate, f64)>> = BTreeMap::new();
    for (line, rec) in csvio::records(text, label, ASSET_HEADER)? {
        let date = csvio::date_field(&rec, 0, "date", label, line)?;
        let id = rec.get(1).unwrap_or("").to_string();
        let close: f64 = csvio::field(&rec, 2, "close", label, line)?;
        if !(close.is_finite() && close > 0.0) {
            return Err(Error::Value {
                path: label.into(),
                line,
                msg: format!("close must be positive, got {close}"),
            });
        }
        series.entry(id).or_default().push((date, close));
    }
    for (id, v) in series.iter_mut() {
        v.sort_by_key(|(d, _)| *d);
        if let Some(w) = v.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Value {
                path: label.into(),
                line: 0,
                msg: format!("duplicate close for {id} on {}", w[0].0),
            });
        }
    }
    Ok(AssetPrices { series })
}

pub fn parse_asset_file(path: impl AsRef<Path>) -> Result<AssetPrices> {
    let path = path.as_ref();
    parse_asset_str(&csvio::read_file(path)?, &path.display().to_string())
}

pub fn write_asset_csv(prices: &AssetPrices) -> String {
    let mut rows: Vec<(NaiveDate, &str, f64)> = prices
        .series
        .iter()
        .flat_map(|(id, v)| v.iter().map(move |(d, c)| (*d, id.as_str(), *c)))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out = ASSET_HEADER.join(",");
    out.push('\n');
    for (d, id, c) in rows {
        out.push_str(&format!("{},{},{}\n", d, csv_field(id), c));
    }
    out
}

fn parse_keyed_monthly(
    text: &str,
    label: &str,
    header: &[&str],
    unit: SeriesUnit,
) -> Result<BTreeMap<String, MonthlySeries>> {
    let mut raw: BTreeMap<String, Vec<(YearMonth, f64)>> = BTreeMap::new();
    for (line, rec) in csvio::records(text, label, header)? {
        let month: YearMonth = rec.get(0).unwrap_or("").parse().map_err(|_| Error::Value {
            path: label.into(),
            line,
            msg: format!("cannot parse month from {:?}", rec.get(0).unwrap_or("")),
        })?;
        let key = rec.get(1).unwrap_or("").to_string();
        let v: f64 = csvio::field(&rec, 2, header[2], label, line)?;
        let v = csvio::finite(v, header[2], label, line)?;
        raw.entry(key).or_default().push((month, v));
    }
    raw.into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|(m, _)| *m);
            let s = MonthlySeries::from_pairs(k.clone(), unit, &v).map_err(|e| Error::Value {
                path: label.into(),
                line: 0,
                msg: e.to_string(),
            })?;
            Ok((k, s))
        })
        .collect()
}

/// Monthly employment levels per industry key.
pub fn parse_employment_str(text: &str, label: &str) -> Result<BTreeMap<String, MonthlySeries>> {
    let out = parse_keyed_monthly(text, label, EMPLOYMENT_HEADER, SeriesUnit::Level)?;
    for s in out.values() {
        if s.values().iter().flatten().any(|v| *v <= 0.0) {
            return Err(Error::Value {
                path: label.into(),
                line: 0,
                msg: format!("employment for {} must be positive", s.name()),
            });
        }
    }
    Ok(out)
}

pub fn parse_employment_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, MonthlySeries>> {
    let path = path.as_ref();
    parse_employment_str(&csvio::read_file(path)?, &path.display().to_string())
}

/// Generic monthly series file (`month,series,value`), used for the
/// macro controls of the employment projections.
pub fn parse_monthly_str(text: &str, label: &str) -> Result<BTreeMap<String, MonthlySeries>> {
    parse_keyed_monthly(text, label, MONTHLY_HEADER, SeriesUnit::Level)
}

pub fn parse_monthly_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, MonthlySeries>> {
    let path = path.as_ref();
    parse_monthly_str(&csvio::read_file(path)?, &path.display().to_string())
}

fn write_keyed_monthly(header: &[&str], series: &BTreeMap<String, MonthlySeries>) -> String {
    let mut rows: Vec<(YearMonth, &str, f64)> = series
        .iter()
        .flat_map(|(k, s)| s.pairs().into_iter().map(move |(m, v)| (m, k.as_str(), v)))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out = header.join(",");
    out.push('\n');
    for (m, k, v) in rows {
        out.push_str(&format!("{},{},{}\n", m, csv_field(k), v));
    }
    out
}

pub fn write_employment_csv(series: &BTreeMap<String, MonthlySeries>) -> String {
    write_keyed_monthly(EMPLOYMENT_HEADER, series)
}

pub fn write_monthly_csv(series: &BTreeMap<String, MonthlySeries>) -> String {
    write_keyed_monthly(MONTHLY_HEADER, series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asset_parse_and_calendar() {
        let text = "date,series,close\n2016-11-07,sp500,2131.5\n2016-11-08,sp500,2139.5\n2016-11-08,energy,100\n";
        let a = parse_asset_str(text, "a").unwrap();
        assert_eq!(a.get("sp500").unwrap().len(), 2);
        let cal = a.common_calendar(&["sp500", "energy"]).unwrap();
        assert_eq!(cal.len(), 1);
        assert!(parse_asset_str("date,series,close\n2016-11-07,sp500,0\n", "a").is_err());
        assert!(parse_asset_str("date,ticker,close\n", "a").is_err());
    }

    #[test]
    fn employment_parse() {
        let text = "month,industry,employment\n2020-01,mining_quarrying,180.5\n2020-02,mining_quarrying,181\n";
        let e = parse_employment_str(text, "e").unwrap();
        let s = &e["mining_quarrying"];
        assert_eq!(s.len(), 2);
        assert_eq!(write_employment_csv(&e), text);
    }
}
