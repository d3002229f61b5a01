//! Winner-take-all contract quotes and the implied two-party probabilities.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::csvio::{self, csv_field};
use crate::error::{Error, Result};
use crate::timeline::{cycle_mask, DailySeries, ElectionCycle, Party, SeriesUnit, TradingCalendar, YearMonth};

const HEADER: &[&str] = &["date", "contract", "last_price", "units"];

/// Last price and volume of one contract on one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractQuote {
    pub date: NaiveDate,
    pub contract: String,
    pub last_price: f64,
    pub units: u64,
}

/// Splits `DEM08_WTA` / `REP16_WTA` style ids into party and election year.
/// Anything else (third-party contracts) yields `None`.
pub fn contract_party_year(contract: &str) -> Option<(Party, i32)> {
    let (head, _) = contract.split_once('_').unwrap_or((contract, ""));
    if head.len() != 5 {
        return None;
    }
    let party = match &head[..3] {
        "DEM" => Party::Democrat,
        "REP" => Party::Republican,
        _ => return None,
    };
    let yy: i32 = head[3..].parse().ok()?;
    let year = if yy < 70 { 2000 + yy } else { 1900 + yy };
    Some((party, year))
}

pub fn parse_market_str(text: &str, label: &str) -> Result<Vec<ContractQuote>> {
    let mut quotes = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, rec) in csvio::records(text, label, HEADER)? {
        let date = csvio::date_field(&rec, 0, "date", label, line)?;
        let contract = rec.get(1).unwrap_or("").to_string();
        if contract.is_empty() {
            return Err(Error::Value {
                path: label.into(),
                line,
                msg: "empty contract id".into(),
            });
        }
        let price: f64 = csvio::field(&rec, 2, "last_price", label, line)?;
        let price = csvio::finite(price, "last_price", label, line)?;
        if price < 0.0 {
            return Err(Error::Value {
                path: label.into(),
                line,
                msg: format!("negative price {price}"),
            });
        }
        let units_raw: i64 = csvio::field(&rec, 3, "units", label, line)?;
        if units_raw < 0 {
            return Err(Error::Value {
                path: label.into(),
                line,
                msg: format!("negative units {units_raw}"),
            });
        }
        if !seen.insert((date, contract.clone())) {
            return Err(Error::Value {
                path: label.into(),
                line,
                msg: format!("duplicate quote for {contract} on {date}"),
            });
        }
        quotes.push(ContractQuote {
            date,
            contract,
            last_price: price,
            units: units_raw as u64,
        });
    }
    Ok(quotes)
}

pub fn parse_market_file(path: impl AsRef<Path>) -> Result<Vec<ContractQuote>> {
    let path = path.as_ref();
    parse_market_str(&csvio::read_file(path)?, &path.display().to_string())
}

/// Normalized form: sorted by date then contract, shortest round-trip floats.
pub fn write_market_csv(quotes: &[ContractQuote]) -> String {
    let mut sorted: Vec<&ContractQuote> = quotes.iter().collect();
    sorted.sort_by(|a, b| (a.date, &a.contract).cmp(&(b.date, &b.contract)));
    let mut out = HEADER.join(",");
    out.push('\n');
    for q in sorted {
        out.push_str(&format!("{},{},{},{}\n", q.date, csv_field(&q.contract), q.last_price, q.units));
    }
    out
}

/// Two-party probabilities `(dem, rep)` from the last prices, normalized to
/// sum to one.
pub fn implied_probabilities(dem_price: f64, rep_price: f64) -> Result<(f64, f64)> {
    if !(dem_price >= 0.0 && rep_price >= 0.0) {
        return Err(Error::OutOfRange {
            what: "contract price".into(),
            detail: format!("({dem_price}, {rep_price}) must be non-negative"),
        });
    }
    let total = dem_price + rep_price;
    if total <= 0.0 {
        return Err(Error::DegenerateQuote);
    }
    let rep = rep_price / total;
    Ok((1.0 - rep, rep))
}

/// Which contracts' volume counts toward the daily regression weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeRule {
    #[default]
    BothParties,
    Republican,
    Democrat,
}

/// Units traded on one day under `rule`. Third-party contracts never count.
pub fn daily_weight(quotes_on_day: &[&ContractQuote], rule: VolumeRule) -> f64 {
    quotes_on_day
        .iter()
        .filter_map(|q| contract_party_year(&q.contract).map(|(p, _)| (p, q.units)))
        .filter(|(p, _)| match rule {
            VolumeRule::BothParties => true,
            VolumeRule::Republican => *p == Party::Republican,
            VolumeRule::Democrat => *p == Party::Democrat,
        })
        .map(|(_, u)| u as f64)
        .sum()
}

/// Total two-party units traded per calendar month.
pub fn monthly_volume(quotes: &[ContractQuote], rule: VolumeRule) -> Vec<(YearMonth, f64)> {
    let mut by_day: BTreeMap<NaiveDate, Vec<&ContractQuote>> = BTreeMap::new();
    for q in quotes {
        by_day.entry(q.date).or_default().push(q);
    }
    let mut by_month: BTreeMap<YearMonth, f64> = BTreeMap::new();
    for (d, qs) in by_day {
        *by_month.entry(YearMonth::of(d)).or_default() += daily_weight(&qs, rule);
    }
    by_month.into_iter().collect()
}

/// Probability and volume series on the analysis calendar.
#[derive(Debug, Clone)]
pub struct MarketPanel {
    /// Observed Republican probability; missing where the day has no pair of
    /// quotes.
    pub prob: DailySeries,
    /// Trade volume per calendar date, 0 when absent.
    pub weights: Vec<f64>,
    /// Quote dates that are not on the calendar.
    pub dropped_dates: Vec<NaiveDate>,
}

/// Aligns quotes to `calendar`, using each cycle's own pair of contracts.
pub fn market_panel(
    quotes: &[ContractQuote],
    calendar: Arc<TradingCalendar>,
    cycles: &[ElectionCycle],
    rule: VolumeRule,
) -> Result<MarketPanel> {
    let mask = cycle_mask(&calendar, cycles)?;
    let mut by_day: BTreeMap<NaiveDate, Vec<&ContractQuote>> = BTreeMap::new();
    for q in quotes {
        by_day.entry(q.date).or_default().push(q);
    }
    let mut prob = vec![None; calendar.len()];
    let mut weights = vec![0.0; calendar.len()];
    let mut dropped = Vec::new();
    for (date, qs) in &by_day {
        let Some(idx) = calendar.position(*date) else {
            dropped.push(*date);
            continue;
        };
        let Some(cycle) = mask.cycle_at(idx) else {
            continue;
        };
        let own: Vec<&ContractQuote> = qs
            .iter()
            .copied()
            .filter(|q| contract_party_year(&q.contract).is_some_and(|(_, y)| y == cycle))
            .collect();
        let price = |party| {
            own.iter()
                .find(|q| contract_party_year(&q.contract).is_some_and(|(p, _)| p == party))
                .map(|q| q.last_price)
        };
        if let (Some(dem), Some(rep)) = (price(Party::Democrat), price(Party::Republican)) {
            match implied_probabilities(dem, rep) {
                Ok((_, r)) => prob[idx] = Some(r),
                Err(Error::DegenerateQuote) => {}
                Err(e) => return Err(e),
            }
        }
        weights[idx] = daily_weight(&own, rule);
    }
    Ok(MarketPanel {
        prob: DailySeries::new("pi_r", SeriesUnit::Probability, calendar, prob)?,
        weights,
        dropped_dates: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_row() {
        let q = parse_market_str("date,contract,last_price,units\n2000-11-01,DEM00_WTA,0.348,210\n", "t").unwrap();
        assert_eq!(
            q,
            vec![ContractQuote {
                date: NaiveDate::from_ymd_opt(2000, 11, 1).unwrap(),
                contract: "DEM00_WTA".into(),
                last_price: 0.348,
                units: 210,
            }]
        );
    }

    #[test]
    fn empty_file_is_empty() {
        assert!(parse_market_str("", "t").unwrap().is_empty());
        assert!(parse_market_str("date,contract,last_price,units\n", "t").unwrap().is_empty());
    }

    #[test]
    fn schema_and_value_errors_carry_lines() {
        let err = parse_market_str("date,contract,price,units\n", "m.csv").unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
        let err = parse_market_str(
            "date,contract,last_price,units\n2000-11-01,DEM00_WTA,0.3,1\n2000-11-02,DEM00_WTA,-0.3,1\n",
            "m.csv",
        )
        .unwrap_err();
        match err {
            Error::Value { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_market_str("date,contract,last_price,units\n2000-11-01,DEM00_WTA,0.3,-4\n", "m"),
            Err(Error::Value { .. })
        ));
        assert!(matches!(
            parse_market_str("date,contract,last_price,units\n11/01/2000,DEM00_WTA,0.3,4\n", "m"),
            Err(Error::Value { .. })
        ));
    }

    #[test]
    fn implied_probability_examples() {
        let (d, r) = implied_probabilities(0.348, 0.668).unwrap();
        assert!((d * 100.0 - 34.3).abs() < 0.05 && (r * 100.0 - 65.7).abs() < 0.05);
        assert_eq!(implied_probabilities(0.5, 0.5).unwrap(), (0.5, 0.5));
        let (d, r) = implied_probabilities(0.25, 0.50).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15 && (r - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(implied_probabilities(0.0, 0.0), Err(Error::DegenerateQuote)));
        assert!(implied_probabilities(-0.1, 0.5).is_err());
    }

    #[test]
    fn contract_ids() {
        assert_eq!(contract_party_year("DEM00_WTA"), Some((Party::Democrat, 2000)));
        assert_eq!(contract_party_year("REP24_WTA"), Some((Party::Republican, 2024)));
        assert_eq!(contract_party_year("REP96_WTA"), Some((Party::Republican, 1996)));
        assert_eq!(contract_party_year("ROF00_WTA"), None);
    }

    #[test]
    fn weights_sum_party_volumes() {
        let d = NaiveDate::from_ymd_opt(2016, 10, 3).unwrap();
        let mk = |c: &str, u| ContractQuote {
            date: d,
            contract: c.into(),
            last_price: 0.5,
            units: u,
        };
        let (a, b, c) = (mk("DEM16_WTA", 120), mk("REP16_WTA", 80), mk("ROF16_WTA", 1000));
        assert_eq!(daily_weight(&[&a, &b, &c], VolumeRule::BothParties), 200.0);
        assert_eq!(daily_weight(&[&a, &b], VolumeRule::Republican), 80.0);
        assert_eq!(daily_weight(&[], VolumeRule::BothParties), 0.0);
    }

    proptest::proptest! {
        #[test]
        fn probabilities_are_scale_invariant(p in 0.001f64..2.0, q in 0.001f64..2.0, a in 1e-3f64..1e3) {
            let (d1, r1) = implied_probabilities(p, q).unwrap();
            let (d2, r2) = implied_probabilities(a * p, a * q).unwrap();
            proptest::prop_assert!((d1 - d2).abs() < 1e-15 && (r1 - r2).abs() < 1e-15);
            proptest::prop_assert!((d1 + r1 - 1.0).abs() < 1e-15);
        }
    }
}
