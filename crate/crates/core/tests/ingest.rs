use std::collections::BTreeMap;

use elecshock::ingest::*;
use elecshock::synth::{simulate_dgp, DgpConfig};
use elecshock::timeline::{MonthlySeries, SeriesUnit, YearMonth};
use elecshock::Error;

#[test]
fn appendix_price_pair_normalizes() {
    let (d, r) = implied_probabilities(0.348, 0.668).unwrap();
    assert!((100.0 * d - 34.3).abs() <= 0.05, "{d}");
    assert!((100.0 * r - 65.7).abs() <= 0.05, "{r}");
    assert!((d + r - 1.0).abs() < 1e-15);
    assert!(matches!(implied_probabilities(0.0, 0.0), Err(Error::DegenerateQuote)));
}

#[test]
fn simulated_files_roundtrip_through_parsers() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();

    let quotes = parse_market_str(&write_market_csv(&sim.quotes), "market").unwrap();
    assert_eq!(quotes.len(), sim.quotes.len());
    assert_eq!(quotes[0].contract, sim.quotes[0].contract);

    let prices = sim.asset_prices();
    let back = parse_asset_str(&write_asset_csv(&prices), "assets").unwrap();
    assert_eq!(back.series.keys().collect::<Vec<_>>(), prices.series.keys().collect::<Vec<_>>());
    for (k, v) in &prices.series {
        let w = back.get(k).unwrap();
        assert_eq!(v.len(), w.len());
        assert!(v.iter().zip(w).all(|(a, b)| a.0 == b.0 && a.1 == b.1), "{k}");
    }

    let vint = parse_vintage_str(&write_vintage_csv(&sim.vintages), "vintages").unwrap();
    assert_eq!(vint, sim.vintages);
    let rel = parse_release_str(&write_release_csv(&sim.releases), "releases").unwrap();
    for id in ["emp", "cpi", "ind"] {
        assert_eq!(rel.releases(id), sim.releases.releases(id));
    }
}

#[test]
fn market_panel_recovers_simulated_probability() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let quotes = parse_market_str(&write_market_csv(&sim.quotes), "market").unwrap();
    let panel = market_panel(&quotes, sim.calendar.clone(), &sim.cycles, VolumeRule::BothParties).unwrap();
    assert!(panel.dropped_dates.is_empty());
    let mut seen = 0;
    for i in 0..sim.calendar.len() {
        match (panel.prob.get(i), sim.prob.get(i)) {
            (Some(a), Some(b)) => {
                assert!((a - b).abs() < 1e-12);
                seen += 1;
            }
            (None, None) => {}
            (a, b) => panic!("mismatch at {i}: {a:?} vs {b:?}"),
        }
    }
    assert!(seen > 1000);
    assert_eq!(panel.weights, sim.weights);
}

#[test]
fn monthly_files_roundtrip() {
    let start = YearMonth::new(2010, 1).unwrap();
    let mut m = BTreeMap::new();
    for key in ["mining_quarrying", "ship_manufacturing"] {
        let vals = (0..30).map(|k| Some(100.0 + k as f64 * 0.5)).collect();
        m.insert(key.to_string(), MonthlySeries::new(key, SeriesUnit::Level, start, vals));
    }
    let back = parse_employment_str(&write_employment_csv(&m), "emp").unwrap();
    assert_eq!(back["mining_quarrying"].pairs(), m["mining_quarrying"].pairs());
    assert!(Industry::by_key("ship_manufacturing").is_some());

    let bad = "month,industry,employment\n2010-01,mining_quarrying,-3\n";
    assert!(parse_employment_str(bad, "emp").is_err());
}

#[test]
fn schema_errors_carry_file_and_line() {
    let text = "date,contract,last_price,units\n2000-01-03,DEM00_WTA,0.5,10\n2000-01-04,DEM00_WTA,abc,10\n";
    let err = parse_market_str(text, "quotes.csv").unwrap_err().to_string();
    assert!(err.contains("quotes.csv") && err.contains("line 3"), "{err}");
    let err = parse_market_str("date,contract,price,units\n", "quotes.csv").unwrap_err();
    assert!(matches!(err, Error::Schema { .. }));
}

#[test]
fn volume_rules_count_parties() {
    let q = parse_market_str(
        "date,contract,last_price,units\n2016-03-01,DEM16_WTA,0.6,30\n2016-03-01,REP16_WTA,0.4,70\n",
        "m",
    )
    .unwrap();
    let refs: Vec<&ContractQuote> = q.iter().collect();
    assert_eq!(daily_weight(&refs, VolumeRule::BothParties), 100.0);
    assert_eq!(daily_weight(&refs, VolumeRule::Republican), 70.0);
    assert_eq!(monthly_volume(&q, VolumeRule::Democrat), vec![(YearMonth::new(2016, 3).unwrap(), 30.0)]);
}
