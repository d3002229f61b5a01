use elecshock::regress::fit_wls;
use elecshock::shockgen::*;
use elecshock::synth::{fit_shocks, recovery_correlation, simulate_dgp, DgpConfig};
use elecshock::timeline::{cycle_mask, Party};

#[test]
fn shocks_live_on_design_rows_only() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let est = estimate_shocks(&sim.prob, &sim.news, &sim.cycles, &sim.weights, &DesignOptions::default()).unwrap();
    let sh = &est.shocks;
    let rows = sh.defined.iter().filter(|d| **d).count();
    assert_eq!(rows, est.design.design.nrows());
    assert_eq!(rows, est.fit.n_obs);
    let mask = cycle_mask(&sim.calendar, &sim.cycles).unwrap();
    for i in 0..sh.len() {
        if !sh.defined[i] {
            assert_eq!(sh.values[i], 0.0);
            assert_eq!(sh.weights[i], 0.0);
        }
        if mask.cycle_at(i).is_none() {
            assert!(!sh.defined[i]);
        }
    }
    // five lag days lost per cycle
    assert_eq!(rows, sim.cycles.len() * (DgpConfig::default().days_per_cycle - 5));
    assert_eq!(est.design.design.ncols(), 67);
    assert_eq!(est.hac.lags, 8);
}

#[test]
fn shocks_are_orthogonal_to_regressors() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let est = estimate_shocks(&sim.prob, &sim.news, &sim.cycles, &sim.weights, &DesignOptions::default()).unwrap();
    let x = est.design.design.values();
    let e: Vec<f64> = est.design.positions.iter().map(|&i| est.shocks.values[i] / 100.0).collect();
    for j in 0..x.ncols() {
        let dot: f64 = (0..x.nrows()).map(|r| x[(r, j)] * e[r]).sum();
        let norm: f64 = (0..x.nrows()).map(|r| x[(r, j)].powi(2)).sum::<f64>().sqrt();
        if norm > 0.0 {
            assert!(dot.abs() / norm < 1e-9, "column {j}: {dot}");
        }
    }
}

#[test]
fn weighted_first_stage_uses_volume() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let a = estimate_shocks(&sim.prob, &sim.news, &sim.cycles, &sim.weights, &DesignOptions::default()).unwrap();
    let b = estimate_shocks(&sim.prob, &sim.news, &sim.cycles, &sim.weights, &DesignOptions { weighted: true }).unwrap();
    assert_ne!(a.fit.coefficients, b.fit.coefficients);
    let manual = fit_wls(&b.design.design, &b.design.response).unwrap();
    assert_eq!(manual.coefficients, b.fit.coefficients);
}

#[test]
fn extracted_shocks_track_injected_ones() {
    let corr = recovery_correlation(&DgpConfig::default(), 3).unwrap();
    assert!(corr > 0.95, "{corr}");
}

#[test]
fn narrative_window_sums_match_manual_sums() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let (_, sh) = fit_shocks(&sim).unwrap();
    let c = &sim.cycles[2];
    let cal = &sim.calendar;
    let dates = [cal.date(cal.position(c.first_date).unwrap() + 40), c.election_date];
    let events = NarrativeEventList::new(
        dates
            .iter()
            .map(|d| NarrativeEvent {
                date: *d,
                label: "e".into(),
                description: String::new(),
            })
            .collect(),
    )
    .unwrap();
    for w in [1, 3, 5] {
        let n = narrative_shocks(&sh, &events, w).unwrap();
        let i = cal.position(dates[0]).unwrap();
        let manual: f64 = sh.values[i..i + w].iter().sum();
        assert!((n.values[i] - manual).abs() < 1e-12);
        // election day is the last cycle date with a shock; the window is cut there
        let j = cal.position(c.election_date).unwrap();
        let end = (j..j + w).take_while(|&k| sh.cycles[k] == Some(c.id)).count();
        let manual: f64 = sh.values[j..j + end].iter().sum();
        assert!((n.values[j] - manual).abs() < 1e-12);
        assert_eq!(n.nonzero_count(), 2);
    }
}

#[test]
fn crude_series_marks_outcomes() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let crude = crude_outcome_series(sim.calendar.clone(), &sim.cycles).unwrap();
    assert_eq!(crude.nonzero_count(), sim.cycles.len());
    for c in &sim.cycles {
        let i = sim.calendar.position(c.election_date).unwrap();
        let sign = if c.winner == Some(Party::Republican) { 1.0 } else { -1.0 };
        assert_eq!(crude.values[i], sign);
    }
}

#[test]
fn monthly_sums_conserve_daily_shocks() {
    let sim = simulate_dgp(&DgpConfig::default()).unwrap();
    let (_, sh) = fit_shocks(&sim).unwrap();
    let m = monthly_aggregate(&sh);
    let total_m: f64 = m.values().iter().flatten().sum();
    let total_d: f64 = sh.values.iter().sum();
    assert!((total_m - total_d).abs() < 1e-9);
    assert_eq!(m.name(), "shock_m");
}

#[test]
fn bundled_event_list_parses() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/events.csv");
    let ev = parse_events_file(path).unwrap();
    assert_eq!(ev.len(), 61);
    assert_eq!(ev.events().iter().filter(|e| e.label == "Election").count(), 7);
}
