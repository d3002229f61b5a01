use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{Datelike, NaiveDate};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng_for;
use crate::error::{Error, Result};
use crate::ingest::{AssetPrices, ContractQuote, ReleaseCalendar, VintageRecord, VintageStore};
use crate::shockgen::{IndicatorMode, NewsInputs, NewsPanel, LAGS};
use crate::timeline::{DailySeries, ElectionCycle, Party, SeriesUnit, TradingCalendar, YearMonth};

/// Macro series ids and the day of the month they are released on.
pub const MACRO_IDS: [&str; 3] = ["emp", "cpi", "ind"];
const RELEASE_DOM: [u32; 3] = [5, 12, 15];
const BURN_IN: usize = 50;

/// One simulated asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssetSpec {
    pub name: String,
    /// Daily return response to a 1pp shock at lags 0, 1, ... (log-points).
    pub kernel: Vec<f64>,
    /// Loading on the S&P 500 percent change.
    pub market_beta: f64,
    /// Daily idiosyncratic return volatility (log-points).
    pub noise_vol: f64,
    /// Return response to one unit of the unobserved confound.
    pub confound_loading: f64,
}

impl Default for AssetSpec {
    fn default() -> Self {
        Self {
            name: "asset".into(),
            kernel: vec![0.001],
            market_beta: 1.0,
            noise_vol: 0.015,
            confound_loading: 0.0005,
        }
    }
}

fn ramp(impact: f64, tail: f64, len: usize) -> Vec<f64> {
    std::iter::once(impact).chain(std::iter::repeat_n(tail, len)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DgpConfig {
    pub n_cycles: usize,
    /// Business days per cycle, ending on election day.
    pub days_per_cycle: usize,
    /// Business days between cycles and after the last one.
    pub gap_days: usize,
    /// Business days before the first cycle.
    pub lead_days: usize,
    pub start_date: NaiveDate,
    /// Standard deviation of the injected probability residual (pp).
    pub shock_vol: f64,
    /// Autoregressive coefficients of the probability (at most five).
    pub ar: Vec<f64>,
    pub prob_mean: f64,
    /// Contemporaneous effect of each news component on the probability
    /// under a Democratic president; the sign flips under a Republican one.
    pub news_loading: [f64; 5],
    /// Standard deviation of the unobserved confound (pp of probability).
    pub confound_vol: f64,
    pub yield_vol: f64,
    pub sp500_vol: f64,
    pub macro_vol: f64,
    pub volume_log_mean: f64,
    pub volume_log_sd: f64,
    /// Share of cycle days without a quote.
    pub missing_rate: f64,
    pub assets: Vec<AssetSpec>,
    pub seed: u64,
}

impl Default for DgpConfig {
    fn default() -> Self {
        Self {
            n_cycles: 7,
            days_per_cycle: 250,
            gap_days: 80,
            lead_days: 30,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 3).expect("date"),
            shock_vol: 2.0,
            ar: vec![0.6, 0.2],
            prob_mean: 0.5,
            news_loading: [0.002, 0.003, 0.004, -0.003, 0.002],
            confound_vol: 0.0,
            yield_vol: 2.0,
            sp500_vol: 1.0,
            macro_vol: 0.3,
            volume_log_mean: 6.0,
            volume_log_sd: 1.0,
            missing_rate: 0.0,
            assets: vec![
                AssetSpec {
                    name: "energy".into(),
                    kernel: ramp(0.0004, 0.00003, 20),
                    ..AssetSpec::default()
                },
                AssetSpec {
                    name: "defense".into(),
                    kernel: ramp(0.0006, 0.00003, 30),
                    market_beta: 0.8,
                    noise_vol: 0.012,
                    ..AssetSpec::default()
                },
                AssetSpec {
                    name: "clean".into(),
                    kernel: ramp(-0.0005, -0.00002, 25),
                    market_beta: 1.2,
                    noise_vol: 0.02,
                    ..AssetSpec::default()
                },
            ],
            seed: 20240101,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

/// Spectral radius of the AR companion matrix.
fn ar_radius(ar: &[f64]) -> f64 {
    let p = ar.len();
    if p == 0 {
        return 0.0;
    }
    let mut c = DMatrix::zeros(p, p);
    for (j, a) in ar.iter().enumerate() {
        c[(0, j)] = *a;
    }
    for i in 1..p {
        c[(i, i - 1)] = 1.0;
    }
    c.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl DgpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cycles == 0 || self.n_cycles > 17 {
            return Err(invalid("n_cycles must lie in 1..=17"));
        }
        if self.days_per_cycle <= LAGS + 1 {
            return Err(invalid(format!("days_per_cycle must exceed {}", LAGS + 1)));
        }
        if self.gap_days == 0 || self.lead_days == 0 {
            return Err(invalid("gap_days and lead_days must be positive"));
        }
        let vols = [
            ("shock_vol", self.shock_vol),
            ("confound_vol", self.confound_vol),
            ("yield_vol", self.yield_vol),
            ("sp500_vol", self.sp500_vol),
            ("macro_vol", self.macro_vol),
            ("volume_log_sd", self.volume_log_sd),
        ];
        for (name, v) in vols {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and non-negative")));
            }
        }
        if self.ar.len() > LAGS {
            return Err(invalid(format!("at most {LAGS} autoregressive coefficients")));
        }
        if ar_radius(&self.ar) >= 1.0 {
            return Err(invalid(format!("autoregressive coefficients {:?} are not stationary", self.ar)));
        }
        if !(self.prob_mean > 0.0 && self.prob_mean < 1.0) {
            return Err(invalid("prob_mean must lie in (0, 1)"));
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return Err(invalid("missing_rate must lie in [0, 1)"));
        }
        for a in &self.assets {
            if !(a.noise_vol.is_finite() && a.noise_vol >= 0.0) {
                return Err(invalid(format!("asset {}: noise_vol must be non-negative", a.name)));
            }
            if a.kernel.iter().chain([&a.market_beta, &a.confound_loading]).any(|v| !v.is_finite()) {
                return Err(invalid(format!("asset {}: non-finite parameter", a.name)));
            }
        }
        Ok(())
    }

    pub fn total_days(&self) -> usize {
        self.lead_days + self.n_cycles * (self.days_per_cycle + self.gap_days)
    }
}

/// Everything one simulation produces, in the library's own types.
#[derive(Debug, Clone)]
pub struct DgpOutput {
    pub calendar: Arc<TradingCalendar>,
    pub cycles: Vec<ElectionCycle>,
    /// Observed Republican probability (missing outside cycles and on
    /// unquoted days).
    pub prob: DailySeries,
    pub news: NewsPanel,
    pub yield_levels: DailySeries,
    pub sp500_levels: DailySeries,
    pub vintages: VintageStore,
    pub releases: ReleaseCalendar,
    /// Log prices, one per configured asset.
    pub assets: Vec<DailySeries>,
    pub weights: Vec<f64>,
    pub quotes: Vec<ContractQuote>,
    /// Injected probability residual per date (pp), 0 outside cycles.
    pub true_shocks: Vec<f64>,
    pub confound: Vec<f64>,
}

impl DgpOutput {
    /// Closing levels of every asset plus the yield and S&P 500 series.
    pub fn asset_prices(&self) -> AssetPrices {
        let dates = self.calendar.dates();
        let mut series = BTreeMap::new();
        for s in &self.assets {
            let v = (0..dates.len()).filter_map(|i| s.get(i).map(|p| (dates[i], p.exp()))).collect();
            series.insert(s.name().to_string(), v);
        }
        for (id, s) in [("yield2y", &self.yield_levels), ("sp500", &self.sp500_levels)] {
            series.insert(id.to_string(), (0..dates.len()).filter_map(|i| s.get(i).map(|p| (dates[i], p))).collect());
        }
        AssetPrices { series }
    }
}

/// Weekdays from `start` onwards.
pub fn business_days(start: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    start.iter_days().filter(|d| d.weekday().number_from_monday() <= 5)
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("validated volatility")
}

/// Simulation on stream 0 of `cfg.seed`.
pub fn simulate_dgp(cfg: &DgpConfig) -> Result<DgpOutput> {
    simulate_stream(cfg, 0)
}

/// Simulation on an explicit stream of `cfg.seed`.
pub fn simulate_stream(cfg: &DgpConfig, stream: u64) -> Result<DgpOutput> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, stream);
    let n = cfg.total_days();
    let dates: Vec<NaiveDate> = business_days(cfg.start_date).take(n).collect();
    let cal = Arc::new(TradingCalendar::new(dates.clone())?);

    let mut cycles = Vec::with_capacity(cfg.n_cycles);
    for k in 0..cfg.n_cycles {
        let first = cfg.lead_days + k * (cfg.days_per_cycle + cfg.gap_days);
        let last = first + cfg.days_per_cycle - 1;
        let incumbent = if k % 2 == 0 { Party::Democrat } else { Party::Republican };
        cycles.push(ElectionCycle::new(
            2000 + 4 * k as i32,
            dates[first],
            dates[last],
            dates[last],
            None,
            vec![(dates[first], incumbent)],
        )?);
    }

    // financial news as levels
    let (yd, sd) = (normal(cfg.yield_vol), normal(cfg.sp500_vol));
    let mut yl = vec![2.0; n];
    let mut sl = vec![1000.0; n];
    for t in 1..n {
        yl[t] = yl[t - 1] * (1.0 + yd.sample(&mut rng) / 100.0);
        sl[t] = sl[t - 1] * (1.0 + sd.sample(&mut rng) / 100.0);
    }
    let level = |name: &str, v: Vec<f64>| DailySeries::new(name, SeriesUnit::Level, cal.clone(), v.into_iter().map(Some).collect());
    let yield_levels = level("yield2y", yl)?;
    let sp500_levels = level("sp500", sl)?;

    // macro releases, one per month, no revisions
    let md = normal(cfg.macro_vol);
    let m0 = YearMonth::of(dates[0]);
    let m_last = YearMonth::of(dates[n - 1]);
    let mut vintages = Vec::new();
    let mut releases: BTreeMap<String, Vec<(NaiveDate, YearMonth)>> = BTreeMap::new();
    for (id, dom) in MACRO_IDS.iter().zip(RELEASE_DOM) {
        let base = m0.offset(-2);
        let mut lvl = 100.0;
        vintages.push(VintageRecord {
            series: id.to_string(),
            period: base,
            published: base.last_day().succ_opt().expect("date"),
            value: lvl,
        });
        let mut m = m0;
        while m <= m_last {
            let target = NaiveDate::from_ymd_opt(m.year, m.month, dom).expect("day of month");
            let Some(pos) = cal.next_on_or_after(target) else { break };
            let published = dates[pos];
            lvl *= 1.0 + md.sample(&mut rng) / 100.0;
            vintages.push(VintageRecord {
                series: id.to_string(),
                period: m.pred(),
                published,
                value: lvl,
            });
            releases.entry(id.to_string()).or_default().push((published, m.pred()));
            m = m.succ();
        }
    }
    let vintages = VintageStore::new(vintages)?;
    let releases = ReleaseCalendar::new(releases)?;
    let news = NewsPanel::build(NewsInputs {
        calendar: cal.clone(),
        yield_levels: &yield_levels,
        sp500_levels: &sp500_levels,
        vintages: &vintages,
        releases: &releases,
        macro_ids: MACRO_IDS,
        cycles: &cycles,
        mode: IndicatorMode::ReleaseDay,
    })?;

    // probability, shocks, confound, volumes
    let (ed, zd) = (normal(cfg.shock_vol), normal(cfg.confound_vol));
    let vol = Normal::new(cfg.volume_log_mean, cfg.volume_log_sd).expect("validated volume");
    let intercept = cfg.prob_mean * (1.0 - cfg.ar.iter().sum::<f64>());
    let mut prob = vec![None; n];
    let mut eps = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut quotes = Vec::new();
    for c in cycles.iter_mut() {
        let first = cal.position(c.first_date).expect("cycle on calendar");
        let last = cal.position(c.last_date).expect("cycle on calendar");
        let mut hist = vec![cfg.prob_mean; cfg.ar.len()];
        let step = |hist: &[f64]| -> f64 {
            intercept + cfg.ar.iter().enumerate().map(|(s, a)| a * hist[hist.len() - 1 - s]).sum::<f64>()
        };
        for _ in 0..BURN_IN {
            let p = step(&hist) + ed.sample(&mut rng) / 100.0;
            hist.push(p);
        }
        let yy = c.id % 100;
        let mut truth = cfg.prob_mean;
        for t in first..=last {
            let pres = news.pres_r(t).expect("cycle date");
            let flip = 1.0 - 2.0 * pres;
            let news_eff: f64 = (0..5)
                .map(|k| cfg.news_loading[k] * news.component(k, t).unwrap_or(0.0) * flip)
                .sum();
            eps[t] = ed.sample(&mut rng);
            z[t] = zd.sample(&mut rng);
            let p = step(&hist) + news_eff + eps[t] / 100.0 + z[t] / 100.0;
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("simulated probability {p} left [0, 1]; lower the volatilities")));
            }
            hist.push(p);
            truth = p;
            let units = (vol.sample(&mut rng).exp().round() as u64).max(1);
            let quoted = rng.random::<f64>() >= cfg.missing_rate;
            if quoted {
                prob[t] = Some(p);
                weights[t] = units as f64;
                let rep_units = units / 2;
                for (party, price, u) in [("DEM", 1.0 - p, units - rep_units), ("REP", p, rep_units)] {
                    quotes.push(ContractQuote {
                        date: dates[t],
                        contract: format!("{party}{yy:02}_WTA"),
                        last_price: price,
                        units: u,
                    });
                }
            }
        }
        c.winner = Some(if truth > 0.5 { Party::Republican } else { Party::Democrat });
    }
    let prob = DailySeries::new("pi_r", SeriesUnit::Probability, cal.clone(), prob)?;

    let mut assets = Vec::with_capacity(cfg.assets.len());
    for a in &cfg.assets {
        let nd = normal(a.noise_vol);
        let mut p = vec![100f64.ln(); n];
        for t in 1..n {
            let impulse: f64 = a.kernel.iter().enumerate().take(t + 1).map(|(j, k)| k * eps[t - j]).sum();
            let market = a.market_beta * news.component(1, t).unwrap_or(0.0) / 100.0;
            p[t] = p[t - 1] + impulse + market + a.confound_loading * z[t] + nd.sample(&mut rng);
        }
        assets.push(DailySeries::new(&a.name, SeriesUnit::LogLevel, cal.clone(), p.into_iter().map(Some).collect())?);
    }

    Ok(DgpOutput {
        calendar: cal,
        cycles,
        prob,
        news,
        yield_levels,
        sp500_levels,
        vintages,
        releases,
        assets,
        weights,
        quotes,
        true_shocks: eps,
        confound: z,
    })
}

/// True long-difference response of asset `asset` at horizons `0..=horizons`,
/// in percent per 10pp impact on the probability.
pub fn true_irf(cfg: &DgpConfig, asset: usize, horizons: usize) -> Vec<f64> {
    let kernel = &cfg.assets[asset].kernel;
    let mut cum = 0.0;
    (0..=horizons)
        .map(|h| {
            cum += kernel.get(h).copied().unwrap_or(0.0);
            // 10pp shock, log-points to percent
            1000.0 * cum
        })
        .collect()
}

/// True response of the probability level to a 10pp impact (pp): the
/// autoregressive impulse response scaled to 10 on impact.
pub fn prob_irf(cfg: &DgpConfig, horizons: usize) -> Vec<f64> {
    let mut psi: Vec<f64> = Vec::with_capacity(horizons + 1);
    for h in 0..=horizons {
        let v = if h == 0 {
            1.0
        } else {
            cfg.ar.iter().enumerate().filter(|(s, _)| *s < h).map(|(s, a)| a * psi[h - 1 - s]).sum()
        };
        psi.push(v);
    }
    psi.into_iter().map(|v| 10.0 * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DgpConfig {
        DgpConfig {
            n_cycles: 2,
            days_per_cycle: 60,
            gap_days: 20,
            ..DgpConfig::default()
        }
    }

    #[test]
    fn deterministic_per_seed_and_stream() {
        let a = simulate_dgp(&small()).unwrap();
        let b = simulate_dgp(&small()).unwrap();
        assert_eq!(a.true_shocks, b.true_shocks);
        assert_eq!(a.assets[0].values(), b.assets[0].values());
        let c = simulate_stream(&small(), 1).unwrap();
        assert_ne!(a.true_shocks, c.true_shocks);
    }

    #[test]
    fn layout_and_resolution() {
        let cfg = small();
        let out = simulate_dgp(&cfg).unwrap();
        assert_eq!(out.calendar.len(), cfg.total_days());
        assert_eq!(out.cycles.len(), 2);
        assert!(out.cycles.iter().all(|c| c.winner.is_some() && c.election_date == c.last_date));
        let outside = (0..cfg.lead_days).chain(cfg.lead_days + 60..cfg.lead_days + 80);
        for i in outside {
            assert_eq!(out.true_shocks[i], 0.0);
            assert_eq!(out.prob.get(i), None);
            assert_eq!(out.weights[i], 0.0);
        }
    }

    #[test]
    fn stationarity_is_checked() {
        let cfg = DgpConfig {
            ar: vec![0.7, 0.4],
            ..small()
        };
        assert!(matches!(simulate_dgp(&cfg), Err(Error::InvalidConfig(_))));
        assert!(ar_radius(&[0.6, 0.2]) < 1.0);
        assert!((ar_radius(&[0.5]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn truth_shapes() {
        let mut cfg = small();
        cfg.assets = vec![AssetSpec {
            kernel: vec![0.001],
            ..AssetSpec::default()
        }];
        assert!(true_irf(&cfg, 0, 5).iter().all(|v| (v - 1.0).abs() < 1e-12));
        cfg.assets[0].kernel = vec![];
        assert!(true_irf(&cfg, 0, 5).iter().all(|v| *v == 0.0));
        cfg.ar = vec![0.5];
        let p = prob_irf(&cfg, 3);
        assert!((p[3] - 10.0 * 0.125).abs() < 1e-12);
    }

    #[test]
    fn zero_shock_vol_leaves_assets_unaffected() {
        let mut cfg = small();
        cfg.shock_vol = 0.0;
        let out = simulate_dgp(&cfg).unwrap();
        assert!(out.true_shocks.iter().all(|e| *e == 0.0));
    }
}
