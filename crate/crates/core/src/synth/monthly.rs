use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng_for;
use crate::error::{Error, Result};
use crate::timeline::{MonthlySeries, SeriesUnit, YearMonth};

/// Monthly employment process with a hump-shaped response to the shock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonthlyDgpConfig {
    pub start: YearMonth,
    pub months: usize,
    pub shock_vol: f64,
    /// Month of the largest cumulative response.
    pub peak: usize,
    /// Cumulative response at the peak per unit shock (log-points).
    pub amplitude: f64,
    pub noise_vol: f64,
    pub n_controls: usize,
    /// AR(1) coefficient of every control.
    pub control_ar: f64,
    pub seed: u64,
}

impl Default for MonthlyDgpConfig {
    fn default() -> Self {
        Self {
            start: YearMonth::new(2000, 1).expect("month"),
            months: 300,
            shock_vol: 1.0,
            peak: 6,
            amplitude: 1.0,
            noise_vol: 0.1,
            n_controls: 4,
            control_ar: 0.5,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MonthlyDgpOutput {
    pub shock: MonthlySeries,
    pub employment: MonthlySeries,
    pub controls: Vec<MonthlySeries>,
    /// Cumulative response per unit shock at horizons `0..=2 * peak + 1`.
    pub truth: Vec<f64>,
}

impl MonthlyDgpConfig {
    /// Triangular cumulative response: rises linearly to `amplitude` at
    /// `peak`, back to zero at `2 * peak`.
    pub fn cumulative_response(&self, h: usize) -> f64 {
        let p = self.peak as f64;
        let v = if h <= self.peak { h as f64 / p } else { (2.0 * p - h as f64) / p };
        self.amplitude * v.max(0.0)
    }
}

pub fn simulate_monthly(cfg: &MonthlyDgpConfig, stream: u64) -> Result<MonthlyDgpOutput> {
    if cfg.peak == 0 || cfg.months < 24 {
        return Err(Error::InvalidConfig("monthly DGP needs peak >= 1 and at least 24 months".into()));
    }
    if cfg.control_ar.abs() >= 1.0 || cfg.shock_vol < 0.0 || cfg.noise_vol < 0.0 {
        return Err(Error::InvalidConfig("monthly DGP: stationary controls and non-negative volatilities required".into()));
    }
    let mut rng = rng_for(cfg.seed, stream);
    let n = cfg.months;
    let sd = Normal::new(0.0, cfg.shock_vol).expect("vol");
    let nd = Normal::new(0.0, cfg.noise_vol).expect("vol");
    let unit = Normal::new(0.0, 1.0).expect("vol");
    let shock: Vec<f64> = (0..n).map(|_| sd.sample(&mut rng)).collect();
    let len = 2 * cfg.peak + 1;
    let kernel: Vec<f64> = (0..len)
        .map(|j| cfg.cumulative_response(j) - if j == 0 { 0.0 } else { cfg.cumulative_response(j - 1) })
        .collect();
    let mut y = vec![0.0; n];
    for t in 0..n {
        let prev = if t == 0 { 5.0 } else { y[t - 1] };
        let impulse: f64 = kernel.iter().enumerate().take(t + 1).map(|(j, k)| k * shock[t - j]).sum();
        y[t] = prev + impulse + nd.sample(&mut rng);
    }
    let controls = (0..cfg.n_controls)
        .map(|k| {
            let mut x = 0.0;
            let vals = (0..n)
                .map(|_| {
                    x = cfg.control_ar * x + unit.sample(&mut rng);
                    Some(x)
                })
                .collect();
            MonthlySeries::new(format!("control{k}"), SeriesUnit::Level, cfg.start, vals)
        })
        .collect();
    Ok(MonthlyDgpOutput {
        shock: MonthlySeries::new("shock_m", SeriesUnit::PercentagePoints, cfg.start, shock.into_iter().map(Some).collect()),
        employment: MonthlySeries::new("employment", SeriesUnit::LogLevel, cfg.start, y.into_iter().map(Some).collect()),
        controls,
        truth: (0..=len).map(|h| cfg.cumulative_response(h)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_peaks_where_configured() {
        let cfg = MonthlyDgpConfig::default();
        let out = simulate_monthly(&cfg, 0).unwrap();
        let argmax = out.truth.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(argmax, 6);
        assert_eq!(out.truth[0], 0.0);
        assert_eq!(out.controls.len(), 4);
        assert_eq!(out.employment.len(), 300);
    }
}
