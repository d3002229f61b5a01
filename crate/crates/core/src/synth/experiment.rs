use rayon::prelude::*;

use super::dgp::{simulate_stream, true_irf, DgpConfig, DgpOutput};
use crate::error::{Error, Result};
use crate::lp::{confidence_bands, impact_scale, run_lp_daily, ImpulseResponse, LpSpec, Normalization};
use crate::regress::fit_wls;
use crate::shockgen::{build_election_design, extract_shocks, resolve_outcomes, DesignOptions, ShockSeries};
use crate::timeline::DailySeries;

/// Unweighted first stage on simulated data, without the HAC step.
/// Returns the resolved probability and the shock series.
pub fn fit_shocks(out: &DgpOutput) -> Result<(DailySeries, ShockSeries)> {
    let prob = resolve_outcomes(&out.prob, &out.cycles)?;
    let ed = build_election_design(&prob, &out.news, &out.cycles, &out.weights, &DesignOptions::default())?;
    let fit = fit_wls(&ed.design, &ed.response)?;
    let shocks = extract_shocks(&fit, &ed, out.calendar.clone(), &out.cycles, &out.weights)?;
    Ok((prob, shocks))
}

/// Shocks, impact normalization and the daily projection of one asset.
pub fn pipeline_irf(out: &DgpOutput, spec: &LpSpec, asset: usize) -> Result<ImpulseResponse> {
    let y = out
        .assets
        .get(asset)
        .ok_or_else(|| Error::InvalidConfig(format!("no asset {asset}")))?;
    let (prob, shocks) = fit_shocks(out)?;
    let scale = impact_scale(&shocks, &prob, spec)?;
    run_lp_daily(
        &shocks,
        y,
        &LpSpec {
            normalization: Normalization::Scale(scale),
            ..spec.clone()
        },
    )
}

/// Runs [`pipeline_irf`] on replications `0..n_reps` (streams `1..=n_reps`).
pub fn replicate_irfs(cfg: &DgpConfig, spec: &LpSpec, asset: usize, n_reps: usize) -> Result<Vec<ImpulseResponse>> {
    (0..n_reps)
        .into_par_iter()
        .map(|r| pipeline_irf(&simulate_stream(cfg, r as u64 + 1)?, spec, asset))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub level: f64,
    pub n_reps: usize,
    pub coverage: Vec<f64>,
    /// Binomial Monte Carlo standard error of each coverage rate.
    pub mc_se: Vec<f64>,
}

/// Share of replications whose `level` band contains `truth`, per horizon.
pub fn coverage_from(irs: &[ImpulseResponse], truth: &[f64], level: f64) -> CoverageReport {
    let n = irs.len();
    let hmax = irs.iter().map(|ir| ir.estimates.len()).min().unwrap_or(0).min(truth.len());
    let mut hits = vec![0usize; hmax];
    for ir in irs {
        let banded = confidence_bands(ir, &[level]);
        let b = banded.band(level).expect("band just added");
        for (h, hit) in hits.iter_mut().enumerate() {
            if b.lo[h] <= truth[h] && truth[h] <= b.hi[h] {
                *hit += 1;
            }
        }
    }
    let coverage: Vec<f64> = hits.iter().map(|k| *k as f64 / n as f64).collect();
    let mc_se = coverage.iter().map(|c| (c * (1.0 - c) / n as f64).sqrt()).collect();
    CoverageReport {
        level,
        n_reps: n,
        coverage,
        mc_se,
    }
}

/// Coverage of the `level` band for the first configured asset.
pub fn coverage_experiment(cfg: &DgpConfig, spec: &LpSpec, n_reps: usize, level: f64) -> Result<CoverageReport> {
    if n_reps < 100 {
        return Err(Error::InvalidConfig("coverage needs at least 100 replications".into()));
    }
    let irs = replicate_irfs(cfg, spec, 0, n_reps)?;
    Ok(coverage_from(&irs, &true_irf(cfg, 0, spec.horizons), level))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanReport {
    pub mean: Vec<f64>,
    /// Standard deviation across replications over `sqrt(n_reps)`.
    pub mc_se: Vec<f64>,
}

/// Mean coefficient per horizon across replications.
pub fn mean_response(irs: &[ImpulseResponse]) -> MeanReport {
    let n = irs.len() as f64;
    let hmax = irs.iter().map(|ir| ir.estimates.len()).min().unwrap_or(0);
    let mut mean = vec![0.0; hmax];
    let mut mc_se = vec![0.0; hmax];
    for h in 0..hmax {
        let m = irs.iter().map(|ir| ir.estimates[h].coef).sum::<f64>() / n;
        let var = irs.iter().map(|ir| (ir.estimates[h].coef - m).powi(2)).sum::<f64>() / (n - 1.0);
        mean[h] = m;
        mc_se[h] = (var / n).sqrt();
    }
    MeanReport { mean, mc_se }
}

/// Correlation between extracted and injected shocks over the design rows.
pub fn recovery_correlation(cfg: &DgpConfig, stream: u64) -> Result<f64> {
    let out = simulate_stream(cfg, stream)?;
    let (_, shocks) = fit_shocks(&out)?;
    let pairs: Vec<(f64, f64)> = (0..shocks.len())
        .filter(|&i| shocks.defined[i])
        .map(|i| (shocks.values[i], out.true_shocks[i]))
        .collect();
    let n = pairs.len() as f64;
    let (ma, mb) = (
        pairs.iter().map(|p| p.0).sum::<f64>() / n,
        pairs.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        sab += (a - ma) * (b - mb);
        saa += (a - ma).powi(2);
        sbb += (b - mb).powi(2);
    }
    Ok(sab / (saa * sbb).sqrt())
}
