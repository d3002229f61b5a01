//! Randomized property checks shared by the `validate` command and the
//! acceptance suite. Each returns the worst discrepancy it found.

use nalgebra::DMatrix;
use rand::Rng;

use super::dgp::{simulate_stream, DgpConfig};
use super::experiment::fit_shocks;
use super::oracle::oracle_hac;
use super::rng_for;
use crate::error::Result;
use crate::lp::{run_lp_daily, run_lp_onestep, LpSpec, Normalization};
use crate::regress::{fit_wls, newey_west, DesignMatrix, INTERCEPT};

/// Lags used by the HAC oracle problems, in rotation.
pub const HAC_LAGS: [usize; 4] = [0, 1, 3, 8];

/// Largest `|alpha_h - 100 gamma_h|` over `0..=horizons` on one simulated
/// data set: one-step coefficient against the two-step coefficient, both
/// unweighted, raw, without the lagged-change control.
pub fn fwl_gap(cfg: &DgpConfig, horizons: usize, stream: u64) -> Result<f64> {
    let out = simulate_stream(cfg, stream)?;
    let (prob, shocks) = fit_shocks(&out)?;
    let spec = LpSpec {
        horizons,
        weighted: false,
        lagged_change: false,
        normalization: Normalization::Raw,
        ..LpSpec::daily("fwl")
    };
    let mut gap = 0.0f64;
    for y in &out.assets {
        let two = run_lp_daily(&shocks, y, &spec)?;
        let one = run_lp_onestep(&prob, &out.news, &out.cycles, &out.weights, y, &spec)?;
        for (a, g) in one.coefs().iter().zip(two.coefs()) {
            gap = gap.max((a - 100.0 * g).abs());
        }
    }
    Ok(gap)
}

/// A random regression problem with positive, some zero, weights.
pub struct Problem {
    pub x: DesignMatrix,
    pub y: Vec<f64>,
    pub lags: usize,
}

/// Problem `k` of a seeded sequence: `n` in 30..=500, 2..=5 columns with an
/// intercept, about 10% zero weights, cycle-like groups on odd `k`.
pub fn random_problem(seed: u64, k: usize) -> Result<Problem> {
    let mut rng = rng_for(seed, k as u64);
    let n = rng.random_range(30..=500usize);
    let p = rng.random_range(2..=5usize);
    let values = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.random_range(-2.0..2.0) });
    let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut e_prev = 0.0;
    let y: Vec<f64> = (0..n)
        .map(|t| {
            e_prev = 0.5 * e_prev + rng.random_range(-1.0..1.0);
            (0..p).map(|j| values[(t, j)] * beta[j]).sum::<f64>() + e_prev
        })
        .collect();
    let weights: Vec<f64> = (0..n)
        .map(|t| if t > 0 && rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.2..5.0) })
        .collect();
    let groups = (k % 2 == 1).then(|| {
        let block = rng.random_range(10..=80usize);
        (0..n).map(|t| (t / block) as i32).collect()
    });
    let labels = (0..p)
        .map(|j| if j == 0 { INTERCEPT.to_string() } else { format!("x{j}") })
        .collect();
    let rows = (0..n)
        .map(|t| chrono::NaiveDate::from_num_days_from_ce_opt(730_000 + t as i32).expect("date"))
        .collect();
    let x = DesignMatrix::new(rows, labels, values, weights, groups)?;
    Ok(Problem {
        x,
        y,
        lags: HAC_LAGS[k % HAC_LAGS.len()],
    })
}

/// Largest relative difference between [`newey_west`] evaluated at
/// `lags + lag_offset` and the brute-force oracle at `lags`.
pub fn hac_oracle_gap(seed: u64, problems: usize, lag_offset: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..problems {
        let pr = random_problem(seed, k)?;
        let fit = fit_wls(&pr.x, &pr.y)?;
        let got = newey_west(&fit, &pr.x, pr.lags + lag_offset)?;
        let want = oracle_hac(&fit.residuals, pr.x.values(), pr.x.weights(), pr.lags, pr.x.groups())
            .ok_or(crate::Error::SingularBread)?;
        let scale = want.abs().max();
        worst = worst.max((&got.matrix - &want).abs().max() / scale);
    }
    Ok(worst)
}

/// Largest relative coefficient difference between weighted least squares
/// and OLS on rows multiplied by `sqrt(w)`.
pub fn wls_identity_gap(seed: u64, problems: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..problems {
        let pr = random_problem(seed.wrapping_add(1), k)?;
        let fit = fit_wls(&pr.x, &pr.y)?;
        let w = pr.x.weights();
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let scaled = DMatrix::from_fn(pr.x.nrows(), pr.x.ncols(), |i, j| sw[i] * pr.x.values()[(i, j)]);
        let ys: Vec<f64> = pr.y.iter().zip(&sw).map(|(y, s)| y * s).collect();
        let plain = DesignMatrix::new(pr.x.rows().to_vec(), pr.x.labels().to_vec(), scaled, vec![1.0; w.len()], None)?;
        let ols = fit_wls(&plain, &ys)?;
        let scale = fit.coefficients.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        for (a, b) in fit.coefficients.iter().zip(&ols.coefficients) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Ok(worst)
}
