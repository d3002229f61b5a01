//! Newey-West covariance with Bartlett weights.
//!
//! ```text
//! V = B S B,   B = (X'WX)^-1
//! S = G_0 + sum_{l=1..L} (1 - l/(L+1)) (G_l + G_l')
//! G_l = sum_t s_t s_{t-l}',   s_t = w_t e_t x_t
//! ```
//!
//! Scores are weighted the same way as the least-squares objective. Rows are
//! paired by position among the positive-weight rows; when the design carries
//! group ids, pairs from different groups are skipped.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use super::sum::NeumaierSum;
use super::wls::{factorize, FitResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    Bartlett,
}

#[derive(Debug, Clone)]
pub struct HacCovariance {
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub lags: usize,
    pub kernel: Kernel,
}

impl HacCovariance {
    pub fn se(&self, j: usize) -> f64 {
        self.matrix[(j, j)].max(0.0).sqrt()
    }

    pub fn se_of(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|j| self.se(j))
    }
}

/// `floor(0.75 * T^(1/3))`.
pub fn nw_bandwidth(t: usize) -> usize {
    let raw = 0.75 * (t as f64).cbrt();
    log::debug!("Newey-West bandwidth for T={t}: raw {raw:.4}");
    // cbrt of an exact cube can land one ulp low
    (raw * (1.0 + 1e-12)).floor() as usize
}

pub fn bartlett_weight(lag: usize, max_lag: usize) -> f64 {
    if lag > max_lag {
        0.0
    } else {
        1.0 - lag as f64 / (max_lag as f64 + 1.0)
    }
}

struct Sandwich {
    bread: DMatrix<f64>,
    scores: Vec<Vec<f64>>,
    groups: Option<Vec<i32>>,
}

fn sandwich_parts(fit: &FitResult, x: &DesignMatrix, lags: usize) -> Result<Sandwich> {
    if fit.residuals.len() != x.nrows() || fit.coefficients.len() != x.ncols() {
        return Err(Error::Dimension("fit does not belong to this design".into()));
    }
    let f = factorize(x).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::SingularBread,
        other => other,
    })?;
    let bread = f.bread().ok_or(Error::SingularBread)?;
    let active = f.active;
    let n = active.len();
    if lags >= n {
        return Err(Error::OutOfRange {
            what: "HAC lag truncation".into(),
            detail: format!("L={lags} with {n} observations"),
        });
    }
    let p = x.ncols();
    let vals = x.values();
    let w = x.weights();
    let scores: Vec<Vec<f64>> = active
        .iter()
        .map(|&i| {
            let we = w[i] * fit.residuals[i];
            (0..p).map(|j| we * vals[(i, j)]).collect()
        })
        .collect();
    let groups: Option<Vec<i32>> = x.groups().map(|g| active.iter().map(|&i| g[i]).collect());
    Ok(Sandwich { bread, scores, groups })
}

fn same_group(groups: &Option<Vec<i32>>, a: usize, b: usize) -> bool {
    groups.as_ref().is_none_or(|g| g[a] == g[b])
}

pub fn newey_west(fit: &FitResult, x: &DesignMatrix, lags: usize) -> Result<HacCovariance> {
    let Sandwich { bread, scores, groups } = sandwich_parts(fit, x, lags)?;
    let n = scores.len();
    let p = x.ncols();

    let mut meat = DMatrix::zeros(p, p);
    for lag in 0..=lags {
        let k = bartlett_weight(lag, lags);
        let mut acc = vec![NeumaierSum::new(); p * p];
        for t in lag..n {
            if !same_group(&groups, t, t - lag) {
                continue;
            }
            let (a, b) = (&scores[t], &scores[t - lag]);
            for i in 0..p {
                for j in 0..p {
                    acc[i * p + j].add(a[i] * b[j]);
                }
            }
        }
        for i in 0..p {
            for j in 0..p {
                let g = acc[i * p + j].value();
                if lag == 0 {
                    meat[(i, j)] += g;
                } else {
                    meat[(i, j)] += k * g;
                    meat[(j, i)] += k * g;
                }
            }
        }
    }
    let v = &bread * meat * &bread;
    let matrix = (&v + v.transpose()) * 0.5;
    Ok(HacCovariance {
        labels: x.labels().to_vec(),
        matrix,
        lags,
        kernel: Kernel::Bartlett,
    })
}

/// HAC standard error of coefficient `j` alone. Same estimator as
/// [`newey_west`], in O(n p) instead of O(n p^2 L).
pub fn newey_west_se(fit: &FitResult, x: &DesignMatrix, lags: usize, j: usize) -> Result<f64> {
    if j >= x.ncols() {
        return Err(Error::Dimension(format!("coefficient {j} of {}", x.ncols())));
    }
    let Sandwich { bread, scores, groups } = sandwich_parts(fit, x, lags)?;
    let row = bread.row(j);
    let u: Vec<f64> = scores
        .iter()
        .map(|s| s.iter().enumerate().map(|(k, v)| row[k] * v).sum())
        .collect();
    let mut var = 0.0;
    for lag in 0..=lags {
        let k = bartlett_weight(lag, lags);
        let mut acc = NeumaierSum::new();
        for t in lag..u.len() {
            if same_group(&groups, t, t - lag) {
                acc.add(u[t] * u[t - lag]);
            }
        }
        var += if lag == 0 { acc.value() } else { 2.0 * k * acc.value() };
    }
    Ok(var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::fit_wls;
    use chrono::NaiveDate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design(rng: &mut ChaCha8Rng, n: usize) -> (DesignMatrix, Vec<f64>) {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let rows = (0..n).map(|i| start + chrono::Days::new(i as u64)).collect();
        let data: Vec<Vec<f64>> = (0..n).map(|_| vec![1.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let y = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let x = DesignMatrix::from_rows(rows, vec!["const".into(), "a".into(), "b".into()], &data)
            .unwrap()
            .with_weights(w)
            .unwrap();
        (x, y)
    }

    #[test]
    fn bandwidth_rule() {
        assert_eq!(nw_bandwidth(4096), 12);
        assert_eq!(nw_bandwidth(1), 0);
        assert_eq!(nw_bandwidth(1259), 8);
        assert_eq!(nw_bandwidth(512), 6);
        assert_eq!(nw_bandwidth(1715), 8);
    }

    #[test]
    fn zero_lags_is_hc0() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, y) = design(&mut rng, 120);
        let fit = fit_wls(&x, &y).unwrap();
        let hac = newey_west(&fit, &x, 0).unwrap();
        // HC0 through the normal-equation inverse.
        let v = x.values();
        let w = x.weights();
        let mut xtwx = DMatrix::<f64>::zeros(3, 3);
        let mut meat = DMatrix::<f64>::zeros(3, 3);
        for i in 0..120 {
            for a in 0..3 {
                for b in 0..3 {
                    xtwx[(a, b)] += w[i] * v[(i, a)] * v[(i, b)];
                    meat[(a, b)] += (w[i] * fit.residuals[i]).powi(2) * v[(i, a)] * v[(i, b)];
                }
            }
        }
        let inv = xtwx.try_inverse().unwrap();
        let hc0 = &inv * meat * &inv;
        let rel = (&hac.matrix - &hc0).abs().max() / hc0.abs().max();
        assert!(rel < 1e-12, "relative gap {rel}");
    }

    #[test]
    fn symmetric_with_nonnegative_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x, y) = design(&mut rng, 90);
        let fit = fit_wls(&x, &y).unwrap();
        let hac = newey_west(&fit, &x, 4).unwrap();
        assert_eq!(hac.matrix, hac.matrix.transpose());
        assert!((0..3).all(|j| hac.matrix[(j, j)] >= 0.0));
        assert!(newey_west(&fit, &x, 90).is_err());
    }

    #[test]
    fn shifting_y_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (x, y) = design(&mut rng, 100);
        let a = newey_west(&fit_wls(&x, &y).unwrap(), &x, 3).unwrap();
        let y2: Vec<f64> = y.iter().map(|v| v + 17.0).collect();
        let b = newey_west(&fit_wls(&x, &y2).unwrap(), &x, 3).unwrap();
        let rel = (&a.matrix - &b.matrix).abs().max() / a.matrix.abs().max();
        assert!(rel < 1e-9, "{rel}");
    }

    #[test]
    fn groups_block_cross_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (x, y) = design(&mut rng, 60);
        let fit = fit_wls(&x, &y).unwrap();
        let single = x.clone().with_groups(Some(vec![1; 60])).unwrap();
        let a = newey_west(&fit, &x, 3).unwrap();
        let b = newey_west(&fit, &single, 3).unwrap();
        assert_eq!(a.matrix, b.matrix);
        // one group per row leaves only the lag-0 term
        let each = x.clone().with_groups(Some((0..60).collect())).unwrap();
        let c = newey_west(&fit, &each, 3).unwrap();
        let d = newey_west(&fit, &x, 0).unwrap();
        let rel = (&c.matrix - &d.matrix).abs().max() / d.matrix.abs().max();
        assert!(rel < 1e-14);
    }

    #[test]
    fn single_coefficient_matches_full_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (x, y) = design(&mut rng, 120);
        let x = x.with_groups(Some((0..120).map(|i| i / 50).collect())).unwrap();
        let fit = fit_wls(&x, &y).unwrap();
        let full = newey_west(&fit, &x, 4).unwrap();
        for j in 0..3 {
            let se = newey_west_se(&fit, &x, 4, j).unwrap();
            assert!((se - full.se(j)).abs() <= 1e-12 * full.se(j), "{se} {}", full.se(j));
        }
    }
}
