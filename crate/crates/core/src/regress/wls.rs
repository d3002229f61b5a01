use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use crate::error::{Error, Result};

/// Largest accepted condition number of the column-equilibrated, weighted
/// design.
pub const CONDITION_LIMIT: f64 = 1e10;

/// Output of [`fit_wls`].
#[derive(Debug, Clone)]
pub struct FitResult {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub rows: Vec<NaiveDate>,
    /// `y - X b` for every row, including zero-weight rows.
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub r_squared: f64,
    /// Rows with positive weight.
    pub n_obs: usize,
    pub weights: Vec<f64>,
    pub condition: f64,
}

impl FitResult {
    pub fn coef(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|j| self.coefficients[j])
    }
}

/// QR factorization of `sqrt(W) X D^-1` over the positive-weight rows, where
/// `D` holds the column norms.
pub(crate) struct WeightedQr {
    pub active: Vec<usize>,
    pub sqrt_w: Vec<f64>,
    pub col_norms: Vec<f64>,
    pub qr: nalgebra::linalg::QR<f64, nalgebra::Dyn, nalgebra::Dyn>,
    pub r: DMatrix<f64>,
    pub condition: f64,
}

impl WeightedQr {
    /// `(X'WX)^-1`, unscaled.
    pub fn bread(&self) -> Option<DMatrix<f64>> {
        let p = self.r.ncols();
        let r_inv = self.r.solve_upper_triangular(&DMatrix::identity(p, p))?;
        let mut b = &r_inv * r_inv.transpose();
        for i in 0..p {
            for j in 0..p {
                b[(i, j)] /= self.col_norms[i] * self.col_norms[j];
            }
        }
        Some(b)
    }
}

fn scaled_active(x: &DesignMatrix, active: &[usize], cols: &[usize]) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let w = x.weights();
    let sqrt_w: Vec<f64> = active.iter().map(|&i| w[i].sqrt()).collect();
    let vals = x.values();
    let mut a = DMatrix::from_fn(active.len(), cols.len(), |r, c| sqrt_w[r] * vals[(active[r], cols[c])]);
    let mut norms = Vec::with_capacity(cols.len());
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
        norms.push(n);
    }
    (a, sqrt_w, norms)
}

fn condition_of(r: &DMatrix<f64>) -> f64 {
    let sv = r.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Names the columns that are (near-)collinear with earlier columns.
fn offending_columns(x: &DesignMatrix, active: &[usize]) -> Vec<String> {
    let mut kept: Vec<usize> = Vec::new();
    let mut bad = Vec::new();
    for j in 0..x.ncols() {
        let mut trial = kept.clone();
        trial.push(j);
        let (a, _, norms) = scaled_active(x, active, &trial);
        let ok = norms.iter().all(|n| *n > 0.0) && {
            let r = a.qr().r();
            condition_of(&r) <= CONDITION_LIMIT
        };
        if ok {
            kept = trial;
        } else {
            bad.push(x.labels()[j].clone());
        }
    }
    bad
}

pub(crate) fn factorize(x: &DesignMatrix) -> Result<WeightedQr> {
    let active = x.active_rows();
    let p = x.ncols();
    if active.len() < p {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
            columns: vec![format!("{} positive-weight rows for {p} columns", active.len())],
        });
    }
    let cols: Vec<usize> = (0..p).collect();
    let (a, sqrt_w, col_norms) = scaled_active(x, &active, &cols);
    if col_norms.iter().any(|n| *n == 0.0) {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
            columns: offending_columns(x, &active),
        });
    }
    let qr = a.qr();
    let r = qr.r();
    let condition = condition_of(&r);
    if condition > CONDITION_LIMIT {
        return Err(Error::RankDeficient {
            condition,
            columns: offending_columns(x, &active),
        });
    }
    Ok(WeightedQr {
        active,
        sqrt_w,
        col_norms,
        qr,
        r,
        condition,
    })
}

/// Weighted least squares by Householder QR of `sqrt(W) X`.
///
/// Minimizes `sum_t w_t (y_t - x_t'b)^2`. Zero-weight rows do not enter the
/// solve but still receive residuals.
pub fn fit_wls(x: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    if y.len() != x.nrows() {
        return Err(Error::Dimension(format!("{} responses for {} rows", y.len(), x.nrows())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("response contains non-finite values".into()));
    }
    let f = factorize(x)?;
    let p = x.ncols();
    let mut rhs = DVector::from_iterator(f.active.len(), f.active.iter().zip(&f.sqrt_w).map(|(&i, s)| s * y[i]));
    f.qr.q_tr_mul(&mut rhs);
    let top = rhs.rows(0, p).into_owned();
    let z = f.r.solve_upper_triangular(&top).ok_or(Error::SingularBread)?;
    let coefficients: Vec<f64> = (0..p).map(|j| z[j] / f.col_norms[j]).collect();

    let vals = x.values();
    let fitted: Vec<f64> = (0..x.nrows())
        .map(|i| (0..p).map(|j| vals[(i, j)] * coefficients[j]).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(y, f)| y - f).collect();

    let w = x.weights();
    let wsum: f64 = f.active.iter().map(|&i| w[i]).sum();
    let ybar = f.active.iter().map(|&i| w[i] * y[i]).sum::<f64>() / wsum;
    let sst: f64 = f.active.iter().map(|&i| w[i] * (y[i] - ybar).powi(2)).sum();
    let ssr: f64 = f.active.iter().map(|&i| w[i] * residuals[i].powi(2)).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(if x.has_intercept() { 0.0 } else { f64::NEG_INFINITY }, 1.0)
    } else if ssr == 0.0 {
        1.0
    } else {
        0.0
    };

    Ok(FitResult {
        labels: x.labels().to_vec(),
        coefficients,
        rows: x.rows().to_vec(),
        residuals,
        fitted,
        r_squared,
        n_obs: f.active.len(),
        weights: w.to_vec(),
        condition: f.condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dates(n: usize) -> Vec<NaiveDate> {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        (0..n).map(|i| start + chrono::Days::new(i as u64)).collect()
    }

    fn random_design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DesignMatrix {
        let mut labels = vec!["const".to_string()];
        labels.extend((1..p).map(|j| format!("x{j}")));
        let data: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut r = vec![1.0];
                r.extend((1..p).map(|_| rng.random_range(-2.0..2.0)));
                r
            })
            .collect();
        let w = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        DesignMatrix::from_rows(dates(n), labels, &data).unwrap().with_weights(w).unwrap()
    }

    /// Normal equations solved by Gauss-Jordan elimination with partial pivoting.
    fn normal_equations_oracle(x: &DesignMatrix, y: &[f64]) -> Vec<f64> {
        let p = x.ncols();
        let v = x.values();
        let w = x.weights();
        let mut m = vec![vec![0.0; p + 1]; p];
        for i in 0..x.nrows() {
            for a in 0..p {
                for b in 0..p {
                    m[a][b] += w[i] * v[(i, a)] * v[(i, b)];
                }
                m[a][p] += w[i] * v[(i, a)] * y[i];
            }
        }
        for c in 0..p {
            let piv = (c..p).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
            m.swap(c, piv);
            for r in 0..p {
                if r != c {
                    let f = m[r][c] / m[c][c];
                    for k in c..=p {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
        (0..p).map(|c| m[c][p] / m[c][c]).collect()
    }

    #[test]
    fn exact_linear_map_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_design(&mut rng, 40, 4).with_weights(vec![1.0; 40]).unwrap();
        let beta = [0.5, -1.0, 2.0, 3.25];
        let y: Vec<f64> = (0..40)
            .map(|i| (0..4).map(|j| x.values()[(i, j)] * beta[j]).sum())
            .collect();
        let fit = fit_wls(&x, &y).unwrap();
        for (b, t) in fit.coefficients.iter().zip(beta) {
            assert!((b - t).abs() < 1e-12);
        }
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_design(&mut rng, 200, 6);
        let y: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fit = fit_wls(&x, &y).unwrap();
        let oracle = normal_equations_oracle(&x, &y);
        for (b, o) in fit.coefficients.iter().zip(&oracle) {
            assert!((b - o).abs() <= 1e-8 * o.abs().max(1e-3), "{b} vs {o}");
        }
    }

    #[test]
    fn weighted_equals_ols_on_scaled_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_design(&mut rng, 80, 5);
        let y: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fit = fit_wls(&x, &y).unwrap();
        let sw: Vec<f64> = x.weights().iter().map(|w| w.sqrt()).collect();
        let scaled = DMatrix::from_fn(80, 5, |i, j| sw[i] * x.values()[(i, j)]);
        let xs = DesignMatrix::new(x.rows().to_vec(), x.labels().to_vec(), scaled, vec![1.0; 80], None).unwrap();
        let ys: Vec<f64> = y.iter().zip(&sw).map(|(y, s)| y * s).collect();
        let fit2 = fit_wls(&xs, &ys).unwrap();
        for (a, b) in fit.coefficients.iter().zip(&fit2.coefficients) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn weighted_residuals_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_design(&mut rng, 150, 5);
        let y: Vec<f64> = (0..150).map(|_| rng.random_range(-10.0..10.0)).collect();
        let fit = fit_wls(&x, &y).unwrap();
        for j in 0..5 {
            let dot: f64 = (0..150).map(|i| x.weights()[i] * fit.residuals[i] * x.values()[(i, j)]).sum();
            let scale: f64 = (0..150).map(|i| (x.weights()[i] * y[i] * x.values()[(i, j)]).abs()).sum();
            assert!(dot.abs() <= 1e-8 * scale, "column {j}: {dot}");
        }
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }

    #[test]
    fn zero_weight_rows_do_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_design(&mut rng, 60, 3);
        let y: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut w = x.weights().to_vec();
        w[10] = 0.0;
        w[20] = 0.0;
        let xz = x.clone().with_weights(w).unwrap();
        let keep: Vec<usize> = (0..60).filter(|i| *i != 10 && *i != 20).collect();
        let xr = DesignMatrix::new(
            keep.iter().map(|&i| x.rows()[i]).collect(),
            x.labels().to_vec(),
            x.values().select_rows(&keep),
            keep.iter().map(|&i| x.weights()[i]).collect(),
            None,
        )
        .unwrap();
        let yr: Vec<f64> = keep.iter().map(|&i| y[i]).collect();
        let mut yz = y.clone();
        yz[10] = 1e6;
        let a = fit_wls(&xz, &yz).unwrap();
        let b = fit_wls(&xr, &yr).unwrap();
        assert_eq!(a.n_obs, 58);
        for (u, v) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((u - v).abs() < 1e-12);
        }
        assert!((a.r_squared - b.r_squared).abs() < 1e-12);
    }

    #[test]
    fn collinear_column_is_named() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 30;
        let data: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let a: f64 = rng.random_range(-1.0..1.0);
                vec![1.0, a, 2.0 * a]
            })
            .collect();
        let x = DesignMatrix::from_rows(dates(n), vec!["const".into(), "a".into(), "a2".into()], &data).unwrap();
        match fit_wls(&x, &vec![0.0; n]) {
            Err(Error::RankDeficient { columns, condition }) => {
                assert_eq!(columns, vec!["a2".to_string()]);
                assert!(condition > CONDITION_LIMIT);
            }
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn row_permutation_invariance(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 50;
            let x = random_design(&mut rng, n, 4);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let xp = DesignMatrix::new(
                x.rows().to_vec(),
                x.labels().to_vec(),
                x.values().select_rows(&perm),
                perm.iter().map(|&i| x.weights()[i]).collect(),
                None,
            ).unwrap();
            let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
            let a = fit_wls(&x, &y).unwrap();
            let b = fit_wls(&xp, &yp).unwrap();
            for (u, v) in a.coefficients.iter().zip(&b.coefficients) {
                proptest::prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }
}
