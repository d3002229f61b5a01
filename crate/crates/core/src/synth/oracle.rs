use nalgebra::DMatrix;

/// Inverse by Gauss-Jordan elimination with partial pivoting.
fn gauss_jordan_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))?;
        if m[(piv, col)] == 0.0 {
            return None;
        }
        m.swap_rows(col, piv);
        inv.swap_rows(col, piv);
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = m[(i, col)];
                if f != 0.0 {
                    for j in 0..n {
                        m[(i, j)] -= f * m[(col, j)];
                        inv[(i, j)] -= f * inv[(col, j)];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn weighted_cross(x: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let (n, p) = x.shape();
    DMatrix::from_fn(p, p, |i, j| (0..n).map(|t| w[t] * x[(t, i)] * x[(t, j)]).sum())
}

/// WLS coefficients from the normal equations `(X'WX) b = X'Wy`.
pub fn oracle_wls(x: &DMatrix<f64>, y: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let (n, p) = x.shape();
    let inv = gauss_jordan_inverse(&weighted_cross(x, w))?;
    let xwy: Vec<f64> = (0..p).map(|j| (0..n).map(|t| w[t] * x[(t, j)] * y[t]).sum()).collect();
    Some((0..p).map(|i| (0..p).map(|j| inv[(i, j)] * xwy[j]).sum()).collect())
}

/// Newey-West covariance as a literal double sum over observation pairs.
///
/// Rows with zero weight are removed first, so lag distances count
/// positive-weight rows only. Pairs from different groups contribute nothing.
pub fn oracle_hac(
    residuals: &[f64],
    x: &DMatrix<f64>,
    weights: &[f64],
    lags: usize,
    groups: Option<&[i32]>,
) -> Option<DMatrix<f64>> {
    let keep: Vec<usize> = (0..x.nrows()).filter(|&t| weights[t] > 0.0).collect();
    let p = x.ncols();
    let xs = DMatrix::from_fn(keep.len(), p, |r, c| x[(keep[r], c)]);
    let ws: Vec<f64> = keep.iter().map(|&t| weights[t]).collect();
    let bread = gauss_jordan_inverse(&weighted_cross(&xs, &ws))?;
    let n = keep.len();
    let mut meat = DMatrix::<f64>::zeros(p, p);
    for t in 0..n {
        for s in 0..n {
            let lag = t.abs_diff(s);
            if lag > lags {
                continue;
            }
            if let Some(g) = groups {
                if g[keep[t]] != g[keep[s]] {
                    continue;
                }
            }
            let k = 1.0 - lag as f64 / (lags as f64 + 1.0);
            let (ut, us) = (ws[t] * residuals[keep[t]], ws[s] * residuals[keep[s]]);
            for i in 0..p {
                for j in 0..p {
                    meat[(i, j)] += k * ut * xs[(t, i)] * us * xs[(s, j)];
                }
            }
        }
    }
    Some(&bread * meat * &bread)
}
