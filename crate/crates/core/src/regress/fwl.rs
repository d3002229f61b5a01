use nalgebra::DMatrix;

use super::design::DesignMatrix;
use super::wls::{factorize, fit_wls};
use crate::error::{Error, Result};

/// Residualizes `targets` on the remaining columns under the design's
/// weights. The returned design holds only the target columns.
pub fn fwl_residualize(x: &DesignMatrix, targets: &[&str]) -> Result<DesignMatrix> {
    let target_idx: Vec<usize> = targets
        .iter()
        .map(|t| {
            x.column_index(t)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown target column {t:?}")))
        })
        .collect::<Result<_>>()?;
    // full-rank check over targets and controls together
    factorize(x)?;
    let target_only = x.select_columns(&target_idx)?;
    let controls: Vec<usize> = (0..x.ncols()).filter(|j| !target_idx.contains(j)).collect();
    if controls.is_empty() {
        return Ok(target_only);
    }
    let cx = x.select_columns(&controls)?;
    let mut out = DMatrix::zeros(x.nrows(), target_idx.len());
    for (k, &j) in target_idx.iter().enumerate() {
        let col: Vec<f64> = x.values().column(j).iter().copied().collect();
        let fit = fit_wls(&cx, &col)?;
        for (i, e) in fit.residuals.iter().enumerate() {
            out[(i, k)] = *e;
        }
    }
    target_only.replace_columns(&(0..target_idx.len()).collect::<Vec<_>>(), &out)
}
