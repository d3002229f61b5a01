use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::ingest::csvio;

pub const IRF_HEADER: &[&str] = &[
    "spec", "series", "horizon", "coef", "se", "lo68", "hi68", "lo90", "hi90", "nobs", "bandwidth",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonEstimate {
    pub horizon: usize,
    pub coef: f64,
    pub se: f64,
    /// Positive-weight rows.
    pub n_obs: usize,
    /// Newey-West lag truncation.
    pub bandwidth: usize,
    /// Positive-weight rows with a nonzero shock.
    pub nonzero_shock_obs: usize,
}

/// Two-sided normal band at `level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub level: f64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseResponse {
    pub spec: String,
    pub series: String,
    /// Factor already applied to `coef` and `se`.
    pub scale: f64,
    pub estimates: Vec<HorizonEstimate>,
    pub bands: Vec<Band>,
}

impl ImpulseResponse {
    pub(crate) fn new(spec: &str, series: &str, scale: f64, raw: Vec<HorizonEstimate>) -> Self {
        let estimates = raw
            .into_iter()
            .map(|e| HorizonEstimate {
                coef: e.coef * scale,
                se: e.se * scale.abs(),
                ..e
            })
            .collect();
        confidence_bands(
            &Self {
                spec: spec.into(),
                series: series.into(),
                scale,
                estimates,
                bands: Vec::new(),
            },
            &[0.68, 0.90],
        )
    }

    pub fn coefs(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.coef).collect()
    }

    pub fn ses(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.se).collect()
    }

    pub fn band(&self, level: f64) -> Option<&Band> {
        self.bands.iter().find(|b| (b.level - level).abs() < 1e-12)
    }
}

/// Adds `coef ± z * se` bands with `z` the two-sided normal critical value.
pub fn confidence_bands(ir: &ImpulseResponse, levels: &[f64]) -> ImpulseResponse {
    let normal = Normal::standard();
    let mut out = ir.clone();
    for &level in levels {
        assert!(level > 0.0 && level < 1.0, "band level must lie in (0, 1)");
        let z = normal.inverse_cdf(0.5 + level / 2.0);
        let band = Band {
            level,
            lo: ir.estimates.iter().map(|e| e.coef - z * e.se).collect(),
            hi: ir.estimates.iter().map(|e| e.coef + z * e.se).collect(),
        };
        out.bands.retain(|b| (b.level - level).abs() >= 1e-12);
        out.bands.push(band);
    }
    out.bands.sort_by(|a, b| a.level.total_cmp(&b.level));
    out
}

/// One parsed line of an IRF file.
#[derive(Debug, Clone, PartialEq)]
pub struct IrfRow {
    pub spec: String,
    pub series: String,
    pub horizon: usize,
    pub coef: f64,
    pub se: f64,
    pub lo68: f64,
    pub hi68: f64,
    pub lo90: f64,
    pub hi90: f64,
    pub nobs: usize,
    pub bandwidth: usize,
}

pub fn write_irf_csv(irs: &[ImpulseResponse]) -> String {
    let mut out = IRF_HEADER.join(",");
    out.push('\n');
    for ir in irs {
        let ir = confidence_bands(ir, &[0.68, 0.90]);
        let (b68, b90) = (ir.band(0.68).expect("band"), ir.band(0.90).expect("band"));
        for (k, e) in ir.estimates.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                csvio::csv_field(&ir.spec),
                csvio::csv_field(&ir.series),
                e.horizon,
                e.coef,
                e.se,
                b68.lo[k],
                b68.hi[k],
                b90.lo[k],
                b90.hi[k],
                e.n_obs,
                e.bandwidth
            ));
        }
    }
    out
}

pub fn parse_irf_csv(text: &str, label: &str) -> Result<Vec<IrfRow>> {
    let mut rows = Vec::new();
    for (line, rec) in csvio::records(text, label, IRF_HEADER)? {
        let num = |i: usize| -> Result<f64> {
            let v: f64 = csvio::field(&rec, i, IRF_HEADER[i], label, line)?;
            csvio::finite(v, IRF_HEADER[i], label, line)
        };
        let row = IrfRow {
            spec: rec.get(0).unwrap_or("").into(),
            series: rec.get(1).unwrap_or("").into(),
            horizon: csvio::field(&rec, 2, "horizon", label, line)?,
            coef: num(3)?,
            se: num(4)?,
            lo68: num(5)?,
            hi68: num(6)?,
            lo90: num(7)?,
            hi90: num(8)?,
            nobs: csvio::field(&rec, 9, "nobs", label, line)?,
            bandwidth: csvio::field(&rec, 10, "bandwidth", label, line)?,
        };
        if !(row.lo90 <= row.lo68 && row.lo68 <= row.hi68 && row.hi68 <= row.hi90) {
            return Err(Error::Value {
                path: label.into(),
                line,
                msg: "bands are not nested".into(),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ir(ses: &[f64]) -> ImpulseResponse {
        let raw = ses
            .iter()
            .enumerate()
            .map(|(h, se)| HorizonEstimate {
                horizon: h,
                coef: h as f64 * 0.1,
                se: *se,
                n_obs: 100 - h,
                bandwidth: 3,
                nonzero_shock_obs: 90,
            })
            .collect();
        ImpulseResponse::new("s", "y", 1.0, raw)
    }

    #[test]
    fn zero_se_collapses_band() {
        let r = ir(&[0.0]);
        let b = r.band(0.90).unwrap();
        assert_eq!((b.lo[0], b.hi[0]), (0.0, 0.0));
    }

    #[test]
    fn half_width_ratio_is_quantile_ratio() {
        let r = ir(&[1.0, 2.5]);
        let (b68, b90) = (r.band(0.68).unwrap(), r.band(0.90).unwrap());
        for k in 0..2 {
            let ratio = (b90.hi[k] - b90.lo[k]) / (b68.hi[k] - b68.lo[k]);
            assert!((ratio - 1.644854 / 0.994458).abs() < 1e-5, "{ratio}");
        }
    }

    #[test]
    fn bands_monotone_in_level() {
        let r = confidence_bands(&ir(&[0.3, 1.0, 0.7]), &[0.5, 0.68, 0.8, 0.9, 0.95]);
        for w in r.bands.windows(2) {
            for k in 0..3 {
                assert!(w[1].lo[k] <= w[0].lo[k] && w[0].hi[k] <= w[1].hi[k]);
            }
        }
    }

    #[test]
    fn csv_roundtrip() {
        let r = ir(&[0.5, 0.25]);
        let text = write_irf_csv(&[r.clone()]);
        assert!(text.starts_with("spec,series,horizon,coef,se,lo68,hi68,lo90,hi90,nobs,bandwidth\n"));
        let rows = parse_irf_csv(&text, "irf").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].coef, r.estimates[1].coef);
        assert_eq!(rows[1].nobs, 99);
    }
}
