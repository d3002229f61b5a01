use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::VolumeRule;
use crate::lp::{LpSpec, ShockVariant};
use crate::shockgen::IndicatorMode;
use crate::synth::DgpConfig;
use crate::timeline::ElectionCycle;

/// Input files, relative to the config file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub market: Option<PathBuf>,
    pub assets: Option<PathBuf>,
    pub vintages: Option<PathBuf>,
    pub releases: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub employment: Option<PathBuf>,
    pub monthly_controls: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShockSection {
    pub yield_series: String,
    pub sp500_series: String,
    /// Employment, CPI and industrial production ids in the vintage file.
    pub macro_series: [String; 3],
    pub indicator_mode: IndicatorMode,
    pub volume_rule: VolumeRule,
    pub weighted_first_stage: bool,
    /// Cycles left out of the estimation entirely.
    pub drop_cycles: Vec<i32>,
    /// Rows in the largest-shock table.
    pub top_shocks: usize,
}

impl Default for ShockSection {
    fn default() -> Self {
        Self {
            yield_series: "yield2y".into(),
            sp500_series: "sp500".into(),
            macro_series: ["emp".into(), "cpi".into(), "ind".into()],
            indicator_mode: IndicatorMode::ReleaseDay,
            volume_rule: VolumeRule::BothParties,
            weighted_first_stage: false,
            drop_cycles: Vec::new(),
            top_shocks: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrfSection {
    /// Asset series ids in the asset file (log-transformed before use).
    pub series: Vec<String>,
    pub variants: Vec<ShockVariant>,
    pub narrative_window: usize,
    /// Report responses per 10pp impact instead of per pp of shock.
    pub normalize: bool,
    /// Also project the probability itself.
    pub probability: bool,
    pub spec: LpSpec,
}

impl Default for IrfSection {
    fn default() -> Self {
        Self {
            series: Vec::new(),
            variants: vec![ShockVariant::Baseline],
            narrative_window: 5,
            normalize: true,
            probability: true,
            spec: LpSpec::daily("baseline"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonthlySection {
    /// Industry keys in the employment file.
    pub industries: Vec<String>,
    /// Series ids in the monthly controls file, used as given.
    pub controls: Vec<String>,
    /// Fields left out keep their monthly defaults.
    #[serde(deserialize_with = "monthly_spec")]
    pub spec: LpSpec,
}

fn monthly_spec<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<LpSpec, D::Error> {
    use serde::de::Error as _;
    let patch = toml::Table::deserialize(d)?;
    let mut base = toml::Table::try_from(LpSpec::monthly("monthly")).map_err(D::Error::custom)?;
    base.extend(patch);
    base.try_into().map_err(D::Error::custom)
}

impl Default for MonthlySection {
    fn default() -> Self {
        Self {
            industries: Vec::new(),
            controls: Vec::new(),
            spec: LpSpec::monthly("monthly"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    pub hac_problems: usize,
    pub wls_problems: usize,
    pub coverage_reps: usize,
    pub coverage_horizons: usize,
    /// Inclusive bounds on the 90% coverage rate at every horizon.
    pub coverage_bounds: (f64, f64),
    pub seed: u64,
    /// Fault injection: evaluate the HAC estimator one lag above the oracle.
    pub bandwidth_off_by_one: bool,
    pub dgp: DgpConfig,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            hac_problems: 50,
            wls_problems: 50,
            coverage_reps: 200,
            coverage_horizons: 20,
            coverage_bounds: (0.80, 0.97),
            seed: 11,
            bandwidth_off_by_one: false,
            dgp: DgpConfig::default(),
        }
    }
}

/// Everything a run reads from its config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub data: DataPaths,
    #[serde(default)]
    pub cycles: Vec<ElectionCycle>,
    #[serde(default)]
    pub shocks: ShockSection,
    pub irf: Option<IrfSection>,
    pub monthly: Option<MonthlySection>,
    pub simulate: Option<DgpConfig>,
    pub validate: Option<ValidateSection>,
}

/// A parsed config with its location and fingerprint.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    /// SHA-256 of the config bytes and any seed override.
    pub hash: String,
}

impl LoadedConfig {
    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Error::InvalidConfig(format!("{} is not UTF-8", path.display())))?;
        if text.trim().is_empty() {
            return Err(Error::InvalidConfig(format!("{} is empty", path.display())));
        }
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        for c in &config.cycles {
            c.validate()?;
        }
        let mut h = Sha256::new();
        h.update(&bytes);
        if let Some(s) = seed {
            h.update(format!("\nseed={s}").as_bytes());
        }
        let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            config,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            hash,
        })
    }

    /// Resolves a data path, failing when it was not configured or is absent.
    pub fn path(&self, p: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
        let p = p
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig(format!("data.{what} is not set")))?;
        let full = if p.is_absolute() { p.clone() } else { self.base_dir.join(p) };
        if !full.exists() {
            return Err(Error::InvalidConfig(format!("data.{what}: {} does not exist", full.display())));
        }
        Ok(full)
    }

    /// Cycles minus the configured drops.
    pub fn cycles(&self) -> Vec<ElectionCycle> {
        self.config
            .cycles
            .iter()
            .filter(|c| !self.config.shocks.drop_cycles.contains(&c.id))
            .cloned()
            .collect()
    }
}
