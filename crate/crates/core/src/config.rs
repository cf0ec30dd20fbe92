//! Experiment description shared by every other module.
//!
//! A configuration file is a flat TOML document whose keys are exactly the
//! field names of [`SystemConfig`]. The first block of fields is required;
//! the simulation knobs after it fall back to their defaults when absent.
//!
//! ```toml
//! n_tx = 8
//! n_rx = 8
//! n_pairs = 4
//! qam_order = 64
//! bandwidth_hz = 4.32e6
//! noise_density_dbm_hz = -169.0
//! distances_km = [0.15, 0.1, 0.15, 0.1, 0.15, 0.1, 0.15, 0.1]
//! snr_grid_db = [-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0, 50.0]
//! n_trials = 10000
//! seed = 2017
//! noma_power_split = 0.8
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("cannot read config `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// How the index user scores candidate antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MrcMetric {
    /// `|h_i^H y|`, the literal largest-magnitude rule.
    #[default]
    Raw,
    /// `|h_i^H y| / ||h_i||`.
    Normalized,
}

/// Which finite-alphabet rate decomposition the SM pair uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSplit {
    /// `I(A;Y1)` and `I(X;Y2)`, the other input marginalized at each user.
    #[default]
    Marginal,
    /// `I(A;Y1)` and `I(X;Y2|A)`.
    Chain,
}

/// Treatment of inter-group interference at SM receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceModel {
    /// Gaussian approximation with matched covariance, removed by whitening.
    #[default]
    Whiten,
    /// Exact likelihood over the interferers' discrete alphabet (small systems only).
    Exact,
    /// Interference assumed perfectly cancelled at the transmitter.
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    /// Greedy direction-similarity matching on every channel realization.
    #[default]
    PerRealization,
    /// Users `2k` and `2k+1` always form pair `k`; roles still follow channel gain.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMode {
    /// Pair `k` gets the contiguous antennas `k*L .. (k+1)*L`.
    #[default]
    Fixed,
    Greedy,
    Exhaustive,
}

/// Meaning of the values in `snr_grid_db`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrAxis {
    /// Total base-station transmit power in dBm.
    #[default]
    TxPowerDbm,
    /// Total transmit power over receiver noise power, before path loss, in dB.
    TransmitSnr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Total base-station antennas.
    pub n_tx: usize,
    /// Antennas per user.
    pub n_rx: usize,
    /// Number of user pairs `K`; there are `2K` users.
    pub n_pairs: usize,
    /// QAM constellation size `M`.
    pub qam_order: usize,
    pub bandwidth_hz: f64,
    pub noise_density_dbm_hz: f64,
    /// Per-user distances; users `2k` and `2k+1` are the nominal pair `k`.
    pub distances_km: Vec<f64>,
    pub snr_grid_db: Vec<f64>,
    /// Channel realizations per SNR point.
    pub n_trials: usize,
    pub seed: u64,
    /// Fraction of a CMN cluster's power given to its weak user.
    pub noma_power_split: f64,

    /// Noise samples per mutual-information estimate.
    #[serde(default = "default_mi_samples")]
    pub mi_samples: usize,
    /// SM channel uses per pair and trial fed through the detectors for BER.
    #[serde(default = "default_ber_uses")]
    pub ber_uses_per_trial: usize,
    #[serde(default)]
    pub mrc_metric: MrcMetric,
    #[serde(default)]
    pub rate_split: RateSplit,
    #[serde(default)]
    pub interference: InterferenceModel,
    #[serde(default)]
    pub pairing: PairingMode,
    #[serde(default)]
    pub allocation: AllocationMode,
    #[serde(default)]
    pub snr_axis: SnrAxis,
}

fn default_mi_samples() -> usize {
    200
}

fn default_ber_uses() -> usize {
    1
}

/// Keys that must be present in every config document.
pub const REQUIRED_KEYS: [&str; 11] = [
    "n_tx",
    "n_rx",
    "n_pairs",
    "qam_order",
    "bandwidth_hz",
    "noise_density_dbm_hz",
    "distances_km",
    "snr_grid_db",
    "n_trials",
    "seed",
    "noma_power_split",
];

pub const SUPPORTED_QAM_ORDERS: [usize; 5] = [2, 4, 16, 64, 256];

/// Trial budget of the full-size profile.
pub const REFERENCE_TRIALS: usize = 100_000;
/// Trial budget of the desk-scale profile.
pub const DESK_TRIALS: usize = 10_000;

impl SystemConfig {
    /// Antennas per group, `L = n_tx / n_pairs`.
    pub fn group_size(&self) -> usize {
        self.n_tx / self.n_pairs
    }

    pub fn n_users(&self) -> usize {
        2 * self.n_pairs
    }

    /// Bits carried by one SM channel use of one pair.
    pub fn bits_per_pair_use(&self) -> usize {
        log2_exact(self.group_size()) + log2_exact(self.qam_order)
    }

    /// Bits carried by one SM channel use of the whole system.
    pub fn bits_per_channel_use(&self) -> usize {
        self.n_pairs * self.bits_per_pair_use()
    }

    /// The reference setup: 8 antennas, 4 pairs of 8-antenna users, 64-QAM,
    /// 4.32 MHz at -169 dBm/Hz, index users at 0.15 km and symbol users at
    /// 0.1 km, 100 000 realizations per point.
    pub fn reference() -> Self {
        let n_pairs = 4;
        SystemConfig {
            n_tx: 8,
            n_rx: 8,
            n_pairs,
            qam_order: 64,
            bandwidth_hz: 4.32e6,
            noise_density_dbm_hz: -169.0,
            distances_km: [0.15, 0.1].repeat(n_pairs),
            snr_grid_db: (-2..=5).map(|k| 10.0 * k as f64).collect(),
            n_trials: REFERENCE_TRIALS,
            seed: 2017,
            noma_power_split: 0.8,
            mi_samples: default_mi_samples(),
            ber_uses_per_trial: default_ber_uses(),
            mrc_metric: MrcMetric::default(),
            rate_split: RateSplit::default(),
            interference: InterferenceModel::default(),
            pairing: PairingMode::default(),
            allocation: AllocationMode::default(),
            snr_axis: SnrAxis::default(),
        }
    }

    /// [`SystemConfig::reference`] with the desk-scale trial budget.
    pub fn desk() -> Self {
        SystemConfig {
            n_trials: DESK_TRIALS,
            ..Self::reference()
        }
    }

    /// Same geometry with a different number of pairs (index users stay at
    /// 0.15 km, symbol users at 0.1 km).
    pub fn with_pairs(mut self, n_pairs: usize) -> Self {
        self.n_pairs = n_pairs;
        self.distances_km = [0.15, 0.1].repeat(n_pairs);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        if self.n_tx == 0 || self.n_rx == 0 || self.n_pairs == 0 {
            return invalid("n_tx, n_rx and n_pairs must be positive");
        }
        if !self.n_tx.is_multiple_of(self.n_pairs) {
            return invalid("n_tx mod n_pairs != 0");
        }
        if !self.group_size().is_power_of_two() {
            return invalid("n_tx / n_pairs must be a power of two");
        }
        if !self.qam_order.is_power_of_two() {
            return invalid("qam_order must be a power of two");
        }
        if !SUPPORTED_QAM_ORDERS.contains(&self.qam_order) {
            return invalid("qam_order must be one of 2, 4, 16, 64, 256");
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return invalid("bandwidth_hz must be positive");
        }
        if !self.noise_density_dbm_hz.is_finite() {
            return invalid("noise_density_dbm_hz must be finite");
        }
        if self.distances_km.len() != self.n_users() {
            return invalid("distances_km must have exactly 2 * n_pairs entries");
        }
        if !self.distances_km.iter().all(|d| d.is_finite() && *d > 0.0) {
            return invalid("distances_km entries must be positive");
        }
        if !self.snr_grid_db.iter().all(|s| s.is_finite()) {
            return invalid("snr_grid_db entries must be finite");
        }
        if !self.snr_grid_db.windows(2).all(|w| w[0] < w[1]) {
            return invalid("snr_grid_db must be strictly increasing");
        }
        if self.n_trials == 0 {
            return invalid("n_trials must be at least 1");
        }
        if !(self.noma_power_split > 0.0 && self.noma_power_split < 1.0) {
            return invalid("power split must be in open interval (0, 1)");
        }
        if self.seed > i64::MAX as u64 {
            return invalid("seed must fit in a signed 64-bit TOML integer");
        }
        if self.mi_samples == 0 {
            return invalid("mi_samples must be at least 1");
        }
        Ok(())
    }

    /// Canonical TOML rendering; [`load_config`] accepts it back unchanged.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("SystemConfig always serializes")
    }

    /// Short hex digest of the canonical rendering, stamped on every output row.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_toml().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn log2_exact(n: usize) -> usize {
    debug_assert!(n.is_power_of_two());
    n.trailing_zeros() as usize
}

/// Parses and validates a config document.
pub fn load_config(source: &str) -> Result<SystemConfig, ConfigError> {
    load_config_with_overrides(source, &[])
}

/// Like [`load_config`], with `(key, value)` pairs replacing document
/// entries before validation. Values use TOML literal syntax; anything that
/// does not parse as a literal is taken as a bare string.
pub fn load_config_with_overrides(source: &str, overrides: &[(String, String)]) -> Result<SystemConfig, ConfigError> {
    let mut table: toml::Table = source
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    for (key, raw) in overrides {
        table.insert(key.clone(), parse_value(raw));
    }
    if let Some(key) = REQUIRED_KEYS.iter().find(|k| !table.contains_key(**k)) {
        return Err(ConfigError::MissingField(key.to_string()));
    }
    let cfg: SystemConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(path: &std::path::Path, overrides: &[(String, String)]) -> Result<SystemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config_with_overrides(&text, overrides)
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// The reference configuration. Equivalent to [`SystemConfig::reference`].
pub fn default_reference_config() -> SystemConfig {
    SystemConfig::reference()
}
