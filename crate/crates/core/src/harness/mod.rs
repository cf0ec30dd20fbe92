//! Monte Carlo sweep driver, BER simulation and CSV output.
//!
//! Trials are independent work items fanned out over a rayon pool; every
//! random draw is keyed by `(seed, trial, SNR point)` and aggregation runs
//! in trial order, so results are bit-identical for any worker count.

mod ber;
mod csv_io;

pub use ber::{run_ber, sm_channel_use, BerCounts, BerResult};
pub use csv_io::{format_sig9, read_csv, read_csv_from, write_csv, write_csv_to, CSV_HEADER};

use crate::baseline::{cluster_rates, form_clusters, BaselineError};
use crate::channel::{gen_channel, link_budget, ChannelError};
use crate::config::{ConfigError, SystemConfig};
use crate::modem::make_constellation;
use crate::rates::{group_amplitude, sm_layout, sm_trial_rates, ErgodicRates, RatesError};
use crate::rng::{Domain, StreamKey};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Environment variable selecting the number of worker threads.
pub const WORKERS_ENV: &str = "SMNOMA_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Rates(#[from] RatesError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(String),
    #[error("bit count {n_bits} is not a positive multiple of the per-channel-use load {per_use}")]
    BitCount { n_bits: usize, per_use: usize },
    #[error("unknown scheme `{0}` (expected smn or cmn)")]
    Scheme(String),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// NOMA pairs carried by spatial modulation on antenna groups.
    Smn,
    /// Conventional multi-antenna NOMA.
    Cmn,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Smn => "SMN",
            Scheme::Cmn => "CMN",
        })
    }
}

impl FromStr for Scheme {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "smn" => Ok(Scheme::Smn),
            "cmn" => Ok(Scheme::Cmn),
            _ => Err(HarnessError::Scheme(s.to_string())),
        }
    }
}

/// Parses a comma-separated scheme list such as `smn,cmn`.
pub fn parse_schemes(s: &str) -> Result<Vec<Scheme>, HarnessError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub sum_rate: f64,
    pub sum_rate_std_error: f64,
    pub worst_rate: f64,
    pub per_user_rates: Vec<f64>,
    /// `None` for CMN (Gaussian inputs carry no bits).
    pub index_ber: Option<f64>,
    pub symbol_ber: Option<f64>,
    pub n_trials: usize,
    pub seed: u64,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, scheme: Scheme, snr_db: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.snr_db == snr_db)
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.parse().ok().filter(|&n| n > 0)
}

/// Runs `f` on a pool with `workers` threads (rayon's default when `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Sweeps every SNR point for every requested scheme. Rows are ordered by
/// scheme (in the order given) then SNR. Worker count comes from
/// [`WORKERS_ENV`].
pub fn run_sweep(cfg: &SystemConfig, schemes: &[Scheme]) -> Result<SweepResult, HarnessError> {
    run_sweep_with_workers(cfg, schemes, workers_from_env())
}

pub fn run_sweep_with_workers(
    cfg: &SystemConfig,
    schemes: &[Scheme],
    workers: Option<usize>,
) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    with_workers(workers, || sweep_in_pool(cfg, schemes))?
}

/// Per-trial outcome of one scheme across the SNR grid.
struct TrialOutcome {
    rates: Vec<Vec<f64>>,
    ber: Vec<BerCounts>,
}

fn smn_trial(cfg: &SystemConfig, trial: u64) -> Result<TrialOutcome, HarnessError> {
    let constellation = make_constellation(cfg.qam_order).map_err(RatesError::from)?;
    let channels = gen_channel(cfg, trial);
    let mut rates = Vec::with_capacity(cfg.snr_grid_db.len());
    let mut ber = Vec::with_capacity(cfg.snr_grid_db.len());
    for &snr in &cfg.snr_grid_db {
        rates.push(sm_trial_rates(cfg, &channels, snr, &constellation)?);
        let amp = group_amplitude(cfg, snr)?;
        let layout = sm_layout(cfg, &channels, amp * amp)?;
        let mut payload = StreamKey::new(cfg.seed, Domain::BerPayload, &[trial, snr.to_bits()]).rng();
        let mut noise = StreamKey::new(cfg.seed, Domain::BerNoise, &[trial, snr.to_bits()]).rng();
        let mut counts = BerCounts::default();
        for _ in 0..cfg.ber_uses_per_trial {
            counts += sm_channel_use(
                cfg,
                &channels,
                &layout,
                &constellation,
                amp,
                1.0,
                &mut payload,
                &mut noise,
            )?;
        }
        ber.push(counts);
    }
    Ok(TrialOutcome { rates, ber })
}

fn cmn_trial(cfg: &SystemConfig, trial: u64) -> Result<TrialOutcome, HarnessError> {
    let channels = gen_channel(cfg, trial);
    let clusters = form_clusters(&channels, cfg.pairing, cfg.noma_power_split)?;
    let rates = cfg
        .snr_grid_db
        .iter()
        .map(|&snr| {
            let p = link_budget(cfg, snr)?.tx_to_noise() / clusters.len() as f64;
            Ok(cluster_rates(&channels, &clusters, &vec![p; clusters.len()]).per_user_rate)
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(TrialOutcome { rates, ber: Vec::new() })
}

fn sweep_in_pool(cfg: &SystemConfig, schemes: &[Scheme]) -> Result<SweepResult, HarnessError> {
    let digest = cfg.digest();
    let mut rows = Vec::with_capacity(schemes.len() * cfg.snr_grid_db.len());
    for &scheme in schemes {
        let outcomes = (0..cfg.n_trials as u64)
            .into_par_iter()
            .map(|t| match scheme {
                Scheme::Smn => smn_trial(cfg, t),
                Scheme::Cmn => cmn_trial(cfg, t),
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (s, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
            let per_trial: Vec<Vec<f64>> = outcomes.iter().map(|o| o.rates[s].clone()).collect();
            let erg = ErgodicRates::from_trials(&per_trial);
            let (index_ber, symbol_ber) = match scheme {
                Scheme::Smn => {
                    let total = outcomes
                        .iter()
                        .map(|o| o.ber[s])
                        .fold(BerCounts::default(), |a, b| a + b);
                    (Some(total.index_ber()), Some(total.symbol_ber()))
                }
                Scheme::Cmn => (None, None),
            };
            rows.push(SweepRow {
                scheme,
                snr_db,
                sum_rate: erg.sum_rate,
                sum_rate_std_error: erg.sum_rate_std_error,
                worst_rate: erg.worst_rate,
                per_user_rates: erg.per_user_rate,
                index_ber,
                symbol_ber,
                n_trials: cfg.n_trials,
                seed: cfg.seed,
                config_digest: digest.clone(),
            });
        }
    }
    Ok(SweepResult { rows })
}
