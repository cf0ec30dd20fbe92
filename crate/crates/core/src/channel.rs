//! Link budget and channel realizations.
//!
//! A user's channel is `sqrt(g) * W`, where `g` is the linear path-loss gain
//! of its distance and `W` has i.i.d. unit-variance circularly-symmetric
//! complex Gaussian entries. Each matrix is a pure function of
//! `(seed, trial_index, user)`.

use crate::config::{SnrAxis, SystemConfig};
use crate::linalg::CMat;
use crate::rng::{complex_normal, Domain, StreamKey};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("distance must be positive, got {0} km")]
    Distance(f64),
}

/// `128.1 + 37.6 log10(r)` dB with `r` in km.
pub fn pathloss_db(distance_km: f64) -> Result<f64, ChannelError> {
    if !(distance_km > 0.0 && distance_km.is_finite()) {
        return Err(ChannelError::Distance(distance_km));
    }
    Ok(128.1 + 37.6 * distance_km.log10())
}

/// Linear power gain `10^(-PL/10)`.
pub fn pathloss_gain(distance_km: f64) -> Result<f64, ChannelError> {
    pathloss_db(distance_km).map(|pl| db_to_linear(-pl))
}

/// Receiver noise power `N0 + 10 log10(B)` in dBm.
pub fn noise_power_dbm(cfg: &SystemConfig) -> f64 {
    cfg.noise_density_dbm_hz + 10.0 * cfg.bandwidth_hz.log10()
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub noise_power_dbm: f64,
    pub pathloss_db: Vec<f64>,
    pub tx_power_dbm: f64,
}

impl LinkBudget {
    /// Total transmit power over noise power, linear.
    pub fn tx_to_noise(&self) -> f64 {
        db_to_linear(self.tx_power_dbm - self.noise_power_dbm)
    }

    /// Mean received SNR (dB) of user `u` if it got the whole transmit power
    /// on a single antenna path.
    pub fn received_snr_db(&self, u: usize) -> f64 {
        self.tx_power_dbm - self.pathloss_db[u] - self.noise_power_dbm
    }
}

/// Link budget at one point of the SNR grid.
pub fn link_budget(cfg: &SystemConfig, snr_db: f64) -> Result<LinkBudget, ChannelError> {
    let noise = noise_power_dbm(cfg);
    let tx_power_dbm = match cfg.snr_axis {
        SnrAxis::TxPowerDbm => snr_db,
        SnrAxis::TransmitSnr => snr_db + noise,
    };
    let pathloss_db = cfg
        .distances_km
        .iter()
        .map(|&d| pathloss_db(d))
        .collect::<Result<_, _>>()?;
    Ok(LinkBudget {
        noise_power_dbm: noise,
        pathloss_db,
        tx_power_dbm,
    })
}

/// One draw of every user's `n_rx x n_tx` channel matrix, path loss included.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub per_user: Vec<CMat>,
    pub trial_index: u64,
}

impl ChannelRealization {
    pub fn n_users(&self) -> usize {
        self.per_user.len()
    }

    pub fn user(&self, u: usize) -> &CMat {
        &self.per_user[u]
    }

    /// Column `antenna` of user `u`'s matrix.
    pub fn column(&self, u: usize, antenna: usize) -> &[Complex64] {
        let m = &self.per_user[u];
        let n = m.nrows();
        &m.as_slice()[antenna * n..(antenna + 1) * n]
    }

    /// Every matrix multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        ChannelRealization {
            per_user: self.per_user.iter().map(|m| m * Complex64::from(s)).collect(),
            trial_index: self.trial_index,
        }
    }
}

/// Unit-variance Rayleigh fading matrix for one user, column-major draw order.
pub fn fading_matrix(seed: u64, trial_index: u64, user: usize, n_rx: usize, n_tx: usize) -> CMat {
    let mut rng = StreamKey::new(seed, Domain::Fading, &[trial_index, user as u64]).rng();
    let mut m = CMat::zeros(n_rx, n_tx);
    for z in m.as_mut_slice() {
        *z = complex_normal(&mut rng);
    }
    m
}

pub fn gen_channel(cfg: &SystemConfig, trial_index: u64) -> ChannelRealization {
    let per_user = cfg
        .distances_km
        .iter()
        .enumerate()
        .map(|(u, &d)| {
            let amp = pathloss_gain(d).expect("validated distance").sqrt();
            fading_matrix(cfg.seed, trial_index, u, cfg.n_rx, cfg.n_tx) * Complex64::from(amp)
        })
        .collect();
    ChannelRealization { per_user, trial_index }
}
