//! Conventional multi-antenna NOMA: two-user clusters sharing a
//! zero-forcing beam, superposition coding, and SIC at the strong user.
//!
//! Users have `n_rx` antennas. Each user collapses its matrix to a scalar
//! channel by receive combining: the strong user with its dominant left
//! singular vector (the ZF beams are designed on the resulting effective
//! channels, so it sees no inter-cluster interference), the weak user with
//! MRC on its cluster beam. The weak user keeps whatever leakage the other
//! clusters' beams leave behind, and that leakage counts as noise.
//!
//! All powers are expressed relative to the receiver noise power.

use crate::channel::ChannelRealization;
use crate::config::{PairingMode, SystemConfig};
use crate::linalg::{dominant_singular, CMat, CVec};
use crate::pairing::{fixed_pairs, pair_users, PairingError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("singular channel set: effective channels are linearly dependent")]
    SingularChannelSet,
    #[error("{clusters} clusters cannot be zero-forced with {n_tx} antennas")]
    TooManyClusters { clusters: usize, n_tx: usize },
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub strong_user: usize,
    pub weak_user: usize,
    /// Unit-norm transmit beam, length `n_tx`.
    pub beam: CVec,
    /// Fraction of the cluster power given to the weak user.
    pub power_split: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NomaRates {
    /// bits/s/Hz, indexed by user.
    pub per_user_rate: Vec<f64>,
    pub sum_rate: f64,
    /// Inter-cluster leakage power seen by each user, relative to noise.
    pub leakage: Vec<f64>,
}

/// Scalar channel of one user after dominant-mode receive combining.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    /// `sigma_max^2` of the user's matrix.
    pub gain: f64,
    /// `e = H^H u`; the combined received scalar is `e^H w`.
    pub vector: CVec,
}

pub fn effective_channel(h: &CMat) -> EffectiveChannel {
    let (gain, u, _) = dominant_singular(h);
    EffectiveChannel {
        gain,
        vector: h.adjoint() * u,
    }
}

/// Unit-norm beams with `e_j^H w_k = 0` for every `j != k`.
pub fn zf_beams(effective: &[CVec]) -> Result<Vec<CVec>, BaselineError> {
    let k = effective.len();
    let n_tx = effective.first().map_or(0, |e| e.len());
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > n_tx {
        return Err(BaselineError::TooManyClusters { clusters: k, n_tx });
    }
    let g = CMat::from_columns(effective);
    let gram = g.adjoint() * &g;
    let chol = gram.cholesky().ok_or(BaselineError::SingularChannelSet)?;
    let diag = chol.l_dirty().diagonal();
    let dmax = diag.iter().map(|d| d.re).fold(0.0f64, f64::max);
    let dmin = diag.iter().map(|d| d.re).fold(f64::INFINITY, f64::min);
    if dmin.is_nan() || dmin <= 1e-12 * dmax {
        return Err(BaselineError::SingularChannelSet);
    }
    let w = &g * chol.inverse();
    (0..k)
        .map(|c| {
            let col = w.column(c).into_owned();
            let n = col.norm();
            if n.is_finite() && n > 0.0 {
                Ok(col.unscale(n))
            } else {
                Err(BaselineError::SingularChannelSet)
            }
        })
        .collect()
}

/// Pairs users (same rule as the SM system), orders each cluster by
/// effective gain and designs ZF beams on the strong users.
pub fn form_clusters(
    channels: &ChannelRealization,
    pairing: PairingMode,
    power_split: f64,
) -> Result<Vec<Cluster>, BaselineError> {
    let pairs = match pairing {
        PairingMode::PerRealization => pair_users(channels)?,
        PairingMode::Fixed => fixed_pairs(channels)?,
    };
    let eff: Vec<EffectiveChannel> = channels.per_user.iter().map(effective_channel).collect();
    let members: Vec<(usize, usize)> = pairs
        .iter()
        .map(|p| {
            let (a, b) = (p.index_user.min(p.symbol_user), p.index_user.max(p.symbol_user));
            if eff[b].gain > eff[a].gain {
                (b, a)
            } else {
                (a, b)
            }
        })
        .collect();
    let strong: Vec<CVec> = members.iter().map(|&(s, _)| eff[s].vector.clone()).collect();
    let beams = zf_beams(&strong)?;
    Ok(members
        .into_iter()
        .zip(beams)
        .map(|((strong_user, weak_user), beam)| Cluster {
            strong_user,
            weak_user,
            beam,
            power_split,
        })
        .collect())
}

/// Two-user SIC rates (bits/s/Hz) under Gaussian inputs and perfect SIC.
///
/// Returns `(strong_rate, weak_rate)`.
pub fn sic_rates(power_split: f64, g_strong: f64, g_weak: f64, total_power: f64, noise_power: f64) -> (f64, f64) {
    let beta = power_split;
    // Divided through by P*g_w so rounding can never push the result past
    // `weak_rate_ceiling`.
    let x = total_power * g_weak;
    let weak = if x > 0.0 {
        (1.0 + beta / ((1.0 - beta) + noise_power / x)).log2()
    } else {
        0.0
    };
    let strong = (1.0 + (1.0 - beta) * total_power * g_strong / noise_power).log2();
    (strong, weak)
}

/// Interference-limited ceiling of the weak user's rate.
pub fn weak_rate_ceiling(power_split: f64) -> f64 {
    (1.0 + power_split / (1.0 - power_split)).log2()
}

/// Per-user rates for given clusters and per-cluster powers (noise = 1).
pub fn cluster_rates(channels: &ChannelRealization, clusters: &[Cluster], powers: &[f64]) -> NomaRates {
    let n = channels.n_users();
    let mut per_user_rate = vec![0.0; n];
    let mut leakage = vec![0.0; n];
    for (k, cl) in clusters.iter().enumerate() {
        let hs = channels.user(cl.strong_user);
        let es = effective_channel(hs);
        let g_strong = es.vector.dotc(&cl.beam).norm_sqr();

        let hw = channels.user(cl.weak_user);
        let hw_w = hw * &cl.beam;
        let g_weak = hw_w.norm_squared();
        let leak: f64 = if g_weak > 0.0 {
            let comb = hw_w.unscale(g_weak.sqrt());
            clusters
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(j, other)| powers[j] * comb.dotc(&(hw * &other.beam)).norm_sqr())
                .sum()
        } else {
            0.0
        };
        let (strong, _) = sic_rates(cl.power_split, g_strong, g_weak, powers[k], 1.0);
        let (_, weak) = sic_rates(cl.power_split, g_strong, g_weak, powers[k], 1.0 + leak);
        per_user_rate[cl.strong_user] = strong;
        per_user_rate[cl.weak_user] = weak;
        leakage[cl.weak_user] = leak;
    }
    let sum_rate = per_user_rate.iter().sum();
    NomaRates {
        per_user_rate,
        sum_rate,
        leakage,
    }
}

/// CMN rates for one realization with equal power per cluster.
///
/// `tx_to_noise` is total transmit power over noise power (linear).
pub fn conventional_sum_rate(
    channels: &ChannelRealization,
    cfg: &SystemConfig,
    tx_to_noise: f64,
) -> Result<NomaRates, BaselineError> {
    let clusters = form_clusters(channels, cfg.pairing, cfg.noma_power_split)?;
    let p = tx_to_noise / clusters.len() as f64;
    Ok(cluster_rates(channels, &clusters, &vec![p; clusters.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sic_spot_values() {
        let (s, w) = sic_rates(0.8, 4.0, 1.0, 1.0, 1.0);
        assert!((w - (1.0f64 + 0.8 / 1.2).log2()).abs() < 1e-15);
        assert!((s - 1.8f64.log2()).abs() < 1e-15);
        assert!((w - 0.7370).abs() < 1e-4 && (s - 0.8480).abs() < 1e-4);
    }

    #[test]
    fn sic_limits() {
        let (s, w) = sic_rates(1.0 - 1e-12, 4.0, 1.0, 1.0, 1.0);
        assert!(s < 1e-10);
        assert!((w - 2f64.log2()).abs() < 1e-10);
        let (_, w) = sic_rates(0.8, 1.0, 1e15, 1.0, 1.0);
        assert!((w - weak_rate_ceiling(0.8)).abs() < 1e-12);
        assert!((weak_rate_ceiling(0.8) - 5f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn single_cluster_is_matched_filter() {
        let e = CVec::from_vec(vec![c(1.0), Complex64::new(0.0, 2.0), c(-2.0)]);
        let w = zf_beams(std::slice::from_ref(&e)).unwrap();
        let mf = e.unscale(e.norm());
        assert!((&w[0] - mf).norm() < 1e-12);
    }

    #[test]
    fn dependent_channels_are_singular() {
        let e = CVec::from_vec(vec![c(1.0), c(2.0)]);
        let e2 = &e * Complex64::new(0.0, 3.0);
        assert_eq!(zf_beams(&[e, e2]), Err(BaselineError::SingularChannelSet));
        let too_many: Vec<CVec> = (0..3).map(|_| CVec::from_vec(vec![c(1.0), c(0.0)])).collect();
        assert!(matches!(
            zf_beams(&too_many),
            Err(BaselineError::TooManyClusters { .. })
        ));
    }
}
