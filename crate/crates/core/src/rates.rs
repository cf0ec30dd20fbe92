//! Finite-alphabet rates of the SM scheme.
//!
//! The index user's rate is `I(A;Y1)` with the QAM point as a nuisance; the
//! symbol user's rate is `I(X;Y2)` with the antenna index marginalized (or
//! `I(X;Y2|A)` under [`RateSplit::Chain`]). Both are Monte Carlo estimates:
//! draw `(a, x, disturbance)`, form `y`, and average the log-likelihood
//! ratio computed with log-sum-exp over all `L*M` hypotheses.
//!
//! Under the default [`InterferenceModel::Whiten`] the receiver metric
//! treats the other groups' transmissions as Gaussian with matched
//! covariance, while `y` itself carries the actual discrete interference.
//! The estimate is then an achievable (mismatched-decoding) rate and never
//! exceeds the exact mutual information.

use crate::channel::{gen_channel, link_budget, ChannelError, ChannelRealization};
use crate::config::{AllocationMode, InterferenceModel, PairingMode, RateSplit, SystemConfig};
use crate::detect::{DetectError, Whitener};
use crate::linalg::{inner, norm_sqr, CMat};
use crate::modem::{make_constellation, Constellation, ModemError};
use crate::pairing::{allocate_antennas, fixed_pairs, pair_users, AntennaPartition, PairingError, UserPair};
use crate::rng::{complex_normal, Domain, StreamKey};
use crate::stats::Accumulator;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::LN_2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RatesError {
    #[error("exact interference enumeration needs n_pairs <= 2 and L*M <= 16 (got K={pairs}, L*M={alphabet})")]
    ExactTooLarge { pairs: usize, alphabet: usize },
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    /// bits per channel use
    pub value: f64,
    pub std_error: f64,
    pub n_noise_samples: usize,
}

/// Which mutual information an estimate targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiTarget {
    /// `I(A;Y)`
    Index,
    /// `I(X;Y)`
    Symbol,
    /// `I(X;Y|A)`
    SymbolGivenIndex,
}

/// Receiver-side description of one user's observation, in units where the
/// thermal noise has unit variance per receive antenna.
#[derive(Debug, Clone)]
pub struct Observation {
    /// Desired group's columns, scaled by the per-group amplitude.
    pub signal: Vec<Vec<Complex64>>,
    /// Columns of every interfering group, same scaling.
    pub interferers: Vec<Vec<Vec<Complex64>>>,
    /// Thermal noise standard deviation (1, or 0 for noise-free runs).
    pub noise_std: f64,
    pub model: InterferenceModel,
}

/// Precomputed hypothesis metric for an [`Observation`].
enum Metric {
    /// Gaussian-approximated disturbance, white after `whitener`.
    Whitened {
        whitener: Whitener,
        cols: Vec<Vec<Complex64>>,
        col_energy: Vec<f64>,
    },
    /// Exact mixture over the (single) interfering group's alphabet.
    Exact { offsets: Vec<Vec<Complex64>> },
}

impl Observation {
    /// Interference-free observation with noise variance `noise_power`.
    pub fn white(columns: &[Vec<Complex64>], noise_power: f64) -> Self {
        let s = noise_power.sqrt().recip();
        Observation {
            signal: columns.iter().map(|c| c.iter().map(|z| z * s).collect()).collect(),
            interferers: Vec::new(),
            noise_std: 1.0,
            model: InterferenceModel::Ideal,
        }
    }

    /// Interference covariance under the Gaussian approximation: each
    /// interfering group contributes `(1/L_j) sum_a g_a g_a^H`.
    pub fn interference_covariance(&self) -> CMat {
        let n = self.signal.first().map_or(0, |c| c.len());
        let mut cov = CMat::zeros(n, n);
        for group in &self.interferers {
            let w = 1.0 / group.len() as f64;
            for g in group {
                for c in 0..n {
                    for r in 0..n {
                        cov[(r, c)] += g[r] * g[c].conj() * w;
                    }
                }
            }
        }
        cov
    }

    fn metric(&self, constellation: &Constellation) -> Result<Metric, RatesError> {
        match self.model {
            InterferenceModel::Exact if !self.interferers.is_empty() => {
                let m = constellation.order();
                let alphabet = self.signal.len() * m;
                if self.interferers.len() > 1 || alphabet > 16 || self.interferers[0].len() * m > 16 {
                    return Err(RatesError::ExactTooLarge {
                        pairs: self.interferers.len() + 1,
                        alphabet,
                    });
                }
                let offsets = self.interferers[0]
                    .iter()
                    .flat_map(|g| {
                        constellation
                            .points()
                            .iter()
                            .map(move |&x| g.iter().map(|z| z * x).collect::<Vec<_>>())
                    })
                    .collect();
                Ok(Metric::Exact { offsets })
            }
            _ => {
                let whitener = if self.model == InterferenceModel::Ideal || self.interferers.is_empty() {
                    Whitener::identity()
                } else {
                    Whitener::new(self.noise_std * self.noise_std, &self.interference_covariance())?
                };
                let cols = whitener.apply_all(&self.signal);
                let col_energy = cols.iter().map(|c| norm_sqr(c)).collect();
                Ok(Metric::Whitened {
                    whitener,
                    cols,
                    col_energy,
                })
            }
        }
    }

    fn active_interferers(&self) -> &[Vec<Vec<Complex64>>] {
        if self.model == InterferenceModel::Ideal {
            &[]
        } else {
            &self.interferers
        }
    }
}

/// Reusable per-sample buffers.
struct Scratch {
    y: Vec<Complex64>,
    yw: Vec<Complex64>,
    hy: Vec<Complex64>,
    metric: Vec<f64>,
}

/// Fills `out[i*M + n]` with the log-likelihood of hypothesis `(i, n)` up to
/// a constant shared by all hypotheses.
fn hypothesis_metrics(metric: &Metric, constellation: &Constellation, signal: &[Vec<Complex64>], s: &mut Scratch) {
    let pts = constellation.points();
    let m = pts.len();
    match metric {
        Metric::Whitened {
            whitener,
            cols,
            col_energy,
        } => {
            whitener.apply_into(&s.y, &mut s.yw);
            for (hy, h) in s.hy.iter_mut().zip(cols) {
                *hy = inner(h, &s.yw);
            }
            // -||y - h x||^2 + ||y||^2 = 2 Re(conj(x) h^H y) - |x|^2 ||h||^2
            for (i, (&hy, &e)) in s.hy.iter().zip(col_energy).enumerate() {
                let row = &mut s.metric[i * m..(i + 1) * m];
                for (out, x) in row.iter_mut().zip(pts) {
                    *out = 2.0 * (x.re * hy.re + x.im * hy.im) - x.norm_sqr() * e;
                }
            }
        }
        Metric::Exact { offsets } => {
            let mut terms = vec![0.0; offsets.len()];
            for (i, h) in signal.iter().enumerate() {
                for (n, &x) in pts.iter().enumerate() {
                    for (t, off) in terms.iter_mut().zip(offsets) {
                        *t =
                            -s.y.iter()
                                .zip(h)
                                .zip(off)
                                .map(|((y, h), o)| (y - h * x - o).norm_sqr())
                                .sum::<f64>();
                    }
                    s.metric[i * m + n] = crate::linalg::log_sum_exp(&terms);
                }
            }
        }
    }
}

#[inline]
fn lse_strided(v: &[f64], start: usize, stride: usize, count: usize) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for k in 0..count {
        max = max.max(v[start + k * stride]);
    }
    let mut acc = 0.0;
    for k in 0..count {
        let d = v[start + k * stride] - max;
        if d > -745.0 {
            acc += d.exp();
        }
    }
    max + acc.ln()
}

/// Monte Carlo estimate of the requested mutual information for one
/// observation. `key` fully determines the random draws.
pub fn estimate_mi(
    obs: &Observation,
    constellation: &Constellation,
    target: MiTarget,
    n_samples: usize,
    key: StreamKey,
) -> Result<MiEstimate, RatesError> {
    let l = obs.signal.len();
    let m = constellation.order();
    let nr = obs.signal.first().map_or(0, |c| c.len());
    let metric = obs.metric(constellation)?;
    let interferers = obs.active_interferers();
    let mut sig_rng = key.child(0).rng();
    let mut int_rng = key.child(1).rng();
    let mut s = Scratch {
        y: vec![Complex64::new(0.0, 0.0); nr],
        yw: vec![Complex64::new(0.0, 0.0); nr],
        hy: vec![Complex64::new(0.0, 0.0); l],
        metric: vec![0.0; l * m],
    };
    let cap = match target {
        MiTarget::Index => l,
        MiTarget::Symbol | MiTarget::SymbolGivenIndex => m,
    };
    let cap_bits = (cap as f64).log2();
    let mut acc = Accumulator::default();
    for _ in 0..n_samples {
        let a = sig_rng.random_range(0..l);
        let xi = sig_rng.random_range(0..m);
        let x = constellation.point(xi);
        for (y, h) in s.y.iter_mut().zip(&obs.signal[a]) {
            *y = h * x + complex_normal(&mut sig_rng) * obs.noise_std;
        }
        for group in interferers {
            let g = &group[int_rng.random_range(0..group.len())];
            let xg = constellation.point(int_rng.random_range(0..m));
            for (y, gr) in s.y.iter_mut().zip(g) {
                *y += gr * xg;
            }
        }
        hypothesis_metrics(&metric, constellation, &obs.signal, &mut s);
        let v = &s.metric;
        let ratio = match target {
            MiTarget::Index => lse_strided(v, a * m, 1, m) - lse_strided(v, 0, 1, l * m),
            MiTarget::Symbol => lse_strided(v, xi, m, l) - lse_strided(v, 0, 1, l * m),
            MiTarget::SymbolGivenIndex => v[a * m + xi] - lse_strided(v, a * m, 1, m),
        };
        acc.push(ratio / LN_2);
    }
    Ok(MiEstimate {
        value: cap_bits + acc.mean(),
        std_error: acc.std_error(),
        n_noise_samples: n_samples,
    })
}

/// `I(A;Y)` for an interference-free user with noise variance `noise_power`.
pub fn mi_index_user(
    columns: &[Vec<Complex64>],
    constellation: &Constellation,
    noise_power: f64,
    n_samples: usize,
    key: StreamKey,
) -> MiEstimate {
    estimate_mi(
        &Observation::white(columns, noise_power),
        constellation,
        MiTarget::Index,
        n_samples,
        key,
    )
    .expect("white observations are always valid")
}

/// `I(X;Y)` for an interference-free user, antenna index marginalized.
pub fn mi_symbol_user(
    columns: &[Vec<Complex64>],
    constellation: &Constellation,
    noise_power: f64,
    n_samples: usize,
    key: StreamKey,
) -> MiEstimate {
    estimate_mi(
        &Observation::white(columns, noise_power),
        constellation,
        MiTarget::Symbol,
        n_samples,
        key,
    )
    .expect("white observations are always valid")
}

/// Pairing and antenna groups used for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SmLayout {
    pub pairs: Vec<UserPair>,
    pub partition: AntennaPartition,
}

/// Pairs users and allocates antennas per the config's modes.
/// `group_snr` is per-group transmit power over noise (linear).
pub fn sm_layout(cfg: &SystemConfig, channels: &ChannelRealization, group_snr: f64) -> Result<SmLayout, RatesError> {
    let pairs = match cfg.pairing {
        PairingMode::PerRealization => pair_users(channels)?,
        PairingMode::Fixed => fixed_pairs(channels)?,
    };
    let partition = match cfg.allocation {
        AllocationMode::Fixed => AntennaPartition::contiguous(cfg.n_tx, cfg.n_pairs),
        mode => allocate_antennas(channels, &pairs, cfg.n_tx, mode, group_snr)?,
    };
    Ok(SmLayout { pairs, partition })
}

/// Observation of user `user` served by group `group`; `amplitude` is the
/// per-group transmit amplitude relative to the noise standard deviation.
pub fn observation(
    channels: &ChannelRealization,
    user: usize,
    group: usize,
    partition: &AntennaPartition,
    amplitude: f64,
    model: InterferenceModel,
) -> Observation {
    let cols = |g: &[usize]| -> Vec<Vec<Complex64>> {
        g.iter()
            .map(|&a| channels.column(user, a).iter().map(|z| z * amplitude).collect())
            .collect()
    };
    Observation {
        signal: cols(&partition.groups[group]),
        interferers: partition
            .groups
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != group)
            .map(|(_, g)| cols(g))
            .collect(),
        noise_std: 1.0,
        model,
    }
}

/// Rates of one pair for one realization: `(index_user_rate, symbol_user_rate)`,
/// each clamped at zero. `key` is the realization's stream; users draw from
/// their own children of it.
#[allow(clippy::too_many_arguments)]
pub fn sm_pair_rate(
    channels: &ChannelRealization,
    pair: &UserPair,
    group: usize,
    partition: &AntennaPartition,
    cfg: &SystemConfig,
    constellation: &Constellation,
    amplitude: f64,
    key: StreamKey,
) -> Result<(f64, f64), RatesError> {
    let idx_obs = observation(channels, pair.index_user, group, partition, amplitude, cfg.interference);
    let sym_obs = observation(
        channels,
        pair.symbol_user,
        group,
        partition,
        amplitude,
        cfg.interference,
    );
    let sym_target = match cfg.rate_split {
        RateSplit::Marginal => MiTarget::Symbol,
        RateSplit::Chain => MiTarget::SymbolGivenIndex,
    };
    let i = estimate_mi(
        &idx_obs,
        constellation,
        MiTarget::Index,
        cfg.mi_samples,
        key.child(pair.index_user as u64),
    )?;
    let s = estimate_mi(
        &sym_obs,
        constellation,
        sym_target,
        cfg.mi_samples,
        key.child(pair.symbol_user as u64),
    )?;
    Ok((i.value.max(0.0), s.value.max(0.0)))
}

/// Stream for the MI draws of one `(trial, SNR point)` cell.
pub fn cell_key(cfg: &SystemConfig, trial: u64, snr_db: f64) -> StreamKey {
    StreamKey::new(cfg.seed, Domain::MiSignal, &[trial, snr_db.to_bits()])
}

/// Per-group transmit amplitude over noise std for SMN at `snr_db`.
pub fn group_amplitude(cfg: &SystemConfig, snr_db: f64) -> Result<f64, RatesError> {
    let lb = link_budget(cfg, snr_db)?;
    Ok((lb.tx_to_noise() / cfg.n_pairs as f64).sqrt())
}

/// Per-user SM rates of one realization.
pub fn sm_trial_rates(
    cfg: &SystemConfig,
    channels: &ChannelRealization,
    snr_db: f64,
    constellation: &Constellation,
) -> Result<Vec<f64>, RatesError> {
    let amp = group_amplitude(cfg, snr_db)?;
    let layout = sm_layout(cfg, channels, amp * amp)?;
    let key = cell_key(cfg, channels.trial_index, snr_db);
    let mut rates = vec![0.0; cfg.n_users()];
    for (k, pair) in layout.pairs.iter().enumerate() {
        let (ri, rs) = sm_pair_rate(channels, pair, k, &layout.partition, cfg, constellation, amp, key)?;
        rates[pair.index_user] = ri;
        rates[pair.symbol_user] = rs;
    }
    Ok(rates)
}

/// Ergodic averages over a set of per-trial per-user rates.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicRates {
    pub per_user_rate: Vec<f64>,
    pub sum_rate: f64,
    pub sum_rate_std_error: f64,
    /// Trial average of the smallest per-user rate in each realization.
    pub worst_rate: f64,
    pub n_trials: usize,
}

impl ErgodicRates {
    /// Aggregates in trial order, so the result does not depend on how the
    /// trials were scheduled.
    pub fn from_trials(per_trial: &[Vec<f64>]) -> Self {
        let n_users = per_trial.first().map_or(0, |r| r.len());
        let per_user_rate: Vec<f64> = (0..n_users)
            .map(|u| per_trial.iter().map(|r| r[u]).collect::<Accumulator>().mean())
            .collect();
        let sums: Accumulator = per_trial.iter().map(|r| r.iter().sum::<f64>()).collect();
        let worst: Accumulator = per_trial
            .iter()
            .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        ErgodicRates {
            sum_rate: sums.mean(),
            sum_rate_std_error: sums.std_error(),
            worst_rate: if n_users == 0 { 0.0 } else { worst.mean() },
            per_user_rate,
            n_trials: per_trial.len(),
        }
    }
}

/// SM ergodic rates at one SNR point, averaged over `cfg.n_trials`
/// realizations (evaluated in parallel on the current rayon pool).
pub fn ergodic_rates(cfg: &SystemConfig, snr_db: f64) -> Result<ErgodicRates, RatesError> {
    let constellation = make_constellation(cfg.qam_order)?;
    let per_trial = (0..cfg.n_trials as u64)
        .into_par_iter()
        .map(|t| sm_trial_rates(cfg, &gen_channel(cfg, t), snr_db, &constellation))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ErgodicRates::from_trials(&per_trial))
}
