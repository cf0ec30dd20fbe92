//! Bit-error-rate simulation of the SM link.

use super::HarnessError;
use crate::channel::{gen_channel, ChannelRealization};
use crate::config::{InterferenceModel, SystemConfig};
use crate::detect::{ml_detect, mrc_detect_index_with, Whitener};
use crate::modem::{make_constellation, sm_map, sm_unmap, split_bits, Constellation, SmSymbol};
use crate::rates::{group_amplitude, observation, sm_layout, RatesError, SmLayout};
use crate::rng::{complex_normal, Domain, StreamKey};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::ops::{Add, AddAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BerCounts {
    pub index_errors: u64,
    pub index_bits: u64,
    pub symbol_errors: u64,
    pub symbol_bits: u64,
}

impl BerCounts {
    pub fn index_ber(&self) -> f64 {
        ratio(self.index_errors, self.index_bits)
    }

    pub fn symbol_ber(&self) -> f64 {
        ratio(self.symbol_errors, self.symbol_bits)
    }
}

fn ratio(k: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

impl Add for BerCounts {
    type Output = BerCounts;
    fn add(self, o: BerCounts) -> BerCounts {
        BerCounts {
            index_errors: self.index_errors + o.index_errors,
            index_bits: self.index_bits + o.index_bits,
            symbol_errors: self.symbol_errors + o.symbol_errors,
            symbol_bits: self.symbol_bits + o.symbol_bits,
        }
    }
}

impl AddAssign for BerCounts {
    fn add_assign(&mut self, o: BerCounts) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerResult {
    pub index_ber: f64,
    pub symbol_ber: f64,
    pub counts: BerCounts,
}

fn hamming(a: &[bool], b: &[bool]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Sends one SM channel use on every pair and counts bit errors at both
/// users of each pair.
///
/// `amplitude` is the per-group transmit amplitude and `noise_std` the
/// thermal noise standard deviation, both in the same units; `noise_std = 0`
/// gives the noise-free limit.
#[allow(clippy::too_many_arguments)]
pub fn sm_channel_use<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    channels: &ChannelRealization,
    layout: &SmLayout,
    constellation: &Constellation,
    amplitude: f64,
    noise_std: f64,
    payload: &mut R,
    noise: &mut R,
) -> Result<BerCounts, RatesError> {
    let l = cfg.group_size();
    let bits_per_pair = cfg.bits_per_pair_use();
    let symbols: Vec<(SmSymbol, Vec<bool>)> = (0..layout.pairs.len())
        .map(|k| {
            let bits: Vec<bool> = (0..bits_per_pair).map(|_| payload.random::<bool>()).collect();
            let split = split_bits(&bits, l, constellation.order())?;
            Ok((sm_map(&split, k, constellation), bits))
        })
        .collect::<Result<_, crate::modem::ModemError>>()?;

    let n_index_bits = l.trailing_zeros() as u64;
    let n_symbol_bits = constellation.bits_per_symbol() as u64;
    let mut counts = BerCounts::default();
    for (k, pair) in layout.pairs.iter().enumerate() {
        for (user, is_index) in [(pair.index_user, true), (pair.symbol_user, false)] {
            let obs = observation(channels, user, k, &layout.partition, amplitude, cfg.interference);
            let mut y: Vec<Complex64> = (0..cfg.n_rx).map(|_| complex_normal(noise) * noise_std).collect();
            for (j, (sym, _)) in symbols.iter().enumerate() {
                if j != k && cfg.interference == InterferenceModel::Ideal {
                    continue;
                }
                let antenna = layout.partition.groups[j][sym.antenna_local];
                let x = constellation.point(sym.point_index);
                for (yr, h) in y.iter_mut().zip(channels.column(user, antenna)) {
                    *yr += h * amplitude * x;
                }
            }
            let whitener = match cfg.interference {
                InterferenceModel::Ideal => Whitener::identity(),
                _ => Whitener::new(noise_std * noise_std, &obs.interference_covariance())?,
            };
            let yw = whitener.apply(&y);
            let cols = whitener.apply_all(&obs.signal);
            let (sent, _) = &symbols[k];
            let truth = sm_unmap(sent, l, constellation);
            if is_index {
                let det = mrc_detect_index_with(&yw, &cols, cfg.mrc_metric);
                let got = SmSymbol {
                    antenna_local: det.antenna_local,
                    ..*sent
                };
                counts.index_errors += hamming(&sm_unmap(&got, l, constellation).index_bits, &truth.index_bits);
                counts.index_bits += n_index_bits;
            } else {
                let det = ml_detect(&yw, &cols, constellation);
                let got = constellation.label_bits(det.point_index.expect("ml returns a point"));
                counts.symbol_errors += hamming(&got, &truth.symbol_bits);
                counts.symbol_bits += n_symbol_bits;
            }
        }
    }
    Ok(counts)
}

/// Simulates `n_bits` payload bits through the SM link at `snr_db`, one
/// fresh channel realization per channel use. `snr_db = +inf` runs the
/// noise-free limit.
pub fn run_ber(cfg: &SystemConfig, snr_db: f64, n_bits: usize) -> Result<BerResult, HarnessError> {
    cfg.validate()?;
    let per_use = cfg.bits_per_channel_use();
    if n_bits == 0 || !n_bits.is_multiple_of(per_use) {
        return Err(HarnessError::BitCount { n_bits, per_use });
    }
    let constellation = make_constellation(cfg.qam_order).map_err(RatesError::from)?;
    let (amplitude, noise_std) = if snr_db == f64::INFINITY {
        (1.0, 0.0)
    } else {
        (group_amplitude(cfg, snr_db)?, 1.0)
    };
    let counts = (0..(n_bits / per_use) as u64)
        .into_par_iter()
        .map(|u| {
            let channels = gen_channel(cfg, u);
            let layout = sm_layout(cfg, &channels, amplitude * amplitude)?;
            let mut payload = StreamKey::new(cfg.seed, Domain::BerPayload, &[u, snr_db.to_bits(), 1]).rng();
            let mut noise = StreamKey::new(cfg.seed, Domain::BerNoise, &[u, snr_db.to_bits(), 1]).rng();
            sm_channel_use(
                cfg,
                &channels,
                &layout,
                &constellation,
                amplitude,
                noise_std,
                &mut payload,
                &mut noise,
            )
        })
        .collect::<Result<Vec<_>, RatesError>>()?
        .into_iter()
        .fold(BerCounts::default(), |a, b| a + b);
    Ok(BerResult {
        index_ber: counts.index_ber(),
        symbol_ber: counts.symbol_ber(),
        counts,
    })
}
