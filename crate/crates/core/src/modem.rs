//! Gray-labelled QAM and the SM transmitter.
//!
//! Bit order is fixed: the first `log2(L)` bits of a pair's channel-use
//! word select the active antenna (MSB first), the remaining `log2(M)`
//! bits are the Gray label of the QAM point (MSB first, in-phase axis bits
//! before quadrature axis bits).

use crate::linalg::CVec;
use crate::pairing::AntennaPartition;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModemError {
    #[error("unsupported constellation order {0}")]
    UnsupportedConstellation(usize),
    #[error("group size {0} is not a power of two")]
    GroupSize(usize),
    #[error("expected {expected} bits, got {got}")]
    BitLength { expected: usize, got: usize },
}

/// Unit-energy Gray-labelled QAM alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits: usize,
    points: Vec<Complex64>,
    /// Gray label of each point, MSB-first in `bits` bits.
    labels: Vec<u32>,
    by_label: Vec<usize>,
    /// `(row, col)` position of each point in the square grid.
    grid: Vec<(usize, usize)>,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Builds BPSK (`order == 2`) or square `order`-QAM.
pub fn make_constellation(order: usize) -> Result<Constellation, ModemError> {
    let (raw, labels, grid): (Vec<Complex64>, Vec<u32>, Vec<(usize, usize)>) = match order {
        2 => (
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            vec![0, 1],
            vec![(0, 1), (0, 0)],
        ),
        4 | 16 | 64 | 256 => {
            let side = (order as f64).sqrt() as usize;
            let axis_bits = side.trailing_zeros();
            let level = |i: usize| (2 * i) as f64 - (side - 1) as f64;
            let mut pts = Vec::with_capacity(order);
            let mut labs = Vec::with_capacity(order);
            let mut grid = Vec::with_capacity(order);
            for i in 0..side {
                for q in 0..side {
                    pts.push(Complex64::new(level(i), level(q)));
                    labs.push(((gray(i) << axis_bits) | gray(q)) as u32);
                    grid.push((i, q));
                }
            }
            (pts, labs, grid)
        }
        _ => return Err(ModemError::UnsupportedConstellation(order)),
    };
    let energy = raw.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
    let scale = energy.sqrt().recip();
    let points = raw.iter().map(|p| p * scale).collect();
    let mut by_label = vec![0; order];
    for (k, &l) in labels.iter().enumerate() {
        by_label[l as usize] = k;
    }
    Ok(Constellation {
        order,
        bits: order.trailing_zeros() as usize,
        points,
        labels,
        by_label,
        grid,
    })
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, k: usize) -> Complex64 {
        self.points[k]
    }

    pub fn label(&self, k: usize) -> u32 {
        self.labels[k]
    }

    pub fn label_bits(&self, k: usize) -> Vec<bool> {
        to_bits(self.labels[k] as usize, self.bits)
    }

    /// Index of the point carrying `label`.
    pub fn index_of_label(&self, label: u32) -> usize {
        self.by_label[label as usize]
    }

    /// Average symbol energy (1 up to rounding).
    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }

    /// Pairs of points that are horizontal or vertical grid neighbours.
    pub fn grid_neighbors(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.order {
            for b in a + 1..self.order {
                let (ra, ca) = self.grid[a];
                let (rb, cb) = self.grid[b];
                if ra.abs_diff(rb) + ca.abs_diff(cb) == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// MSB-first bits of `value` in `width` bits.
pub fn to_bits(value: usize, width: usize) -> Vec<bool> {
    (0..width).rev().map(|b| (value >> b) & 1 == 1).collect()
}

/// Integer value of MSB-first `bits`.
pub fn from_bits(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSplit {
    pub index_bits: Vec<bool>,
    pub symbol_bits: Vec<bool>,
}

impl BitSplit {
    pub fn concat(&self) -> Vec<bool> {
        let mut v = self.index_bits.clone();
        v.extend_from_slice(&self.symbol_bits);
        v
    }
}

/// One SM channel use of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmSymbol {
    pub group: usize,
    pub antenna_local: usize,
    pub point_index: usize,
}

/// Splits a pair's channel-use word into index bits and symbol bits.
pub fn split_bits(bits: &[bool], group_size: usize, order: usize) -> Result<BitSplit, ModemError> {
    if !group_size.is_power_of_two() {
        return Err(ModemError::GroupSize(group_size));
    }
    if !order.is_power_of_two() || order < 2 {
        return Err(ModemError::UnsupportedConstellation(order));
    }
    let n_index = group_size.trailing_zeros() as usize;
    let expected = n_index + order.trailing_zeros() as usize;
    if bits.len() != expected {
        return Err(ModemError::BitLength {
            expected,
            got: bits.len(),
        });
    }
    Ok(BitSplit {
        index_bits: bits[..n_index].to_vec(),
        symbol_bits: bits[n_index..].to_vec(),
    })
}

pub fn sm_map(split: &BitSplit, group: usize, constellation: &Constellation) -> SmSymbol {
    debug_assert_eq!(split.symbol_bits.len(), constellation.bits_per_symbol());
    SmSymbol {
        group,
        antenna_local: from_bits(&split.index_bits),
        point_index: constellation.index_of_label(from_bits(&split.symbol_bits) as u32),
    }
}

/// Inverse of [`sm_map`].
pub fn sm_unmap(sym: &SmSymbol, group_size: usize, constellation: &Constellation) -> BitSplit {
    BitSplit {
        index_bits: to_bits(sym.antenna_local, group_size.trailing_zeros() as usize),
        symbol_bits: constellation.label_bits(sym.point_index),
    }
}

/// Transmit vector of one SM symbol: a single nonzero entry at the active
/// antenna's global index.
pub fn tx_vector(
    sym: &SmSymbol,
    partition: &AntennaPartition,
    n_tx: usize,
    tx_amplitude: f64,
    constellation: &Constellation,
) -> CVec {
    let mut v = CVec::zeros(n_tx);
    let antenna = partition.groups[sym.group][sym.antenna_local];
    v[antenna] = constellation.point(sym.point_index) * tx_amplitude;
    v
}
