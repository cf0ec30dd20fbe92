//! SM receivers.
//!
//! The index user correlates the received vector with each candidate
//! antenna's channel column and picks the largest magnitude (MRC). The
//! symbol user searches all `(antenna, point)` hypotheses for the smallest
//! squared Euclidean distance (joint ML). Inter-group interference is
//! handled by whitening with the inverse square root of the disturbance
//! covariance before either detector runs.

use crate::config::MrcMetric;
use crate::linalg::{inner, norm_sqr, CMat};
use crate::modem::Constellation;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DetectError {
    #[error("interference covariance is not positive semidefinite (eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("noise variance must be finite and nonnegative, got {0}")]
    NoiseVariance(f64),
}

/// One MRC score per candidate antenna of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct MrcStatistic {
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub antenna_local: usize,
    /// `None` for index-only detection.
    pub point_index: Option<usize>,
    /// Winning MRC score, or winning squared distance for ML.
    pub metric: f64,
}

pub fn mrc_statistic(y: &[Complex64], columns: &[Vec<Complex64>], metric: MrcMetric) -> MrcStatistic {
    let scores = columns
        .iter()
        .map(|h| {
            let s = inner(h, y).norm();
            match metric {
                MrcMetric::Raw => s,
                MrcMetric::Normalized => {
                    let n = norm_sqr(h).sqrt();
                    if n > 0.0 {
                        s / n
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect();
    MrcStatistic { scores }
}

/// Smallest index attaining the maximum score.
fn argmax_first(scores: &[f64]) -> (usize, f64) {
    scores.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
    )
}

/// Index detection with the literal `|h_i^H y|` score.
pub fn mrc_detect_index(y: &[Complex64], columns: &[Vec<Complex64>]) -> DetectionResult {
    mrc_detect_index_with(y, columns, MrcMetric::Raw)
}

pub fn mrc_detect_index_with(y: &[Complex64], columns: &[Vec<Complex64>], metric: MrcMetric) -> DetectionResult {
    let stat = mrc_statistic(y, columns, metric);
    let (antenna_local, metric) = argmax_first(&stat.scores);
    DetectionResult {
        antenna_local,
        point_index: None,
        metric,
    }
}

#[inline]
fn distance_sqr(y: &[Complex64], h: &[Complex64], x: Complex64) -> f64 {
    y.iter().zip(h).map(|(yr, hr)| (yr - hr * x).norm_sqr()).sum()
}

/// Joint ML over every `(antenna, point)`; ties go to the smallest `(i, n)`.
pub fn ml_detect(y: &[Complex64], columns: &[Vec<Complex64>], constellation: &Constellation) -> DetectionResult {
    let mut best = DetectionResult {
        antenna_local: 0,
        point_index: Some(0),
        metric: f64::INFINITY,
    };
    for (i, h) in columns.iter().enumerate() {
        for (n, &x) in constellation.points().iter().enumerate() {
            let d = distance_sqr(y, h, x);
            if d < best.metric {
                best = DetectionResult {
                    antenna_local: i,
                    point_index: Some(n),
                    metric: d,
                };
            }
        }
    }
    best
}

/// MRC for the antenna, then ML over the constellation on that antenna only.
pub fn two_stage_detect(
    y: &[Complex64],
    columns: &[Vec<Complex64>],
    constellation: &Constellation,
    metric: MrcMetric,
) -> DetectionResult {
    let i = mrc_detect_index_with(y, columns, metric).antenna_local;
    let (n, d) = constellation
        .points()
        .iter()
        .enumerate()
        .map(|(n, &x)| (n, distance_sqr(y, &columns[i], x)))
        .fold((0, f64::INFINITY), |acc, (n, d)| if d < acc.1 { (n, d) } else { acc });
    DetectionResult {
        antenna_local: i,
        point_index: Some(n),
        metric: d,
    }
}

/// Linear map `(noise_var I + C)^(-1/2)`.
///
/// With `noise_var == 0` the map is the noise-free limit (up to scale): the
/// projector onto the orthogonal complement of the interference subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Whitener {
    /// `None` means a scaled identity.
    matrix: Option<CMat>,
    scale: f64,
}

impl Whitener {
    pub fn identity() -> Self {
        Whitener {
            matrix: None,
            scale: 1.0,
        }
    }

    pub fn new(noise_var: f64, interference_cov: &CMat) -> Result<Self, DetectError> {
        if !(noise_var.is_finite() && noise_var >= 0.0) {
            return Err(DetectError::NoiseVariance(noise_var));
        }
        if interference_cov.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            let scale = if noise_var > 0.0 { noise_var.sqrt().recip() } else { 1.0 };
            return Ok(Whitener { matrix: None, scale });
        }
        let eig = interference_cov.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        let tol = 1e-9 * lmax.max(f64::MIN_POSITIVE);
        if let Some(&neg) = eig.eigenvalues.iter().find(|&&l| l < -tol) {
            return Err(DetectError::NotPositiveDefinite(neg));
        }
        let gains: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| {
                let l = l.max(0.0);
                if noise_var > 0.0 {
                    (noise_var + l).sqrt().recip()
                } else if l <= tol {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let v = &eig.eigenvectors;
        let n = v.nrows();
        let w = CMat::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * gains[k] * v[(c, k)].conj()).sum()
        });
        Ok(Whitener {
            matrix: Some(w),
            scale: 1.0,
        })
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match &self.matrix {
            None => v.iter().map(|z| z * self.scale).collect(),
            Some(w) => {
                let n = w.nrows();
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (c, &vc) in v.iter().enumerate() {
                    let col = &w.as_slice()[c * n..(c + 1) * n];
                    for (o, &wr) in out.iter_mut().zip(col) {
                        *o += wr * vc;
                    }
                }
                out
            }
        }
    }

    /// Like [`Whitener::apply`], writing into `out`.
    #[inline]
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        match &self.matrix {
            None => {
                for (o, z) in out.iter_mut().zip(v) {
                    *o = z * self.scale;
                }
            }
            Some(w) => {
                let n = w.nrows();
                out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
                for (c, &vc) in v.iter().enumerate() {
                    let col = &w.as_slice()[c * n..(c + 1) * n];
                    for (o, &wr) in out.iter_mut().zip(col) {
                        *o += wr * vc;
                    }
                }
            }
        }
    }

    pub fn apply_all(&self, columns: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        columns.iter().map(|c| self.apply(c)).collect()
    }
}

/// Whitens the received vector and every candidate column against
/// `noise_var I + interference_cov`.
pub fn whiten(
    y: &[Complex64],
    columns: &[Vec<Complex64>],
    noise_var: f64,
    interference_cov: &CMat,
) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>), DetectError> {
    let w = Whitener::new(noise_var, interference_cov)?;
    Ok((w.apply(y), w.apply_all(columns)))
}
