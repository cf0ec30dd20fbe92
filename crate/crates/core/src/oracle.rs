//! Straight-line reference implementations.
//!
//! Each function here recomputes something the fast path also computes,
//! by a different route: explicit loops instead of expanded metrics, grid
//! quadrature instead of Monte Carlo, Gram-Schmidt projection instead of a
//! pseudo-inverse, eigen-decomposition instead of SVD, brute-force
//! enumeration instead of recursion. They share no code with the modules
//! they check beyond plain data types and use their own random streams.

#![allow(clippy::needless_range_loop)]

use crate::linalg::{CMat, CVec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Independent RNG (different generator family than the simulator's).
pub fn oracle_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed ^ 0x0AC1_E000)
}

/// Box-Muller complex Gaussian with `E|z|^2 = 1`.
pub fn box_muller<R: Rng>(rng: &mut R) -> Complex64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * t.cos(), r * t.sin())
}

/// Exhaustive `(i, n)` minimizing `||y - h_i x_n||^2`, first minimum wins.
pub fn naive_ml(y: &[Complex64], cols: &[Vec<Complex64>], points: &[Complex64]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_d = f64::INFINITY;
    for i in 0..cols.len() {
        for n in 0..points.len() {
            let mut d = 0.0;
            for r in 0..y.len() {
                let e = y[r] - cols[i][r] * points[n];
                d += e.re * e.re + e.im * e.im;
            }
            if d < best_d {
                best_d = d;
                best = (i, n);
            }
        }
    }
    best
}

/// First index of the largest `|h_i^H y|`.
pub fn naive_mrc(y: &[Complex64], cols: &[Vec<Complex64>]) -> usize {
    let mut best = 0;
    let mut best_s = -1.0;
    for (i, h) in cols.iter().enumerate() {
        let mut acc = zero();
        for r in 0..y.len() {
            acc += h[r].conj() * y[r];
        }
        if acc.norm() > best_s {
            best_s = acc.norm();
            best = i;
        }
    }
    best
}

/// Index-detection error count of the literal MRC rule over `trials` draws
/// of an i.i.d. Rayleigh `nr x l` channel with QPSK, at per-antenna SNR
/// `snr_db`.
pub fn naive_mrc_error_count(l: usize, nr: usize, snr_db: f64, trials: usize, seed: u64) -> u64 {
    let mut rng = oracle_rng(seed);
    let amp = 10f64.powf(snr_db / 20.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let qpsk = [
        Complex64::new(s, s),
        Complex64::new(s, -s),
        Complex64::new(-s, s),
        Complex64::new(-s, -s),
    ];
    let mut errors = 0;
    for _ in 0..trials {
        let cols: Vec<Vec<Complex64>> = (0..l)
            .map(|_| (0..nr).map(|_| box_muller(&mut rng)).collect())
            .collect();
        let a = rng.random_range(0..l);
        let x = qpsk[rng.random_range(0..4)];
        let y: Vec<Complex64> = (0..nr).map(|r| cols[a][r] * x * amp + box_muller(&mut rng)).collect();
        if naive_mrc(&y, &cols) != a {
            errors += 1;
        }
    }
    errors
}

/// Which input a quadrature MI refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadTarget {
    Index,
    Symbol,
}

/// Mutual information for a single receive antenna (`y` scalar) by
/// midpoint quadrature over a `grid x grid` square in the complex plane.
/// `gains[i]` is antenna `i`'s scalar channel.
pub fn quadrature_mi(
    gains: &[Complex64],
    points: &[Complex64],
    noise_var: f64,
    target: QuadTarget,
    grid: usize,
) -> f64 {
    let l = gains.len();
    let m = points.len();
    let means: Vec<Complex64> = gains.iter().flat_map(|h| points.iter().map(move |x| h * x)).collect();
    let reach = means.iter().map(|z| z.norm()).fold(0.0, f64::max) + 9.0 * noise_var.sqrt();
    let step = 2.0 * reach / grid as f64;
    let cell = step * step;
    let norm = 1.0 / (std::f64::consts::PI * noise_var);
    let mut total = 0.0;
    let mut dens = vec![0.0; l * m];
    for gx in 0..grid {
        for gy in 0..grid {
            let y = Complex64::new(-reach + (gx as f64 + 0.5) * step, -reach + (gy as f64 + 0.5) * step);
            for (d, mu) in dens.iter_mut().zip(&means) {
                *d = norm * (-(y - mu).norm_sqr() / noise_var).exp();
            }
            let p_y: f64 = dens.iter().sum::<f64>() / (l * m) as f64;
            if p_y <= 0.0 {
                continue;
            }
            match target {
                QuadTarget::Index => {
                    for a in 0..l {
                        let p_a: f64 = dens[a * m..(a + 1) * m].iter().sum::<f64>() / m as f64;
                        if p_a > 0.0 {
                            total += p_a / l as f64 * (p_a / p_y).log2() * cell;
                        }
                    }
                }
                QuadTarget::Symbol => {
                    for n in 0..m {
                        let p_n: f64 = (0..l).map(|a| dens[a * m + n]).sum::<f64>() / l as f64;
                        if p_n > 0.0 {
                            total += p_n / m as f64 * (p_n / p_y).log2() * cell;
                        }
                    }
                }
            }
        }
    }
    total
}

/// ZF beam `k` as the normalized projection of `e_k` onto the orthogonal
/// complement of every other effective channel (Gram-Schmidt).
pub fn projection_zf_beams(effective: &[CVec]) -> Vec<CVec> {
    (0..effective.len())
        .map(|k| {
            let mut basis: Vec<CVec> = Vec::new();
            for (j, e) in effective.iter().enumerate() {
                if j == k {
                    continue;
                }
                let mut v = e.clone();
                for q in &basis {
                    let c = q.dotc(&v);
                    v -= q * c;
                }
                let n = v.norm();
                if n > 1e-300 {
                    basis.push(v.unscale(n));
                }
            }
            let mut w = effective[k].clone();
            for q in &basis {
                let c = q.dotc(&w);
                w -= q * c;
            }
            let n = w.norm();
            w.unscale(n)
        })
        .collect()
}

/// Monolithic CMN pipeline for given cluster memberships: effective
/// channels from the Hermitian eigen-decomposition of `H^H H`, ZF by
/// projection, and the SIC rate formulas written out inline. Returns
/// per-user rates.
pub fn monolithic_conventional_rates(
    mats: &[CMat],
    clusters: &[(usize, usize)],
    power_split: f64,
    tx_to_noise: f64,
) -> Vec<f64> {
    let eff: Vec<(f64, CVec)> = mats
        .iter()
        .map(|h| {
            let eig = (h.adjoint() * h).symmetric_eigen();
            let (k, lam) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
            let v = eig.eigenvectors.column(k).into_owned();
            (lam, v * Complex64::new(lam.max(0.0).sqrt(), 0.0))
        })
        .collect();
    let ordered: Vec<(usize, usize)> = clusters
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (a.min(b), a.max(b));
            if eff[b].0 > eff[a].0 {
                (b, a)
            } else {
                (a, b)
            }
        })
        .collect();
    let strong_eff: Vec<CVec> = ordered.iter().map(|&(s, _)| eff[s].1.clone()).collect();
    let beams = projection_zf_beams(&strong_eff);
    let p = tx_to_noise / clusters.len() as f64;
    let beta = power_split;
    let mut rates = vec![0.0; mats.len()];
    for (k, &(s, w)) in ordered.iter().enumerate() {
        let gs = strong_eff[k].dotc(&beams[k]).norm_sqr();
        rates[s] = (1.0 + (1.0 - beta) * p * gs).log2();
        let hw = &mats[w] * &beams[k];
        let gw = hw.norm_squared();
        let c = hw.unscale(gw.sqrt());
        let mut leak = 0.0;
        for (j, b) in beams.iter().enumerate() {
            if j != k {
                leak += p * c.dotc(&(&mats[w] * b)).norm_sqr();
            }
        }
        rates[w] = (1.0 + beta * p * gw / ((1.0 - beta) * p * gw + 1.0 + leak)).log2();
    }
    rates
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_gauss(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
            .unwrap();
        if a[p][c].norm() == 0.0 {
            return zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

/// `sum_u log2 det(I + snr H_u,S^H H_u,S)` over the given users.
pub fn naive_proxy(mats: &[&CMat], antennas: &[usize], snr: f64) -> f64 {
    mats.iter()
        .map(|h| {
            let n = antennas.len();
            let g: Vec<Vec<Complex64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = zero();
                            for r in 0..h.nrows() {
                                acc += h[(r, antennas[i])].conj() * h[(r, antennas[j])];
                            }
                            acc * snr + if i == j { 1.0 } else { 0.0 }
                        })
                        .collect()
                })
                .collect();
            det_gauss(g).re.log2()
        })
        .sum()
}

/// Brute-force best balanced partition: walks every label vector in
/// `{0..K}^n_tx` in lexicographic order, keeps the balanced ones and returns
/// the first maximizer as per-group antenna lists. `pair_users[k]` are the
/// members of the pair served by group `k`.
pub fn brute_force_partition(mats: &[CMat], pair_users: &[(usize, usize)], n_tx: usize, snr: f64) -> Vec<Vec<usize>> {
    let k = pair_users.len();
    let l = n_tx / k;
    let total = k.pow(n_tx as u32);
    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
    for code in 0..total {
        let mut labels = vec![0; n_tx];
        let mut c = code;
        for pos in (0..n_tx).rev() {
            labels[pos] = c % k;
            c /= k;
        }
        let groups: Vec<Vec<usize>> = (0..k)
            .map(|g| (0..n_tx).filter(|&a| labels[a] == g).collect())
            .collect();
        if groups.iter().any(|g| g.len() != l) {
            continue;
        }
        let obj: f64 = pair_users
            .iter()
            .zip(&groups)
            .map(|(&(u, v), g)| naive_proxy(&[&mats[u], &mats[v]], g, snr))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, groups));
        }
    }
    best.expect("at least one balanced partition").1
}

/// Largest total similarity over all perfect matchings of `sim` (symmetric).
pub fn best_matching_similarity(sim: &[Vec<f64>]) -> f64 {
    fn go(free: &mut Vec<bool>, sim: &[Vec<f64>]) -> f64 {
        let Some(u) = free.iter().position(|&f| f) else {
            return 0.0;
        };
        free[u] = false;
        let mut best = f64::NEG_INFINITY;
        for v in 0..free.len() {
            if free[v] {
                free[v] = false;
                best = best.max(sim[u][v] + go(free, sim));
                free[v] = true;
            }
        }
        free[u] = true;
        best
    }
    go(&mut vec![true; sim.len()], sim)
}

/// Symbol-user bit errors of a two-antenna BPSK SM link with one receive
/// antenna and two users: `(errors, bits)`. `snr[u]` is transmit power over
/// noise times user `u`'s path-loss gain; each use draws fresh channels and
/// the stronger user decodes the symbol.
pub fn naive_bpsk_sm_symbol_errors(snr: [f64; 2], uses: usize, seed: u64) -> (u64, u64) {
    let mut rng = oracle_rng(seed);
    let pts = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let mut errors = 0;
    for _ in 0..uses {
        let h: Vec<[Complex64; 2]> = snr
            .iter()
            .map(|s| [box_muller(&mut rng) * s.sqrt(), box_muller(&mut rng) * s.sqrt()])
            .collect();
        let e = |u: usize| h[u][0].norm_sqr() + h[u][1].norm_sqr();
        let h = if e(1) > e(0) { h[1] } else { h[0] };
        let a = rng.random_range(0..2);
        let bit = rng.random_range(0..2usize);
        let y = h[a] * pts[bit] + box_muller(&mut rng);
        let mut best = (0, 0);
        let mut best_d = f64::INFINITY;
        for (i, hi) in h.iter().enumerate() {
            for (n, x) in pts.iter().enumerate() {
                let d = (y - hi * x).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = (i, n);
                }
            }
        }
        if best.1 != bit {
            errors += 1;
        }
    }
    (errors, uses as u64)
}
