//! User pairing, role assignment and antenna allocation.
//!
//! Users whose channels point in similar directions are paired; inside a
//! pair the stronger user decodes the QAM symbol and the weaker one the
//! antenna index. Pair `k` is then served by antenna group `k`.

use crate::channel::ChannelRealization;
use crate::config::AllocationMode;
use crate::linalg::{log2_det_hpd, select_columns, CMat};
use num_complex::Complex64;
use thiserror::Error;

/// Largest partition count the exhaustive allocator will enumerate.
pub const EXHAUSTIVE_LIMIT: f64 = 1e6;

#[derive(Debug, Error, PartialEq)]
pub enum PairingError {
    #[error("exhaustive allocation would enumerate {0:.0} partitions (limit 1e6); use greedy mode")]
    ExhaustiveTooLarge(f64),
    #[error("need an even, nonzero number of users, got {0}")]
    UserCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPair {
    pub index_user: usize,
    pub symbol_user: usize,
    /// Normalized channel correlation of the two users, in `[0, 1]`.
    pub similarity: f64,
}

/// Disjoint antenna groups covering every base-station antenna.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntennaPartition {
    pub groups: Vec<Vec<usize>>,
}

impl AntennaPartition {
    /// Group `k` = antennas `k*L .. (k+1)*L`.
    pub fn contiguous(n_tx: usize, n_groups: usize) -> Self {
        let l = n_tx / n_groups;
        AntennaPartition {
            groups: (0..n_groups).map(|k| (k * l..(k + 1) * l).collect()).collect(),
        }
    }

    /// Checks disjointness, coverage and equal group sizes.
    pub fn is_valid(&self, n_tx: usize) -> bool {
        let k = self.groups.len();
        if k == 0 || !n_tx.is_multiple_of(k) {
            return false;
        }
        let mut seen = vec![false; n_tx];
        for g in &self.groups {
            if g.len() != n_tx / k {
                return false;
            }
            for &a in g {
                if a >= n_tx || seen[a] {
                    return false;
                }
                seen[a] = true;
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Group label of every antenna.
    pub fn labels(&self, n_tx: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n_tx];
        for (k, g) in self.groups.iter().enumerate() {
            for &a in g {
                out[a] = k;
            }
        }
        out
    }
}

/// `|<vec a, vec b>| / (||a|| ||b||)` on the flattened matrices.
pub fn similarity(a: &CMat, b: &CMat) -> f64 {
    let dot: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot.norm() / (na * nb)).min(1.0)
}

/// Orders two users by the role rule: the larger Frobenius norm decodes the
/// symbol (ties go to the lower user index).
pub fn assign_roles(channels: &ChannelRealization, a: usize, b: usize) -> UserPair {
    let na = channels.user(a).norm();
    let nb = channels.user(b).norm();
    let (symbol_user, index_user) = if na > nb || (na == nb && a < b) { (a, b) } else { (b, a) };
    UserPair {
        index_user,
        symbol_user,
        similarity: similarity(channels.user(a), channels.user(b)),
    }
}

/// Greedy maximum-similarity perfect matching. Pairs are returned sorted by
/// their smallest member.
pub fn pair_users(channels: &ChannelRealization) -> Result<Vec<UserPair>, PairingError> {
    let n = channels.n_users();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(PairingError::UserCount(n));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((similarity(channels.user(u), channels.user(v)), u, v));
        }
    }
    edges.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut used = vec![false; n];
    let mut matched = Vec::with_capacity(n / 2);
    for (_, u, v) in edges {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            matched.push((u, v));
        }
    }
    matched.sort_unstable();
    Ok(matched.into_iter().map(|(u, v)| assign_roles(channels, u, v)).collect())
}

/// Users `2k` and `2k+1` form pair `k`.
pub fn fixed_pairs(channels: &ChannelRealization) -> Result<Vec<UserPair>, PairingError> {
    let n = channels.n_users();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(PairingError::UserCount(n));
    }
    Ok((0..n / 2).map(|k| assign_roles(channels, 2 * k, 2 * k + 1)).collect())
}

/// Allocation proxy of one pair on a candidate antenna set:
/// `sum_u log2 det(I + snr * H_u,S^H H_u,S)` over both pair members.
pub fn pair_proxy(channels: &ChannelRealization, pair: &UserPair, antennas: &[usize], snr: f64) -> f64 {
    [pair.index_user, pair.symbol_user]
        .iter()
        .map(|&u| {
            let h = select_columns(channels.user(u), antennas);
            let gram = h.adjoint() * &h * Complex64::from(snr) + CMat::identity(antennas.len(), antennas.len());
            log2_det_hpd(gram).expect("I + PSD is positive definite")
        })
        .sum()
}

/// Sum of per-pair proxies; pair `k` is served by group `k`.
pub fn partition_objective(
    channels: &ChannelRealization,
    pairs: &[UserPair],
    partition: &AntennaPartition,
    snr: f64,
) -> f64 {
    pairs
        .iter()
        .zip(&partition.groups)
        .map(|(p, g)| pair_proxy(channels, p, g, snr))
        .sum()
}

/// Number of ordered balanced partitions, `n_tx! / (L!)^K`.
pub fn partition_count(n_tx: usize, n_groups: usize) -> f64 {
    let l = n_tx / n_groups;
    let ln_fact = |n: usize| (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
    (ln_fact(n_tx) - n_groups as f64 * ln_fact(l)).exp().round()
}

/// Assigns antenna groups to pairs.
///
/// `snr` scales the channels inside the proxy objective (per-group transmit
/// power over noise). Exhaustive ties go to the lexicographically smallest
/// antenna-label vector.
pub fn allocate_antennas(
    channels: &ChannelRealization,
    pairs: &[UserPair],
    n_tx: usize,
    mode: AllocationMode,
    snr: f64,
) -> Result<AntennaPartition, PairingError> {
    let k = pairs.len();
    match mode {
        AllocationMode::Fixed => Ok(AntennaPartition::contiguous(n_tx, k)),
        AllocationMode::Greedy => Ok(greedy(channels, pairs, n_tx, snr)),
        AllocationMode::Exhaustive => {
            let count = partition_count(n_tx, k);
            if count > EXHAUSTIVE_LIMIT {
                return Err(PairingError::ExhaustiveTooLarge(count));
            }
            Ok(exhaustive(channels, pairs, n_tx, snr))
        }
    }
}

fn greedy(channels: &ChannelRealization, pairs: &[UserPair], n_tx: usize, snr: f64) -> AntennaPartition {
    let k = pairs.len();
    let l = n_tx / k;
    let mut groups: Vec<Vec<usize>> = vec![Vec::with_capacity(l); k];
    let mut free = vec![true; n_tx];
    for _ in 0..l {
        for (g, pair) in groups.iter_mut().zip(pairs) {
            let base = if g.is_empty() {
                0.0
            } else {
                pair_proxy(channels, pair, g, snr)
            };
            let mut best: Option<(f64, usize)> = None;
            for a in (0..n_tx).filter(|&a| free[a]) {
                g.push(a);
                let gain = pair_proxy(channels, pair, g, snr) - base;
                g.pop();
                if best.is_none_or(|(b, _)| gain > b) {
                    best = Some((gain, a));
                }
            }
            let (_, a) = best.expect("enough free antennas");
            free[a] = false;
            g.push(a);
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    AntennaPartition { groups }
}

fn exhaustive(channels: &ChannelRealization, pairs: &[UserPair], n_tx: usize, snr: f64) -> AntennaPartition {
    let k = pairs.len();
    let l = n_tx / k;
    let mut labels = vec![0usize; n_tx];
    let mut counts = vec![0usize; k];
    let mut best: Option<(f64, AntennaPartition)> = None;

    fn recurse(
        pos: usize,
        l: usize,
        labels: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pos == labels.len() {
            visit(labels);
            return;
        }
        for g in 0..counts.len() {
            if counts[g] < l {
                counts[g] += 1;
                labels[pos] = g;
                recurse(pos + 1, l, labels, counts, visit);
                counts[g] -= 1;
            }
        }
    }

    let mut visit = |labels: &[usize]| {
        let mut groups = vec![Vec::with_capacity(l); k];
        for (a, &g) in labels.iter().enumerate() {
            groups[g].push(a);
        }
        let part = AntennaPartition { groups };
        let obj = partition_objective(channels, pairs, &part, snr);
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, part));
        }
    };
    recurse(0, l, &mut labels, &mut counts, &mut visit);
    best.expect("at least one partition").1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;

    fn realization(mats: Vec<CMat>) -> ChannelRealization {
        ChannelRealization {
            per_user: mats,
            trial_index: 0,
        }
    }

    #[test]
    fn two_users_forced_pair() {
        let a = CMat::from_element(2, 2, Complex64::new(1.0, 0.0));
        let b = CMat::from_element(2, 2, Complex64::new(0.0, 2.0));
        let pairs = pair_users(&realization(vec![a, b])).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].symbol_user, 1);
        assert_eq!(pairs[0].index_user, 0);
        assert!((pairs[0].similarity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_directions_recovered() {
        let e = |i: usize, s: f64| CMat::from_fn(1, 2, |_, c| Complex64::new(if c == i { s } else { 0.0 }, 0.0));
        // users 0,2 along antenna 0; users 1,3 along antenna 1
        let ch = realization(vec![e(0, 1.0), e(1, 1.0), e(0, 3.0), e(1, 0.5)]);
        let pairs = pair_users(&ch).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].index_user, pairs[0].symbol_user), (0, 2));
        assert_eq!((pairs[1].index_user, pairs[1].symbol_user), (3, 1));
    }

    #[test]
    fn odd_user_count_rejected() {
        let a = CMat::identity(1, 1);
        assert_eq!(
            pair_users(&realization(vec![a.clone(), a.clone(), a])),
            Err(PairingError::UserCount(3))
        );
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partition_count(4, 2), 6.0);
        assert_eq!(partition_count(8, 4), 2520.0);
        assert_eq!(partition_count(8, 1), 1.0);
    }

    #[test]
    fn exhaustive_limit_enforced() {
        let mut cfg = SystemConfig::reference().with_pairs(8);
        cfg.n_tx = 16;
        let ch = crate::channel::gen_channel(&cfg, 0);
        let pairs = fixed_pairs(&ch).unwrap();
        let err = allocate_antennas(&ch, &pairs, 16, AllocationMode::Exhaustive, 1.0).unwrap_err();
        assert!(err.to_string().contains("greedy"));
        let part = allocate_antennas(&ch, &pairs, 16, AllocationMode::Greedy, 1.0).unwrap();
        assert!(part.is_valid(16));
    }

    #[test]
    fn single_pair_gets_everything() {
        let cfg = SystemConfig::reference().with_pairs(1);
        let ch = crate::channel::gen_channel(&cfg, 0);
        let pairs = pair_users(&ch).unwrap();
        for mode in [
            AllocationMode::Fixed,
            AllocationMode::Greedy,
            AllocationMode::Exhaustive,
        ] {
            let p = allocate_antennas(&ch, &pairs, 8, mode, 1e9).unwrap();
            assert_eq!(p.groups, vec![(0..8).collect::<Vec<_>>()]);
        }
    }
}
