use proptest::prelude::*;
use rand::Rng;
use smnoma::baseline::{
    cluster_rates, conventional_sum_rate, effective_channel, form_clusters, sic_rates, weak_rate_ceiling, zf_beams,
};
use smnoma::channel::{gen_channel, ChannelRealization};
use smnoma::config::{PairingMode, SystemConfig};
use smnoma::linalg::{CMat, CVec};
use smnoma::oracle::{box_muller, monolithic_conventional_rates, oracle_rng, projection_zf_beams};

fn random_effective(rng: &mut impl Rng, k: usize, n: usize) -> Vec<CVec> {
    (0..k).map(|_| CVec::from_fn(n, |_, _| box_muller(rng))).collect()
}

#[test]
fn zf_matches_projection_oracle() {
    let mut rng = oracle_rng(21);
    for k in [1usize, 2, 3, 4, 8] {
        for _ in 0..200 {
            let e = random_effective(&mut rng, k, 8);
            let w = zf_beams(&e).unwrap();
            let r = projection_zf_beams(&e);
            for j in 0..k {
                assert!((w[j].norm() - 1.0).abs() < 1e-12);
                // Same beam up to a unit phase.
                assert!((r[j].dotc(&w[j]).norm() - 1.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn zf_rejects_dependent_and_oversized_sets() {
    let mut rng = oracle_rng(22);
    let e = random_effective(&mut rng, 2, 4);
    assert!(zf_beams(&[e[0].clone(), e[0].clone() * smnoma::Complex64::new(0.0, 2.0)]).is_err());
    assert!(zf_beams(&random_effective(&mut rng, 5, 4)).is_err());
}

#[test]
fn effective_channel_is_dominant_mode() {
    let mut rng = oracle_rng(23);
    for _ in 0..100 {
        let h = CMat::from_fn(3, 5, |_, _| box_muller(&mut rng));
        let e = effective_channel(&h);
        let lmax = (h.adjoint() * &h).symmetric_eigen().eigenvalues.max();
        assert!((e.gain - lmax).abs() < 1e-9 * lmax);
        assert!((e.vector.norm_squared() - lmax).abs() < 1e-9 * lmax);
    }
}

#[test]
fn pipeline_matches_monolithic_oracle() {
    for k in [2usize, 4] {
        let cfg = SystemConfig::desk().with_pairs(k);
        for t in 0..100 {
            let ch = gen_channel(&cfg, t);
            for snr_db in [0.0, 30.0] {
                let p = smnoma::channel::link_budget(&cfg, snr_db).unwrap().tx_to_noise();
                let fast = conventional_sum_rate(&ch, &cfg, p).unwrap();
                let clusters = form_clusters(&ch, cfg.pairing, cfg.noma_power_split).unwrap();
                let members: Vec<(usize, usize)> = clusters.iter().map(|c| (c.strong_user, c.weak_user)).collect();
                let slow = monolithic_conventional_rates(&ch.per_user, &members, cfg.noma_power_split, p);
                for (a, b) in fast.per_user_rate.iter().zip(&slow) {
                    assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "K={k} t={t}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn strong_users_ignore_other_clusters_power() {
    let cfg = SystemConfig::desk();
    let ch = gen_channel(&cfg, 5);
    let clusters = form_clusters(&ch, PairingMode::PerRealization, 0.8).unwrap();
    let base = cluster_rates(&ch, &clusters, &[1e9; 4]);
    let bumped = cluster_rates(&ch, &clusters, &[1e9, 3e9, 1e7, 5e10]);
    let s0 = clusters[0].strong_user;
    assert_eq!(base.per_user_rate[s0], bumped.per_user_rate[s0]);
    let w0 = clusters[0].weak_user;
    assert!(base.leakage[w0] != bumped.leakage[w0]);
}

#[test]
fn rates_grow_with_power() {
    let cfg = SystemConfig::desk();
    for t in 0..20 {
        let ch: ChannelRealization = gen_channel(&cfg, t);
        let mut prev = conventional_sum_rate(&ch, &cfg, 1e6).unwrap();
        for p in [1e8, 1e10, 1e12, 1e14] {
            let r = conventional_sum_rate(&ch, &cfg, p).unwrap();
            for (a, b) in r.per_user_rate.iter().zip(&prev.per_user_rate) {
                assert!(a + 1e-12 >= *b);
            }
            prev = r;
        }
    }
}

#[test]
fn weak_rate_never_exceeds_ceiling() {
    let mut rng = oracle_rng(24);
    for _ in 0..100_000 {
        let beta: f64 = rng.random_range(0.01..0.99);
        let g: f64 = 10f64.powf(rng.random_range(-6.0..12.0));
        let p: f64 = 10f64.powf(rng.random_range(-6.0..12.0));
        let (s, w) = sic_rates(beta, g * 2.0, g, p, 1.0);
        assert!(w <= weak_rate_ceiling(beta) + 1e-12 && s >= 0.0 && w >= 0.0);
    }
}

proptest! {
    #[test]
    fn sic_closed_form(beta in 0.01f64..0.99, gs in 1e-3f64..1e3, gw in 1e-3f64..1e3, p in 1e-3f64..1e3, n in 0.1f64..10.0) {
        let (s, w) = sic_rates(beta, gs, gw, p, n);
        let ws = (1.0 + beta * p * gw / ((1.0 - beta) * p * gw + n)).log2();
        let ss = (1.0 + (1.0 - beta) * p * gs / n).log2();
        prop_assert!((s - ss).abs() <= 1e-12 * ss.max(1e-300));
        prop_assert!((w - ws).abs() <= 1e-12 * ws.max(1e-300));
    }
}
