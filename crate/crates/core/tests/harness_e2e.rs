use smnoma::channel::{link_budget, pathloss_gain};
use smnoma::config::{MrcMetric, SystemConfig};
use smnoma::harness::{
    parse_schemes, read_csv, read_csv_from, run_ber, run_sweep_with_workers, write_csv, write_csv_to, HarnessError,
    Scheme, CSV_HEADER,
};
use smnoma::oracle::naive_bpsk_sm_symbol_errors;

fn small() -> SystemConfig {
    let mut cfg = SystemConfig::desk();
    cfg.n_trials = 40;
    cfg.snr_grid_db = vec![-10.0, 10.0, 40.0];
    cfg.mi_samples = 50;
    cfg
}

fn csv_bytes(cfg: &SystemConfig, workers: usize) -> Vec<u8> {
    let r = run_sweep_with_workers(cfg, &[Scheme::Smn, Scheme::Cmn], Some(workers)).unwrap();
    let mut out = Vec::new();
    write_csv_to(&r, &mut out).unwrap();
    out
}

#[test]
fn sweep_is_worker_count_independent() {
    let cfg = small();
    let a = csv_bytes(&cfg, 1);
    assert_eq!(a, csv_bytes(&cfg, 3));
    assert_eq!(a, csv_bytes(&cfg, 1));
}

#[test]
fn seed_changes_results() {
    let cfg = small();
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(csv_bytes(&cfg, 1), csv_bytes(&other, 1));
}

#[test]
fn sweep_shape_and_csv_round_trip() {
    let cfg = small();
    let r = run_sweep_with_workers(&cfg, &[Scheme::Smn, Scheme::Cmn], Some(2)).unwrap();
    assert_eq!(r.rows.len(), 2 * cfg.snr_grid_db.len());
    for row in &r.rows {
        assert_eq!(row.n_trials, cfg.n_trials);
        assert_eq!(row.config_digest, cfg.digest());
        assert_eq!(row.per_user_rates.len(), cfg.n_users());
        assert!(row.worst_rate <= row.sum_rate / cfg.n_users() as f64 + 1e-12);
        assert_eq!(row.index_ber.is_some(), row.scheme == Scheme::Smn);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_csv(&r, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let back = read_csv(&path).unwrap();
    let mut again = Vec::new();
    write_csv_to(&back, &mut again).unwrap();
    assert_eq!(again, text.as_bytes());
    assert_eq!(back.rows.len(), r.rows.len());
    for (a, b) in back.rows.iter().zip(&r.rows) {
        assert_eq!((a.scheme, a.snr_db, a.seed), (b.scheme, b.snr_db, b.seed));
        assert!((a.sum_rate - b.sum_rate).abs() <= 1e-8 * b.sum_rate.abs().max(1.0));
    }
}

#[test]
fn csv_reader_rejects_foreign_headers() {
    assert!(read_csv_from("a,b\n1,2\n".as_bytes()).is_err());
}

#[test]
fn scheme_parsing() {
    assert_eq!(parse_schemes("smn,CMN").unwrap(), vec![Scheme::Smn, Scheme::Cmn]);
    assert!(matches!(parse_schemes("smn,foo"), Err(HarnessError::Scheme(_))));
}

#[test]
fn ber_rejects_partial_channel_uses() {
    let cfg = small();
    let per_use = cfg.bits_per_channel_use();
    assert!(run_ber(&cfg, 0.0, per_use + 1).is_err());
    assert!(run_ber(&cfg, 0.0, 0).is_err());
}

#[test]
fn ber_falls_with_snr() {
    let mut cfg = small();
    cfg.mrc_metric = MrcMetric::Normalized;
    let n = cfg.bits_per_channel_use() * 400;
    let lo = run_ber(&cfg, -10.0, n).unwrap();
    let hi = run_ber(&cfg, 20.0, n).unwrap();
    assert!(hi.index_ber < lo.index_ber && hi.symbol_ber < lo.symbol_ber);
}

#[test]
fn symbol_ber_matches_naive_link() {
    let mut cfg = SystemConfig::desk().with_pairs(1);
    cfg.n_tx = 2;
    cfg.n_rx = 1;
    cfg.qam_order = 2;
    let uses = 40_000;
    for snr_db in [-5.0, 0.0, 5.0] {
        let r = run_ber(&cfg, snr_db, cfg.bits_per_channel_use() * uses).unwrap();
        let p = link_budget(&cfg, snr_db).unwrap().tx_to_noise();
        let g = [
            pathloss_gain(cfg.distances_km[0]).unwrap(),
            pathloss_gain(cfg.distances_km[1]).unwrap(),
        ];
        let (k, n) = naive_bpsk_sm_symbol_errors([p * g[0], p * g[1]], uses, snr_db.to_bits());
        let q = k as f64 / n as f64;
        let pooled = (q + r.symbol_ber) / 2.0;
        let tol = 4.0 * (pooled * (1.0 - pooled) * 2.0 / uses as f64).sqrt();
        assert!(
            (q - r.symbol_ber).abs() <= tol,
            "{snr_db} dB: naive {q} fast {}",
            r.symbol_ber
        );
    }
}

#[test]
fn standard_error_scales_with_trial_budget() {
    let mut cfg = SystemConfig::desk();
    cfg.snr_grid_db = vec![10.0];
    cfg.mi_samples = 50;
    let se = |n: usize| {
        let mut c = cfg.clone();
        c.n_trials = n;
        let r = run_sweep_with_workers(&c, &[Scheme::Smn, Scheme::Cmn], Some(1)).unwrap();
        [r.rows[0].sum_rate_std_error, r.rows[1].sum_rate_std_error]
    };
    let (a, b) = (se(100), se(1000));
    for k in 0..2 {
        let ratio = b[k] / a[k] * 10f64.sqrt();
        assert!((ratio - 1.0).abs() <= 0.2, "scheme {k}: ratio {ratio}");
    }
}

#[test]
fn empty_sweep_writes_header_only() {
    let mut out = Vec::new();
    write_csv_to(&smnoma::harness::SweepResult { rows: Vec::new() }, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
}
