//! Bit error rates of the index and symbol users over SNR.
//!
//! `cargo run --release --example ber_curve`

use smnoma::config::{MrcMetric, SystemConfig};
use smnoma::harness::run_ber;

fn main() {
    let mut cfg = SystemConfig::desk();
    let bits = cfg.bits_per_channel_use() * 5_000;
    println!("snr_dbm  index(raw)  index(norm)  symbol");
    for snr in [-20.0, -10.0, 0.0, 10.0, 20.0, 30.0] {
        cfg.mrc_metric = MrcMetric::Raw;
        let raw = run_ber(&cfg, snr, bits).unwrap();
        cfg.mrc_metric = MrcMetric::Normalized;
        let norm = run_ber(&cfg, snr, bits).unwrap();
        println!(
            "{snr:7}  {:.3e}   {:.3e}    {:.3e}",
            raw.index_ber, norm.index_ber, norm.symbol_ber
        );
    }
    let clean = run_ber(&cfg, f64::INFINITY, bits).unwrap();
    println!("noise-free: {:?}", clean.counts);
}
