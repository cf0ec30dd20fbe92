//! Conventional multi-antenna NOMA: clusters, zero-forcing beams and SIC rates.
//!
//! `cargo run --example conventional_noma`

use smnoma::baseline::{conventional_sum_rate, form_clusters, weak_rate_ceiling};
use smnoma::channel::{gen_channel, link_budget};
use smnoma::config::SystemConfig;

fn main() {
    let cfg = SystemConfig::desk();
    let ch = gen_channel(&cfg, 3);
    let clusters = form_clusters(&ch, cfg.pairing, cfg.noma_power_split).unwrap();
    for (k, c) in clusters.iter().enumerate() {
        println!("cluster {k}: strong user {}, weak user {}", c.strong_user, c.weak_user);
    }
    println!(
        "weak-user ceiling at beta = {}: {:.4} bits/s/Hz\n",
        cfg.noma_power_split,
        weak_rate_ceiling(cfg.noma_power_split)
    );

    for snr in [0.0, 20.0, 40.0] {
        let p = link_budget(&cfg, snr).unwrap().tx_to_noise();
        let r = conventional_sum_rate(&ch, &cfg, p).unwrap();
        let rates: Vec<String> = r.per_user_rate.iter().map(|x| format!("{x:.2}")).collect();
        println!("{snr:>4} dBm: sum {:.2}  per user [{}]", r.sum_rate, rates.join(", "));
    }
}
