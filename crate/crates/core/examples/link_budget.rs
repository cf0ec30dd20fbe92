//! Path loss, noise floor and per-user receive SNR for the reference setup.
//!
//! `cargo run --example link_budget`

use smnoma::channel::{gen_channel, link_budget, noise_power_dbm, pathloss_db};
use smnoma::config::SystemConfig;

fn main() {
    let cfg = SystemConfig::desk();
    println!(
        "noise power over {:.2} MHz: {:.2} dBm",
        cfg.bandwidth_hz / 1e6,
        noise_power_dbm(&cfg)
    );
    for d in [0.1, 0.15] {
        println!("path loss at {d} km: {:.2} dB", pathloss_db(d).unwrap());
    }

    println!("\n tx dBm | receive SNR per user (dB)");
    for &snr in &cfg.snr_grid_db {
        let lb = link_budget(&cfg, snr).unwrap();
        let per_user: Vec<String> = (0..cfg.n_users())
            .map(|u| format!("{:6.1}", lb.received_snr_db(u)))
            .collect();
        println!(" {snr:6} | {}", per_user.join(" "));
    }

    let ch = gen_channel(&cfg, 0);
    println!(
        "\ntrial 0: {} users, each {}x{}",
        ch.n_users(),
        ch.user(0).nrows(),
        ch.user(0).ncols()
    );
    for u in 0..ch.n_users() {
        println!("  user {u}: ||H||_F^2 = {:.3e}", ch.user(u).norm_squared());
    }
}
