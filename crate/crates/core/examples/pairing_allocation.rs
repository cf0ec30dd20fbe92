//! User pairing by channel similarity and antenna-group allocation.
//!
//! `cargo run --example pairing_allocation`

use smnoma::channel::{gen_channel, link_budget};
use smnoma::config::{AllocationMode, SystemConfig};
use smnoma::pairing::{allocate_antennas, pair_users, partition_count, partition_objective};

fn main() {
    let cfg = SystemConfig::desk().with_pairs(2);
    let ch = gen_channel(&cfg, 11);
    let pairs = pair_users(&ch).unwrap();
    for p in &pairs {
        println!(
            "pair: index user {}, symbol user {}, similarity {:.3}",
            p.index_user, p.symbol_user, p.similarity
        );
    }

    // Per-group transmit power over noise at 30 dBm total.
    let snr = link_budget(&cfg, 30.0).unwrap().tx_to_noise() / cfg.n_pairs as f64;
    println!(
        "\n{} balanced partitions of {} antennas",
        partition_count(cfg.n_tx, cfg.n_pairs),
        cfg.n_tx
    );
    for mode in [
        AllocationMode::Fixed,
        AllocationMode::Greedy,
        AllocationMode::Exhaustive,
    ] {
        let part = allocate_antennas(&ch, &pairs, cfg.n_tx, mode, snr).unwrap();
        println!(
            "{mode:?}: groups {:?}, proxy {:.3}",
            part.groups,
            partition_objective(&ch, &pairs, &part, snr)
        );
    }
}
