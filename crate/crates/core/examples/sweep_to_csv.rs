//! Small SMN vs CMN sweep written as CSV.
//!
//! `cargo run --release --example sweep_to_csv -- [out.csv]`

use smnoma::config::SystemConfig;
use smnoma::harness::{run_sweep, write_csv, write_csv_to, Scheme};

fn main() {
    let mut cfg = SystemConfig::desk();
    cfg.n_trials = 300;
    let result = run_sweep(&cfg, &[Scheme::Smn, Scheme::Cmn]).unwrap();
    for snr in &cfg.snr_grid_db {
        let s = result.row(Scheme::Smn, *snr).unwrap();
        let c = result.row(Scheme::Cmn, *snr).unwrap();
        println!(
            "{snr:>5} dBm  SMN {:6.2} ± {:.2}   CMN {:6.2} ± {:.2}",
            s.sum_rate, s.sum_rate_std_error, c.sum_rate, c.sum_rate_std_error
        );
    }
    match std::env::args().nth(1) {
        Some(path) => write_csv(&result, path.as_ref()).unwrap(),
        None => write_csv_to(&result, std::io::stdout().lock()).unwrap(),
    }
}
