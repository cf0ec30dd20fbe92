//! Finite-alphabet rates of the two SM users as SNR grows.
//!
//! `cargo run --release --example mutual_information`

use smnoma::modem::make_constellation;
use smnoma::rates::{mi_index_user, mi_symbol_user};
use smnoma::rng::{complex_normal, Domain, StreamKey};
use smnoma::Complex64;

fn main() {
    let c = make_constellation(16).unwrap();
    let mut rng = StreamKey::new(7, Domain::Test, &[]).rng();
    // Four antennas seen through two receive antennas.
    let cols: Vec<Vec<Complex64>> = (0..4)
        .map(|_| (0..2).map(|_| complex_normal(&mut rng)).collect())
        .collect();

    println!("snr_db  index(<=2)  symbol(<=4)");
    for snr_db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
        let noise = 10f64.powf(-snr_db / 10.0);
        let key = StreamKey::new(7, Domain::Test, &[snr_db as i64 as u64]);
        let i = mi_index_user(&cols, &c, noise, 20_000, key.child(0));
        let s = mi_symbol_user(&cols, &c, noise, 20_000, key.child(1));
        println!(
            "{snr_db:6}  {:.3}±{:.3}  {:.3}±{:.3}",
            i.value, i.std_error, s.value, s.std_error
        );
    }
}
