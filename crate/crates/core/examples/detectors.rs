//! Index-user MRC and symbol-user ML detection on a noisy SM channel use,
//! with and without whitening against another group's interference.
//!
//! `cargo run --example detectors`

use smnoma::config::MrcMetric;
use smnoma::detect::{ml_detect, mrc_detect_index_with, whiten};
use smnoma::linalg::CMat;
use smnoma::modem::make_constellation;
use smnoma::rng::{complex_normal, Domain, StreamKey};
use smnoma::Complex64;

fn main() {
    let c = make_constellation(16).unwrap();
    let mut rng = StreamKey::new(1, Domain::Test, &[]).rng();
    let nr = 4;
    let draw = |rng: &mut _| -> Vec<Vec<Complex64>> {
        (0..2)
            .map(|_| (0..nr).map(|_| complex_normal(rng) * 3.0).collect())
            .collect()
    };
    let own = draw(&mut rng);
    let other = draw(&mut rng);

    let mut errors = [0usize; 3];
    let uses = 2000;
    for t in 0..uses {
        let a = t % 2;
        let n = t % 16;
        let g = &other[(t / 2) % 2];
        let xg = c.point((t * 7) % 16);
        let y: Vec<Complex64> = (0..nr)
            .map(|r| own[a][r] * c.point(n) + g[r] * xg + complex_normal(&mut rng))
            .collect();

        if mrc_detect_index_with(&y, &own, MrcMetric::Normalized).antenna_local != a {
            errors[0] += 1;
        }
        let d = ml_detect(&y, &own, &c);
        if d.point_index != Some(n) {
            errors[1] += 1;
        }

        let cov = CMat::from_fn(nr, nr, |r, s| {
            other.iter().map(|g| g[r] * g[s].conj()).sum::<Complex64>() * 0.5
        });
        let (yw, cols) = whiten(&y, &own, 1.0, &cov).unwrap();
        if ml_detect(&yw, &cols, &c).point_index != Some(n) {
            errors[2] += 1;
        }
    }
    println!("index errors (normalized MRC):   {}/{uses}", errors[0]);
    println!("symbol errors (ML, unwhitened):  {}/{uses}", errors[1]);
    println!("symbol errors (ML, whitened):    {}/{uses}", errors[2]);
}
