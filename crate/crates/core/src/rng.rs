//! Counter-based random streams.
//!
//! Every random quantity in a simulation is drawn from a stream whose seed
//! is a pure function of the experiment seed and a tuple of counters
//! (trial, user, SNR index, purpose). Work items can therefore run in any
//! order or on any thread and still see exactly the same numbers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Purpose tags that separate streams sharing the same counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Fading = 1,
    MiSignal = 2,
    MiInterference = 3,
    BerPayload = 4,
    BerNoise = 5,
    Test = 0xFF,
}

/// Identifies one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64, domain: Domain, counters: &[u64]) -> Self {
        let mut h = splitmix64(seed ^ 0x5EED_0000_0000_0000);
        h = splitmix64(h ^ domain as u64);
        for &c in counters {
            h = splitmix64(h ^ c);
        }
        StreamKey(h)
    }

    /// Derives a child stream.
    pub fn child(self, counter: u64) -> Self {
        StreamKey(splitmix64(self.0 ^ splitmix64(counter)))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Circularly-symmetric complex Gaussian with `E|z|^2 = 1`.
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
