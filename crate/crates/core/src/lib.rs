//! Link-level Monte Carlo simulator for downlink NOMA in which each user
//! pair shares an antenna group through spatial modulation (SMN), compared
//! against superposition coding with zero-forcing beams and SIC (CMN).
//!
//! In SMN each base-station antenna group serves one user pair: the
//! *index user* decodes which antenna of the group is active, the
//! *symbol user* decodes the QAM point it carries. CMN serves the same
//! pairs as two-user clusters with zero-forcing beams, superposition
//! coding and successive interference cancellation.
//!
//! The crate is organized bottom-up:
//!
//! - [`config`]: experiment description, TOML loading and validation.
//! - [`channel`]: link budget and path-loss × Rayleigh channel draws.
//! - [`modem`]: Gray QAM, bit splitting and SM mapping.
//! - [`detect`]: MRC index detection, joint ML detection, whitening.
//! - [`baseline`]: clustering, ZF beams and SIC rates for CMN.
//! - [`rates`]: finite-alphabet mutual-information estimators for SMN.
//! - [`pairing`]: user pairing and antenna allocation.
//! - [`harness`]: sweeps, BER simulation and CSV output.
//! - [`oracle`]: straight-line reference implementations used to
//!   cross-check the fast paths (tests and `smnoma validate`).
//!
//! # Quick start
//!
//! ```no_run
//! use smnoma::config::SystemConfig;
//! use smnoma::harness::{run_sweep, Scheme};
//!
//! let mut cfg = SystemConfig::desk();
//! cfg.n_trials = 200;
//! let result = run_sweep(&cfg, &[Scheme::Smn, Scheme::Cmn]).unwrap();
//! for row in &result.rows {
//!     println!("{} {:>5} dB  sum {:.3}", row.scheme, row.snr_db, row.sum_rate);
//! }
//! ```

pub mod baseline;
pub mod channel;
pub mod config;
pub mod detect;
pub mod harness;
pub mod linalg;
pub mod modem;
pub mod oracle;
pub mod pairing;
pub mod rates;
pub mod rng;
pub mod stats;
pub mod validate;

pub use num_complex::Complex64;
