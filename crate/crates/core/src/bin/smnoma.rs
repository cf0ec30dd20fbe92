//! Command-line front end: `sweep`, `ber` and `validate`.
//!
//! Any trailing `--key value` pairs override config fields, e.g.
//! `smnoma sweep --config desk.toml --n_pairs 2 --qam_order 16`.
//! Set `SMNOMA_WORKERS` to pin the worker count.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use smnoma::config::{load_config_file, load_config_with_overrides, SystemConfig};
use smnoma::harness::{parse_schemes, run_ber, run_sweep, write_csv, write_csv_to, Scheme};
use smnoma::validate::run_checks;

#[derive(Parser)]
#[command(name = "smnoma", version, about = "Link simulator for NOMA over spatial modulation vs ZF/SIC NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ergodic rate (and SMN BER) sweep over the configured SNR grid.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "smn,cmn")]
        schemes: String,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
        overrides: Vec<String>,
    },
    /// Bit error rates of both SMN users at one SNR.
    Ber {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long)]
        bits: usize,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
        overrides: Vec<String>,
    },
    /// Cross-check the fast paths against reference implementations.
    Validate,
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            bail!("expected --key value, got `{flag}`");
        };
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.replace('-', "_"), v.to_string()));
            continue;
        }
        let value = it.next().with_context(|| format!("missing value for --{key}"))?;
        out.push((key.replace('-', "_"), value.clone()));
    }
    Ok(out)
}

fn load(path: Option<&Path>, overrides: Vec<(String, String)>) -> Result<SystemConfig> {
    let cfg = match path {
        Some(p) => load_config_file(p, &overrides)?,
        None => load_config_with_overrides(&SystemConfig::reference().to_toml(), &overrides)?,
    };
    Ok(cfg)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sweep {
            config,
            schemes,
            out,
            trials,
            seed,
            overrides,
        } => {
            let mut ov = parse_overrides(&overrides)?;
            if let Some(t) = trials {
                ov.push(("n_trials".into(), t.to_string()));
            }
            if let Some(s) = seed {
                ov.push(("seed".into(), s.to_string()));
            }
            let cfg = load(config.as_deref(), ov)?;
            let schemes: Vec<Scheme> = parse_schemes(&schemes)?;
            let result = run_sweep(&cfg, &schemes)?;
            match out {
                Some(p) => write_csv(&result, &p).with_context(|| format!("writing {}", p.display()))?,
                None => write_csv_to(&result, std::io::stdout().lock())?,
            }
        }
        Command::Ber {
            config,
            snr_db,
            bits,
            overrides,
        } => {
            let cfg = load(config.as_deref(), parse_overrides(&overrides)?)?;
            let r = run_ber(&cfg, snr_db, bits)?;
            println!("snr_db,index_ber,symbol_ber,index_errors,index_bits,symbol_errors,symbol_bits");
            println!(
                "{snr_db},{},{},{},{},{},{}",
                r.index_ber,
                r.symbol_ber,
                r.counts.index_errors,
                r.counts.index_bits,
                r.counts.symbol_errors,
                r.counts.symbol_bits
            );
        }
        Command::Validate => {
            let checks = run_checks();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.passed) {
                bail!("validation failed");
            }
        }
    }
    Ok(())
}
