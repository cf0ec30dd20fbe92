//! CSV rendering of sweep results.
//!
//! Columns are fixed (see [`CSV_HEADER`]), `\n` line endings, `.` decimal
//! separator, numbers with 9 significant digits (`%.9g` style). CMN rows
//! leave the BER columns empty.

use super::{HarnessError, Scheme, SweepResult, SweepRow};
use std::io::{Read, Write};
use std::path::Path;

pub const CSV_HEADER: [&str; 9] = [
    "scheme",
    "snr_db",
    "sum_rate",
    "worst_rate",
    "index_ber",
    "symbol_ber",
    "n_trials",
    "seed",
    "config_digest",
];

/// `printf("%.9g")`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Csv(e.to_string())
}

pub fn write_csv_to<W: Write>(result: &SweepResult, out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(format_sig9).unwrap_or_default();
    for r in &result.rows {
        w.write_record([
            r.scheme.to_string(),
            format_sig9(r.snr_db),
            format_sig9(r.sum_rate),
            format_sig9(r.worst_rate),
            opt(r.index_ber),
            opt(r.symbol_ber),
            r.n_trials.to_string(),
            r.seed.to_string(),
            r.config_digest.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv_to(result, &mut buf)?;
    buf.flush().map_err(io)
}

/// Parses CSV produced by [`write_csv`]. Fields outside the CSV column set
/// (per-user rates, standard error) come back empty.
pub fn read_csv_from<R: Read>(input: R) -> Result<SweepResult, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Csv(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(csv_err);
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(SweepRow {
            scheme: rec[0].parse::<Scheme>()?,
            snr_db: num(&rec[1])?,
            sum_rate: num(&rec[2])?,
            sum_rate_std_error: 0.0,
            worst_rate: num(&rec[3])?,
            per_user_rates: Vec::new(),
            index_ber: opt(&rec[4])?,
            symbol_ber: opt(&rec[5])?,
            n_trials: rec[6].parse().map_err(csv_err)?,
            seed: rec[7].parse().map_err(csv_err)?,
            config_digest: rec[8].to_string(),
        });
    }
    Ok(SweepResult { rows })
}

pub fn read_csv(path: &Path) -> Result<SweepResult, HarnessError> {
    let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv_from(file)
}
