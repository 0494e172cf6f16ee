//! File formats: `#`-prefixed provenance header followed by a CSV or JSON body.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use pptt_core::{EmpiricalDistribution, Mode};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip is not fixed-width; seventeen significant digits are.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn header<C: Serialize>(command: &str, config: &C) -> CliResult<String> {
    let json = serde_json::to_string(config).map_err(|e| CliError::io("serializing config", e))?;
    Ok(format!("# pptt {VERSION} {command}\n# config: {json}\n"))
}

pub fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(&format!("creating {}", p.display()), e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_csv(
    path: Option<&Path>,
    header: &str,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<()> {
    let mut out = open_out(path)?;
    out.write_all(header.as_bytes())
        .map_err(|e| CliError::io("writing header", e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)
        .map_err(|e| CliError::io("writing CSV", e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::io("writing CSV", e))?;
    }
    w.flush().map_err(|e| CliError::io("writing CSV", e))
}

/// Provenance block embedded at the top of every JSON report.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C) -> CliResult<Self> {
        Ok(Self {
            schema: SCHEMA,
            tool: "pptt",
            version: VERSION,
            command,
            config: serde_json::to_value(config).map_err(|e| CliError::io("serializing config", e))?,
        })
    }
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut out = open_out(path)?;
    let body = serde_json::to_string_pretty(value).map_err(|e| CliError::io("serializing report", e))?;
    out.write_all(body.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("writing JSON", e))
}

pub const SAMPLE_COLUMNS: [&str; 6] = ["sample_id", "k", "N", "mode", "tau", "censored"];

/// Read a sample CSV back into a distribution. Censored rows have an empty
/// `tau` field.
pub fn read_samples(path: &Path) -> CliResult<EmpiricalDistribution> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::validation(format!("{}: missing column {name:?}", path.display())))
    };
    let (i_k, i_n, i_mode, i_tau, i_cens) = (col("k")?, col("N")?, col("mode")?, col("tau")?, col("censored")?);
    let mut samples = Vec::new();
    let mut censored = 0;
    let mut meta: Option<(f64, usize, Mode)> = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let bad = |what: &str| CliError::validation(format!("{}: row {}: bad {what}", path.display(), line + 1));
        if meta.is_none() {
            let k: f64 = record[i_k].parse().map_err(|_| bad("k"))?;
            let n: usize = record[i_n].parse().map_err(|_| bad("N"))?;
            let mode: Mode = record[i_mode].parse().map_err(|_| bad("mode"))?;
            meta = Some((k, n, mode));
        }
        match &record[i_cens] {
            "1" | "true" => censored += 1,
            "0" | "false" => samples.push(record[i_tau].parse::<f64>().map_err(|_| bad("tau"))?),
            _ => return Err(bad("censored flag")),
        }
    }
    let (k, n_dim, mode) = meta.ok_or_else(|| CliError::validation(format!("{}: no samples", path.display())))?;
    let meta = pptt_core::ensemble::DistributionMeta {
        n_dim,
        k,
        mode,
        n_samples: 0,
        master_seed: 0,
    };
    Ok(EmpiricalDistribution::new(samples, censored, meta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1000.0), "1.0000000000000000e3");
        assert_eq!(num(f64::INFINITY), "inf");
        for x in [0.823_959_216_501_5, 1e-300, 123456.789] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn header_is_comment_lines() {
        let h = header("sample", &serde_json::json!({"seed": 3})).unwrap();
        assert!(h.lines().all(|l| l.starts_with('#')));
        assert!(h.contains("\"seed\":3"));
    }
}
