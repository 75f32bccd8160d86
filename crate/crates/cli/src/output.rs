//! CSV time series and JSON run summaries.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use dnls_core::energy::EnergySample;
use serde::Serialize;

/// Column order of every time-series file.
pub const TIMESERIES_HEADER: &str = "t,l2,e_norm,kinetic,u,h,phi,psi,balance_residual,phi_residual";

/// 17 significant digits: round-trips every finite `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows(path: &Path, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> io::Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    out.write_all(header.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.write_all(line.join(",").as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_timeseries(path: &Path, samples: &[EnergySample]) -> io::Result<()> {
    write_rows(
        path,
        TIMESERIES_HEADER,
        samples.iter().map(|s| {
            vec![
                s.t,
                s.l2,
                s.e_norm,
                s.kinetic,
                s.u,
                s.h,
                s.phi,
                s.psi,
                s.balance_residual,
                s.phi_residual,
            ]
        }),
    )
}

/// Generic numeric table with a caller-supplied header.
pub fn write_table(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    write_rows(path, &columns.join(","), rows.iter().cloned())
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            pass,
            value,
            threshold,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Constants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub alpha_plus: Option<f64>,
    pub d: Option<f64>,
    pub d0: Option<f64>,
    pub c1: Option<f64>,
    pub p0: f64,
    pub absorbing_radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub subcommand: String,
    pub config: String,
    pub seed: Option<u64>,
    pub constants: Constants,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(path, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap();
            let digits = mantissa.chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17, "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn table_uses_lf_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_table(&path, &["a", "b"], &[vec![1.0, 2.0]]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
    }
}
