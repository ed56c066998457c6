//! CSV and manifest writers.
//!
//! Numbers use Rust's shortest round-trip formatting, so identical results
//! give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use solitonlab_core::DensityCarpet;

use crate::error::CliError;

/// Table with a one-line `#` header naming each column with its unit.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = String::new();
    writeln!(out, "# {}", columns.join(",")).unwrap();
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

/// Matrix layout: first row the z grid [µm], first column the time [ms].
pub fn write_carpet(path: &Path, carpet: &DensityCarpet, stride: usize) -> Result<(), CliError> {
    let mut out = String::new();
    writeln!(
        out,
        "# density_per_um matrix; first row z_um (leading cell nan), first column t_ms"
    )
    .unwrap();
    out.push_str("nan");
    for z in carpet.grid().z() {
        write!(out, ",{z}").unwrap();
    }
    out.push('\n');
    for (t, frame) in carpet.times().iter().zip(carpet.frames()).step_by(stride.max(1)) {
        write!(out, "{t}").unwrap();
        for n in frame {
            write!(out, ",{n}").unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 5.300000000000001, 1e-300, -2.5e17] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(opt(None), "nan");
    }
}
