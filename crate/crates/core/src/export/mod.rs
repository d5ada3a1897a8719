//! File formats: DOT and GraphML views of a network, CSV degree tables.
//!
//! Node ids are the integer labels. The real value `i / 2^n` is carried as an
//! attribute. Map parameters travel as graph-level attributes so a file can be
//! read back into an identical [`StateNetwork`](crate::network::StateNetwork).

pub mod csv;
pub mod dot;
pub mod graphml;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fixed_point::{ControlParameter, LogisticMap, Precision, QuantizationMode};

pub use self::csv::{export_degree_csv, read_degree_csv, write_degree_csv};
pub use dot::{export_dot, parse_dot, read_dot, write_dot};
pub use graphml::{export_graphml, parse_graphml, read_graphml, validate_graphml, write_graphml};

/// Exact decimal expansion of `i / 2^bits`, e.g. `0.03125`.
pub fn dyadic_decimal(i: u64, bits: u32) -> String {
    let scale = 1u128 << bits;
    let (whole, frac) = (u128::from(i) / scale, u128::from(i) % scale);
    if frac == 0 {
        return whole.to_string();
    }
    // frac / 2^bits = frac * 5^bits / 10^bits
    let digits = frac * 5u128.pow(bits);
    let s = format!("{digits:0width$}", width = bits as usize);
    format!("{whole}.{}", s.trim_end_matches('0'))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn write_to_path(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Map parameters recovered from a file header.
#[derive(Default)]
pub(crate) struct HeaderFields {
    pub numerator: Option<u64>,
    pub exponent: Option<u32>,
    pub bits: Option<u32>,
    pub mode: Option<QuantizationMode>,
}

impl HeaderFields {
    pub fn set(&mut self, format: &'static str, key: &str, value: &str) -> Result<()> {
        let bad = |_| Error::format(format, format!("bad value {value:?} for {key}"));
        match key {
            "mu_numerator" => self.numerator = Some(value.parse().map_err(bad)?),
            "mu_exponent" => self.exponent = Some(value.parse().map_err(bad)?),
            "bits" => self.bits = Some(value.parse().map_err(bad)?),
            "quantization" => {
                self.mode = Some(
                    value
                        .parse()
                        .map_err(|e: String| Error::format(format, e))?,
                )
            }
            _ => {}
        }
        Ok(())
    }

    pub fn into_map(self, format: &'static str) -> Result<LogisticMap> {
        let missing = |k: &str| Error::format(format, format!("missing graph attribute {k}"));
        let mu = ControlParameter::new(
            self.numerator.ok_or_else(|| missing("mu_numerator"))?,
            self.exponent.ok_or_else(|| missing("mu_exponent"))?,
        )?;
        let n = Precision::new(self.bits.ok_or_else(|| missing("bits"))?, &mu)?;
        Ok(LogisticMap::new(
            mu,
            n,
            self.mode.ok_or_else(|| missing("quantization"))?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::dyadic_decimal;

    #[test]
    fn decimals() {
        assert_eq!(dyadic_decimal(0, 5), "0");
        assert_eq!(dyadic_decimal(32, 5), "1");
        assert_eq!(dyadic_decimal(1, 5), "0.03125");
        assert_eq!(dyadic_decimal(16, 5), "0.5");
        assert_eq!(dyadic_decimal(3, 2), "0.75");
        assert_eq!(dyadic_decimal(1, 31), "0.0000000004656612873077392578125");
        assert_eq!(dyadic_decimal(1 << 31, 31), "1");
    }
}
