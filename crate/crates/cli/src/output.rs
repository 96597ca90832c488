//! Deterministic CSV and JSON writers: 17 significant digits in lowercase
//! scientific notation, '\n' line endings, fixed field order.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};
use thirdorder::{Coefficients64, Field};

use crate::config::Options;
use crate::CliError;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// SHA-256 of the normalized Fourier coefficients.
pub fn coefficient_hash(c: &Coefficients64) -> String {
    let mut text = String::new();
    for (tag, field) in [("p", Field::P), ("q", Field::Q)] {
        for (n, v) in c.modes(field).iter().enumerate() {
            text.push_str(&format!("{tag} {n} {} {}\n", fmt_f64(v.re), fmt_f64(v.im)));
        }
    }
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("writing {}: {e}", path.display()))
}

pub fn to_json_string<S: Serialize>(value: &S) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| CliError::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    std::fs::write(path, to_json_string(value)?).map_err(|e| io_err(path, e))
}

/// Provenance carried by every data file.
#[derive(Serialize)]
pub struct Header<'a> {
    pub coefficients_sha256: String,
    pub options: &'a Options,
}

/// A CSV file with `#` comment lines carrying the header, then the table.
pub fn write_csv(path: &Path, header: &Header, columns: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut buf = Vec::new();
    let opts = serde_json::to_string(header.options).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(buf, "# coefficients_sha256={}", header.coefficients_sha256).map_err(|e| io_err(path, e))?;
    writeln!(buf, "# options={opts}").map_err(|e| io_err(path, e))?;
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        w.write_record(columns).map_err(|e| io_err(path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    std::fs::write(path, buf).map_err(|e| io_err(path, e))
}

/// `<stem>_meta.json`: the header plus run-dependent fields (timestamp,
/// output directory, thread count, version).
pub fn write_meta(dir: &Path, stem: &str, command: &str, header: &Header, threads: Option<usize>) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Meta<'a> {
        command: &'a str,
        version: &'a str,
        #[serde(flatten)]
        header: &'a Header<'a>,
        out: String,
        threads: Option<usize>,
        timestamp_unix: u64,
    }
    let timestamp_unix = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = Meta { command, version: env!("CARGO_PKG_VERSION"), header, out: dir.display().to_string(), threads, timestamp_unix };
    write_json(&dir.join(format!("{stem}_meta.json")), &meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.375), "-3.7500000000000000e-1");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn json_numbers_use_fixed_digits() {
        let s = to_json_string(&[0.1f64, 3.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("3.0000000000000000e0"));
    }
}
