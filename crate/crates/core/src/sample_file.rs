//! Sample files: UTF-8 text with one real per line, or raw little-endian
//! `f64` when the extension is `.f64` or `.bin`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Result, SurfError};

pub fn is_binary(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("f64") | Some("bin")
    )
}

pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    if is_binary(path) {
        let bytes = fs::read(path)?;
        if bytes.len() % 8 != 0 {
            return Err(SurfError::Parse {
                line: 0,
                msg: format!(
                    "binary sample file length {} is not a multiple of 8",
                    bytes.len()
                ),
            });
        }
        return Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect());
    }
    let reader = BufReader::new(fs::File::open(path)?);
    parse_text(reader)
}

pub fn parse_text<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|_| SurfError::Parse {
            line: i + 1,
            msg: format!("not a number: {trimmed:?}"),
        })?;
        if !v.is_finite() {
            return Err(SurfError::Parse {
                line: i + 1,
                msg: format!("not finite: {trimmed:?}"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

pub fn write_samples<W: Write>(mut w: W, values: &[f64], binary: bool) -> Result<()> {
    if binary {
        for v in values {
            w.write_all(&v.to_le_bytes())?;
        }
    } else {
        for v in values {
            writeln!(w, "{v}")?;
        }
    }
    Ok(())
}

pub fn write_samples_to(path: &Path, values: &[f64]) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_samples(&mut w, values, is_binary(path))?;
    w.flush()?;
    Ok(())
}
