use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Compact JSON with every float written at 17 significant digits, so equal
/// runs produce byte-identical files. Non-finite floats become `null`.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", f64::from(value))
    }
}

pub fn to_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = String::from_utf8(to_bytes(&vec![0.1, -2.5, f64::NAN]).unwrap()).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,-2.5000000000000000e0,null]\n");
    }

    #[test]
    fn output_parses_back_exactly() {
        let v = [std::f64::consts::PI, 1e300, -0.0];
        let back: Vec<f64> = serde_json::from_slice(&to_bytes(&v).unwrap()).unwrap();
        assert_eq!(back, v);
    }
}
