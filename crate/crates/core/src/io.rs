//! On-disk formats: the binary `KLST` table, CSV number formatting, and
//! atomic file writes.
//!
//! `KLST` layout, all little-endian:
//!
//! | offset | size | field                  |
//! |--------|------|------------------------|
//! | 0      | 4    | magic `b"KLST"`        |
//! | 4      | 4    | format version (u32)   |
//! | 8      | 8    | p (u64)                |
//! | 16     | 1    | method (0 naive, 1 batch_dft) |
//! | 17     | 8    | err_bound (f64)        |
//! | 25     | 8(p-1) | K_p(a), a = 1..p-1 (f64) |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kloosterman::{KloostermanTable, Method};

pub const MAGIC: &[u8; 4] = b"KLST";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 25;

pub fn encode_table(table: &KloostermanTable) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * table.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&table.p().to_le_bytes());
    buf.push(table.method().as_byte());
    buf.extend_from_slice(&table.err_bound().to_le_bytes());
    for v in table.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

/// Decodes a `KLST` image; `expected_p` rejects tables for another prime.
pub fn decode_table(bytes: &[u8], expected_p: Option<u64>) -> Result<KloostermanTable> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "truncated header: {} bytes, need {HEADER_LEN}",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &bytes[0..4])));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let p = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if let Some(expected) = expected_p {
        if expected != p {
            return Err(Error::PrimeMismatch { expected, found: p });
        }
    }
    if p < 3 {
        return Err(Error::Format(format!("p = {p} in header")));
    }
    let method = Method::from_byte(bytes[16])
        .ok_or_else(|| Error::Format(format!("unknown method byte {}", bytes[16])))?;
    let err_bound = f64::from_le_bytes(bytes[17..25].try_into().unwrap());
    let want = (p - 1)
        .checked_mul(8)
        .and_then(|n| n.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| Error::Format(format!("p = {p} overflows the body length")))?;
    if (bytes.len() as u64) < want {
        return Err(Error::Format(format!(
            "truncated body: {} bytes, need {want}",
            bytes.len()
        )));
    }
    if bytes.len() as u64 > want {
        return Err(Error::Format(format!(
            "{} trailing bytes after body",
            bytes.len() as u64 - want
        )));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    KloostermanTable::from_parts(p, values, method, err_bound)
}

pub fn write_table(table: &KloostermanTable, path: &Path) -> Result<()> {
    write_atomic(path, &encode_table(table))
}

pub fn read_table(path: &Path, expected_p: Option<u64>) -> Result<KloostermanTable> {
    decode_table(&fs::read(path)?, expected_p)
}

/// Writes via a sibling temp file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("no file name in {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// 17 significant digits; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Minimal CSV builder; every field here is numeric or a fixed identifier.
#[derive(Debug, Default, Clone)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Csv { out }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;
    use crate::kloosterman::kloosterman_table_batch;
    use proptest::prelude::*;

    fn table101() -> KloostermanTable {
        kloosterman_table_batch(&PrimeContext::new(101).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_bit_identical() {
        let t = table101();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.klst");
        write_table(&t, &path).unwrap();
        let back = read_table(&path, Some(101)).unwrap();
        assert_eq!(back.p(), 101);
        assert_eq!(back.method(), t.method());
        assert_eq!(back.err_bound().to_bits(), t.err_bound().to_bits());
        for (x, y) in t.values().iter().zip(back.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(fs::read(&path).unwrap().len(), HEADER_LEN + 8 * 100);
    }

    #[test]
    fn format_errors() {
        let bytes = encode_table(&table101());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_table(&bad, None), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(decode_table(&bad, None), Err(Error::Format(_))));
        assert!(matches!(
            decode_table(&bytes[..bytes.len() - 3], None),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_table(&bytes[..10], None),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_table(&bytes, Some(103)),
            Err(Error::PrimeMismatch {
                expected: 103,
                found: 101
            })
        ));
        let mut bad = bytes.clone();
        bad[16] = 7;
        assert!(matches!(decode_table(&bad, None), Err(Error::Format(_))));
    }

    #[test]
    fn header_layout() {
        let bytes = encode_table(&table101());
        assert_eq!(&bytes[0..4], b"KLST");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..16], &101u64.to_le_bytes());
        assert_eq!(bytes[16], 1);
    }

    proptest! {
        #[test]
        fn csv_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
