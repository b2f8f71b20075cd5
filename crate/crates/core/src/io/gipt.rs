//! `GIPT` pattern-stack files.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "GIPT"
//! 4       1     version = 1
//! 5       1     dtype: 0 = packed bits, 1 = f32
//! 6       4     M (u32 LE)
//! 10      4     rows (u32 LE)
//! 14      4     cols (u32 LE)
//! 18      ...   payload
//! ```
//!
//! Packed-bit payloads store each pattern row-major, eight pixels per byte,
//! most significant bit first, padded with zero bits to a byte boundary per
//! pattern. `f32` payloads store little-endian floats pattern-major,
//! row-major.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::patterns::PatternStack;

const FORMAT: &str = "GIPT";
pub const MAGIC: &[u8; 4] = b"GIPT";
pub const VERSION: u8 = 1;
pub const DTYPE_PACKED_BITS: u8 = 0;
pub const DTYPE_F32: u8 = 1;

/// Writes `patterns`, packing bits when every value is 0 or 1.
pub fn write_patterns<W: Write>(mut writer: W, patterns: &PatternStack) -> Result<()> {
    let dims = [patterns.count(), patterns.rows(), patterns.cols()];
    let mut header = Vec::with_capacity(18);
    header.extend_from_slice(MAGIC);
    header.push(VERSION);
    let binary = patterns.is_binary();
    header.push(if binary { DTYPE_PACKED_BITS } else { DTYPE_F32 });
    for d in dims {
        let d = u32::try_from(d)
            .map_err(|_| Error::Parameter(format!("dimension {d} does not fit in u32")))?;
        header.extend_from_slice(&d.to_le_bytes());
    }
    writer.write_all(&header)?;

    if binary {
        let bytes_per_pattern = patterns.pixels_per_pattern().div_ceil(8);
        let mut packed = vec![0u8; bytes_per_pattern];
        for pattern in patterns.iter() {
            packed.fill(0);
            for (idx, &v) in pattern.iter().enumerate() {
                if v == 1.0 {
                    packed[idx / 8] |= 0x80 >> (idx % 8);
                }
            }
            writer.write_all(&packed)?;
        }
    } else {
        let bytes: Vec<u8> = patterns
            .data()
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        writer.write_all(&bytes)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a pattern stack, rejecting unknown versions, dtypes and trailing
/// bytes.
pub fn read_patterns<R: Read>(mut reader: R) -> Result<PatternStack> {
    let mut header = [0u8; 18];
    reader
        .read_exact(&mut header)
        .map_err(|_| Error::format(FORMAT, "truncated header"))?;
    if &header[0..4] != MAGIC {
        return Err(Error::format(FORMAT, "bad magic"));
    }
    if header[4] != VERSION {
        return Err(Error::format(
            FORMAT,
            format!("unsupported version {}", header[4]),
        ));
    }
    let dtype = header[5];
    let field = |at: usize| u32::from_le_bytes(header[at..at + 4].try_into().unwrap()) as usize;
    let (count, rows, cols) = (field(6), field(10), field(14));
    let k = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::format(FORMAT, "dimensions overflow"))?;

    let mut payload = Vec::new();
    reader.read_to_end(&mut payload)?;

    let data = match dtype {
        DTYPE_PACKED_BITS => {
            let bytes_per_pattern = k.div_ceil(8);
            if Some(payload.len()) != count.checked_mul(bytes_per_pattern) {
                return Err(Error::format(
                    FORMAT,
                    format!(
                        "expected {} payload bytes, found {}",
                        count.saturating_mul(bytes_per_pattern),
                        payload.len()
                    ),
                ));
            }
            let mut data = Vec::with_capacity(count * k);
            for chunk in payload.chunks_exact(bytes_per_pattern.max(1)).take(count) {
                data.extend((0..k).map(|idx| {
                    if chunk[idx / 8] & (0x80 >> (idx % 8)) != 0 {
                        1.0f32
                    } else {
                        0.0
                    }
                }));
            }
            data
        }
        DTYPE_F32 => {
            if Some(payload.len()) != count.checked_mul(k).and_then(|n| n.checked_mul(4)) {
                return Err(Error::format(
                    FORMAT,
                    format!(
                        "payload of {} bytes does not hold {count} f32 patterns",
                        payload.len()
                    ),
                ));
            }
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect()
        }
        other => return Err(Error::format(FORMAT, format!("unknown dtype {other}"))),
    };
    PatternStack::new(count, rows, cols, data).map_err(|e| Error::format(FORMAT, e.to_string()))
}

pub fn save_patterns(path: impl AsRef<Path>, patterns: &PatternStack) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_patterns(std::io::BufWriter::new(file), patterns)
}

pub fn load_patterns(path: impl AsRef<Path>) -> Result<PatternStack> {
    let file = std::fs::File::open(path)?;
    read_patterns(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::generate_patterns;
    use proptest::prelude::*;

    #[test]
    fn packed_layout() {
        // 1x3 patterns: [1,0,1] and [0,1,1]
        let stack = PatternStack::new(2, 1, 3, vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_patterns(&mut buf, &stack).unwrap();
        assert_eq!(&buf[0..6], b"GIPT\x01\x00");
        assert_eq!(&buf[6..18], &[2, 0, 0, 0, 1, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(&buf[18..], &[0b1010_0000, 0b0110_0000]);
        assert_eq!(read_patterns(&buf[..]).unwrap(), stack);
    }

    #[test]
    fn header_encodes_dimensions() {
        let stack = generate_patterns(8, 8, 4, 0.5, 7).unwrap();
        let mut buf = Vec::new();
        write_patterns(&mut buf, &stack).unwrap();
        assert!(buf.starts_with(b"GIPT"));
        assert_eq!(u32::from_le_bytes(buf[6..10].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(buf[10..14].try_into().unwrap()), 8);
        assert_eq!(u32::from_le_bytes(buf[14..18].try_into().unwrap()), 8);
        assert_eq!(buf.len(), 18 + 4 * 8);
    }

    #[test]
    fn float_payload_for_graded_patterns() {
        let stack = PatternStack::new(1, 1, 2, vec![0.25, 3.5]).unwrap();
        let mut buf = Vec::new();
        write_patterns(&mut buf, &stack).unwrap();
        assert_eq!(buf[5], DTYPE_F32);
        assert_eq!(buf.len(), 18 + 8);
        assert_eq!(read_patterns(&buf[..]).unwrap(), stack);
    }

    #[test]
    fn rejects_corrupt_files() {
        let stack = generate_patterns(3, 3, 2, 0.5, 1).unwrap();
        let mut buf = Vec::new();
        write_patterns(&mut buf, &stack).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_patterns(&bad[..]).is_err());
        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(read_patterns(&bad[..]).is_err());
        let mut bad = buf.clone();
        bad[5] = 7;
        assert!(read_patterns(&bad[..]).is_err());
        let mut bad = buf.clone();
        bad.push(0);
        assert!(read_patterns(&bad[..]).is_err());
        assert!(read_patterns(&buf[..buf.len() - 1]).is_err());
        assert!(read_patterns(&buf[..10]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            rows in 1usize..9,
            cols in 1usize..9,
            count in 1usize..6,
            seed in any::<u64>(),
            graded in any::<bool>(),
        ) {
            let mut stack = generate_patterns(rows, cols, count, 0.5, seed).unwrap();
            if graded {
                let data = stack.data().iter().enumerate()
                    .map(|(i, v)| v * (1.0 + i as f32 / 7.0))
                    .collect();
                stack = PatternStack::new(count, rows, cols, data).unwrap();
            }
            let mut buf = Vec::new();
            write_patterns(&mut buf, &stack).unwrap();
            let back = read_patterns(&buf[..]).unwrap();
            prop_assert_eq!(back.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            stack.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back, stack);
        }
    }
}
