//! `GIMS` measurement files: magic `"GIMS"`, `u8` version 1, `u32` LE count
//! `M`, then `M` little-endian `f64` bucket values.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::patterns::MeasurementVector;

const FORMAT: &str = "GIMS";
pub const MAGIC: &[u8; 4] = b"GIMS";
pub const VERSION: u8 = 1;

pub fn write_measurements<W: Write>(mut writer: W, y: &MeasurementVector) -> Result<()> {
    let m = u32::try_from(y.len())
        .map_err(|_| Error::Parameter("too many measurements for u32 count".into()))?;
    writer.write_all(MAGIC)?;
    writer.write_all(&[VERSION])?;
    writer.write_all(&m.to_le_bytes())?;
    let bytes: Vec<u8> = y.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    writer.write_all(&bytes)?;
    writer.flush()?;
    Ok(())
}

pub fn read_measurements<R: Read>(mut reader: R) -> Result<MeasurementVector> {
    let mut header = [0u8; 9];
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
    let m = u32::from_le_bytes(header[5..9].try_into().unwrap()) as usize;
    let mut payload = Vec::new();
    reader.read_to_end(&mut payload)?;
    if Some(payload.len()) != m.checked_mul(8) {
        return Err(Error::format(
            FORMAT,
            format!("expected {m} values, payload has {} bytes", payload.len()),
        ));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    MeasurementVector::new(values).map_err(|e| Error::format(FORMAT, e.to_string()))
}

pub fn save_measurements(path: impl AsRef<Path>, y: &MeasurementVector) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_measurements(std::io::BufWriter::new(file), y)
}

pub fn load_measurements(path: impl AsRef<Path>) -> Result<MeasurementVector> {
    let file = std::fs::File::open(path)?;
    read_measurements(std::io::BufReader::new(file))
}
