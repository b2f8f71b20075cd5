//! Binary graymap (PGM `P5`) reading and writing.
//!
//! Samples are one byte when `maxval < 256`, otherwise two bytes big-endian.
//! Gray level `v` loads as `v / maxval`; writing quantizes `[0, 1]` onto 255
//! or 65535 levels.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

const FORMAT: &str = "PGM";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_level(self) -> u16 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

fn next_token<R: BufRead>(reader: &mut R) -> Result<String> {
    let mut token = Vec::new();
    loop {
        let mut byte = [0u8; 1];
        if reader.read(&mut byte)? == 0 {
            if token.is_empty() {
                return Err(Error::format(FORMAT, "truncated header"));
            }
            break;
        }
        match byte[0] {
            b'#' if token.is_empty() => {
                let mut comment = Vec::new();
                reader.read_until(b'\n', &mut comment)?;
            }
            b if b.is_ascii_whitespace() => {
                if !token.is_empty() {
                    break;
                }
            }
            b => token.push(b),
        }
    }
    String::from_utf8(token).map_err(|_| Error::format(FORMAT, "non-ASCII header"))
}

fn header_number<R: BufRead>(reader: &mut R, what: &str) -> Result<usize> {
    let token = next_token(reader)?;
    token
        .parse()
        .map_err(|_| Error::format(FORMAT, format!("invalid {what} {token:?}")))
}

/// Reads a `P5` graymap, normalizing gray levels by the file's maxval.
pub fn read_pgm<R: BufRead>(mut reader: R) -> Result<Image> {
    let magic = next_token(&mut reader)?;
    if magic != "P5" {
        return Err(Error::format(
            FORMAT,
            format!("expected binary graymap magic P5, found {magic:?}"),
        ));
    }
    let cols = header_number(&mut reader, "width")?;
    let rows = header_number(&mut reader, "height")?;
    let maxval = header_number(&mut reader, "maxval")?;
    if rows == 0 || cols == 0 {
        return Err(Error::format(FORMAT, "zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(
            FORMAT,
            format!("maxval {maxval} out of range"),
        ));
    }
    let wide = maxval > 255;
    let n = rows * cols;
    let mut raw = vec![0u8; if wide { 2 * n } else { n }];
    reader
        .read_exact(&mut raw)
        .map_err(|_| Error::format(FORMAT, "raster shorter than header declares"))?;
    let levels: Vec<u16> = if wide {
        raw.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        raw.iter().map(|&b| u16::from(b)).collect()
    };
    Image::from_levels(rows, cols, &levels, maxval as u16)
        .map_err(|e| Error::format(FORMAT, e.to_string()))
}

/// Writes `img` as `P5`, clipping to `[0, 1]` and quantizing to `depth`.
pub fn write_pgm<W: Write>(mut writer: W, img: &Image, depth: BitDepth) -> Result<()> {
    let max = depth.max_level();
    write!(writer, "P5\n{} {}\n{}\n", img.cols(), img.rows(), max)?;
    let levels = img.to_levels(max);
    let bytes: Vec<u8> = match depth {
        BitDepth::Eight => levels.iter().map(|&l| l as u8).collect(),
        BitDepth::Sixteen => levels.iter().flat_map(|l| l.to_be_bytes()).collect(),
    };
    writer.write_all(&bytes)?;
    writer.flush()?;
    Ok(())
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let file = std::fs::File::open(path)?;
    read_pgm(std::io::BufReader::new(file))
}

pub fn save_pgm(path: impl AsRef<Path>, img: &Image, depth: BitDepth) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_pgm(std::io::BufWriter::new(file), img, depth)
}
