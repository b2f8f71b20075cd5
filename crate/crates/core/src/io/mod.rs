//! Bit-exact file formats: `GIPT` pattern stacks, `GIMS` measurement
//! vectors and binary PGM images.

pub mod gims;
pub mod gipt;
pub mod pgm;

pub use gims::{load_measurements, read_measurements, save_measurements, write_measurements};
pub use gipt::{load_patterns, read_patterns, save_patterns, write_patterns};
pub use pgm::{load_pgm, read_pgm, save_pgm, write_pgm, BitDepth};
