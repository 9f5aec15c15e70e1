//! Kloosterman sums over F_p and their statistics.
//!
//! Computes K_p(a) for all a in F_p* (directly, or in O(p log p) through one
//! prime-length DFT), the Sato-Tate angles, window counts and their
//! deviation from the Sato-Tate measure, discrepancy and exponential sums
//! over window sets, sum-set and product-set counts, and the
//! Walsh-Hadamard spectrum and nonlinearity of the sign sequence.

pub mod acceptance;
pub mod arith;
pub mod cli;
pub mod error;
pub mod fft;
pub mod io;
pub mod kloosterman;
pub mod nonlinearity;
pub mod oracle;
pub mod sample;
pub mod sato_tate;
pub mod sumset;

pub use arith::{ContextOptions, PrimeContext};
pub use error::{Error, Result};
pub use kloosterman::{AngleTable, KloostermanTable, Method};
pub use sato_tate::Window;
pub use sumset::{ResidueSet, SetSpec, SumsetReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
