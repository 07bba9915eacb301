//! Recursive subproduct codes `C^⊗[r,m]` built from a binary base code that
//! contains the all-ones word, with first-order ML and max-log-MAP decoding,
//! projection-based belief propagation for second-order codes, local graph
//! search, and an AWGN Monte-Carlo harness.

pub mod bp;
pub mod channel;
pub mod construction;
pub mod crc;
pub mod error;
pub mod fo_decoder;
pub mod gf2;
pub mod lgs;
pub mod projection;
pub mod sim;

pub use construction::{dual_berman_code, hamming_code, rm_code, BaseCode, SubproductCode};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
