//! Non-adaptive combinatorial group testing with adversarial deletions.
//!
//! Test outcomes are the boolean OR of the defective columns of a binary
//! testing matrix; an adversary may then delete up to `Δ` outcomes, which
//! shifts everything after the deleted positions. The crate provides
//!
//! * matrix families that survive such deletions ([`constructions`]),
//! * the deletion channel and adversaries ([`channel`]),
//! * five decoders ([`decoders`]),
//! * brute-force certifiers for every combinatorial property the designs
//!   rely on ([`verify`]), built on the distance machinery in
//!   [`distances`].
//!
//! All indices are 0-based.

pub mod bitcore;
pub mod channel;
pub mod combinatorics;
pub mod constructions;
pub mod decoders;
pub mod distances;
mod error;
pub mod gfcodes;
pub mod rng;
pub mod verify;

pub use bitcore::{BitMatrix, BitVec, DefectiveSet};
pub use error::{Error, Result};

/// Default cap on brute-force enumeration work.
pub const DEFAULT_CAP: u128 = 1_000_000;
