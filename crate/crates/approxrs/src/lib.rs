//! Approximate rank/select structures over bit-strings, multisets and
//! sequences, plus exact and approximate sliding-window suffix sums.
//!
//! All positions and ranks are 1-based. Approximate queries take an
//! additive error `δ` fixed at build time; each one documents the
//! interval its answers are guaranteed to fall in, and [`oracle`]
//! provides brute-force checkers for those intervals.

pub mod approx_bits;
pub mod approx_multiset;
pub mod approx_sequence;
pub mod audit;
pub mod bitvec;
pub mod broadword;
pub mod codec;
mod error;
pub mod oracle;
pub mod packed;
pub mod psum;
pub mod stream_binary;
pub mod stream_integer;
mod window;

pub use approx_bits::{DRankSelectA, RankDSelectA};
pub use approx_multiset::{MultisetBoundedFreq, MultisetFixedM, MultisetFixedMRd};
pub use approx_sequence::{SeqApprox, SeqRankSelect};
pub use audit::{AuditParams, SpaceAuditReport, StructureKind};
pub use bitvec::{PlainBitVector, RankSelect, SparseBitVector};
pub use codec::Persist;
pub use error::{Error, Result};
pub use psum::PartialSums;
pub use stream_binary::{BinaryStreamApprox, BinaryStreamExact};
pub use stream_integer::{Estimate, IntStreamExact, SsaSketch};
