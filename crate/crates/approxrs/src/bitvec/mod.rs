//! Exact rank/select over plain and sparse bit-vectors.
//!
//! Positions are 1-based: `rank(b, i)` counts `b` in positions `1..=i`
//! and `rank(b, 0) = 0`. Asking `select` for an occurrence that does not
//! exist returns [`Error::NotFound`](crate::Error::NotFound), while a bad
//! position returns [`Error::Range`](crate::Error::Range).

mod plain;
mod sparse;

pub use plain::PlainBitVector;
pub use sparse::SparseBitVector;

use crate::error::Result;

pub trait RankSelect {
    fn len(&self) -> usize;
    fn count_ones(&self) -> usize;
    fn get(&self, i: usize) -> Result<bool>;
    fn rank1(&self, i: usize) -> Result<usize>;
    fn select1(&self, k: usize) -> Result<usize>;
    fn select0(&self, k: usize) -> Result<usize>;
    fn space_bits(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    fn rank(&self, b: bool, i: usize) -> Result<usize> {
        if b {
            self.rank1(i)
        } else {
            self.rank0(i)
        }
    }

    fn select(&self, b: bool, k: usize) -> Result<usize> {
        if b {
            self.select1(k)
        } else {
            self.select0(k)
        }
    }
}
