//! Searchable partial sums over a static array of small integers.
//!
//! Values are packed at `α` bits each. Blocks of roughly 256 payload bits
//! store their prefix sum relative to the enclosing superblock (16 blocks),
//! and superblocks store absolute prefix sums. `sum` adds one superblock
//! entry, one block entry and at most one block of values; `search`
//! binary-searches superblocks and scans the rest.

use crate::broadword::{bits_for, low_mask};
use crate::codec::{Persist, Reader, Tag, Writer};
use crate::error::{check_range, Error, Result};
use crate::packed::PackedInts;

const BLOCKS_PER_SUPER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSums {
    values: PackedInts,
    block: usize,
    supers: Vec<u64>,
    rel: PackedInts,
    total: u64,
}

impl PartialSums {
    pub fn new(values: &[u64], alpha: u32) -> Result<Self> {
        if !(1..=64).contains(&alpha) {
            return Err(Error::Param(format!("bit width {alpha} outside 1..=64")));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, &v)| v > low_mask(alpha)) {
            return Err(Error::Validation(format!(
                "value {v} at index {} does not fit in {alpha} bits",
                i + 1
            )));
        }
        let total = values
            .iter()
            .try_fold(0u64, |s, &v| s.checked_add(v))
            .ok_or_else(|| Error::Validation("total exceeds 64 bits".into()))?;

        // largest power of two with block·α ≤ 256
        let block = 1usize << (256 / alpha as usize).max(1).ilog2();
        let span = block * BLOCKS_PER_SUPER;
        let rel_width = bits_for((span as u128 * low_mask(alpha) as u128).min(u64::MAX as u128) as u64);

        let nblocks = values.len().div_ceil(block);
        let mut supers = Vec::with_capacity(nblocks.div_ceil(BLOCKS_PER_SUPER) + 1);
        let mut rel = PackedInts::new(nblocks, rel_width);
        let mut acc = 0u64;
        let mut base = 0u64;
        for b in 0..nblocks {
            if b % BLOCKS_PER_SUPER == 0 {
                supers.push(acc);
                base = acc;
            }
            rel.set(b, acc - base);
            acc += values[b * block..((b + 1) * block).min(values.len())].iter().sum::<u64>();
        }
        supers.push(acc);
        Ok(PartialSums { values: PackedInts::from_slice(values, alpha), block, supers, rel, total })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn alpha(&self) -> u32 {
        self.values.width()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// The `i`-th value, 1-based.
    pub fn get(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 1, self.len() as u64)?;
        Ok(self.values.get(i - 1))
    }

    /// Sum of the first `i` values.
    pub fn sum(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 0, self.len() as u64)?;
        Ok(self.sum_raw(i))
    }

    #[inline]
    fn sum_raw(&self, i: usize) -> u64 {
        if i == self.len() {
            return self.total;
        }
        let b = i / self.block;
        let s = self.supers[b / BLOCKS_PER_SUPER] + self.rel.get(b);
        s + self.values.sum_range(b * self.block, i)
    }

    /// Smallest `i` with `sum(i) > x`.
    pub fn search(&self, x: u64) -> Result<usize> {
        if x >= self.total {
            return Err(Error::NotFound { rank: x, available: self.total });
        }
        let nsup = self.supers.len() - 1;
        let sb = self.supers[..nsup].partition_point(|&c| c <= x) - 1;
        let first = sb * BLOCKS_PER_SUPER;
        let last = (first + BLOCKS_PER_SUPER).min(self.rel.len());
        let base = self.supers[sb];
        let mut b = first;
        while b + 1 < last && base + self.rel.get(b + 1) <= x {
            b += 1;
        }
        let mut acc = base + self.rel.get(b);
        let mut i = b * self.block;
        loop {
            acc += self.values.get(i);
            i += 1;
            if acc > x {
                return Ok(i);
            }
        }
    }

    pub fn space_bits(&self) -> u64 {
        self.values.space_bits() + self.rel.space_bits() + self.supers.len() as u64 * 64 + 3 * 64
    }
}

impl Persist for PartialSums {
    const TAG: Tag = Tag::PartialSums;

    fn write_body(&self, w: &mut Writer) {
        self.values.write(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let packed = PackedInts::read(r)?;
        let vals: Vec<u64> = (0..packed.len()).map(|i| packed.get(i)).collect();
        PartialSums::new(&vals, packed.width()).map_err(|e| Error::Format(e.to_string()))
    }
}
