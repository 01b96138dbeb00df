//! Word-level helpers: in-word select and bit-width arithmetic.

/// Position (0-based) of the `k`-th set bit of `w`, `k` counted from 0.
///
/// The caller guarantees `k < w.count_ones()`.
#[inline]
pub fn select_in_word(mut w: u64, mut k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    let mut base = 0;
    // skip whole bytes, then finish bit by bit
    loop {
        let c = (w & 0xff).count_ones();
        if k < c {
            break;
        }
        k -= c;
        w >>= 8;
        base += 8;
    }
    for _ in 0..k {
        w &= w - 1;
    }
    base + w.trailing_zeros()
}

/// Number of bits needed to write any value in `0..=max`, at least 1.
#[inline]
pub fn bits_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

/// `⌈lg x⌉` for `x ≥ 1`.
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// Mask of the low `w` bits, `w ≤ 64`.
#[inline]
pub fn low_mask(w: u32) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}
