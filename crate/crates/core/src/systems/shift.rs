//! The full 2-shift: bit-packed symbol words and the constructed
//! distributionally-scrambled family.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// A point of the 2-shift: a finite symbol prefix plus a read offset.
/// Stepping advances the offset, so clones share the underlying bits.
#[derive(Debug, Clone)]
pub struct ShiftWord {
    bits: Arc<Vec<u64>>,
    len: usize,
    offset: usize,
}

impl ShiftWord {
    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        let mut words = vec![0u64; symbols.len().div_ceil(64)];
        for (i, &s) in symbols.iter().enumerate() {
            match s {
                0 => {}
                1 => words[i / 64] |= 1u64 << (i % 64),
                other => {
                    return Err(Error::Domain(format!(
                        "shift symbol at index {i} is {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(ShiftWord {
            bits: Arc::new(words),
            len: symbols.len(),
            offset: 0,
        })
    }

    /// Parse a string of '0'/'1' characters, zero-padded on the right to
    /// `pad_to` symbols when longer than the literal prefix.
    pub fn from_str_padded(s: &str, pad_to: usize) -> Result<Self> {
        let mut symbols = Vec::with_capacity(s.len().max(pad_to));
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => symbols.push(0),
                '1' => symbols.push(1),
                other => {
                    return Err(Error::Domain(format!(
                        "shift symbol at index {i} is '{other}', expected '0' or '1'"
                    )))
                }
            }
        }
        if symbols.is_empty() {
            return Err(Error::Domain("shift prefix is empty".into()));
        }
        while symbols.len() < pad_to {
            symbols.push(0);
        }
        Self::from_symbols(&symbols)
    }

    pub fn random<T: Rng + ?Sized>(rng: &mut T, len: usize) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for w in words.iter_mut() {
            *w = rng.random();
        }
        // Clear the bits past `len` so word comparisons stay meaningful.
        let tail = len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        ShiftWord {
            bits: Arc::new(words),
            len,
            offset: 0,
        }
    }

    /// Symbols still visible after the shifts applied so far.
    pub fn remaining(&self) -> usize {
        self.len - self.offset
    }

    /// Symbol at position `i` of the current suffix.
    pub fn symbol(&self, i: usize) -> Option<bool> {
        let g = self.offset + i;
        (g < self.len).then(|| (self.bits[g / 64] >> (g % 64)) & 1 == 1)
    }

    pub fn shifted(&self) -> Result<Self> {
        if self.remaining() == 0 {
            return Err(Error::Domain(
                "shift prefix exhausted: no symbols left to shift".into(),
            ));
        }
        Ok(ShiftWord {
            bits: Arc::clone(&self.bits),
            len: self.len,
            offset: self.offset + 1,
        })
    }

    /// 64 suffix symbols starting at position `i`, zero-padded past the end.
    fn chunk(&self, i: usize) -> u64 {
        let g = self.offset + i;
        let w = g / 64;
        let sh = g % 64;
        if w >= self.bits.len() {
            return 0;
        }
        let lo = self.bits[w] >> sh;
        let hi = if sh > 0 && w + 1 < self.bits.len() {
            self.bits[w + 1] << (64 - sh)
        } else {
            0
        };
        lo | hi
    }

    /// First suffix position where the two words disagree, scanning up to the
    /// shorter remaining prefix. `None` means they agree everywhere visible.
    pub fn first_disagreement(&self, other: &ShiftWord) -> Option<usize> {
        let n = self.remaining().min(other.remaining());
        let mut i = 0;
        while i < n {
            let x = self.chunk(i) ^ other.chunk(i);
            let valid = (n - i).min(64);
            let mask = if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
            let x = x & mask;
            if x != 0 {
                return Some(i + x.trailing_zeros() as usize);
            }
            i += 64;
        }
        None
    }

    /// All suffix positions below `limit` where the two words disagree.
    pub fn disagreements_upto(&self, other: &ShiftWord, limit: usize) -> Vec<usize> {
        let n = self.remaining().min(other.remaining()).min(limit);
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            let valid = (n - i).min(64);
            let mask = if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
            let mut x = (self.chunk(i) ^ other.chunk(i)) & mask;
            while x != 0 {
                out.push(i + x.trailing_zeros() as usize);
                x &= x - 1;
            }
            i += 64;
        }
        out
    }

    pub fn label(&self) -> String {
        let head: String = (0..self.remaining().min(12))
            .map(|i| if self.symbol(i).unwrap() { '1' } else { '0' })
            .collect();
        format!("shift[{head}..,rem={}]", self.remaining())
    }
}

impl PartialEq for ShiftWord {
    fn eq(&self, other: &Self) -> bool {
        self.remaining() == other.remaining() && self.first_disagreement(other).is_none()
    }
}

/// Block boundaries `A_m = (m+1)! - 1` for the scrambled family. Each block
/// `[A_m, A_{m+1})` is `m+1` times longer than the whole prefix before it,
/// which drives the in-block empirical densities toward 0 and 1.
#[derive(Debug, Clone)]
pub struct FamilyBlocks {
    bounds: Vec<u64>,
}

impl FamilyBlocks {
    pub fn up_to(cap: u64) -> Self {
        let mut bounds = vec![0u64];
        let mut fact: u64 = 1;
        let mut m: u64 = 2;
        loop {
            fact = match fact.checked_mul(m) {
                Some(f) => f,
                None => break,
            };
            let a = fact - 1;
            if a > cap {
                break;
            }
            bounds.push(a);
            m += 1;
        }
        FamilyBlocks { bounds }
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.bounds
    }

    /// Index of the block containing `pos` (the last block is unbounded).
    pub fn block_index(&self, pos: u64) -> usize {
        self.bounds.partition_point(|&a| a <= pos) - 1
    }

    /// Symbols on blocks: zeros on even blocks, the pattern coordinate on odd
    /// blocks. Returns `None` when the pattern prefix is too short.
    pub fn symbol(&self, pattern: &[u8], pos: u64) -> Option<u8> {
        let m = self.block_index(pos);
        if m.is_multiple_of(2) {
            Some(0)
        } else {
            pattern.get((m - 1) / 2).copied()
        }
    }

    /// Number of pattern coordinates needed to cover positions `0..=cap`.
    pub fn required_pattern_len(&self, cap: u64) -> usize {
        self.block_index(cap).div_ceil(2)
    }
}

/// Build the scrambled-family point for pattern `c`: all zeros on the even
/// blocks, constantly `c_j` on odd block `2j+1`. Two points with different
/// patterns form a distributionally scrambled pair at block-aligned
/// checkpoints.
pub fn scrambled_family_word(c: &[u8], horizon_cap: u64) -> Result<ShiftWord> {
    for (j, &s) in c.iter().enumerate() {
        if s > 1 {
            return Err(Error::Argument(format!(
                "family pattern coordinate {j} is {s}, expected 0 or 1"
            )));
        }
    }
    let len = horizon_cap as usize + 64;
    let blocks = FamilyBlocks::up_to(len as u64);
    let need = blocks.required_pattern_len(len as u64 - 1);
    if c.len() < need {
        return Err(Error::Argument(format!(
            "family pattern has {} coordinates but {need} are needed to fill \
             all odd blocks up to the horizon cap {horizon_cap}",
            c.len()
        )));
    }
    let mut symbols = vec![0u8; len];
    for m in 0..blocks.bounds.len() {
        if m % 2 == 1 {
            let sym = c[(m - 1) / 2];
            if sym == 1 {
                let lo = blocks.bounds[m] as usize;
                let hi = blocks
                    .bounds
                    .get(m + 1)
                    .map(|&a| a as usize)
                    .unwrap_or(len)
                    .min(len);
                for s in symbols.iter_mut().take(hi).skip(lo) {
                    *s = 1;
                }
            }
        }
    }
    ShiftWord::from_symbols(&symbols)
}

/// Family block boundaries usable as checkpoint values in `(0, horizon]`.
pub fn family_boundaries(horizon: u64) -> Vec<u64> {
    FamilyBlocks::up_to(horizon)
        .boundaries()
        .iter()
        .copied()
        .filter(|&a| a >= 1 && a <= horizon)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn factorial_boundaries() {
        let b = FamilyBlocks::up_to(100_000);
        assert_eq!(b.boundaries(), &[0, 1, 5, 23, 119, 719, 5039, 40319]);
        assert_eq!(family_boundaries(1000), vec![1, 5, 23, 119, 719]);
    }

    #[test]
    fn block_symbols_follow_pattern() {
        let b = FamilyBlocks::up_to(1000);
        let c = [1u8, 0, 1];
        // Even blocks are zero.
        assert_eq!(b.symbol(&c, 0), Some(0)); // [0,1)
        assert_eq!(b.symbol(&c, 10), Some(0)); // [5,23)
        assert_eq!(b.symbol(&c, 200), Some(0)); // [119,719)
        // Odd blocks carry the coordinates.
        assert_eq!(b.symbol(&c, 1), Some(1)); // [1,5) -> c_0
        assert_eq!(b.symbol(&c, 50), Some(0)); // [23,119) -> c_1
        assert_eq!(b.symbol(&c, 800), Some(1)); // [719,...) -> c_2
    }

    #[test]
    fn family_word_matches_block_symbols() {
        let w = scrambled_family_word(&[1, 0, 1, 1], 700).unwrap();
        let b = FamilyBlocks::up_to(800);
        for pos in 0..700u64 {
            let expected = b.symbol(&[1, 0, 1, 1], pos).unwrap() == 1;
            assert_eq!(w.symbol(pos as usize), Some(expected), "pos {pos}");
        }
    }

    #[test]
    fn family_word_rejects_short_pattern() {
        // Horizon 1000 reaches block 5, so three coordinates are needed.
        assert!(scrambled_family_word(&[1, 0], 1000).is_err());
        assert!(scrambled_family_word(&[1, 0, 1], 1000).is_ok());
    }

    #[test]
    fn disagreement_scan_matches_naive() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let a = ShiftWord::random(&mut rng, 300);
            let b = ShiftWord::random(&mut rng, 300);
            let naive = (0..300).find(|&i| a.symbol(i) != b.symbol(i));
            assert_eq!(a.first_disagreement(&b), naive);
            let all: Vec<usize> = (0..300).filter(|&i| a.symbol(i) != b.symbol(i)).collect();
            assert_eq!(a.disagreements_upto(&b, 300), all);
        }
    }

    #[test]
    fn shifting_drops_the_head_symbol() {
        let w = ShiftWord::from_symbols(&[1, 0, 1, 1]).unwrap();
        let s = w.shifted().unwrap();
        assert_eq!(s.symbol(0), Some(false));
        assert_eq!(s.symbol(1), Some(true));
        assert_eq!(s.remaining(), 3);
        let exhausted = s.shifted().unwrap().shifted().unwrap().shifted().unwrap();
        assert!(exhausted.shifted().is_err());
    }

    #[test]
    fn equality_is_suffix_equality() {
        let a = ShiftWord::from_symbols(&[1, 0, 1]).unwrap();
        let b = ShiftWord::from_symbols(&[0, 1, 0, 1]).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, b.shifted().unwrap());
    }
}
