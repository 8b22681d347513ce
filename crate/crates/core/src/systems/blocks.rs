//! Exact block arithmetic for the `example1` half-line metric.
//!
//! Block lengths follow `b_1 = 1`, `b_i = 2^(L_{i-1})` with partial sums
//! `L_0 = 0`, `L_m = b_1 + … + b_m`. The values explode immediately
//! (`b_5 = 2^2059`), so the table stores exact entries only up to the horizon
//! cap and a sentinel beyond it. Every offset at or below the cap still
//! resolves, because a saturated boundary necessarily lies past the cap.

use serde::Serialize;

use crate::error::{Error, Result};

/// One entry of a block table: either an exact value or the saturation sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockEntry {
    Exact(u64),
    BeyondHorizon,
}

impl BlockEntry {
    pub fn exact(&self) -> Option<u64> {
        match self {
            BlockEntry::Exact(v) => Some(*v),
            BlockEntry::BeyondHorizon => None,
        }
    }
}

/// Block lengths `b` and boundaries `L` for the half-line metric, exact up to
/// a horizon cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockTable {
    /// `b[i]` holds `b_{i+1}`.
    pub b: Vec<BlockEntry>,
    /// `l[m]` holds `L_m`; `l[0] = 0`.
    pub l: Vec<BlockEntry>,
    /// Index into `b` of the first sentinel, if saturation occurred.
    pub saturated_at: Option<usize>,
    horizon_cap: u64,
}

/// Build the block table, exact until the first value exceeding `horizon_cap`.
pub fn example1_blocks(horizon_cap: u64) -> Result<BlockTable> {
    if horizon_cap < 1 {
        return Err(Error::config("horizon_cap", "must be at least 1"));
    }
    let mut b: Vec<BlockEntry> = Vec::new();
    let mut l: Vec<BlockEntry> = vec![BlockEntry::Exact(0)];
    let saturated_at;

    // b_1 = 1 always fits (horizon_cap >= 1).
    b.push(BlockEntry::Exact(1));
    let mut last_l: u64 = 1;
    {
        l.push(BlockEntry::Exact(1));
        loop {
            // b_i = 2^(L_{i-1}).
            let next_b = if last_l >= 63 {
                None
            } else {
                let v = 1u64 << last_l;
                (v <= horizon_cap).then_some(v)
            };
            match next_b {
                None => {
                    saturated_at = Some(b.len());
                    b.push(BlockEntry::BeyondHorizon);
                    l.push(BlockEntry::BeyondHorizon);
                    break;
                }
                Some(v) => {
                    b.push(BlockEntry::Exact(v));
                    let next_l = last_l + v;
                    if next_l > horizon_cap {
                        l.push(BlockEntry::BeyondHorizon);
                        saturated_at = Some(b.len());
                        b.push(BlockEntry::BeyondHorizon);
                        break;
                    }
                    l.push(BlockEntry::Exact(next_l));
                    last_l = next_l;
                }
            }
        }
    }

    Ok(BlockTable {
        b,
        l,
        saturated_at,
        horizon_cap,
    })
}

impl BlockTable {
    pub fn horizon_cap(&self) -> u64 {
        self.horizon_cap
    }

    /// Exact boundary values `L_m`, ascending.
    pub fn exact_l_values(&self) -> Vec<u64> {
        self.l.iter().filter_map(|e| e.exact()).collect()
    }

    /// The metric's block index for an integer position `m`: `Some(k)` when
    /// `m` lies in `[L_2k, L_{2k+1})` for some `k >= 1`, otherwise `None`.
    ///
    /// Positions past the last exact boundary are inside the interval that
    /// the saturated boundary closes, so the lookup stays valid for every
    /// `m <= horizon_cap`.
    pub fn block_of(&self, m: u64) -> Result<Option<u32>> {
        if m > self.horizon_cap {
            return Err(Error::HorizonExceeded {
                requested: m,
                cap: self.horizon_cap,
            });
        }
        let exact = self.exact_l_values();
        // Largest j with L_j <= m. L_0 = 0 <= m always.
        let j = exact.partition_point(|&v| v <= m) - 1;
        if j >= 2 && j % 2 == 0 {
            Ok(Some((j / 2) as u32))
        } else {
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_at_ten_million() {
        let t = example1_blocks(10_000_000).unwrap();
        assert_eq!(
            t.b,
            vec![
                BlockEntry::Exact(1),
                BlockEntry::Exact(2),
                BlockEntry::Exact(8),
                BlockEntry::Exact(2048),
                BlockEntry::BeyondHorizon
            ]
        );
        assert_eq!(
            t.l,
            vec![
                BlockEntry::Exact(0),
                BlockEntry::Exact(1),
                BlockEntry::Exact(3),
                BlockEntry::Exact(11),
                BlockEntry::Exact(2059),
                BlockEntry::BeyondHorizon
            ]
        );
        assert_eq!(t.saturated_at, Some(4));
    }

    #[test]
    fn table_saturates_at_tiny_cap() {
        let t = example1_blocks(2).unwrap();
        assert_eq!(
            t.b,
            vec![
                BlockEntry::Exact(1),
                BlockEntry::Exact(2),
                BlockEntry::BeyondHorizon
            ]
        );
        assert_eq!(t.saturated_at, Some(2));
    }

    #[test]
    fn l_entries_are_prefix_sums() {
        let t = example1_blocks(10_000_000).unwrap();
        // L_4 = 1 + 2 + 8 + 2048.
        assert_eq!(t.l[4].exact(), Some(1 + 2 + 8 + 2048));
        assert_eq!(t.l[4].exact(), Some(2059));
    }

    #[test]
    fn l_strictly_increasing_and_b_matches_recurrence() {
        let t = example1_blocks(10_000_000).unwrap();
        let l = t.exact_l_values();
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        // b[i] holds b_{i+1} = 2^(L_i); l[i] holds L_i.
        for i in 1..t.b.len() {
            if let (Some(bi), Some(lprev)) = (t.b[i].exact(), t.l[i].exact()) {
                assert_eq!(bi, 1u64 << lprev, "b_{} = 2^L_{}", i + 1, i);
            }
        }
    }

    #[test]
    fn block_lookup_matches_intervals() {
        let t = example1_blocks(1_000_000).unwrap();
        // [0,1) and [1,3): no even block.
        assert_eq!(t.block_of(0).unwrap(), None);
        assert_eq!(t.block_of(1).unwrap(), None);
        assert_eq!(t.block_of(2).unwrap(), None);
        // [3,11): k = 1.
        for m in 3..11 {
            assert_eq!(t.block_of(m).unwrap(), Some(1));
        }
        // [11,2059): between blocks.
        assert_eq!(t.block_of(11).unwrap(), None);
        assert_eq!(t.block_of(2058).unwrap(), None);
        // [2059, ...): k = 2, up to the cap.
        assert_eq!(t.block_of(2059).unwrap(), Some(2));
        assert_eq!(t.block_of(1_000_000).unwrap(), Some(2));
        // Past the cap: error.
        assert!(matches!(
            t.block_of(1_000_001),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn saturation_mid_interval_still_resolves() {
        // cap = 5 saturates L_3, but [3,5] is still inside block k = 1.
        let t = example1_blocks(5).unwrap();
        assert_eq!(t.block_of(4).unwrap(), Some(1));
        assert_eq!(t.block_of(2).unwrap(), None);
    }
}
