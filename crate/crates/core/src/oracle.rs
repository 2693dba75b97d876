//! Exhaustive ground truth: walk every word of `P(n,k)` (or `P(n)`) and tally
//! the record statistics directly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rgf::{self, Enumerator};

/// Default enumeration bound; `B(12)` is about 4.2 million words.
pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("k = {k} exceeds n = {n}")]
    BlocksExceedLength { n: usize, k: usize },
}

/// Every statistic the exact formulas speak about, for one `(n,k)` or for all
/// of `P(n)` (`k = None`).
///
/// Heights are summed over records of height at least 1 only. The max-height
/// maps are dense over `0..=max(k-1, 0)` (or `0..=max(n-1, 0)` for `P(n)`)
/// whenever `count > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatBundle {
    pub n: usize,
    pub k: Option<usize>,
    pub count: u64,
    /// r -> number of partitions with exactly r strong records of height 1.
    pub strong_h1_by_r: BTreeMap<usize, u64>,
    pub weak_h1_by_r: BTreeMap<usize, u64>,
    pub strong_total_height: u64,
    pub weak_total_height: u64,
    /// h -> number of partitions whose largest strong-record height is <= h.
    pub max_height_at_most: BTreeMap<usize, u64>,
    pub max_height_exact: BTreeMap<usize, u64>,
}

impl StatBundle {
    pub fn strong_h1_total(&self) -> u64 {
        self.strong_h1_by_r
            .iter()
            .map(|(&r, &c)| r as u64 * c)
            .sum()
    }

    pub fn weak_h1_total(&self) -> u64 {
        self.weak_h1_by_r.iter().map(|(&r, &c)| r as u64 * c).sum()
    }

    pub fn strong_h1_count(&self, r: usize) -> u64 {
        self.strong_h1_by_r.get(&r).copied().unwrap_or(0)
    }

    pub fn weak_h1_count(&self, r: usize) -> u64 {
        self.weak_h1_by_r.get(&r).copied().unwrap_or(0)
    }

    pub fn max_height_at_most(&self, h: usize) -> u64 {
        match self.max_height_at_most.last_key_value() {
            Some((&top, &all)) if h > top => all,
            _ => self.max_height_at_most.get(&h).copied().unwrap_or(0),
        }
    }

    pub fn max_height_exact(&self, h: usize) -> u64 {
        self.max_height_exact.get(&h).copied().unwrap_or(0)
    }
}

/// Raw per-chunk sums, merged associatively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Tally {
    count: u64,
    strong_h1: BTreeMap<usize, u64>,
    weak_h1: BTreeMap<usize, u64>,
    strong_total: u64,
    weak_total: u64,
    max_height: BTreeMap<usize, u64>,
}

impl Tally {
    fn observe(&mut self, word: &[u32]) {
        let mut max = 0u32;
        let mut prev = 0u32;
        let (mut s1, mut w1, mut st, mut wt, mut mh) = (0usize, 0usize, 0u64, 0u64, 0u32);
        for (i, &v) in word.iter().enumerate() {
            if i > 0 && v >= max {
                let h = v - prev;
                if h >= 1 {
                    wt += h as u64;
                    if h == 1 {
                        w1 += 1;
                    }
                    if v > max {
                        st += h as u64;
                        mh = mh.max(h);
                        if h == 1 {
                            s1 += 1;
                        }
                    }
                }
            }
            max = max.max(v);
            prev = v;
        }
        self.count += 1;
        *self.strong_h1.entry(s1).or_default() += 1;
        *self.weak_h1.entry(w1).or_default() += 1;
        self.strong_total += st;
        self.weak_total += wt;
        *self.max_height.entry(mh as usize).or_default() += 1;
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.count += other.count;
        self.strong_total += other.strong_total;
        self.weak_total += other.weak_total;
        for (dst, src) in [
            (&mut self.strong_h1, other.strong_h1),
            (&mut self.weak_h1, other.weak_h1),
            (&mut self.max_height, other.max_height),
        ] {
            for (key, c) in src {
                *dst.entry(key).or_default() += c;
            }
        }
        self
    }

    fn into_bundle(self, n: usize, k: Option<usize>) -> StatBundle {
        let top = match k {
            Some(k) => k.saturating_sub(1),
            None => n.saturating_sub(1),
        };
        let mut at_most = BTreeMap::new();
        let mut exact = BTreeMap::new();
        if self.count > 0 {
            let mut acc = 0;
            for h in 0..=top {
                let c = self.max_height.get(&h).copied().unwrap_or(0);
                acc += c;
                exact.insert(h, c);
                at_most.insert(h, acc);
            }
        }
        StatBundle {
            n,
            k,
            count: self.count,
            strong_h1_by_r: self.strong_h1,
            weak_h1_by_r: self.weak_h1,
            strong_total_height: self.strong_total,
            weak_total_height: self.weak_total,
            max_height_at_most: at_most,
            max_height_exact: exact,
        }
    }
}

fn tally_prefix(n: usize, k: Option<usize>, prefix: &[u32]) -> Tally {
    let mut t = Tally::default();
    let mut e = Enumerator::with_prefix(n, k, prefix);
    while let Some(w) = e.next_word() {
        t.observe(w);
    }
    t
}

/// Exhaustive statistics with a configurable enumeration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub cap: usize,
    /// Prefix length used to split the enumeration into parallel chunks; 0
    /// keeps everything on the calling thread.
    pub chunk_depth: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            cap: DEFAULT_CAP,
            chunk_depth: 0,
        }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Self {
        Oracle {
            cap,
            ..Oracle::default()
        }
    }

    pub fn chunked(self, depth: usize) -> Self {
        Oracle {
            chunk_depth: depth,
            ..self
        }
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if n > self.cap {
            return Err(OracleError::CapExceeded { n, cap: self.cap });
        }
        Ok(())
    }

    fn run(&self, n: usize, k: Option<usize>) -> Tally {
        if self.chunk_depth == 0 {
            return tally_prefix(n, k, &[]);
        }
        let chunks = rgf::prefixes(n, k, self.chunk_depth);
        let parts: Vec<Tally> = chunks.par_iter().map(|p| tally_prefix(n, k, p)).collect();
        parts.into_iter().fold(Tally::default(), Tally::merge)
    }

    pub fn stats(&self, n: usize, k: usize) -> Result<StatBundle, OracleError> {
        self.check(n)?;
        if k > n {
            return Err(OracleError::BlocksExceedLength { n, k });
        }
        Ok(self.run(n, Some(k)).into_bundle(n, Some(k)))
    }

    /// Aggregate over all of `P(n)`; equals the sum of `stats(n, k)` over `k`.
    pub fn stats_all(&self, n: usize) -> Result<StatBundle, OracleError> {
        self.check(n)?;
        Ok(self.run(n, None).into_bundle(n, None))
    }
}

/// [`Oracle::stats`] with the default cap, single-threaded.
pub fn oracle_stats(n: usize, k: usize) -> Result<StatBundle, OracleError> {
    Oracle::default().stats(n, k)
}

pub fn oracle_stats_all(n: usize) -> Result<StatBundle, OracleError> {
    Oracle::default().stats_all(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinum;
    use crate::rgf::{strong_records, weak_records};
    use num_bigint::BigInt;

    fn map(pairs: &[(usize, u64)]) -> BTreeMap<usize, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn hand_enumerated_cells() {
        let b = oracle_stats(4, 3).unwrap();
        assert_eq!(b.count, 6);
        assert_eq!(b.strong_h1_by_r, map(&[(1, 1), (2, 5)]));
        assert_eq!(b.strong_total_height, 13);

        let b = oracle_stats(4, 2).unwrap();
        assert_eq!(b.weak_h1_by_r, map(&[(1, 6), (2, 1)]));
        assert_eq!(b.weak_total_height, 8);
    }

    #[test]
    fn single_block_is_trivial() {
        for n in 1..=8 {
            let b = oracle_stats(n, 1).unwrap();
            assert_eq!(b.count, 1);
            assert_eq!(b.strong_h1_by_r, map(&[(0, 1)]));
            assert_eq!(b.weak_h1_by_r, map(&[(0, 1)]));
            assert_eq!(b.strong_total_height, 0);
            assert_eq!(b.weak_total_height, 0);
            assert_eq!(b.max_height_at_most, map(&[(0, 1)]));
        }
    }

    #[test]
    fn aggregates_small_n() {
        let b = oracle_stats_all(3).unwrap();
        assert_eq!(
            (b.count, b.strong_total_height, b.weak_total_height),
            (5, 5, 5)
        );
        let b = oracle_stats_all(4).unwrap();
        assert_eq!(
            (b.count, b.strong_total_height, b.weak_total_height),
            (15, 23, 24)
        );
        let b = oracle_stats_all(1).unwrap();
        assert_eq!(
            (b.count, b.strong_total_height, b.weak_total_height),
            (1, 0, 0)
        );
        assert_eq!(b.strong_h1_total() + b.weak_h1_total(), 0);
        // the k = 0 row only exists for n = 0
        assert_eq!(oracle_stats(0, 0).unwrap().count, 1);
        assert_eq!(oracle_stats(3, 0).unwrap().count, 0);
    }

    #[test]
    fn cap_and_range_errors() {
        assert_eq!(
            oracle_stats(13, 2),
            Err(OracleError::CapExceeded { n: 13, cap: 12 })
        );
        assert_eq!(
            Oracle::with_cap(3).stats_all(4),
            Err(OracleError::CapExceeded { n: 4, cap: 3 })
        );
        assert_eq!(
            oracle_stats(3, 4),
            Err(OracleError::BlocksExceedLength { n: 3, k: 4 })
        );
    }

    #[test]
    fn bundle_invariants() {
        for n in 0..=9 {
            let mut sum = Tally::default().into_bundle(n, None);
            for k in 0..=n {
                let b = oracle_stats(n, k).unwrap();
                assert_eq!(
                    BigInt::from(b.count),
                    combinum::stirling2(n as i64, k as i64).unwrap()
                );
                assert_eq!(b.strong_h1_by_r.values().sum::<u64>(), b.count);
                assert_eq!(b.weak_h1_by_r.values().sum::<u64>(), b.count);
                assert!(b.strong_total_height <= b.weak_total_height);
                if b.count > 0 {
                    let top = k.saturating_sub(1);
                    assert_eq!(b.max_height_at_most[&top], b.count);
                    let vals: Vec<u64> = b.max_height_at_most.values().copied().collect();
                    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
                    for h in 1..=top {
                        assert_eq!(
                            b.max_height_exact[&h],
                            b.max_height_at_most[&h] - b.max_height_at_most[&(h - 1)]
                        );
                    }
                }
                sum.count += b.count;
                sum.strong_total_height += b.strong_total_height;
                sum.weak_total_height += b.weak_total_height;
            }
            let all = oracle_stats_all(n).unwrap();
            assert_eq!(BigInt::from(all.count), combinum::bell(n as i64).unwrap());
            assert_eq!(all.count, sum.count);
            assert_eq!(all.strong_total_height, sum.strong_total_height);
            assert_eq!(all.weak_total_height, sum.weak_total_height);
        }
    }

    #[test]
    fn scan_agrees_with_record_extraction() {
        for n in 1..=7 {
            for w in rgf::enumerate_all(n) {
                let mut t = Tally::default();
                t.observe(w.word());
                let strong = strong_records(&w);
                let weak = weak_records(&w);
                let h1 = |ev: &[rgf::RecordEvent]| ev.iter().filter(|e| e.height == 1).count();
                let tot = |ev: &[rgf::RecordEvent]| ev.iter().map(|e| e.height as u64).sum::<u64>();
                assert_eq!(t.strong_h1, map(&[(h1(&strong), 1)]));
                assert_eq!(t.weak_h1, map(&[(h1(&weak), 1)]));
                assert_eq!(t.strong_total, tot(&strong));
                assert_eq!(t.weak_total, tot(&weak));
                let mh = strong.iter().map(|e| e.height as usize).max().unwrap_or(0);
                assert_eq!(t.max_height, map(&[(mh, 1)]));
            }
        }
    }

    #[test]
    fn chunked_equals_sequential() {
        for n in 0..=9 {
            for depth in [1, 3, 5] {
                let par = Oracle::default().chunked(depth);
                assert_eq!(par.stats_all(n).unwrap(), oracle_stats_all(n).unwrap());
                for k in 0..=n {
                    assert_eq!(par.stats(n, k).unwrap(), oracle_stats(n, k).unwrap());
                }
            }
        }
    }
}
