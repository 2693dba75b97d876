//! Exact Stirling numbers of both kinds, Bell numbers and binomial
//! coefficients.
//!
//! All lookups follow the usual combinatorial convention that a Stirling
//! number with a negative index, or with `k > n`, is zero. This keeps the
//! closed-form sums total: terms such as `S(n-1, k-2)` evaluated at `k = 2`
//! simply vanish.
//!
//! [`NumberTables`] is an immutable snapshot. The free functions in this module
//! go through a process-wide cache that is grown geometrically on demand and
//! republished as a fresh `Arc`, so readers never observe a partially built
//! table.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default upper bound on the number of rows the shared cache may hold.
pub const DEFAULT_TABLE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinumError {
    #[error("requested {requested} table rows, cap is {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("row {requested} is not in this table (built up to row {built})")]
    OutOfTable { requested: i64, built: usize },
    #[error("Bell number of negative index {0}")]
    NegativeIndex(i64),
}

/// Triangular tables of `s(n,k)` (signed, first kind) and `S(n,k)` (second
/// kind), plus Bell numbers.
///
/// The triangles and the Bell vector have independent extents: asymptotic
/// work needs Bell numbers far beyond the rows the Stirling triangles are
/// ever indexed at.
#[derive(Debug, Clone)]
pub struct NumberTables {
    s1: Vec<Vec<BigInt>>,
    s2: Vec<Vec<BigInt>>,
    bell: Vec<BigInt>,
}

impl NumberTables {
    /// Tables with Stirling rows and Bell numbers up to `max_n` inclusive.
    pub fn build(max_n: usize) -> Self {
        Self::with_extents(max_n, max_n)
    }

    pub fn with_extents(triangle_rows: usize, bell_rows: usize) -> Self {
        let mut t = NumberTables {
            s1: vec![vec![BigInt::one()]],
            s2: vec![vec![BigInt::one()]],
            bell: vec![BigInt::one()],
        };
        t.extend_to(triangle_rows, bell_rows);
        t
    }

    fn extend_to(&mut self, triangle_rows: usize, bell_rows: usize) {
        while self.s2.len() <= triangle_rows {
            let n = self.s2.len();
            let prev1 = &self.s1[n - 1];
            let prev2 = &self.s2[n - 1];
            let at = |row: &Vec<BigInt>, k: usize| row.get(k).cloned().unwrap_or_default();
            let factor = BigInt::from(n - 1);
            let mut row1 = Vec::with_capacity(n + 1);
            let mut row2 = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let down1 = if k == 0 {
                    BigInt::zero()
                } else {
                    at(prev1, k - 1)
                };
                let down2 = if k == 0 {
                    BigInt::zero()
                } else {
                    at(prev2, k - 1)
                };
                row1.push(down1 - &factor * at(prev1, k));
                row2.push(down2 + BigInt::from(k) * at(prev2, k));
            }
            self.s1.push(row1);
            self.s2.push(row2);
        }
        // B(m+1) = sum_j C(m, j) B(j), with the binomial row carried along.
        while self.bell.len() <= bell_rows {
            let m = self.bell.len() - 1;
            let mut binom = BigInt::one();
            let mut next = BigInt::zero();
            for (j, b) in self.bell.iter().enumerate() {
                next += &binom * b;
                binom = binom * BigInt::from(m - j) / BigInt::from(j + 1);
            }
            self.bell.push(next);
        }
    }

    /// Highest Stirling row available.
    pub fn max_n(&self) -> usize {
        self.s2.len() - 1
    }

    /// Highest Bell index available.
    pub fn max_bell(&self) -> usize {
        self.bell.len() - 1
    }

    fn lookup(table: &[Vec<BigInt>], n: i64, k: i64) -> Result<BigInt, CombinumError> {
        if n < 0 || k < 0 || k > n {
            return Ok(BigInt::zero());
        }
        table
            .get(n as usize)
            .map(|row| row[k as usize].clone())
            .ok_or(CombinumError::OutOfTable {
                requested: n,
                built: table.len() - 1,
            })
    }

    pub fn stirling2(&self, n: i64, k: i64) -> Result<BigInt, CombinumError> {
        Self::lookup(&self.s2, n, k)
    }

    pub fn stirling1_signed(&self, n: i64, k: i64) -> Result<BigInt, CombinumError> {
        Self::lookup(&self.s1, n, k)
    }

    pub fn stirling1_unsigned(&self, n: i64, k: i64) -> Result<BigInt, CombinumError> {
        self.stirling1_signed(n, k).map(|v| v.abs())
    }

    pub fn bell(&self, n: i64) -> Result<BigInt, CombinumError> {
        if n < 0 {
            return Err(CombinumError::NegativeIndex(n));
        }
        self.bell
            .get(n as usize)
            .cloned()
            .ok_or(CombinumError::OutOfTable {
                requested: n,
                built: self.max_bell(),
            })
    }

    /// Copy of these tables with `S(n,k)` shifted by `delta`.
    ///
    /// Only useful for checking that verification actually notices a corrupted
    /// table.
    pub fn with_stirling2_offset(&self, n: usize, k: usize, delta: i64) -> Self {
        let mut t = self.clone();
        t.s2[n][k] += BigInt::from(delta);
        t
    }
}

struct SharedTables {
    current: RwLock<Arc<NumberTables>>,
    cap: AtomicUsize,
}

fn shared() -> &'static SharedTables {
    static SHARED: OnceLock<SharedTables> = OnceLock::new();
    SHARED.get_or_init(|| SharedTables {
        current: RwLock::new(Arc::new(NumberTables::build(16))),
        cap: AtomicUsize::new(DEFAULT_TABLE_CAP),
    })
}

/// Sets the largest row count the shared cache may grow to.
pub fn set_table_cap(cap: usize) {
    shared().cap.store(cap, Ordering::Relaxed);
}

pub fn table_cap() -> usize {
    shared().cap.load(Ordering::Relaxed)
}

/// Returns shared tables covering at least the requested extents.
pub fn shared_tables(
    triangle_rows: usize,
    bell_rows: usize,
) -> Result<Arc<NumberTables>, CombinumError> {
    let cache = shared();
    let cap = table_cap();
    let requested = triangle_rows.max(bell_rows);
    if requested > cap {
        return Err(CombinumError::CapExceeded { requested, cap });
    }
    {
        let cur = cache.current.read().expect("table lock poisoned");
        if cur.max_n() >= triangle_rows && cur.max_bell() >= bell_rows {
            return Ok(Arc::clone(&cur));
        }
    }
    let mut guard = cache.current.write().expect("table lock poisoned");
    let (have_tri, have_bell) = (guard.max_n(), guard.max_bell());
    if have_tri >= triangle_rows && have_bell >= bell_rows {
        return Ok(Arc::clone(&guard));
    }
    let grow = |have: usize, want: usize| {
        if have >= want {
            have
        } else {
            want.max(2 * have).min(cap)
        }
    };
    let mut next = NumberTables::clone(&guard);
    next.extend_to(grow(have_tri, triangle_rows), grow(have_bell, bell_rows));
    let next = Arc::new(next);
    *guard = Arc::clone(&next);
    Ok(next)
}

fn in_triangle(n: i64, k: i64) -> bool {
    n >= 0 && k >= 0 && k <= n
}

/// `S(n,k)`, zero outside `0 <= k <= n`.
pub fn stirling2(n: i64, k: i64) -> Result<BigInt, CombinumError> {
    if !in_triangle(n, k) {
        return Ok(BigInt::zero());
    }
    shared_tables(n as usize, 0)?.stirling2(n, k)
}

/// Signed `s(n,k)`; its sign is `(-1)^(n-k)`.
pub fn stirling1_signed(n: i64, k: i64) -> Result<BigInt, CombinumError> {
    if !in_triangle(n, k) {
        return Ok(BigInt::zero());
    }
    shared_tables(n as usize, 0)?.stirling1_signed(n, k)
}

pub fn stirling1_unsigned(n: i64, k: i64) -> Result<BigInt, CombinumError> {
    stirling1_signed(n, k).map(|v| v.abs())
}

pub fn bell(n: i64) -> Result<BigInt, CombinumError> {
    if n < 0 {
        return Err(CombinumError::NegativeIndex(n));
    }
    shared_tables(0, n as usize)?.bell(n)
}

/// How binomial coefficients outside Pascal's triangle are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BinomialConvention {
    /// Zero for `k < 0`, for `0 <= n < k`, and for negative `n` with `k > 0`;
    /// `C(n,0) = 1` for every `n`.
    #[default]
    Pascal,
    /// `n(n-1)...(n-k+1)/k!` for any integer `n` and `k >= 0`.
    FallingFactorial,
}

impl BinomialConvention {
    pub fn eval(self, n: i64, k: i64) -> BigInt {
        match self {
            BinomialConvention::Pascal => binomial(n, k),
            BinomialConvention::FallingFactorial => falling_factorial(n, k),
        }
    }
}

/// Binomial coefficient under the Pascal convention.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if k == 0 {
        return BigInt::one();
    }
    if n < 0 || k > n {
        return BigInt::zero();
    }
    falling_factorial(n, k.min(n - k))
}

/// Generalized binomial `n(n-1)...(n-k+1)/k!`; zero for `k < 0`.
pub fn falling_factorial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        // a product of i+1 consecutive integers is divisible by (i+1)!
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn stirling2_examples() {
        assert_eq!(stirling2(0, 0).unwrap(), big(1));
        assert_eq!(stirling2(3, 5).unwrap(), big(0));
        assert_eq!(stirling2(4, 2).unwrap(), big(7));
        assert_eq!(stirling2(-1, 0).unwrap(), big(0));
        assert_eq!(stirling2(3, -2).unwrap(), big(0));
    }

    #[test]
    fn stirling1_examples() {
        assert_eq!(stirling1_signed(3, 3).unwrap(), big(1));
        assert_eq!(stirling1_signed(3, 2).unwrap(), big(-3));
        assert_eq!(stirling1_signed(3, 1).unwrap(), big(2));
        assert_eq!(stirling1_unsigned(3, 2).unwrap(), big(3));
    }

    #[test]
    fn bell_examples() {
        assert_eq!(bell(0).unwrap(), big(1));
        assert_eq!(bell(4).unwrap(), big(15));
        assert_eq!(bell(6).unwrap(), big(203));
        assert!(matches!(bell(-1), Err(CombinumError::NegativeIndex(-1))));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(-1, 0), big(1));
        assert_eq!(binomial(-1, 2), big(0));
        assert_eq!(binomial(3, 4), big(0));
        assert_eq!(binomial(3, -1), big(0));
        assert_eq!(falling_factorial(-1, 2), big(1));
        assert_eq!(falling_factorial(-3, 2), big(6));
        assert_eq!(falling_factorial(2, 3), big(0));
        assert_eq!(BinomialConvention::FallingFactorial.eval(-1, 2), big(1));
    }

    #[test]
    fn recursions_hold_entrywise() {
        let t = NumberTables::build(30);
        for n in 1..=30i64 {
            for k in 0..=n {
                let s2 = t.stirling2(n, k).unwrap();
                let rec2 =
                    big(k) * t.stirling2(n - 1, k).unwrap() + t.stirling2(n - 1, k - 1).unwrap();
                assert_eq!(s2, rec2, "S({n},{k})");
                let s1 = t.stirling1_signed(n, k).unwrap();
                let rec1 = -big(n - 1) * t.stirling1_signed(n - 1, k).unwrap()
                    + t.stirling1_signed(n - 1, k - 1).unwrap();
                assert_eq!(s1, rec1, "s({n},{k})");
            }
        }
    }

    #[test]
    fn table_invariants() {
        let t = NumberTables::build(30);
        for n in 0..=30i64 {
            assert_eq!(t.stirling2(n, n).unwrap(), big(1));
            assert_eq!(t.stirling1_signed(n, n).unwrap(), big(1));
            if n >= 1 {
                assert_eq!(t.stirling2(n, 1).unwrap(), big(1));
            }
            let row_sum: BigInt = (0..=n).map(|k| t.stirling2(n, k).unwrap()).sum();
            assert_eq!(row_sum, t.bell(n).unwrap());
            for k in 0..=n {
                let v = t.stirling1_signed(n, k).unwrap();
                if !v.is_zero() {
                    let expect_negative = (n - k) % 2 == 1;
                    assert_eq!(v.is_negative(), expect_negative, "sign of s({n},{k})");
                }
            }
        }
    }

    #[test]
    fn rising_factorial_expansion() {
        // prod_{j<n} (x + j) as a coefficient vector, by direct multiplication
        for n in 0..=12usize {
            let mut poly = vec![big(1)];
            for j in 0..n {
                let mut next = vec![big(0); poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] += c * big(j as i64);
                }
                poly = next;
            }
            for (d, c) in poly.iter().enumerate() {
                assert_eq!(
                    *c,
                    stirling1_unsigned(n as i64, d as i64).unwrap(),
                    "n={n} d={d}"
                );
            }
        }
    }

    #[test]
    fn lookups_beyond_table_fail() {
        let t = NumberTables::with_extents(5, 40);
        assert!(matches!(
            t.stirling2(6, 2),
            Err(CombinumError::OutOfTable { .. })
        ));
        assert_eq!(t.stirling2(4, 9).unwrap(), big(0));
        assert!(t.bell(40).is_ok());
        assert!(t.bell(41).is_err());
    }

    #[test]
    fn shared_cap_is_enforced() {
        assert!(matches!(
            shared_tables(DEFAULT_TABLE_CAP + 1, 0),
            Err(CombinumError::CapExceeded { .. })
        ));
    }

    #[test]
    fn offset_changes_single_entry() {
        let t = NumberTables::build(6);
        let bad = t.with_stirling2_offset(5, 2, 1);
        assert_eq!(bad.stirling2(5, 2).unwrap(), t.stirling2(5, 2).unwrap() + 1);
        assert_eq!(bad.stirling2(5, 3).unwrap(), t.stirling2(5, 3).unwrap());
    }
}
