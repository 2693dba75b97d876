//! Exact closed forms for record statistics, in terms of Stirling and Bell
//! numbers.
//!
//! Every formula is accumulated over `BigRational` and must come out with
//! denominator 1; anything else is reported as [`ClosedFormError::NonIntegral`].
//!
//! Two groups deserve a note:
//!
//! * The weak height-one totals ([`FormulaId::WeakH1Total`],
//!   [`FormulaId::WeakH1TotalAll`]) are evaluated exactly as published. They do
//!   not agree with enumeration (the per-`(n,k)` expression matches the true
//!   total at `n + 1`), and callers are expected to report the disagreement
//!   rather than rely on the value.
//! * The published weak total-height expressions ([`FormulaId::WeakHeightTotal`],
//!   [`FormulaId::WeakHeightTotalAll`]) agree with enumeration for `n <= 4` only.
//!   They are also kept verbatim.
//!
//! In the weak height-one count the free exponent symbol is read as `r`. Both
//! binomial conventions give identical sums there, because the only
//! out-of-triangle binomials multiply `S(0,k) = 0`; Pascal is the default.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinum::{self, BinomialConvention, CombinumError, NumberTables};

/// The eleven published statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FormulaId {
    /// Partitions of `P(n,k)` with exactly `r` strong records of height 1.
    StrongH1Count,
    /// Strong records of height 1 summed over `P(n,k)`.
    StrongH1Total,
    /// Strong records of height 1 summed over `P(n)`.
    StrongH1TotalAll,
    /// Strong-record heights summed over `P(n,k)`.
    StrongHeightTotal,
    /// Strong-record heights summed over `P(n)`.
    StrongHeightTotalAll,
    /// Partitions of `P(n,k)` whose largest strong-record height is at most `h`.
    MaxHeightAtMost,
    /// Partitions of `P(n,k)` with exactly `r` weak records of height 1.
    WeakH1Count,
    WeakH1Total,
    WeakH1TotalAll,
    WeakHeightTotal,
    WeakHeightTotalAll,
}

impl FormulaId {
    pub const ALL: [FormulaId; 11] = [
        FormulaId::StrongH1Count,
        FormulaId::StrongH1Total,
        FormulaId::StrongH1TotalAll,
        FormulaId::StrongHeightTotal,
        FormulaId::StrongHeightTotalAll,
        FormulaId::MaxHeightAtMost,
        FormulaId::WeakH1Count,
        FormulaId::WeakH1Total,
        FormulaId::WeakH1TotalAll,
        FormulaId::WeakHeightTotal,
        FormulaId::WeakHeightTotalAll,
    ];

    /// Short code used in reports (`thm1i` .. `thm3v`).
    pub fn code(self) -> &'static str {
        match self {
            FormulaId::StrongH1Count => "thm1i",
            FormulaId::StrongH1Total => "thm1ii",
            FormulaId::StrongH1TotalAll => "thm1iii",
            FormulaId::StrongHeightTotal => "thm2i",
            FormulaId::StrongHeightTotalAll => "thm2ii",
            FormulaId::MaxHeightAtMost => "thm2iii",
            FormulaId::WeakH1Count => "thm3i",
            FormulaId::WeakH1Total => "thm3ii",
            FormulaId::WeakH1TotalAll => "thm3iii",
            FormulaId::WeakHeightTotal => "thm3iv",
            FormulaId::WeakHeightTotalAll => "thm3v",
        }
    }

    /// Descriptive name used by the `table` command.
    pub fn name(self) -> &'static str {
        match self {
            FormulaId::StrongH1Count => "strong-h1-count",
            FormulaId::StrongH1Total => "strong-h1-total",
            FormulaId::StrongH1TotalAll => "strong-h1-total-all",
            FormulaId::StrongHeightTotal => "strong-height-total",
            FormulaId::StrongHeightTotalAll => "strong-height-total-all",
            FormulaId::MaxHeightAtMost => "max-height-at-most",
            FormulaId::WeakH1Count => "weak-h1-count",
            FormulaId::WeakH1Total => "weak-h1-total",
            FormulaId::WeakH1TotalAll => "weak-h1-total-all",
            FormulaId::WeakHeightTotal => "weak-height-total",
            FormulaId::WeakHeightTotalAll => "weak-height-total-all",
        }
    }

    /// Whether the statistic is indexed by a block count `k`.
    pub fn has_k(self) -> bool {
        !matches!(
            self,
            FormulaId::StrongH1TotalAll
                | FormulaId::StrongHeightTotalAll
                | FormulaId::WeakH1TotalAll
                | FormulaId::WeakHeightTotalAll
        )
    }

    pub fn param(self) -> Option<ParamKind> {
        match self {
            FormulaId::StrongH1Count | FormulaId::WeakH1Count => Some(ParamKind::R),
            FormulaId::MaxHeightAtMost => Some(ParamKind::H),
            _ => None,
        }
    }

    /// The published expressions known to disagree with enumeration for
    /// documented reasons.
    pub fn is_documented_discrepancy(self) -> bool {
        matches!(self, FormulaId::WeakH1Total | FormulaId::WeakH1TotalAll)
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for FormulaId {
    type Err = String;

    /// Accepts either the short code or the descriptive name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormulaId::ALL
            .into_iter()
            .find(|id| id.code() == s || id.name() == s)
            .ok_or_else(|| format!("unknown statistic {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKind {
    /// Number of height-one records.
    R,
    /// Height bound.
    H,
}

impl ParamKind {
    pub fn letter(self) -> char {
        match self {
            ParamKind::R => 'r',
            ParamKind::H => 'h',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct FormulaInputs {
    pub n: i64,
    pub k: Option<i64>,
    pub r: Option<i64>,
    pub h: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaResult {
    pub value: BigInt,
    pub formula: FormulaId,
    pub inputs: FormulaInputs,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error("{formula}: {detail}")]
    Domain { formula: FormulaId, detail: String },
    #[error("{formula} evaluated to the non-integer {value}")]
    NonIntegral {
        formula: FormulaId,
        value: BigRational,
    },
    #[error(transparent)]
    Table(#[from] CombinumError),
}

fn domain(formula: FormulaId, detail: impl Into<String>) -> ClosedFormError {
    ClosedFormError::Domain {
        formula,
        detail: detail.into(),
    }
}

fn rat(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Evaluator bound to one set of [`NumberTables`].
#[derive(Debug, Clone)]
pub struct ClosedForms {
    tables: Arc<NumberTables>,
    weak_binomial: BinomialConvention,
}

impl ClosedForms {
    /// Uses the shared tables, grown to cover every formula up to `max_n`.
    pub fn for_max_n(max_n: usize) -> Result<Self, CombinumError> {
        Ok(Self::with_tables(combinum::shared_tables(
            max_n + 2,
            max_n + 2,
        )?))
    }

    /// Bell numbers only, enough for the `P(n)` aggregates up to `max_n`.
    pub fn for_bell(max_n: usize) -> Result<Self, CombinumError> {
        Ok(Self::with_tables(combinum::shared_tables(0, max_n + 2)?))
    }

    pub fn with_tables(tables: Arc<NumberTables>) -> Self {
        ClosedForms {
            tables,
            weak_binomial: BinomialConvention::Pascal,
        }
    }

    /// Binomial convention for the weak height-one count.
    pub fn with_weak_binomial(mut self, conv: BinomialConvention) -> Self {
        self.weak_binomial = conv;
        self
    }

    pub fn tables(&self) -> &NumberTables {
        &self.tables
    }

    fn s2(&self, n: i64, k: i64) -> Result<BigInt, CombinumError> {
        self.tables.stirling2(n, k)
    }

    fn bell(&self, n: i64) -> Result<BigInt, CombinumError> {
        self.tables.bell(n)
    }

    fn finish(
        &self,
        formula: FormulaId,
        inputs: FormulaInputs,
        value: BigRational,
    ) -> Result<FormulaResult, ClosedFormError> {
        if !value.is_integer() {
            return Err(ClosedFormError::NonIntegral { formula, value });
        }
        Ok(FormulaResult {
            value: value.to_integer(),
            formula,
            inputs,
        })
    }

    fn require_nk(formula: FormulaId, n: i64, k: i64) -> Result<(), ClosedFormError> {
        if k < 1 || n < k {
            return Err(domain(
                formula,
                format!("needs n >= k >= 1, got n={n}, k={k}"),
            ));
        }
        Ok(())
    }

    fn require_n(formula: FormulaId, n: i64, min: i64) -> Result<(), ClosedFormError> {
        if n < min {
            return Err(domain(formula, format!("needs n >= {min}, got n={n}")));
        }
        Ok(())
    }

    /// Dispatches on `id`; `param` is `r` or `h` as the statistic requires.
    pub fn evaluate(
        &self,
        id: FormulaId,
        n: i64,
        k: Option<i64>,
        param: Option<i64>,
    ) -> Result<FormulaResult, ClosedFormError> {
        let need_k = || k.ok_or_else(|| domain(id, "missing k"));
        let need_p = || param.ok_or_else(|| domain(id, "missing parameter"));
        match id {
            FormulaId::StrongH1Count => self.strong_h1_count(n, need_k()?, need_p()?),
            FormulaId::StrongH1Total => self.strong_h1_total(n, need_k()?),
            FormulaId::StrongH1TotalAll => self.strong_h1_total_all(n),
            FormulaId::StrongHeightTotal => self.strong_height_total(n, need_k()?),
            FormulaId::StrongHeightTotalAll => self.strong_height_total_all(n),
            FormulaId::MaxHeightAtMost => self.max_height_at_most(n, need_k()?, need_p()?),
            FormulaId::WeakH1Count => self.weak_h1_count(n, need_k()?, need_p()?),
            FormulaId::WeakH1Total => self.weak_h1_total(n, need_k()?),
            FormulaId::WeakH1TotalAll => self.weak_h1_total_all(n),
            FormulaId::WeakHeightTotal => self.weak_height_total(n, need_k()?),
            FormulaId::WeakHeightTotalAll => self.weak_height_total_all(n),
        }
    }

    /// `sum_{j<k} (-1)^(r-j) C(k-1-j, r-j) |s(k-1,j)| S(n-k+1+j, k)`.
    pub fn strong_h1_count(
        &self,
        n: i64,
        k: i64,
        r: i64,
    ) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::StrongH1Count;
        Self::require_nk(id, n, k)?;
        if r < 0 {
            return Err(domain(id, "r must be nonnegative"));
        }
        let mut acc = BigInt::zero();
        for j in 0..k {
            let b = combinum::binomial(k - 1 - j, r - j);
            if b.is_zero() {
                continue;
            }
            acc += sign(r - j)
                * b
                * self.tables.stirling1_unsigned(k - 1, j)?
                * self.s2(n - k + 1 + j, k)?;
        }
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                r: Some(r),
                h: None,
            },
            rat(acc),
        )
    }

    /// `S(n+1,k)/2 + S(n,k)/2 - S(n-1,k) - S(n-1,k-1) - S(n-1,k-2)/2`.
    pub fn strong_h1_total(&self, n: i64, k: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::StrongH1Total;
        Self::require_nk(id, n, k)?;
        Self::require_n(id, n, 2)?;
        let half = frac(1, 2);
        let v = &half * rat(self.s2(n + 1, k)?) + &half * rat(self.s2(n, k)?)
            - rat(self.s2(n - 1, k)?)
            - rat(self.s2(n - 1, k - 1)?)
            - &half * rat(self.s2(n - 1, k - 2)?);
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                ..Default::default()
            },
            v,
        )
    }

    /// `B(n+1)/2 + B(n)/2 - 5 B(n-1)/2`, for `n >= 2`.
    pub fn strong_h1_total_all(&self, n: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::StrongH1TotalAll;
        Self::require_n(id, n, 2)?;
        let v = frac(1, 2) * rat(self.bell(n + 1)?) + frac(1, 2) * rat(self.bell(n)?)
            - frac(5, 2) * rat(self.bell(n - 1)?);
        self.finish(
            id,
            FormulaInputs {
                n,
                ..Default::default()
            },
            v,
        )
    }

    /// `(k-1) S(n,k) + C(k,3) S(n-1,k)`.
    pub fn strong_height_total(&self, n: i64, k: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::StrongHeightTotal;
        Self::require_nk(id, n, k)?;
        let v =
            BigInt::from(k - 1) * self.s2(n, k)? + combinum::binomial(k, 3) * self.s2(n - 1, k)?;
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                ..Default::default()
            },
            rat(v),
        )
    }

    /// `B(n+2)/6 - 2 B(n)/3 - B(n-1)/6`, for `n >= 1`.
    pub fn strong_height_total_all(&self, n: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::StrongHeightTotalAll;
        Self::require_n(id, n, 1)?;
        let v = frac(1, 6) * rat(self.bell(n + 2)?)
            - frac(2, 3) * rat(self.bell(n)?)
            - frac(1, 6) * rat(self.bell(n - 1)?);
        self.finish(
            id,
            FormulaInputs {
                n,
                ..Default::default()
            },
            v,
        )
    }

    /// `sum_{j=1}^{k-h} s(k-h,j) S(n-(k-h)+j, k)` with signed `s`.
    ///
    /// The generating function behind this sets `q_i = 1` for `i <= h` and 0
    /// above, so it counts partitions whose maximum strong height is at most
    /// `h`. See [`Self::max_height_exact`] for the exactly-`h` reading.
    pub fn max_height_at_most(
        &self,
        n: i64,
        k: i64,
        h: i64,
    ) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::MaxHeightAtMost;
        if k < 2 || n < k {
            return Err(domain(id, format!("needs n >= k >= 2, got n={n}, k={k}")));
        }
        if h < 1 || h > k - 1 {
            return Err(domain(id, format!("needs 1 <= h <= k-1, got h={h}")));
        }
        let m = k - h;
        let mut acc = BigInt::zero();
        for j in 1..=m {
            acc += self.tables.stirling1_signed(m, j)? * self.s2(n - m + j, k)?;
        }
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                r: None,
                h: Some(h),
            },
            rat(acc),
        )
    }

    /// `F(h) - F(h-1)` with `F` the at-most count and `F(0) = 0`.
    ///
    /// Defined for every `h >= 0`: a single block has maximum height 0, and
    /// with two or more blocks the maximum lies in `1..=k-1`.
    pub fn max_height_exact(&self, n: i64, k: i64, h: i64) -> Result<BigInt, ClosedFormError> {
        Self::require_nk(FormulaId::MaxHeightAtMost, n, k)?;
        if h < 0 {
            return Err(domain(
                FormulaId::MaxHeightAtMost,
                format!("needs h >= 0, got h={h}"),
            ));
        }
        if k == 1 {
            return Ok(BigInt::from(u8::from(h == 0)));
        }
        if h == 0 || h >= k {
            return Ok(BigInt::zero());
        }
        let upper = self.max_height_at_most(n, k, h)?.value;
        let lower = if h == 1 {
            BigInt::zero()
        } else {
            self.max_height_at_most(n, k, h - 1)?.value
        };
        Ok(upper - lower)
    }

    /// Double plus triple sum over Stirling numbers; see the module docs for
    /// how the exponent symbol and the binomials are read.
    pub fn weak_h1_count(&self, n: i64, k: i64, r: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::WeakH1Count;
        Self::require_nk(id, n, k)?;
        if r < 0 {
            return Err(domain(id, "r must be nonnegative"));
        }
        let c = |a: i64, b: i64| self.weak_binomial.eval(a, b);
        let mut acc = BigInt::zero();
        for i in 0..k {
            let s1 = self.tables.stirling1_unsigned(k - 1, i)?;
            if s1.is_zero() {
                continue;
            }
            let top = n + i - k;
            if top >= 0 {
                for a in 0..=top.div_euclid(2) {
                    let term = c(n + i - a - k, a) * c(k + a - 1 - i, r - i);
                    if term.is_zero() {
                        continue;
                    }
                    acc += sign(r + a - i) * term * self.s2(n + 1 + i - 2 * a - k, k)? * &s1;
                }
            }
            let top = n + i - 1 - k;
            if top >= 0 {
                for a in 0..=top.div_euclid(2) {
                    let outer = c(k + a - i, r - i);
                    if outer.is_zero() {
                        continue;
                    }
                    for j in 0..=(n + i - 1 - 2 * a - k) {
                        let term = c(j - 1 + a, a) * &outer;
                        if term.is_zero() {
                            continue;
                        }
                        acc += sign(r + a - i) * term * self.s2(j, k)? * &s1;
                    }
                }
            }
        }
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                r: Some(r),
                h: None,
            },
            rat(acc),
        )
    }

    /// Published weak height-one total over `P(n,k)`, evaluated verbatim:
    /// `S(n+2,k)/2 + S(n+1,k)/2 + n S(n-1,k) - S(n,k-1) - S(n,k-2)/2 - S(n-1,k)
    ///  - sum_{j<n} C(n,j) S(n-1-j,k-1)`.
    pub fn weak_h1_total(&self, n: i64, k: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::WeakH1Total;
        Self::require_nk(id, n, k)?;
        let half = frac(1, 2);
        let mut v = &half * rat(self.s2(n + 2, k)?)
            + &half * rat(self.s2(n + 1, k)?)
            + rat(BigInt::from(n) * self.s2(n - 1, k)?)
            - rat(self.s2(n, k - 1)?)
            - &half * rat(self.s2(n, k - 2)?)
            - rat(self.s2(n - 1, k)?);
        for j in 0..n {
            v -= rat(combinum::binomial(n, j) * self.s2(n - 1 - j, k - 1)?);
        }
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                ..Default::default()
            },
            v,
        )
    }

    /// Published weak height-one total over `P(n)`, evaluated verbatim:
    /// `B(n+1)/2 + B(n)/2 + (n-1) B(n-2) - 3 B(n-1)/2 - B(n-2)
    ///  - sum_{j<n} C(n,j+1) B(j)`.
    pub fn weak_h1_total_all(&self, n: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::WeakH1TotalAll;
        Self::require_n(id, n, 2)?;
        let mut v = frac(1, 2) * rat(self.bell(n + 1)?)
            + frac(1, 2) * rat(self.bell(n)?)
            + rat(BigInt::from(n - 1) * self.bell(n - 2)?)
            - frac(3, 2) * rat(self.bell(n - 1)?)
            - rat(self.bell(n - 2)?);
        for j in 0..n {
            v -= rat(combinum::binomial(n, j + 1) * self.bell(j)?);
        }
        self.finish(
            id,
            FormulaInputs {
                n,
                ..Default::default()
            },
            v,
        )
    }

    /// `(k-1) S(n,k) + C(k,3) S(n-1,k) + C(k+1,3) S(n-2,k)`, as published.
    pub fn weak_height_total(&self, n: i64, k: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::WeakHeightTotal;
        Self::require_nk(id, n, k)?;
        let v = BigInt::from(k - 1) * self.s2(n, k)?
            + combinum::binomial(k, 3) * self.s2(n - 1, k)?
            + combinum::binomial(k + 1, 3) * self.s2(n - 2, k)?;
        self.finish(
            id,
            FormulaInputs {
                n,
                k: Some(k),
                ..Default::default()
            },
            rat(v),
        )
    }

    /// `B(n+2)/6 + B(n+1)/6 - 7 B(n)/6 - B(n-1)/3 + B(n-2)/3`, as published.
    pub fn weak_height_total_all(&self, n: i64) -> Result<FormulaResult, ClosedFormError> {
        let id = FormulaId::WeakHeightTotalAll;
        Self::require_n(id, n, 2)?;
        let v = frac(1, 6) * rat(self.bell(n + 2)?) + frac(1, 6) * rat(self.bell(n + 1)?)
            - frac(7, 6) * rat(self.bell(n)?)
            - frac(1, 3) * rat(self.bell(n - 1)?)
            + frac(1, 3) * rat(self.bell(n - 2)?);
        self.finish(
            id,
            FormulaInputs {
                n,
                ..Default::default()
            },
            v,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_stats, oracle_stats_all};

    fn forms() -> ClosedForms {
        ClosedForms::for_max_n(14).unwrap()
    }

    fn v(r: Result<FormulaResult, ClosedFormError>) -> i64 {
        i64::try_from(r.unwrap().value).unwrap()
    }

    #[test]
    fn strong_h1_count_examples() {
        let f = forms();
        assert_eq!(v(f.strong_h1_count(3, 2, 1)), 3);
        assert_eq!(v(f.strong_h1_count(4, 3, 2)), 5);
        assert_eq!(v(f.strong_h1_count(5, 5, 4)), 1);
        assert_eq!(v(f.strong_h1_count(7, 7, 6)), 1);
    }

    #[test]
    fn strong_h1_total_examples() {
        let f = forms();
        assert_eq!(v(f.strong_h1_total(2, 2)), 1);
        assert_eq!(v(f.strong_h1_total(4, 2)), 7);
        for n in 2..=10 {
            assert_eq!(v(f.strong_h1_total(n, 1)), 0);
        }
        assert_eq!(v(f.strong_h1_total_all(2)), 1);
        assert_eq!(v(f.strong_h1_total_all(3)), 5);
        assert_eq!(v(f.strong_h1_total_all(4)), 21);
    }

    #[test]
    fn strong_height_examples() {
        let f = forms();
        assert_eq!(v(f.strong_height_total(3, 2)), 3);
        assert_eq!(v(f.strong_height_total(4, 3)), 13);
        assert_eq!(v(f.strong_height_total(6, 1)), 0);
        assert_eq!(v(f.strong_height_total_all(2)), 1);
        assert_eq!(v(f.strong_height_total_all(3)), 5);
        assert_eq!(v(f.strong_height_total_all(4)), 23);
    }

    #[test]
    fn max_height_examples() {
        let f = forms();
        assert_eq!(v(f.max_height_at_most(4, 3, 1)), 5);
        assert_eq!(v(f.max_height_at_most(4, 3, 2)), 6);
        for n in 2..=10 {
            for k in 2..=n {
                let all = f.max_height_at_most(n, k, k - 1).unwrap().value;
                assert_eq!(all, f.tables().stirling2(n, k).unwrap());
                let exact_sum: BigInt = (1..k).map(|h| f.max_height_exact(n, k, h).unwrap()).sum();
                assert_eq!(exact_sum, all);
            }
        }
        assert!(f.max_height_at_most(4, 3, 3).is_err());
        assert!(f.max_height_at_most(4, 1, 1).is_err());
    }

    #[test]
    fn weak_h1_count_examples() {
        let f = forms();
        assert_eq!(v(f.weak_h1_count(2, 2, 1)), 1);
        assert_eq!(v(f.weak_h1_count(3, 2, 1)), 3);
        assert_eq!(v(f.weak_h1_count(4, 2, 2)), 1);
    }

    #[test]
    fn published_weak_h1_totals_verbatim() {
        let f = forms();
        assert_eq!(v(f.weak_h1_total(2, 2)), 3);
        assert_eq!(v(f.weak_h1_total(3, 2)), 8);
        assert_eq!(v(f.weak_h1_total(4, 2)), 20);
        assert_eq!(v(f.weak_h1_total_all(2)), -1);
        assert_eq!(v(f.weak_h1_total_all(3)), 0);
        assert_eq!(v(f.weak_h1_total_all(4)), 7);
        // and the enumeration says otherwise
        assert_eq!(oracle_stats(2, 2).unwrap().weak_h1_total(), 1);
        assert_eq!(oracle_stats(3, 2).unwrap().weak_h1_total(), 3);
        assert_eq!(oracle_stats(4, 2).unwrap().weak_h1_total(), 8);
        assert_eq!(oracle_stats_all(4).unwrap().weak_h1_total(), 22);
    }

    #[test]
    fn published_weak_h1_total_is_shifted_by_one() {
        let f = forms();
        for n in 1..=9 {
            for k in 1..=n {
                let printed = f.weak_h1_total(n, k).unwrap().value;
                let next = oracle_stats(n as usize + 1, k as usize)
                    .unwrap()
                    .weak_h1_total();
                assert_eq!(printed, BigInt::from(next), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn weak_height_examples() {
        let f = forms();
        assert_eq!(v(f.weak_height_total(4, 2)), 8);
        assert_eq!(v(f.weak_height_total(4, 3)), 13);
        assert_eq!(v(f.weak_height_total(7, 1)), 0);
        assert_eq!(v(f.weak_height_total_all(2)), 1);
        assert_eq!(v(f.weak_height_total_all(3)), 5);
        assert_eq!(v(f.weak_height_total_all(4)), 24);
        // first disagreement with enumeration
        assert_eq!(v(f.weak_height_total(5, 2)), 18);
        assert_eq!(oracle_stats(5, 2).unwrap().weak_total_height, 20);
        assert_eq!(v(f.weak_height_total_all(5)), 116);
        assert_eq!(oracle_stats_all(5).unwrap().weak_total_height, 118);
    }

    #[test]
    fn strong_formulas_match_enumeration() {
        let f = forms();
        for n in 1..=9i64 {
            for k in 1..=n {
                let b = oracle_stats(n as usize, k as usize).unwrap();
                for r in 0..=n {
                    assert_eq!(
                        f.strong_h1_count(n, k, r).unwrap().value,
                        BigInt::from(b.strong_h1_count(r as usize))
                    );
                }
                if n >= 2 {
                    assert_eq!(
                        f.strong_h1_total(n, k).unwrap().value,
                        BigInt::from(b.strong_h1_total())
                    );
                }
                assert_eq!(
                    f.strong_height_total(n, k).unwrap().value,
                    BigInt::from(b.strong_total_height)
                );
                for h in 1..k {
                    assert_eq!(
                        f.max_height_at_most(n, k, h).unwrap().value,
                        BigInt::from(b.max_height_at_most(h as usize))
                    );
                }
            }
        }
    }

    #[test]
    fn weak_count_conventions_agree_with_enumeration() {
        let pascal = forms();
        let falling = forms().with_weak_binomial(BinomialConvention::FallingFactorial);
        for n in 1..=9i64 {
            for k in 1..=n {
                let b = oracle_stats(n as usize, k as usize).unwrap();
                for r in 0..=n {
                    let want = BigInt::from(b.weak_h1_count(r as usize));
                    assert_eq!(
                        pascal.weak_h1_count(n, k, r).unwrap().value,
                        want,
                        "({n},{k},{r})"
                    );
                    assert_eq!(
                        falling.weak_h1_count(n, k, r).unwrap().value,
                        want,
                        "({n},{k},{r})"
                    );
                }
            }
        }
    }

    #[test]
    fn domains() {
        let f = forms();
        assert!(matches!(
            f.strong_h1_total_all(1),
            Err(ClosedFormError::Domain { .. })
        ));
        assert!(matches!(
            f.strong_h1_count(2, 3, 0),
            Err(ClosedFormError::Domain { .. })
        ));
        assert!(matches!(
            f.strong_h1_count(2, 0, 0),
            Err(ClosedFormError::Domain { .. })
        ));
        assert!(matches!(
            f.weak_h1_count(3, 2, -1),
            Err(ClosedFormError::Domain { .. })
        ));
        assert!(f.strong_height_total_all(1).is_ok());
        assert!(f.weak_height_total_all(1).is_err());
        assert!(matches!(
            f.evaluate(FormulaId::StrongH1Count, 4, None, Some(1)),
            Err(ClosedFormError::Domain { .. })
        ));
    }

    #[test]
    fn bell_only_tables_reject_stirling_lookups() {
        let f = ClosedForms::for_bell(60).unwrap();
        assert!(f.strong_h1_total_all(60).is_ok());
        if f.tables().max_n() < 20 {
            assert!(matches!(
                f.strong_height_total(20, 3),
                Err(ClosedFormError::Table(_))
            ));
        }
    }

    #[test]
    fn ids_round_trip_through_names() {
        for id in FormulaId::ALL {
            assert_eq!(id.code().parse::<FormulaId>().unwrap(), id);
            assert_eq!(id.name().parse::<FormulaId>().unwrap(), id);
        }
        assert!("thm4".parse::<FormulaId>().is_err());
    }
}
