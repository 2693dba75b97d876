//! Truncated generating functions for record heights.
//!
//! For `k` blocks, the strong-record series is
//!
//! ```text
//! P_k(x) = x^k prod_{j=2..k} (q_1 + x (q_2 + ... + q_{j-1} - (j-2) q_1))
//!          / prod_{j=1..k} (1 - j x)
//! ```
//!
//! and the weak-record series is
//!
//! ```text
//! Q_k(x) = x^k prod_{j=2..k} (q_1 (1 - (j-2) x) + x (q_2 + ... + q_{j-1}))
//!          / prod_{j=1..k} ((1 - x)(1 - (j-1) x) - x^2 (q_1 + ... + q_{j-1}))
//! ```
//!
//! where `q_i` marks a record of height `i`. The coefficient of `x^n` is the
//! generating polynomial of `P(n,k)` by record heights. Substituting a
//! [`WeightSpec`] for the `q_i` specialises it: all ones recovers `S(n,k)`,
//! `q_1 = q` counts height-one records, `q_i = q^i` tracks total height, and a
//! 0/1 cutoff bounds the maximum height.
//!
//! Both products are built one block at a time, `P_k = P_{k-1} * factor_k`,
//! and each denominator factor is divided out with a unit-constant recurrence.

mod jet;
mod qpoly;
mod xseries;

pub use jet::Jet;
pub use qpoly::QPoly;
pub use xseries::{Coeff, XSeries};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rgf::RecordKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient of x^{degree} requested from a series truncated at {trunc}")]
    BeyondTruncation { degree: usize, trunc: usize },
    #[error("truncation order {trunc} is below the block count {k}")]
    TruncationBelowOrder { k: usize, trunc: usize },
    #[error("series constant term is not a unit")]
    NonUnitConstant,
    #[error("negative q-degree {0}")]
    NegativeQDegree(i64),
    #[error("no weight given for height {0}")]
    MissingWeight(usize),
    #[error("weight for height {0} does not have an integer value and slope at q = 1")]
    NonIntegerWeight(usize),
}

/// Substitution for the height markers `q_1, q_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// Every `q_i = 1`.
    AllOnes,
    /// `q_1 = q`, other heights 1.
    HeightOne,
    /// `q_i = q^i`.
    TotalHeight,
    /// `q_i = 1` for `i <= h`, 0 above.
    MaxCutoff(u32),
    /// Every `q_i = q`.
    Uniform,
    /// `q_i` is the `(i-1)`th entry.
    Custom(Vec<QPoly>),
}

impl WeightSpec {
    pub fn weight(&self, i: usize) -> Result<QPoly, SeriesError> {
        Ok(match self {
            WeightSpec::AllOnes => QPoly::one(),
            WeightSpec::HeightOne if i == 1 => QPoly::q(),
            WeightSpec::HeightOne => QPoly::one(),
            WeightSpec::TotalHeight => QPoly::q_pow(i as u32),
            WeightSpec::MaxCutoff(h) if i <= *h as usize => QPoly::one(),
            WeightSpec::MaxCutoff(_) => QPoly::zero(),
            WeightSpec::Uniform => QPoly::q(),
            WeightSpec::Custom(ws) => ws
                .get(i - 1)
                .cloned()
                .ok_or(SeriesError::MissingWeight(i))?,
        })
    }

    /// `q_1 .. q_count`.
    pub fn resolve(&self, count: usize) -> Result<Vec<QPoly>, SeriesError> {
        (1..=count).map(|i| self.weight(i)).collect()
    }
}

fn int<C: Coeff>(v: i64) -> C {
    let mut acc = C::zero();
    for _ in 0..v.unsigned_abs() {
        acc = acc + C::one();
    }
    if v < 0 {
        -acc
    } else {
        acc
    }
}

/// `P_0 .. P_kmax` (or `Q_0 .. Q_kmax`), all truncated at `trunc`.
/// `weights[i-1]` is `q_i`; at least `kmax - 1` are needed.
pub fn family<C: Coeff>(
    kind: RecordKind,
    kmax: usize,
    trunc: usize,
    weights: &[C],
) -> Result<Vec<XSeries<C>>, SeriesError> {
    if kmax >= 2 && weights.len() < kmax - 1 {
        return Err(SeriesError::MissingWeight(weights.len() + 1));
    }
    let mut out = Vec::with_capacity(kmax + 1);
    let mut cur = XSeries::one(trunc);
    out.push(cur.clone());
    let x = [C::zero(), C::one()];
    let mut rest = C::zero();
    for k in 1..=kmax {
        if k == 1 {
            cur = cur.mul_poly(&x).div_poly(&[C::one(), -C::one()])?;
        } else {
            let q1 = weights[0].clone();
            if k >= 3 {
                rest = rest + weights[k - 2].clone();
            }
            // q_1 x + (q_2 + ... + q_{k-1} - (k-2) q_1) x^2
            let shift = int::<C>(k as i64 - 2).mul_ref(&q1);
            let numerator = [C::zero(), q1.clone(), rest.clone() - shift];
            let denominator = match kind {
                RecordKind::Strong => vec![C::one(), int(-(k as i64))],
                RecordKind::Weak => {
                    let all = q1 + rest.clone();
                    vec![C::one(), int(-(k as i64)), int::<C>(k as i64 - 1) - all]
                }
            };
            cur = cur.mul_poly(&numerator).div_poly(&denominator)?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

fn single(
    kind: RecordKind,
    k: usize,
    trunc: usize,
    w: &WeightSpec,
) -> Result<XSeries<QPoly>, SeriesError> {
    if trunc < k {
        return Err(SeriesError::TruncationBelowOrder { k, trunc });
    }
    let weights = w.resolve(k.saturating_sub(1))?;
    let mut fam = family(kind, k, trunc, &weights)?;
    Ok(fam.pop().expect("family holds k + 1 series"))
}

/// Strong-record series `P_k(x)` under the weights `w`, truncated at `trunc`.
pub fn strong_series(
    k: usize,
    trunc: usize,
    w: &WeightSpec,
) -> Result<XSeries<QPoly>, SeriesError> {
    single(RecordKind::Strong, k, trunc, w)
}

/// Weak-record series `Q_k(x)` under the weights `w`, truncated at `trunc`.
pub fn weak_series(k: usize, trunc: usize, w: &WeightSpec) -> Result<XSeries<QPoly>, SeriesError> {
    single(RecordKind::Weak, k, trunc, w)
}

/// All of `P_0 .. P_kmax` (or `Q_...`) under `w`.
pub fn series_family(
    kind: RecordKind,
    kmax: usize,
    trunc: usize,
    w: &WeightSpec,
) -> Result<Vec<XSeries<QPoly>>, SeriesError> {
    let weights = w.resolve(kmax.saturating_sub(1))?;
    family(kind, kmax, trunc, &weights)
}

pub fn coeff(s: &XSeries<QPoly>, n: usize) -> Result<QPoly, SeriesError> {
    s.coeff(n).cloned()
}

/// Coefficient of `q^r x^n`.
pub fn coeff_qr(s: &XSeries<QPoly>, n: usize, r: i64) -> Result<BigRational, SeriesError> {
    if r < 0 {
        return Err(SeriesError::NegativeQDegree(r));
    }
    Ok(s.coeff(n)?.coeff(r as u32))
}

/// `d/dq` of every coefficient, evaluated at `q = 1`.
pub fn q_derivative_at_one(s: &XSeries<QPoly>) -> XSeries<QPoly> {
    let one = BigRational::one();
    s.map(|p| QPoly::constant(p.derivative().eval(&one)))
}

/// `sum_k d/dq [x^n] series_k |_{q=1}` for `n = 0..=max_n`: the total of the
/// marked quantity over all of `P(n)`.
///
/// Runs on [`Jet`] coefficients, so it stays cheap at `n` in the hundreds.
pub fn q_derivative_totals(
    kind: RecordKind,
    w: &WeightSpec,
    max_n: usize,
) -> Result<Vec<BigInt>, SeriesError> {
    let weights: Vec<Jet> = w
        .resolve(max_n.saturating_sub(1))?
        .iter()
        .enumerate()
        .map(|(i, p)| Jet::from_qpoly(p).ok_or(SeriesError::NonIntegerWeight(i + 1)))
        .collect::<Result<_, _>>()?;
    let fam = family(kind, max_n, max_n, &weights)?;
    let mut totals = vec![BigInt::zero(); max_n + 1];
    for s in &fam {
        for (t, c) in totals.iter_mut().zip(s.coeffs()) {
            *t += &c.slope;
        }
    }
    Ok(totals)
}
