//! Large-`n` estimates for the `P(n)` totals.
//!
//! Everything is expressed in units of `B_n` and driven by the saddle point
//! `xi_n`, the positive root of `xi e^xi = n + 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::closedform::{ClosedFormError, ClosedForms};
use crate::combinum::CombinumError;
use crate::rgf::RecordKind;
use crate::series::{self, SeriesError, WeightSpec};

const NEWTON_MAX_ITER: usize = 200;
const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymError {
    #[error("Newton iteration for n = {n} did not converge (residual {residual:e})")]
    NoConvergence { n: u64, residual: f64 },
    #[error("{what} requires n >= {min}, got {n}")]
    NTooSmall {
        what: &'static str,
        n: u64,
        min: u64,
    },
    #[error("offset {h} is outside |h| <= {bound} for n = {n}")]
    OffsetTooLarge { n: u64, h: i64, bound: i64 },
    #[error("unknown asymptotic statistic '{0}'")]
    UnknownStat(String),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Table(#[from] CombinumError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Root of `xi e^xi = n + 1` by Newton's method.
pub fn solve_xi(n: u64) -> Result<f64, AsymError> {
    let target = n as f64 + 1.0;
    let mut xi = (target.ln() - (n as f64 + 2.0).ln().ln()).max(1.0);
    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let e = xi.exp();
        let f = xi * e - target;
        residual = (f / target).abs();
        if residual <= RESIDUAL_TOL {
            return Ok(xi);
        }
        // f' = (1 + xi) e^xi > 0 and f is convex for xi > -2, so the iterates
        // approach the root from above after the first step
        xi -= f / ((1.0 + xi) * e);
    }
    Err(AsymError::NoConvergence { n, residual })
}

/// `log n - log log n + log log n / log n`.
pub fn xi_expansion(n: u64) -> Result<f64, AsymError> {
    if n < 3 {
        return Err(AsymError::NTooSmall {
            what: "xi_expansion",
            n,
            min: 3,
        });
    }
    let l = (n as f64).ln();
    let ll = l.ln();
    Ok(l - ll + ll / l)
}

/// `(n+h)! / (n! xi_n^h)`, the leading term of `B_{n+h} / B_n`.
pub fn bell_ratio(n: u64, h: i64) -> Result<f64, AsymError> {
    if n < 2 {
        return Err(AsymError::NTooSmall {
            what: "bell_ratio",
            n,
            min: 2,
        });
    }
    let bound = (n as f64).ln().ceil() as i64 + 3;
    if h.abs() > bound {
        return Err(AsymError::OffsetTooLarge { n, h, bound });
    }
    let xi = solve_xi(n)?;
    let mut r = 1.0;
    if h >= 0 {
        for j in 1..=h {
            r *= (n as f64 + j as f64) / xi;
        }
    } else {
        for j in 0..-h {
            r *= xi / (n as f64 - j as f64);
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AsymStat {
    StrongH1All,
    StrongHeightAll,
    WeakH1All,
    WeakHeightAll,
}

impl AsymStat {
    pub const ALL: [AsymStat; 4] = [
        AsymStat::StrongH1All,
        AsymStat::StrongHeightAll,
        AsymStat::WeakH1All,
        AsymStat::WeakHeightAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AsymStat::StrongH1All => "strong-h1",
            AsymStat::StrongHeightAll => "strong-height",
            AsymStat::WeakH1All => "weak-h1",
            AsymStat::WeakHeightAll => "weak-height",
        }
    }

    /// The bracketed factor multiplying `B_n`.
    pub fn factor(self, n: u64, xi: f64) -> f64 {
        let n = n as f64;
        match self {
            AsymStat::StrongH1All | AsymStat::WeakH1All => (n + 1.0) / (2.0 * xi) + 0.5,
            AsymStat::StrongHeightAll => (n + 2.0) * (n + 1.0) / (6.0 * xi * xi) - 2.0 / 3.0,
            AsymStat::WeakHeightAll => {
                (n + 2.0) * (n + 1.0) / (6.0 * xi * xi) + (n + 1.0) / (6.0 * xi) - 7.0 / 6.0
            }
        }
    }
}

impl fmt::Display for AsymStat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AsymStat {
    type Err = AsymError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        let t = t.strip_suffix("-all").unwrap_or(&t);
        AsymStat::ALL
            .into_iter()
            .find(|st| st.name() == t)
            .ok_or_else(|| AsymError::UnknownStat(s.to_string()))
    }
}

/// Calibrated upper bounds on `rel_err` for `n` in 50..=400.
///
/// Measured rel_err at n = 50, 100, 200, 400:
///
/// ```text
///   strong-h1      0.02402  0.01005  0.004224  0.001813
///   strong-height  0.02330  0.01159  0.005758  0.002858
///   weak-h1        0.007052 0.002700 0.001279  0.000700
///   weak-height    0.02291  0.01144  0.005707  0.002842
/// ```
pub const REL_ERR_CEILINGS: [(AsymStat, f64); 4] = [
    (AsymStat::StrongH1All, 0.03),
    (AsymStat::StrongHeightAll, 0.03),
    (AsymStat::WeakH1All, 0.01),
    (AsymStat::WeakHeightAll, 0.03),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymEstimate {
    pub stat: AsymStat,
    pub n: u64,
    pub xi: f64,
    pub estimate: f64,
    pub exact_ratio: f64,
    pub rel_err: f64,
}

/// `num / den` rounded to `f64` through an integer quotient carrying at least
/// 80 significant bits, so neither side has to fit in a double.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() || den.is_zero() {
        return if den.is_zero() { f64::NAN } else { 0.0 };
    }
    let shift = 96 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let m = q.to_f64().unwrap_or(f64::NAN);
    m * 2f64.powi(-shift as i32)
}

/// Exact totals over `P(n)` for every requested `n`, sharing the series
/// expansion for the weak height-one case.
fn exact_totals(stat: AsymStat, ns: &[u64]) -> Result<Vec<BigInt>, AsymError> {
    let max_n = ns.iter().copied().max().unwrap_or(0) as usize;
    let forms = ClosedForms::for_bell(max_n)?;
    if stat == AsymStat::WeakH1All {
        let totals = series::q_derivative_totals(RecordKind::Weak, &WeightSpec::HeightOne, max_n)?;
        return Ok(ns.iter().map(|&n| totals[n as usize].clone()).collect());
    }
    ns.iter()
        .map(|&n| {
            let n = n as i64;
            let r = match stat {
                AsymStat::StrongH1All => forms.strong_h1_total_all(n),
                AsymStat::StrongHeightAll => forms.strong_height_total_all(n),
                _ => forms.weak_height_total_all(n),
            };
            Ok(r?.value)
        })
        .collect()
}

/// Estimates for one statistic at several `n`, in the given order.
pub fn estimates(stat: AsymStat, ns: &[u64]) -> Result<Vec<AsymEstimate>, AsymError> {
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(AsymError::NTooSmall {
            what: "estimate",
            n,
            min: 2,
        });
    }
    let totals = exact_totals(stat, ns)?;
    let bells =
        crate::combinum::shared_tables(0, ns.iter().copied().max().unwrap_or(0) as usize + 2)?;
    ns.iter()
        .zip(totals)
        .map(|(&n, total)| {
            let xi = solve_xi(n)?;
            let estimate = stat.factor(n, xi);
            let exact_ratio = ratio_to_f64(&total, &bells.bell(n as i64)?);
            let rel_err = (exact_ratio / estimate - 1.0).abs();
            Ok(AsymEstimate {
                stat,
                n,
                xi,
                estimate,
                exact_ratio,
                rel_err,
            })
        })
        .collect()
}

pub fn estimate(stat: AsymStat, n: u64) -> Result<AsymEstimate, AsymError> {
    Ok(estimates(stat, &[n])?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn xi_residual_and_edges() {
        for n in [0u64, 1, 9, 100, 12345, 1_000_000] {
            let xi = solve_xi(n).unwrap();
            assert!(xi > 0.0);
            assert!(((xi * xi.exp()) / (n as f64 + 1.0) - 1.0).abs() <= 1e-12);
        }
        assert!(solve_xi(100).unwrap() < solve_xi(200).unwrap());
        assert!((solve_xi(0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-12);
    }

    #[test]
    fn expansion_tracks_root() {
        let diffs: Vec<f64> = [100u64, 1000, 10_000]
            .iter()
            .map(|&n| (xi_expansion(n).unwrap() - solve_xi(n).unwrap()).abs())
            .collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
        assert!(diffs[2] < 0.1);
        assert!(xi_expansion(3).unwrap().is_finite());
        assert!(xi_expansion(2).is_err());
    }

    #[test]
    fn bell_ratio_against_exact_quotient() {
        assert_eq!(bell_ratio(50, 0).unwrap(), 1.0);
        let t = crate::combinum::shared_tables(0, 205).unwrap();
        let b200 = t.bell(200).unwrap();
        let bound = 5.0 * 200f64.ln() / 200.0;
        for h in [1i64, 2] {
            let exact = ratio_to_f64(&t.bell(200 + h).unwrap(), &b200);
            let approx = bell_ratio(200, h).unwrap();
            assert!((approx / exact - 1.0).abs() < bound);
        }
        assert!(matches!(
            bell_ratio(200, 20),
            Err(AsymError::OffsetTooLarge { .. })
        ));
        assert!(bell_ratio(200, -9).is_ok());
        assert!(bell_ratio(1, 0).is_err());
    }

    #[test]
    fn scaled_division() {
        let big = BigInt::one() << 5000u32;
        assert_eq!(ratio_to_f64(&(&big * 3), &(&big * 4)), 0.75);
        assert_eq!(
            ratio_to_f64(&BigInt::from(-1), &BigInt::from(3)),
            -1.0 / 3.0
        );
        assert_eq!(ratio_to_f64(&BigInt::zero(), &big), 0.0);
    }

    #[test]
    fn weak_height_at_two() {
        let e = estimate(AsymStat::WeakHeightAll, 2).unwrap();
        assert_eq!(e.exact_ratio, 0.5);
        assert!(estimate(AsymStat::StrongH1All, 1).is_err());
    }

    #[test]
    fn stat_names_round_trip() {
        for s in AsymStat::ALL {
            assert_eq!(s.name().parse::<AsymStat>().unwrap(), s);
        }
        assert_eq!(
            "weak_height_all".parse::<AsymStat>().unwrap(),
            AsymStat::WeakHeightAll
        );
        assert!("bell".parse::<AsymStat>().is_err());
    }

    #[test]
    fn errors_decay_below_ceiling() {
        for (stat, ceiling) in REL_ERR_CEILINGS {
            let es = estimates(stat, &[50, 100, 200, 400]).unwrap();
            let errs: Vec<f64> = es.iter().map(|e| e.rel_err).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{stat}: {errs:?}");
            assert!(errs.iter().all(|&e| e < ceiling), "{stat}: {errs:?}");
        }
    }
}
