use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Jet, QPoly, SeriesError};

/// Coefficient ring of an [`XSeries`].
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse, when `self` is a unit.
    fn unit_inverse(&self) -> Option<Self>;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
}

impl Coeff for QPoly {
    fn unit_inverse(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => Some(QPoly::constant(self.coeff(0).recip())),
            _ => None,
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for Jet {
    fn unit_inverse(&self) -> Option<Self> {
        // (v + s e)^-1 = v - s e when v = +-1
        let v = &self.value;
        if v.is_one() || (-v).is_one() {
            Some(Jet {
                value: v.clone(),
                slope: -&self.slope,
            })
        } else {
            None
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for BigRational {
    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

/// Power series in `x` truncated after degree `trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct XSeries<C: Coeff = QPoly> {
    trunc: usize,
    coeffs: Vec<C>,
}

impl<C: Coeff> XSeries<C> {
    pub fn zero(trunc: usize) -> Self {
        XSeries {
            trunc,
            coeffs: vec![C::zero(); trunc + 1],
        }
    }

    pub fn one(trunc: usize) -> Self {
        Self::monomial(trunc, 0, C::one())
    }

    /// `c x^degree`, or zero when `degree > trunc`.
    pub fn monomial(trunc: usize, degree: usize, c: C) -> Self {
        let mut s = Self::zero(trunc);
        if degree <= trunc {
            s.coeffs[degree] = c;
        }
        s
    }

    /// The polynomial `sum_i poly[i] x^i`, truncated.
    pub fn from_poly(trunc: usize, poly: &[C]) -> Self {
        let mut s = Self::zero(trunc);
        for (slot, c) in s.coeffs.iter_mut().zip(poly) {
            *slot = c.clone();
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&C, SeriesError> {
        self.coeffs.get(n).ok_or(SeriesError::BeyondTruncation {
            degree: n,
            trunc: self.trunc,
        })
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> XSeries<D> {
        XSeries {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..=trunc)
            .map(|i| self.coeffs[i].clone() + other.coeffs[i].clone())
            .collect();
        XSeries { trunc, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..=trunc)
            .map(|i| self.coeffs[i].clone() - other.coeffs[i].clone())
            .collect();
        XSeries { trunc, coeffs }
    }

    /// Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(trunc);
        for (i, a) in self.coeffs.iter().enumerate().take(trunc + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(trunc + 1 - i) {
                let t = a.mul_ref(b);
                out.coeffs[i + j] = std::mem::replace(&mut out.coeffs[i + j], C::zero()) + t;
            }
        }
        out
    }

    /// Product with a short polynomial in `x`.
    pub fn mul_poly(&self, poly: &[C]) -> Self {
        let coeffs = (0..=self.trunc)
            .map(|n| {
                let mut acc = C::zero();
                for (i, p) in poly.iter().enumerate().take(n + 1) {
                    if !p.is_zero() {
                        acc = acc + p.mul_ref(&self.coeffs[n - i]);
                    }
                }
                acc
            })
            .collect();
        XSeries {
            trunc: self.trunc,
            coeffs,
        }
    }

    /// Quotient by a short polynomial in `x` whose constant term is a unit,
    /// via the recurrence `c_n = (a_n - sum_{i>=1} d_i c_{n-i}) / d_0`.
    pub fn div_poly(&self, poly: &[C]) -> Result<Self, SeriesError> {
        let lead = poly
            .first()
            .and_then(C::unit_inverse)
            .ok_or(SeriesError::NonUnitConstant)?;
        let mut out: Vec<C> = Vec::with_capacity(self.trunc + 1);
        for n in 0..=self.trunc {
            let mut acc = self.coeffs[n].clone();
            for (i, d) in poly.iter().enumerate().skip(1).take(n) {
                if !d.is_zero() {
                    acc = acc - d.mul_ref(&out[n - i]);
                }
            }
            out.push(lead.mul_ref(&acc));
        }
        Ok(XSeries {
            trunc: self.trunc,
            coeffs: out,
        })
    }

    /// `1 / self` for a series with unit constant term.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        Self::one(self.trunc).div_poly(&self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn geometric_series() {
        let one_minus_x = XSeries::from_poly(6, &[q(1, 1), q(-1, 1)]);
        let inv = one_minus_x.reciprocal().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == q(1, 1)));
        assert_eq!(inv.trunc(), 6);
    }

    #[test]
    fn non_unit_constant_is_rejected() {
        let s = XSeries::from_poly(4, &[QPoly::q(), QPoly::one()]);
        assert_eq!(s.reciprocal(), Err(SeriesError::NonUnitConstant));
        let j = XSeries::from_poly(4, &[Jet::new(2, 0)]);
        assert_eq!(j.reciprocal(), Err(SeriesError::NonUnitConstant));
    }

    #[test]
    fn coefficient_past_truncation() {
        let s: XSeries<QPoly> = XSeries::one(3);
        assert!(s.coeff(3).is_ok());
        assert_eq!(
            s.coeff(4),
            Err(SeriesError::BeyondTruncation {
                degree: 4,
                trunc: 3
            })
        );
    }

    #[test]
    fn product_truncates_consistently() {
        let a = XSeries::from_poly(5, &[q(1, 1), q(2, 1), q(3, 1)]);
        let b = XSeries::from_poly(3, &[q(1, 1), q(0, 1), q(0, 1), q(5, 1)]);
        let c = a.mul(&b);
        assert_eq!(c.trunc(), 3);
        assert_eq!(c.coeffs(), &[q(1, 1), q(2, 1), q(3, 1), q(5, 1)]);
    }

    fn arb_unit_series() -> impl Strategy<Value = XSeries<BigRational>> {
        (
            prop::sample::select(vec![1i64, -1, 2, -3]),
            prop::collection::vec((-5i64..6, 1i64..4), 0..8),
        )
            .prop_map(|(c0, tail)| {
                let mut cs = vec![q(c0, 1)];
                cs.extend(tail.into_iter().map(|(n, d)| q(n, d)));
                XSeries::from_poly(8, &cs)
            })
    }

    proptest! {
        #[test]
        fn reciprocal_inverts(s in arb_unit_series()) {
            let prod = s.mul(&s.reciprocal().unwrap());
            prop_assert_eq!(prod, XSeries::one(8));
        }

        #[test]
        fn div_poly_undoes_mul_poly(s in arb_unit_series(), d1 in -4i64..5, d2 in -4i64..5) {
            let poly = [q(1, 1), q(d1, 1), q(d2, 2)];
            prop_assert_eq!(s.mul_poly(&poly).div_poly(&poly).unwrap(), s);
        }
    }
}
