use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Polynomial in the marker `q` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPoly {
    coeffs: BTreeMap<u32, BigRational>,
}

impl QPoly {
    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn monomial(degree: u32, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        QPoly { coeffs }
    }

    /// `q^degree`.
    pub fn q_pow(degree: u32) -> Self {
        Self::monomial(degree, BigRational::one())
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn coeff(&self, degree: u32) -> BigRational {
        self.coeffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn eval(&self, q: &BigRational) -> BigRational {
        // Horner over the dense range of degrees
        let Some(top) = self.degree() else {
            return BigRational::zero();
        };
        let mut acc = BigRational::zero();
        for d in (0..=top).rev() {
            acc = acc * q + self.coeff(d);
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&d, _)| d > 0)
            .map(|(&d, c)| (d - 1, c * BigInt::from(d)))
            .collect();
        QPoly { coeffs }
    }

    fn add_term(&mut self, degree: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(degree).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{d}")?,
            }
        }
        Ok(())
    }
}

impl Add for QPoly {
    type Output = QPoly;

    fn add(mut self, rhs: QPoly) -> QPoly {
        for (d, c) in rhs.coeffs {
            self.add_term(d, c);
        }
        self
    }
}

impl Neg for QPoly {
    type Output = QPoly;

    fn neg(self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.into_iter().map(|(d, c)| (d, -c)).collect(),
        }
    }
}

impl Sub for QPoly {
    type Output = QPoly;

    fn sub(self, rhs: QPoly) -> QPoly {
        self + (-rhs)
    }
}

impl Mul for QPoly {
    type Output = QPoly;

    fn mul(self, rhs: QPoly) -> QPoly {
        &self * &rhs
    }
}

impl Mul<&QPoly> for &QPoly {
    type Output = QPoly;

    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::default();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                out.add_term(da + db, ca * cb);
            }
        }
        out
    }
}

impl Zero for QPoly {
    fn zero() -> Self {
        QPoly::default()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for QPoly {
    fn one() -> Self {
        QPoly::from_int(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(cs: &[(u32, i64, i64)]) -> QPoly {
        cs.iter().fold(QPoly::zero(), |acc, &(d, n, den)| {
            acc + QPoly::monomial(d, r(n, den))
        })
    }

    #[test]
    fn no_zero_coefficients_survive() {
        let p = QPoly::q() - QPoly::q();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        let p = QPoly::monomial(3, r(0, 1));
        assert!(p.is_zero());
    }

    #[test]
    fn eval_and_derivative() {
        // 1/2 + 3q - q^3
        let p = poly(&[(0, 1, 2), (1, 3, 1), (3, -1, 1)]);
        assert_eq!(p.eval(&r(2, 1)), r(1, 2) + r(6, 1) - r(8, 1));
        assert_eq!(p.derivative(), poly(&[(0, 3, 1), (2, -3, 1)]));
        assert_eq!(p.to_string(), "1/2 + 3*q + -1*q^3");
    }

    fn arb_poly() -> impl Strategy<Value = QPoly> {
        prop::collection::vec((0u32..5, -6i64..7, 1i64..4), 0..5).prop_map(|ts| {
            ts.into_iter().fold(QPoly::zero(), |acc, (d, n, den)| {
                acc + QPoly::monomial(d, r(n, den))
            })
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(b.clone() + c.clone()), &a * &b + &a * &c);
            prop_assert_eq!(a.clone() - a.clone(), QPoly::zero());
            prop_assert_eq!(&a * &QPoly::one(), a.clone());
        }

        #[test]
        fn eval_is_a_homomorphism(a in arb_poly(), b in arb_poly(), n in -4i64..5) {
            let q = r(n, 3);
            prop_assert_eq!((&a * &b).eval(&q), a.eval(&q) * b.eval(&q));
            prop_assert_eq!((a.clone() + b.clone()).eval(&q), a.eval(&q) + b.eval(&q));
        }
    }
}
