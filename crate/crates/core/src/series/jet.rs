use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::QPoly;

/// First-order expansion `value + slope * (q - 1)` of an integer polynomial
/// in `q` around `q = 1`.
///
/// Multiplying jets multiplies the underlying polynomials and keeps only the
/// value and first derivative at 1, which is all a total over records needs.
/// Much cheaper than carrying whole [`QPoly`] coefficients at large `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Jet {
    pub value: BigInt,
    pub slope: BigInt,
}

impl Jet {
    pub fn new(value: impl Into<BigInt>, slope: impl Into<BigInt>) -> Self {
        Jet {
            value: value.into(),
            slope: slope.into(),
        }
    }

    /// Value and derivative of `p` at `q = 1`, when both are integers.
    pub fn from_qpoly(p: &QPoly) -> Option<Jet> {
        let one = num_rational::BigRational::one();
        let value = p.eval(&one);
        let slope = p.derivative().eval(&one);
        if value.is_integer() && slope.is_integer() {
            Some(Jet {
                value: value.to_integer(),
                slope: slope.to_integer(),
            })
        } else {
            None
        }
    }
}

impl Add for Jet {
    type Output = Jet;

    fn add(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            slope: self.slope + rhs.slope,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;

    fn sub(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            slope: self.slope - rhs.slope,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        Jet {
            value: -self.value,
            slope: -self.slope,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;

    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;

    fn mul(self, rhs: &Jet) -> Jet {
        Jet {
            slope: &self.value * &rhs.slope + &self.slope * &rhs.value,
            value: &self.value * &rhs.value,
        }
    }
}

impl Zero for Jet {
    fn zero() -> Self {
        Jet::default()
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.slope.is_zero()
    }
}

impl One for Jet {
    fn one() -> Self {
        Jet::new(1, 0)
    }
}
