use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ArithError;

/// The nine discriminant parameters of imaginary quadratic fields of class number one.
pub const DISCRIMINANTS: [u64; 9] = [3, 4, 7, 8, 11, 19, 43, 67, 163];

/// a + b sqrt(-d_K) in K = Q(sqrt(-d_K)).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadFieldElem {
    pub d: u64,
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadFieldElem {
    pub fn new(d: u64, a: BigRational, b: BigRational) -> Result<Self, ArithError> {
        if !DISCRIMINANTS.contains(&d) {
            return Err(ArithError::BadDiscriminant(d));
        }
        Ok(QuadFieldElem { d, a, b })
    }

    pub fn rational(d: u64, a: BigRational) -> Result<Self, ArithError> {
        Self::new(d, a, BigRational::zero())
    }

    /// sqrt(-d_K).
    pub fn sqrt_minus_d(d: u64) -> Result<Self, ArithError> {
        Self::new(d, BigRational::zero(), BigRational::one())
    }

    pub fn zero(d: u64) -> Self {
        QuadFieldElem { d, a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn same(&self, o: &Self) {
        assert_eq!(self.d, o.d, "elements of different quadratic fields");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same(o);
        QuadFieldElem { d: self.d, a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same(o);
        QuadFieldElem { d: self.d, a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same(o);
        let d = BigRational::from_integer(self.d.into());
        QuadFieldElem {
            d: self.d,
            a: &self.a * &o.a - d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        QuadFieldElem { d: self.d, a: &self.a * q, b: &self.b * q }
    }

    pub fn conj(&self) -> Self {
        QuadFieldElem { d: self.d, a: self.a.clone(), b: -&self.b }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a + BigRational::from_integer(self.d.into()) * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let n = self.norm();
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self.mul(&o.inv()?))
    }
}

impl fmt::Debug for QuadFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt(-{})", self.a, self.b, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn i_squared() {
        // d = 4: sqrt(-4) = 2i, so (sqrt(-4)/2)^2 = -1
        let i = QuadFieldElem::new(4, rat(0, 1), rat(1, 2)).unwrap();
        assert_eq!(i.mul(&i), QuadFieldElem::rational(4, rat(-1, 1)).unwrap());
        assert!(QuadFieldElem::new(5, rat(1, 1), rat(0, 1)).is_err());
    }

    #[test]
    fn inverse() {
        let x = QuadFieldElem::new(7, rat(3, 2), rat(-1, 5)).unwrap();
        let one = QuadFieldElem::rational(7, rat(1, 1)).unwrap();
        assert_eq!(x.mul(&x.inv().unwrap()), one);
    }
}
