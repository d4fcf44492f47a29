use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Commutative ring interface for measure coefficients.
///
/// Elements carry their own context (conductor, prime, precision), so the
/// constants are produced "like" an existing element.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, `None` when it does not exist in the ring.
    fn inv(&self) -> Option<Self>;
    fn from_rational(&self, q: &BigRational) -> Option<Self>;
    /// zeta_order^exp, when the ring contains it.
    fn root_of_unity(&self, order: u64, exp: i64) -> Option<Self>;
    /// Whether the element is a unit of the local ring at p.
    /// Errors when the ring is not (a subring of) a local ring at p.
    fn local_unit(&self, p: u64) -> Result<bool, String>;
    fn ring_tag(&self) -> String;
    fn to_text(&self) -> String;

    fn from_int(&self, n: i64) -> Self {
        self.from_rational(&BigRational::from_integer(BigInt::from(n)))
            .expect("every ring contains the integers")
    }

    fn pow(&self, e: u64) -> Self {
        let mut r = self.one_like();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    fn pow_i(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|x| x.pow(e.unsigned_abs()))
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Unit test for a rational in Z_(p).
pub(crate) fn rational_local_unit(q: &BigRational, p: u64) -> Result<bool, String> {
    use num_traits::{Signed, Zero};
    let p = BigInt::from(p);
    if q.is_zero() {
        return Ok(false);
    }
    if (q.denom() % &p).is_zero() {
        return Err(format!("{q} is not in Z_(p)"));
    }
    Ok(!(q.numer().abs() % &p).is_zero())
}
