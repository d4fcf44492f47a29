use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ArithError, Ring};
use crate::nt;

/// Largest conductor a [`CycloNumber`] may be lifted to.
pub const MAX_CONDUCTOR: u64 = 5000;

/// Reduction data for one conductor: Phi_m and x^j mod Phi_m for j < m (sparse).
struct Table {
    phi: usize,
    poly: Vec<i64>,
    rows: Vec<Vec<(u32, i64)>>,
}

fn tables() -> &'static Mutex<HashMap<u64, Arc<Table>>> {
    static T: OnceLock<Mutex<HashMap<u64, Arc<Table>>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cyclotomic_poly(m: u64) -> Vec<i64> {
    // x^m - 1 divided by Phi_d for each proper divisor d.
    let mut num: Vec<i128> = vec![0; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in nt::divisors(m) {
        if d == m {
            continue;
        }
        let den: Vec<i128> = table(d).poly.iter().map(|&c| c as i128).collect();
        num = div_exact_monic(&num, &den);
    }
    num.into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient fits in i64"))
        .collect()
}

fn div_exact_monic(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let dq = r.len() - 1 - db;
    let mut q = vec![0i128; dq + 1];
    for i in (0..=dq).rev() {
        let c = r[i + db];
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] -= c * bj;
            }
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn table(m: u64) -> Arc<Table> {
    if let Some(t) = tables().lock().unwrap().get(&m) {
        return t.clone();
    }
    let t = Arc::new(build_table(m));
    tables().lock().unwrap().insert(m, t.clone());
    t
}

fn build_table(m: u64) -> Table {
    let poly = if m == 1 { vec![-1, 1] } else { cyclotomic_poly(m) };
    let phi = poly.len() - 1;
    let mut rows = Vec::with_capacity(m as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    if phi == 1 && m == 1 {
        // x = 1
    }
    for _ in 0..m {
        rows.push(
            cur.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i as u32, c))
                .collect(),
        );
        // multiply by x and reduce with the monic poly
        let top = cur[phi - 1];
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..phi {
                cur[i] = cur[i]
                    .checked_sub(top.checked_mul(poly[i]).expect("table overflow"))
                    .expect("table overflow");
            }
        }
    }
    Table { phi, poly, rows }
}

/// Element of Q(zeta_m) in the power basis modulo the m-th cyclotomic polynomial.
///
/// Stored as integer numerators over one positive common denominator, fully
/// reduced, so equal values at equal conductor are structurally equal.
#[derive(Clone)]
pub struct CycloNumber {
    m: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber { m: 1, num: vec![BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        CycloNumber { m: 1, num: vec![BigInt::from(n)], den: BigInt::one() }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        CycloNumber { m: 1, num: vec![q.numer().clone()], den: q.denom().clone() }.normalized()
    }

    /// zeta_m^exp.
    pub fn root(m: u64, exp: i64) -> Self {
        assert!((1..=MAX_CONDUCTOR).contains(&m), "conductor {m} out of range");
        let mut acc = CycloAccumulator::new(m);
        acc.add_root_int(1, exp);
        acc.finish()
    }

    pub fn zeta(m: u64) -> Self {
        Self::root(m, 1)
    }

    /// Builds from coefficients of 1, z, z^2, ... (any length, reduced mod Phi_m).
    pub fn from_coeffs(m: u64, coeffs: &[BigRational]) -> Result<Self, ArithError> {
        if m == 0 || m > MAX_CONDUCTOR {
            return Err(ArithError::ConductorOverflow(m));
        }
        let den = coeffs.iter().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
        let mut acc = CycloAccumulator::new(m);
        acc.den = den.clone();
        for (i, c) in coeffs.iter().enumerate() {
            let k = (i as u64 % m) as usize;
            acc.acc[k] += c.numer() * (&den / c.denom());
        }
        Ok(acc.finish())
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    /// Power-basis coordinates (length phi(m)).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        let lifted = self.lift(self.m).ok()?;
        // rational iff it equals its constant term
        let c = BigRational::new(lifted.num[0].clone(), lifted.den.clone());
        if lifted.num[1..].iter().all(|x| x.is_zero()) {
            Some(c)
        } else {
            None
        }
    }

    fn normalized(mut self) -> Self {
        if self.den.is_negative() {
            self.den = -self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        let g = self.num.iter().fold(self.den.clone(), |g, c| g.gcd(c));
        if !g.is_one() && !g.is_zero() {
            self.den = &self.den / &g;
            for c in self.num.iter_mut() {
                *c = &*c / &g;
            }
        }
        if self.is_zero() {
            self.den = BigInt::one();
        }
        self
    }

    /// Same number written at a multiple `m2` of the conductor.
    pub fn lift(&self, m2: u64) -> Result<Self, ArithError> {
        if m2 == self.m {
            return Ok(self.clone());
        }
        if m2 > MAX_CONDUCTOR {
            return Err(ArithError::ConductorOverflow(m2));
        }
        if !m2.is_multiple_of(self.m) {
            return Err(ArithError::Invalid(format!("{} does not divide {}", self.m, m2)));
        }
        let mut acc = CycloAccumulator::new(m2);
        acc.add_scaled_root(self, 0);
        Ok(acc.finish_at(m2))
    }

    fn common(&self, o: &Self) -> Result<(Self, Self), ArithError> {
        let l = nt::lcm(self.m, o.m);
        if l > MAX_CONDUCTOR {
            return Err(ArithError::ConductorOverflow(l));
        }
        Ok((self.lift(l)?, o.lift(l)?))
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, ArithError> {
        if self.m == o.m && self.den.is_one() && o.den.is_one() {
            let num = self.num.iter().zip(&o.num).map(|(x, y)| x + y).collect();
            return Ok(CycloNumber { m: self.m, num, den: BigInt::one() });
        }
        let (a, b) = self.common(o)?;
        let den = &a.den * &b.den;
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &b.den + y * &a.den)
            .collect();
        Ok(CycloNumber { m: a.m, num, den }.normalized())
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, ArithError> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, ArithError> {
        let (a, b) = self.common(o)?;
        let m = a.m as usize;
        let mut acc = vec![BigInt::zero(); m];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    acc[(i + j) % m] += x * y;
                }
            }
        }
        Ok(reduce_full(a.m, acc, &a.den * &b.den))
    }

    pub fn neg(&self) -> Self {
        CycloNumber { m: self.m, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycloNumber {
            m: self.m,
            num: self.num.iter().map(|c| c * q.numer()).collect(),
            den: &self.den * q.denom(),
        }
        .normalized()
    }

    /// Multiplies by zeta_order^exp.
    pub fn mul_root(&self, order: u64, exp: i64) -> Result<Self, ArithError> {
        let l = nt::lcm(self.m, order);
        if l > MAX_CONDUCTOR {
            return Err(ArithError::ConductorOverflow(l));
        }
        let mut acc = CycloAccumulator::new(l);
        acc.add_scaled_root(self, exp * (l / order) as i64);
        Ok(acc.finish())
    }

    /// Inverse by the extended Euclidean algorithm against Phi_m over Q.
    pub fn try_inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let t = table(self.m);
        let a: Vec<BigRational> = self.coeffs();
        let f: Vec<BigRational> = t
            .poly
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        // invariant: s*a == r0 (mod f), s1*a == r1 (mod f)
        let (mut r0, mut r1) = (trim(f), trim(a));
        let (mut s0, mut s1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant since Phi_m is irreducible
        let c = r1[0].clone();
        let inv: Vec<BigRational> = s1.iter().map(|x| x / &c).collect();
        CycloNumber::from_coeffs(self.m, &inv)
    }

    /// Image under zeta -> zeta^a (a coprime to the conductor).
    pub fn galois(&self, a: i64) -> Self {
        let mut acc = CycloAccumulator::new(self.m);
        acc.den = self.den.clone();
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                let k = (i as i64 * a).rem_euclid(self.m as i64) as usize;
                acc.acc[k] += c;
            }
        }
        acc.finish()
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Text form `C<m>[c0,c1,...]`, parsed back by [`CycloNumber::parse`].
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
        format!("C{}[{}]", self.m, parts.join(","))
    }

    pub fn parse(s: &str) -> Result<Self, ArithError> {
        let bad = || ArithError::Invalid(format!("cannot parse cyclotomic number `{s}`"));
        let s = s.trim();
        let rest = s.strip_prefix('C').ok_or_else(bad)?;
        let (m, body) = rest.split_once('[').ok_or_else(bad)?;
        let body = body.strip_suffix(']').ok_or_else(bad)?;
        let m: u64 = m.parse().map_err(|_| bad())?;
        let coeffs: Result<Vec<BigRational>, _> =
            body.split(',').map(|c| c.trim().parse::<BigRational>().map_err(|_| bad())).collect();
        CycloNumber::from_coeffs(m, &coeffs?)
    }
}

fn reduce_full(m: u64, acc: Vec<BigInt>, den: BigInt) -> CycloNumber {
    let t = table(m);
    let mut out = vec![BigInt::zero(); t.phi];
    for (j, c) in acc.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if j < t.phi {
            out[j] += c;
        } else {
            for &(i, k) in &t.rows[j] {
                out[i as usize] += &c * k;
            }
        }
    }
    CycloNumber { m, num: out, den }.normalized()
}

/// Accumulates sums of scaled roots of unity in the full basis 1, z, ..., z^(m-1)
/// and reduces once at the end.
pub struct CycloAccumulator {
    m: u64,
    den: BigInt,
    acc: Vec<BigInt>,
}

impl CycloAccumulator {
    pub fn new(m: u64) -> Self {
        assert!((1..=MAX_CONDUCTOR).contains(&m), "conductor {m} out of range");
        CycloAccumulator { m, den: BigInt::one(), acc: vec![BigInt::zero(); m as usize] }
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    /// Adds c * zeta_m^exp.
    pub fn add_root_int(&mut self, c: i64, exp: i64) {
        let k = exp.rem_euclid(self.m as i64) as usize;
        self.acc[k] += &self.den * c;
    }

    /// Adds x * zeta_m^exp; the conductor of x must divide m.
    pub fn add_scaled_root(&mut self, x: &CycloNumber, exp: i64) {
        assert!(self.m.is_multiple_of(x.m), "conductor {} does not divide {}", x.m, self.m);
        if x.is_zero() {
            return;
        }
        if x.den != self.den {
            let l = self.den.lcm(&x.den);
            let f = &l / &self.den;
            if !f.is_one() {
                for c in self.acc.iter_mut() {
                    if !c.is_zero() {
                        *c *= &f;
                    }
                }
            }
            self.den = l;
        }
        let f = &self.den / &x.den;
        let step = (self.m / x.m) as i64;
        for (i, c) in x.num.iter().enumerate() {
            if !c.is_zero() {
                let k = (i as i64 * step + exp).rem_euclid(self.m as i64) as usize;
                if f.is_one() {
                    self.acc[k] += c;
                } else {
                    self.acc[k] += c * &f;
                }
            }
        }
    }

    pub fn finish(self) -> CycloNumber {
        let m = self.m;
        self.finish_at(m)
    }

    fn finish_at(self, m: u64) -> CycloNumber {
        reduce_full(m, self.acc, self.den)
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

impl PartialEq for CycloNumber {
    fn eq(&self, o: &Self) -> bool {
        if self.m == o.m {
            return self.den == o.den && self.num == o.num;
        }
        match self.common(o) {
            Ok((a, b)) => a.den == b.den && a.num == b.num,
            Err(_) => false,
        }
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => c.to_string(),
                1 => format!("{c}*z{}", self.m),
                _ => format!("{c}*z{}^{i}", self.m),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Ring for CycloNumber {
    fn zero_like(&self) -> Self {
        CycloNumber::zero()
    }
    fn one_like(&self) -> Self {
        CycloNumber::one()
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn neg(&self) -> Self {
        CycloNumber::neg(self)
    }
    fn is_zero(&self) -> bool {
        CycloNumber::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
    fn from_rational(&self, q: &BigRational) -> Option<Self> {
        Some(CycloNumber::from_rational(q))
    }
    fn root_of_unity(&self, order: u64, exp: i64) -> Option<Self> {
        (order <= MAX_CONDUCTOR).then(|| CycloNumber::root(order, exp))
    }
    fn local_unit(&self, p: u64) -> Result<bool, String> {
        match self.as_rational() {
            Some(q) => super::ring::rational_local_unit(&q, p),
            None => Err(format!("no prime above {p} fixed for {self}")),
        }
    }
    fn ring_tag(&self) -> String {
        "cyclo".into()
    }
    fn to_text(&self) -> String {
        CycloNumber::to_text(self)
    }
}
