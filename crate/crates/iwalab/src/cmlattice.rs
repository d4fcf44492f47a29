//! CM-stable lattices Z + Z tau in the nine class-number-one fields, the
//! decomposition tau = s sqrt(-d_K), and principal generators of the
//! corresponding fractional ideals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{padic_sqrt, rat, ArithError, PadicExt, PadicNumber, QuadFieldElem, DISCRIMINANTS};
use crate::nt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("tau = {0} is rational, the lattice is degenerate")]
    Degenerate(String),
    #[error("scale must be nonzero")]
    ZeroScale,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} divides 2 d_K = {}", 2 * d)]
    Ramified { p: u64, d: u64 },
    #[error("p = {p} is not split in Q(sqrt(-{d}))")]
    NotSplit { p: u64, d: u64 },
    #[error("tau = {0} is not of the form s sqrt(-d_K)")]
    NotPureImaginary(String),
    #[error("lattice is not stable under O_K ({0} mode)")]
    NotStable(Mode),
    #[error("no generator with |norm| <= {bound}")]
    SearchExhausted { bound: String },
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Which ring plays the role of O_K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// The maximal order: basis (1, sqrt(-m)) for d_K in {4, 8}, (1, (1 + sqrt(-d_K))/2) otherwise.
    Maximal,
    /// The order Z + Z sqrt(-d_K), taken as written.
    PaperLiteral,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Maximal => "maximal",
            Mode::PaperLiteral => "paper-literal",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "maximal" => Ok(Mode::Maximal),
            "paper-literal" => Ok(Mode::PaperLiteral),
            _ => Err(format!("unknown lattice mode {s:?}")),
        }
    }
}

/// The second basis vector omega of the order selected by `mode`.
pub fn omega(d: u64, mode: Mode) -> Result<QuadFieldElem> {
    let w = match (mode, d % 4) {
        (Mode::PaperLiteral, _) => QuadFieldElem::sqrt_minus_d(d)?,
        // sqrt(-4)/2 = i, sqrt(-8)/2 = sqrt(-2)
        (Mode::Maximal, 0) => QuadFieldElem::new(d, rat(0, 1), rat(1, 2))?,
        (Mode::Maximal, _) => QuadFieldElem::new(d, rat(1, 2), rat(1, 2))?,
    };
    Ok(w)
}

/// The lattice scale * (Z + Z tau).
#[derive(Debug, Clone, PartialEq)]
pub struct CmLattice {
    pub d: u64,
    pub tau: QuadFieldElem,
    pub scale: BigRational,
    pub mode: Mode,
}

impl CmLattice {
    pub fn new(tau: QuadFieldElem, mode: Mode) -> Result<Self> {
        Self::scaled(tau, BigRational::one(), mode)
    }

    pub fn scaled(tau: QuadFieldElem, scale: BigRational, mode: Mode) -> Result<Self> {
        if tau.b.is_zero() {
            return Err(LatticeError::Degenerate(tau.to_string()));
        }
        if scale.is_zero() {
            return Err(LatticeError::ZeroScale);
        }
        Ok(CmLattice { d: tau.d, tau, scale, mode })
    }

    /// tau = s sqrt(-d_K).
    pub fn from_s(d: u64, s: BigRational, mode: Mode) -> Result<Self> {
        Self::new(QuadFieldElem::new(d, BigRational::zero(), s)?, mode)
    }

    pub fn basis(&self) -> [QuadFieldElem; 2] {
        let one = QuadFieldElem::rational(self.d, BigRational::one()).expect("d was validated");
        [one.scale(&self.scale), self.tau.scale(&self.scale)]
    }

    /// Rational coordinates of z in the lattice basis.
    pub fn coords(&self, z: &QuadFieldElem) -> (BigRational, BigRational) {
        // z = x*scale + y*scale*tau
        let y = &z.b / (&self.scale * &self.tau.b);
        let x = (&z.a - &y * &self.scale * &self.tau.a) / &self.scale;
        (x, y)
    }

    pub fn contains(&self, z: &QuadFieldElem) -> bool {
        let (x, y) = self.coords(z);
        x.is_integer() && y.is_integer()
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        CmLattice { mode, ..self.clone() }
    }

    pub fn descriptor(&self) -> String {
        if self.scale.is_one() {
            format!("Z + Z*({})", self.tau)
        } else {
            format!("{}*(Z + Z*({}))", self.scale, self.tau)
        }
    }
}

/// True iff omega * b lies in the lattice for both basis vectors b.
pub fn cm_stable(lat: &CmLattice) -> bool {
    let w = omega(lat.d, lat.mode).expect("d was validated");
    lat.basis().iter().all(|b| lat.contains(&w.mul(b)))
}

fn check_prime(p: u64, d: u64) -> Result<()> {
    if !nt::is_prime(p) {
        return Err(LatticeError::NotPrime(p));
    }
    if (2 * d).is_multiple_of(p) {
        return Err(LatticeError::Ramified { p, d });
    }
    Ok(())
}

fn pval(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    if n.is_zero() {
        return u32::MAX;
    }
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

fn pval_rat(q: &BigRational, p: u64) -> i64 {
    if q.is_zero() {
        return i64::MAX;
    }
    pval(q.numer(), p) as i64 - pval(q.denom(), p) as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SReport {
    pub lattice: String,
    pub mode: Mode,
    pub p: u64,
    pub s: BigRational,
    pub s_prime: BigRational,
    pub cm_stable: bool,
    pub integral: bool,
    pub divides: bool,
    pub p_unit: bool,
    pub witness: Vec<String>,
}

impl SReport {
    pub fn pass(&self) -> bool {
        self.witness.is_empty()
    }
}

/// Writes tau = s sqrt(-d_K) and checks d_K s in Z, s' = d_K s divides d_K, s a p-unit.
/// Stability is re-checked and reported alongside.
pub fn solve_s(lat: &CmLattice, p: u64) -> Result<SReport> {
    check_prime(p, lat.d)?;
    if !lat.tau.a.is_zero() {
        return Err(LatticeError::NotPureImaginary(lat.tau.to_string()));
    }
    let s = lat.tau.b.clone();
    let dk = BigRational::from_integer(lat.d.into());
    let s_prime = &dk * &s;
    let stable = cm_stable(lat);
    let integral = s_prime.is_integer();
    let divides = integral && (BigInt::from(lat.d) % s_prime.to_integer()).is_zero();
    let p_unit = pval_rat(&s, p) == 0;
    let mut witness = Vec::new();
    if !stable {
        let w = omega(lat.d, lat.mode)?;
        for b in lat.basis() {
            let z = w.mul(&b);
            if !lat.contains(&z) {
                let (x, y) = lat.coords(&z);
                witness.push(format!("omega*({b}) = {x} + {y}*tau is not in the lattice"));
            }
        }
    }
    if !integral {
        witness.push(format!("d_K*s = {s_prime} is not an integer"));
    } else if !divides {
        witness.push(format!("s' = {s_prime} does not divide d_K = {}", lat.d));
    }
    if !p_unit {
        witness.push(format!("s = {s} has {p}-adic valuation {}", pval_rat(&s, p)));
    }
    Ok(SReport {
        lattice: lat.descriptor(),
        mode: lat.mode,
        p,
        s,
        s_prime,
        cm_stable: stable,
        integral,
        divides,
        p_unit,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub lattice: String,
    pub mode: Mode,
    pub p: u64,
    pub alpha: QuadFieldElem,
    pub norm: BigRational,
    pub bound: BigRational,
    /// v_P(alpha) for the prime P with sqrt(-d_K) = delta, delta the root with residue in 1..=(p-1)/2.
    pub valuation: i64,
    pub p_unit: bool,
}

/// Index data: |det| of the lattice basis against the order basis (1, omega).
pub fn relative_norm(lat: &CmLattice) -> Result<BigRational> {
    let w = omega(lat.d, lat.mode)?;
    // b = u + v*omega, so v = b.b / w.b and u = b.a - v*w.a
    let uv = |b: &QuadFieldElem| {
        let v = &b.b / &w.b;
        let u = &b.a - &v * &w.a;
        (u, v)
    };
    let [b1, b2] = lat.basis();
    let (u1, v1) = uv(&b1);
    let (u2, v2) = uv(&b2);
    Ok((u1 * v2 - u2 * v1).abs())
}

fn generates(lat: &CmLattice, w: &QuadFieldElem, a: &QuadFieldElem) -> bool {
    let (x1, y1) = lat.coords(a);
    let (x2, y2) = lat.coords(&w.mul(a));
    if !(x1.is_integer() && y1.is_integer() && x2.is_integer() && y2.is_integer()) {
        return false;
    }
    (x1 * y2 - x2 * y1).abs().is_one()
}

/// v_P(alpha) under the embedding sqrt(-d_K) -> delta in Z_p.
pub fn p_valuation(alpha: &QuadFieldElem, p: u64, precision: u32) -> Result<i64> {
    check_prime(p, alpha.d)?;
    if nt::legendre(-(alpha.d as i64), p) != 1 {
        return Err(LatticeError::NotSplit { p, d: alpha.d });
    }
    if alpha.is_zero() {
        return Ok(i64::MAX);
    }
    let k = -pval_rat(&alpha.a, p).min(pval_rat(&alpha.b, p)).min(0);
    let pk = BigRational::from_integer(BigInt::from(p).pow(k as u32));
    let ext = PadicExt::base(p, precision)?;
    let delta = padic_sqrt(&PadicNumber::from_int(&ext, -(alpha.d as i64)))?;
    let a = PadicNumber::from_rational(&ext, &(&alpha.a * &pk))?;
    let b = PadicNumber::from_rational(&ext, &(&alpha.b * &pk))?;
    let img = a.try_add(&b.try_mul(&delta)?)?;
    Ok(match img.valuation() {
        Some(v) => v as i64 - k,
        None => precision as i64 - k,
    })
}

fn isqrt_ceil(q: &BigRational) -> i64 {
    let f = q.to_f64().unwrap_or(f64::MAX).max(0.0);
    f.sqrt().ceil() as i64 + 1
}

/// Finds alpha with O alpha equal to the lattice, searching |norm(alpha)| <= d_K * max(1, N)^2
/// where N is the index data, and checks alpha is a P-unit.
pub fn solve_alpha(lat: &CmLattice, p: u64) -> Result<AlphaReport> {
    check_prime(p, lat.d)?;
    if nt::legendre(-(lat.d as i64), p) != 1 {
        return Err(LatticeError::NotSplit { p, d: lat.d });
    }
    if !cm_stable(lat) {
        return Err(LatticeError::NotStable(lat.mode));
    }
    let w = omega(lat.d, lat.mode)?;
    let n = relative_norm(lat)?;
    let m = if n > BigRational::one() { n.clone() } else { BigRational::one() };
    let bound = BigRational::from_integer(lat.d.into()) * &m * &m;
    // a generator has |norm| = N exactly, so only that shell of the bounded region is enumerated;
    // N(x + y tau) >= d tau_b^2 y^2 and |x + y tau_a| <= sqrt(N) after dividing out the scale
    let s2 = &lat.scale * &lat.scale;
    let reduced = n.clone().min(bound.clone()) / &s2;
    let ymax = isqrt_ceil(&(&reduced / (BigRational::from_integer(lat.d.into()) * &lat.tau.b * &lat.tau.b)));
    let xr = isqrt_ceil(&reduced);
    let mut best: Option<(QuadFieldElem, (i64, i64, bool, bool))> = None;
    for y in -ymax..=ymax {
        let c = (BigRational::from_integer(y.into()) * &lat.tau.a).round().to_i64().unwrap_or(0);
        for x in (-c - xr)..=(-c + xr) {
            let a = QuadFieldElem::rational(lat.d, rat(x, 1))?
                .add(&lat.tau.scale(&rat(y, 1)))
                .scale(&lat.scale);
            if a.is_zero() || a.norm() > bound || a.norm() != n {
                continue;
            }
            if !generates(lat, &w, &a) {
                continue;
            }
            let key = (y.abs(), x.abs(), y < 0, x < 0);
            if best.as_ref().is_none_or(|(_, k)| key < *k) {
                best = Some((a, key));
            }
        }
    }
    let (alpha, _) = best.ok_or_else(|| LatticeError::SearchExhausted { bound: bound.to_string() })?;
    let valuation = p_valuation(&alpha, p, precision_for(p))?;
    Ok(AlphaReport {
        lattice: lat.descriptor(),
        mode: lat.mode,
        p,
        norm: alpha.norm(),
        alpha,
        bound,
        valuation,
        p_unit: valuation == 0,
    })
}

fn precision_for(p: u64) -> u32 {
    let mut n = 1;
    while n < 8 && (p as u128).pow(n + 1) < (1u128 << 62) {
        n += 1;
    }
    n
}

/// Smallest split prime p >= 5 not dividing d_K.
pub fn smallest_split_prime(d: u64) -> u64 {
    (5..)
        .find(|&p| nt::is_prime(p) && !d.is_multiple_of(p) && nt::legendre(-(d as i64), p) == 1)
        .expect("infinitely many split primes")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub s_prime: u64,
    pub tau: QuadFieldElem,
    pub cm_stable: bool,
    pub s: Option<SReport>,
    pub alpha: Option<std::result::Result<AlphaReport, LatticeError>>,
}

impl ScanEntry {
    pub fn pass(&self) -> bool {
        !self.cm_stable
            || (self.s.as_ref().is_some_and(SReport::pass)
                && matches!(&self.alpha, Some(Ok(a)) if a.p_unit))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub d: u64,
    pub p: u64,
    pub mode: Mode,
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    pub fn stable_count(&self) -> usize {
        self.entries.iter().filter(|e| e.cm_stable).count()
    }

    /// No purely imaginary tau of the searched shape gives a stable lattice.
    pub fn empty(&self) -> bool {
        self.stable_count() == 0
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(ScanEntry::pass)
    }
}

/// Runs every tau = (s'/d_K) sqrt(-d_K), s' | d_K, through the stability test and the two solvers.
pub fn scan(d: u64, p: Option<u64>, mode: Mode) -> Result<ScanReport> {
    if !DISCRIMINANTS.contains(&d) {
        return Err(ArithError::BadDiscriminant(d).into());
    }
    let p = p.unwrap_or_else(|| smallest_split_prime(d));
    check_prime(p, d)?;
    let mut entries = Vec::new();
    for sp in nt::divisors(d) {
        let lat = CmLattice::from_s(d, rat(sp as i64, d as i64), mode)?;
        let stable = cm_stable(&lat);
        let (s, alpha) = if stable {
            (Some(solve_s(&lat, p)?), Some(solve_alpha(&lat, p)))
        } else {
            (None, None)
        };
        entries.push(ScanEntry { s_prime: sp, tau: lat.tau, cm_stable: stable, s, alpha });
    }
    Ok(ScanReport { d, p, mode, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(d: u64, a: (i64, i64), b: (i64, i64), mode: Mode) -> CmLattice {
        CmLattice::new(QuadFieldElem::new(d, rat(a.0, a.1), rat(b.0, b.1)).unwrap(), mode).unwrap()
    }

    #[test]
    fn stability_examples() {
        // tau = i, 2i, sqrt(-2)
        assert!(cm_stable(&lat(4, (0, 1), (1, 2), Mode::Maximal)));
        assert!(!cm_stable(&lat(4, (0, 1), (1, 1), Mode::Maximal)));
        assert!(cm_stable(&lat(8, (0, 1), (1, 2), Mode::Maximal)));
        // the maximal order in d = 3 itself
        assert!(cm_stable(&lat(3, (1, 2), (1, 2), Mode::Maximal)));
        assert!(CmLattice::new(QuadFieldElem::rational(4, rat(3, 1)).unwrap(), Mode::Maximal).is_err());
    }

    #[test]
    fn s_examples() {
        let r = solve_s(&lat(4, (0, 1), (1, 2), Mode::Maximal), 5).unwrap();
        assert!(r.pass());
        assert_eq!((r.s.clone(), r.s_prime.clone()), (rat(1, 2), rat(2, 1)));
        let r = solve_s(&lat(8, (0, 1), (1, 2), Mode::Maximal), 17).unwrap();
        assert!(r.pass());
        assert_eq!(r.s_prime, rat(4, 1));
        let r = solve_s(&lat(4, (0, 1), (5, 2), Mode::Maximal), 13).unwrap();
        assert!(!r.pass());
        assert!(!r.cm_stable && !r.divides);
        assert_eq!(r.s_prime, rat(10, 1));
        assert!(matches!(solve_s(&lat(3, (0, 1), (1, 3), Mode::Maximal), 3), Err(LatticeError::Ramified { .. })));
    }

    #[test]
    fn alpha_examples() {
        let r = solve_alpha(&lat(4, (0, 1), (1, 2), Mode::Maximal), 5).unwrap();
        assert_eq!(r.alpha, QuadFieldElem::rational(4, rat(1, 1)).unwrap());
        assert!(r.p_unit);
        let l = lat(8, (0, 1), (1, 2), Mode::Maximal);
        assert_eq!(solve_alpha(&l, 17).unwrap().alpha, QuadFieldElem::rational(8, rat(1, 1)).unwrap());
        let scaled = CmLattice::scaled(l.tau.clone(), rat(3, 1), Mode::Maximal).unwrap();
        let r = solve_alpha(&scaled, 17).unwrap();
        assert_eq!(r.alpha, QuadFieldElem::rational(8, rat(3, 1)).unwrap());
        assert!(r.p_unit);
        // 17 = (3 + sqrt(-8))(3 - sqrt(-8)) has valuation 1 at both primes above 17
        let r = solve_alpha(&CmLattice::scaled(l.tau, rat(17, 1), Mode::Maximal).unwrap(), 17).unwrap();
        assert!(!r.p_unit);
        assert_eq!(r.valuation, 1);
    }

    #[test]
    fn valuation_of_split_factor() {
        // 5 = (1+2i)(1-2i); exactly one factor is divisible by the chosen prime
        let a = QuadFieldElem::new(4, rat(1, 1), rat(1, 1)).unwrap();
        let v1 = p_valuation(&a, 5, 6).unwrap();
        let v2 = p_valuation(&a.conj(), 5, 6).unwrap();
        assert_eq!(v1 + v2, 1);
    }
}
