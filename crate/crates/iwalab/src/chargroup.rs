//! Finite abelian groups as products of cyclic groups, their characters,
//! conductors along labeled inertia chains, and Galois orbits of characters.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{CycloNumber, Ring};
use crate::nt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cyclic orders must be at least 2, got {0}")]
    BadOrder(u64),
    #[error("element {0:?} does not belong to the group")]
    BadElement(Vec<u64>),
    #[error("subset labeled `{0}` is not closed under the group law")]
    NotClosed(String),
    #[error("inertia chain at {0} is not descending")]
    NotDescending(Place),
    #[error("missing inertia labels at {0}")]
    MissingInertia(Place),
    #[error("missing label `{0}`")]
    MissingLabel(String),
    #[error("matrix does not define a homomorphism: {0}")]
    NotAHom(String),
    #[error("c-action is not an involution")]
    NotInvolutive,
    #[error("Galois action data inconsistent: {0}")]
    BadAction(String),
    #[error("characters of different groups")]
    Mismatch,
}

/// Places above a split prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    P,
    PBar,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::P => write!(f, "p"),
            Place::PBar => write!(f, "pbar"),
        }
    }
}

pub type Elem = Vec<u64>;

/// Subgroup stored as its sorted element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub gens: Vec<Elem>,
    members: Vec<usize>,
}

impl Subgroup {
    pub fn generated(g: &FinAbGroup, gens: &[Elem]) -> Result<Self, GroupError> {
        for x in gens {
            g.check(x)?;
        }
        let mut seen = vec![false; g.order() as usize];
        let id = g.index(&g.identity());
        seen[id] = true;
        let mut stack = vec![id];
        let gidx: Vec<usize> = gens.iter().map(|x| g.index(x)).collect();
        while let Some(a) = stack.pop() {
            for &s in &gidx {
                let b = g.mul_idx(a, s);
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        let members = (0..seen.len()).filter(|&i| seen[i]).collect();
        Ok(Subgroup { gens: gens.to_vec(), members })
    }

    /// Subgroup from an explicit element list; closure is verified.
    pub fn from_elements(g: &FinAbGroup, name: &str, elems: &[Elem]) -> Result<Self, GroupError> {
        let mut members: Vec<usize> = Vec::new();
        for x in elems {
            g.check(x)?;
            members.push(g.index(x));
        }
        members.sort_unstable();
        members.dedup();
        let closed = members.contains(&g.index(&g.identity()))
            && members
                .iter()
                .all(|&a| members.iter().all(|&b| members.binary_search(&g.mul_idx(a, b)).is_ok()));
        if !closed {
            return Err(GroupError::NotClosed(name.to_string()));
        }
        Ok(Subgroup { gens: elems.to_vec(), members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    fn is_subset_of(&self, o: &Subgroup) -> bool {
        self.members.iter().all(|&i| o.contains(i))
    }
}

/// Product of cyclic groups Z/n_1 x ... x Z/n_r with optional labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAbGroup {
    orders: Vec<u64>,
    labels: BTreeMap<String, Subgroup>,
    inertia: BTreeMap<Place, Vec<Subgroup>>,
}

impl FinAbGroup {
    pub fn new(orders: &[u64]) -> Result<Self, GroupError> {
        if let Some(&n) = orders.iter().find(|&&n| n < 2) {
            return Err(GroupError::BadOrder(n));
        }
        Ok(FinAbGroup { orders: orders.to_vec(), labels: BTreeMap::new(), inertia: BTreeMap::new() })
    }

    pub fn cyclic(n: u64) -> Self {
        if n == 1 {
            Self::trivial()
        } else {
            Self::new(&[n]).unwrap()
        }
    }

    pub fn trivial() -> Self {
        FinAbGroup { orders: Vec::new(), labels: BTreeMap::new(), inertia: BTreeMap::new() }
    }

    /// Direct product, coordinates of `self` first.
    pub fn product(&self, o: &FinAbGroup) -> FinAbGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&o.orders);
        FinAbGroup { orders, labels: BTreeMap::new(), inertia: BTreeMap::new() }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent of the group (lcm of the cyclic orders).
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &b| nt::lcm(a, b))
    }

    pub fn identity(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn check(&self, g: &[u64]) -> Result<(), GroupError> {
        if g.len() != self.rank() || g.iter().zip(&self.orders).any(|(&a, &n)| a >= n) {
            return Err(GroupError::BadElement(g.to_vec()));
        }
        Ok(())
    }

    pub fn reduce(&self, g: &[i64]) -> Elem {
        g.iter()
            .zip(&self.orders)
            .map(|(&a, &n)| a.rem_euclid(n as i64) as u64)
            .collect()
    }

    pub fn index(&self, g: &[u64]) -> usize {
        let mut idx = 0usize;
        for i in (0..self.rank()).rev() {
            idx = idx * self.orders[i] as usize + g[i] as usize;
        }
        idx
    }

    pub fn elem(&self, mut idx: usize) -> Elem {
        let mut g = Vec::with_capacity(self.rank());
        for &n in &self.orders {
            g.push((idx % n as usize) as u64);
            idx /= n as usize;
        }
        g
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order() as usize).map(move |i| self.elem(i))
    }

    pub fn op(&self, a: &[u64], b: &[u64]) -> Elem {
        a.iter().zip(b).zip(&self.orders).map(|((&x, &y), &n)| (x + y) % n).collect()
    }

    pub fn inv(&self, a: &[u64]) -> Elem {
        a.iter().zip(&self.orders).map(|(&x, &n)| (n - x) % n).collect()
    }

    pub fn pow(&self, a: &[u64], k: i64) -> Elem {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
            .collect()
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut stride = 1usize;
        for &n in &self.orders {
            let n = n as usize;
            let s = (a % n + b % n) % n;
            out += s * stride;
            stride *= n;
            a /= n;
            b /= n;
        }
        out
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        self.index(&self.inv(&self.elem(a)))
    }

    pub fn elem_order(&self, a: &[u64]) -> u64 {
        a.iter()
            .zip(&self.orders)
            .fold(1, |acc, (&x, &n)| nt::lcm(acc, n / nt::gcd(x, n)))
    }

    pub fn with_label(mut self, name: &str, sub: Subgroup) -> Self {
        self.labels.insert(name.to_string(), sub);
        self
    }

    pub fn label(&self, name: &str) -> Result<&Subgroup, GroupError> {
        self.labels.get(name).ok_or_else(|| GroupError::MissingLabel(name.to_string()))
    }

    pub fn labels(&self) -> &BTreeMap<String, Subgroup> {
        &self.labels
    }

    /// Attaches a filtered inertia chain U_0 >= U_1 >= ... at a place.
    pub fn with_inertia(mut self, place: Place, chain: Vec<Subgroup>) -> Result<Self, GroupError> {
        if chain.windows(2).any(|w| !w[1].is_subset_of(&w[0])) {
            return Err(GroupError::NotDescending(place));
        }
        self.inertia.insert(place, chain);
        Ok(self)
    }

    pub fn inertia(&self, place: Place) -> Result<&[Subgroup], GroupError> {
        self.inertia
            .get(&place)
            .map(|v| v.as_slice())
            .ok_or(GroupError::MissingInertia(place))
    }

    pub fn has_inertia(&self) -> bool {
        !self.inertia.is_empty()
    }
}

/// Character given by one exponent per cyclic factor:
/// chi(g) = prod zeta_{n_i}^{e_i g_i}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupChar {
    orders: Vec<u64>,
    exps: Vec<u64>,
}

impl GroupChar {
    pub fn new(g: &FinAbGroup, exps: &[i64]) -> Self {
        GroupChar { orders: g.orders.clone(), exps: g.reduce(exps) }
    }

    pub fn trivial(g: &FinAbGroup) -> Self {
        GroupChar { orders: g.orders.clone(), exps: vec![0; g.rank()] }
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Common order M of the value roots of unity (group exponent).
    pub fn modulus(&self) -> u64 {
        self.orders.iter().fold(1, |a, &b| nt::lcm(a, b))
    }

    /// chi(g) = zeta_M^t with M = [`GroupChar::modulus`]; returns t.
    pub fn value_exp(&self, g: &[u64]) -> u64 {
        let m = self.modulus();
        let mut t = 0u64;
        for ((&e, &x), &n) in self.exps.iter().zip(g).zip(&self.orders) {
            t = (t + (e * x % n) * (m / n)) % m;
        }
        t
    }

    pub fn value(&self, g: &[u64]) -> CycloNumber {
        CycloNumber::root(self.modulus(), self.value_exp(g) as i64)
    }

    /// The value realized in a coefficient ring.
    pub fn value_in<R: Ring>(&self, proto: &R, g: &[u64]) -> Option<R> {
        proto.root_of_unity(self.modulus(), self.value_exp(g) as i64)
    }

    pub fn mul(&self, o: &GroupChar) -> GroupChar {
        assert_eq!(self.orders, o.orders, "characters of different groups");
        let exps = self
            .exps
            .iter()
            .zip(&o.exps)
            .zip(&self.orders)
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect();
        GroupChar { orders: self.orders.clone(), exps }
    }

    pub fn inv(&self) -> GroupChar {
        self.pow(-1)
    }

    pub fn pow(&self, k: i64) -> GroupChar {
        let exps = self
            .exps
            .iter()
            .zip(&self.orders)
            .map(|(&a, &n)| ((a as i128 * k as i128).rem_euclid(n as i128)) as u64)
            .collect();
        GroupChar { orders: self.orders.clone(), exps }
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&x, &n)| nt::lcm(acc, n / nt::gcd(x, n)))
    }

    /// Whether chi is trivial on every element of a subgroup.
    pub fn trivial_on(&self, g: &FinAbGroup, sub: &Subgroup) -> bool {
        sub.members().iter().all(|&i| self.value_exp(&g.elem(i)) == 0)
    }

    /// Character of a subgroup-factor restricted to the first coordinates.
    pub fn restrict_coords(&self, range: std::ops::Range<usize>) -> GroupChar {
        GroupChar { orders: self.orders[range.clone()].to_vec(), exps: self.exps[range].to_vec() }
    }

    /// Composite chi o h for a homomorphism h into this character's group.
    pub fn pullback(&self, h: &GroupHom) -> GroupChar {
        let m = self.modulus();
        let src = &h.src;
        let exps = (0..src.rank())
            .map(|j| {
                let mut e = vec![0u64; src.rank()];
                e[j] = 1;
                let t = self.value_exp(&h.apply(&e));
                let n = src.orders[j];
                // t is a multiple of m / gcd(m, n)
                let step = m / nt::gcd(m, n);
                debug_assert_eq!(t % step, 0);
                (t / step) * (n / nt::gcd(m, n)) % n
            })
            .collect();
        GroupChar { orders: src.orders.clone(), exps }
    }
}

impl fmt::Display for GroupChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi{:?}", self.exps)
    }
}

/// All |G| characters, ordered by exponent vector (first coordinate fastest).
pub fn char_table(g: &FinAbGroup) -> Vec<GroupChar> {
    (0..g.order() as usize)
        .map(|i| GroupChar { orders: g.orders.clone(), exps: g.elem(i) })
        .collect()
}

/// Smallest n with chi trivial on U_n of the inertia chain at `place`;
/// the term beyond the declared chain is the trivial group.
pub fn conductor_exponent(g: &FinAbGroup, chi: &GroupChar, place: Place) -> Result<u32, GroupError> {
    let chain = g.inertia(place)?;
    for (n, u) in chain.iter().enumerate() {
        if chi.trivial_on(g, u) {
            return Ok(n as u32);
        }
    }
    Ok(chain.len() as u32)
}

/// A group homomorphism between products of cyclic groups, given by an integer matrix
/// (column j is the image of the j-th generator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub src: FinAbGroup,
    pub dst: FinAbGroup,
    pub matrix: Vec<Vec<i64>>,
}

impl GroupHom {
    pub fn new(src: &FinAbGroup, dst: &FinAbGroup, matrix: Vec<Vec<i64>>) -> Result<Self, GroupError> {
        if matrix.len() != dst.rank() || matrix.iter().any(|r| r.len() != src.rank()) {
            return Err(GroupError::NotAHom("matrix shape".into()));
        }
        for (j, &nj) in src.orders.iter().enumerate() {
            for (i, &ni) in dst.orders.iter().enumerate() {
                if (matrix[i][j] as i128 * nj as i128).rem_euclid(ni as i128) != 0 {
                    return Err(GroupError::NotAHom(format!("column {j} is not killed by {nj}")));
                }
            }
        }
        Ok(GroupHom { src: src.clone(), dst: dst.clone(), matrix })
    }

    pub fn apply(&self, g: &[u64]) -> Elem {
        let raw: Vec<i64> = self
            .matrix
            .iter()
            .zip(&self.dst.orders)
            .map(|(row, &n)| {
                row.iter()
                    .zip(g)
                    .fold(0i128, |acc, (&a, &x)| (acc + a as i128 * x as i128).rem_euclid(n as i128))
                    as i64
            })
            .collect();
        self.dst.reduce(&raw)
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.dst.order() as usize];
        for g in self.src.elements() {
            hit[self.dst.index(&self.apply(&g))] = true;
        }
        hit.into_iter().all(|b| b)
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<usize> = (0..self.src.order() as usize)
            .filter(|&i| self.apply(&self.src.elem(i)).iter().all(|&x| x == 0))
            .collect();
        Subgroup { gens: members.iter().map(|&i| self.src.elem(i)).collect(), members }
    }
}

/// Involutive automorphism c of a group, the action of complex conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CAction {
    hom: GroupHom,
}

impl CAction {
    pub fn new(g: &FinAbGroup, matrix: Vec<Vec<i64>>) -> Result<Self, GroupError> {
        let hom = GroupHom::new(g, g, matrix)?;
        for j in 0..g.rank() {
            let mut e = vec![0u64; g.rank()];
            e[j] = 1;
            if hom.apply(&hom.apply(&e)) != e {
                return Err(GroupError::NotInvolutive);
            }
        }
        Ok(CAction { hom })
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        let r = g.rank();
        let m = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
        CAction::new(g, m).unwrap()
    }

    pub fn apply(&self, g: &[u64]) -> Elem {
        self.hom.apply(g)
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.hom.matrix
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.hom.src
    }
}

/// chi^c(g) = chi(c g c^-1) = chi(c(g)).
pub fn conjugate_char(chi: &GroupChar, c: &CAction) -> GroupChar {
    chi.pullback(&c.hom)
}

/// Action of a Galois group on character values through exponentiation
/// zeta -> zeta^a, for a in a set of units modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisAction {
    pub modulus: u64,
    residues: Vec<u64>,
}

impl GaloisAction {
    /// Closure of `gens` under multiplication mod `modulus`.
    pub fn generated(modulus: u64, gens: &[u64]) -> Result<Self, GroupError> {
        let mut set = vec![1 % modulus];
        for &a in gens {
            if nt::gcd(a % modulus, modulus) != 1 {
                return Err(GroupError::BadAction(format!("{a} is not a unit mod {modulus}")));
            }
        }
        let mut i = 0;
        while i < set.len() {
            for &a in gens {
                let b = nt::mul_mod(set[i], a, modulus);
                if !set.contains(&b) {
                    set.push(b);
                }
            }
            i += 1;
        }
        set.sort_unstable();
        Ok(GaloisAction { modulus, residues: set })
    }

    pub fn trivial(modulus: u64) -> Self {
        GaloisAction { modulus, residues: vec![1 % modulus] }
    }

    fn split(modulus: u64, p: u64) -> (u64, u64) {
        let k = nt::val_p(modulus, p);
        let pk = p.pow(k);
        (pk, modulus / pk)
    }

    fn crt(a_pk: u64, a_m: u64, pk: u64, m: u64) -> u64 {
        // x = a_pk mod pk, x = a_m mod m
        let mut x = a_m % m;
        while x % pk != a_pk % pk {
            x += m;
        }
        x
    }

    /// Inertia of the maximal unramified extension: all of (Z/p^k)^x on the p-part,
    /// trivial on prime-to-p roots of unity.
    pub fn inertia_h(modulus: u64, p: u64) -> Self {
        let (pk, m) = Self::split(modulus, p);
        let gens: Vec<u64> = (1..pk.max(2))
            .filter(|&a| a % p != 0 || pk == 1)
            .map(|a| Self::crt(a % pk.max(1), 1, pk.max(1), m))
            .collect();
        Self::generated(modulus, &gens).unwrap()
    }

    /// The absolute Galois group of Q_p: inertia plus Frobenius (p on the prime-to-p part).
    pub fn g_l(modulus: u64, p: u64) -> Self {
        let (pk, m) = Self::split(modulus, p);
        let mut gens: Vec<u64> = (1..pk.max(2))
            .filter(|&a| a % p != 0 || pk == 1)
            .map(|a| Self::crt(a % pk.max(1), 1, pk.max(1), m))
            .collect();
        gens.push(Self::crt(1 % pk.max(1), p % m.max(1), pk.max(1), m));
        Self::generated(modulus, &gens).unwrap()
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

/// Partition of `chars` into orbits under chi -> chi^a, as index lists.
pub fn galois_orbits(chars: &[GroupChar], action: &GaloisAction) -> Result<Vec<Vec<usize>>, GroupError> {
    for c in chars {
        if !action.modulus.is_multiple_of(c.order()) {
            return Err(GroupError::BadAction(format!(
                "character of order {} not covered by modulus {}",
                c.order(),
                action.modulus
            )));
        }
    }
    let mut orbit_of = vec![usize::MAX; chars.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..chars.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = Vec::new();
        for &a in &action.residues {
            let img = chars[i].pow(a as i64);
            if let Some(j) = chars.iter().position(|c| *c == img) {
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    orbit.push(j);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_characters() {
        let g = FinAbGroup::cyclic(2);
        let t = char_table(&g);
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].value(&[1]), CycloNumber::from_int(-1));
        assert_eq!(char_table(&FinAbGroup::trivial()).len(), 1);
    }

    #[test]
    fn conductor_on_units_mod_25() {
        // (Z/25)^x = Z/20 via the primitive root 2; U_1 = 1 + 5Z is generated by 2^4
        let g = FinAbGroup::cyclic(20);
        let u0 = Subgroup::generated(&g, &[vec![1]]).unwrap();
        let u1 = Subgroup::generated(&g, &[vec![4]]).unwrap();
        let g = g.with_inertia(Place::P, vec![u0, u1]).unwrap();
        assert_eq!(conductor_exponent(&g, &GroupChar::new(&g, &[0]), Place::P).unwrap(), 0);
        assert_eq!(conductor_exponent(&g, &GroupChar::new(&g, &[1]), Place::P).unwrap(), 2);
        assert_eq!(conductor_exponent(&g, &GroupChar::new(&g, &[5]), Place::P).unwrap(), 1);
        assert!(matches!(
            conductor_exponent(&g, &GroupChar::new(&g, &[1]), Place::PBar),
            Err(GroupError::MissingInertia(Place::PBar))
        ));
    }

    #[test]
    fn swap_conjugation() {
        let g = FinAbGroup::new(&[5, 5]).unwrap();
        let c = CAction::new(&g, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let chi = GroupChar::new(&g, &[1, 3]);
        assert_eq!(conjugate_char(&chi, &c).exps(), &[3, 1]);
        let fixed: Vec<_> = char_table(&g)
            .into_iter()
            .filter(|x| conjugate_char(x, &c) == *x)
            .collect();
        assert_eq!(fixed.len(), 5);
        assert!(fixed.iter().all(|x| x.exps()[0] == x.exps()[1]));
        assert!(CAction::new(&g, vec![vec![2, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn orbits_on_z5() {
        let g = FinAbGroup::cyclic(5);
        let chars = char_table(&g);
        let full = GaloisAction::generated(5, &[2]).unwrap();
        let orbits = galois_orbits(&chars, &full).unwrap();
        assert_eq!(orbits, vec![vec![0], vec![1, 2, 3, 4]]);
        let triv = galois_orbits(&chars, &GaloisAction::trivial(5)).unwrap();
        assert_eq!(triv.len(), 5);
        assert!(GaloisAction::generated(10, &[5]).is_err());
    }

    #[test]
    fn closure_check() {
        let g = FinAbGroup::cyclic(6);
        assert!(Subgroup::from_elements(&g, "bad", &[vec![0], vec![1]]).is_err());
        assert!(Subgroup::from_elements(&g, "ok", &[vec![0], vec![2], vec![4]]).is_ok());
    }
}
