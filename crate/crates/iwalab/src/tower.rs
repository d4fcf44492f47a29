//! Finite-level group towers G_n (with c-action, inertia chains, Galois action
//! data and projections) and their key-value description files.
//!
//! File format: one `key = value` per line, `#` starts a comment. Elements are
//! space-separated coordinates, lists of elements and matrix rows are separated
//! by `;`. Keys:
//!
//! ```text
//! p = 5                          # prime, at least 5
//! d_K = 4                        # optional discriminant parameter
//! levels = 1                     # number of levels
//! level.1.orders = 4 4           # cyclic orders of G_1
//! level.1.c = 0 1; 1 0           # matrix of the involution c
//! level.1.delta_rank = 2         # the first 2 factors form the torsion part
//! level.1.inertia.p.0 = 1 0      # generators of U_0 at p (U_1, ... follow)
//! level.1.inertia.pbar.0 = 0 1
//! level.1.units.p = 1 0          # image of the smallest primitive root mod p^n
//! level.1.units.pbar = 0 1       #   under the inertia at p (resp. pbar)
//! level.1.gamma.orders = 5       # optional quotient onto Gamma_n and its matrix
//! level.1.gamma.map = 0 0 1 1
//! level.1.galois.h = 1 3         # optional exponent action generators
//! level.1.galois.gl = 1 3
//! level.2.proj = 1 0 0 0; 0 1 0 0  # matrix of G_2 -> G_1 (levels >= 2)
//! ```
//!
//! Unknown keys are rejected. Omitted Galois data defaults to the inertia and
//! decomposition actions at p on the exponent of G_n.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::chargroup::{CAction, Elem, FinAbGroup, GaloisAction, GroupError, GroupHom, Place, Subgroup};
use crate::nt;
use crate::reps::Metabelian;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("level {level}: {source}")]
    Group { level: u32, source: GroupError },
    #[error("level {0}: {1}")]
    Invalid(u32, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub n: u32,
    pub group: FinAbGroup,
    pub c: CAction,
    pub delta_rank: usize,
    pub units_p: Option<Elem>,
    pub units_pbar: Option<Elem>,
    pub gamma: Option<GroupHom>,
    pub galois_h: GaloisAction,
    pub galois_gl: GaloisAction,
    pub proj: Option<GroupHom>,
}

impl Level {
    pub fn metabelian(&self) -> Metabelian {
        Metabelian::new(self.group.clone(), self.c.clone())
    }

    /// The torsion part Delta as a group (first `delta_rank` factors).
    pub fn delta(&self) -> FinAbGroup {
        FinAbGroup::new(&self.group.orders()[..self.delta_rank]).unwrap()
    }

    /// The complement G_1 (remaining factors).
    pub fn g1(&self) -> FinAbGroup {
        let rest = &self.group.orders()[self.delta_rank..];
        if rest.is_empty() {
            FinAbGroup::trivial()
        } else {
            FinAbGroup::new(rest).unwrap()
        }
    }

    /// sigma_a: the element of the inertia at `place` acting on p-power roots of unity by a.
    pub fn sigma(&self, p: u64, place: Place, a: u64) -> Option<Elem> {
        let gen = match place {
            Place::P => self.units_p.as_ref()?,
            Place::PBar => self.units_pbar.as_ref()?,
        };
        let m = p.pow(self.n);
        let g = nt::primitive_root(m)?;
        let t = nt::discrete_log(a % m, g, m)?;
        Some(self.group.pow(gen, t as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSpec {
    pub p: u64,
    pub d_k: Option<u64>,
    pub levels: Vec<Level>,
}

fn coord_hom(src: &FinAbGroup, dst: &FinAbGroup, rows: Vec<Vec<i64>>) -> GroupHom {
    GroupHom::new(src, dst, rows).expect("standard tower maps are homomorphisms")
}

/// The standard split-prime model: G_n = (Z/p^n)^x at p times (Z/p^n)^x at pbar,
/// written as Delta x G_1 = (Z/(p-1))^2 x (Z/p^(n-1))^2, with c swapping the two places.
pub fn standard_split_tower(p: u64, d_k: Option<u64>, levels: u32) -> TowerSpec {
    let mut out = Vec::new();
    for n in 1..=levels {
        let pp = p.pow(n - 1);
        let mut orders = vec![p - 1, p - 1];
        if pp > 1 {
            orders.extend([pp, pp]);
        }
        let r = orders.len();
        let g = FinAbGroup::new(&orders).unwrap();
        let unit = |i: usize| -> Elem {
            let mut e = vec![0; r];
            e[i] = 1;
            e
        };
        let chain = |dcoord: usize, gcoord: usize| -> Vec<Subgroup> {
            let mut u0 = vec![unit(dcoord)];
            if r > 2 {
                u0.push(unit(gcoord));
            }
            let mut chain = vec![Subgroup::generated(&g, &u0).unwrap()];
            for i in 1..n {
                let mut e = vec![0; r];
                e[gcoord] = p.pow(i - 1);
                chain.push(Subgroup::generated(&g, &[e]).unwrap());
            }
            chain
        };
        let cm: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| (j == (i ^ 1)) as i64).collect())
            .collect();
        let c = CAction::new(&g, cm).unwrap();
        let units_p = {
            let mut e = unit(0);
            if r > 2 {
                e[2] = 1;
            }
            e
        };
        let units_pbar = {
            let mut e = unit(1);
            if r > 2 {
                e[3] = 1;
            }
            e
        };
        let gamma = (r > 2).then(|| {
            let dst = FinAbGroup::cyclic(pp);
            coord_hom(&g, &dst, vec![vec![0, 0, 1, 1]])
        });
        let delta = Subgroup::generated(&g, &[unit(0), unit(1)]).unwrap();
        let group = g
            .clone()
            .with_label("delta", delta)
            .with_inertia(Place::P, chain(0, 2))
            .unwrap()
            .with_inertia(Place::PBar, chain(1, 3))
            .unwrap();
        let proj = (n > 1).then(|| {
            let prev: &Level = &out[(n - 2) as usize];
            let rows: Vec<Vec<i64>> = (0..prev.group.rank())
                .map(|i| (0..r).map(|j| (i == j) as i64).collect())
                .collect();
            coord_hom(&group, &prev.group, rows)
        });
        let e = group.exponent();
        out.push(Level {
            n,
            c,
            delta_rank: 2,
            units_p: Some(units_p),
            units_pbar: Some(units_pbar),
            gamma,
            galois_h: GaloisAction::inertia_h(e, p),
            galois_gl: GaloisAction::g_l(e, p),
            proj,
            group,
        });
    }
    TowerSpec { p, d_k, levels: out }
}

fn fmt_elem(e: &[u64]) -> String {
    e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn fmt_matrix(m: &[Vec<i64>]) -> String {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

impl TowerSpec {
    /// Serializes to the key-value format accepted by [`TowerSpec::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "p = {}", self.p).unwrap();
        if let Some(d) = self.d_k {
            writeln!(s, "d_K = {d}").unwrap();
        }
        writeln!(s, "levels = {}", self.levels.len()).unwrap();
        for l in &self.levels {
            let k = format!("level.{}", l.n);
            writeln!(s, "{k}.orders = {}", fmt_elem(l.group.orders())).unwrap();
            writeln!(s, "{k}.c = {}", fmt_matrix(l.c.matrix())).unwrap();
            writeln!(s, "{k}.delta_rank = {}", l.delta_rank).unwrap();
            for (place, name) in [(Place::P, "p"), (Place::PBar, "pbar")] {
                if let Ok(chain) = l.group.inertia(place) {
                    for (i, u) in chain.iter().enumerate() {
                        let gens: Vec<String> = u.gens.iter().map(|g| fmt_elem(g)).collect();
                        writeln!(s, "{k}.inertia.{name}.{i} = {}", gens.join("; ")).unwrap();
                    }
                }
            }
            if let Some(u) = &l.units_p {
                writeln!(s, "{k}.units.p = {}", fmt_elem(u)).unwrap();
            }
            if let Some(u) = &l.units_pbar {
                writeln!(s, "{k}.units.pbar = {}", fmt_elem(u)).unwrap();
            }
            if let Some(gm) = &l.gamma {
                writeln!(s, "{k}.gamma.orders = {}", fmt_elem(gm.dst.orders())).unwrap();
                writeln!(s, "{k}.gamma.map = {}", fmt_matrix(&gm.matrix)).unwrap();
            }
            if let Some(pr) = &l.proj {
                writeln!(s, "{k}.proj = {}", fmt_matrix(&pr.matrix)).unwrap();
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<TowerSpec, TowerError> {
        let mut kv: BTreeMap<String, (usize, usize, String)> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap();
            if line.trim().is_empty() {
                continue;
            }
            let eq = line.find('=').ok_or(TowerError::Parse {
                line: ln + 1,
                col: line.len() - line.trim_start().len() + 1,
                msg: "expected `key = value`".into(),
            })?;
            let key = line[..eq].trim().to_string();
            let vcol = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
            if !known_key(&key) {
                return Err(TowerError::Parse {
                    line: ln + 1,
                    col: line.len() - line.trim_start().len() + 1,
                    msg: format!("unknown key `{key}`"),
                });
            }
            if kv.insert(key.clone(), (ln + 1, vcol, line[eq + 1..].trim().to_string())).is_some() {
                return Err(TowerError::Parse { line: ln + 1, col: 1, msg: format!("duplicate key `{key}`") });
            }
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| TowerError::Missing(k.to_string()));
        let p: u64 = num(get("p")?)?;
        if p < 5 || !nt::is_prime(p) {
            let (l, c, _) = get("p")?;
            return Err(TowerError::Parse { line: *l, col: *c, msg: "p must be a prime >= 5".into() });
        }
        let d_k = kv.get("d_K").map(num).transpose()?;
        let nlev: u32 = num(get("levels")?)?;
        let mut levels: Vec<Level> = Vec::new();
        for n in 1..=nlev {
            let k = |s: &str| format!("level.{n}.{s}");
            let gerr = |e: GroupError| TowerError::Group { level: n, source: e };
            let orders: Vec<u64> = ints(get(&k("orders"))?)?
                .into_iter()
                .map(|x| x as u64)
                .collect();
            let g = FinAbGroup::new(&orders).map_err(gerr)?;
            let r = g.rank();
            let cm = matrix(get(&k("c"))?, r, r)?;
            let c = CAction::new(&g, cm).map_err(gerr)?;
            let delta_rank: usize = match kv.get(&k("delta_rank")) {
                Some(v) => num(v)?,
                None => 0,
            };
            if delta_rank > r {
                return Err(TowerError::Invalid(n, "delta_rank exceeds the rank".into()));
            }
            let mut group = g.clone();
            if delta_rank > 0 {
                let gens: Vec<Elem> = (0..delta_rank)
                    .map(|i| (0..r).map(|j| (i == j) as u64).collect())
                    .collect();
                group = group.with_label("delta", Subgroup::generated(&g, &gens).map_err(gerr)?);
            }
            for (place, name) in [(Place::P, "p"), (Place::PBar, "pbar")] {
                let mut chain = Vec::new();
                let mut i = 0;
                while let Some(v) = kv.get(&k(&format!("inertia.{name}.{i}"))) {
                    let gens = elems(v, r)?;
                    chain.push(Subgroup::generated(&g, &gens).map_err(gerr)?);
                    i += 1;
                }
                if !chain.is_empty() {
                    group = group.with_inertia(place, chain).map_err(gerr)?;
                }
            }
            let elem_opt = |key: &str| -> Result<Option<Elem>, TowerError> {
                match kv.get(&k(key)) {
                    Some(v) => {
                        let e = elems(v, r)?;
                        if e.len() != 1 {
                            return Err(TowerError::Parse { line: v.0, col: v.1, msg: "expected one element".into() });
                        }
                        g.check(&e[0]).map_err(gerr)?;
                        Ok(Some(e[0].clone()))
                    }
                    None => Ok(None),
                }
            };
            let units_p = elem_opt("units.p")?;
            let units_pbar = elem_opt("units.pbar")?;
            let gamma = match (kv.get(&k("gamma.orders")), kv.get(&k("gamma.map"))) {
                (Some(o), Some(m)) => {
                    let go: Vec<u64> = ints(o)?.into_iter().map(|x| x as u64).collect();
                    let dst = FinAbGroup::new(&go).map_err(gerr)?;
                    let mm = matrix(m, dst.rank(), r)?;
                    Some(GroupHom::new(&group, &dst, mm).map_err(gerr)?)
                }
                (None, None) => None,
                _ => return Err(TowerError::Invalid(n, "gamma.orders and gamma.map go together".into())),
            };
            let e = g.exponent();
            let action = |key: &str, dflt: GaloisAction| -> Result<GaloisAction, TowerError> {
                match kv.get(&k(key)) {
                    Some(v) => {
                        let gens: Vec<u64> = ints(v)?.into_iter().map(|x| x.rem_euclid(e as i64) as u64).collect();
                        GaloisAction::generated(e, &gens).map_err(gerr)
                    }
                    None => Ok(dflt),
                }
            };
            let galois_h = action("galois.h", GaloisAction::inertia_h(e, p))?;
            let galois_gl = action("galois.gl", GaloisAction::g_l(e, p))?;
            let proj = match kv.get(&k("proj")) {
                Some(v) if n > 1 => {
                    let prev = &levels[(n - 2) as usize].group;
                    let mm = matrix(v, prev.rank(), r)?;
                    let h = GroupHom::new(&group, prev, mm).map_err(gerr)?;
                    if !h.is_surjective() {
                        return Err(TowerError::Invalid(n, "projection is not surjective".into()));
                    }
                    Some(h)
                }
                Some(v) => return Err(TowerError::Parse { line: v.0, col: 1, msg: "level 1 has no projection".into() }),
                None if n > 1 => return Err(TowerError::Missing(k("proj"))),
                None => None,
            };
            levels.push(Level { n, group, c, delta_rank, units_p, units_pbar, gamma, galois_h, galois_gl, proj });
        }
        Ok(TowerSpec { p, d_k, levels })
    }
}

fn known_key(k: &str) -> bool {
    if matches!(k, "p" | "d_K" | "levels") {
        return true;
    }
    let Some(rest) = k.strip_prefix("level.") else { return false };
    let Some((n, tail)) = rest.split_once('.') else { return false };
    if n.parse::<u32>().is_err() {
        return false;
    }
    if matches!(
        tail,
        "orders" | "c" | "delta_rank" | "units.p" | "units.pbar" | "gamma.orders" | "gamma.map" | "galois.h" | "galois.gl" | "proj"
    ) {
        return true;
    }
    for pre in ["inertia.p.", "inertia.pbar."] {
        if let Some(i) = tail.strip_prefix(pre) {
            return i.parse::<u32>().is_ok();
        }
    }
    false
}

type Entry = (usize, usize, String);

fn num<T: std::str::FromStr>(v: &Entry) -> Result<T, TowerError> {
    v.2.parse().map_err(|_| TowerError::Parse { line: v.0, col: v.1, msg: format!("expected an integer, got `{}`", v.2) })
}

fn ints(v: &Entry) -> Result<Vec<i64>, TowerError> {
    v.2.split_whitespace()
        .map(|t| {
            t.parse::<i64>().map_err(|_| TowerError::Parse {
                line: v.0,
                col: v.1 + v.2.find(t).unwrap_or(0),
                msg: format!("expected an integer, got `{t}`"),
            })
        })
        .collect()
}

fn elems(v: &Entry, rank: usize) -> Result<Vec<Elem>, TowerError> {
    let mut out = Vec::new();
    for part in v.2.split(';') {
        if part.trim().is_empty() {
            continue;
        }
        let e = ints(&(v.0, v.1, part.to_string()))?;
        if e.len() != rank {
            return Err(TowerError::Parse { line: v.0, col: v.1, msg: format!("element `{}` needs {rank} coordinates", part.trim()) });
        }
        out.push(e.into_iter().map(|x| x as u64).collect());
    }
    Ok(out)
}

fn matrix(v: &Entry, rows: usize, cols: usize) -> Result<Vec<Vec<i64>>, TowerError> {
    let m: Vec<Vec<i64>> = v
        .2
        .split(';')
        .map(|r| ints(&(v.0, v.1, r.to_string())))
        .collect::<Result<_, _>>()?;
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(TowerError::Parse { line: v.0, col: v.1, msg: format!("expected a {rows} x {cols} matrix") });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chargroup::{conductor_exponent, GroupChar};

    #[test]
    fn standard_tower_roundtrips_through_text() {
        let t = standard_split_tower(5, Some(4), 2);
        let back = TowerSpec::parse(&t.to_text()).unwrap();
        assert_eq!(back.levels.len(), 2);
        for (a, b) in t.levels.iter().zip(&back.levels) {
            assert_eq!(a.group.orders(), b.group.orders());
            assert_eq!(a.c, b.c);
            assert_eq!(a.group.inertia(Place::P).unwrap(), b.group.inertia(Place::P).unwrap());
            assert_eq!(a.proj.as_ref().map(|h| &h.matrix), b.proj.as_ref().map(|h| &h.matrix));
            assert_eq!(a.galois_gl, b.galois_gl);
        }
    }

    #[test]
    fn level2_conductors() {
        let t = standard_split_tower(5, None, 2);
        let l = &t.levels[1];
        let g = &l.group;
        assert_eq!(conductor_exponent(g, &GroupChar::new(g, &[1, 0, 0, 0]), Place::P).unwrap(), 1);
        assert_eq!(conductor_exponent(g, &GroupChar::new(g, &[0, 0, 1, 0]), Place::P).unwrap(), 2);
        assert_eq!(conductor_exponent(g, &GroupChar::new(g, &[0, 0, 1, 0]), Place::PBar).unwrap(), 0);
        // sigma_a for a = 2 (the primitive root) is the unit generator
        assert_eq!(l.sigma(5, Place::P, 2).unwrap(), vec![1, 0, 1, 0]);
    }

    #[test]
    fn errors_have_positions() {
        let bad = "p = 5\nlevels = 1\nlevel.1.orders = 4 x\n";
        match TowerSpec::parse(bad) {
            Err(TowerError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let unknown = "p = 5\nlevels = 0\n  colour = red\n";
        match TowerSpec::parse(unknown) {
            Err(TowerError::Parse { line, col, msg }) => {
                assert_eq!((line, col), (3, 3));
                assert!(msg.contains("unknown key"));
            }
            other => panic!("{other:?}"),
        }
        let nonsplit = "p = 5\nlevels = 1\nlevel.1.orders = 4\nlevel.1.c = 2\n";
        assert!(matches!(TowerSpec::parse(nonsplit), Err(TowerError::Group { .. })));
    }
}
