//! Descent: the fixed-coefficient lemma over D, Det and ev on twist families,
//! and the experimental Taylor search.

use std::collections::BTreeMap;

use iwalab::arith::{CycloNumber, PadicExt, PadicNumber, Ring};
use iwalab::chargroup::{char_table, CAction, FinAbGroup, GroupHom};
use iwalab::descent::{
    d_fourier_invert, det_family, det_map, equivariance_witness, equivariant_vector, ev, ev_injectivity_check, fix_lemma_check, taylor_sampling,
    twist_rep, DModel, DescentError, EvVerdict, Frobenius, TaylorReport,
};
use iwalab::grpring::{Carrier, Measure};
use iwalab::nt;
use iwalab::reps::{classify_irreps, ArtinRep, Metabelian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Env;
use crate::config::FrobDirection;
use crate::report::{Check, SuiteResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentCase {
    Fix,
    Ev,
    Det,
    Taylor,
}

impl DescentCase {
    pub const ALL: [DescentCase; 4] = [DescentCase::Fix, DescentCase::Ev, DescentCase::Det, DescentCase::Taylor];
}

impl std::str::FromStr for DescentCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fix" => Ok(DescentCase::Fix),
            "ev" => Ok(DescentCase::Ev),
            "det" => Ok(DescentCase::Det),
            "taylor" => Ok(DescentCase::Taylor),
            _ => Err(format!("unknown descent case `{s}` (fix, ev, det, taylor)")),
        }
    }
}

pub fn descent(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("descent");
    for case in DescentCase::ALL {
        run_case(env, case, &mut s);
    }
    s
}

pub fn descent_case(env: &Env, case: DescentCase) -> SuiteResult {
    let mut s = SuiteResult::new("descent");
    run_case(env, case, &mut s);
    s
}

fn run_case(env: &Env, case: DescentCase, s: &mut SuiteResult) {
    match case {
        DescentCase::Fix => fix(env, s),
        DescentCase::Ev => ev_checks(env, s),
        DescentCase::Det => det_checks(env, s),
        DescentCase::Taylor => taylor(env, s),
    }
}

fn draw(rng: &mut ChaCha8Rng) -> impl FnMut() -> u64 + '_ {
    move || rng.gen()
}

/// f(rho) in L(rho) for all rho forces f to have coefficients in O, at
/// p-power levels e = 1, 2, 3, with two injected failures per level.
fn fix(env: &Env, s: &mut SuiteResult) {
    let p = env.cfg.p;
    let prec = env.cfg.precision_or(12);
    s.param("fix.precision", prec);
    s.param("fix.samples", 100);
    let mut rng = env.rng("descent.fix");
    for e in 1..=3u32 {
        let model = match DModel::new(p, 4, e, prec) {
            Ok(m) => m,
            Err(err) => {
                s.push(Check::error(format!("fix e={e}"), err));
                continue;
            }
        };
        let q = p.pow(e);
        let g = FinAbGroup::new(&[p - 1, q]).expect("orders");
        let mut vacuous = 0;
        let mut failure = None;
        for i in 0..100 {
            let r = equivariant_vector(&model, &g, &mut draw(&mut rng))
                .and_then(|v| d_fourier_invert(&model, &g, &v))
                .and_then(|f| fix_lemma_check(&model, &f));
            match r {
                Ok(v) if v.hypothesis && v.conclusion => {}
                Ok(v) if v.holds() => vacuous += 1,
                Ok(v) => {
                    failure.get_or_insert_with(|| {
                        Check::fail(format!("fix e={e}"), v.conclusion_witness.unwrap_or_default(), "coefficients in O").with_detail(format!("sample {i}"))
                    });
                }
                Err(err) => {
                    failure.get_or_insert_with(|| Check::error(format!("fix e={e}"), format!("sample {i}: {err}")));
                }
            }
        }
        s.push(failure.unwrap_or_else(|| {
            if vacuous > 0 {
                Check::fail(format!("fix e={e}"), format!("{vacuous} samples outside the hypothesis"), "0")
            } else {
                Check::pass(format!("fix e={e}")).with_detail(format!("100 samples, group Z/{} x Z/{q}", p - 1))
            }
        }));

        // an unramified direction on the primitive orbit: hypothesis and conclusion both fail
        let name = format!("fix e={e}: unramified injection");
        let r = equivariant_vector(&model, &g, &mut draw(&mut rng)).and_then(|mut v| {
            for chi in (1..q).filter(|c| c % p != 0) {
                let j = g.index(&[0, chi]);
                v[j][1] = (v[j][1] + 7 * g.order()) % model.modulus();
            }
            let eq = equivariance_witness(&model, &g, &v).is_none();
            d_fourier_invert(&model, &g, &v).and_then(|f| fix_lemma_check(&model, &f)).map(|x| (eq, x))
        });
        s.push(match r {
            Ok((true, v)) if !v.hypothesis && !v.conclusion && v.d_measure => {
                Check::pass(name).with_detail(v.hypothesis_witness.unwrap_or_default())
            }
            Ok((eq, v)) => Check::fail(name, format!("equivariant {eq}, {v:?}"), "equivariant, hypothesis and conclusion false"),
            Err(err) => Check::error(name, err),
        });

        // breaking equivariance leaves the D-measures
        let name = format!("fix e={e}: equivariance injection");
        let r = equivariant_vector(&model, &g, &mut draw(&mut rng)).and_then(|mut v| {
            let j = g.index(&[0, 1]);
            v[j][model.f] = (v[j][model.f] + g.order()) % model.modulus();
            let w = equivariance_witness(&model, &g, &v);
            d_fourier_invert(&model, &g, &v).and_then(|f| fix_lemma_check(&model, &f)).map(|x| (w, x))
        });
        s.push(match r {
            Ok((Some((chi, a)), v)) if !v.d_measure && !v.conclusion => {
                Check::pass(name).with_detail(format!("witness chi = {chi}, sigma_{a}"))
            }
            Ok((w, v)) => Check::fail(name, format!("witness {w:?}, {v:?}"), "witness, no D-measure"),
            Err(err) => Check::error(name, err),
        });
    }
}

/// Z/q x Z/q with c swapping the factors, Gamma = Z/q by the sum.
fn swap_model(q: u64) -> (Metabelian, GroupHom) {
    let g = FinAbGroup::new(&[q, q]).expect("orders");
    let c = CAction::new(&g, vec![vec![0, 1], vec![1, 0]]).expect("swap");
    let gamma = GroupHom::new(&g, &FinAbGroup::cyclic(q), vec![vec![1, 1]]).expect("sum map");
    (Metabelian::new(g, c), gamma)
}

/// delta_x (1 + p r), a unit whenever p is topologically nilpotent.
fn random_unit<R: Ring>(grp: &Metabelian, proto: &R, p: u64, rng: &mut ChaCha8Rng) -> Measure<R> {
    let n = grp.order() as usize;
    let mut cs = vec![proto.zero_like(); n];
    for c in cs.iter_mut().take(3) {
        *c = proto.from_int(p as i64 * rng.gen_range(-2..=2));
    }
    cs[0] = cs[0].add(&proto.one_like());
    let car = Carrier::Metabelian(grp.clone());
    let r = Measure::from_coeffs(car.clone(), cs).expect("coefficient count");
    Measure::delta(car, rng.gen_range(0..n), proto.one_like()).convolve(&r).expect("same carrier")
}

fn det_checks(env: &Env, s: &mut SuiteResult) {
    let p = env.cfg.p;
    let (grp, gamma) = swap_model(p);
    let irreps = classify_irreps(&grp);
    let one = CycloNumber::one();
    let mut rng = env.rng("descent.det");
    let mut bad = None;
    for i in 0..100 {
        let (u, w) = (random_unit(&grp, &one, p, &mut rng), random_unit(&grp, &one, p, &mut rng));
        let r = (|| -> Result<Option<String>, DescentError> {
            let uw = u.convolve(&w).map_err(DescentError::from)?;
            let (du, dw, duw) = (det_map(&u, &irreps)?, det_map(&w, &irreps)?, det_map(&uw, &irreps)?);
            for ((a, b), c) in du.entries.iter().zip(&dw.entries).zip(&duw.entries) {
                if a.1.mul(&b.1) != c.1 {
                    return Ok(Some(format!("{}: {} vs {}", a.0, a.1.mul(&b.1), c.1)));
                }
            }
            // ev recovers Det from the family
            let fam = det_family(&grp, &gamma, &u)?;
            for (rho, v) in du.entries {
                if ev(&fam[&rho]) != v {
                    return Ok(Some(format!("ev at {rho}")));
                }
            }
            Ok(None)
        })();
        match r {
            Ok(None) => {}
            Ok(Some(w)) => {
                bad.get_or_insert_with(|| Check::fail("Det(uw) = Det(u) Det(w), ev(Det family) = Det", w, "equal").with_detail(format!("sample {i}")));
            }
            Err(e) => {
                bad.get_or_insert_with(|| Check::error("Det(uw) = Det(u) Det(w), ev(Det family) = Det", e));
            }
        }
    }
    s.push(bad.unwrap_or_else(|| Check::pass("Det(uw) = Det(u) Det(w), ev(Det family) = Det").with_detail("100 samples")));
    let zero = Measure::zero(Carrier::Metabelian(grp.clone()), &one);
    s.push(match det_map(&zero, &irreps) {
        Err(_) => Check::pass("Det rejects a non-unit"),
        Ok(_) => Check::fail("Det rejects a non-unit", "accepted", "error"),
    });
}

fn ev_checks(env: &Env, s: &mut SuiteResult) {
    let p = env.cfg.p;
    let (grp, gamma) = swap_model(p);
    let irreps = classify_irreps(&grp);
    let one = CycloNumber::one();
    let car = Carrier::Metabelian(grp.clone());
    let mut rng = env.rng("descent.ev");
    let verdict = |name: &str, r: Result<EvVerdict, DescentError>, trivial: bool| match r {
        Ok(v) if v.pass() && v.ev_trivial == trivial => Check::pass(name).with_detail(format!("{} reps, |Gamma| = {}", v.reps, v.gamma_order)),
        Ok(v) => Check::fail(name, format!("{v:?}"), format!("pass with ev trivial = {trivial}")),
        Err(e) => Check::error(name, e),
    };
    let fam = det_family(&grp, &gamma, &Measure::delta(car.clone(), 0, one.clone()));
    s.push(verdict("ev: delta_e family", fam.and_then(|f| ev_injectivity_check(&grp, &gamma, &f)), true));

    let u = random_unit(&grp, &one, p, &mut rng);
    let r = (|| -> Result<(BTreeMap<ArtinRep, Measure<CycloNumber>>, ArtinRep), DescentError> {
        let full = det_family(&grp, &gamma, &u)?;
        let rho0 = irreps.iter().find(|r| r.is_type_b()).cloned().ok_or_else(|| DescentError::Shape("no Type B irrep".into()))?;
        let orbit = char_table(&gamma.dst).iter().map(|c| twist_rep(&grp, &gamma, &irreps, &rho0, c)).collect::<Result<Vec<_>, _>>()?;
        let de = Measure::delta(Carrier::Abelian(gamma.dst.clone()), 0, one.clone());
        let fam = irreps.iter().map(|r| (r.clone(), if orbit.contains(r) { full[r].clone() } else { de.clone() })).collect();
        Ok((fam, rho0))
    })();
    match r {
        Ok((fam, rho0)) => {
            s.push(verdict("ev: one twist orbit", ev_injectivity_check(&grp, &gamma, &fam), false));
            let mut bad = fam;
            bad.insert(rho0, Measure::delta(Carrier::Abelian(gamma.dst.clone()), 0, one.clone()));
            s.push(match ev_injectivity_check(&grp, &gamma, &bad) {
                Err(DescentError::NotTwistInvariant { .. }) => Check::pass("ev: broken twist invariance is reported"),
                other => Check::fail("ev: broken twist invariance is reported", format!("{other:?}"), "NotTwistInvariant"),
            });
        }
        Err(e) => s.push(Check::error("ev: one twist orbit", e)),
    }

    let (grp2, gamma2) = swap_model(p * p);
    match PadicExt::for_conductor(p, p * p, 4, None) {
        Ok(ext) => {
            let proto = PadicNumber::from_int(&ext, 0);
            let mut rng2 = ChaCha8Rng::seed_from_u64(rng.gen());
            for i in 0..2 {
                let u = random_unit(&grp2, &proto, p, &mut rng2);
                let r = det_family(&grp2, &gamma2, &u).and_then(|f| ev_injectivity_check(&grp2, &gamma2, &f));
                s.push(verdict(&format!("ev: {p}-adic family at level {p}^2, sample {i}"), r, false));
            }
        }
        Err(e) => s.push(Check::error(format!("ev: {p}-adic ring"), e)),
    }
}

/// Experimental: data only, never a gating verdict.
fn taylor(env: &Env, s: &mut SuiteResult) {
    let p = env.cfg.p;
    s.param("taylor.frobenius", format!("{:?}", env.cfg.frobenius).to_lowercase());
    let g = FinAbGroup::cyclic(p);
    let grp = Metabelian::new(g.clone(), CAction::new(&g, vec![vec![-1]]).expect("inversion"));
    let car = Carrier::Metabelian(grp.clone());
    let mut frob = Frobenius::unramified(p, 2, 1);
    if env.cfg.frobenius == FrobDirection::Geometric {
        frob.a = nt::inv_mod(frob.a, frob.modulus).expect("Frobenius is invertible");
    }
    let show = |r: &TaylorReport| {
        format!(
            "found = {}, strategy = {}, candidates = {}, bound = {}, verified = {}",
            r.found.is_some(),
            r.strategy.as_deref().unwrap_or("none"),
            r.candidates,
            r.bound,
            r.verified
        )
    };
    let u = Measure::delta(car.clone(), 3 % grp.order() as usize, CycloNumber::from_int(3));
    s.push(match taylor_sampling(&grp, &u, &frob, 1) {
        Ok(r) => Check::info("taylor: rational unit", show(&r)),
        Err(e) => Check::info("taylor: rational unit", format!("search error: {e}")),
    });
    let z = CycloNumber::root(frob.modulus, 1);
    let a = z.add(&CycloNumber::from_int(2));
    let v = Measure::delta(car.clone(), grp.index(&[1], 0), a)
        .add(&Measure::delta(car.clone(), grp.index(&[0], 1), CycloNumber::one()))
        .expect("same carrier");
    let r = frob.apply_measure(&v).and_then(|fv| Ok(v.convolve(&fv)?)).map_err(|e| e.to_string()).and_then(|u| {
        taylor_sampling(&grp, &u, &frob, 2).map(|r| show(&r)).map_err(|e| e.to_string())
    });
    s.push(Check::info("taylor: v Frob(v)", r.unwrap_or_else(|e| format!("search error: {e}"))));
}
