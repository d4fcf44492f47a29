//! Symbolic ratio chains, the weight-k suite and the period unit L_Omega.

use iwalab::arith::{PadicExt, PadicNumber, Ring};
use iwalab::reps::{classify_irreps, ArtinRep, Metabelian};
use iwalab::symratio::{
    build_l_omega, build_l_omega_ab, elliptic_product_check, elliptic_ratio, gamma_ratio, gamma_ratio_closed, l_omega_inverse, prop_ratio, Atom,
    Ctx, MeasureVariant, PropVariant, RatioReport, Step, SymError, SymExpr,
};
use rand::Rng;

use super::{missing, Env, Sampler};
use crate::report::{Check, SuiteResult};

fn level_one(env: &Env, suite: &str, s: &mut SuiteResult) -> Option<Metabelian> {
    let Some(lvl) = env.tower.levels.first() else {
        s.push(missing(suite, "a first level"));
        return None;
    };
    if !lvl.group.has_inertia() {
        s.push(missing(suite, "inertia chains at level 1"));
        return None;
    }
    s.param("level", 1);
    s.param("group", format!("{:?}", lvl.group.orders()));
    Some(lvl.metabelian())
}

fn trace_lines(steps: &[Step]) -> Vec<String> {
    steps.iter().map(|st| format!("{}: {} => {}", st.rule, st.before, st.after)).collect()
}

fn ratio_check(env: &Env, r: Result<RatioReport, SymError>, name: String) -> Check {
    match r {
        Ok(r) => {
            let c = if r.ok() {
                Check::pass(name).with_detail(format!("{} ({} rewrite steps)", r.value, r.trace.len()))
            } else {
                Check::fail(name, r.value.to_string(), r.expected.to_string()).with_detail(format!("residual {}", r.residual))
            };
            if env.cfg.trace {
                c.with_trace(trace_lines(&r.trace))
            } else {
                c
            }
        }
        Err(e) => Check::error(name, e),
    }
}

/// Type A ratios reduce to alpha / alpha tau by rho(c), Type B to alpha^2 tau,
/// and L'_E L_Omega = L at every irrep.
pub fn ratio(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("ratio");
    let Some(grp) = level_one(env, "ratio", &mut s) else { return s };
    let ctx = Ctx::elliptic(&grp);
    let irreps = classify_irreps(&grp);
    s.param("irreps", irreps.len());
    for rho in &irreps {
        for v in [MeasureVariant::L, MeasureVariant::LPrime] {
            let name = format!("ratio[{}] {rho}", v.name());
            s.push(ratio_check(env, elliptic_ratio(&ctx, rho, v), name));
        }
    }
    match build_l_omega(&grp, 2) {
        Ok(lo) => {
            for rho in &irreps {
                s.push(ratio_check(env, elliptic_product_check(&ctx, rho, &lo), format!("L'_E * L_Omega = L at {rho}")));
            }
        }
        Err(e) => s.push(Check::error("L_Omega", e)),
    }
    s
}

/// gamma_ratio over the (k, j) grid and both weight-k propositions at level 1.
pub fn weight(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("weight");
    for k in 2..=6i64 {
        for j in -3..=0i64 {
            let name = format!("gamma_ratio k={k} j={j}");
            let c = if k - 1 + j <= 0 {
                match gamma_ratio(k, j) {
                    Err(SymError::Pole(_)) => Check::pass(name).with_detail("pole, excluded"),
                    other => Check::fail(name, format!("{other:?}"), "pole"),
                }
            } else {
                match (gamma_ratio(k, j), gamma_ratio_closed(k, j)) {
                    (Ok(a), Ok(b)) if a.equals(&b) => Check::pass(name).with_detail(a.to_string()),
                    (Ok(a), Ok(b)) => Check::fail(name, a.to_string(), b.to_string()),
                    (Err(e), _) | (_, Err(e)) => Check::error(name, e),
                }
            };
            s.push(c);
        }
    }
    let Some(grp) = level_one(env, "weight", &mut s) else { return s };
    let irreps = classify_irreps(&grp);
    for k in 2..=6i64 {
        let ctx = Ctx::weight(&grp, k);
        let lo = match build_l_omega(&grp, k) {
            Ok(lo) => lo,
            Err(e) => {
                s.push(Check::error(format!("L_Omega k={k}"), e));
                continue;
            }
        };
        for j in -3..=0i64 {
            if k - 1 + j <= 0 {
                continue;
            }
            for v in [PropVariant::Dual, PropVariant::Twisted] {
                let mut smp = Sampler::new(format!("prop[{v:?}] k={k} j={j}"));
                for rho in &irreps {
                    match prop_ratio(&ctx, rho, v, j, &lo, false) {
                        Ok(r) => smp.record(r.ok(), || r.value.to_string(), || r.expected.to_string(), || rho.to_string()),
                        Err(e) => smp.error(format!("{rho}: {e}")),
                    }
                }
                s.push(smp.finish());
            }
        }
    }
    s
}

/// L_Omega * L_Omega^-1 = delta_e symbolically and p-adically, and its
/// evaluation table {Ind chi -> ab, rho(c) = +1 -> a, rho(c) = -1 -> b}.
pub fn l_omega(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("l-omega");
    let Some(grp) = level_one(env, "l-omega", &mut s) else { return s };
    let p = env.cfg.p;
    let prec = env.cfg.precision_or(10);
    s.param("precision", prec);
    s.param("pairs", 50);
    let irreps = classify_irreps(&grp);
    let mut rng = env.rng("l-omega");

    let mut sym_inv = Sampler::new("symbolic inverse");
    let mut sym_table = Sampler::new("symbolic evaluation table");
    for _ in 0..50 {
        let mut unit = |om: Atom| {
            let r = SymExpr::rational(rng.gen_range(1..20), rng.gen_range(1..20));
            r.mul(&SymExpr::mono(&[(om, rng.gen_range(1..3)), (Atom::OmegaInf, -rng.gen_range(1..3)), (Atom::TwoPi, rng.gen_range(-2..3))]))
        };
        let (a, b) = (unit(Atom::OmegaPlus), unit(Atom::OmegaMinus));
        match unit_pair(&grp, &irreps, &a, &b) {
            Ok((inv_ok, table)) => {
                sym_inv.record(inv_ok, || "L_Omega * inverse".into(), || "delta_e".into(), || format!("a = {a}, b = {b}"));
                sym_table.record(table.is_none(), || table.clone().unwrap_or_default(), || "a, b, ab".into(), || format!("a = {a}, b = {b}"));
            }
            Err(e) => sym_inv.error(e),
        }
    }
    s.push(sym_inv.finish());
    s.push(sym_table.finish());

    let ext = match PadicExt::base(p, prec) {
        Ok(e) => e,
        Err(e) => {
            s.push(Check::error("p-adic ring", e));
            return s;
        }
    };
    let modulus = p.pow(prec.min(12));
    let mut pad_inv = Sampler::new(format!("{p}-adic inverse"));
    let mut pad_table = Sampler::new(format!("{p}-adic evaluation table"));
    for _ in 0..50 {
        let mut unit = || loop {
            let x = rng.gen_range(1..modulus);
            if x % p != 0 {
                break PadicNumber::from_int(&ext, x as i64);
            }
        };
        let (a, b) = (unit(), unit());
        match unit_pair(&grp, &irreps, &a, &b) {
            Ok((inv_ok, table)) => {
                pad_inv.record(inv_ok, || "L_Omega * inverse".into(), || "delta_e".into(), || format!("a = {}, b = {}", a.to_text(), b.to_text()));
                pad_table.record(table.is_none(), || table.clone().unwrap_or_default(), || "a, b, ab".into(), || a.to_text());
            }
            Err(e) => pad_inv.error(e),
        }
    }
    s.push(pad_inv.finish());
    s.push(pad_table.finish());
    // a = p is not a unit, and the unit criterion says so
    let a = PadicNumber::from_int(&ext, p as i64);
    let b = PadicNumber::from_int(&ext, 1);
    let c = match build_l_omega_ab(&grp, &a, &b).map(|m| m.is_unit(p, 0)) {
        Ok(Ok(None)) => Check::pass("a = p is rejected"),
        Ok(Ok(Some(_))) => Check::fail("a = p is rejected", "unit", "not a unit"),
        Ok(Err(e)) => Check::error("a = p is rejected", e),
        Err(e) => Check::error("a = p is rejected", e),
    };
    s.push(c);
    s
}

/// (product is delta_e, first mismatching table row).
fn unit_pair<R: Ring>(grp: &Metabelian, irreps: &[ArtinRep], a: &R, b: &R) -> Result<(bool, Option<String>), SymError> {
    let lo = build_l_omega_ab(grp, a, b)?;
    let inv = l_omega_inverse(grp, a, b)?;
    let prod = lo.convolve(&inv)?;
    let inv_ok = prod.coeff(0).sub(&a.one_like()).is_zero() && prod.coeffs()[1..].iter().all(|c| c.is_zero());
    for rho in irreps {
        let v = lo.eval_rep(rho)?;
        let want = match rho {
            ArtinRep::Induced { .. } => a.mul(b),
            ArtinRep::TypeA { sign: 1, .. } => a.clone(),
            _ => b.clone(),
        };
        if !v.sub(&want).is_zero() {
            return Ok((inv_ok, Some(format!("{rho}: {} vs {}", v.to_text(), want.to_text()))));
        }
    }
    Ok((inv_ok, None))
}
