//! Group-ring measures: the extension lemma, idempotent splitting and the
//! synthetic Katz-type assembly.

use std::collections::BTreeMap;

use iwalab::arith::{rat, CycloNumber, PadicExt, PadicNumber, Ring};
use iwalab::chargroup::{char_table, CAction, FinAbGroup, GroupChar, GroupHom};
use iwalab::grpring::{fourier_invert, scalar, Carrier, KatzModel, Measure};
use iwalab::reps::{classify_irreps, restrict, Metabelian};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{missing, Env, Sampler};
use crate::report::{Check, SuiteResult};

const SAMPLES: usize = 100;

fn small_cyclo(rng: &mut ChaCha8Rng, m: u64) -> CycloNumber {
    let mut x = CycloNumber::zero();
    for _ in 0..2 {
        let t = CycloNumber::root(m, rng.gen_range(0..m as i64)).scale(&rat(rng.gen_range(-3..=3), 1));
        x = x.add(&t);
    }
    x
}

fn small_padic(rng: &mut ChaCha8Rng, proto: &PadicNumber, m: u64) -> PadicNumber {
    let mut x = proto.zero_like();
    for _ in 0..2 {
        let z = proto.root_of_unity(m, rng.gen_range(0..m as i64)).expect("roots of this order exist");
        x = x.add(&z.mul(&proto.from_int(rng.gen_range(-40..=40))));
    }
    x
}

fn random_measure<R: Ring>(carrier: &Carrier, mut coeff: impl FnMut() -> R) -> Measure<R> {
    let coeffs = (0..carrier.order()).map(|_| coeff()).collect();
    Measure::from_coeffs(carrier.clone(), coeffs).expect("coefficient count matches")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Rings used by the suites: cyclotomic, and Z_p with p-1 roots adjoined.
fn padic_base(env: &Env, s: &mut SuiteResult) -> Option<PadicNumber> {
    let prec = env.cfg.precision_or(8);
    s.param("precision", prec);
    match PadicExt::base(env.cfg.p, prec) {
        Ok(ext) => Some(PadicNumber::from_int(&ext, 1)),
        Err(e) => {
            s.push(Check::error("p-adic ring", e));
            None
        }
    }
}

/// eval(extend(f), rho) = prod over Res rho of eval(f, chi), on Z/p x| Z/2,
/// together with the ring-map, twist and Fourier identities on G.
pub fn extension(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("measure");
    let p = env.cfg.p;
    let prec = env.cfg.precision_or(8);
    s.param("group", format!("Z/{p} x| Z/2"));
    s.param("precision", prec);
    s.param("samples", SAMPLES);
    let mut rng = env.rng("measure");
    let g = FinAbGroup::cyclic(p);
    let grp = Metabelian::new(g.clone(), CAction::new(&g, vec![vec![-1]]).expect("inversion"));
    let car = Carrier::Abelian(g.clone());

    let mut smp = Sampler::new("extension lemma, cyclotomic");
    lemma(&grp, &mut smp, || small_cyclo(&mut rng, p));
    s.push(smp.finish());
    match PadicExt::for_conductor(p, p, prec, None) {
        Ok(ext) => {
            let proto = PadicNumber::from_int(&ext, 1);
            let mut smp = Sampler::new(format!("extension lemma, {p}-adic"));
            lemma(&grp, &mut smp, || small_padic(&mut rng, &proto, p));
            s.push(smp.finish());
        }
        Err(e) => s.push(Check::error(format!("extension lemma, {p}-adic"), e)),
    }

    let table = char_table(&g);
    let mut ring_map = Sampler::new("eval(f * h, chi) = eval(f, chi) eval(h, chi)");
    let mut twist = Sampler::new("eval(tw(f, chi), psi) = eval(f, psi chi^-1)");
    for i in 0..SAMPLES {
        let f = random_measure(&car, || small_cyclo(&mut rng, p));
        let h = random_measure(&car, || small_cyclo(&mut rng, p));
        let chi = &table[rng.gen_range(0..table.len())];
        let psi = &table[rng.gen_range(0..table.len())];
        let r = (|| -> Result<(CycloNumber, CycloNumber, CycloNumber, CycloNumber), String> {
            let lhs = f.convolve(&h).map_err(err)?.eval_char(chi).map_err(err)?;
            let rhs = f.eval_char(chi).map_err(err)?.mul(&h.eval_char(chi).map_err(err)?);
            let tw = f.twist(chi).map_err(err)?.eval_char(psi).map_err(err)?;
            let direct = g.elements().enumerate().fold(CycloNumber::zero(), |acc, (j, x)| acc.add(&f.coeff(j).mul(&psi.mul(&chi.inv()).value(&x))));
            Ok((lhs, rhs, tw, direct))
        })();
        match r {
            Ok((a, b, c, d)) => {
                ring_map.record(a == b, || a.to_string(), || b.to_string(), || format!("{i}, chi = {chi}"));
                twist.record(c == d, || c.to_string(), || d.to_string(), || format!("{i}, chi = {chi}, psi = {psi}"));
            }
            Err(e) => ring_map.error(e),
        }
    }
    s.push(ring_map.finish());
    s.push(twist.finish());

    let mut fourier = Sampler::new("Fourier inversion recovers f");
    let g2 = FinAbGroup::new(&[p - 1, p]).expect("orders");
    let car2 = Carrier::Abelian(g2.clone());
    for i in 0..20 {
        let f = random_measure(&car2, || small_cyclo(&mut rng, p * (p - 1)));
        let vals: Result<BTreeMap<GroupChar, CycloNumber>, _> =
            char_table(&g2).into_iter().map(|c| f.eval_char(&c).map(|v| (c, v))).collect();
        match vals.map_err(err).and_then(|v| fourier_invert(&g2, &CycloNumber::one(), |c| v[c].clone()).map_err(err)) {
            Ok(back) => fourier.record(back == f, || back.to_text(), || f.to_text(), || i.to_string()),
            Err(e) => fourier.error(e),
        }
    }
    s.push(fourier.finish());
    s
}

fn lemma<R: Ring>(grp: &Metabelian, smp: &mut Sampler, mut coeff: impl FnMut() -> R) {
    let car = Carrier::Abelian(grp.g.clone());
    let irreps = classify_irreps(grp);
    for i in 0..SAMPLES {
        let f = random_measure(&car, &mut coeff);
        let ext = match f.extend_trivially(grp) {
            Ok(x) => x,
            Err(e) => return smp.error(e),
        };
        for rho in &irreps {
            let rhs = restrict(rho).iter().try_fold(f.augmentation().one_like(), |acc, chi| f.eval_char(chi).map(|v| acc.mul(&v)));
            match (ext.eval_rep(rho), rhs) {
                (Ok(l), Ok(r)) => smp.record(l == r, || l.to_text(), || r.to_text(), || format!("{i}, rho = {rho}")),
                (Err(e), _) | (_, Err(e)) => smp.error(e),
            }
        }
    }
}

/// Roundtrip of the idempotent split in both directions, the component
/// evaluation law, and compatibility with pushforward.
pub fn idempotent(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("idempotent");
    let p = env.cfg.p;
    s.param("samples", SAMPLES);
    let mut rng = env.rng("idempotent");
    let Some(proto) = padic_base(env, &mut s) else { return s };

    let small = FinAbGroup::new(&[p - 1, p]).expect("orders");
    let big = FinAbGroup::new(&[p - 1, p * p]).expect("orders");
    s.push(roundtrip(&format!("Z/{} x Z/{p}, cyclotomic", p - 1), &small, small.order() as usize, || small_cyclo(&mut rng, p * (p - 1))));
    s.push(roundtrip(&format!("Z/{} x Z/{}, {p}-adic", p - 1, p * p), &big, (p - 1) as usize, || small_padic(&mut rng, &proto, p - 1)));

    let pr = GroupHom::new(&big, &small, vec![vec![1, 0], vec![0, 1]]).expect("projection");
    let pr1 = GroupHom::new(&FinAbGroup::cyclic(p * p), &FinAbGroup::cyclic(p), vec![vec![1]]).expect("projection");
    let table = char_table(&small);
    let mut split = Sampler::new("pushforward commutes with the split");
    let mut conv = Sampler::new("pushforward commutes with convolution");
    let mut tw = Sampler::new("pushforward commutes with twisting");
    let big_car = Carrier::Abelian(big.clone());
    for i in 0..SAMPLES {
        let f = random_measure(&big_car, || small_padic(&mut rng, &proto, p - 1));
        let h = random_measure(&big_car, || small_padic(&mut rng, &proto, p - 1));
        // twists by characters of Delta, whose values lie in the ring
        let chi = &table[rng.gen_range(0..(p - 1) as usize)];
        let r = (|| -> Result<[(String, String); 3], String> {
            let lhs = f.pushforward(&pr).map_err(err)?.idempotent_split(1).map_err(err)?;
            let rhs = f
                .idempotent_split(1)
                .map_err(err)?
                .into_iter()
                .map(|(t, m)| m.pushforward(&pr1).map(|m| (t, m)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            let show = |v: &[(GroupChar, Measure<PadicNumber>)]| v.iter().map(|(t, m)| format!("{t}: {}", m.to_text())).collect::<Vec<_>>().join("; ");
            let c1 = f.convolve(&h).map_err(err)?.pushforward(&pr).map_err(err)?;
            let c2 = f.pushforward(&pr).map_err(err)?.convolve(&h.pushforward(&pr).map_err(err)?).map_err(err)?;
            let t1 = f.twist(&chi.pullback(&pr)).map_err(err)?.pushforward(&pr).map_err(err)?;
            let t2 = f.pushforward(&pr).map_err(err)?.twist(chi).map_err(err)?;
            Ok([(show(&lhs), show(&rhs)), (c1.to_text(), c2.to_text()), (t1.to_text(), t2.to_text())])
        })();
        match r {
            Ok([a, b, c]) => {
                split.record(a.0 == a.1, || a.0.clone(), || a.1.clone(), || i.to_string());
                conv.record(b.0 == b.1, || b.0.clone(), || b.1.clone(), || i.to_string());
                tw.record(c.0 == c.1, || c.0.clone(), || c.1.clone(), || format!("{i}, chi = {chi}"));
            }
            Err(e) => split.error(e),
        }
    }
    s.push(split.finish());
    s.push(conv.finish());
    s.push(tw.finish());

    // along the tower: components of the pushforward keep their augmentations
    for lvl in &env.tower.levels {
        let Some(proj) = &lvl.proj else { continue };
        let name = format!("tower level {} onto {}", lvl.n, lvl.n - 1);
        let mut smp = Sampler::new(name);
        let car = Carrier::Abelian(lvl.group.clone());
        for i in 0..5 {
            let f = random_measure(&car, || small_padic(&mut rng, &proto, p - 1));
            let r = f.pushforward(proj).and_then(|x| x.idempotent_split(lvl.delta_rank)).and_then(|a| f.idempotent_split(lvl.delta_rank).map(|b| (a, b)));
            match r {
                Ok((a, b)) => {
                    let la: Vec<_> = a.iter().map(|(t, m)| (t.clone(), m.augmentation())).collect();
                    let lb: Vec<_> = b.iter().map(|(t, m)| (t.clone(), m.augmentation())).collect();
                    smp.record(la == lb, || format!("{la:?}"), || format!("{lb:?}"), || i.to_string());
                }
                Err(e) => smp.error(e),
            }
        }
        s.push(smp.finish());
    }
    s
}

/// `span`: evaluation uses characters among the first `span` of the table,
/// whose values the coefficient ring contains.
fn roundtrip<R: Ring>(label: &str, g: &FinAbGroup, span: usize, mut coeff: impl FnMut() -> R) -> Check {
    let car = Carrier::Abelian(g.clone());
    let mut smp = Sampler::new(format!("split roundtrip, {label}"));
    let table = char_table(g);
    for i in 0..SAMPLES {
        let f = random_measure(&car, &mut coeff);
        let r = (|| -> Result<(bool, bool, bool), String> {
            let comps = f.idempotent_split(1).map_err(err)?;
            let back = Measure::assemble(g, 1, &comps).map_err(err)?;
            let fresh: Vec<_> = comps.iter().map(|(t, m)| (t.clone(), random_measure(m.carrier(), &mut coeff))).collect();
            let again = Measure::assemble(g, 1, &fresh).map_err(err)?.idempotent_split(1).map_err(err)?;
            let chi = &table[1 + i % (span - 1)];
            let theta = chi.restrict_coords(0..1);
            let chi1 = chi.restrict_coords(1..g.rank());
            let comp = &comps.iter().find(|(t, _)| *t == theta).ok_or("component missing")?.1;
            let eval = f.eval_char(chi).map_err(err)? == comp.eval_char(&chi1).map_err(err)?;
            Ok((back == f, again == fresh, eval))
        })();
        match r {
            Ok((a, b, c)) => smp.record(a && b && c, || format!("assemble(split f) = f: {a}, split(assemble) = id: {b}, evaluation: {c}"), || "all true".into(), || i.to_string()),
            Err(e) => smp.error(e),
        }
    }
    smp.finish()
}

/// L assembled from prescribed theta-measures on the cover evaluates to
/// Omega^-1 delta eps(sigma_delta)^-1 V at every character of G_n.
pub fn katz(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("katz");
    let p = env.cfg.p;
    let Some(lvl) = env.tower.levels.get(1) else {
        s.push(missing("katz", "a second level"));
        return s;
    };
    s.param("level", lvl.n);
    s.param("prescriptions", 20);
    let mut rng = env.rng("katz");
    let chars = char_table(&lvl.group);
    let m = p * (p - 1);
    let one = CycloNumber::one();
    for round in 0..20 {
        let psi: Vec<i64> = (0..lvl.group.rank() + 1).map(|_| rng.gen_range(0..m as i64)).collect();
        let a = loop {
            let a = rng.gen_range(2..p * p);
            if a % p != 0 {
                break a;
            }
        };
        let model = match KatzModel::new(lvl, p, 2, &psi, a) {
            Ok(x) => x,
            Err(e) => {
                s.push(Check::error(format!("prescription {round}"), e));
                continue;
            }
        };
        let delta = small_cyclo(&mut rng, m).add(&CycloNumber::from_int(11));
        let omega = scalar(&one, rng.gen_range(1..50) * p as i64 + 1, 1).expect("integer scalar");
        let mut presc: BTreeMap<GroupChar, BTreeMap<GroupChar, CycloNumber>> = BTreeMap::new();
        for chi in &chars {
            let (theta, eps) = model.eps(chi);
            presc.entry(theta).or_default().insert(eps, small_cyclo(&mut rng, m));
        }
        let cover_chars = char_table(&model.cover);
        let mut nus = Vec::new();
        let mut failed = None;
        for (theta, vals) in presc.iter_mut() {
            for _ in 0..4 {
                let c = cover_chars[rng.gen_range(0..cover_chars.len())].clone();
                vals.entry(c).or_insert_with(|| small_cyclo(&mut rng, m));
            }
            match fourier_invert(&model.cover, &one, |c| vals.get(c).cloned().unwrap_or_else(CycloNumber::zero)) {
                Ok(nu) => nus.push((theta.clone(), nu)),
                Err(e) => failed = Some(e.to_string()),
            }
        }
        let mu = match failed.map_or_else(|| model.assemble_l(&nus, &delta, &omega, p).map_err(err), Err) {
            Ok(mu) => mu,
            Err(e) => {
                s.push(Check::error(format!("prescription {round}"), e));
                continue;
            }
        };
        let mut smp = Sampler::new(format!("prescription {round}: eval(L, chi)"));
        let stride = if round == 0 { 1 } else { 7 };
        for chi in chars.iter().step_by(stride) {
            let (theta, eps) = model.eps(chi);
            let v = &presc[&theta][&eps];
            match (mu.eval_char(chi), model.expected(chi, v, &delta, &omega)) {
                (Ok(l), Ok(r)) => smp.record(l == r, || l.to_string(), || r.to_string(), || format!("chi = {chi}")),
                (Err(e), _) | (_, Err(e)) => smp.error(e),
            }
        }
        s.push(smp.finish());
        // a wrong delta must be detected
        let hit = chars.iter().find_map(|chi| {
            let (theta, eps) = model.eps(chi);
            let v = &presc[&theta][&eps];
            (!v.is_zero()).then_some((chi, v))
        });
        if let Some((chi, v)) = hit {
            let name = format!("prescription {round}: wrong delta rejected");
            let c = match (mu.eval_char(chi), model.expected(chi, v, &delta.add(&one), &omega)) {
                (Ok(l), Ok(w)) if l != w => Check::pass(name),
                (Ok(l), Ok(_)) => Check::fail(name, l.to_string(), "a different value"),
                (Err(e), _) | (_, Err(e)) => Check::error(name, e),
            };
            s.push(c);
        }
    }
    s
}
