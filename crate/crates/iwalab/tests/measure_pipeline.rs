use std::collections::BTreeMap;
use std::time::Instant;

use iwalab::arith::{rat, CycloNumber, PadicExt, PadicNumber, Ring};
use iwalab::chargroup::{char_table, CAction, FinAbGroup, GroupChar, GroupHom};
use iwalab::grpring::{build_theta_component, fourier_invert, scalar, Carrier, KatzModel, Measure, ThetaData};
use iwalab::reps::{classify_irreps, restrict, ArtinRep, Metabelian};
use iwalab::tower::standard_split_tower;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_cyclo(rng: &mut ChaCha8Rng, m: u64) -> CycloNumber {
    let mut x = CycloNumber::zero();
    for _ in 0..2 {
        let t = CycloNumber::root(m, rng.gen_range(0..m as i64)).scale(&rat(rng.gen_range(-3..=3), 1));
        x = x.try_add(&t).unwrap();
    }
    x
}

fn small_padic(rng: &mut ChaCha8Rng, proto: &PadicNumber, m: u64) -> PadicNumber {
    let mut x = proto.zero_like();
    for _ in 0..2 {
        let z = proto.root_of_unity(m, rng.gen_range(0..m as i64)).unwrap();
        x = x.add(&z.mul(&proto.from_int(rng.gen_range(-40..=40))));
    }
    x
}

fn random_measure<R: Ring>(carrier: &Carrier, mut coeff: impl FnMut() -> R) -> Measure<R> {
    let coeffs = (0..carrier.order()).map(|_| coeff()).collect();
    Measure::from_coeffs(carrier.clone(), coeffs).unwrap()
}

fn ab(orders: &[u64]) -> Carrier {
    Carrier::Abelian(FinAbGroup::new(orders).unwrap())
}

fn ab_group(c: &Carrier) -> &FinAbGroup {
    match c {
        Carrier::Abelian(g) => g,
        Carrier::Metabelian(_) => unreachable!(),
    }
}

#[test]
fn convolution_and_evaluation() {
    let c3 = ab(&[3]);
    let one = CycloNumber::one();
    let f = Measure::delta(c3.clone(), 0, one.clone()).add(&Measure::delta(c3.clone(), 1, one.clone())).unwrap();
    let sq = f.convolve(&f).unwrap();
    assert_eq!(sq.coeffs(), &[CycloNumber::from_int(1), CycloNumber::from_int(2), CycloNumber::from_int(1)]);
    let da = Measure::delta(c3.clone(), 1, one.clone());
    let db = Measure::delta(c3.clone(), 2, one.clone());
    assert_eq!(da.convolve(&db).unwrap(), Measure::delta(c3.clone(), 0, one.clone()));

    let car = ab(&[5, 5]);
    let g = ab_group(&car).clone();
    let table = char_table(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let f = random_measure(&car, || small_cyclo(&mut rng, 5));
        let h = random_measure(&car, || small_cyclo(&mut rng, 5));
        let chi = &table[rng.gen_range(0..table.len())];
        let lhs = f.convolve(&h).unwrap().eval_char(chi).unwrap();
        let rhs = f.eval_char(chi).unwrap().mul(&h.eval_char(chi).unwrap());
        assert_eq!(lhs, rhs);
        assert_eq!(f.eval_char(&table[0]).unwrap(), f.augmentation());
        // twist: eval(tw(f, chi), psi) = eval(f, psi chi^-1)
        let psi = &table[rng.gen_range(0..table.len())];
        let direct: CycloNumber = g
            .elements()
            .enumerate()
            .fold(CycloNumber::zero(), |acc, (i, x)| {
                acc.add(&f.coeff(i).mul(&psi.mul(&chi.inv()).value(&x)))
            });
        assert_eq!(f.twist(chi).unwrap().eval_char(psi).unwrap(), direct);
    }
    assert_eq!(sq.twist(&table[0]).unwrap(), sq);
}

#[test]
fn fourier_completeness() {
    let car = ab(&[3, 4]);
    let g = ab_group(&car).clone();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let f = random_measure(&car, || small_cyclo(&mut rng, 12));
        let vals: BTreeMap<GroupChar, CycloNumber> =
            char_table(&g).into_iter().map(|c| (c.clone(), f.eval_char(&c).unwrap())).collect();
        let back = fourier_invert(&g, &CycloNumber::one(), |c| vals[c].clone()).unwrap();
        assert_eq!(back, f);
    }
}

fn dihedral5() -> Metabelian {
    let g = FinAbGroup::cyclic(5);
    Metabelian::new(g.clone(), CAction::new(&g, vec![vec![-1]]).unwrap())
}

/// eval_rep(extend(f), rho) against the product over Res rho of eval_char(f, .).
fn extended_measure_lemma<R: Ring>(grp: &Metabelian, mut coeff: impl FnMut() -> R) -> usize {
    let car = Carrier::Abelian(grp.g.clone());
    let irreps = classify_irreps(grp);
    let mut checked = 0;
    for _ in 0..100 {
        let f = random_measure(&car, &mut coeff);
        let ext = f.extend_trivially(grp).unwrap();
        for rho in &irreps {
            let lhs = ext.eval_rep(rho).unwrap();
            let rhs = restrict(rho)
                .iter()
                .fold(f.augmentation().one_like(), |acc, chi| acc.mul(&f.eval_char(chi).unwrap()));
            assert_eq!(lhs, rhs, "rho = {rho}");
            checked += 1;
        }
    }
    checked
}

#[test]
fn extended_measure_lemma_cyclotomic_and_padic() {
    let t = Instant::now();
    let grp = dihedral5();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = extended_measure_lemma(&grp, || small_cyclo(&mut rng, 5));
    assert_eq!(n, 400);
    let ext = PadicExt::for_conductor(5, 5, 8, None).unwrap();
    let proto = PadicNumber::from_int(&ext, 1);
    let n = extended_measure_lemma(&grp, || small_padic(&mut rng, &proto, 5));
    assert_eq!(n, 400);
    // delta_g on G against Ind chi: chi(g) chi^c(g)
    let car = Carrier::Abelian(grp.g.clone());
    for rho in classify_irreps(&grp).iter().filter(|r| r.is_type_b()) {
        let ArtinRep::Induced { chi, chi_c } = rho else { unreachable!() };
        let d = Measure::delta(car.clone(), 2, CycloNumber::one()).extend_trivially(&grp).unwrap();
        assert_eq!(d.eval_rep(rho).unwrap(), chi.value(&[2]).mul(&chi_c.value(&[2])));
    }
    assert!(t.elapsed().as_secs() < 10);
}

fn split_roundtrips<R: Ring>(car: &Carrier, dr: usize, mut coeff: impl FnMut() -> R) {
    let g = ab_group(car);
    for _ in 0..100 {
        let f = random_measure(car, &mut coeff);
        let comps = f.idempotent_split(dr).unwrap();
        assert_eq!(Measure::assemble(g, dr, &comps).unwrap(), f);
        // the other direction, on a fresh family of components
        let fresh: Vec<_> = comps
            .iter()
            .map(|(theta, m)| (theta.clone(), random_measure(m.carrier(), &mut coeff)))
            .collect();
        let again = Measure::assemble(g, dr, &fresh).unwrap().idempotent_split(dr).unwrap();
        assert_eq!(again, fresh);
        // eval(f, theta chi_1) = eval(comp_theta, chi_1)
        let chi = &char_table(g)[1];
        let theta = chi.restrict_coords(0..dr);
        let chi1 = chi.restrict_coords(dr..g.rank());
        let comp = &comps.iter().find(|(t, _)| *t == theta).unwrap().1;
        assert_eq!(f.eval_char(chi).unwrap(), comp.eval_char(&chi1).unwrap());
    }
}

#[test]
fn idempotent_decomposition() {
    let t = Instant::now();
    let one = CycloNumber::one();
    // Delta = Z/2, f = delta_sigma: components +delta_e and -delta_e
    let car = ab(&[2, 5]);
    let f = Measure::delta(car.clone(), 1, one.clone());
    let comps = f.idempotent_split(1).unwrap();
    assert_eq!(comps[0].1.coeffs()[0], one);
    assert_eq!(comps[1].1.coeffs()[0], one.neg());
    let e = Measure::delta(car.clone(), 0, one.clone());
    assert!(e.idempotent_split(1).unwrap().iter().all(|(_, m)| *m == Measure::delta(m.carrier().clone(), 0, one.clone())));

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    split_roundtrips(&car, 1, || small_cyclo(&mut rng, 10));
    let ext = PadicExt::base(5, 8).unwrap();
    let proto = PadicNumber::from_int(&ext, 1);
    split_roundtrips(&ab(&[4, 25]), 1, || small_padic(&mut rng, &proto, 4));

    // pushforward along Z/4 x Z/25 -> Z/4 x Z/5 commutes with the split
    let big = FinAbGroup::new(&[4, 25]).unwrap();
    let small = FinAbGroup::new(&[4, 5]).unwrap();
    let pr = GroupHom::new(&big, &small, vec![vec![1, 0], vec![0, 1]]).unwrap();
    let pr1 = GroupHom::new(&FinAbGroup::cyclic(25), &FinAbGroup::cyclic(5), vec![vec![1]]).unwrap();
    for _ in 0..100 {
        let f = random_measure(&Carrier::Abelian(big.clone()), || small_padic(&mut rng, &proto, 4));
        let lhs = f.pushforward(&pr).unwrap().idempotent_split(1).unwrap();
        let rhs: Vec<_> = f
            .idempotent_split(1)
            .unwrap()
            .into_iter()
            .map(|(t, m)| (t, m.pushforward(&pr1).unwrap()))
            .collect();
        assert_eq!(lhs, rhs);
        // convolution and twist commute with the pushforward too
        let h = random_measure(&Carrier::Abelian(big.clone()), || small_padic(&mut rng, &proto, 4));
        assert_eq!(
            f.convolve(&h).unwrap().pushforward(&pr).unwrap(),
            f.pushforward(&pr).unwrap().convolve(&h.pushforward(&pr).unwrap()).unwrap()
        );
        let chi = &char_table(&small)[rng.gen_range(0..4)];
        assert_eq!(
            f.twist(&chi.pullback(&pr)).unwrap().pushforward(&pr).unwrap(),
            f.pushforward(&pr).unwrap().twist(chi).unwrap()
        );
    }
    // the standard tower, level 2 onto level 1
    let tower = standard_split_tower(5, None, 2);
    let l2 = &tower.levels[1];
    let proj = l2.proj.as_ref().unwrap();
    for _ in 0..5 {
        let f = random_measure(&Carrier::Abelian(l2.group.clone()), || small_padic(&mut rng, &proto, 4));
        let lhs = f.pushforward(proj).unwrap().idempotent_split(2).unwrap();
        let rhs = f.idempotent_split(2).unwrap();
        for ((t1, a), (t2, b)) in lhs.iter().zip(&rhs) {
            assert_eq!(t1, t2);
            assert_eq!(a.augmentation(), b.augmentation());
        }
    }
    assert!(t.elapsed().as_secs() < 10);
}

#[test]
fn unit_criterion() {
    let ext = PadicExt::base(5, 10).unwrap();
    let one = PadicNumber::from_int(&ext, 1);
    let car = ab(&[4, 5]);
    let e = Measure::delta(car.clone(), 0, one.clone());
    assert_eq!(e.is_unit(5, 1).unwrap().unwrap(), e);
    assert!(e.scale(&one.from_int(5)).is_unit(5, 1).unwrap().is_none());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut units = 0;
    for _ in 0..30 {
        let f = random_measure(&car, || small_padic(&mut rng, &one, 4));
        if let Some(inv) = f.is_unit(5, 1).unwrap() {
            assert_eq!(f.convolve(&inv).unwrap(), e);
            units += 1;
        } else {
            let comps = f.idempotent_split(1).unwrap();
            assert!(comps.iter().any(|(_, m)| !m.augmentation().is_unit()));
        }
    }
    assert!(units > 0);
}

#[test]
fn theta_component_examples() {
    let tower = standard_split_tower(5, None, 2);
    let lvl = &tower.levels[1];
    let model = KatzModel::new(lvl, 5, 2, &[0, 0, 0, 0, 0], 1).unwrap();
    let one = CycloNumber::one();
    let cov = Carrier::Abelian(model.cover.clone());
    let triv = GroupChar::trivial(&model.cover);
    let e = Measure::delta(cov.clone(), 0, one.clone());
    let ident = model.cover.identity();
    let data = ThetaData { kappa: &triv, delta: &one, sigma: &ident, kernel_label: "kernel", omega: &one, p: 5, pr: &model.pr };
    let mu = build_theta_component(&e, &data).unwrap();
    assert_eq!(mu, Measure::delta(Carrier::Abelian(model.pr.dst.clone()), 0, one.clone()));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let kappa = GroupChar::new(&model.cover, &[1, 3, 1, 2, 4]);
    let delta = small_cyclo(&mut rng, 5).add(&CycloNumber::from_int(7));
    let omega = CycloNumber::from_int(3);
    let data = ThetaData { kappa: &kappa, delta: &delta, sigma: &model.sigma, kernel_label: "kernel", omega: &omega, p: 5, pr: &model.pr };
    let sigma_inv = model.cover.inv(&model.sigma);
    for _ in 0..20 {
        let gi = rng.gen_range(0..model.cover.order() as usize);
        let g = model.cover.elem(gi);
        let mu = build_theta_component(&Measure::delta(cov.clone(), gi, one.clone()), &data).unwrap();
        let y = model.cover.op(&g, &sigma_inv);
        let want = omega.try_inv().unwrap().mul(&delta).mul(&kappa.inv().value(&y));
        let h = model.pr.dst.index(&model.pr.apply(&y));
        assert_eq!(mu, Measure::delta(mu.carrier().clone(), h, want));
    }
    for _ in 0..5 {
        let a = random_measure(&cov, || small_cyclo(&mut rng, 4));
        let b = random_measure(&cov, || small_cyclo(&mut rng, 4));
        let lhs = build_theta_component(&a.add(&b).unwrap(), &data).unwrap();
        let rhs = build_theta_component(&a, &data).unwrap().add(&build_theta_component(&b, &data).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
    // sigma_delta outside the inertia at p, and a non-unit Omega
    let mut bad = model.cover.identity();
    bad[0] = 1;
    let d2 = ThetaData { sigma: &bad, ..data.clone() };
    assert!(build_theta_component(&e, &d2).is_err());
    let five = CycloNumber::from_int(5);
    let d3 = ThetaData { omega: &five, ..data };
    assert!(build_theta_component(&e, &d3).is_err());
}

#[test]
fn synthetic_katz_pipeline_at_level_p_squared() {
    let t = Instant::now();
    let tower = standard_split_tower(5, None, 2);
    let lvl = &tower.levels[1];
    let g = &lvl.group;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let chars = char_table(g);
    for round in 0..20 {
        let psi: Vec<i64> = (0..5).map(|_| rng.gen_range(0..20)).collect();
        let a = loop {
            let a = rng.gen_range(2..25u64);
            if a % 5 != 0 {
                break a;
            }
        };
        let model = KatzModel::new(lvl, 5, 2, &psi, a).unwrap();
        let delta = small_cyclo(&mut rng, 20).add(&CycloNumber::from_int(11));
        let omega = scalar(&CycloNumber::one(), rng.gen_range(1..50) * 5 + 1, 1).unwrap();
        // prescribed values on the characters the formula reads, plus noise elsewhere
        let mut presc: BTreeMap<GroupChar, BTreeMap<GroupChar, CycloNumber>> = BTreeMap::new();
        for chi in &chars {
            let (theta, eps) = model.eps(chi);
            presc.entry(theta).or_default().insert(eps, small_cyclo(&mut rng, 20));
        }
        let cover_chars = char_table(&model.cover);
        let mut nus = Vec::new();
        for (theta, vals) in presc.iter_mut() {
            for _ in 0..4 {
                let c = cover_chars[rng.gen_range(0..cover_chars.len())].clone();
                vals.entry(c).or_insert_with(|| small_cyclo(&mut rng, 20));
            }
            let nu = fourier_invert(&model.cover, &CycloNumber::one(), |c| {
                vals.get(c).cloned().unwrap_or_else(CycloNumber::zero)
            })
            .unwrap();
            nus.push((theta.clone(), nu));
        }
        let mu = model.assemble_l(&nus, &delta, &omega, 5).unwrap();
        let stride = if round == 0 { 1 } else { 7 };
        for chi in chars.iter().step_by(stride) {
            let (theta, eps) = model.eps(chi);
            let v = &presc[&theta][&eps];
            assert_eq!(mu.eval_char(chi).unwrap(), model.expected(chi, v, &delta, &omega).unwrap(), "chi = {chi}");
        }
        // a wrong delta is caught
        let (chi, theta, eps) = loop {
            let chi = &chars[rng.gen_range(0..chars.len())];
            let (theta, eps) = model.eps(chi);
            if !presc[&theta][&eps].is_zero() {
                break (chi, theta, eps);
            }
        };
        let wrong = model.expected(chi, &presc[&theta][&eps], &delta.add(&CycloNumber::one()), &omega).unwrap();
        assert_ne!(mu.eval_char(chi).unwrap(), wrong);
    }
    assert!(t.elapsed().as_secs() < 20, "{:?}", t.elapsed());
}
