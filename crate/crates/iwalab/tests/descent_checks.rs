use std::collections::BTreeMap;
use std::time::Instant;

use iwalab::arith::{rat, CycloNumber, PadicExt, PadicNumber, Ring};
use iwalab::chargroup::{char_table, CAction, FinAbGroup, GroupHom};
use iwalab::descent::*;
use iwalab::grpring::{Carrier, Measure};
use iwalab::reps::{classify_irreps, ArtinRep, Metabelian};
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

#[test]
fn hom_description_examples_and_roundtrip() {
    let g = FinAbGroup::cyclic(5);
    let one = CycloNumber::one();
    let e = Measure::delta(Carrier::Abelian(g.clone()), 0, one.clone());
    assert!(hom_description(&e).unwrap().entries.iter().all(|(_, v)| *v == one));
    let dg = Measure::delta(Carrier::Abelian(g.clone()), 2, one.clone());
    for (chi, v) in hom_description(&dg).unwrap().entries {
        assert_eq!(v, chi.value(&[2]));
    }
    let g = FinAbGroup::new(&[5, 5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let entries = char_table(&g).into_iter().map(|c| (c, small_cyclo(&mut rng, 5))).collect();
        let v = ValueVector { entries };
        let f = fourier_invert_vector(&g, &v).unwrap();
        assert_eq!(hom_description(&f).unwrap(), v);
    }
    // p-adically |G| = 5 is not invertible at p = 5, but is at p = 11
    let ext = PadicExt::for_conductor(5, 5, 6, None).unwrap();
    let v = ValueVector { entries: char_table(&FinAbGroup::cyclic(5)).into_iter().map(|c| (c, PadicNumber::from_int(&ext, 1))).collect() };
    assert!(fourier_invert_vector(&FinAbGroup::cyclic(5), &v).is_err());
    let ext = PadicExt::for_conductor(11, 5, 6, None).unwrap();
    let g5 = FinAbGroup::cyclic(5);
    let f = Measure::from_coeffs(Carrier::Abelian(g5.clone()), (0..5).map(|i| PadicNumber::from_int(&ext, 3 * i - 4)).collect()).unwrap();
    assert_eq!(fourier_invert_vector(&g5, &hom_description(&f).unwrap()).unwrap(), f);
}

#[test]
fn hom_description_is_a_ring_map() {
    let g = FinAbGroup::new(&[4, 5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rand_m = |rng: &mut ChaCha8Rng| {
        Measure::from_coeffs(Carrier::Abelian(g.clone()), (0..20).map(|_| CycloNumber::from_int(rng.gen_range(-4..=4))).collect()).unwrap()
    };
    for _ in 0..100 {
        let (a, b) = (rand_m(&mut rng), rand_m(&mut rng));
        let (va, vb, vab) = (hom_description(&a).unwrap(), hom_description(&b).unwrap(), hom_description(&a.convolve(&b).unwrap()).unwrap());
        for ((x, y), z) in va.entries.iter().zip(&vb.entries).zip(&vab.entries) {
            assert_eq!(x.1.mul(&y.1), z.1);
        }
    }
}

fn lcg(seed: u64) -> impl FnMut() -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    move || r.gen()
}

#[test]
fn galois_descent_at_three_levels() {
    let start = Instant::now();
    for e in 1..=3u32 {
        let model = DModel::new(5, 4, e, 12).unwrap();
        let g = FinAbGroup::new(&[4, 5u64.pow(e)]).unwrap();
        let mut next = lcg(e as u64);
        for _ in 0..100 {
            let v = equivariant_vector(&model, &g, &mut next).unwrap();
            let f = d_fourier_invert(&model, &g, &v).unwrap();
            let verdict = fix_lemma_check(&model, &f).unwrap();
            assert!(verdict.hypothesis && verdict.conclusion, "{verdict:?}");
        }
        // an unramified direction on one orbit is seen on both sides
        let mut v = equivariant_vector(&model, &g, &mut next).unwrap();
        for chi in (1..5u64.pow(e)).filter(|c| c % 5 != 0) {
            let j = g.index(&[0, chi]);
            v[j][1] = (v[j][1] + 7 * g.order()) % model.modulus();
        }
        assert!(equivariance_witness(&model, &g, &v).is_none());
        let f = d_fourier_invert(&model, &g, &v).unwrap();
        let verdict = fix_lemma_check(&model, &f).unwrap();
        assert!(!verdict.hypothesis && !verdict.conclusion && verdict.d_measure, "{verdict:?}");
        // breaking equivariance leaves the D-measures
        let mut v = equivariant_vector(&model, &g, &mut next).unwrap();
        let j = g.index(&[0, 1]);
        v[j][model.f] = (v[j][model.f] + g.order()) % model.modulus();
        assert!(equivariance_witness(&model, &g, &v).is_some());
        let f = d_fourier_invert(&model, &g, &v).unwrap();
        let verdict = fix_lemma_check(&model, &f).unwrap();
        assert!(!verdict.d_measure && !verdict.conclusion);
    }
    eprintln!("descent levels: {:?}", start.elapsed());
}

/// Z/p^n x Z/p^n with c swapping the factors, Gamma = Z/p^n by the sum.
fn swap_model(p: u64, n: u32) -> (Metabelian, GroupHom) {
    let q = p.pow(n);
    let g = FinAbGroup::new(&[q, q]).unwrap();
    let c = CAction::new(&g, vec![vec![0, 1], vec![1, 0]]).unwrap();
    let gamma = GroupHom::new(&g, &FinAbGroup::cyclic(q), vec![vec![1, 1]]).unwrap();
    (Metabelian::new(g, c), gamma)
}

fn random_unit<R: Ring>(grp: &Metabelian, proto: &R, rng: &mut ChaCha8Rng) -> Measure<R> {
    // delta_x (1 + 5 r): a unit for every coefficient ring in which 5 is topologically nilpotent
    let n = grp.order() as usize;
    let mut cs = vec![proto.zero_like(); n];
    for c in cs.iter_mut().take(3) {
        *c = proto.from_int(5 * rng.gen_range(-2..=2));
    }
    cs[0] = cs[0].add(&proto.one_like());
    let car = Carrier::Metabelian(grp.clone());
    let r = Measure::from_coeffs(car.clone(), cs).unwrap();
    Measure::delta(car, rng.gen_range(0..n), proto.one_like()).convolve(&r).unwrap()
}

#[test]
fn det_is_multiplicative_and_diagonal() {
    let (grp, _) = swap_model(5, 1);
    let irreps = classify_irreps(&grp);
    let car = Carrier::Metabelian(grp.clone());
    let one = CycloNumber::one();
    let e = Measure::delta(car.clone(), 0, one.clone());
    assert!(det_map(&e, &irreps).unwrap().entries.iter().all(|(_, v)| *v == one));
    let g = vec![2, 3];
    let dg = Measure::delta(car.clone(), grp.index(&g, 0), one.clone());
    for (rho, v) in det_map(&dg, &irreps).unwrap().entries {
        if let ArtinRep::Induced { chi, chi_c } = rho {
            assert_eq!(v, chi.value(&g).try_mul(&chi_c.value(&g)).unwrap());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (u, w) = (random_unit(&grp, &one, &mut rng), random_unit(&grp, &one, &mut rng));
        let (du, dw, duw) = (det_map(&u, &irreps).unwrap(), det_map(&w, &irreps).unwrap(), det_map(&u.convolve(&w).unwrap(), &irreps).unwrap());
        for ((a, b), c) in du.entries.iter().zip(&dw.entries).zip(&duw.entries) {
            assert_eq!(a.1.mul(&b.1), c.1);
        }
    }
    // Galois equivariance: Det(sigma u)(sigma rho) = sigma Det(u)(rho)
    let u = random_unit(&grp, &one, &mut rng).convolve(&Measure::delta(car.clone(), 1, CycloNumber::root(5, 1))).unwrap();
    let su = Measure::from_coeffs(car, u.coeffs().iter().map(|c| c.galois(2)).collect()).unwrap();
    let frob = Frobenius { a: 2, modulus: 5 };
    for (rho, v) in det_map(&u, &irreps).unwrap().entries {
        assert_eq!(su.eval_rep(&frob.on_rep(&rho)).unwrap(), v.galois(2));
    }
    assert!(det_map(&Measure::zero(Carrier::Metabelian(grp.clone()), &one), &irreps).is_err());
}

#[test]
fn ev_of_det_is_det() {
    let (grp, gamma) = swap_model(5, 1);
    let one = CycloNumber::one();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let u = random_unit(&grp, &one, &mut rng);
        let fam = det_family(&grp, &gamma, &u).unwrap();
        for (rho, v) in det_map(&u, &classify_irreps(&grp)).unwrap().entries {
            assert_eq!(ev(&fam[&rho]), v);
        }
    }
}

#[test]
fn ev_injectivity() {
    let (grp, gamma) = swap_model(5, 1);
    let one = CycloNumber::one();
    let car = Carrier::Metabelian(grp.clone());
    // f = delta_e everywhere
    let fam = det_family(&grp, &gamma, &Measure::delta(car.clone(), 0, one.clone())).unwrap();
    let v = ev_injectivity_check(&grp, &gamma, &fam).unwrap();
    assert!(v.ev_trivial && v.pass());
    // one nontrivial twist orbit
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u = random_unit(&grp, &one, &mut rng);
    let full = det_family(&grp, &gamma, &u).unwrap();
    let irreps = classify_irreps(&grp);
    let rho0 = irreps.iter().find(|r| r.is_type_b()).unwrap().clone();
    let orbit: Vec<ArtinRep> = char_table(&gamma.dst).iter().map(|c| twist_rep(&grp, &gamma, &irreps, &rho0, c).unwrap()).collect();
    let de = Measure::delta(Carrier::Abelian(gamma.dst.clone()), 0, one.clone());
    let fam: BTreeMap<_, _> = irreps.iter().map(|r| (r.clone(), if orbit.contains(r) { full[r].clone() } else { de.clone() })).collect();
    let v = ev_injectivity_check(&grp, &gamma, &fam).unwrap();
    assert!(!v.ev_trivial && v.pass(), "{v:?}");
    // breaking twist invariance is reported with a witness
    let mut bad = fam.clone();
    bad.insert(rho0.clone(), de.clone());
    assert!(matches!(ev_injectivity_check(&grp, &gamma, &bad), Err(DescentError::NotTwistInvariant { .. })));
    // random families at level 5^2 over a 5-adic ring
    let (grp, gamma) = swap_model(5, 2);
    let ext = PadicExt::for_conductor(5, 25, 4, None).unwrap();
    let proto = PadicNumber::from_int(&ext, 0);
    for _ in 0..2 {
        let u = random_unit(&grp, &proto, &mut rng);
        let fam = det_family(&grp, &gamma, &u).unwrap();
        let v = ev_injectivity_check(&grp, &gamma, &fam).unwrap();
        assert!(v.pass() && v.reconstructed.is_none(), "{v:?}");
    }
}

#[test]
fn taylor_search_outcomes() {
    // Z/5 x| Z/2 with c acting by inversion
    let g = FinAbGroup::cyclic(5);
    let grp = Metabelian::new(g.clone(), CAction::new(&g, vec![vec![-1]]).unwrap());
    let car = Carrier::Metabelian(grp.clone());
    let frob = Frobenius::unramified(5, 2, 1);
    let u = Measure::delta(car.clone(), 3, CycloNumber::from_int(3));
    let r = taylor_sampling(&grp, &u, &frob, 1).unwrap();
    assert_eq!(r.found.as_ref(), Some(&u));
    assert!(r.verified && r.experimental);
    // v * Frob(v) with genuinely unramified coefficients: Det is Frobenius-invariant
    let z = CycloNumber::root(24, 1);
    let a = z.try_add(&CycloNumber::from_int(2)).unwrap();
    let v = Measure::delta(car.clone(), grp.index(&[1], 0), a.clone())
        .add(&Measure::delta(car.clone(), grp.index(&[0], 1), CycloNumber::one()))
        .unwrap();
    let u = v.convolve(&frob.apply_measure(&v).unwrap()).unwrap();
    assert!(!frob.is_rational(&u));
    let r = taylor_sampling(&grp, &u, &frob, 2).unwrap();
    eprintln!("taylor: found = {}, strategy = {:?}, candidates = {}", r.found.is_some(), r.strategy, r.candidates);
    assert!(r.found.is_none() || r.verified);
    // a non-invariant Det is refused
    assert!(matches!(taylor_sampling(&grp, &v, &frob, 1), Err(DescentError::NotInvariant(_))));
}
