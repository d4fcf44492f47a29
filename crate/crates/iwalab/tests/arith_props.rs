use iwalab::arith::{rat, teichmuller, CycloNumber, PadicExt, PadicNumber, QuadFieldElem, Ring, DISCRIMINANTS};
use num_rational::BigRational;
use proptest::prelude::*;

fn cyclo(m: u64, coeffs: &[i64]) -> CycloNumber {
    let c: Vec<BigRational> = coeffs.iter().map(|&x| rat(x, 1)).collect();
    CycloNumber::from_coeffs(m, &c).unwrap()
}

#[test]
fn teichmuller_matches_brute_force_mod_25() {
    for a in 1..5i64 {
        let oracle: Vec<u64> = (0..25u64).filter(|x| x.pow(4) % 25 == 1 && x % 5 == a as u64).collect();
        assert_eq!(oracle.len(), 1);
        assert_eq!(teichmuller(a, 5, 2).unwrap().residue(), Some(oracle[0]));
    }
}

#[test]
fn sqrt_minus_11_brute_force() {
    let ext = PadicExt::base(5, 2).unwrap();
    let d = iwalab::arith::padic_sqrt(&PadicNumber::from_int(&ext, -11)).unwrap();
    let oracle: Vec<u64> = (1..25u64).filter(|x| x * x % 25 == 14).collect();
    assert!(oracle.contains(&d.residue().unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn teichmuller_is_multiplicative(a in 1i64..7, b in 1i64..7, n in 1u32..8) {
        let ta = teichmuller(a, 7, n).unwrap();
        let tb = teichmuller(b, 7, n).unwrap();
        let tab = teichmuller(a * b % 7, 7, n).unwrap();
        prop_assert_eq!(ta.mul(&tb), tab);
    }

    #[test]
    fn embedding_is_a_ring_map(
        xs in prop::collection::vec(-20i64..20, 8),
        ys in prop::collection::vec(-20i64..20, 8),
    ) {
        // Q(zeta_20) into the degree-4 Eisenstein extension of Q_5
        let ext = PadicExt::eisenstein(5, 1, 6).unwrap();
        let x = cyclo(20, &xs);
        let y = cyclo(20, &ys);
        let ex = PadicNumber::embed_cyclo(&x, &ext).unwrap();
        let ey = PadicNumber::embed_cyclo(&y, &ext).unwrap();
        prop_assert_eq!(PadicNumber::embed_cyclo(&x.mul(&y), &ext).unwrap(), ex.mul(&ey));
        prop_assert_eq!(PadicNumber::embed_cyclo(&x.add(&y), &ext).unwrap(), ex.add(&ey));
    }

    #[test]
    fn unramified_embedding_is_a_ring_map(
        xs in prop::collection::vec(-9i64..9, 6),
        ys in prop::collection::vec(-9i64..9, 6),
    ) {
        // zeta_8 forces the quadratic unramified extension of Q_5
        let ext = PadicExt::for_conductor(5, 24, 5, None).unwrap();
        let x = cyclo(24, &xs);
        let y = cyclo(24, &ys);
        let ex = PadicNumber::embed_cyclo(&x, &ext).unwrap();
        let ey = PadicNumber::embed_cyclo(&y, &ext).unwrap();
        prop_assert_eq!(PadicNumber::embed_cyclo(&x.mul(&y), &ext).unwrap(), ex.mul(&ey));
    }

    #[test]
    fn quad_norm_is_multiplicative(
        di in 0usize..9,
        a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50,
        s in 1i64..9, t in 1i64..9,
    ) {
        let dk = DISCRIMINANTS[di];
        let x = QuadFieldElem::new(dk, rat(a, s), rat(b, t)).unwrap();
        let y = QuadFieldElem::new(dk, rat(c, t), rat(d, s)).unwrap();
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
    }

    #[test]
    fn cyclo_inverse(m in prop::sample::select(vec![3u64, 5, 8, 12, 20, 25]), xs in prop::collection::vec(-6i64..6, 1..10)) {
        let x = cyclo(m, &xs);
        prop_assume!(!x.is_zero());
        let y = x.try_inv().unwrap();
        prop_assert_eq!(x.mul(&y), CycloNumber::one());
    }

    #[test]
    fn padic_valuation_is_additive(a in 1i64..10_000, b in 1i64..10_000) {
        let ext = PadicExt::eisenstein(7, 1, 6).unwrap();
        let t = PadicNumber::uniformizer(&ext);
        let x = PadicNumber::from_int(&ext, a).mul(&t);
        let y = PadicNumber::from_int(&ext, b);
        if let (Some(vx), Some(vy)) = (x.valuation(), y.valuation()) {
            if let Some(vxy) = x.mul(&y).valuation() {
                prop_assert_eq!(vxy, vx + vy);
            }
        }
    }
}
