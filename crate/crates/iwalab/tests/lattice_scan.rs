use iwalab::arith::{rat, QuadFieldElem, DISCRIMINANTS};
use iwalab::cmlattice::*;
use proptest::prelude::*;

#[test]
fn nine_fields_in_maximal_mode() {
    for d in DISCRIMINANTS {
        let r = scan(d, None, Mode::Maximal).unwrap();
        assert!(r.pass(), "d = {d}: {r:?}");
        // purely imaginary tau never gives a lattice containing 1 when omega has rational part 1/2
        assert_eq!(r.empty(), d % 4 == 3, "d = {d}");
        eprintln!("d = {d}, p = {}, stable s' = {:?}", r.p, r.entries.iter().filter(|e| e.cm_stable).map(|e| e.s_prime).collect::<Vec<_>>());
    }
}

#[test]
fn nine_fields_in_paper_literal_mode() {
    for d in DISCRIMINANTS {
        let r = scan(d, None, Mode::PaperLiteral).unwrap();
        // Z + Z tau is stable under sqrt(-d) exactly when 1/s and d s are integers, i.e. every s' | d
        assert_eq!(r.stable_count(), r.entries.len(), "d = {d}");
        for e in &r.entries {
            assert!(e.s.as_ref().unwrap().pass(), "d = {d}, s' = {}", e.s_prime);
        }
        eprintln!(
            "d = {d}: alpha verdicts {:?}",
            r.entries.iter().map(|e| e.alpha.as_ref().unwrap().as_ref().map(|a| a.p_unit).map_err(|e| e.to_string())).collect::<Vec<_>>()
        );
    }
}

#[test]
fn smallest_split_primes() {
    let ps: Vec<u64> = DISCRIMINANTS.iter().map(|&d| smallest_split_prime(d)).collect();
    // by hand: -3 is a square mod 7, -4 mod 5, -7 mod 11, -8 mod 11, -11 mod 5, ...
    assert_eq!(&ps[..5], &[7, 5, 11, 11, 5]);
    assert_eq!(ps[8], 41);
}

fn tau_strategy() -> impl Strategy<Value = (u64, i64, i64, i64, i64)> {
    (0..9usize, -6i64..=6, 1i64..=6, (-6i64..=6).prop_filter("nonzero", |b| *b != 0), 1i64..=6)
        .prop_map(|(i, an, ad, bn, bd)| (DISCRIMINANTS[i], an, ad, bn, bd))
}

proptest! {
    #[test]
    fn stability_is_scale_invariant(t in tau_strategy(), qn in (-9i64..=9).prop_filter("nonzero", |q| *q != 0), qd in 1i64..=9, lit in any::<bool>()) {
        let (d, an, ad, bn, bd) = t;
        let mode = if lit { Mode::PaperLiteral } else { Mode::Maximal };
        let tau = QuadFieldElem::new(d, rat(an, ad), rat(bn, bd)).unwrap();
        let base = CmLattice::new(tau.clone(), mode).unwrap();
        let scaled = CmLattice::scaled(tau, rat(qn, qd), mode).unwrap();
        prop_assert_eq!(cm_stable(&base), cm_stable(&scaled));
    }

    #[test]
    fn generator_spans_the_lattice(i in 0..9usize, q in 1i64..=12) {
        let d = DISCRIMINANTS[i];
        let p = smallest_split_prime(d);
        prop_assume!(!(q as u64).is_multiple_of(p));
        let tau = if d.is_multiple_of(4) { QuadFieldElem::new(d, rat(0, 1), rat(1, 2)) } else { QuadFieldElem::new(d, rat(1, 2), rat(1, 2)) }.unwrap();
        let lat = CmLattice::scaled(tau, rat(q, 1), Mode::Maximal).unwrap();
        let r = solve_alpha(&lat, p).unwrap();
        prop_assert_eq!(r.norm, rat(q * q, 1));
        prop_assert!(r.p_unit);
    }
}
