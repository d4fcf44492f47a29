use iwalab::chargroup::{char_table, GroupChar};
use iwalab::grpring::Carrier;
use iwalab::reps::{classify_irreps, ArtinRep, Metabelian};
use iwalab::symratio::*;
use iwalab::tower::standard_split_tower;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn level(n: u32) -> Metabelian {
    standard_split_tower(5, Some(4), n).levels[n as usize - 1].metabelian()
}

#[test]
fn elliptic_ratios_at_level_one() {
    let grp = level(1);
    let ctx = Ctx::elliptic(&grp);
    let irreps = classify_irreps(&grp);
    assert_eq!(irreps.len(), 14);
    for rho in &irreps {
        for v in [MeasureVariant::L, MeasureVariant::LPrime] {
            let r = elliptic_ratio(&ctx, rho, v).unwrap();
            assert!(r.ok(), "{r}");
            let want = match rho {
                ArtinRep::Induced { .. } => "alpha^2*tau",
                ArtinRep::TypeA { sign: 1, .. } => "alpha",
                _ => "alpha*tau",
            };
            assert_eq!(r.value.to_text(), want);
            assert!(r.trace.iter().any(|s| s.rule == "inductivity"));
        }
    }
}

#[test]
fn elliptic_ratios_sampled_at_level_two() {
    let grp = level(2);
    let ctx = Ctx::elliptic(&grp);
    for rho in classify_irreps(&grp).iter().step_by(17) {
        let r = elliptic_ratio(&ctx, rho, MeasureVariant::L).unwrap();
        assert!(r.ok(), "{r}");
    }
}

#[test]
fn period_change_closes_the_chain() {
    let grp = level(1);
    let ctx = Ctx::elliptic(&grp);
    let lo = build_l_omega(&grp, 2).unwrap();
    for rho in classify_irreps(&grp) {
        let r = elliptic_product_check(&ctx, &rho, &lo).unwrap();
        assert!(r.ok(), "{r}");
    }
}

#[test]
fn conj2_rhs_at_trivial_rep() {
    let grp = level(1);
    let ctx = Ctx::elliptic(&grp);
    let triv = GroupChar::trivial(&grp.g);
    let rho = ArtinRep::TypeA { chi: triv.clone(), sign: 1 };
    let got = ctx.build_conj2_rhs(&rho).unwrap();
    let l = SymExpr::atom(Atom::L(LSym::Artin { motive: Motive::E, rho: rho.clone(), s: 1, imprimitive: true }));
    let u_inv = SymExpr::mono(&[(Atom::U, -1)]);
    let w_inv = SymExpr::mono(&[(Atom::W, -1)]);
    let want = l
        .mul(&SymExpr::mono(&[(Atom::OmegaPlus, -1)]))
        .mul(&SymExpr::one().sub(&u_inv))
        .try_div(&SymExpr::one().sub(&w_inv))
        .unwrap();
    assert!(got.equals(&want), "{got}");
    // denominators by type
    let minus = ArtinRep::TypeA { chi: triv, sign: -1 };
    assert!(ctx.build_conj2_rhs(&minus).unwrap().atoms().contains(&Atom::OmegaMinus));
    let b = classify_irreps(&grp).into_iter().find(|r| r.is_type_b()).unwrap();
    let atoms = ctx.build_conj2_rhs(&b).unwrap().atoms();
    assert!(atoms.contains(&Atom::OmegaPlus) && atoms.contains(&Atom::OmegaMinus));
}

#[test]
fn gamma_ratio_values() {
    assert!(gamma_ratio(2, 0).unwrap().is_one());
    assert!(gamma_ratio(4, -1).unwrap().is_one());
    assert!(gamma_ratio(3, 0).unwrap().equals(&SymExpr::atom(Atom::TwoPi)));
    for k in 2..=6 {
        for j in -3..=0 {
            if k - 1 + j <= 0 {
                assert!(matches!(gamma_ratio(k, j), Err(SymError::Pole(_))));
                continue;
            }
            assert!(gamma_ratio(k, j).unwrap().equals(&gamma_ratio_closed(k, j).unwrap()));
        }
    }
    assert!(matches!(gamma_ratio(3, 1), Err(SymError::Range(_))));
}

#[test]
fn lcm1_at_weight_two_is_the_elliptic_formula_times_i() {
    let grp = level(1);
    let ctx = Ctx::elliptic(&grp);
    for chi in char_table(&grp.g) {
        let a = ctx.build_measure_rhs(&chi, MeasureVariant::Lcm1, 0).unwrap();
        let b = ctx.build_measure_rhs(&chi, MeasureVariant::LPrime, 0).unwrap();
        let r = ctx.reduce_ratio(&a, &b, &Rule::DEFAULT).unwrap().value;
        assert!(r.equals(&SymExpr::i_unit()), "{chi}: {r}");
    }
    assert!(matches!(ctx.build_measure_rhs(&GroupChar::trivial(&grp.g), MeasureVariant::Lcm1, 1), Err(SymError::Range(_))));
}

#[test]
fn lcm1_shifted_arguments() {
    let grp = level(1);
    let chi = GroupChar::trivial(&grp.g);
    // k = 2, j = -1 puts Gamma(k-1+j) at its pole
    let ctx = Ctx::weight(&grp, 2);
    assert!(matches!(ctx.build_measure_rhs(&chi, MeasureVariant::Lcm1, -1), Err(SymError::Pole(0))));
    let ctx = Ctx::weight(&grp, 3);
    let got = ctx.build_measure_rhs(&chi, MeasureVariant::Lcm1, -1).unwrap();
    let want = SymExpr::atom(Atom::L(LSym::Hecke { gr: Gross::PsiBar, chi: chi.clone(), s: 1, imprimitive: false }));
    // Gamma(1) = 1, i^1, (2pi)^1 / Omega_inf^2, P_P(1, w/p^2) P_Pbar(1, u^-1 p)
    let want = want
        .mul(&SymExpr::i_unit())
        .mul(&SymExpr::mono(&[(Atom::TwoPi, 1), (Atom::OmegaInf, -2)]))
        .mul(&SymExpr::one().sub(&SymExpr::mono(&[(Atom::W, 1), (Atom::P, -2)])))
        .mul(&SymExpr::one().sub(&SymExpr::mono(&[(Atom::U, -1), (Atom::P, 1)])));
    assert!(got.equals(&want), "{got}");
}

#[test]
fn weight_k_propositions() {
    let grp = level(1);
    let irreps = classify_irreps(&grp);
    for k in 2..=6i64 {
        let ctx = Ctx::weight(&grp, k);
        let lo = build_l_omega(&grp, k).unwrap();
        for j in -3..=0i64 {
            if k - 1 + j <= 0 {
                continue;
            }
            for rho in &irreps {
                let d = rho.dim() as i64;
                for v in [PropVariant::Dual, PropVariant::Twisted] {
                    let r = prop_ratio(&ctx, rho, v, j, &lo, false).unwrap();
                    assert!(r.ok(), "{r}");
                    // the printed form differs by an explicit unit
                    let lit = prop_ratio(&ctx, rho, v, j, &lo, true).unwrap();
                    let gap = match v {
                        PropVariant::Dual => SymExpr::i_unit()
                            .pow_i(d * (k - 1))
                            .unwrap()
                            .mul(&SymExpr::mono(&[(Atom::TwoPi, (2 - d) * (k - 2 + j))])),
                        PropVariant::Twisted => SymExpr::mono(&[(Atom::TwoPi, (d - 2) * j)]),
                    };
                    assert!(lit.value.equals(&gap), "{lit}");
                }
            }
        }
    }
}

fn theta_table(seed: u64) -> ThetaTable {
    let lv = &standard_split_tower(5, Some(4), 2).levels[1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = lv.g1();
    let records = char_table(&lv.delta())
        .into_iter()
        .enumerate()
        .map(|(i, theta)| {
            let norm = loop {
                let n: u64 = rng.gen_range(1..60);
                if !n.is_multiple_of(5) {
                    break n;
                }
            };
            let sigma = g1.elem(rng.gen_range(0..g1.order() as usize));
            let eps = SymExpr::atom(Atom::EpsTheta(format!("t{i}"))).mul(&SymExpr::cyclo(iwalab::arith::CycloNumber::root(4, i as i64)));
            ThetaRecord { theta, norm, sigma, eps }
        })
        .collect();
    ThetaTable { p: 5, group: lv.group.clone(), delta_rank: lv.delta_rank, records }
}

#[test]
fn twist_unit_trivial_data() {
    let lv = &standard_split_tower(5, Some(4), 2).levels[1];
    let records = char_table(&lv.delta())
        .into_iter()
        .map(|theta| ThetaRecord { theta, norm: 1, sigma: lv.g1().identity(), eps: SymExpr::one() })
        .collect();
    let t = ThetaTable { p: 5, group: lv.group.clone(), delta_rank: lv.delta_rank, records };
    let e = build_twist_unit_e(&t).unwrap();
    assert!(e.coeff(0).is_one());
    assert!(e.coeffs()[1..].iter().all(|c| c.is_zero()));
    for chi in char_table(&lv.group).iter().step_by(37) {
        assert!(eval_twist_unit(&e, &t, chi, -2).unwrap().is_one());
    }
}

#[test]
fn twist_unit_evaluation_and_twist() {
    let t = theta_table(7);
    let e = build_twist_unit_e(&t).unwrap();
    assert!(e.is_unit(5, t.delta_rank).unwrap().is_some());
    let lv = &standard_split_tower(5, Some(4), 2).levels[1];
    let grp = lv.metabelian();
    let k = 4;
    let ctx = Ctx::weight(&grp, k).with_thetas(&t);
    let rules = [Rule::FunctionalEquation, Rule::AwayFactorization, Rule::Relation];
    for chi in char_table(&lv.group).iter().step_by(7) {
        for j in [0i64, -1, -2] {
            let got = eval_twist_unit(&e, &t, chi, j).unwrap();
            // direct substitution: N^-1 eps chi_Gamma(sigma)^-1 N^j
            let r = t.record_for(chi).unwrap();
            let full: Vec<u64> = vec![0; t.delta_rank].into_iter().chain(r.sigma.iter().copied()).collect();
            let oracle = SymExpr::int(r.norm as i64)
                .pow_i(j - 1)
                .unwrap()
                .mul(&r.eps)
                .try_div(&SymExpr::cyclo(chi.value(&full)))
                .unwrap();
            assert!(got.equals(&oracle));
            // L_psibar(chi kappa^j) * E(chi kappa^j) = L^(tw)(chi kappa^j)
            let lhs = ctx.build_measure_rhs(chi, MeasureVariant::Lcm1, j).unwrap().mul(&got);
            let lhs = ctx.reduce(&lhs, &rules).unwrap();
            let rhs = ctx.reduce(&ctx.build_measure_rhs(chi, MeasureVariant::Lcm2, j).unwrap(), &rules).unwrap();
            assert!(lhs.value.equals(&rhs.value), "{chi} j={j}: {} vs {}", lhs.value, rhs.value);
            assert!(lhs.trace.iter().any(|s| s.rule == "functional_equation"));
        }
    }
}

#[test]
fn non_unit_component_is_rejected() {
    let mut t = theta_table(3);
    t.records[0].eps = SymExpr::atom(Atom::P);
    assert!(build_twist_unit_e(&t).is_err());
}

#[test]
fn l_omega_inverse_and_table() {
    let grp = level(1);
    let a = SymExpr::mono(&[(Atom::OmegaPlus, 1), (Atom::OmegaInf, -1)]);
    let b = SymExpr::mono(&[(Atom::OmegaMinus, 1), (Atom::OmegaInf, -1)]);
    let lo = build_l_omega_ab(&grp, &a, &b).unwrap();
    let inv = l_omega_inverse(&grp, &a, &b).unwrap();
    let prod = lo.convolve(&inv).unwrap();
    assert!(prod.coeff(0).is_one());
    assert!(prod.coeffs()[1..].iter().all(|c| c.is_zero()));
    for rho in classify_irreps(&grp) {
        let v = lo.eval_rep(&rho).unwrap();
        let want = match &rho {
            ArtinRep::Induced { .. } => a.mul(&b),
            ArtinRep::TypeA { sign: 1, .. } => a.clone(),
            _ => b.clone(),
        };
        assert!(v.equals(&want));
    }
    let one = build_l_omega_ab(&grp, &SymExpr::one(), &SymExpr::one()).unwrap();
    assert!(one.coeff(0).is_one() && one.coeffs()[1..].iter().all(|c| c.is_zero()));
    assert!(matches!(one.carrier(), Carrier::Metabelian(_)));
}

#[test]
fn numeric_substitution_agrees() {
    let grp = level(1);
    let ctx = Ctx::elliptic(&grp);
    for (i, rho) in classify_irreps(&grp).iter().enumerate() {
        let num = ctx.assemble_rep(rho, MeasureVariant::L, 0).unwrap();
        let den = ctx.build_conj2_rhs(rho).unwrap();
        let red = elliptic_ratio(&ctx, rho, MeasureVariant::L).unwrap().value;
        let c = numeric_check(&ctx, &num, &den, &red, 5, 8, i as u64).unwrap();
        assert!(c.agrees, "{rho}");
        // a wrong reduced value is caught
        let wrong = red.mul(&SymExpr::atom(Atom::U));
        assert!(!numeric_check(&ctx, &num, &den, &wrong, 5, 8, i as u64).unwrap().agrees);
    }
    let ctx = Ctx::weight(&grp, 4);
    let lo = build_l_omega(&grp, 4).unwrap();
    for rho in classify_irreps(&grp).iter().step_by(3) {
        let num = ctx.assemble_rep(rho, MeasureVariant::Lcm2, -1).unwrap().try_div(&lo.eval_rep(rho).unwrap()).unwrap();
        let den = ctx.build_prop_rhs(rho, PropVariant::Twisted, -1, false).unwrap();
        assert!(numeric_check(&ctx, &num, &den, &SymExpr::one(), 5, 8, 3).unwrap().agrees);
    }
}
