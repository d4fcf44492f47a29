use iwalab::chargroup::{char_table, conjugate_char, CAction, FinAbGroup};
use iwalab::reps::*;
use iwalab::tower::standard_split_tower;

fn groups() -> Vec<(String, Metabelian)> {
    let mut out = Vec::new();
    for p in [5, 7, 11, 13] {
        let t = standard_split_tower(p, None, 2);
        for lvl in &t.levels {
            let grp = lvl.metabelian();
            if grp.order() <= 500 {
                out.push((format!("standard p={p} n={}", lvl.n), grp));
            }
        }
    }
    let inv = |n: u64| {
        let g = FinAbGroup::cyclic(n);
        Metabelian::new(g.clone(), CAction::new(&g, vec![vec![-1]]).unwrap())
    };
    out.push(("Z/5 by inversion".into(), inv(5)));
    out.push(("Z/25 by inversion".into(), inv(25)));
    let g = FinAbGroup::new(&[5, 5]).unwrap();
    out.push(("Z/5^2 swap".into(), Metabelian::new(g.clone(), CAction::new(&g, vec![vec![0, 1], vec![1, 0]]).unwrap())));
    let g = FinAbGroup::new(&[4, 3]).unwrap();
    out.push(("Z/4 x Z/3 mixed".into(), Metabelian::new(g.clone(), CAction::new(&g, vec![vec![1, 0], vec![0, -1]]).unwrap())));
    out
}

#[test]
fn dimensions_and_reciprocity_for_every_configured_group() {
    for (name, grp) in groups() {
        let suite = rep_suite(&grp).unwrap();
        assert_eq!(suite.dim_square_sum, grp.order(), "{name}");
        assert_eq!(suite.table.len(), suite.irreps.len() * grp.g.order() as usize);
        assert!(suite.failures().next().is_none(), "{name}");
        assert!(suite.pass());
        for rho in &suite.irreps {
            assert_eq!(inner_product(&grp, rho, rho).unwrap(), 1, "{name}: {rho}");
            assert_eq!(rho.contragredient().contragredient(), *rho);
            let inv = rep_invariants(&grp, rho).unwrap();
            assert_eq!(inv.d_plus + inv.d_minus, rho.dim());
            if rho.is_type_b() {
                assert_eq!((inv.d_plus, inv.d_minus), (1, 1));
            }
        }
    }
}

#[test]
fn induction_examples() {
    let (_, grp) = groups().into_iter().find(|(n, _)| n == "Z/5^2 swap").unwrap();
    for chi in char_table(&grp.g) {
        let chi_c = conjugate_char(&chi, &grp.c);
        let ind = induce(&grp, &chi);
        let ind_c = induce(&grp, &chi_c);
        // same character function
        for idx in 0..grp.order() as usize {
            let x = grp.elem(idx);
            assert_eq!(ind.character(&grp, &x), ind_c.character(&grp, &x));
        }
        let self_ip = inner_product(&grp, &ind, &ind).unwrap();
        if chi == chi_c {
            assert_eq!(self_ip, 2);
        } else {
            assert_eq!(self_ip, 1);
            assert_eq!(inner_product(&grp, &ind, &ind_c).unwrap(), 1);
            assert_eq!(restrict(&ind), vec![chi.clone(), chi_c.clone()]);
        }
    }
}

#[test]
fn conductors_on_the_standard_tower() {
    let t = standard_split_tower(5, None, 2);
    let grp = t.levels[1].metabelian();
    let irr = classify_irreps(&grp);
    let trivial = irr.iter().find(|r| matches!(r, ArtinRep::TypeA { chi, sign: 1 } if chi.is_trivial())).unwrap();
    let inv = rep_invariants(&grp, trivial).unwrap();
    assert_eq!((inv.d_plus, inv.d_minus, inv.f_p), (1, 0, Some(0)));
    for rho in irr.iter().filter(|r| r.is_type_b()) {
        let ArtinRep::Induced { chi, .. } = rho else { unreachable!() };
        // f_p of Ind chi: the two local exponents of chi; at level 2 each is at most 2
        let f = rep_invariants(&grp, rho).unwrap().f_p.unwrap();
        assert!(f <= 4, "{chi}: {f}");
    }
}
