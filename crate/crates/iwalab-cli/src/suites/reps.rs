//! Irreducibles of G x| <c>: dimension count and Frobenius reciprocity.

use iwalab::chargroup::{CAction, FinAbGroup};
use iwalab::reps::{rep_suite, rep_invariants, Metabelian};

use super::Env;
use crate::report::{Check, SuiteResult};

const MAX_ORDER: u64 = 500;

fn builtin() -> Vec<(String, Metabelian)> {
    let inv = |n: u64| {
        let g = FinAbGroup::cyclic(n);
        Metabelian::new(g.clone(), CAction::new(&g, vec![vec![-1]]).expect("inversion"))
    };
    let swap = {
        let g = FinAbGroup::new(&[5, 5]).expect("orders");
        Metabelian::new(g.clone(), CAction::new(&g, vec![vec![0, 1], vec![1, 0]]).expect("swap"))
    };
    vec![("Z/5 by inversion".into(), inv(5)), ("Z/25 by inversion".into(), inv(25)), ("Z/5^2 swap".into(), swap)]
}

pub fn reps(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("reps");
    let mut groups = Vec::new();
    for lvl in &env.tower.levels {
        let grp = lvl.metabelian();
        if grp.order() <= MAX_ORDER {
            groups.push((format!("tower n={}", lvl.n), grp));
        } else {
            s.push(Check::info(format!("tower n={}", lvl.n), format!("|G| = {} > {MAX_ORDER}, skipped", grp.order())));
        }
    }
    groups.extend(builtin());
    s.param("groups", groups.len());
    for (label, grp) in &groups {
        let suite = match rep_suite(grp) {
            Ok(x) => x,
            Err(e) => {
                s.push(Check::error(label.as_str(), e));
                continue;
            }
        };
        s.push(
            Check::compare(format!("{label}: sum of dim^2"), &suite.dim_square_sum, &suite.order)
                .with_detail(format!("{} irreducibles", suite.irreps.len())),
        );
        let name = format!("{label}: reciprocity");
        s.push(match suite.failures().next() {
            None => Check::pass(name).with_detail(format!("{} pairs", suite.table.len())),
            Some(e) => Check::fail(name, format!("(Res rho, chi) = {}", e.restricted), format!("(rho, Ind chi) = {}", e.induced))
                .with_detail(format!("rho = {}, chi = {}", suite.irreps[e.rep], e.chi)),
        });
        let bad = suite.irreps.iter().find_map(|rho| match rep_invariants(grp, rho) {
            Ok(i) if i.d_plus + i.d_minus == rho.dim() && (!rho.is_type_b() || (i.d_plus, i.d_minus) == (1, 1)) => None,
            Ok(i) => Some(format!("{rho}: d+ = {}, d- = {}", i.d_plus, i.d_minus)),
            Err(e) => Some(format!("{rho}: {e}")),
        });
        let name = format!("{label}: d+ + d- = dim");
        s.push(match bad {
            None => Check::pass(name),
            Some(b) => Check::fail(name, b, "d+ + d- = dim, (1, 1) on Type B"),
        });
    }
    s
}
