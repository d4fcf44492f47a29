//! CM-stable lattices over the nine class-number-one fields.

use iwalab::arith::DISCRIMINANTS;
use iwalab::cmlattice::{scan, Mode};

use super::Env;
use crate::report::{Check, SuiteResult};

/// For every stable tau = (s'/d_K) sqrt(-d_K): s is a p-unit with d_K s | d_K,
/// and the lattice has a p-unit generator alpha over O_K.
pub fn lattice(env: &Env) -> SuiteResult {
    let mut s = SuiteResult::new("lattice");
    let mode = env.cfg.lattice_mode;
    s.param("mode", mode.name());
    for d in DISCRIMINANTS {
        let r = match scan(d, None, mode) {
            Ok(r) => r,
            Err(e) => {
                s.push(Check::error(format!("d_K={d}"), e));
                continue;
            }
        };
        if r.empty() {
            let name = format!("d_K={d} p={} empty scan", r.p);
            // omega has rational part 1/2, so a purely imaginary tau never gives Z + Z tau = O_K-stable
            let c = if mode == Mode::Maximal && d % 4 == 3 {
                Check::pass(name).with_detail("no purely imaginary tau is stable under O_K")
            } else {
                Check::fail(name, "no stable tau", "at least one stable tau")
            };
            s.push(c);
        }
        for e in &r.entries {
            let name = format!("d_K={d} p={} s'={}", r.p, e.s_prime);
            if !e.cm_stable {
                s.push(Check::info(name, format!("tau = {} is not stable", e.tau)));
                continue;
            }
            let c = match (&e.s, &e.alpha) {
                (Some(sr), _) if !sr.pass() => Check::fail(&name, format!("s = {}", sr.s), sr.witness.join("; ")),
                (_, Some(Err(err))) => Check::error(&name, err),
                (_, Some(Ok(a))) if !a.p_unit => {
                    Check::fail(&name, format!("v_P(alpha) = {}", a.valuation), "0").with_detail(format!("alpha = {}", a.alpha))
                }
                (Some(sr), Some(Ok(a))) => Check::pass(&name).with_detail(format!("s = {}, alpha = {}, N(alpha) = {}", sr.s, a.alpha, a.norm)),
                _ => Check::error(&name, "solver output missing"),
            };
            s.push(c);
        }
    }
    s
}
