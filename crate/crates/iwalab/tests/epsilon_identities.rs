use iwalab::arith::{CycloNumber, DISCRIMINANTS};
use iwalab::epsilon::*;
use iwalab::nt;
use num_traits::ToPrimitive;

fn numeric(x: &CycloNumber) -> (f64, f64) {
    let m = x.conductor() as f64;
    x.coeffs().iter().enumerate().fold((0.0, 0.0), |(re, im), (j, c)| {
        let c = c.to_f64().unwrap();
        let a = 2.0 * std::f64::consts::PI * j as f64 / m;
        (re + c * a.cos(), im + c * a.sin())
    })
}

// Float oracle straight from the definition, no shared code with the library.
fn gauss_float(p: u64, n: u32, k: u64, t: i64) -> (f64, f64) {
    let m = p.pow(n);
    let phi = (p - 1) * p.pow(n - 1);
    let g = (2..m).find(|&g| (1..phi).all(|e| nt::pow_mod(g, e, m) != 1) && g % p != 0).unwrap();
    let mut b = 1u64;
    let (mut re, mut im) = (0.0, 0.0);
    for s in 0..phi {
        let ang = 2.0 * std::f64::consts::PI * ((k * s) % phi) as f64 / phi as f64
            + 2.0 * std::f64::consts::PI * ((t.rem_euclid(m as i64) as u64 * b) % m) as f64 / m as f64;
        re += ang.cos();
        im += ang.sin();
        b = b * g % m;
    }
    (re, im)
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-8
}

#[test]
fn gauss_sums_match_float_oracle() {
    for p in [5u64, 7] {
        for n in 1..=2 {
            for chi in LocalChar::all(p, n) {
                let g = gauss_sum(&chi).unwrap();
                assert!(close(numeric(&g), gauss_float(p, n, chi.k, -1)), "{chi}");
            }
        }
    }
}

#[test]
fn norm_of_gauss_sums() {
    for p in [5u64, 7] {
        for n in 1..=2u32 {
            for chi in LocalChar::all(p, n) {
                let g = gauss_sum(&chi).unwrap();
                let gb = gauss_sum(&chi.conj()).unwrap();
                let expect = CycloNumber::from_int(chi.parity() * p.pow(n) as i64);
                assert_eq!(g.try_mul(&gb).unwrap(), expect, "{chi}");
            }
        }
    }
}

#[test]
fn epsilon_duality_and_flip() {
    for p in [5u64, 7] {
        for n in 1..=2u32 {
            for chi in LocalChar::all(p, n) {
                for scale in [1u64, 2, p + 1] {
                    let plus = AddConv::PSI.scaled(scale);
                    let a = epsilon_factor(&chi.conj(), plus, HaarConv::Dx1).unwrap();
                    let b = epsilon_factor(&chi, plus.flipped(), HaarConv::Dx1).unwrap();
                    assert_eq!(a.try_mul(&b).unwrap(), CycloNumber::from_int(p.pow(n) as i64));
                    let e_plus = epsilon_factor(&chi, plus, HaarConv::Dx1).unwrap();
                    let e_minus = epsilon_factor(&chi, plus.flipped(), HaarConv::Dx1).unwrap();
                    assert_eq!(e_plus, e_minus.scale(&num_rational::BigRational::from_integer(chi.parity().into())));
                }
            }
        }
    }
}

#[test]
fn trivial_character_has_epsilon_one() {
    assert_eq!(epsilon_factor(&LocalChar::trivial(5), AddConv::PSI_NEG, HaarConv::Dx1).unwrap(), CycloNumber::one());
    assert!(HaarConv::parse("self-dual").is_err());
    assert!(AddConv::parse("psi(2x)").is_err());
}

#[test]
fn unramified_twist_scales_by_inverse_value() {
    let u = CycloNumber::from_int(3);
    let chi = LocalChar::new(5, 1, 1).unwrap();
    let plain = epsilon_factor(&chi.conj(), AddConv::PSI, HaarConv::Dx1).unwrap();
    let twisted = epsilon_factor(&chi.conj().with_unramified(u.try_inv().unwrap()), AddConv::PSI, HaarConv::Dx1).unwrap();
    assert_eq!(twisted, plain.try_mul(&u.try_inv().unwrap()).unwrap());
}

#[test]
fn sigma_delta_identity_everywhere() {
    let mut checked = 0;
    for p in [5u64, 7] {
        for &d in &DISCRIMINANTS {
            if nt::legendre(-(d as i64), p) != 1 {
                assert!(matches!(
                    verify_sigma_delta(&LocalChar::new(p, 1, 1).unwrap(), d),
                    Err(EpsilonError::Inert { .. })
                ));
                continue;
            }
            for n in 1..=2u32 {
                for chi in LocalChar::all(p, n) {
                    let r = verify_sigma_delta(&chi, d).unwrap();
                    assert!(r.holds, "{chi} d_K={d}");
                    assert_eq!((r.delta * r.delta + d) % p.pow(n), 0);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn mixed_ramification_product() {
    let ram = LocalChar::new(5, 1, 1).unwrap();
    let r = inductivity_split(&ram, &LocalChar::trivial(5), 4).unwrap();
    assert_eq!(r.product, r.e_p);
    assert_eq!(r.conductor, 1);
    assert!(inductivity_split(&ram, &LocalChar::trivial(7), 4).is_err());
}
