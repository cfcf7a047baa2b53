//! Invariants over random parameters.

use ho_heat::even_case::{build_psi_a_operator, inv_c_polynomial};
use ho_heat::hypergeo::{Hypergeometric, Method, SpectralParameter, TorusPoint};
use ho_heat::rootsys::{build_root_system, MultiplicityFunction, RootSystemType};
use ho_heat::{CVector, Complex64, Vector};
use proptest::prelude::*;

fn ctx(kind: RootSystemType, m: &[f64]) -> Hypergeometric {
    let rs = build_root_system(kind, 1.0).unwrap();
    let m = MultiplicityFunction::from_slice(&rs, m).unwrap();
    Hypergeometric::new(rs, m).unwrap()
}

fn cv(a: f64, b: f64, c: f64, d: f64) -> CVector {
    CVector::new(Complex64::new(a, b), Complex64::new(c, d))
}

fn rank_one(z: CVector) -> CVector {
    CVector::new(z[0], Complex64::new(0.0, 0.0))
}

fn kinds() -> impl Strategy<Value = RootSystemType> {
    prop::sample::select(vec![RootSystemType::A1, RootSystemType::A2, RootSystemType::B2, RootSystemType::BC1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn c_at_rho_is_one(kind in kinds(), m1 in 0.05f64..6.0, m2 in 0.05f64..6.0) {
        let rs = build_root_system(kind, 1.0).unwrap();
        let m: Vec<f64> = [m1, m2].into_iter().take(rs.n_orbits).collect();
        let hg = ctx(kind, &m);
        let rho = CVector::new(Complex64::new(hg.rho[0], 0.0), Complex64::new(hg.rho[1], 0.0));
        prop_assert!((hg.c(&rho).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn plancherel_density_is_w_invariant(kind in kinds(), m in 0.5f64..4.0, l1 in -4.0f64..4.0, l2 in -4.0f64..4.0) {
        let hg = ctx(kind, &[m]);
        let l = if hg.rank() == 1 { Vector::new(l1, 0.0) } else { Vector::new(l1, l2) };
        let d = hg.plancherel_density(&l).unwrap();
        prop_assert!(d >= 0.0);
        for (w, _) in hg.weyl.iter() {
            let dw = hg.plancherel_density(&(w * l)).unwrap();
            prop_assert!((dw - d).abs() <= 1e-10 * d.max(1.0));
        }
    }

    #[test]
    fn phi_is_w_invariant_in_lambda(kind in prop::sample::select(vec![RootSystemType::A1, RootSystemType::A2]),
                                    a in -2.0f64..2.0, b in -0.5f64..0.5, c in -2.0f64..2.0, d in -0.5f64..0.5,
                                    h1 in 0.4f64..2.0, h2 in 0.4f64..2.0) {
        let hg = ctx(kind, &[2.0]);
        let mut l = cv(a, b, c, d);
        let mut h = Vector::new(h1, h2);
        if hg.rank() == 1 {
            l = rank_one(l);
            h[1] = 0.0;
        }
        let (h, _) = hg.rs.to_closed_chamber(&h);
        let pt = TorusPoint::real(h);
        let base = hg.hypergeometric_function(&SpectralParameter::new(l), &pt, Method::Auto).unwrap();
        for (w, _) in hg.weyl.iter() {
            let wl = CVector::new(
                l[0] * w[(0, 0)] + l[1] * w[(0, 1)],
                l[0] * w[(1, 0)] + l[1] * w[(1, 1)],
            );
            let v = hg.hypergeometric_function(&SpectralParameter::new(wl), &pt, Method::Auto).unwrap();
            prop_assert!((v - base).norm() <= 1e-9 * base.norm().max(1.0), "{v} vs {base}");
        }
    }

    #[test]
    fn eigenvalue_is_w_invariant(kind in kinds(), a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0) {
        let hg = ctx(kind, &[1.5]);
        let l = if hg.rank() == 1 { rank_one(cv(a, b, c, d)) } else { cv(a, b, c, d) };
        let e = hg.eigenvalue(&l);
        for (wl, _) in hg.weyl_images(&l) {
            prop_assert!((hg.eigenvalue(&wl) - e).norm() < 1e-10 * e.norm().max(1.0));
        }
    }

    #[test]
    fn psi_symbol_inverts_c(kind in prop::sample::select(vec![RootSystemType::A1, RootSystemType::A2, RootSystemType::B2]),
                            m in prop::sample::select(vec![2.0, 4.0]),
                            a in -3.0f64..3.0, b in -1.0f64..1.0, c in -3.0f64..3.0, d in -1.0f64..1.0) {
        let hg = ctx(kind, &[m]);
        let l = if hg.rank() == 1 { rank_one(cv(a, b, c, d)) } else { cv(a, b, c, d) };
        let op = build_psi_a_operator(&hg).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let mu = l * i;
        let expected = inv_c_polynomial(&hg, &(-mu)).unwrap();
        prop_assert!((op.symbol(&mu) - expected).norm() <= 1e-10 * expected.norm().max(1.0));
    }
}
