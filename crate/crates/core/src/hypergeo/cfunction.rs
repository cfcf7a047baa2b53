//! The Gindikin–Karpelevič c-function, its reciprocal, the cocycle
//! `c_{s,t}` and the Plancherel density `|c(iλ)|^{-2}`.

use serde::Serialize;

use super::{cmul, Hypergeometric, SpectralParameter};
use crate::rootsys::{MultiplicityFunction, RootSystem};
use crate::special::{gamma, gamma_pole, gamma_residue, ln_gamma};
use crate::{complexify, CVector, Complex64, Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CFunctionValue {
    pub value: Complex64,
    pub kappa0: f64,
}

fn arguments(z: Complex64, m: f64, m2: f64) -> (Complex64, Complex64) {
    (0.5 * (z + 0.5 * m + 1.0), 0.5 * (z + 0.5 * m + m2))
}

/// Unnormalized factor `2^{−z} Γ(z) / (Γ(w₁) Γ(w₂))` with removable
/// singularities resolved by their limits.
pub(crate) fn factor(z: Complex64, m: f64, m2: f64) -> Result<Complex64> {
    let (w1, w2) = arguments(z, m, m2);
    let ln2 = std::f64::consts::LN_2;
    let poles: Vec<(u64, Complex64)> =
        [(w1, w2), (w2, w1)].iter().filter_map(|(w, other)| gamma_pole(*w).map(|k| (k, *other))).collect();
    match (gamma_pole(z), poles.as_slice()) {
        (None, []) => Ok((-z * ln2 + ln_gamma(z) - ln_gamma(w1) - ln_gamma(w2)).exp()),
        (None, _) => Ok(Complex64::new(0.0, 0.0)),
        (Some(_), []) => Err(Error::PoleEncountered(z)),
        (Some(n), [(k, other)]) => {
            // Γ(z) ~ R_n/ε and 1/Γ(w) ~ (ε/2)/R_k as z → −n
            let lim = gamma_residue(n) / gamma_residue(*k) * 0.5;
            Ok(lim * 2f64.powi(n as i32) * crate::special::rgamma(*other))
        }
        (Some(_), _) => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// `1 / factor(z)`: `2^z Γ(w₁) Γ(w₂) / Γ(z)`.
pub(crate) fn inv_factor(z: Complex64, m: f64, m2: f64) -> Result<Complex64> {
    let (w1, w2) = arguments(z, m, m2);
    let ln2 = std::f64::consts::LN_2;
    let poles: Vec<(u64, Complex64)> =
        [(w1, w2), (w2, w1)].iter().filter_map(|(w, other)| gamma_pole(*w).map(|k| (k, *other))).collect();
    match (gamma_pole(z), poles.as_slice()) {
        (None, []) => Ok((z * ln2 + ln_gamma(w1) + ln_gamma(w2) - ln_gamma(z)).exp()),
        (Some(_), []) => Ok(Complex64::new(0.0, 0.0)),
        (Some(n), [(k, other)]) => {
            let lim = 2.0 * gamma_residue(*k) / gamma_residue(n);
            Ok(lim * 2f64.powi(-(n as i32)) * gamma(*other))
        }
        _ => Err(Error::ZeroOfC(format!("c-function vanishes at λ_α = {z}"))),
    }
}

pub(crate) fn compute_kappa0(rs: &RootSystem, m: &MultiplicityFunction, rho: &Vector) -> Result<f64> {
    let r = complexify(rho);
    let mut prod = Complex64::new(1.0, 0.0);
    for (i, p) in rs.reduced_positive() {
        prod *= factor(p.lambda_alpha(&r), m.of(rs, i), m.of_double(rs, i))?;
    }
    if prod.norm() == 0.0 || !prod.is_finite() {
        return Err(Error::ZeroOfC("unnormalized c-function degenerate at ρ(m)".into()));
    }
    Ok(1.0 / prod.re)
}

/// Reciprocal c-function for even multiplicities on a reduced system,
/// `Π_{α∈Δ⁺} Π_{k=0}^{m_α/2−1} (λ_α + k)/(ρ_α + k)`.
pub fn inv_c_polynomial(hg: &Hypergeometric, lambda: &CVector) -> Result<Complex64> {
    if !hg.m.is_even(&hg.rs) {
        return Err(Error::InvalidInput("polynomial 1/c needs even multiplicities on a reduced system".into()));
    }
    let rho = complexify(&hg.rho);
    let mut v = Complex64::new(1.0, 0.0);
    for (i, p) in hg.rs.reduced_positive() {
        let half = (hg.m.of(&hg.rs, i) / 2.0).round() as u32;
        let la = p.lambda_alpha(lambda);
        let ra = p.lambda_alpha(&rho);
        for k in 0..half {
            v *= (la + k as f64) / (ra + k as f64);
        }
    }
    Ok(v)
}

impl Hypergeometric {
    /// `c(m; λ)`, normalized so that `c(m; ρ(m)) = 1`.
    pub fn c_function(&self, lambda: &SpectralParameter) -> Result<CFunctionValue> {
        let mut v = Complex64::new(self.kappa0, 0.0);
        for (i, p) in self.rs.reduced_positive() {
            v *= factor(lambda.lambda_alpha(p), self.m.of(&self.rs, i), self.m.of_double(&self.rs, i))?;
        }
        Ok(CFunctionValue { value: v, kappa0: self.kappa0 })
    }

    pub fn c(&self, lambda: &CVector) -> Result<Complex64> {
        Ok(self.c_function(&SpectralParameter::new(*lambda))?.value)
    }

    /// `1/c(m; λ)`; a polynomial for even multiplicities, otherwise the
    /// reciprocal Gamma product.
    pub fn inv_c(&self, lambda: &CVector) -> Result<Complex64> {
        if self.m.is_even(&self.rs) {
            return inv_c_polynomial(self, lambda);
        }
        let mut v = Complex64::new(1.0 / self.kappa0, 0.0);
        for (i, p) in self.rs.reduced_positive() {
            v *= inv_factor(p.lambda_alpha(lambda), self.m.of(&self.rs, i), self.m.of_double(&self.rs, i))?;
        }
        Ok(v)
    }

    /// `c_{s,t}(m; λ) = c(s^{-1} iλ) / c(t^{-1} iλ)` for Weyl element indices `s`, `t`.
    pub fn c_ratio(&self, s: usize, t: usize, lambda: &Vector) -> Result<Complex64> {
        let il = complexify(lambda) * Complex64::i();
        let si = &self.weyl.elements[self.weyl.inverse(s)];
        let ti = &self.weyl.elements[self.weyl.inverse(t)];
        let num = self.inv_c(&cmul(ti, &il))?;
        let den = self.inv_c(&cmul(si, &il))?;
        if den.norm() == 0.0 {
            return Err(Error::PoleEncountered(Complex64::new(0.0, 0.0)));
        }
        Ok(num / den)
    }

    /// `|c(m; iλ)|^{-2}` for real λ.
    pub fn plancherel_density(&self, lambda: &Vector) -> Result<f64> {
        let il = complexify(lambda) * Complex64::i();
        Ok(self.inv_c(&il)?.norm_sqr())
    }

    /// `π(λ) = Π_{α∈Δ_i⁺} (α, λ)`.
    pub fn pi(&self, lambda: &CVector) -> Complex64 {
        self.rs.reduced_positive().map(|(_, p)| crate::cdot(lambda, &p.vector)).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, RootSystemType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(kind: RootSystemType, m: &[f64]) -> Hypergeometric {
        let rs = build_root_system(kind, 1.0).unwrap();
        let m = MultiplicityFunction::from_slice(&rs, m).unwrap();
        Hypergeometric::new(rs, m).unwrap()
    }

    fn random_lambda(rng: &mut ChaCha8Rng, rank: usize) -> CVector {
        let mut c = || Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (a, b) = (c(), c());
        CVector::new(a, if rank == 1 { Complex64::new(0.0, 0.0) } else { b })
    }

    fn hg_orbits(kind: RootSystemType) -> usize {
        build_root_system(kind, 1.0).unwrap().n_orbits
    }

    #[test]
    fn normalized_at_rho() {
        for kind in [RootSystemType::A1, RootSystemType::A2, RootSystemType::B2, RootSystemType::BC1] {
            for m in [&[1.0][..], &[2.0], &[0.5, 3.0]] {
                if m.len() > hg_orbits(kind) {
                    continue;
                }
                let hg = ctx(kind, m);
                let c = hg.c(&complexify(&hg.rho)).unwrap();
                assert!((c - 1.0).norm() < 1e-12, "{kind} {m:?}: {c}");
            }
        }
    }

    #[test]
    fn flat_c_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in RootSystemType::ALL {
            let hg = ctx(kind, &[0.0]);
            for _ in 0..10 {
                let l = random_lambda(&mut rng, hg.rank());
                assert!((hg.c(&l).unwrap() - 1.0).norm() < 1e-12);
            }
            // also at the poles of Γ(λ_α)
            assert!((hg.c(&CVector::zeros()).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_case_is_ratio_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in [RootSystemType::A1, RootSystemType::A2, RootSystemType::B2, RootSystemType::A1xA1] {
            let hg = ctx(kind, &[2.0]);
            let pr = hg.pi(&complexify(&hg.rho));
            for _ in 0..50 {
                let l = random_lambda(&mut rng, hg.rank());
                let c = hg.c(&l).unwrap();
                let expected = pr / hg.pi(&l);
                assert!((c - expected).norm() < 1e-10 * expected.norm(), "{kind}");
                // sign rule under W
                for (w, s) in hg.weyl.iter() {
                    let cw = hg.c(&cmul(w, &l)).unwrap();
                    assert!((cw - c * s as f64).norm() < 1e-10 * c.norm());
                }
            }
        }
    }

    #[test]
    fn polynomial_matches_gamma_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (kind, m) in [
            (RootSystemType::A2, &[2.0][..]),
            (RootSystemType::A2, &[4.0]),
            (RootSystemType::B2, &[2.0, 4.0]),
            (RootSystemType::A1, &[6.0]),
        ] {
            let hg = ctx(kind, m);
            for _ in 0..20 {
                let l = random_lambda(&mut rng, hg.rank());
                let p = inv_c_polynomial(&hg, &l).unwrap();
                let g = 1.0 / hg.c(&l).unwrap();
                assert!((p - g).norm() < 1e-10 * g.norm().max(1.0), "{kind} {m:?}");
            }
            assert!((inv_c_polynomial(&hg, &complexify(&hg.rho)).unwrap() - 1.0).norm() < 1e-14);
        }
        let odd = ctx(RootSystemType::A1, &[1.0]);
        assert!(inv_c_polynomial(&odd, &CVector::zeros()).is_err());
    }

    #[test]
    fn inverse_factor_is_reciprocal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let (m, m2) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..2.0));
            let f = factor(z, m, m2).unwrap();
            let g = inv_factor(z, m, m2).unwrap();
            assert!((f * g - 1.0).norm() < 1e-11);
        }
        // limit at a cancelled pole and its reciprocal
        let f = factor(Complex64::new(-2.0, 0.0), 2.0, 0.0).unwrap();
        let g = inv_factor(Complex64::new(-2.0, 0.0), 2.0, 0.0).unwrap();
        assert!((f * g - 1.0).norm() < 1e-12);
        // an uncancelled pole is reported
        assert!(matches!(factor(Complex64::new(0.0, 0.0), 1.0, 0.0), Err(Error::PoleEncountered(_))));
    }

    #[test]
    fn ratio_is_unimodular_and_a_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (kind, m) in [(RootSystemType::A2, &[1.5][..]), (RootSystemType::B2, &[1.0, 3.0]), (RootSystemType::BC1, &[2.0, 1.0])] {
            let hg = ctx(kind, m);
            let n = hg.weyl_order();
            for _ in 0..5 {
                let l = hg.rs.project(&Vector::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
                for s in 0..n {
                    assert!((hg.c_ratio(s, s, &l).unwrap() - 1.0).norm() < 1e-14);
                    for t in 0..n {
                        assert!((hg.c_ratio(s, t, &l).unwrap().norm() - 1.0).abs() < 1e-12);
                        let st = hg.weyl.compose(s, t);
                        let sl = hg.weyl.elements[hg.weyl.inverse(s)] * l;
                        let lhs = hg.c_ratio(st, hg.weyl.identity, &l).unwrap();
                        let rhs = hg.c_ratio(s, hg.weyl.identity, &l).unwrap()
                            * hg.c_ratio(t, hg.weyl.identity, &sl).unwrap();
                        assert!((lhs - rhs).norm() < 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn plancherel_density_examples() {
        let flat = ctx(RootSystemType::B2, &[0.0]);
        assert!((flat.plancherel_density(&Vector::new(0.3, 2.0)).unwrap() - 1.0).abs() < 1e-12);
        let hg = ctx(RootSystemType::A2, &[2.0]);
        assert_eq!(hg.plancherel_density(&Vector::zeros()).unwrap(), 0.0);
        let l = Vector::new(0.7, -1.9);
        let pr = hg.pi(&complexify(&hg.rho)).re;
        let pl = hg.pi(&complexify(&l)).re;
        let expected = (pl / pr).powi(2);
        assert!((hg.plancherel_density(&l).unwrap() - expected).abs() < 1e-12 * expected);
        for w in &hg.weyl.elements {
            let d = hg.plancherel_density(&(w * l)).unwrap();
            assert!((d - expected).abs() < 1e-12 * expected);
        }
        // general multiplicity, W-invariance through the Gamma product
        let bc = ctx(RootSystemType::BC1, &[1.0, 0.5]);
        let a = bc.plancherel_density(&Vector::new(1.3, 0.0)).unwrap();
        let b = bc.plancherel_density(&Vector::new(-1.3, 0.0)).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        assert_eq!(bc.plancherel_density(&Vector::zeros()).unwrap(), 0.0);
    }
}
