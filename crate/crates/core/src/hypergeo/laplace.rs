//! The operator L(m) = Δ + Σ_{α∈Δ⁺} m_α coth α(H) ∂_α, applied by
//! fourth-order central differences in H.

use super::{cdot2, Hypergeometric};
use crate::{complexify, CVector, Complex64, Error, Result};

/// L(m)f at `h` with step `step`. `f` is evaluated on the logarithm.
pub fn apply_l<F>(hg: &Hypergeometric, f: F, h: &CVector, step: f64) -> Result<Complex64>
where
    F: Fn(&CVector) -> Result<Complex64>,
{
    let clearance = wall_clearance(hg, &h.map(|z| z.re));
    if clearance < 2.0 * step {
        return Err(Error::Domain(format!(
            "point is within {clearance:.3e} of a wall, stencil needs {:.3e}",
            2.0 * step
        )));
    }
    let rank = hg.rs.rank;
    let f0 = f(h)?;
    let mut grad = [Complex64::new(0.0, 0.0); 2];
    let mut lap = Complex64::new(0.0, 0.0);
    for (j, g) in grad.iter_mut().enumerate().take(rank) {
        let mut e = CVector::zeros();
        e[j] = Complex64::new(step, 0.0);
        let fm2 = f(&(h - e.scale(2.0)))?;
        let fm1 = f(&(h - e))?;
        let fp1 = f(&(h + e))?;
        let fp2 = f(&(h + e.scale(2.0)))?;
        *g = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step);
        lap += (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * step * step);
    }
    let grad = CVector::new(grad[0], grad[1]);
    let mut drift = Complex64::new(0.0, 0.0);
    for (m, p) in hg.weighted_roots() {
        if m == 0.0 {
            continue;
        }
        let t = cdot2(h, &complexify(&p.vector));
        drift += m / t.tanh() * cdot2(&grad, &complexify(&p.vector));
    }
    Ok(lap + drift)
}

/// Richardson extrapolation of `apply_l` over steps `step` and `step/2`.
pub fn apply_l_richardson<F>(hg: &Hypergeometric, f: F, h: &CVector, step: f64) -> Result<Complex64>
where
    F: Fn(&CVector) -> Result<Complex64>,
{
    let coarse = apply_l(hg, &f, h, step)?;
    let fine = apply_l(hg, &f, h, 0.5 * step)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

/// Distance of `h` to the nearest wall carrying a nonzero multiplicity.
pub fn wall_clearance(hg: &Hypergeometric, h: &crate::Vector) -> f64 {
    hg.weighted_roots()
        .filter(|(m, _)| *m != 0.0)
        .map(|(_, p)| p.eval(h).abs() / p.vector.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Richardson-extrapolated L(m)f with the step shrunk near walls.
pub fn apply_l_adaptive<F>(hg: &Hypergeometric, f: F, h: &CVector, max_step: f64) -> Result<Complex64>
where
    F: Fn(&CVector) -> Result<Complex64>,
{
    let clearance = wall_clearance(hg, &h.map(|z| z.re));
    if clearance == 0.0 {
        return Err(Error::Domain("L(m) is singular on the walls".into()));
    }
    apply_l_richardson(hg, f, h, max_step.min(0.25 * clearance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeo::{Method, SpectralParameter};
    use crate::rootsys::{build_root_system, MultiplicityFunction, RootSystemType};

    fn ctx(kind: RootSystemType, m: &[f64]) -> Hypergeometric {
        let rs = build_root_system(kind, 1.0).unwrap();
        let m = MultiplicityFunction::from_slice(&rs, m).unwrap();
        Hypergeometric::new(rs, m).unwrap()
    }

    fn cv(a: f64, b: f64, c: f64, d: f64) -> CVector {
        CVector::new(Complex64::new(a, b), Complex64::new(c, d))
    }

    #[test]
    fn exponential_in_flat_case() {
        let hg = ctx(RootSystemType::A2, &[0.0]);
        let l = cv(0.3, 0.4, -0.2, 0.1);
        let h = cv(0.9, 0.2, 0.5, -0.1);
        let v = apply_l(&hg, |x| Ok(cdot2(&l, x).exp()), &h, 1e-2).unwrap();
        let expected = cdot2(&l, &l) * cdot2(&l, &h).exp();
        assert!((v - expected).norm() < 1e-7 * expected.norm());
    }

    #[test]
    fn phi_is_an_eigenfunction() {
        let cases: [(RootSystemType, &[f64], Method); 4] = [
            (RootSystemType::A1, &[1.5], Method::Auto),
            (RootSystemType::BC1, &[2.0, 1.0], Method::Auto),
            (RootSystemType::A2, &[2.0], Method::ClosedForm),
            (RootSystemType::B2, &[1.0, 2.0], Method::Series),
        ];
        for (kind, m, method) in cases {
            let hg = ctx(kind, m);
            let l = if hg.rank() == 1 { cv(0.7, 1.1, 0.0, 0.0) } else { cv(0.7, 1.1, -0.4, 0.5) };
            let p = hg.prepare(&SpectralParameter::new(l), method).unwrap();
            let h = if hg.rank() == 1 { cv(1.2, 0.1, 0.0, 0.0) } else { cv(2.2, 0.1, 1.1, -0.05) };
            let v = apply_l_richardson(&hg, |x| p.eval_log(x), &h, 2e-2).unwrap();
            let expected = hg.eigenvalue(&l) * p.eval_log(&h).unwrap();
            assert!((v - expected).norm() < 1e-7 * expected.norm().max(1.0), "{kind}: {v} vs {expected}");
        }
    }

    #[test]
    fn wall_is_rejected() {
        let hg = ctx(RootSystemType::A1, &[1.0]);
        let r = apply_l(&hg, |_| Ok(Complex64::new(1.0, 0.0)), &cv(0.01, 0.0, 0.0, 0.0), 1e-2);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
