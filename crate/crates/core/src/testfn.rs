//! Built-in W-invariant test functions and the box radii they need.

use serde::{Deserialize, Serialize};

use crate::hypergeo::Hypergeometric;
use crate::rootsys::WeylGroup;
use crate::{Error, Result, Vector};

/// `exp(−c|H|²)` falls below `e^{−DECAY}` relative to `e^{ρ(H)}` at the
/// heuristic box radius, so `|f|·δ^{1/2}` is below 1e−10 there.
const DECAY: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(−c|H − H₀|²)`, averaged over W.
    Gaussian { width: f64, center: [f64; 2] },
    /// `exp(1 − 1/(1 − |H|²/R²))` inside the ball of radius R, zero outside.
    Bump { radius: f64 },
}

impl TestFunction {
    pub fn gaussian(width: f64) -> Self {
        Self::Gaussian { width, center: [0.0, 0.0] }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Gaussian { width, .. } => *width > 0.0,
            Self::Bump { radius } => *radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("test function parameters must be positive: {self:?}")))
        }
    }

    pub fn eval(&self, weyl: &WeylGroup, h: &Vector) -> f64 {
        match *self {
            Self::Gaussian { width, center } => {
                let c = Vector::new(center[0], center[1]);
                if c == Vector::zeros() {
                    return (-width * h.norm_squared()).exp();
                }
                let s: f64 = weyl.elements.iter().map(|w| (-width * (w * h - c).norm_squared()).exp()).sum();
                s / weyl.order() as f64
            }
            Self::Bump { radius } => {
                let s = h.norm_squared() / (radius * radius);
                if s >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s)).exp()
                }
            }
        }
    }

    /// Spatial box radius for integrals against `δ` given `|ρ|`.
    pub fn space_radius(&self, rho_norm: f64) -> f64 {
        match *self {
            Self::Gaussian { width, center } => {
                let c0 = (center[0].powi(2) + center[1].powi(2)).sqrt();
                (rho_norm + (rho_norm * rho_norm + 4.0 * width * DECAY).sqrt()) / (2.0 * width) + c0
            }
            Self::Bump { radius } => radius * 1.05,
        }
    }

    /// Spectral box radius for the transform of the function. `degree` is the
    /// polynomial growth order of the Plancherel density.
    pub fn spectral_radius(&self, rho_norm: f64, degree: f64) -> f64 {
        match *self {
            Self::Gaussian { width, .. } => {
                // fixed point of R² = |ρ|² + 4c(DECAY + degree·ln R)
                let mut r = (rho_norm * rho_norm + 4.0 * width * DECAY).sqrt();
                for _ in 0..8 {
                    let log = r.max(1.0).ln();
                    r = (rho_norm * rho_norm + 4.0 * width * (DECAY + degree * log)).sqrt();
                }
                r
            }
            // only super-polynomial decay; this keeps the transform above 1e−8
            Self::Bump { radius } => 400.0 / radius,
        }
    }

    /// Space and spectral radii for `hg`.
    pub fn radii(&self, hg: &Hypergeometric) -> (f64, f64) {
        let rho = hg.rho.norm();
        (self.space_radius(rho), self.spectral_radius(rho, hg.density_degree()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, weyl_group, RootSystemType};

    #[test]
    fn invariance_and_support() {
        let rs = build_root_system(RootSystemType::A2, 1.0).unwrap();
        let w = weyl_group(&rs).unwrap();
        let f = TestFunction::Gaussian { width: 0.7, center: [0.4, 0.1] };
        let x = Vector::new(0.3, -0.8);
        for e in &w.elements {
            assert!((f.eval(&w, &(e * x)) - f.eval(&w, &x)).abs() < 1e-15);
        }
        let b = TestFunction::Bump { radius: 2.0 };
        assert_eq!(b.eval(&w, &Vector::new(2.0, 0.1)), 0.0);
        assert!((b.eval(&w, &Vector::zeros()) - 1.0).abs() < 1e-15);
        assert!(TestFunction::Bump { radius: -1.0 }.validate().is_err());
    }

    #[test]
    fn radius_captures_decay() {
        let f = TestFunction::gaussian(0.5);
        let rho = 2.0;
        let r = f.space_radius(rho);
        assert!((-0.5 * r * r + rho * r).exp() < 1e-10);
    }
}
