//! Heckman–Opdam hypergeometric functions: the Γ_μ recursion, the
//! c-function, Harish-Chandra series, φ_λ itself, the density δ and the
//! operator L(m).

pub mod cfunction;
pub mod gamma_table;
pub mod laplace;
pub mod phi;

use serde::{Deserialize, Serialize};

use crate::rootsys::{rho, weyl_group, MultiplicityFunction, PositiveRoot, RootSystem, WeylGroup};
use crate::{complexify, CVector, Complex64, Error, Matrix, Result, Vector};

pub use cfunction::{inv_c_polynomial, CFunctionValue};
pub use gamma_table::{gamma_coefficients, GammaTable};
pub use laplace::{apply_l, apply_l_adaptive, apply_l_richardson, wall_clearance};
pub use phi::{Method, PreparedPhi, SeriesValue};

/// Complex-bilinear pairing on the complexified frame.
pub(crate) fn cdot2(a: &CVector, b: &CVector) -> Complex64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn cmul(w: &Matrix, v: &CVector) -> CVector {
    CVector::new(
        v[0] * w[(0, 0)] + v[1] * w[(0, 1)],
        v[0] * w[(1, 0)] + v[1] * w[(1, 1)],
    )
}

/// A spectral parameter λ ∈ 𝔞*_ℂ in the orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub lambda: CVector,
}

impl SpectralParameter {
    pub fn new(lambda: CVector) -> Self {
        Self { lambda }
    }

    pub fn real(v: &Vector) -> Self {
        Self { lambda: complexify(v) }
    }

    /// `iλ` for real `λ`.
    pub fn imaginary(v: &Vector) -> Self {
        Self { lambda: complexify(v) * Complex64::i() }
    }

    pub fn lambda_alpha(&self, p: &PositiveRoot) -> Complex64 {
        p.lambda_alpha(&self.lambda)
    }

    pub fn norm(&self) -> f64 {
        (self.lambda[0].norm_sqr() + self.lambda[1].norm_sqr()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusTag {
    A,
    AOmega,
    APlus2Omega,
}

/// `a = exp(H_R + i H_I)`, stored by its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub log_real: Vector,
    pub log_imag: Vector,
    pub tag: TorusTag,
}

impl TorusPoint {
    pub fn real(h: Vector) -> Self {
        Self { log_real: h, log_imag: Vector::zeros(), tag: TorusTag::A }
    }

    /// Classifies `(H_R, H_I)`; fails outside A(Ω) ∪ A⁺(2Ω).
    pub fn new(rs: &RootSystem, log_real: Vector, log_imag: Vector) -> Result<Self> {
        let tag = if log_imag == Vector::zeros() {
            TorusTag::A
        } else if in_tube(rs, &log_imag, 1.0) {
            TorusTag::AOmega
        } else if rs.in_positive_chamber(&log_real) && in_tube(rs, &log_imag, 2.0) {
            TorusTag::APlus2Omega
        } else {
            return Err(Error::Domain(format!(
                "H_I = ({}, {}) is outside Ω and (H_R, H_I) is outside A⁺(2Ω)",
                log_imag[0], log_imag[1]
            )));
        };
        Ok(Self { log_real, log_imag, tag })
    }

    pub fn log(&self) -> CVector {
        CVector::new(
            Complex64::new(self.log_real[0], self.log_imag[0]),
            Complex64::new(self.log_real[1], self.log_imag[1]),
        )
    }

    pub fn from_log(rs: &RootSystem, h: &CVector) -> Result<Self> {
        Self::new(rs, h.map(|z| z.re), h.map(|z| z.im))
    }
}

/// `|α(H_I)| < k·π/2` for every root.
pub fn in_tube(rs: &RootSystem, h_imag: &Vector, k: f64) -> bool {
    rs.positive.iter().all(|p| p.eval(h_imag).abs() < k * std::f64::consts::FRAC_PI_2)
}

/// Which closed form, if any, is available for φ_λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// m ≡ 0: φ_λ = Σ_w a^{wλ}.
    Flat,
    /// m ≡ 2 on a reduced system: the alternating-sum formula.
    Complex,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Relative size of the last graded shell at which summation stops.
    pub tolerance: f64,
    /// Hard cap on the degree of Γ₊ used.
    pub max_cap: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { tolerance: 1e-13, max_cap: 64 }
    }
}

/// Evaluation context for a root system with a fixed multiplicity.
#[derive(Debug, Clone)]
pub struct Hypergeometric {
    pub rs: RootSystem,
    pub m: MultiplicityFunction,
    pub weyl: WeylGroup,
    pub rho: Vector,
    /// Normalization of the c-function, `c(ρ) = 1`.
    pub kappa0: f64,
    pub options: SeriesOptions,
    family: Family,
}

impl Hypergeometric {
    pub fn new(rs: RootSystem, m: MultiplicityFunction) -> Result<Self> {
        let weyl = weyl_group(&rs)?;
        let rho = rho(&rs, &m);
        let family = if m.is_zero() {
            Family::Flat
        } else if m.is_geometric_complex(&rs) {
            Family::Complex
        } else {
            Family::General
        };
        let kappa0 = cfunction::compute_kappa0(&rs, &m, &rho)?;
        Ok(Self { rs, m, weyl, rho, kappa0, options: SeriesOptions::default(), family })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    pub fn rho_norm_sq(&self) -> f64 {
        self.rho.norm_squared()
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.order()
    }

    /// `m_α` over positive roots, paired with the root.
    pub(crate) fn weighted_roots(&self) -> impl Iterator<Item = (f64, &PositiveRoot)> {
        self.rs.positive.iter().enumerate().map(|(i, p)| (self.m.of(&self.rs, i), p))
    }

    /// Growth order of the Plancherel density, `Σ_{α∈Δ⁺} m_α`.
    pub fn density_degree(&self) -> f64 {
        self.weighted_roots().map(|(m, _)| m).sum()
    }

    /// `δ(m; a) = Π |a^α − a^{−α}|^{m_α}` on A.
    pub fn delta(&self, h: &Vector) -> f64 {
        self.weighted_roots()
            .map(|(m, p)| (2.0 * p.eval(h).sinh()).abs().powf(m))
            .product()
    }

    /// `Π (a^α − a^{−α})^{m_α/2}`, holomorphic in `H` when every `m_α/2` is
    /// an integer; for other multiplicities the principal branch is used.
    pub fn delta_sqrt(&self, h: &CVector) -> Complex64 {
        self.weighted_roots()
            .filter(|(m, _)| *m != 0.0)
            .map(|(m, p)| {
                let s = 2.0 * cdot2(h, &complexify(&p.vector)).sinh();
                let half = 0.5 * m;
                if half == half.round() {
                    s.powi(half as i32)
                } else {
                    s.powf(half)
                }
            })
            .product()
    }

    /// `(λ,λ) − (ρ,ρ)`, the eigenvalue of L(m) on φ_λ.
    pub fn eigenvalue(&self, lambda: &CVector) -> Complex64 {
        cdot2(lambda, lambda) - self.rho_norm_sq()
    }

    pub fn weyl_images(&self, lambda: &CVector) -> Vec<(CVector, i8)> {
        self.weyl.iter().map(|(w, s)| (cmul(w, lambda), s)).collect()
    }

    /// Generic perturbation direction, away from every wall of the supported types.
    pub(crate) fn generic_direction(&self) -> Vector {
        if self.rs.rank == 1 {
            Vector::new(1.0, 0.0)
        } else {
            let t = 15f64.to_radians();
            Vector::new(t.cos(), t.sin())
        }
    }
}
