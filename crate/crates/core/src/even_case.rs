//! Even multiplicities: the polynomial `1/c`, the constant coefficient
//! operator Ψ_A, the operator `D = δ^{1/2}Ψ_A` for m ≡ 2, and the Abel
//! inversion identity `D𝒜f = |W|δf`.

use serde::{Deserialize, Serialize};

use crate::hypergeo::{cdot2, Hypergeometric, Method, SpectralParameter, TorusPoint};
use crate::transform::HyperTransform;
use crate::{cdot, complexify, CVector, Complex64, Error, Result, Vector};

pub use crate::hypergeo::inv_c_polynomial;

/// One factor `−½∂(H_α) + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub root: [f64; 2],
    /// `H_α = 2α/(α,α)`, the direction of differentiation.
    pub coroot: [f64; 2],
    pub shift: f64,
}

impl Factor {
    fn coroot(&self) -> Vector {
        Vector::new(self.coroot[0], self.coroot[1])
    }

    /// Eigenvalue on `e^{μ(H)}`.
    pub fn symbol(&self, mu: &CVector) -> Complex64 {
        -0.5 * cdot(mu, &self.coroot()) + self.shift
    }
}

/// `κ Π (−½∂(H_α) + k)`, optionally preceded by multiplication with `δ^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialPolynomialOperator {
    pub name: String,
    pub root_system: String,
    pub multiplicities: Vec<f64>,
    pub factors: Vec<Factor>,
    pub kappa: f64,
    pub delta_sqrt_prefactor: bool,
}

impl ExponentialPolynomialOperator {
    /// The constant coefficient part acting on `e^{μ(H)}`.
    pub fn symbol(&self, mu: &CVector) -> Complex64 {
        self.factors.iter().map(|f| f.symbol(mu)).product::<Complex64>() * self.kappa
    }

    fn prefactor(&self, hg: &Hypergeometric, h: &CVector) -> Complex64 {
        if self.delta_sqrt_prefactor {
            hg.delta_sqrt(h)
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// The operator applied to `e^{μ(H)}`, evaluated at `h`.
    pub fn apply_exponential(&self, hg: &Hypergeometric, mu: &CVector, h: &CVector) -> Complex64 {
        self.prefactor(hg, h) * self.symbol(mu) * cdot2(mu, h).exp()
    }

    /// The operator applied to `Σ b_j e^{μ_j(H)}`, evaluated at `h`.
    pub fn apply_spectral(&self, hg: &Hypergeometric, terms: &[(CVector, Complex64)], h: &CVector) -> Complex64 {
        let s: Complex64 = terms.iter().map(|(mu, b)| b * self.symbol(mu) * cdot2(mu, h).exp()).sum();
        self.prefactor(hg, h) * s
    }

    /// The operator applied to a black-box function by nested fourth-order
    /// central differences with step `step` along each coroot.
    pub fn apply_fd<F>(&self, hg: &Hypergeometric, f: F, h: &CVector, step: f64) -> Result<Complex64>
    where
        F: Fn(&CVector) -> Result<Complex64>,
    {
        let core = nested(&self.factors, &f, h, step)?;
        Ok(self.prefactor(hg, h) * core * self.kappa)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn nested<F>(factors: &[Factor], f: &F, h: &CVector, step: f64) -> Result<Complex64>
where
    F: Fn(&CVector) -> Result<Complex64>,
{
    let Some((first, rest)) = factors.split_first() else {
        return f(h);
    };
    let dir = complexify(&first.coroot());
    let g = |k: f64| nested(rest, f, &(h + dir.scale(k * step)), step);
    let (m2, m1, p1, p2) = (g(-2.0)?, g(-1.0)?, g(1.0)?, g(2.0)?);
    let deriv = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * step);
    let center = if first.shift != 0.0 { g(0.0)? } else { Complex64::new(0.0, 0.0) };
    Ok(-0.5 * deriv + first.shift * center)
}

fn require_even(hg: &Hypergeometric) -> Result<()> {
    if !hg.m.is_even(&hg.rs) {
        return Err(Error::InvalidInput("needs even multiplicities on a reduced system".into()));
    }
    Ok(())
}

fn require_complex(hg: &Hypergeometric) -> Result<()> {
    if !hg.m.is_geometric_complex(&hg.rs) {
        return Err(Error::InvalidInput("needs m ≡ 2 on a reduced system".into()));
    }
    Ok(())
}

/// `Ψ_A = κ(m) Π_{α∈Δ⁺} Π_{k=0}^{m_α/2−1} (−½∂(H_α) + k)`.
pub fn build_psi_a_operator(hg: &Hypergeometric) -> Result<ExponentialPolynomialOperator> {
    require_even(hg)?;
    let rho = complexify(&hg.rho);
    let mut factors = Vec::new();
    let mut kappa = 1.0;
    for (i, p) in hg.rs.reduced_positive() {
        let half = (hg.m.of(&hg.rs, i) / 2.0).round() as u32;
        let ra = p.lambda_alpha(&rho).re;
        let h = p.coroot();
        for k in 0..half {
            factors.push(Factor { root: [p.vector[0], p.vector[1]], coroot: [h[0], h[1]], shift: k as f64 });
            kappa /= ra + k as f64;
        }
    }
    Ok(ExponentialPolynomialOperator {
        name: "psi_a".into(),
        root_system: hg.rs.kind.to_string(),
        multiplicities: hg.m.values.clone(),
        factors,
        kappa,
        delta_sqrt_prefactor: false,
    })
}

/// `D = δ^{1/2}Ψ_A = ((−1)^{|Δ⁺|}/π(ρ)) δ^{1/2} π(∂)` for m ≡ 2.
pub fn build_d_operator(hg: &Hypergeometric) -> Result<ExponentialPolynomialOperator> {
    require_complex(hg)?;
    let psi = build_psi_a_operator(hg)?;
    Ok(ExponentialPolynomialOperator { name: "d".into(), delta_sqrt_prefactor: true, ..psi })
}

/// `φ_λ(a) = c(λ) δ(a)^{−1/2} Σ_w sign(w) a^{wλ}` for m ≡ 2.
pub fn phi_complex(hg: &Hypergeometric, lambda: &SpectralParameter, a: &TorusPoint) -> Result<Complex64> {
    require_complex(hg)?;
    hg.hypergeometric_function(lambda, a, Method::ClosedForm)
}

/// `(δ(a)φ_λ(a), c(λ)c(−λ) Dψ_λ(a))` with `ψ_λ = Σ_w e^{wλ}`; φ_λ is taken
/// from `method`.
pub fn delta_phi_identity(hg: &Hypergeometric, lambda: &CVector, h: &CVector, method: Method) -> Result<(Complex64, Complex64)> {
    let d = build_d_operator(hg)?;
    let ds = hg.delta_sqrt(h);
    let phi = hg.prepare(&SpectralParameter::new(*lambda), method)?.eval_log(h)?;
    let lhs = ds * ds * phi;
    let cc = hg.c(lambda)? * hg.c(&(-lambda))?;
    let rhs: Complex64 = hg.weyl_images(lambda).iter().map(|(wl, _)| d.apply_exponential(hg, wl, h)).sum();
    Ok((lhs, cc * rhs))
}

/// Which way `D` is applied to the spectral representation of `𝒜f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FiniteDifference,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelInversionReport {
    /// Largest `|D𝒜f(a) − |W|δ(a)f(a)|` relative to the largest `|W|δf`.
    pub max_relative_residual: f64,
    pub points: usize,
}

/// Compares `D𝒜f` with `|W|δf` at chamber grid points with `δ ≥ min_delta`,
/// using at most `max_points` of them.
pub fn abel_inversion_check(
    tr: &HyperTransform,
    f: &crate::transform::GridFunction,
    route: Route,
    min_delta: f64,
    max_points: usize,
) -> Result<AbelInversionReport> {
    let hg = tr.hg;
    let d = build_d_operator(hg)?;
    let big_f = tr.forward(f)?;
    let step = 1e-2;
    let reach = 2.0 * step * d.factors.len() as f64;
    let mut idx: Vec<usize> = (0..tr.space.len())
        .filter(|&i| {
            let x = tr.space.nodes[i];
            hg.rs.in_positive_chamber(&x)
                && hg.delta(&x) >= min_delta
                && crate::hypergeo::wall_clearance(hg, &x) > 2.0 * reach
        })
        .collect();
    if idx.is_empty() {
        return Err(Error::InvalidInput("no regular grid points with δ above the threshold".into()));
    }
    let stride = idx.len().div_ceil(max_points.max(1));
    idx = idx.into_iter().step_by(stride).collect();
    let w = tr.weyl_order();
    let spectral_terms: Vec<(CVector, Complex64)> = match route {
        Route::Spectral => {
            let dual = crate::transform::dual_factor(tr.spectrum.rank);
            tr.spectrum
                .nodes
                .iter()
                .zip(&tr.spectrum.weights)
                .zip(&big_f.values)
                .map(|((l, q), v)| (complexify(l) * Complex64::i(), v * q * dual))
                .collect()
        }
        Route::FiniteDifference => Vec::new(),
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &i in &idx {
        let x = tr.space.nodes[i];
        let h = complexify(&x);
        let lhs = match route {
            Route::FiniteDifference => {
                d.apply_fd(hg, |z| Ok(tr.abel_points(&big_f, std::slice::from_ref(z))?[0]), &h, step)?
            }
            Route::Spectral => d.apply_spectral(hg, &spectral_terms, &h),
        };
        let rhs = w * hg.delta(&x) * f.values[i];
        worst = worst.max((lhs - rhs).norm());
        scale = scale.max(rhs.norm());
    }
    Ok(AbelInversionReport {
        max_relative_residual: if scale == 0.0 { worst } else { worst / scale },
        points: idx.len(),
    })
}
