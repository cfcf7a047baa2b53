//! Euclidean and hypergeometric Fourier transforms by quadrature, the Abel
//! transform, the τ-action and the unitary map Λ.
//!
//! Measures: `da` is Lebesgue measure on 𝔞 and `dλ = (2π)^{−r} dξ` on 𝔞*, so
//! the Euclidean transform `∫ f(x) e^{−iλ(x)} dx` is unitary with constant one.

pub mod grid;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hypergeo::{apply_l_adaptive, Hypergeometric, Method, SpectralParameter};
use crate::{complexify, CVector, Complex64, Error, Result, Vector};

pub use grid::{gauss_legendre, GridSpec, QuadratureGrid, Reduction, Scheme};

/// Boundary values above this fraction of the maximum count as insufficient decay.
pub const DECAY_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    WInvariant,
    TauWInvariant,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridDomain {
    /// Functions on A, sampled over 𝔞.
    Space,
    /// Functions on 𝔞*.
    Spectrum,
}

/// A sampled function on a quadrature grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub grid: QuadratureGrid,
    pub domain: GridDomain,
    pub symmetry: Symmetry,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_fn<F>(grid: QuadratureGrid, domain: GridDomain, symmetry: Symmetry, f: F) -> Self
    where
        F: Fn(&Vector) -> Complex64 + Sync,
    {
        let values = grid.nodes.par_iter().map(&f).collect();
        Self { grid, domain, symmetry, values }
    }

    pub fn zeros(grid: QuadratureGrid, domain: GridDomain, symmetry: Symmetry) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, domain, symmetry, values }
    }

    /// `Σ w |v|²`, the Lebesgue L² norm squared without the (2π)^{−r} factor.
    pub fn lebesgue_norm_sq(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| w * v.norm_sqr()).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }
}

/// Fails with `InsufficientDecay` when `g` is not small on the grid boundary.
pub fn check_decay(grid: &QuadratureGrid, g: &[f64]) -> Result<()> {
    let max = g.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(());
    }
    let edge = grid.boundary_nodes().iter().map(|&i| g[i]).fold(0.0, f64::max);
    if edge > DECAY_TOL * max {
        return Err(Error::InsufficientDecay(edge / max));
    }
    Ok(())
}

/// `(2π)^{−r}`.
pub fn dual_factor(rank: usize) -> f64 {
    (2.0 * PI).powi(-(rank as i32))
}

fn dot(l: &Vector, x: &Vector) -> f64 {
    l[0] * x[0] + l[1] * x[1]
}

/// `ℱ_A f(λ) = ∫ f(x) e^{−iλ(x)} dx` on the nodes of `lambda_grid`.
pub fn euclidean_fourier(f: &GridFunction, lambda_grid: &QuadratureGrid) -> Result<GridFunction> {
    let mag: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
    check_decay(&f.grid, &mag)?;
    Ok(GridFunction::from_fn(lambda_grid.clone(), GridDomain::Spectrum, f.symmetry, |l| {
        f.grid
            .nodes
            .iter()
            .zip(&f.grid.weights)
            .zip(&f.values)
            .map(|((x, w), v)| v * Complex64::from_polar(*w, -dot(l, x)))
            .sum()
    }))
}

/// `ℱ_A^{−1} F(z) = ∫ F(λ) e^{iλ(z)} dλ` at a complex point.
pub fn euclidean_inverse_at(big_f: &GridFunction, z: &CVector) -> Complex64 {
    let s: Complex64 = big_f
        .grid
        .nodes
        .iter()
        .zip(&big_f.grid.weights)
        .zip(&big_f.values)
        .map(|((l, w), v)| v * w * (Complex64::i() * (z[0] * l[0] + z[1] * l[1])).exp())
        .sum();
    s * dual_factor(big_f.grid.rank)
}

/// A Fourier multiplier on 𝔞*.
pub struct SpectralMultiplier<'a> {
    pub name: String,
    symbol: Box<dyn Fn(&Vector) -> Result<Complex64> + Sync + 'a>,
}

impl<'a> SpectralMultiplier<'a> {
    pub fn new(name: &str, symbol: impl Fn(&Vector) -> Result<Complex64> + Sync + 'a) -> Self {
        Self { name: name.to_string(), symbol: Box::new(symbol) }
    }

    /// `e^{−t(|λ|² + |ρ|²)}`.
    pub fn heat(hg: &'a Hypergeometric, t: f64) -> Self {
        let r2 = hg.rho_norm_sq();
        Self::new("heat", move |l| Ok(Complex64::new((-t * (l.norm_squared() + r2)).exp(), 0.0)))
    }

    /// `e^{t(|λ|² + |ρ|²)}`, the inverse of the heat multiplier.
    pub fn exp_growth(hg: &'a Hypergeometric, t: f64) -> Self {
        let r2 = hg.rho_norm_sq();
        Self::new("exp_growth", move |l| Ok(Complex64::new((t * (l.norm_squared() + r2)).exp(), 0.0)))
    }

    /// `1/c(m; −iλ)`, the symbol of Ψ_A.
    pub fn inv_c(hg: &'a Hypergeometric) -> Self {
        Self::new("inv_c", move |l| hg.inv_c(&(complexify(l) * Complex64::new(0.0, -1.0))))
    }

    pub fn symbol(&self, l: &Vector) -> Result<Complex64> {
        let v = (self.symbol)(l)?;
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("multiplier {} is not finite at ({}, {})", self.name, l[0], l[1])));
        }
        Ok(v)
    }

    pub fn apply(&self, big_f: &GridFunction) -> Result<GridFunction> {
        let values = big_f
            .grid
            .nodes
            .iter()
            .zip(&big_f.values)
            .map(|(l, v)| Ok(self.symbol(l)? * v))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFunction { values, ..big_f.clone() })
    }
}

/// Which function of λ is integrated against in the inversion formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `φ_{iλ}(a)`.
    Phi,
    /// `φ_{iλ}(a) δ^{1/2}(a)`, holomorphic in the complex case.
    PhiTimesDeltaSqrt,
}

/// Result of a Plancherel comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlancherelReport {
    /// `‖f‖²` in L²(A, dμ).
    pub lhs: f64,
    /// `‖ℱ(m; f)/|W|‖²` in L²(𝔞*, dν).
    pub rhs: f64,
}

impl PlancherelReport {
    pub fn defect(&self) -> f64 {
        if self.lhs == 0.0 && self.rhs == 0.0 {
            0.0
        } else {
            (self.rhs / self.lhs - 1.0).abs()
        }
    }
}

/// Residual of the symbol identity at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolResidual {
    pub lambda: [f64; 2],
    pub transform_of_lf: Complex64,
    pub symbol_times_transform: Complex64,
    pub residual: f64,
}

/// The hypergeometric Fourier transform on a pair of quadrature grids.
pub struct HyperTransform<'a> {
    pub hg: &'a Hypergeometric,
    pub space: QuadratureGrid,
    pub spectrum: QuadratureGrid,
    space_red: Option<Reduction>,
    spec_red: Option<Reduction>,
    /// `|c(m; iλ)|^{−2}` at the spectral nodes.
    density: Vec<f64>,
    /// `1/c(m; −iλ)` at the spectral nodes.
    inv_c_minus: Vec<Complex64>,
}

impl<'a> HyperTransform<'a> {
    pub fn new(hg: &'a Hypergeometric, space: QuadratureGrid, spectrum: QuadratureGrid) -> Result<Self> {
        if space.rank != hg.rank() || spectrum.rank != hg.rank() {
            return Err(Error::InvalidInput(format!(
                "grid ranks ({}, {}) do not match the root system rank {}",
                space.rank,
                spectrum.rank,
                hg.rank()
            )));
        }
        let space_red = space.reduction(&hg.rs, &hg.weyl);
        let spec_red = spectrum.reduction(&hg.rs, &hg.weyl);
        let density = spectrum.nodes.iter().map(|l| hg.plancherel_density(l)).collect::<Result<Vec<_>>>()?;
        let inv_c_minus = spectrum
            .nodes
            .iter()
            .map(|l| hg.inv_c(&(complexify(l) * Complex64::new(0.0, -1.0))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { hg, space, spectrum, space_red, spec_red, density, inv_c_minus })
    }

    /// Grids from specs, built W-symmetric when the scheme allows it.
    pub fn from_specs(hg: &'a Hypergeometric, space: GridSpec, spectrum: GridSpec) -> Result<Self> {
        Self::new(hg, QuadratureGrid::new(hg.rank(), space)?, QuadratureGrid::new(hg.rank(), spectrum)?)
    }

    pub fn weyl_order(&self) -> f64 {
        self.hg.weyl_order() as f64
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Samples `f` on the spatial grid.
    pub fn sample<F>(&self, f: F) -> GridFunction
    where
        F: Fn(&Vector) -> f64 + Sync,
    {
        GridFunction::from_fn(self.space.clone(), GridDomain::Space, Symmetry::WInvariant, |x| {
            Complex64::new(f(x), 0.0)
        })
    }

    fn check_space(&self, f: &GridFunction) -> Result<()> {
        if f.domain != GridDomain::Space || f.grid.spec != self.space.spec {
            return Err(Error::SchemaMismatch("function is not sampled on the spatial grid of this transform".into()));
        }
        Ok(())
    }

    fn check_spectrum(&self, big_f: &GridFunction) -> Result<()> {
        if big_f.domain != GridDomain::Spectrum || big_f.grid.spec != self.spectrum.spec {
            return Err(Error::SchemaMismatch("function is not sampled on the spectral grid of this transform".into()));
        }
        Ok(())
    }

    /// Nodes and effective weights for integrating a W-invariant function over 𝔞.
    fn space_terms(&self, f: &GridFunction) -> Vec<(Vector, Complex64)> {
        let g = &self.space;
        match &self.space_red {
            Some(red) => {
                let k = red.image.len() as f64;
                red.reps
                    .iter()
                    .map(|&i| {
                        let avg: Complex64 = if f.symmetry == Symmetry::WInvariant {
                            f.values[i]
                        } else {
                            red.image.iter().map(|row| f.values[row[i]]).sum::<Complex64>() / k
                        };
                        (g.nodes[i], avg * g.weights[i] * k)
                    })
                    .collect()
            }
            None => g.nodes.iter().zip(&g.weights).zip(&f.values).map(|((x, w), v)| (*x, v * w)).collect(),
        }
    }

    /// Spectral nodes and weights (including `(2π)^{−r}` and, for a reduced grid,
    /// the orbit size) for W-invariant integrands; the third entry is the node index.
    fn spectral_terms(&self) -> Vec<(Vector, f64, usize)> {
        let g = &self.spectrum;
        let d = dual_factor(g.rank);
        match &self.spec_red {
            Some(red) => {
                let k = red.image.len() as f64;
                red.reps.iter().map(|&i| (g.nodes[i], g.weights[i] * d * k, i)).collect()
            }
            None => (0..g.len()).map(|i| (g.nodes[i], g.weights[i] * d, i)).collect(),
        }
    }

    /// `‖f‖²` in L²(A, δ da).
    pub fn norm_sq_dmu(&self, f: &GridFunction) -> f64 {
        let g = &self.space;
        (0..g.len()).map(|i| g.weights[i] * f.values[i].norm_sqr() * self.hg.delta(&g.nodes[i])).sum()
    }

    /// `‖f‖₁` in L¹(A, δ da).
    pub fn norm_l1_dmu(&self, f: &GridFunction) -> f64 {
        let g = &self.space;
        (0..g.len()).map(|i| g.weights[i] * f.values[i].norm() * self.hg.delta(&g.nodes[i])).sum()
    }

    /// `‖F‖²` in L²(𝔞*, |c(iλ)|^{−2} dλ).
    pub fn norm_sq_dnu(&self, big_f: &GridFunction) -> f64 {
        let d = dual_factor(self.spectrum.rank);
        (0..self.spectrum.len())
            .map(|i| self.spectrum.weights[i] * big_f.values[i].norm_sqr() * self.density[i])
            .sum::<f64>()
            * d
    }

    /// `‖F‖²` in L²(𝔞*, dλ).
    pub fn norm_sq_dlambda(&self, big_f: &GridFunction) -> f64 {
        big_f.lebesgue_norm_sq() * dual_factor(big_f.grid.rank)
    }

    /// `ℱ(m; f)(λ) = ∫ f(a) φ_{−iλ}(a) δ(a) da` at arbitrary real λ.
    pub fn forward_at(&self, f: &GridFunction, lambdas: &[Vector]) -> Result<Vec<Complex64>> {
        self.check_space(f)?;
        let g: Vec<f64> = (0..self.space.len())
            .map(|i| f.values[i].norm() * self.hg.delta(&self.space.nodes[i]).sqrt())
            .collect();
        check_decay(&self.space, &g)?;
        let terms = self.space_terms(f);
        lambdas
            .par_iter()
            .map(|l| {
                let phi = self.hg.prepare(&SpectralParameter::imaginary(&(-l)), Method::Auto)?;
                let mut s = Complex64::new(0.0, 0.0);
                for (x, q) in &terms {
                    if *q != Complex64::new(0.0, 0.0) {
                        s += q * phi.eval_times_delta(x)?;
                    }
                }
                Ok(s)
            })
            .collect()
    }

    /// `ℱ(m; f)` on the spectral grid.
    pub fn forward(&self, f: &GridFunction) -> Result<GridFunction> {
        let n = self.spectrum.len();
        let values = match &self.spec_red {
            Some(red) => {
                let nodes: Vec<Vector> = red.reps.iter().map(|&i| self.spectrum.nodes[i]).collect();
                red.spread(&self.forward_at(f, &nodes)?, n)
            }
            None => self.forward_at(f, &self.spectrum.nodes)?,
        };
        Ok(GridFunction { grid: self.spectrum.clone(), domain: GridDomain::Spectrum, symmetry: Symmetry::WInvariant, values })
    }

    /// `(1/|W|²) ∫ F(λ) K_λ(a) |c(iλ)|^{−2} dλ` at complex points `a = exp(H)`,
    /// with `K_λ = φ_{iλ}` or `φ_{iλ} δ^{1/2}`.
    pub fn inverse_points(&self, big_f: &GridFunction, points: &[CVector], kernel: Kernel) -> Result<Vec<Complex64>> {
        self.check_spectrum(big_f)?;
        let mag: Vec<f64> = (0..self.spectrum.len()).map(|i| big_f.values[i].norm() * self.density[i].sqrt()).collect();
        check_decay(&self.spectrum, &mag)?;
        let terms: Vec<(Vector, f64, usize)> = if big_f.symmetry == Symmetry::WInvariant {
            self.spectral_terms()
        } else {
            let d = dual_factor(self.spectrum.rank);
            (0..self.spectrum.len()).map(|i| (self.spectrum.nodes[i], self.spectrum.weights[i] * d, i)).collect()
        };
        let w2 = self.weyl_order().powi(2);
        let partial: Vec<Vec<Complex64>> = terms
            .par_iter()
            .map(|(l, q, i)| {
                let coef = big_f.values[*i] * (q * self.density[*i] / w2);
                if coef == Complex64::new(0.0, 0.0) {
                    return Ok(vec![Complex64::new(0.0, 0.0); points.len()]);
                }
                let phi = self.hg.prepare(&SpectralParameter::imaginary(l), Method::Auto)?;
                points
                    .iter()
                    .map(|h| {
                        Ok(coef
                            * match kernel {
                                Kernel::Phi => phi.eval_log(h)?,
                                Kernel::PhiTimesDeltaSqrt => phi.eval_times_delta_sqrt(h)?,
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![Complex64::new(0.0, 0.0); points.len()];
        for row in &partial {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// Inversion formula at a single point.
    pub fn inverse_at(&self, big_f: &GridFunction, h: &CVector) -> Result<Complex64> {
        Ok(self.inverse_points(big_f, std::slice::from_ref(h), Kernel::Phi)?[0])
    }

    /// Inversion formula on the spatial grid.
    pub fn inverse(&self, big_f: &GridFunction) -> Result<GridFunction> {
        let n = self.space.len();
        let values = match &self.space_red {
            Some(red) => {
                let pts: Vec<CVector> = red.reps.iter().map(|&i| complexify(&self.space.nodes[i])).collect();
                red.spread(&self.inverse_points(big_f, &pts, Kernel::Phi)?, n)
            }
            None => {
                let pts: Vec<CVector> = self.space.nodes.iter().map(complexify).collect();
                self.inverse_points(big_f, &pts, Kernel::Phi)?
            }
        };
        Ok(GridFunction { grid: self.space.clone(), domain: GridDomain::Space, symmetry: Symmetry::WInvariant, values })
    }

    pub fn plancherel(&self, f: &GridFunction) -> Result<PlancherelReport> {
        let big_f = self.forward(f)?;
        Ok(self.plancherel_with(f, &big_f))
    }

    pub fn plancherel_with(&self, f: &GridFunction, big_f: &GridFunction) -> PlancherelReport {
        let lhs = self.norm_sq_dmu(f);
        let rhs = self.norm_sq_dnu(big_f) / self.weyl_order().powi(2);
        PlancherelReport { lhs, rhs }
    }

    /// `Σ_λ b(λ) e^{iλ(z)}` over the full spectral grid, for coefficients that
    /// already include the quadrature weights.
    fn flat_synthesis(&self, coef: &[Complex64], points: &[CVector]) -> Vec<Complex64> {
        let nodes = &self.spectrum.nodes;
        points
            .par_iter()
            .map(|z| {
                nodes
                    .iter()
                    .zip(coef)
                    .filter(|(_, b)| **b != Complex64::new(0.0, 0.0))
                    .map(|(l, b)| b * (Complex64::i() * (z[0] * l[0] + z[1] * l[1])).exp())
                    .sum()
            })
            .collect()
    }

    fn quadrature_coefficients(&self, big_f: &GridFunction, mult: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let d = dual_factor(self.spectrum.rank);
        (0..self.spectrum.len()).map(|i| big_f.values[i] * self.spectrum.weights[i] * d * mult(i)).collect()
    }

    /// Abel transform `𝒜f(a) = ∫ ℱ(m; f)(λ) a^{iλ} dλ` on the spatial grid.
    pub fn abel(&self, f: &GridFunction) -> Result<GridFunction> {
        let big_f = self.forward(f)?;
        self.abel_from(&big_f)
    }

    pub fn abel_from(&self, big_f: &GridFunction) -> Result<GridFunction> {
        let pts: Vec<CVector> = self.space.nodes.iter().map(complexify).collect();
        let values = self.abel_points(big_f, &pts)?;
        Ok(GridFunction { grid: self.space.clone(), domain: GridDomain::Space, symmetry: Symmetry::WInvariant, values })
    }

    /// `𝒜f(exp z) = ∫ F(λ) e^{iλ(z)} dλ` at complex points, with `F = ℱ(m; f)`.
    pub fn abel_points(&self, big_f: &GridFunction, points: &[CVector]) -> Result<Vec<Complex64>> {
        self.check_spectrum(big_f)?;
        let coef = self.quadrature_coefficients(big_f, |_| Complex64::new(1.0, 0.0));
        Ok(self.flat_synthesis(&coef, points))
    }

    /// `(1/|W|) ∫ F(λ) m(λ) / c(m; −iλ) e^{iλ(z)} dλ` at complex points; `m` is an
    /// extra multiplier (e.g. the heat factor).
    pub fn lambda_points(&self, big_f: &GridFunction, points: &[CVector], extra: Option<&SpectralMultiplier>) -> Result<Vec<Complex64>> {
        let coef = self.lambda_coefficients(big_f, extra)?;
        Ok(self.flat_synthesis(&coef, points))
    }

    /// Per-node coefficients `b(λ)` with `ΛF(z) = Σ b(λ) e^{iλ(z)}` over the
    /// full spectral grid.
    pub fn lambda_coefficients(&self, big_f: &GridFunction, extra: Option<&SpectralMultiplier>) -> Result<Vec<Complex64>> {
        self.check_spectrum(big_f)?;
        let w = self.weyl_order();
        let mults: Vec<Complex64> = match extra {
            Some(m) => self.spectrum.nodes.iter().map(|l| m.symbol(l)).collect::<Result<_>>()?,
            None => vec![Complex64::new(1.0, 0.0); self.spectrum.len()],
        };
        Ok(self.quadrature_coefficients(big_f, |i| self.inv_c_minus[i] * mults[i] / w))
    }

    /// `Λf = (1/|W|) ℱ_A^{−1} Ψ_𝔞 ℱ(m; f)` on the spatial grid.
    pub fn lambda_map(&self, f: &GridFunction) -> Result<GridFunction> {
        let big_f = self.forward(f)?;
        self.lambda_map_from(&big_f)
    }

    pub fn lambda_map_from(&self, big_f: &GridFunction) -> Result<GridFunction> {
        let pts: Vec<CVector> = self.space.nodes.iter().map(complexify).collect();
        let values = self.lambda_points(big_f, &pts, None)?;
        Ok(GridFunction { grid: self.space.clone(), domain: GridDomain::Space, symmetry: Symmetry::TauWInvariant, values })
    }

    /// `τ_s F(λ) = c_{s,e}(m; λ) F(s^{−1}λ)`; `s` indexes the Weyl group.
    pub fn tau_action(&self, s: usize, big_f: &GridFunction) -> Result<GridFunction> {
        self.check_spectrum(big_f)?;
        let red = self
            .spec_red
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("the τ-action needs a W-symmetric spectral grid".into()))?;
        let weyl = &self.hg.weyl;
        let sinv = weyl.inverse(s);
        let values = (0..self.spectrum.len())
            .map(|i| {
                let c = self.hg.c_ratio(s, weyl.identity, &self.spectrum.nodes[i])?;
                Ok(c * big_f.values[red.image[sinv][i]])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFunction { values, symmetry: Symmetry::None, ..big_f.clone() })
    }

    /// Residuals `|ℱ(L f)(λ) + (|λ|² + |ρ|²) ℱ f(λ)|`, with L(m) applied by
    /// finite differences to the closure `f`.
    pub fn symbol_laplace_check<F>(&self, f: F, lambdas: &[Vector]) -> Result<Vec<SymbolResidual>>
    where
        F: Fn(&Vector) -> f64 + Sync,
    {
        let fg = self.sample(&f);
        let lf = self.apply_l_grid(&f)?;
        let a = self.forward_at(&lf, lambdas)?;
        let b = self.forward_at(&fg, lambdas)?;
        let r2 = self.hg.rho_norm_sq();
        Ok(lambdas
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(l, (x, y))| {
                let s = -(l.norm_squared() + r2) * y;
                SymbolResidual { lambda: [l[0], l[1]], transform_of_lf: *x, symbol_times_transform: s, residual: (x - s).norm() }
            })
            .collect())
    }

    /// `L(m)f` on the spatial grid by finite differences, with the step shrunk
    /// near walls. `f` must be W-invariant.
    pub fn apply_l_grid<F>(&self, f: F) -> Result<GridFunction>
    where
        F: Fn(&Vector) -> f64 + Sync,
    {
        let lf_vals = self
            .space
            .nodes
            .par_iter()
            .map(|x| {
                if self.space_red.as_ref().is_some_and(|_| !self.hg.rs.in_positive_chamber(x)) {
                    // filled from the chamber below
                    return Ok(Complex64::new(0.0, 0.0));
                }
                apply_l_adaptive(self.hg, |h| Ok(Complex64::new(f(&h.map(|z| z.re)), 0.0)), &complexify(x), 1e-2)
            })
            .collect::<Result<Vec<_>>>()?;
        let lf_vals = match &self.space_red {
            Some(red) => red.spread(&red.reps.iter().map(|&i| lf_vals[i]).collect::<Vec<_>>(), self.space.len()),
            None => lf_vals,
        };
        Ok(GridFunction { grid: self.space.clone(), domain: GridDomain::Space, symmetry: Symmetry::WInvariant, values: lf_vals })
    }

    /// Largest observed `|ℱ(m; f)(λ)| / ‖f‖₁` over the spectral grid.
    pub fn fitted_c1(&self, f: &GridFunction, big_f: &GridFunction) -> f64 {
        let n1 = self.norm_l1_dmu(f);
        if n1 == 0.0 {
            return 0.0;
        }
        big_f.sup_norm() / n1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, MultiplicityFunction, RootSystemType};
    use crate::testfn::TestFunction;

    fn ctx(kind: RootSystemType, m: &[f64]) -> Hypergeometric {
        let rs = build_root_system(kind, 1.0).unwrap();
        let m = MultiplicityFunction::from_slice(&rs, m).unwrap();
        Hypergeometric::new(rs, m).unwrap()
    }

    fn transform(hg: &Hypergeometric, width: f64, n: usize) -> HyperTransform<'_> {
        let f = TestFunction::gaussian(width);
        let rank = hg.rank();
        let (rx, rl) = f.radii(hg);
        let mut s = GridSpec::default_for(rank, rx);
        let mut l = GridSpec::default_for(rank, rl);
        s.n = n;
        l.n = n;
        HyperTransform::from_specs(hg, s, l).unwrap()
    }

    #[test]
    fn euclidean_gaussian() {
        // ∫ e^{−x²/2} e^{−iλx} dx = √(2π) e^{−λ²/2}
        let g = QuadratureGrid::new(1, GridSpec::new(Scheme::GaussLegendre, 128, 12.0)).unwrap();
        let lg = QuadratureGrid::new(1, GridSpec::new(Scheme::GaussLegendre, 64, 8.0)).unwrap();
        let shift = 0.7;
        for s in [0.0, shift] {
            let f = GridFunction::from_fn(g.clone(), GridDomain::Space, Symmetry::None, |x| {
                Complex64::new((-(x[0] - s).powi(2) / 2.0).exp(), 0.0)
            });
            let ff = euclidean_fourier(&f, &lg).unwrap();
            for (l, v) in lg.nodes.iter().zip(&ff.values) {
                let expected = (2.0 * PI).sqrt() * (-l[0] * l[0] / 2.0).exp();
                assert!((v.norm() - expected).abs() < 1e-12);
                let phase = Complex64::from_polar(1.0, -l[0] * s);
                assert!((v - phase * expected).norm() < 1e-12);
            }
            let ratio = (ff.lebesgue_norm_sq() / (2.0 * PI)) / f.lebesgue_norm_sq();
            assert!((ratio - 1.0).abs() < 1e-12);
            let back = euclidean_inverse_at(&ff, &complexify(&Vector::new(0.3, 0.0)));
            assert!((back.re - (-(0.3f64 - s).powi(2) / 2.0).exp()).abs() < 1e-12);
        }
        let wide = GridFunction::from_fn(g.clone(), GridDomain::Space, Symmetry::None, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(euclidean_fourier(&wide, &lg), Err(Error::InsufficientDecay(_))));
    }

    #[test]
    fn flat_transform_is_symmetrized_euclidean() {
        let hg = ctx(RootSystemType::A1, &[0.0]);
        let t = transform(&hg, 0.8, 64);
        let f = t.sample(|x| (-0.8 * x.norm_squared()).exp());
        let big = t.forward(&f).unwrap();
        for (l, v) in t.spectrum.nodes.iter().zip(&big.values).step_by(7) {
            // 2 ℱ_A f(λ) for even f, closed form √(π/c) e^{−λ²/4c}
            let expected = 2.0 * (PI / 0.8).sqrt() * (-l[0] * l[0] / 3.2).exp();
            assert!((v.re - expected).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
        let p = t.plancherel_with(&f, &big);
        assert!(p.defect() < 1e-10);
        let zero = t.sample(|_| 0.0);
        let z = t.forward(&zero).unwrap();
        assert!(z.sup_norm() == 0.0);
    }

    #[test]
    fn a1_m2_forward_matches_sinh_quadrature() {
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let t = transform(&hg, 1.0, 96);
        let f = t.sample(|x| (-x.norm_squared()).exp());
        let lambdas = [Vector::new(0.3, 0.0), Vector::new(1.7, 0.0), Vector::new(4.0, 0.0)];
        let v = t.forward_at(&f, &lambdas).unwrap();
        // oracle: ∫ e^{−x²} sin(λx)/(λ sinh x) (2 sinh x)² dx on a fine midpoint grid
        for (l, val) in lambdas.iter().zip(&v) {
            let n = 40000;
            let h = 16.0 / n as f64;
            let s: f64 = (0..n)
                .map(|j| {
                    let x = -8.0 + (j as f64 + 0.5) * h;
                    (-x * x).exp() * 4.0 * x.sinh() * (l[0] * x).sin() / l[0] * h
                })
                .sum();
            assert!((val.re - s).abs() < 1e-8 * s.abs().max(1.0), "{} vs {s}", val.re);
            assert!(val.im.abs() < 1e-10);
        }
    }

    #[test]
    fn plancherel_and_inversion_a1() {
        for m in [0.0, 1.0, 2.0] {
            let hg = ctx(RootSystemType::A1, &[m]);
            let t = transform(&hg, 1.0, 128);
            let f = t.sample(|x| (-x.norm_squared()).exp());
            let big = t.forward(&f).unwrap();
            let p = t.plancherel_with(&f, &big);
            assert!(p.defect() < 1e-6, "m={m}: {p:?}");
            let pts: Vec<CVector> = [0.1, 0.5, 1.3].iter().map(|x| complexify(&Vector::new(*x, 0.0))).collect();
            let back = t.inverse_points(&big, &pts, Kernel::Phi).unwrap();
            for (p, v) in pts.iter().zip(&back) {
                let expected = (-p[0].re * p[0].re).exp();
                assert!((v - expected).norm() < 1e-6, "m={m}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn lambda_is_delta_sqrt_for_m2() {
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let t = transform(&hg, 1.0, 128);
        let f = t.sample(|x| (-x.norm_squared()).exp());
        let lf = t.lambda_map(&f).unwrap();
        for (x, v) in t.space.nodes.iter().zip(&lf.values).step_by(5) {
            let expected = 2.0 * x[0].sinh() * (-x[0] * x[0]).exp();
            assert!((v - expected).norm() < 1e-8);
        }
        let iso = t.norm_sq_dlambda(&GridFunction { domain: GridDomain::Spectrum, ..lf.clone() }) / (2.0 * PI).powi(-1);
        assert!((iso / t.norm_sq_dmu(&f) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tau_action_is_a_group_action() {
        let hg = ctx(RootSystemType::A2, &[2.0]);
        let t = transform(&hg, 1.0, 24);
        let big = GridFunction::from_fn(t.spectrum.clone(), GridDomain::Spectrum, Symmetry::None, |l| {
            Complex64::new((-(l[0] - 0.3).powi(2) - l[1] * l[1]).exp(), 0.2 * l[1])
        });
        let w = &hg.weyl;
        for s in 0..w.order() {
            let ts = t.tau_action(s, &big).unwrap();
            // τ(w)F = sign(w) F∘w^{−1} for m ≡ 2
            let red = t.spec_red.as_ref().unwrap();
            for i in 0..big.values.len() {
                let expected = big.values[red.image[w.inverse(s)][i]] * w.sign[s] as f64;
                assert!((ts.values[i] - expected).norm() < 1e-12);
            }
            for u in 0..w.order() {
                let lhs = t.tau_action(w.compose(s, u), &big).unwrap();
                let rhs = t.tau_action(s, &t.tau_action(u, &big).unwrap()).unwrap();
                for (a, b) in lhs.values.iter().zip(&rhs.values) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
            assert!((t.norm_sq_dlambda(&ts) - t.norm_sq_dlambda(&big)).abs() < 1e-12 * t.norm_sq_dlambda(&big));
        }
    }

    #[test]
    fn symbol_identity_flat_and_a1() {
        for m in [0.0, 2.0] {
            let hg = ctx(RootSystemType::A1, &[m]);
            let t = transform(&hg, 1.0, 128);
            let f = |x: &Vector| (-x.norm_squared()).exp();
            let lambdas: Vec<Vector> = (1..=4).map(|k| Vector::new(0.7 * k as f64, 0.0)).collect();
            let res = t.symbol_laplace_check(f, &lambdas).unwrap();
            let n1 = t.norm_l1_dmu(&t.sample(f));
            for r in res {
                let l2 = r.lambda[0] * r.lambda[0];
                assert!(r.residual <= 1e-6 * (1.0 + l2) * n1, "m={m} {r:?}");
            }
        }
    }
}
