//! Heat flow on A and on 𝔞, the Segal–Bargmann transforms, and Fock-space
//! norms by double quadrature over 𝔞_ℂ = 𝔞 + i𝔞.
//!
//! Holomorphic extensions are computed spectrally: a complex point only
//! enters through `e^{iλ(X+iY)}`, so no analytic continuation of samples is
//! ever needed.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hypergeo::{in_tube, Hypergeometric, TorusPoint};
use crate::transform::{
    check_decay, dual_factor, euclidean_fourier, GridDomain, GridFunction, GridSpec, HyperTransform, Kernel,
    QuadratureGrid, Scheme, SpectralMultiplier, Symmetry,
};
use crate::{CVector, Complex64, Error, Result, Vector};

/// Time and `|ρ(m)|²`, the data of the heat multiplier `e^{−t(|λ|²+|ρ|²)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatParameters {
    pub t: f64,
    pub rho_norm_sq: f64,
}

impl HeatParameters {
    pub fn new(t: f64, rho_norm_sq: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("heat time must be positive, got {t}")));
        }
        if !(rho_norm_sq >= 0.0) {
            return Err(Error::InvalidInput(format!("|ρ|² must be non-negative, got {rho_norm_sq}")));
        }
        Ok(Self { t, rho_norm_sq })
    }

    pub fn for_context(hg: &Hypergeometric, t: f64) -> Result<Self> {
        Self::new(t, hg.rho_norm_sq())
    }

    pub fn multiplier(&self, lambda: &Vector) -> f64 {
        (-self.t * (lambda.norm_squared() + self.rho_norm_sq)).exp()
    }
}

/// `ω_t(m; X+iY) = (2πt)^{−r/2} e^{2t|ρ|² − |Y|²/2t}`; with `ρ = 0` this is the
/// Euclidean Fock weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockWeight {
    pub t: f64,
    pub rank: usize,
    pub rho_norm_sq: f64,
}

impl FockWeight {
    pub fn new(rank: usize, t: f64, rho_norm_sq: f64) -> Result<Self> {
        HeatParameters::new(t, rho_norm_sq)?;
        Ok(Self { t, rank, rho_norm_sq })
    }

    pub fn euclidean(rank: usize, t: f64) -> Result<Self> {
        Self::new(rank, t, 0.0)
    }

    pub fn eval(&self, y: &Vector) -> f64 {
        (2.0 * PI * self.t).powf(-(self.rank as f64) / 2.0)
            * (2.0 * self.t * self.rho_norm_sq - y.norm_squared() / (2.0 * self.t)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    EuclideanSb,
    LambdaExtension,
    DirectAOmega,
}

/// Values on the product grid `X + iY`, stored with `Y` as the outer index.
#[derive(Debug, Clone)]
pub struct HolomorphicGridFunction {
    pub x: QuadratureGrid,
    pub y: QuadratureGrid,
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
}

impl HolomorphicGridFunction {
    pub fn point(&self, ix: usize, iy: usize) -> CVector {
        let (x, y) = (self.x.nodes[ix], self.y.nodes[iy]);
        CVector::new(Complex64::new(x[0], y[0]), Complex64::new(x[1], y[1]))
    }

    pub fn value(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.x.len() + ix]
    }

    /// `∫∫ |F(X+iY)|² ω(Y) dX dY`. Fails when either marginal does not decay
    /// at the edge of its box.
    pub fn weighted_norm_sq(&self, weight: &FockWeight) -> Result<f64> {
        let nx = self.x.len();
        let wy: Vec<f64> = self.y.nodes.iter().map(|y| weight.eval(y)).collect();
        let mut mx = vec![0.0; nx];
        let mut my = vec![0.0; self.y.len()];
        for (iy, row) in self.values.chunks(nx).enumerate() {
            for (ix, v) in row.iter().enumerate() {
                let g = v.norm_sqr() * wy[iy];
                mx[ix] += self.y.weights[iy] * g;
                my[iy] += self.x.weights[ix] * g;
            }
        }
        check_decay(&self.x, &mx)?;
        check_decay(&self.y, &my)?;
        Ok(my.iter().zip(&self.y.weights).map(|(m, w)| m * w).sum())
    }
}

/// X and Y boxes for a Fock-norm quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockGrids {
    pub x: GridSpec,
    pub y: GridSpec,
}

impl FockGrids {
    /// Boxes for a function whose spatial and spectral supports have radii
    /// `space_radius` and `spectral_radius`: the heat flow widens the X-support
    /// by a few `√t`, and the Y-integrand is centred at `−2tλ` with width `√t`.
    pub fn default_for(rank: usize, space_radius: f64, spectral_radius: f64, t: f64) -> Self {
        let n = if rank == 1 { 128 } else { 32 };
        let s = 8.0 * t.sqrt();
        Self {
            x: GridSpec::new(Scheme::GaussLegendre, n, space_radius + s),
            y: GridSpec::new(Scheme::GaussLegendre, n, 2.0 * t * spectral_radius + s),
        }
    }

    pub fn refined(&self) -> Self {
        Self { x: self.x.refined(), y: self.y.refined() }
    }
}

/// `Σ_k b_k e^{iλ_k(X+iY)}` on the product grid.
fn synthesize(nodes: &[Vector], coef: &[Complex64], x: &QuadratureGrid, y: &QuadratureGrid) -> Vec<Complex64> {
    let live: Vec<(Vector, Complex64)> =
        nodes.iter().zip(coef).filter(|(_, b)| **b != Complex64::new(0.0, 0.0)).map(|(l, b)| (*l, *b)).collect();
    let ex: Vec<Vec<Complex64>> = x
        .nodes
        .iter()
        .map(|xv| live.iter().map(|(l, _)| Complex64::from_polar(1.0, l.dot(xv))).collect())
        .collect();
    y.nodes
        .par_iter()
        .flat_map_iter(|yv| {
            let c: Vec<Complex64> = live.iter().map(|(l, b)| b * (-l.dot(yv)).exp()).collect();
            ex.iter().map(move |row| row.iter().zip(&c).map(|(e, b)| e * b).sum::<Complex64>()).collect::<Vec<_>>()
        })
        .collect()
}

fn product_points(x: &QuadratureGrid, y: &QuadratureGrid) -> Vec<CVector> {
    let mut pts = Vec::with_capacity(x.len() * y.len());
    for yv in &y.nodes {
        for xv in &x.nodes {
            pts.push(CVector::new(Complex64::new(xv[0], yv[0]), Complex64::new(xv[1], yv[1])));
        }
    }
    pts
}

/// `ℓ²`-type comparison of two squared norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub lhs: f64,
    pub rhs: f64,
}

impl NormReport {
    pub fn defect(&self) -> f64 {
        if self.lhs == 0.0 && self.rhs == 0.0 {
            0.0
        } else {
            (self.rhs / self.lhs - 1.0).abs()
        }
    }
}

/// `∫ e^{−t|λ|²} f̂(λ) e^{iλ(Z)} dλ`, the Euclidean heat solution continued to `Z`.
pub fn euclidean_heat(f_hat: &GridFunction, z: &CVector, t: f64) -> Result<Complex64> {
    HeatParameters::new(t, 0.0)?;
    let d = dual_factor(f_hat.grid.rank);
    Ok(f_hat
        .grid
        .nodes
        .iter()
        .zip(&f_hat.grid.weights)
        .zip(&f_hat.values)
        .map(|((l, w), v)| {
            let phase = Complex64::i() * (z[0] * l[0] + z[1] * l[1]) - t * l.norm_squared();
            v * w * phase.exp()
        })
        .sum::<Complex64>()
        * d)
}

/// The Euclidean Segal–Bargmann transform of `f` on the Fock grids.
pub fn euclidean_segal_bargmann(
    f: &GridFunction,
    spectrum: &QuadratureGrid,
    t: f64,
    grids: &FockGrids,
) -> Result<HolomorphicGridFunction> {
    HeatParameters::new(t, 0.0)?;
    let f_hat = euclidean_fourier(f, spectrum)?;
    let d = dual_factor(spectrum.rank);
    let coef: Vec<Complex64> = (0..spectrum.len())
        .map(|i| f_hat.values[i] * spectrum.weights[i] * d * (-t * spectrum.nodes[i].norm_squared()).exp())
        .collect();
    let x = QuadratureGrid::new(spectrum.rank, grids.x)?;
    let y = QuadratureGrid::new(spectrum.rank, grids.y)?;
    let values = synthesize(&spectrum.nodes, &coef, &x, &y);
    Ok(HolomorphicGridFunction { x, y, values, provenance: Provenance::EuclideanSb })
}

/// `(‖f‖²_{L²(𝔞)}, ∫|H_t f(X+iY)|² ω_t dX dY)`.
pub fn euclidean_segal_bargmann_unitarity(
    f: &GridFunction,
    spectrum: &QuadratureGrid,
    t: f64,
    grids: &FockGrids,
) -> Result<NormReport> {
    let sb = euclidean_segal_bargmann(f, spectrum, t, grids)?;
    let rhs = sb.weighted_norm_sq(&FockWeight::euclidean(spectrum.rank, t)?)?;
    Ok(NormReport { lhs: f.lebesgue_norm_sq(), rhs })
}

/// `e^{−t(|λ|²+|ρ|²)} F(λ)`.
pub fn heat_spectrum(tr: &HyperTransform, big_f: &GridFunction, t: f64) -> Result<GridFunction> {
    HeatParameters::for_context(tr.hg, t)?;
    SpectralMultiplier::heat(tr.hg, t).apply(big_f)
}

/// `H_t(m; f)(a)` for `a ∈ A(Ω)`, from `F = ℱ(m; f)`.
pub fn heat_solution(tr: &HyperTransform, big_f: &GridFunction, a: &TorusPoint, t: f64) -> Result<Complex64> {
    if !in_tube(&tr.hg.rs, &a.log_imag, 1.0) {
        return Err(Error::Domain("the heat solution is only continued to A(Ω)".into()));
    }
    let g = heat_spectrum(tr, big_f, t)?;
    Ok(tr.inverse_points(&g, &[a.log()], Kernel::Phi)?[0])
}

/// `H_t(m; f)` on the spatial grid.
pub fn heat_solution_grid(tr: &HyperTransform, big_f: &GridFunction, t: f64) -> Result<GridFunction> {
    tr.inverse(&heat_spectrum(tr, big_f, t)?)
}

/// The two conditions for `F` to lie in the image of `H_t(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageMembership {
    /// `‖F|_A‖²` in L²(A, dμ).
    pub cond1: f64,
    /// `‖e^{t(|λ|²+|ρ|²)} ℱ(m; F|_A)‖²` in L²(dν), truncated to the spectral box.
    pub cond2: f64,
    /// The weighted norm overflowed, which signals non-membership.
    pub overflow: bool,
}

pub fn image_membership(tr: &HyperTransform, big_f_on_a: &GridFunction, t: f64) -> Result<ImageMembership> {
    HeatParameters::for_context(tr.hg, t)?;
    let cond1 = tr.norm_sq_dmu(big_f_on_a);
    let g = tr.forward(big_f_on_a)?;
    let g = SpectralMultiplier::exp_growth(tr.hg, t).apply(&g)?;
    let cond2 = tr.norm_sq_dnu(&g);
    Ok(ImageMembership { cond1, cond2, overflow: !cond2.is_finite() })
}

/// `ΛF(Z)` for `F = H_t(m; f)`, evaluated from `ℱ(m; f)`.
pub fn lambda_extension(tr: &HyperTransform, big_f: &GridFunction, z: &CVector, t: f64) -> Result<Complex64> {
    HeatParameters::for_context(tr.hg, t)?;
    let heat = SpectralMultiplier::heat(tr.hg, t);
    Ok(tr.lambda_points(big_f, std::slice::from_ref(z), Some(&heat))?[0])
}

/// `ΛF` for `F = H_t(m; f)` on the Fock grids.
pub fn lambda_extension_grid(
    tr: &HyperTransform,
    big_f: &GridFunction,
    t: f64,
    grids: &FockGrids,
) -> Result<HolomorphicGridFunction> {
    HeatParameters::for_context(tr.hg, t)?;
    let heat = SpectralMultiplier::heat(tr.hg, t);
    let coef = tr.lambda_coefficients(big_f, Some(&heat))?;
    let rank = tr.hg.rank();
    let x = QuadratureGrid::new(rank, grids.x)?;
    let y = QuadratureGrid::new(rank, grids.y)?;
    let values = synthesize(&tr.spectrum.nodes, &coef, &x, &y);
    Ok(HolomorphicGridFunction { x, y, values, provenance: Provenance::LambdaExtension })
}

pub fn fock_weight(hg: &Hypergeometric, t: f64) -> Result<FockWeight> {
    FockWeight::new(hg.rank(), t, hg.rho_norm_sq())
}

/// `∫∫ |ΛF(X+iY)|² ω_t(m; X+iY) dX dY` for `F = H_t(m; f)`.
pub fn fock_norm(tr: &HyperTransform, big_f: &GridFunction, t: f64, grids: &FockGrids) -> Result<f64> {
    lambda_extension_grid(tr, big_f, t, grids)?.weighted_norm_sq(&fock_weight(tr.hg, t)?)
}

/// `(‖f‖²_{L²(dμ)}, fock_norm)`.
pub fn fock_unitarity(tr: &HyperTransform, f: &GridFunction, t: f64, grids: &FockGrids) -> Result<NormReport> {
    let big_f = tr.forward(f)?;
    Ok(NormReport { lhs: tr.norm_sq_dmu(f), rhs: fock_norm(tr, &big_f, t, grids)? })
}

fn require_complex_case(hg: &Hypergeometric) -> Result<()> {
    if !hg.m.is_geometric_complex(&hg.rs) {
        return Err(Error::InvalidInput("this check needs a reduced system with m ≡ 2".into()));
    }
    Ok(())
}

/// `δ^{1/2}U` on the Fock grids, where `U` is the continued heat solution;
/// computed through the inversion formula with kernel `φ_{iλ}δ^{1/2}`.
pub fn delta_sqrt_u_grid(
    tr: &HyperTransform,
    big_f: &GridFunction,
    t: f64,
    grids: &FockGrids,
) -> Result<HolomorphicGridFunction> {
    require_complex_case(tr.hg)?;
    let g = heat_spectrum(tr, big_f, t)?;
    let rank = tr.hg.rank();
    let x = QuadratureGrid::new(rank, grids.x)?;
    let y = QuadratureGrid::new(rank, grids.y)?;
    let values = tr.inverse_points(&g, &product_points(&x, &y), Kernel::PhiTimesDeltaSqrt)?;
    Ok(HolomorphicGridFunction { x, y, values, provenance: Provenance::DirectAOmega })
}

/// `(‖f‖², (2πt)^{−r/2} ∫ |δ^{1/2}U|² e^{2t|ρ|² − |Y|²/2t})` for m ≡ 2.
pub fn hall_mitchell_check(tr: &HyperTransform, f: &GridFunction, t: f64, grids: &FockGrids) -> Result<NormReport> {
    require_complex_case(tr.hg)?;
    let big_f = tr.forward(f)?;
    let v = delta_sqrt_u_grid(tr, &big_f, t, grids)?;
    Ok(NormReport { lhs: tr.norm_sq_dmu(f), rhs: v.weighted_norm_sq(&fock_weight(tr.hg, t)?)? })
}

/// Largest `|V(wZ) − sign(w)V(Z)|` over `points` and `w ∈ W`, relative to the
/// largest `|V(Z)|`, for `V = δ^{1/2}U`.
pub fn tau_antisymmetry_defect(tr: &HyperTransform, big_f: &GridFunction, t: f64, points: &[CVector]) -> Result<f64> {
    require_complex_case(tr.hg)?;
    let g = heat_spectrum(tr, big_f, t)?;
    let weyl = &tr.hg.weyl;
    let mut all = Vec::with_capacity(points.len() * weyl.order());
    for z in points {
        for (w, _) in weyl.iter() {
            all.push(CVector::new(
                w[(0, 0)] * z[0] + w[(0, 1)] * z[1],
                w[(1, 0)] * z[0] + w[(1, 1)] * z[1],
            ));
        }
    }
    let v = tr.inverse_points(&g, &all, Kernel::PhiTimesDeltaSqrt)?;
    let k = weyl.order();
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for chunk in v.chunks(k) {
        let base = chunk[weyl.identity];
        for (j, (_, s)) in weyl.iter().enumerate() {
            worst = worst.max((chunk[j] - f64::from(s) * base).norm());
        }
    }
    Ok(worst / scale)
}

/// `max_j |∂̄_j V(z)|` by fourth-order central differences, relative to the
/// largest `|V|` on the stencil.
pub fn cauchy_riemann_residual<F>(v: F, z: &CVector, rank: usize, step: f64) -> Result<f64>
where
    F: Fn(&CVector) -> Result<Complex64>,
{
    let mut worst: f64 = 0.0;
    let mut scale = v(z)?.norm();
    for j in 0..rank {
        let d = |e: Complex64| -> Result<Complex64> {
            let mut vals = [Complex64::new(0.0, 0.0); 4];
            for (slot, k) in vals.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
                let mut p = *z;
                p[j] += e * (k * step);
                *slot = v(&p)?;
            }
            Ok((vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * step))
        };
        let dx = d(Complex64::new(1.0, 0.0))?;
        let dy = d(Complex64::new(0.0, 1.0))?;
        worst = worst.max((0.5 * (dx + Complex64::i() * dy)).norm());
        scale = scale.max(dx.norm() * step).max(dy.norm() * step);
    }
    Ok(if scale == 0.0 { 0.0 } else { worst * step / scale })
}

/// `‖u(·,t)‖_{L²(dμ)}` for each time.
pub fn heat_norms(tr: &HyperTransform, big_f: &GridFunction, times: &[f64]) -> Result<Vec<f64>> {
    times.iter().map(|&t| Ok(tr.norm_sq_dmu(&heat_solution_grid(tr, big_f, t)?).sqrt())).collect()
}

/// `‖u(·,t) − f‖_{L²(dμ)} / ‖f‖_{L²(dμ)}` for each time.
pub fn initial_limit(tr: &HyperTransform, f: &GridFunction, big_f: &GridFunction, times: &[f64]) -> Result<Vec<f64>> {
    let nf = tr.norm_sq_dmu(f).sqrt();
    times
        .iter()
        .map(|&t| {
            let u = heat_solution_grid(tr, big_f, t)?;
            let diff = GridFunction {
                values: u.values.iter().zip(&f.values).map(|(a, b)| a - b).collect(),
                ..u
            };
            Ok(tr.norm_sq_dmu(&diff).sqrt() / nf)
        })
        .collect()
}

/// Sup difference between `H_s H_t f` and `H_{t+s} f` on the spatial grid,
/// relative to the sup of the latter, with the multipliers composed on the
/// spectral side.
pub fn semigroup_defect(tr: &HyperTransform, big_f: &GridFunction, t: f64, s: f64) -> Result<f64> {
    let twice = heat_spectrum(tr, &heat_spectrum(tr, big_f, t)?, s)?;
    let once = heat_spectrum(tr, big_f, t + s)?;
    let a = tr.inverse(&twice)?;
    let b = tr.inverse(&once)?;
    let scale = b.sup_norm();
    let diff = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Largest `|u(wa) − u(a)|` over `points` and `w ∈ W`, relative to `|u(a)|`.
pub fn heat_w_invariance(tr: &HyperTransform, big_f: &GridFunction, t: f64, points: &[TorusPoint]) -> Result<f64> {
    let g = heat_spectrum(tr, big_f, t)?;
    let mut pts = Vec::new();
    for a in points {
        if !in_tube(&tr.hg.rs, &a.log_imag, 1.0) {
            return Err(Error::Domain("the heat solution is only continued to A(Ω)".into()));
        }
        for w in &tr.hg.weyl.elements {
            let re = w * a.log_real;
            let im = w * a.log_imag;
            pts.push(CVector::new(Complex64::new(re[0], im[0]), Complex64::new(re[1], im[1])));
        }
    }
    let v = tr.inverse_points(&g, &pts, Kernel::Phi)?;
    let k = tr.hg.weyl.order();
    let mut worst: f64 = 0.0;
    for chunk in v.chunks(k) {
        let base = chunk[tr.hg.weyl.identity];
        let scale = base.norm().max(1e-300);
        for x in chunk {
            worst = worst.max((x - base).norm() / scale);
        }
    }
    Ok(worst)
}

/// Heat-evolved sample on the space grid of a transform, used as the input
/// of the image test.
pub fn sample_heat(tr: &HyperTransform, f: &GridFunction, t: f64) -> Result<GridFunction> {
    let u = heat_solution_grid(tr, &tr.forward(f)?, t)?;
    Ok(GridFunction {
        values: u.values.iter().map(|z| Complex64::new(z.re, 0.0)).collect(),
        domain: GridDomain::Space,
        symmetry: Symmetry::WInvariant,
        ..u
    })
}
