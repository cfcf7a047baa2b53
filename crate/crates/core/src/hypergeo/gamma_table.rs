//! The coefficients Γ_μ(m; λ) of the Harish-Chandra series, filled in
//! graded order from the recursion
//! `(μ, μ−2λ) Γ_μ = 2 Σ_{α∈Δ⁺} m_α Σ_{k≥1} Γ_{μ−2kα} (μ + ρ − 2kα − λ, α)`.

use serde::Serialize;

use super::{Hypergeometric, SpectralParameter};
use crate::rootsys::{lattice_shell, LatticeShell};
use crate::{cdot, Complex64, Error, Result};

/// Relative size of `(μ, μ−2λ)` below which λ is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct GammaTable {
    pub shell: LatticeShell,
    /// Values in the order of `shell.points`.
    pub values: Vec<Complex64>,
    pub lambda: SpectralParameter,
    pub singular_flag: bool,
    rank: usize,
}

/// Dense index of `n_1 α_1 + n_2 α_2` in the graded order used by `lattice_shell`.
pub(crate) fn shell_index(rank: usize, n: [u32; 2]) -> usize {
    if rank == 1 {
        n[0] as usize
    } else {
        let d = (n[0] + n[1]) as usize;
        d * (d + 1) / 2 + (d - n[0] as usize)
    }
}

impl GammaTable {
    pub fn get(&self, n: [u32; 2]) -> Option<Complex64> {
        self.values.get(shell_index(self.rank, n)).copied()
    }

    pub fn cap(&self) -> usize {
        self.shell.degree_cap
    }

    fn rhs(&self, hg: &Hypergeometric, i: usize) -> Complex64 {
        let n = self.shell.points[i];
        let mu = self.shell.vector(&hg.rs, i);
        let lambda = &self.lambda.lambda;
        let mut rhs = Complex64::new(0.0, 0.0);
        for (m, p) in hg.weighted_roots() {
            if m == 0.0 {
                continue;
            }
            let mut k = 1u32;
            loop {
                let (c0, c1) = (2 * k * p.coeffs[0], 2 * k * p.coeffs[1]);
                if c0 > n[0] || c1 > n[1] {
                    break;
                }
                let prev = self.values[shell_index(self.rank, [n[0] - c0, n[1] - c1])];
                if prev != Complex64::new(0.0, 0.0) {
                    let shifted = mu + hg.rho - p.vector * (2.0 * k as f64);
                    let pairing = shifted.dot(&p.vector) - cdot(lambda, &p.vector);
                    rhs += prev * pairing * m;
                }
                k += 1;
            }
        }
        rhs * 2.0
    }

    fn denominator(&self, hg: &Hypergeometric, i: usize) -> (Complex64, f64) {
        let mu = self.shell.vector(&hg.rs, i);
        let mu_sq = mu.norm_squared();
        (mu_sq - 2.0 * cdot(&self.lambda.lambda, &mu), mu_sq)
    }

    /// Extends the table to total degree `cap`.
    pub fn extend_to(&mut self, hg: &Hypergeometric, cap: usize) -> Result<()> {
        if cap <= self.shell.degree_cap && !self.values.is_empty() {
            return Ok(());
        }
        let start = self.values.len();
        self.shell = lattice_shell(&hg.rs, cap);
        for i in start..self.shell.points.len() {
            if i == 0 {
                self.values.push(Complex64::new(1.0, 0.0));
                continue;
            }
            let rhs = self.rhs(hg, i);
            if rhs == Complex64::new(0.0, 0.0) {
                // structurally zero (e.g. odd multiples in rank one), whatever the denominator
                self.values.push(rhs);
                continue;
            }
            let (den, mu_sq) = self.denominator(hg, i);
            if den.norm() < SINGULAR_TOL * mu_sq {
                self.singular_flag = true;
                let n = self.shell.points[i];
                return Err(Error::SingularParameter(format!(
                    "(μ, μ−2λ) ≈ 0 at μ = {}α₁ + {}α₂",
                    n[0], n[1]
                )));
            }
            self.values.push(rhs / den);
        }
        Ok(())
    }

    /// Relative defect of the recursion identity at entry `i`.
    pub fn recursion_residual(&self, hg: &Hypergeometric, i: usize) -> f64 {
        if i == 0 {
            return (self.values[0] - 1.0).norm();
        }
        let rhs = self.rhs(hg, i);
        let lhs = self.denominator(hg, i).0 * self.values[i];
        let scale = rhs.norm().max(lhs.norm());
        if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs).norm() / scale
        }
    }
}

/// Γ_μ(m; λ) for all μ ∈ Γ₊ of degree at most `cap`.
pub fn gamma_coefficients(hg: &Hypergeometric, lambda: &SpectralParameter, cap: usize) -> Result<GammaTable> {
    let mut t = GammaTable {
        shell: lattice_shell(&hg.rs, 0),
        values: Vec::new(),
        lambda: *lambda,
        singular_flag: false,
        rank: hg.rs.rank,
    };
    t.extend_to(hg, cap)?;
    Ok(t)
}
