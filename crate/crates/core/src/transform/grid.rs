//! Quadrature grids on 𝔞 or 𝔞* and their reduction to the positive chamber.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rootsys::{RootSystem, WeylGroup};
use crate::{Error, Result, Vector};

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Midpoint rule per axis.
    Trapezoid,
    GaussLegendre,
    /// Gauss–Legendre in the radius and on each angular sector (rank two only).
    Polar,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "trapezoid" | "midpoint" => Ok(Self::Trapezoid),
            "gauss_legendre" | "gl" => Ok(Self::GaussLegendre),
            "polar" => Ok(Self::Polar),
            _ => Err(Error::InvalidInput(format!("unknown quadrature scheme {s:?}"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Trapezoid => "trapezoid",
            Self::GaussLegendre => "gauss_legendre",
            Self::Polar => "polar",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub scheme: Scheme,
    /// Nodes per axis, or radial nodes for the polar scheme.
    pub n: usize,
    pub radius: f64,
}

impl GridSpec {
    pub fn new(scheme: Scheme, n: usize, radius: f64) -> Self {
        Self { scheme, n, radius }
    }

    /// Default scheme and node count for the given rank.
    pub fn default_for(rank: usize, radius: f64) -> Self {
        if rank == 1 {
            Self::new(Scheme::GaussLegendre, 128, radius)
        } else {
            Self::new(Scheme::Polar, 64, radius)
        }
    }

    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }
}

/// Angular sectors of the polar scheme. Every wall of the supported rank-two
/// types lies at a multiple of 15°, hence on a sector edge.
pub const SECTORS: usize = 24;

/// Angular node count of the polar scheme.
pub fn angular_nodes(n: usize) -> usize {
    SECTORS * (2 * n).div_ceil(SECTORS).max(1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub spec: GridSpec,
    pub rank: usize,
    pub nodes: Vec<Vector>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn axis(scheme: Scheme, n: usize, radius: f64) -> (Vec<f64>, Vec<f64>) {
    match scheme {
        Scheme::Trapezoid | Scheme::Polar => {
            let h = 2.0 * radius / n as f64;
            ((0..n).map(|j| -radius + (j as f64 + 0.5) * h).collect(), vec![h; n])
        }
        Scheme::GaussLegendre => {
            // one panel per half-axis, so a kink of δ at the origin sits on a panel edge
            let (x, w) = gauss_legendre(n.div_ceil(2));
            let h = 0.5 * radius;
            let mut xs: Vec<f64> = x.iter().rev().map(|v| -h * (v + 1.0)).collect();
            let mut ws: Vec<f64> = w.iter().map(|v| v * h).collect();
            xs.extend(x.iter().map(|v| h * (v + 1.0)));
            ws.extend(w.iter().map(|v| v * h));
            (xs, ws)
        }
    }
}

impl QuadratureGrid {
    pub fn new(rank: usize, spec: GridSpec) -> Result<Self> {
        if !(rank == 1 || rank == 2) {
            return Err(Error::InvalidInput(format!("rank {rank} grids are not supported")));
        }
        if spec.n < MIN_NODES {
            return Err(Error::InvalidInput(format!("at least {MIN_NODES} nodes per axis, got {}", spec.n)));
        }
        if !(spec.radius > 0.0 && spec.radius.is_finite()) {
            return Err(Error::InvalidInput(format!("grid radius must be positive, got {}", spec.radius)));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match (rank, spec.scheme) {
            (1, Scheme::Polar) => {
                return Err(Error::InvalidInput("the polar scheme needs rank two".into()));
            }
            (1, s) => {
                let (x, w) = axis(s, spec.n, spec.radius);
                nodes.extend(x.iter().map(|v| Vector::new(*v, 0.0)));
                weights = w;
            }
            (_, Scheme::Polar) => {
                let (r, wr) = gauss_legendre(spec.n);
                let per = angular_nodes(spec.n) / SECTORS;
                let (a, wa) = gauss_legendre(per);
                let half = PI / SECTORS as f64;
                for (ri, wi) in r.iter().zip(&wr) {
                    let rr = 0.5 * spec.radius * (ri + 1.0);
                    let w = 0.5 * spec.radius * wi * rr;
                    for k in 0..SECTORS {
                        let mid = (2 * k + 1) as f64 * half;
                        for (aj, wj) in a.iter().zip(&wa) {
                            let th = mid + half * aj;
                            nodes.push(Vector::new(rr * th.cos(), rr * th.sin()));
                            weights.push(w * wj * half);
                        }
                    }
                }
            }
            (_, s) => {
                let (x, w) = axis(s, spec.n, spec.radius);
                for (xi, wi) in x.iter().zip(&w) {
                    for (yj, wj) in x.iter().zip(&w) {
                        nodes.push(Vector::new(*xi, *yj));
                        weights.push(wi * wj);
                    }
                }
            }
        }
        Ok(Self { spec, rank, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Measure of the integration region (a box, or a disc for the polar scheme).
    pub fn volume(&self) -> f64 {
        let r = self.spec.radius;
        match (self.rank, self.spec.scheme) {
            (2, Scheme::Polar) => PI * r * r,
            (rank, _) => (2.0 * r).powi(rank as i32),
        }
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.rank, self.spec.refined())
    }

    /// The outermost layer of nodes.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let extent = |x: &Vector| match self.spec.scheme {
            Scheme::Polar => x.norm(),
            _ => x[0].abs().max(x[1].abs()),
        };
        let outer = self.nodes.iter().map(extent).fold(0.0, f64::max);
        (0..self.len()).filter(|&i| extent(&self.nodes[i]) >= outer * (1.0 - 1e-12)).collect()
    }

    /// Orbit data if the node set and weights are W-symmetric with no node on
    /// a wall, `None` otherwise.
    pub fn reduction(&self, rs: &RootSystem, weyl: &WeylGroup) -> Option<Reduction> {
        let scale = 1e-9 * self.spec.radius;
        let key = |v: &Vector| ((v[0] / scale).round() as i64, (v[1] / scale).round() as i64);
        let index: HashMap<(i64, i64), usize> = self.nodes.iter().enumerate().map(|(i, v)| (key(v), i)).collect();
        let mut image = Vec::with_capacity(weyl.order());
        for w in &weyl.elements {
            let mut row = Vec::with_capacity(self.len());
            for (i, v) in self.nodes.iter().enumerate() {
                let u = w * v;
                let j = [(0i64, 0i64), (1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .find_map(|(a, b)| {
                        let k = key(&u);
                        index.get(&(k.0 + a, k.1 + b)).copied()
                    })?;
                if (self.weights[i] - self.weights[j]).abs() > 1e-12 * self.weights[i] {
                    return None;
                }
                row.push(j);
            }
            image.push(row);
        }
        let reps: Vec<usize> = (0..self.len()).filter(|&i| rs.in_positive_chamber(&self.nodes[i])).collect();
        if reps.len() * weyl.order() != self.len() {
            return None;
        }
        Some(Reduction { reps, image })
    }
}

/// Chamber representatives of a W-symmetric grid and the node permutation of
/// every Weyl element.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub reps: Vec<usize>,
    /// `image[k][i]` is the node `w_k · x_i`.
    pub image: Vec<Vec<usize>>,
}

impl Reduction {
    /// Spreads values given on the representatives to all nodes by W-invariance.
    pub fn spread<T: Copy + Default>(&self, rep_values: &[T], n: usize) -> Vec<T> {
        let mut out = vec![T::default(); n];
        for (r, v) in self.reps.iter().zip(rep_values) {
            for row in &self.image {
                out[row[*r]] = *v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, weyl_group, RootSystemType};

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(20);
        for k in 0..40 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {k}");
        }
        let (x, _) = gauss_legendre(128);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn weights_sum_to_volume() {
        for (rank, scheme) in [(1, Scheme::Trapezoid), (1, Scheme::GaussLegendre), (2, Scheme::GaussLegendre), (2, Scheme::Polar), (2, Scheme::Trapezoid)] {
            let g = QuadratureGrid::new(rank, GridSpec::new(scheme, 24, 3.5)).unwrap();
            let s: f64 = g.weights.iter().sum();
            assert!((s - g.volume()).abs() < 1e-12 * g.volume(), "{rank} {scheme}");
        }
        assert!(QuadratureGrid::new(1, GridSpec::new(Scheme::GaussLegendre, 8, 1.0)).is_err());
        assert!(QuadratureGrid::new(1, GridSpec::new(Scheme::Polar, 32, 1.0)).is_err());
    }

    #[test]
    fn gaussian_integrals() {
        let g = QuadratureGrid::new(2, GridSpec::new(Scheme::Polar, 32, 7.0)).unwrap();
        let s: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * (-x.norm_squared()).exp()).sum();
        assert!((s - PI).abs() < 1e-12);
    }

    #[test]
    fn reductions() {
        let cases = [
            (RootSystemType::A1, 1, Scheme::GaussLegendre, true),
            (RootSystemType::A2, 2, Scheme::Polar, true),
            (RootSystemType::B2, 2, Scheme::Polar, true),
            // the diagonal nodes lie on a wall
            (RootSystemType::B2, 2, Scheme::Trapezoid, false),
            (RootSystemType::A1xA1, 2, Scheme::GaussLegendre, true),
            (RootSystemType::A1xA1, 2, Scheme::Trapezoid, true),
            (RootSystemType::A2, 2, Scheme::GaussLegendre, false),
        ];
        for (kind, rank, scheme, expect) in cases {
            let rs = build_root_system(kind, 1.0).unwrap();
            let w = weyl_group(&rs).unwrap();
            let g = QuadratureGrid::new(rank, GridSpec::new(scheme, 24, 2.0)).unwrap();
            let red = g.reduction(&rs, &w);
            assert_eq!(red.is_some(), expect, "{kind} {scheme}");
            if let Some(red) = red {
                // integral of a W-invariant function over reps times |W|
                let f = |x: &Vector| (-(x[0] - 0.3).powi(2) - x[1].powi(2)).exp();
                let fw = |x: &Vector| w.elements.iter().map(|e| f(&(e * x))).sum::<f64>();
                let full: f64 = (0..g.len()).map(|i| g.weights[i] * fw(&g.nodes[i])).sum();
                let part: f64 = red.reps.iter().map(|&i| g.weights[i] * fw(&g.nodes[i])).sum::<f64>() * w.order() as f64;
                assert!((full - part).abs() < 1e-12 * full);
            }
        }
    }
}
