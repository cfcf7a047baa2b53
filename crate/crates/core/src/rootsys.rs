//! Small root systems (rank ≤ 2 plus BC1), their Weyl groups, multiplicity
//! functions, the positive lattice Γ₊ and the tube domains.
//!
//! Conventions: roots live in a fixed orthonormal frame, so (·,·) is the
//! Euclidean dot product, `h_α = α`, `H_α = 2α/(α,α)` and
//! `λ_α = ½λ(H_α) = (λ,α)/(α,α)`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result, Vector};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootSystemType {
    A1,
    A2,
    B2,
    BC1,
    A1xA1,
}

impl RootSystemType {
    pub const ALL: [RootSystemType; 5] = [Self::A1, Self::A2, Self::B2, Self::BC1, Self::A1xA1];
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::A1 => "A1",
            Self::A2 => "A2",
            Self::B2 => "B2",
            Self::BC1 => "BC1",
            Self::A1xA1 => "A1xA1",
        };
        f.write_str(s)
    }
}

impl FromStr for RootSystemType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(['×', '_'], "X").as_str() {
            "A1" => Ok(Self::A1),
            "A2" => Ok(Self::A2),
            "B2" => Ok(Self::B2),
            "BC1" => Ok(Self::BC1),
            "A1XA1" => Ok(Self::A1xA1),
            _ => Err(Error::UnsupportedType(s.to_string())),
        }
    }
}

/// A positive root together with its simple-root expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveRoot {
    pub vector: Vector,
    /// Coefficients in the simple roots (second entry is 0 in rank 1).
    pub coeffs: [u32; 2],
    /// Index of the W-orbit, used to look up the multiplicity.
    pub orbit: usize,
    /// Index of 2α in the positive root list, if 2α is a root.
    pub double: Option<usize>,
    /// True when α/2 is also a root.
    pub is_double: bool,
}

impl PositiveRoot {
    pub fn norm_sq(&self) -> f64 {
        self.vector.norm_squared()
    }

    /// `H_α = 2α/(α,α)`.
    pub fn coroot(&self) -> Vector {
        self.vector * (2.0 / self.norm_sq())
    }

    /// `α(H)` for real `H`.
    pub fn eval(&self, h: &Vector) -> f64 {
        self.vector.dot(h)
    }

    /// `λ_α = (λ,α)/(α,α)` for a complex functional.
    pub fn lambda_alpha(&self, lambda: &crate::CVector) -> crate::Complex64 {
        crate::cdot(lambda, &self.vector) / self.norm_sq()
    }
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub kind: RootSystemType,
    pub rank: usize,
    pub scale: f64,
    pub roots: Vec<Vector>,
    pub positive: Vec<PositiveRoot>,
    pub simple: Vec<Vector>,
    /// Gram matrix of the simple roots (upper-left `rank × rank` block is meaningful).
    pub gram: Matrix,
    pub n_orbits: usize,
}

/// JSON descriptor consumed by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSystemDescriptor {
    #[serde(rename = "type")]
    pub kind: RootSystemType,
    pub rank: usize,
    pub scale: f64,
    pub roots: Vec<[f64; 2]>,
}

pub fn build_root_system(kind: RootSystemType, scale: f64) -> Result<RootSystem> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
    }
    let s3 = 3f64.sqrt() / 2.0;
    // (simple roots, positive roots as simple-root coefficients)
    let (simple, coeffs): (Vec<Vector>, Vec<[u32; 2]>) = match kind {
        RootSystemType::A1 => (vec![Vector::new(1.0, 0.0)], vec![[1, 0]]),
        RootSystemType::BC1 => (vec![Vector::new(1.0, 0.0)], vec![[1, 0], [2, 0]]),
        RootSystemType::A2 => (
            vec![Vector::new(1.0, 0.0), Vector::new(-0.5, s3)],
            vec![[1, 0], [0, 1], [1, 1]],
        ),
        RootSystemType::B2 => (
            vec![Vector::new(1.0, -1.0), Vector::new(0.0, 1.0)],
            vec![[1, 0], [0, 1], [1, 1], [1, 2]],
        ),
        RootSystemType::A1xA1 => (
            vec![Vector::new(1.0, 0.0), Vector::new(0.0, 1.0)],
            vec![[1, 0], [0, 1]],
        ),
    };
    let simple: Vec<Vector> = simple.into_iter().map(|v| v * scale).collect();
    let rank = simple.len();
    let combine = |c: &[u32; 2]| {
        let mut v = simple[0] * c[0] as f64;
        if rank > 1 {
            v += simple[1] * c[1] as f64;
        }
        v
    };
    let pos_vectors: Vec<Vector> = coeffs.iter().map(combine).collect();
    let mut roots: Vec<Vector> = pos_vectors.clone();
    roots.extend(pos_vectors.iter().map(|v| -v));

    let mut gram = Matrix::zeros();
    for i in 0..rank {
        for j in 0..rank {
            gram[(i, j)] = simple[i].dot(&simple[j]);
        }
    }

    let mut rs = RootSystem {
        kind,
        rank,
        scale,
        roots,
        positive: Vec::new(),
        simple,
        gram,
        n_orbits: 0,
    };

    let positive: Vec<PositiveRoot> = pos_vectors
        .iter()
        .zip(&coeffs)
        .map(|(v, c)| PositiveRoot {
            vector: *v,
            coeffs: *c,
            orbit: usize::MAX,
            double: pos_vectors.iter().position(|u| (u - 2.0 * v).norm() < EPS),
            is_double: pos_vectors.iter().any(|u| (2.0 * u - v).norm() < EPS),
        })
        .collect();
    rs.positive = positive;

    // W-orbits, numbered by first appearance (simple roots come first in the list).
    let w = weyl_group(&rs)?;
    let mut n_orbits = 0;
    for i in 0..rs.positive.len() {
        if rs.positive[i].orbit != usize::MAX {
            continue;
        }
        let v = rs.positive[i].vector;
        for g in &w.elements {
            let gv = g * v;
            for p in rs.positive.iter_mut() {
                if (p.vector - gv).norm() < EPS || (p.vector + gv).norm() < EPS {
                    p.orbit = n_orbits;
                }
            }
        }
        n_orbits += 1;
    }
    rs.n_orbits = n_orbits;
    Ok(rs)
}

impl RootSystem {
    pub fn descriptor(&self) -> RootSystemDescriptor {
        RootSystemDescriptor {
            kind: self.kind,
            rank: self.rank,
            scale: self.scale,
            roots: self.roots.iter().map(|v| [v[0], v[1]]).collect(),
        }
    }

    pub fn from_descriptor(d: &RootSystemDescriptor) -> Result<Self> {
        let rs = build_root_system(d.kind, d.scale)?;
        if d.rank != rs.rank {
            return Err(Error::SchemaMismatch(format!(
                "descriptor rank {} does not match type {}",
                d.rank, d.kind
            )));
        }
        Ok(rs)
    }

    /// Δ_i⁺: the indivisible positive roots (those α with α/2 ∉ Δ), with
    /// their indices in `positive`. For BC1 this is {α}.
    pub fn reduced_positive(&self) -> impl Iterator<Item = (usize, &PositiveRoot)> {
        self.positive.iter().enumerate().filter(|(_, p)| !p.is_double)
    }

    pub fn is_reduced(&self) -> bool {
        self.positive.iter().all(|p| p.double.is_none())
    }

    pub fn simple_reflection(&self, i: usize) -> Matrix {
        reflection(&self.simple[i])
    }

    /// Vector from coordinates in the basis of simple roots.
    pub fn from_simple_coords(&self, c: &[f64]) -> Vector {
        let mut v = Vector::zeros();
        for (a, x) in self.simple.iter().zip(c) {
            v += a * *x;
        }
        v
    }

    /// Moves `h` into the closed positive chamber by simple reflections and
    /// returns the image together with the Weyl element used.
    pub fn to_closed_chamber(&self, h: &Vector) -> (Vector, Matrix) {
        let mut x = *h;
        let mut w = Matrix::identity();
        for _ in 0..64 {
            let mut moved = false;
            for a in &self.simple {
                if a.dot(&x) < 0.0 {
                    let r = reflection(a);
                    x = r * x;
                    w = r * w;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        (x, w)
    }

    /// Point in the open chamber: `α(H) > 0` for all positive roots.
    pub fn in_positive_chamber(&self, h: &Vector) -> bool {
        self.positive.iter().all(|p| p.eval(h) > 0.0)
    }

    /// Smallest `α(H)` over positive roots.
    pub fn min_root_value(&self, h: &Vector) -> f64 {
        self.positive.iter().map(|p| p.eval(h)).fold(f64::INFINITY, f64::min)
    }

    /// Project onto the rank coordinates (rank-one systems live on the first axis).
    pub fn project(&self, v: &Vector) -> Vector {
        if self.rank == 1 {
            Vector::new(v[0], 0.0)
        } else {
            *v
        }
    }
}

pub(crate) fn reflection(a: &Vector) -> Matrix {
    Matrix::identity() - (a * a.transpose()) * (2.0 / a.norm_squared())
}

#[derive(Debug, Clone)]
pub struct WeylGroup {
    pub elements: Vec<Matrix>,
    pub sign: Vec<i8>,
    pub identity: usize,
}

/// Closure of the simple reflections, breadth first from the identity.
pub fn weyl_group(rs: &RootSystem) -> Result<WeylGroup> {
    const BOUND: usize = 64;
    let gens: Vec<Matrix> = (0..rs.rank).map(|i| rs.simple_reflection(i)).collect();
    let mut elements: Vec<Matrix> = Vec::new();
    let mut queue: VecDeque<Matrix> = VecDeque::from([Matrix::identity()]);
    while let Some(g) = queue.pop_front() {
        if elements.iter().any(|e| (e - g).abs().max() < EPS) {
            continue;
        }
        if elements.len() >= BOUND {
            return Err(Error::ClosureNotReached(BOUND));
        }
        for s in &gens {
            queue.push_back(s * g);
        }
        elements.push(g);
    }
    let sign = elements.iter().map(|e| if e.determinant() > 0.0 { 1 } else { -1 }).collect();
    Ok(WeylGroup { elements, sign, identity: 0 })
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn find(&self, m: &Matrix) -> Option<usize> {
        self.elements.iter().position(|e| (e - m).abs().max() < EPS)
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.find(&self.elements[i].transpose()).expect("group is closed under inverses")
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.find(&(self.elements[i] * self.elements[j])).expect("group is closed")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Matrix, i8)> {
        self.elements.iter().zip(self.sign.iter().copied())
    }
}

/// W-invariant multiplicity function, one value per W-orbit of roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityFunction {
    pub values: Vec<f64>,
}

impl MultiplicityFunction {
    pub fn new(rs: &RootSystem, values: Vec<f64>) -> Result<Self> {
        if values.len() != rs.n_orbits {
            return Err(Error::InvalidInput(format!(
                "{} has {} root orbits, got {} multiplicities",
                rs.kind,
                rs.n_orbits,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("multiplicities must be nonnegative, got {v}")));
        }
        Ok(Self { values })
    }

    pub fn uniform(rs: &RootSystem, m: f64) -> Result<Self> {
        Self::new(rs, vec![m; rs.n_orbits])
    }

    /// Accepts a single value (applied to every orbit) or one value per orbit.
    pub fn from_slice(rs: &RootSystem, v: &[f64]) -> Result<Self> {
        match v {
            [m] => Self::uniform(rs, *m),
            _ => Self::new(rs, v.to_vec()),
        }
    }

    /// `m_α` for the positive root with index `i`.
    pub fn of(&self, rs: &RootSystem, i: usize) -> f64 {
        self.values[rs.positive[i].orbit]
    }

    /// `m_{2α}` for the positive root `i` (zero if 2α is not a root).
    pub fn of_double(&self, rs: &RootSystem, i: usize) -> f64 {
        rs.positive[i].double.map_or(0.0, |j| self.of(rs, j))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Roots whose double carries positive multiplicity make the system
    /// effectively non-reduced.
    fn effectively_reduced(&self, rs: &RootSystem) -> bool {
        (0..rs.positive.len()).all(|i| self.of_double(rs, i) == 0.0)
    }

    pub fn is_even(&self, rs: &RootSystem) -> bool {
        self.effectively_reduced(rs)
            && (0..rs.positive.len())
                .filter(|i| !rs.positive[*i].is_double)
                .all(|i| {
                    let m = self.of(rs, i);
                    m == (m / 2.0).round() * 2.0
                })
    }

    pub fn is_geometric_complex(&self, rs: &RootSystem) -> bool {
        self.effectively_reduced(rs)
            && (0..rs.positive.len())
                .filter(|i| !rs.positive[*i].is_double)
                .all(|i| self.of(rs, i) == 2.0)
    }
}

/// `ρ(m) = ½ Σ_{α∈Δ⁺} m_α α`.
pub fn rho(rs: &RootSystem, m: &MultiplicityFunction) -> Vector {
    rs.positive
        .iter()
        .enumerate()
        .fold(Vector::zeros(), |acc, (i, p)| acc + p.vector * (0.5 * m.of(rs, i)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeShell {
    pub degree_cap: usize,
    /// Simple-root coefficients `(n_1, n_2)`, graded by `n_1 + n_2`.
    pub points: Vec<[u32; 2]>,
}

/// Γ₊ up to total degree `cap`, in graded order; within a degree the
/// coefficient tuples are in descending lexicographic order.
pub fn lattice_shell(rs: &RootSystem, cap: usize) -> LatticeShell {
    let mut points = Vec::new();
    for d in 0..=cap as u32 {
        if rs.rank == 1 {
            points.push([d, 0]);
        } else {
            for n1 in (0..=d).rev() {
                points.push([n1, d - n1]);
            }
        }
    }
    LatticeShell { degree_cap: cap, points }
}

impl LatticeShell {
    pub fn vector(&self, rs: &RootSystem, i: usize) -> Vector {
        let [a, b] = self.points[i];
        rs.from_simple_coords(&[a as f64, b as f64])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainKind {
    Omega,
    TwoOmega,
    PositiveChamber,
}

#[derive(Debug, Clone)]
pub struct TubeDomain {
    pub kind: DomainKind,
    pub roots: Vec<Vector>,
    pub positive: Vec<Vector>,
}

impl TubeDomain {
    pub fn new(rs: &RootSystem, kind: DomainKind) -> Self {
        Self {
            kind,
            roots: rs.roots.clone(),
            positive: rs.positive.iter().map(|p| p.vector).collect(),
        }
    }

    pub fn contains(&self, h: &Vector) -> bool {
        let half_pi = std::f64::consts::FRAC_PI_2;
        match self.kind {
            DomainKind::Omega => self.roots.iter().all(|a| a.dot(h).abs() < half_pi),
            DomainKind::TwoOmega => self.roots.iter().all(|a| a.dot(h).abs() < 2.0 * half_pi),
            DomainKind::PositiveChamber => self.positive.iter().all(|a| a.dot(h) > 0.0),
        }
    }
}

pub fn in_domain(d: &TubeDomain, h: &Vector) -> bool {
    d.contains(h)
}
