//! Evaluation of the Harish-Chandra series Φ_λ and of φ_λ.
//!
//! φ_λ = Σ_w c(wλ) Φ_{wλ} on A⁺(2Ω), extended to A(Ω) by W-invariance.
//! Closed forms are used for m ≡ 0 and for m ≡ 2 on reduced systems. In
//! rank one, points close to the origin go through the Jacobi form
//! ₂F₁(½(ρ_α+λ_α), ½(ρ_α−λ_α); ½(m_α+m_{2α}+1); −sinh²α(H)), continued by
//! integrating the radial ODE when the series would cancel badly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gamma_table::{gamma_coefficients, shell_index, GammaTable};
use super::{cdot2, in_tube, Family, Hypergeometric, SpectralParameter, TorusPoint};
use crate::special::hyp2f1_terms;
use crate::{complexify, CVector, Complex64, Error, Matrix, Result, Vector};

/// Distance of λ_α to ℤ (relative to 1+|λ|) below which λ counts as singular.
const SINGULAR_LAMBDA: f64 = 1e-6;
/// Relative perturbation size for singular λ and for points on walls.
const PERTURB: f64 = 1e-5;
/// `|α(H)|/|α|` below which a point counts as lying on a wall.
const WALL: f64 = 1e-6;
/// Rank-one points with `Re α(H)` below this use the Jacobi route.
const JACOBI_BELOW: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Auto,
    Series,
    ClosedForm,
    Jacobi,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "auto" => Ok(Self::Auto),
            "series" => Ok(Self::Series),
            "closed_form" | "closed" => Ok(Self::ClosedForm),
            "jacobi" => Ok(Self::Jacobi),
            _ => Err(Error::InvalidInput(format!("unknown evaluation method {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Auto => "auto",
            Self::Series => "series",
            Self::ClosedForm => "closed_form",
            Self::Jacobi => "jacobi",
        };
        f.write_str(s)
    }
}

/// A truncated Harish-Chandra series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Degree at which summation stopped.
    pub cap: usize,
    /// Magnitude of the last graded shell (including the prefactor a^{λ−ρ}).
    pub last_shell: f64,
}

#[derive(Debug, Clone)]
struct SeriesTerm {
    lambda: CVector,
    c: Complex64,
    table: GammaTable,
}

#[derive(Debug, Clone)]
enum Kind {
    Flat { images: Vec<CVector> },
    Complex { images: Vec<(CVector, i8)>, c: Complex64 },
    /// λ on a wall in the complex case: average over λ ± εv.
    ComplexAveraged(Vec<Kind>),
    General { series: std::result::Result<Vec<Vec<SeriesTerm>>, String> },
}

/// φ_λ with everything that depends only on λ precomputed.
#[derive(Debug, Clone)]
pub struct PreparedPhi<'a> {
    hg: &'a Hypergeometric,
    pub lambda: CVector,
    pub method: Method,
    kind: Kind,
}

fn clen(v: &CVector) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// sinh(z)/z.
fn shc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Real part of the logarithm moved into the closed chamber, with the same
/// Weyl element applied to the imaginary part.
fn to_chamber(hg: &Hypergeometric, h: &CVector) -> CVector {
    let hr = h.map(|z| z.re);
    let hi = h.map(|z| z.im);
    let (r, w): (Vector, Matrix) = hg.rs.to_closed_chamber(&hr);
    let i = w * hi;
    CVector::new(Complex64::new(r[0], i[0]), Complex64::new(r[1], i[1]))
}

impl Hypergeometric {
    /// Precomputes φ_λ for repeated evaluation.
    pub fn prepare(&self, lambda: &SpectralParameter, method: Method) -> Result<PreparedPhi<'_>> {
        let l = lambda.lambda;
        let kind = match (method, self.family()) {
            (Method::Auto | Method::ClosedForm, Family::Flat) => {
                Kind::Flat { images: self.weyl_images(&l).into_iter().map(|(v, _)| v).collect() }
            }
            (Method::Auto | Method::ClosedForm, Family::Complex) => self.complex_kind(&l, true),
            (Method::ClosedForm, Family::General) => {
                return Err(Error::InvalidInput(
                    "no closed form for φ_λ with these multiplicities".into(),
                ))
            }
            (Method::Jacobi, _) if self.rs.rank != 1 => {
                return Err(Error::InvalidInput("the Jacobi route exists in rank one only".into()))
            }
            (Method::Jacobi, _) => Kind::General { series: Ok(Vec::new()) },
            _ => Kind::General { series: self.series_terms(&l).map_err(|e| e.to_string()) },
        };
        Ok(PreparedPhi { hg: self, lambda: l, method, kind })
    }

    fn complex_kind(&self, l: &CVector, check: bool) -> Kind {
        let scale = 1.0 + clen(l);
        if check && self.rs.rank > 1 {
            let singular =
                self.rs.reduced_positive().any(|(_, p)| p.lambda_alpha(l).norm() < SINGULAR_LAMBDA * scale);
            if singular {
                let v = complexify(&self.generic_direction()).scale(PERTURB * scale);
                return Kind::ComplexAveraged(vec![self.complex_kind(&(l + v), false), self.complex_kind(&(l - v), false)]);
            }
        }
        let c = self.pi(&complexify(&self.rho)) / self.pi(l);
        Kind::Complex { images: self.weyl_images(l), c }
    }

    fn is_singular(&self, l: &CVector) -> bool {
        let scale = 1.0 + clen(l);
        self.rs.positive.iter().any(|p| {
            let la = p.lambda_alpha(l);
            (la - la.re.round()).norm() < SINGULAR_LAMBDA * scale
        })
    }

    fn terms_at(&self, l: &CVector) -> Result<Vec<SeriesTerm>> {
        let cap = self.options.max_cap;
        self.weyl_images(l)
            .into_iter()
            .map(|(wl, _)| {
                let sp = SpectralParameter::new(wl);
                Ok(SeriesTerm { lambda: wl, c: self.c_function(&sp)?.value, table: gamma_coefficients(self, &sp, cap)? })
            })
            .collect()
    }

    /// Series data at λ, or at λ ± εv when λ is singular.
    fn series_terms(&self, l: &CVector) -> Result<Vec<Vec<SeriesTerm>>> {
        if !self.is_singular(l) {
            match self.terms_at(l) {
                Ok(t) => return Ok(vec![t]),
                Err(Error::SingularParameter(_)) | Err(Error::PoleEncountered(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let v = complexify(&self.generic_direction());
        let mut eps = PERTURB * (1.0 + clen(l));
        let mut last = String::new();
        for _ in 0..3 {
            match (self.terms_at(&(l + v.scale(eps))), self.terms_at(&(l - v.scale(eps)))) {
                (Ok(a), Ok(b)) => return Ok(vec![a, b]),
                (Err(e), _) | (_, Err(e)) => last = e.to_string(),
            }
            eps *= 2.0;
        }
        Err(Error::SingularParameter(format!("perturbation retries exhausted: {last}")))
    }

    /// Φ_λ(a) summed to the fixed degree `cap`; `a` must lie in A⁺(2Ω).
    pub fn harish_chandra_series(&self, lambda: &SpectralParameter, a: &TorusPoint, cap: usize) -> Result<SeriesValue> {
        if !(self.rs.in_positive_chamber(&a.log_real) && in_tube(&self.rs, &a.log_imag, 2.0)) {
            return Err(Error::Domain("Harish-Chandra series needs a ∈ A⁺(2Ω)".into()));
        }
        let table = gamma_coefficients(self, lambda, cap)?;
        Ok(self.sum_series(&table, &lambda.lambda, &a.log(), cap, false))
    }

    /// Sums Φ_λ shell by shell. In adaptive mode summation stops at the first
    /// checkpoint (8, 16, 32, ...) where the last two shells are below the
    /// tolerance relative to the partial sum.
    fn sum_series(&self, table: &GammaTable, lambda: &CVector, h: &CVector, cap: usize, adaptive: bool) -> SeriesValue {
        let rank = self.rs.rank;
        let x: Vec<Complex64> =
            self.rs.simple.iter().map(|a| (-cdot2(h, &complexify(a))).exp()).collect();
        let powers: Vec<Vec<Complex64>> = x
            .iter()
            .map(|xi| {
                let mut p = Vec::with_capacity(cap + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=cap {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect();
        let pref = (cdot2(lambda, h) - cdot2(&complexify(&self.rho), h)).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        let (mut prev, mut last) = (0.0f64, 0.0f64);
        let mut d_used = cap;
        let mut next_check = 8;
        for d in 0..=cap {
            let mut s = Complex64::new(0.0, 0.0);
            if rank == 1 {
                s += table.values[d] * powers[0][d];
            } else {
                for n1 in (0..=d).rev() {
                    let n2 = d - n1;
                    let g = table.values[shell_index(2, [n1 as u32, n2 as u32])];
                    if g != Complex64::new(0.0, 0.0) {
                        s += g * powers[0][n1] * powers[1][n2];
                    }
                }
            }
            sum += s;
            prev = last;
            last = s.norm();
            if adaptive && d == next_check {
                next_check *= 2;
                if prev.max(last) <= self.options.tolerance * sum.norm() {
                    d_used = d;
                    break;
                }
            }
        }
        SeriesValue { value: pref * sum, cap: d_used, last_shell: pref.norm() * prev.max(last) }
    }

    fn adaptive_series(&self, term: &SeriesTerm, h: &CVector) -> Result<Complex64> {
        let cap = self.options.max_cap;
        let v = self.sum_series(&term.table, &term.lambda, h, cap, true);
        if v.cap == cap && v.last_shell > self.options.tolerance * v.value.norm() {
            return Err(Error::TruncationNotConverged { cap, last_shell: v.last_shell });
        }
        Ok(v.value)
    }

    /// Σ_w sign(w) a^{wλ}, summed by homogeneous degree when the exponents are
    /// small (the terms of degree below |Δ_i⁺| vanish identically).
    fn alternating_sum(&self, images: &[(CVector, i8)], h: &CVector) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let k = images.len();
        debug_assert!(k <= 8);
        let mut u = [(zero, 0.0f64); 8];
        let mut big = 0.0f64;
        for (slot, (l, s)) in u.iter_mut().zip(images) {
            *slot = (cdot2(l, h), *s as f64);
            big = big.max(slot.0.norm());
        }
        let u = &u[..k];
        if big > 2.0 {
            return u.iter().map(|(z, s)| z.exp() * *s).sum();
        }
        let low = self.rs.reduced_positive().count();
        let mut pw = [Complex64::new(1.0, 0.0); 8];
        let pw = &mut pw[..k];
        let mut total = zero;
        let mut bound = 1.0;
        for n in 1..200usize {
            for (p, (z, _)) in pw.iter_mut().zip(u) {
                *p *= z / n as f64;
            }
            bound *= big / n as f64;
            if n < low {
                continue;
            }
            total += pw.iter().zip(u).map(|(p, (_, s))| p * *s).sum::<Complex64>();
            if n > low + 1 && k as f64 * bound < 1e-17 * total.norm() {
                break;
            }
            if bound == 0.0 {
                break;
            }
        }
        total
    }

    /// Complex-case closed form c(λ)·Σ_w sign(w) a^{wλ} / δ^{1/2}(a).
    fn complex_eval(&self, kind: &Kind, h: &CVector) -> Complex64 {
        match kind {
            Kind::ComplexAveraged(parts) => {
                parts.iter().map(|k| self.complex_eval(k, h)).sum::<Complex64>() / parts.len() as f64
            }
            Kind::Complex { images, c } => {
                if self.rs.rank == 1 {
                    let p = &self.rs.positive[0];
                    let t = cdot2(h, &complexify(&p.vector));
                    let la = p.lambda_alpha(&images[0].0);
                    let ra = p.lambda_alpha(&complexify(&self.rho));
                    return ra * shc(la * t) / shc(t);
                }
                if clen(h) < 1e-12 {
                    return Complex64::new(1.0, 0.0);
                }
                let on_wall = self.rs.reduced_positive().any(|(_, p)| {
                    cdot2(h, &complexify(&p.vector)).norm() < WALL * p.vector.norm()
                });
                if on_wall {
                    let u = complexify(&self.generic_direction().yx()).scale(PERTURB * (1.0 + clen(h)));
                    return 0.5 * (self.complex_direct(images, *c, &(h + u)) + self.complex_direct(images, *c, &(h - u)));
                }
                self.complex_direct(images, *c, h)
            }
            _ => unreachable!("complex_eval on a non-complex preparation"),
        }
    }

    fn complex_direct(&self, images: &[(CVector, i8)], c: Complex64, h: &CVector) -> Complex64 {
        c * self.alternating_sum(images, h) / self.delta_sqrt(h)
    }

    fn complex_times_delta_sqrt(&self, kind: &Kind, h: &CVector) -> Complex64 {
        match kind {
            Kind::ComplexAveraged(parts) => {
                parts.iter().map(|k| self.complex_times_delta_sqrt(k, h)).sum::<Complex64>() / parts.len() as f64
            }
            Kind::Complex { images, c } => *c * self.alternating_sum(images, h),
            _ => unreachable!(),
        }
    }

    /// Rank one: φ_λ through the Jacobi form, continued by the radial ODE
    /// when the hypergeometric series would lose too many digits.
    fn jacobi_eval(&self, lambda: &CVector, h: &CVector) -> Result<Complex64> {
        let p = &self.rs.positive[0];
        let m1 = self.m.of(&self.rs, 0);
        let m2 = self.m.of_double(&self.rs, 0);
        let ra = p.lambda_alpha(&complexify(&self.rho));
        let la = p.lambda_alpha(lambda);
        let mut t = cdot2(h, &complexify(&p.vector));
        if t.re < 0.0 {
            t = -t;
        }
        let a = 0.5 * (ra + la);
        let b = 0.5 * (ra - la);
        let c = Complex64::new(0.5 * (m1 + m2 + 1.0), 0.0);
        let z = -t.sinh().powi(2);
        if z.norm() < 0.9 {
            if let Ok((v, ratio)) = hyp2f1_terms(a, b, c, z) {
                if ratio < 1e4 {
                    return Ok(v);
                }
            }
        }
        let tn = t.norm();
        let s0 = (0.5 / tn).min(2.0 / (la.norm() * tn + 1e-300)).min(1.0);
        let t0 = t * s0;
        let z0 = -t0.sinh().powi(2);
        let (y0, _) = hyp2f1_terms(a, b, c, z0)?;
        let (f1, _) = hyp2f1_terms(a + 1.0, b + 1.0, c + 1.0, z0)?;
        let dy0 = -(a * b / c) * (2.0 * t0).sinh() * f1;
        if s0 >= 1.0 {
            return Ok(y0);
        }
        let k = la * la - ra * ra;
        let rhs = |s: f64, y: [Complex64; 2]| -> [Complex64; 2] {
            let tt = t * s;
            let coth = 1.0 / tt.tanh();
            let pcoef = (m1 + m2) * coth + m2 * tt.tanh();
            [t * y[1], t * (k * y[0] - pcoef * y[1])]
        };
        let y = dormand_prince(rhs, s0, 1.0, [y0, dy0], 1e-12)?;
        Ok(y[0])
    }
}

/// Adaptive Dormand–Prince 5(4) for a two-component complex system.
fn dormand_prince<F>(f: F, s0: f64, s1: f64, y0: [Complex64; 2], rtol: f64) -> Result<[Complex64; 2]>
where
    F: Fn(f64, [Complex64; 2]) -> [Complex64; 2],
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const BS: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut s = s0;
    let mut y = y0;
    let mut h = (s1 - s0) / 64.0;
    let zero = Complex64::new(0.0, 0.0);
    for _ in 0..1_000_000 {
        if s >= s1 {
            return Ok(y);
        }
        h = h.min(s1 - s);
        let mut k = [[zero; 2]; 7];
        for i in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                for c in 0..2 {
                    yi[c] += kj[c] * (h * A[i][j]);
                }
            }
            k[i] = f(s + C[i] * h, yi);
        }
        let mut ynew = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut e = zero;
            for i in 0..7 {
                ynew[c] += k[i][c] * (h * B[i]);
                e += k[i][c] * (h * (B[i] - BS[i]));
            }
            let sc = 1e-300 + rtol * y[c].norm().max(ynew[c].norm());
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 {
            s += h;
            y = ynew;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Err(Error::TruncationNotConverged { cap: 1_000_000, last_shell: f64::NAN })
}

impl<'a> PreparedPhi<'a> {
    pub fn context(&self) -> &'a Hypergeometric {
        self.hg
    }

    /// φ_λ(a).
    pub fn eval(&self, a: &TorusPoint) -> Result<Complex64> {
        self.eval_log(&a.log())
    }

    /// φ_λ(exp H) for complex `H`.
    pub fn eval_log(&self, h: &CVector) -> Result<Complex64> {
        let hg = self.hg;
        match &self.kind {
            Kind::Flat { images } => Ok(images.iter().map(|l| cdot2(l, h).exp()).sum()),
            k @ (Kind::Complex { .. } | Kind::ComplexAveraged(_)) => Ok(hg.complex_eval(k, h)),
            Kind::General { series } => {
                let hi = h.map(|z| z.im);
                let hr = h.map(|z| z.re);
                let ok = in_tube(&hg.rs, &hi, 1.0)
                    || (hg.rs.in_positive_chamber(&hr) && in_tube(&hg.rs, &hi, 2.0));
                if !ok {
                    return Err(Error::Domain("φ_λ is evaluated on A(Ω) ∪ A⁺(2Ω) only".into()));
                }
                if self.method == Method::Jacobi {
                    return hg.jacobi_eval(&self.lambda, h);
                }
                let near_origin = hg.rs.rank == 1 && {
                    let t = cdot2(h, &complexify(&hg.rs.positive[0].vector));
                    t.re.abs() < JACOBI_BELOW
                };
                if self.method == Method::Auto && near_origin {
                    if let Ok(v) = hg.jacobi_eval(&self.lambda, h) {
                        return Ok(v);
                    }
                }
                let sets = series.as_ref().map_err(|e| Error::SingularParameter(e.clone()))?;
                let res = self.series_value(sets, h);
                match res {
                    Err(_) if self.method == Method::Auto && hg.rs.rank == 1 && !near_origin => {
                        hg.jacobi_eval(&self.lambda, h)
                    }
                    r => r,
                }
            }
        }
    }

    fn series_value(&self, sets: &[Vec<SeriesTerm>], h: &CVector) -> Result<Complex64> {
        let hg = self.hg;
        let hc = to_chamber(hg, h);
        let hr = hc.map(|z| z.re);
        let on_wall = hg.rs.positive.iter().any(|p| p.eval(&hr) < WALL * p.vector.norm());
        let points: Vec<CVector> = if on_wall {
            let u = complexify(&hg.generic_direction().yx()).scale(PERTURB * (1.0 + clen(h)));
            vec![to_chamber(hg, &(hc + u)), to_chamber(hg, &(hc - u))]
        } else {
            vec![hc]
        };
        let mut total = Complex64::new(0.0, 0.0);
        for terms in sets {
            for p in &points {
                for t in terms {
                    total += t.c * hg.adaptive_series(t, p)?;
                }
            }
        }
        Ok(total / (sets.len() * points.len()) as f64)
    }

    /// φ_λ(exp H)·δ(exp H) for real `H`, without dividing by δ^{1/2} in the
    /// complex case.
    pub fn eval_times_delta(&self, h: &Vector) -> Result<Complex64> {
        match &self.kind {
            k @ (Kind::Complex { .. } | Kind::ComplexAveraged(_)) if self.hg.rs.rank > 1 => {
                let hc = complexify(h);
                Ok(self.hg.complex_times_delta_sqrt(k, &hc) * self.hg.delta_sqrt(&hc))
            }
            _ => {
                let d = self.hg.delta(h);
                if d == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(self.eval_log(&complexify(h))? * d)
            }
        }
    }

    /// φ_λ(exp H)·δ^{1/2}(exp H) in the complex case, an entire function of `H`.
    pub fn eval_times_delta_sqrt(&self, h: &CVector) -> Result<Complex64> {
        match &self.kind {
            k @ (Kind::Complex { .. } | Kind::ComplexAveraged(_)) => Ok(self.hg.complex_times_delta_sqrt(k, h)),
            _ => Ok(self.eval_log(h)? * self.hg.delta_sqrt(h)),
        }
    }
}

/// Report of the growth estimate |φ_λ(a)| ≤ C e^{E(a)} with
/// E(a) = −min_w Im wλ(H_I) + max_w wρ(H_I) + max_w Re wλ(H_R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    pub samples: usize,
    /// Fitted constant: the largest observed ratio.
    pub max_ratio: f64,
    pub min_ratio: f64,
}

impl Hypergeometric {
    pub fn hypergeometric_function(&self, lambda: &SpectralParameter, a: &TorusPoint, method: Method) -> Result<Complex64> {
        self.prepare(lambda, method)?.eval(a)
    }

    pub fn phi(&self, lambda: &SpectralParameter, a: &TorusPoint) -> Result<Complex64> {
        self.hypergeometric_function(lambda, a, Method::Auto)
    }

    pub fn growth_exponent(&self, lambda: &CVector, a: &TorusPoint) -> f64 {
        let hr = complexify(&a.log_real);
        let hi = complexify(&a.log_imag);
        let rho = complexify(&self.rho);
        let mut min_im = f64::INFINITY;
        let mut max_rho = f64::NEG_INFINITY;
        let mut max_re = f64::NEG_INFINITY;
        for (w, _) in self.weyl.iter() {
            let wl = super::cmul(w, lambda);
            min_im = min_im.min(cdot2(&wl, &hi).im);
            max_rho = max_rho.max(cdot2(&super::cmul(w, &rho), &hi).re);
            max_re = max_re.max(cdot2(&wl, &hr).re);
        }
        -min_im + max_rho + max_re
    }

    pub fn growth_bound_check(&self, lambda: &SpectralParameter, samples: &[TorusPoint]) -> Result<GrowthReport> {
        let prep = self.prepare(lambda, Method::Auto)?;
        let mut max_ratio = 0.0f64;
        let mut min_ratio = f64::INFINITY;
        for a in samples {
            let r = prep.eval(a)?.norm() / self.growth_exponent(&lambda.lambda, a).exp();
            max_ratio = max_ratio.max(r);
            min_ratio = min_ratio.min(r);
        }
        Ok(GrowthReport { samples: samples.len(), max_ratio, min_ratio })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, MultiplicityFunction, RootSystemType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(kind: RootSystemType, m: &[f64]) -> Hypergeometric {
        let rs = build_root_system(kind, 1.0).unwrap();
        let m = MultiplicityFunction::from_slice(&rs, m).unwrap();
        Hypergeometric::new(rs, m).unwrap()
    }

    fn cv(a: f64, b: f64, c: f64, d: f64) -> CVector {
        CVector::new(Complex64::new(a, b), Complex64::new(c, d))
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    /// The rank-one closed form written out directly: (|α|²/(α,λ)) sinh λ(H)/sinh α(H).
    fn a1_sinh_oracle(l: Complex64, x: Complex64) -> Complex64 {
        (1.0 / l) * (l * x).sinh() / x.sinh()
    }

    #[test]
    fn series_trivial_cases() {
        let flat = ctx(RootSystemType::A2, &[0.0]);
        let l = SpectralParameter::new(cv(0.3, 0.1, -0.7, 0.2));
        let a = TorusPoint::real(Vector::new(1.0, 0.9));
        for cap in [0, 3, 10] {
            let v = flat.harish_chandra_series(&l, &a, cap).unwrap();
            let expected = cdot2(&l.lambda, &a.log()).exp();
            assert!(rel(v.value, expected) < 1e-14);
        }
        let hg = ctx(RootSystemType::B2, &[1.0, 2.0]);
        let v = hg.harish_chandra_series(&l, &a, 0).unwrap();
        let expected = (cdot2(&l.lambda, &a.log()) - hg.rho.dot(&a.log_real)).exp();
        assert!(rel(v.value, expected) < 1e-14);
        let bad = TorusPoint::real(Vector::new(-1.0, 0.5));
        assert!(matches!(hg.harish_chandra_series(&l, &bad, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn a1_series_is_geometric() {
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let l = SpectralParameter::new(cv(0.4, 1.3, 0.0, 0.0));
        for x in [0.5, 0.8, 1.5] {
            let a = TorusPoint::new(&hg.rs, Vector::new(x, 0.0), Vector::new(0.3, 0.0)).unwrap();
            let v = hg.harish_chandra_series(&l, &a, 64).unwrap();
            let h = a.log()[0];
            let expected = ((l.lambda[0] - 1.0) * h).exp() / (1.0 - (-2.0 * h).exp());
            assert!(rel(v.value, expected) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn a1_m2_all_routes_match_sinh_formula() {
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let l = cv(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0, 0.0);
            let sp = SpectralParameter::new(l);
            for (x, y) in [(0.7, 0.2), (1.2, -1.0), (0.05, 0.4), (2.5, 0.0), (-0.9, 0.1)] {
                let a = TorusPoint::new(&hg.rs, Vector::new(x, 0.0), Vector::new(y, 0.0)).unwrap();
                let expected = a1_sinh_oracle(l[0], a.log()[0]);
                for method in [Method::Auto, Method::ClosedForm, Method::Jacobi] {
                    let v = hg.hypergeometric_function(&sp, &a, method).unwrap();
                    assert!(rel(v, expected) < 1e-10, "{method} at ({x},{y}): {v} vs {expected}");
                }
                if x.abs() >= 0.6 {
                    let v = hg.hypergeometric_function(&sp, &a, Method::Series).unwrap();
                    assert!(rel(v, expected) < 1e-10, "series at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn jacobi_route_continues_through_the_ode() {
        // large λ near the origin forces the ODE continuation
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let l = cv(0.0, 25.0, 0.0, 0.0);
        let sp = SpectralParameter::new(l);
        let prep = hg.prepare(&sp, Method::Jacobi).unwrap();
        for x in [0.3, 0.55, 0.85] {
            let h = complexify(&Vector::new(x, 0.0));
            let v = prep.eval_log(&h).unwrap();
            let expected = a1_sinh_oracle(l[0], h[0]);
            assert!(rel(v, expected) < 1e-9, "x={x}: {v} vs {expected}");
        }
    }

    #[test]
    fn general_multiplicity_routes_agree() {
        for (kind, m) in [(RootSystemType::A1, &[1.0][..]), (RootSystemType::A1, &[3.5]), (RootSystemType::BC1, &[2.0, 1.0])] {
            let hg = ctx(kind, m);
            let sp = SpectralParameter::new(cv(0.8, 1.7, 0.0, 0.0));
            let s = hg.prepare(&sp, Method::Series).unwrap();
            let j = hg.prepare(&sp, Method::Jacobi).unwrap();
            for x in [0.65, 0.75, 0.85] {
                let h = cv(x, 0.1, 0.0, 0.0);
                let a = s.eval_log(&h).unwrap();
                let b = j.eval_log(&h).unwrap();
                assert!(rel(a, b) < 1e-9, "{kind} {m:?} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn normalized_at_identity() {
        for (kind, m) in [(RootSystemType::A1, &[1.0][..]), (RootSystemType::A2, &[2.0]), (RootSystemType::BC1, &[2.0, 1.0]), (RootSystemType::B2, &[0.0])] {
            let hg = ctx(kind, m);
            let sp = SpectralParameter::new(cv(0.8, 1.7, -0.4, 0.3));
            let v = hg.phi(&sp, &TorusPoint::real(Vector::zeros()));
            if hg.family() == Family::Flat {
                assert!((v.unwrap() - hg.weyl_order() as f64).norm() < 1e-12);
            } else if hg.rank() == 1 || hg.family() == Family::Complex {
                assert!((v.unwrap() - 1.0).norm() < 1e-10, "{kind}");
            }
        }
    }

    #[test]
    fn a2_series_matches_closed_form() {
        let hg = ctx(RootSystemType::A2, &[2.0]);
        let sp = SpectralParameter::new(cv(0.6, 0.9, -0.3, 1.4));
        let s = hg.prepare(&sp, Method::Series).unwrap();
        let c = hg.prepare(&sp, Method::ClosedForm).unwrap();
        // α₁(H) = 1.4, α₂(H) = 1.2
        let h = cv(1.4, 0.2, 1.9 / 3f64.sqrt() * 2.0, -0.1);
        let a = s.eval_log(&h).unwrap();
        let b = c.eval_log(&h).unwrap();
        assert!(rel(a, b) < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn a1xa1_is_a_product() {
        let hg = ctx(RootSystemType::A1xA1, &[1.0, 3.0]);
        let a1 = ctx(RootSystemType::A1, &[1.0]);
        let a3 = ctx(RootSystemType::A1, &[3.0]);
        let l = cv(0.5, 0.8, -1.2, 0.4);
        let h = Vector::new(0.9, 1.1);
        let v = hg.phi(&SpectralParameter::new(l), &TorusPoint::real(h)).unwrap();
        let p1 = a1.phi(&SpectralParameter::new(cv(l[0].re, l[0].im, 0.0, 0.0)), &TorusPoint::real(Vector::new(h[0], 0.0))).unwrap();
        let p2 = a3.phi(&SpectralParameter::new(cv(l[1].re, l[1].im, 0.0, 0.0)), &TorusPoint::real(Vector::new(h[1], 0.0))).unwrap();
        assert!(rel(v, p1 * p2) < 1e-10);
    }

    #[test]
    fn weyl_symmetry_in_lambda_and_a() {
        let hg = ctx(RootSystemType::B2, &[1.0, 2.0]);
        let l = cv(0.5, 0.8, -1.2, 0.4);
        let h = Vector::new(1.9, 0.8);
        let base = hg.phi(&SpectralParameter::new(l), &TorusPoint::real(h)).unwrap();
        for (w, _) in hg.weyl.iter() {
            let v = hg.phi(&SpectralParameter::new(super::super::cmul(w, &l)), &TorusPoint::real(h)).unwrap();
            assert!(rel(v, base) < 1e-12);
            let v = hg.phi(&SpectralParameter::new(l), &TorusPoint::real(w * h)).unwrap();
            assert!(rel(v, base) < 1e-12);
        }
    }

    #[test]
    fn singular_lambda_by_perturbation() {
        // λ_α = 1 is singular for the series but φ is holomorphic there
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let sp = SpectralParameter::real(&Vector::new(1.0, 0.0));
        let a = TorusPoint::real(Vector::new(1.1, 0.0));
        let v = hg.hypergeometric_function(&sp, &a, Method::Series).unwrap();
        let expected = a1_sinh_oracle(Complex64::new(1.0, 0.0), Complex64::new(1.1, 0.0));
        assert!(rel(v, expected) < 1e-8, "{v} vs {expected}");
        // complex closed form at a wall in λ
        let hg = ctx(RootSystemType::A2, &[2.0]);
        let sp = SpectralParameter::real(&Vector::new(0.0, 1.0));
        let h = Vector::new(0.8, 0.3);
        let v = hg.phi(&sp, &TorusPoint::real(h)).unwrap();
        let sp2 = SpectralParameter::real(&Vector::new(1e-3, 1.0));
        let w = hg.phi(&sp2, &TorusPoint::real(h)).unwrap();
        assert!(rel(v, w) < 1e-3);
    }

    #[test]
    fn closed_form_is_stable_near_the_origin() {
        let hg = ctx(RootSystemType::A2, &[2.0]);
        let sp = SpectralParameter::new(cv(0.0, 7.0, 0.0, -3.0));
        let p = hg.prepare(&sp, Method::ClosedForm).unwrap();
        let mut prev = p.eval_log(&complexify(&Vector::new(1e-2, 3e-3))).unwrap();
        for s in [1e-3, 1e-4, 1e-5] {
            let v = p.eval_log(&complexify(&Vector::new(s, 0.3 * s))).unwrap();
            assert!((v - 1.0).norm() < 1e-3 * s.max(1e-3) * 100.0);
            assert!((v - prev).norm() < 1e-2);
            prev = v;
        }
        // on a wall
        let v = p.eval_log(&complexify(&Vector::new(0.0, 0.5))).unwrap();
        let w = p.eval_log(&complexify(&Vector::new(1e-4, 0.5))).unwrap();
        assert!((v - w).norm() < 1e-3 * w.norm().max(1.0));
    }

    #[test]
    fn growth_bound_holds() {
        let hg = ctx(RootSystemType::A1, &[2.0]);
        let sp = SpectralParameter::real(&Vector::new(1.3, 0.0));
        let samples: Vec<TorusPoint> = (0..40).map(|i| TorusPoint::real(Vector::new(-4.0 + 0.2 * i as f64, 0.0))).collect();
        let r = hg.growth_bound_check(&sp, &samples).unwrap();
        assert!(r.max_ratio.is_finite() && r.max_ratio < 2.0);
        let flat = ctx(RootSystemType::A1, &[0.0]);
        let r = flat.growth_bound_check(&SpectralParameter::real(&Vector::zeros()), &samples).unwrap();
        assert!((r.max_ratio - 2.0).abs() < 1e-14 && (r.min_ratio - 2.0).abs() < 1e-14);
    }
}
