//! Coefficient functionals and constructive objects for the class
//! `k-USH(u, v, α, λ)` and its negative-coefficient subclass `k-UTH`.
//!
//! With `B = 1 + (n - 1)λ` and `s = (-1)^(u-v)` the per-index weights are
//!
//! ```text
//! ξ(n) = B^v   + (B^u - B^v)   (1 + k) / (1 - α)
//! η(n) = s B^v + (B^u - s B^v) (1 + k) / (1 - α)
//! ```
//!
//! and a normalized `f = h + conj(g)` belongs to the class whenever
//! `Σ ξ(n)|a_n| + η(n)|b_n| ≤ 2`. For the negative-coefficient subclass the
//! same inequality is also necessary.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::oboudi::{weight, OperatorParams, MAX_ORDER};
use crate::series::{
    check_convex_weights, convex_combine, HarmonicPoly, TCoefficients, NORMALIZATION_TOL,
};

/// Absolute slack on the budget bound `≤ 2`.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Upper bound of the coefficient budget for members.
pub const BUDGET_BOUND: f64 = 2.0;

/// Class parameters `(u, v, k, α, λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamSet {
    pub u: u32,
    pub v: u32,
    pub k: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl ParamSet {
    pub fn new(u: u32, v: u32, k: f64, alpha: f64, lambda: f64) -> Result<Self> {
        if u == 0 {
            return Err(Error::InvalidParams("u must be at least 1".into()));
        }
        if u <= v {
            return Err(Error::InvalidParams(format!("u must exceed v (u = {u}, v = {v})")));
        }
        if u > MAX_ORDER {
            return Err(Error::InvalidParams(format!("u = {u} exceeds {MAX_ORDER}")));
        }
        if !(alpha.is_finite() && (0.0..1.0).contains(&alpha)) {
            return Err(Error::InvalidParams(format!("α must lie in [0, 1), got {alpha}")));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParams(format!("k must be finite and ≥ 0, got {k}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParams(format!("λ must be finite and ≥ 0, got {lambda}")));
        }
        Ok(Self { u, v, k, alpha, lambda })
    }

    /// `s = (-1)^(u-v)`.
    pub fn parity_sign(&self) -> f64 {
        if (self.u - self.v) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn operator_u(&self) -> OperatorParams {
        OperatorParams::new(self.u, self.lambda).expect("validated")
    }

    pub fn operator_v(&self) -> OperatorParams {
        OperatorParams::new(self.v, self.lambda).expect("validated")
    }

    pub fn xi(&self, n: usize) -> f64 {
        xi(n, self)
    }

    pub fn eta(&self, n: usize) -> f64 {
        eta(n, self)
    }

    /// Whether `ξ(n) ≥ n` and `η(n) ≥ n` for `n = 1..=degree`.
    ///
    /// The univalence and sense-preservation parts of the sufficiency
    /// argument bound `Σ n|a_n|` and `Σ n|b_n|` by the budget, which needs
    /// these weights to dominate `n`. This always holds for `λ ≥ 1`.
    pub fn dominates_index(&self, degree: usize) -> bool {
        (1..=degree).all(|n| self.xi(n) >= n as f64 && self.eta(n) >= n as f64)
    }
}

/// `ξ(n)`: weight of `|a_n|` in the budget.
pub fn xi(n: usize, p: &ParamSet) -> f64 {
    let bu = weight(n, p.u, p.lambda);
    let bv = weight(n, p.v, p.lambda);
    bv + (bu - bv) * (1.0 + p.k) / (1.0 - p.alpha)
}

/// `η(n)`: weight of `|b_n|` in the budget.
pub fn eta(n: usize, p: &ParamSet) -> f64 {
    let bu = weight(n, p.u, p.lambda);
    let bv = weight(n, p.v, p.lambda);
    let s = p.parity_sign();
    s * bv + (bu - s * bv) * (1.0 + p.k) / (1.0 - p.alpha)
}

/// `Σ ξ(n)|a_n| + η(n)|b_n|` over magnitude arrays.
fn budget_of_magnitudes(amag: &[f64], bmag: &[f64], p: &ParamSet) -> f64 {
    let a: f64 = amag.iter().enumerate().map(|(i, m)| xi(i + 1, p) * m).sum();
    let b: f64 = bmag.iter().enumerate().map(|(i, m)| eta(i + 1, p) * m).sum();
    a + b
}

/// Coefficient budget of a negative-coefficient function.
pub fn budget(t: &TCoefficients, p: &ParamSet) -> f64 {
    budget_of_magnitudes(t.amag(), t.bmag(), p)
}

/// Coefficient budget of an arbitrary polynomial, computed on `|a_n|`, `|b_n|`.
pub fn budget_of_poly(f: &HarmonicPoly, p: &ParamSet) -> f64 {
    let (amag, bmag) = f.magnitudes();
    budget_of_magnitudes(&amag, &bmag, p)
}

/// Per-index terms of the budget.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Contribution {
    pub n: usize,
    pub xi: f64,
    pub eta: f64,
    pub a_term: f64,
    pub b_term: f64,
}

pub fn contributions(f: &HarmonicPoly, p: &ParamSet) -> Vec<Contribution> {
    let (amag, bmag) = f.magnitudes();
    (1..=f.degree())
        .map(|n| {
            let (x, e) = (xi(n, p), eta(n, p));
            Contribution { n, xi: x, eta: e, a_term: x * amag[n - 1], b_term: e * bmag[n - 1] }
        })
        .collect()
}

/// Sufficient membership test: `|a_1| = 1`, `|b_1| < 1` and budget `≤ 2`.
pub fn is_member_sufficient(f: &HarmonicPoly, p: &ParamSet) -> bool {
    (f.a(1).norm() - 1.0).abs() <= NORMALIZATION_TOL
        && f.is_class_eligible()
        && budget_of_poly(f, p) <= BUDGET_BOUND + MEMBERSHIP_TOL
}

/// Exact membership test for the negative-coefficient subclass.
pub fn is_member_iff_th(t: &TCoefficients, p: &ParamSet) -> bool {
    budget(t, p) <= BUDGET_BOUND + MEMBERSHIP_TOL
}

/// Extremal function `z + Σ_{n≥2} (x_n/ξ(n)) z^n + conj(Σ_{n≥1} (y_n/η(n)) z^n)`.
///
/// `x_tail` holds `x_2, ..., x_N` and `y` holds `y_1, ..., y_N`; together
/// they must be non-negative and sum to 1. The degree is the longer of the
/// two index ranges.
pub fn sharp_function(p: &ParamSet, x_tail: &[f64], y: &[f64]) -> Result<HarmonicPoly> {
    let weights: Vec<f64> = x_tail.iter().chain(y).copied().collect();
    check_convex_weights(&weights)?;
    let degree = (x_tail.len() + 1).max(y.len());
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; degree];
    let mut b = vec![zero; degree];
    a[0] = Complex64::new(1.0, 0.0);
    for (i, &x) in x_tail.iter().enumerate() {
        let n = i + 2;
        a[n - 1] = Complex64::new(x / xi(n, p), 0.0);
    }
    for (i, &w) in y.iter().enumerate() {
        let n = i + 1;
        b[n - 1] = Complex64::new(w / eta(n, p), 0.0);
    }
    HarmonicPoly::new(a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ExtremeKind {
    P,
    Q,
}

/// An extreme point of `k-UTH` together with its `|b_1| < 1` status.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremePoint {
    pub kind: ExtremeKind,
    pub n: usize,
    pub poly: HarmonicPoly,
    /// False when the point violates `|b_1| < 1` (only `Q_1` can).
    pub eligible: bool,
}

/// `P_1(z) = z`, `P_n(z) = z - z^n / ξ(n)`.
pub fn extreme_point_p(n: usize, p: &ParamSet, degree: usize) -> Result<ExtremePoint> {
    if n == 0 || degree < n {
        return Err(Error::InvalidParams(format!("P_{n} needs 1 ≤ n ≤ degree ({degree})")));
    }
    let mut f = HarmonicPoly::identity(degree);
    if n >= 2 {
        let inv = 1.0 / xi(n, p);
        f = f.map_parts(
            |m, c| if m == n { Complex64::new(-inv, 0.0) } else { c },
            |_, c| c,
        );
    }
    Ok(ExtremePoint { kind: ExtremeKind::P, n, eligible: f.is_class_eligible(), poly: f })
}

/// `Q_n(z) = z + (-1)^(u-1) conj(z)^n / η(n)`.
pub fn extreme_point_q(n: usize, p: &ParamSet, degree: usize) -> Result<ExtremePoint> {
    if n == 0 || degree < n {
        return Err(Error::InvalidParams(format!("Q_{n} needs 1 ≤ n ≤ degree ({degree})")));
    }
    let sign = if p.u % 2 == 1 { 1.0 } else { -1.0 };
    let coef = Complex64::new(sign / eta(n, p), 0.0);
    let f = HarmonicPoly::identity(degree)
        .map_parts(|_, c| c, |m, c| if m == n { coef } else { c });
    Ok(ExtremePoint { kind: ExtremeKind::Q, n, eligible: f.is_class_eligible(), poly: f })
}

/// All of `P_1..P_N` and `Q_1..Q_N`.
pub fn extreme_points(p: &ParamSet, degree: usize) -> Vec<ExtremePoint> {
    let ps = (1..=degree).map(|n| extreme_point_p(n, p, degree));
    let qs = (1..=degree).map(|n| extreme_point_q(n, p, degree));
    ps.chain(qs).map(|e| e.expect("index within degree")).collect()
}

/// Convex weights of a member over the extreme points.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeDecomposition {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl ExtremeDecomposition {
    /// `x = [x_1, ..., x_N]`, `y = [y_1, ..., y_N]`, non-negative, with
    /// `x_1 = 1 - Σ_{n≥2} x_n - Σ y_n`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::InvalidWeights("x and y must be non-empty and equal length".into()));
        }
        let all: Vec<f64> = x.iter().chain(&y).copied().collect();
        check_convex_weights(&all)?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Magnitudes `|a_n| = x_n/ξ(n)` (n ≥ 2), `|b_n| = y_n/η(n)`.
    pub fn reconstruct(&self, p: &ParamSet) -> Result<TCoefficients> {
        let mut amag: Vec<f64> =
            self.x.iter().enumerate().map(|(i, &w)| w / xi(i + 1, p)).collect();
        amag[0] = 1.0;
        let bmag = self.y.iter().enumerate().map(|(i, &w)| w / eta(i + 1, p)).collect();
        TCoefficients::new(amag, bmag, p.u)
    }

    /// `Σ x_n P_n + y_n Q_n` as a polynomial.
    pub fn combine(&self, p: &ParamSet) -> Result<HarmonicPoly> {
        let degree = self.x.len();
        let mut fs = Vec::with_capacity(2 * degree);
        for n in 1..=degree {
            fs.push(extreme_point_p(n, p, degree)?.poly);
        }
        for n in 1..=degree {
            fs.push(extreme_point_q(n, p, degree)?.poly);
        }
        let ts: Vec<f64> = self.x.iter().chain(&self.y).copied().collect();
        convex_combine(&fs, &ts)
    }
}

/// Writes a member as a convex combination of extreme points.
pub fn decompose(t: &TCoefficients, p: &ParamSet) -> Result<ExtremeDecomposition> {
    if t.u() != p.u {
        return Err(Error::InvalidParams(format!(
            "coefficients carry u = {} but parameters have u = {}",
            t.u(),
            p.u
        )));
    }
    let mut x: Vec<f64> = t.amag().iter().enumerate().map(|(i, m)| xi(i + 1, p) * m).collect();
    let y: Vec<f64> = t.bmag().iter().enumerate().map(|(i, m)| eta(i + 1, p) * m).collect();
    let used: f64 = x[1..].iter().sum::<f64>() + y.iter().sum::<f64>();
    let x1 = 1.0 - used;
    if x1 < -MEMBERSHIP_TOL {
        return Err(Error::NotAMember(x1));
    }
    // Rounding may leave x_1 a hair below zero on the boundary.
    x[0] = x1.max(0.0);
    Ok(ExtremeDecomposition { x, y })
}

/// Constants `σ`, `τ` of the distortion bound at a given `|b_1|`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DistortionEnvelope {
    pub sigma: f64,
    pub tau: f64,
    pub b1: f64,
}

impl DistortionEnvelope {
    pub fn new(p: &ParamSet, b1: f64) -> Result<Self> {
        if !(b1.is_finite() && (0.0..1.0).contains(&b1)) {
            return Err(Error::InvalidParams(format!("|b_1| must lie in [0, 1), got {b1}")));
        }
        let base = 1.0 + p.lambda;
        let denom =
            base.powi(p.u as i32) * (1.0 + p.k) - base.powi(p.v as i32) * (p.k + p.alpha);
        assert!(denom > 0.0, "distortion denominator {denom} must be positive");
        let sigma = (1.0 - p.alpha) / denom;
        let tau = ((1.0 + p.k) - p.parity_sign() * (p.k + p.alpha)) / denom;
        Ok(Self { sigma, tau, b1 })
    }

    /// `(lower, upper)` bounds on `|f(z)|` at `|z| = r`.
    ///
    /// Uses `(1 ± |b_1|) r ± (σ - τ|b_1|) r²`, with the lower bound clamped at 0.
    pub fn bounds(&self, r: f64) -> Result<(f64, f64)> {
        if !(r.is_finite() && (0.0..1.0).contains(&r)) {
            return Err(Error::InvalidParams(format!("r must lie in [0, 1), got {r}")));
        }
        let quad = (self.sigma - self.tau * self.b1) * r * r;
        let upper = (1.0 + self.b1) * r + quad;
        let lower = ((1.0 - self.b1) * r - quad).max(0.0);
        Ok((lower, upper))
    }
}

pub fn distortion_bounds(p: &ParamSet, b1: f64, r: f64) -> Result<(f64, f64)> {
    DistortionEnvelope::new(p, b1)?.bounds(r)
}

/// Named specializations of the parameter set (all at `λ = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Harmonic starlike of order α: `k = 0, u = 1, v = 0`.
    ShAlpha,
    /// Harmonic convex of order α: `k = 0, u = 2, v = 1`.
    KhAlpha,
    /// `k = 1, u = 1, v = 0`.
    GhAlpha,
    /// `k = 1, u = v + 1`.
    RshVAlpha,
    /// `u = v + 1`, free `k`.
    KushV1,
    /// `u = 2, v = 1`, free `k`.
    KHcv,
    /// `u = 1, v = 0`, free `k`.
    Kush,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::ShAlpha,
        Preset::KhAlpha,
        Preset::GhAlpha,
        Preset::RshVAlpha,
        Preset::KushV1,
        Preset::KHcv,
        Preset::Kush,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::ShAlpha => "SH_alpha",
            Preset::KhAlpha => "KH_alpha",
            Preset::GhAlpha => "GH_alpha",
            Preset::RshVAlpha => "RSH_v_alpha",
            Preset::KushV1 => "kUSH_v1",
            Preset::KHcv => "kHCV",
            Preset::Kush => "kUSH",
        }
    }

    pub fn has_free_k(&self) -> bool {
        matches!(self, Preset::KushV1 | Preset::KHcv | Preset::Kush)
    }

    pub fn has_free_v(&self) -> bool {
        matches!(self, Preset::RshVAlpha | Preset::KushV1)
    }

    /// Parameter set of the specialization. `k` and `v` are used only where
    /// the preset leaves them free.
    pub fn params(&self, alpha: f64, k: f64, v: u32) -> Result<ParamSet> {
        let (u, v, k) = match self {
            Preset::ShAlpha => (1, 0, 0.0),
            Preset::KhAlpha => (2, 1, 0.0),
            Preset::GhAlpha => (1, 0, 1.0),
            Preset::RshVAlpha => (v + 1, v, 1.0),
            Preset::KushV1 => (v + 1, v, k),
            Preset::KHcv => (2, 1, k),
            Preset::Kush => (1, 0, k),
        };
        ParamSet::new(u, v, k, alpha, 1.0)
    }

    /// Closed-form coefficients `(ξ_c(n), η_c(n))` of the specialized
    /// inequality, normalized to the `≤ 2` scale.
    pub fn corollary_coefficients(&self, n: usize, alpha: f64, k: f64, v: u32) -> (f64, f64) {
        let n = n as f64;
        let d = 1.0 - alpha;
        let (pa, pb) = match self {
            Preset::ShAlpha => (n - alpha, n + alpha),
            Preset::KhAlpha => (n * (n - alpha), n * (n + alpha)),
            Preset::GhAlpha => (2.0 * n - 1.0 - alpha, 2.0 * n + 1.0 + alpha),
            Preset::RshVAlpha => {
                let nv = n.powi(v as i32);
                (nv * (2.0 * n - 1.0 - alpha), nv * (2.0 * n + 1.0 + alpha))
            }
            Preset::KushV1 => {
                let nv = n.powi(v as i32);
                (nv * (n + n * k - k - alpha), nv * (n + n * k + k + alpha))
            }
            Preset::KHcv => (n * (n + n * k - k - alpha), n * (n + n * k + k + alpha)),
            Preset::Kush => (n + n * k - k - alpha, n + n * k + k + alpha),
        };
        (pa / d, pb / d)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Draws convex-style weights over `slots` entries with total mass `mass`.
/// A random subset of the slots is left at zero.
fn random_weights<R: Rng + ?Sized>(rng: &mut R, slots: usize, mass: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..slots)
        .map(|_| if rng.gen_bool(0.6) { -rng.gen::<f64>().max(1e-300).ln() } else { 0.0 })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..slots)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x *= mass / total);
    w
}

/// Random member of `k-UTH(u, v, α, λ)` with `degree` coefficients.
///
/// A quarter of the draws sit exactly on the boundary (budget 2); the rest
/// have budget uniformly spread in `[1, 2)`.
pub fn random_member<R: Rng + ?Sized>(
    p: &ParamSet,
    degree: usize,
    rng: &mut R,
) -> TCoefficients {
    let degree = degree.max(1);
    loop {
        let mass = if rng.gen_bool(0.25) { 1.0 } else { rng.gen::<f64>() };
        if let Ok(t) = magnitudes_from_mass(p, degree, mass, rng) {
            return t;
        }
    }
}

/// Random negative-coefficient function whose budget is exactly `2 + margin`.
pub fn random_violator<R: Rng + ?Sized>(
    p: &ParamSet,
    degree: usize,
    margin: f64,
    rng: &mut R,
) -> TCoefficients {
    assert!(margin > 0.0);
    let degree = degree.max(2);
    loop {
        if let Ok(t) = magnitudes_from_mass(p, degree, 1.0 + margin, rng) {
            return t;
        }
    }
}

fn magnitudes_from_mass<R: Rng + ?Sized>(
    p: &ParamSet,
    degree: usize,
    mass: f64,
    rng: &mut R,
) -> Result<TCoefficients> {
    // slots: x_2..x_N then y_1..y_N
    let w = random_weights(rng, 2 * degree - 1, mass);
    let mut amag = vec![0.0; degree];
    amag[0] = 1.0;
    for n in 2..=degree {
        amag[n - 1] = w[n - 2] / xi(n, p);
    }
    let bmag = (1..=degree).map(|n| w[(degree - 1) + (n - 1)] / eta(n, p)).collect();
    TCoefficients::new(amag, bmag, p.u)
}
