//! Truncated harmonic polynomials `f = h + conj(g)` on the unit disk.
//!
//! Both parts are stored as coefficient arrays indexed `n = 1..=N`, so
//! `h(z) = a_1 z + a_2 z^2 + ...` and `g(z) = b_1 z + b_2 z^2 + ...`.
//! Infinite series are represented by their truncation; the missing tail is
//! zero. Operations that combine polynomials of different degrees pad the
//! shorter one with zeros.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on `Σ t_j = 1` for convex weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Slack allowed on `|a_1| = 1` when reading magnitudes off a computed polynomial.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicPoly {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl HarmonicPoly {
    /// Builds a polynomial from analytic and co-analytic coefficients
    /// (`a[0]` is `a_1`). Both arrays must have the same non-zero length.
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidCoefficients("degree must be at least 1".into()));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidCoefficients(format!(
                "analytic part has {} coefficients, co-analytic part has {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite coefficient".into()));
        }
        Ok(Self { a, b })
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(
            a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            b.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// `f(z) = z` truncated at `degree`.
    pub fn identity(degree: usize) -> Self {
        let degree = degree.max(1);
        let mut a = vec![Complex64::new(0.0, 0.0); degree];
        a[0] = Complex64::new(1.0, 0.0);
        Self { a, b: vec![Complex64::new(0.0, 0.0); degree] }
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// Analytic coefficients, `[a_1, ..., a_N]`.
    pub fn analytic(&self) -> &[Complex64] {
        &self.a
    }

    /// Co-analytic coefficients, `[b_1, ..., b_N]`.
    pub fn coanalytic(&self) -> &[Complex64] {
        &self.b
    }

    /// `a_n` with 1-based index; zero beyond the truncation.
    pub fn a(&self, n: usize) -> Complex64 {
        coeff(&self.a, n)
    }

    /// `b_n` with 1-based index; zero beyond the truncation.
    pub fn b(&self, n: usize) -> Complex64 {
        coeff(&self.b, n)
    }

    /// `a_1 = 1` exactly.
    pub fn is_normalized(&self) -> bool {
        self.a[0] == Complex64::new(1.0, 0.0)
    }

    /// `|b_1| < 1`, required for sense preservation at the origin.
    pub fn is_class_eligible(&self) -> bool {
        self.b[0].norm() < 1.0
    }

    /// Coefficient magnitudes `(|a_n|, |b_n|)`.
    pub fn magnitudes(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.a.iter().map(|c| c.norm()).collect(),
            self.b.iter().map(|c| c.norm()).collect(),
        )
    }

    /// Zero-pads both parts to `degree` (never truncates).
    pub fn padded(&self, degree: usize) -> Self {
        let degree = degree.max(self.degree());
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        a.resize(degree, Complex64::new(0.0, 0.0));
        b.resize(degree, Complex64::new(0.0, 0.0));
        Self { a, b }
    }

    /// Maps both coefficient arrays, keeping the degree.
    pub(crate) fn map_parts(
        &self,
        fa: impl Fn(usize, Complex64) -> Complex64,
        fb: impl Fn(usize, Complex64) -> Complex64,
    ) -> Self {
        Self {
            a: self.a.iter().enumerate().map(|(i, &c)| fa(i + 1, c)).collect(),
            b: self.b.iter().enumerate().map(|(i, &c)| fb(i + 1, c)).collect(),
        }
    }

    /// `f(z) = h(z) + conj(g(z))`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        horner(&self.a, z) + horner(&self.b, z).conj()
    }

    /// `(h'(z), g'(z))`.
    pub fn eval_derivatives(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        check_disk(z)?;
        Ok(self.eval_derivatives_unchecked(z))
    }

    pub(crate) fn eval_derivatives_unchecked(&self, z: Complex64) -> (Complex64, Complex64) {
        (horner_derivative(&self.a, z), horner_derivative(&self.b, z))
    }

    /// Analytic part `h(z)` alone.
    pub fn eval_analytic(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(horner(&self.a, z))
    }

    /// Co-analytic part `g(z)` alone (before conjugation).
    pub fn eval_coanalytic(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(horner(&self.b, z))
    }
}

impl Add for &HarmonicPoly {
    type Output = HarmonicPoly;

    fn add(self, rhs: &HarmonicPoly) -> HarmonicPoly {
        let n = self.degree().max(rhs.degree());
        let l = self.padded(n);
        let r = rhs.padded(n);
        HarmonicPoly {
            a: l.a.iter().zip(&r.a).map(|(x, y)| x + y).collect(),
            b: l.b.iter().zip(&r.b).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Mul<f64> for &HarmonicPoly {
    type Output = HarmonicPoly;

    fn mul(self, s: f64) -> HarmonicPoly {
        self.map_parts(|_, c| c * s, |_, c| c * s)
    }
}

fn coeff(v: &[Complex64], n: usize) -> Complex64 {
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    v.get(n - 1).copied().unwrap_or_default()
}

fn check_disk(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDisk { re: z.re, im: z.im });
    }
    Ok(())
}

// Σ c_n z^n, n = 1..N
fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &cn in c.iter().rev() {
        acc = acc * z + cn;
    }
    acc * z
}

// Σ n c_n z^(n-1)
fn horner_derivative(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &cn) in c.iter().enumerate().rev() {
        acc = acc * z + cn * (i + 1) as f64;
    }
    acc
}

/// Magnitude encoding of the negative-coefficient subclass:
/// `h(z) = z - Σ_{n≥2} |a_n| z^n`, `g(z) = (-1)^(u-1) Σ_{n≥1} |b_n| z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TCoefficients {
    amag: Vec<f64>,
    bmag: Vec<f64>,
    u: u32,
}

impl TCoefficients {
    /// `amag[0]` must be 1, `bmag[0]` below 1, every entry finite and
    /// non-negative.
    pub fn new(amag: Vec<f64>, bmag: Vec<f64>, u: u32) -> Result<Self> {
        if amag.is_empty() || amag.len() != bmag.len() {
            return Err(Error::InvalidCoefficients(format!(
                "magnitude arrays must be non-empty and equal length (got {} and {})",
                amag.len(),
                bmag.len()
            )));
        }
        if u == 0 {
            return Err(Error::InvalidCoefficients("u must be positive".into()));
        }
        if amag.iter().chain(&bmag).any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::InvalidCoefficients(
                "magnitudes must be finite and non-negative".into(),
            ));
        }
        if amag[0] != 1.0 {
            return Err(Error::InvalidCoefficients(format!("|a_1| must be 1, got {}", amag[0])));
        }
        if bmag[0] >= 1.0 {
            return Err(Error::InvalidCoefficients(format!("|b_1| must be < 1, got {}", bmag[0])));
        }
        Ok(Self { amag, bmag, u })
    }

    /// `f(z) = z` in magnitude form.
    pub fn identity(degree: usize, u: u32) -> Self {
        let degree = degree.max(1);
        let mut amag = vec![0.0; degree];
        amag[0] = 1.0;
        Self { amag, bmag: vec![0.0; degree], u: u.max(1) }
    }

    /// Reads `|a_n|`, `|b_n|` off an arbitrary polynomial (signs dropped).
    /// `|a_1|` within [`NORMALIZATION_TOL`] of 1 is snapped to 1.
    pub fn from_poly_magnitudes(f: &HarmonicPoly, u: u32) -> Result<Self> {
        let (mut amag, bmag) = f.magnitudes();
        if (amag[0] - 1.0).abs() <= NORMALIZATION_TOL {
            amag[0] = 1.0;
        }
        Self::new(amag, bmag, u)
    }

    pub fn degree(&self) -> usize {
        self.amag.len()
    }

    pub fn amag(&self) -> &[f64] {
        &self.amag
    }

    pub fn bmag(&self) -> &[f64] {
        &self.bmag
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    /// Sign `(-1)^(u-1)` carried by the co-analytic part.
    pub fn coanalytic_sign(&self) -> f64 {
        if self.u % 2 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn to_poly(&self) -> HarmonicPoly {
        let sign = self.coanalytic_sign();
        let a = self
            .amag
            .iter()
            .enumerate()
            .map(|(i, &m)| Complex64::new(if i == 0 { 1.0 } else { -m }, 0.0))
            .collect();
        let b = self.bmag.iter().map(|&m| Complex64::new(sign * m, 0.0)).collect();
        HarmonicPoly { a, b }
    }
}

/// Coefficientwise (Hadamard) product. Signed coefficients are multiplied
/// as they are; the result has the larger of the two degrees.
pub fn hadamard_convolve(f: &HarmonicPoly, g: &HarmonicPoly) -> HarmonicPoly {
    let n = f.degree().max(g.degree());
    let f = f.padded(n);
    let g = g.padded(n);
    HarmonicPoly {
        a: f.a.iter().zip(&g.a).map(|(x, y)| x * y).collect(),
        b: f.b.iter().zip(&g.b).map(|(x, y)| x * y).collect(),
    }
}

/// `Σ t_j f_j` for convex weights `t_j` (non-negative, summing to 1).
pub fn convex_combine(fs: &[HarmonicPoly], ts: &[f64]) -> Result<HarmonicPoly> {
    check_convex_weights(ts)?;
    if fs.len() != ts.len() {
        return Err(Error::InvalidWeights(format!(
            "{} functions but {} weights",
            fs.len(),
            ts.len()
        )));
    }
    let n = fs.iter().map(HarmonicPoly::degree).max().unwrap_or(1);
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; n];
    let mut b = vec![zero; n];
    for (f, &t) in fs.iter().zip(ts) {
        for (acc, c) in a.iter_mut().zip(&f.a) {
            *acc += c * t;
        }
        for (acc, c) in b.iter_mut().zip(&f.b) {
            *acc += c * t;
        }
    }
    Ok(HarmonicPoly { a, b })
}

pub(crate) fn check_convex_weights(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidWeights("no weights given".into()));
    }
    if let Some(t) = ts.iter().find(|t| !(t.is_finite() && (0.0..=1.0).contains(*t))) {
        return Err(Error::InvalidWeights(format!("weight {t} is outside [0, 1]")));
    }
    let sum: f64 = ts.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Coefficient file: `{ "degree", "a_re", "a_im", "b_re", "b_im" }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientJson {
    pub degree: usize,
    pub a_re: Vec<f64>,
    pub a_im: Vec<f64>,
    pub b_re: Vec<f64>,
    pub b_im: Vec<f64>,
}

/// Magnitude file: `{ "degree", "amag", "bmag", "u" }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnitudeJson {
    pub degree: usize,
    pub amag: Vec<f64>,
    pub bmag: Vec<f64>,
    pub u: u32,
}

/// Either on-disk coefficient format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesJson {
    Coefficients(CoefficientJson),
    Magnitudes(MagnitudeJson),
}

impl From<&HarmonicPoly> for CoefficientJson {
    fn from(f: &HarmonicPoly) -> Self {
        Self {
            degree: f.degree(),
            a_re: f.a.iter().map(|c| c.re).collect(),
            a_im: f.a.iter().map(|c| c.im).collect(),
            b_re: f.b.iter().map(|c| c.re).collect(),
            b_im: f.b.iter().map(|c| c.im).collect(),
        }
    }
}

impl TryFrom<&CoefficientJson> for HarmonicPoly {
    type Error = Error;

    fn try_from(j: &CoefficientJson) -> Result<Self> {
        let n = j.degree;
        if [j.a_re.len(), j.a_im.len(), j.b_re.len(), j.b_im.len()].iter().any(|&l| l != n) {
            return Err(Error::InvalidCoefficients(format!(
                "every coefficient array must have length degree = {n}"
            )));
        }
        let join = |re: &[f64], im: &[f64]| -> Vec<Complex64> {
            re.iter().zip(im).map(|(&x, &y)| Complex64::new(x, y)).collect()
        };
        HarmonicPoly::new(join(&j.a_re, &j.a_im), join(&j.b_re, &j.b_im))
    }
}

impl From<&TCoefficients> for MagnitudeJson {
    fn from(t: &TCoefficients) -> Self {
        Self { degree: t.degree(), amag: t.amag.clone(), bmag: t.bmag.clone(), u: t.u }
    }
}

impl TryFrom<&MagnitudeJson> for TCoefficients {
    type Error = Error;

    fn try_from(j: &MagnitudeJson) -> Result<Self> {
        if j.amag.len() != j.degree || j.bmag.len() != j.degree {
            return Err(Error::InvalidCoefficients(format!(
                "amag and bmag must have length degree = {}",
                j.degree
            )));
        }
        TCoefficients::new(j.amag.clone(), j.bmag.clone(), j.u)
    }
}

impl SeriesJson {
    /// The polynomial the file describes (magnitude files are expanded with
    /// their sign pattern).
    pub fn to_poly(&self) -> Result<HarmonicPoly> {
        match self {
            Self::Coefficients(c) => HarmonicPoly::try_from(c),
            Self::Magnitudes(m) => Ok(TCoefficients::try_from(m)?.to_poly()),
        }
    }
}
