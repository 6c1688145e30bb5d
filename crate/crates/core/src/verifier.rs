//! Sampled checks of the class condition, sense preservation, univalence
//! and the distortion envelope on circles inside the unit disk.
//!
//! The class condition asks that
//! `Re{(1 + k e^{iφ}) Q - k e^{iφ}} ≥ α` for every `φ`, where
//! `Q = D^u f(z) / D^v f(z)`. Writing the left side as
//! `Re Q + k Re{e^{iφ}(Q - 1)}`, its minimum over `φ` is `Re Q - k|Q - 1|`,
//! so only `z` is sampled.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::classkernel::{DistortionEnvelope, ParamSet};
use crate::error::{Error, Result};
use crate::oboudi::apply_harmonic;
use crate::series::{HarmonicPoly, TCoefficients};

/// Slack on the distortion envelope.
pub const DISTORTION_SLACK: f64 = 1e-9;

/// Largest grid accepted by the pairwise univalence check.
pub const MAX_UNIVALENCE_POINTS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    radii: Vec<f64>,
    angles: usize,
    guard_eps: f64,
    tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        let mut radii: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        radii.extend([0.95, 0.99]);
        Self { radii, angles: 128, guard_eps: 1e-9, tol: 1e-6 }
    }
}

impl GridSpec {
    pub fn new(radii: Vec<f64>, angles: usize, guard_eps: f64, tol: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidGrid("no radii".into()));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::InvalidGrid(format!("radius {r} is not inside (0, 1)")));
        }
        if angles < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 angles, got {angles}")));
        }
        if !(guard_eps > 0.0) {
            return Err(Error::InvalidGrid("guard_eps must be positive".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidGrid("tol must be positive".into()));
        }
        Ok(Self { radii, angles, guard_eps, tol })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn guard_eps(&self) -> f64 {
        self.guard_eps
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `θ_j = 2πj / angles`.
    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angles as f64
    }

    /// Sample points `(r, θ, z)` in radius-major order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.radii.iter().flat_map(move |&r| {
            (0..self.angles).map(move |j| {
                let theta = self.theta(j);
                (r, theta, Complex64::from_polar(r, theta))
            })
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `D^u f` and `D^v f` prepared once for repeated evaluation.
#[derive(Clone, Debug)]
pub struct ClassCondition {
    du: HarmonicPoly,
    dv: HarmonicPoly,
    k: f64,
    alpha: f64,
}

impl ClassCondition {
    pub fn new(f: &HarmonicPoly, p: &ParamSet) -> Self {
        Self {
            du: apply_harmonic(f, p.operator_u()),
            dv: apply_harmonic(f, p.operator_v()),
            k: p.k,
            alpha: p.alpha,
        }
    }

    /// `Q = D^u f(z) / D^v f(z)`, guarded on `|D^v f(z)|`.
    pub fn ratio(&self, z: Complex64, guard_eps: f64) -> Result<Complex64> {
        let den = self.dv.eval(z)?;
        if den.norm() <= guard_eps {
            return Err(Error::GuardTriggered(den.norm()));
        }
        Ok(self.du.eval_unchecked(z) / den)
    }

    /// `min_φ Re{(1 + k e^{iφ}) Q - k e^{iφ}} - α = Re Q - k|Q - 1| - α`.
    pub fn value(&self, z: Complex64, guard_eps: f64) -> Result<f64> {
        let q = self.ratio(z, guard_eps)?;
        Ok(q.re - self.k * (q - 1.0).norm() - self.alpha)
    }

    /// The same expression at a fixed phase `φ`.
    pub fn value_at_phase(&self, z: Complex64, phi: f64, guard_eps: f64) -> Result<f64> {
        let q = self.ratio(z, guard_eps)?;
        let e = Complex64::from_polar(1.0, phi);
        Ok(((1.0 + self.k * e) * q - self.k * e).re - self.alpha)
    }
}

/// Class condition at `z`, minimized over `φ`, minus `α`.
pub fn pointwise_condition(
    f: &HarmonicPoly,
    p: &ParamSet,
    z: Complex64,
    guard_eps: f64,
) -> Result<f64> {
    ClassCondition::new(f, p).value(z, guard_eps)
}

/// Minimum of the class condition over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionScan {
    pub min_value: f64,
    pub argmin: [f64; 2],
    pub evaluated: usize,
    pub skipped: usize,
}

pub fn sampled_condition_min(
    f: &HarmonicPoly,
    p: &ParamSet,
    grid: &GridSpec,
) -> Result<ConditionScan> {
    let cond = ClassCondition::new(f, p);
    let mut best: Option<(f64, Complex64)> = None;
    let (mut evaluated, mut skipped) = (0, 0);
    for (_, _, z) in grid.points() {
        match cond.value(z, grid.guard_eps) {
            Ok(v) => {
                evaluated += 1;
                if best.map_or(true, |(m, _)| v < m) {
                    best = Some((v, z));
                }
            }
            Err(Error::GuardTriggered(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let (min_value, z) = best.ok_or(Error::DegenerateGrid)?;
    Ok(ConditionScan { min_value, argmin: [z.re, z.im], evaluated, skipped })
}

/// `(r, θ, condition value)` for every non-skipped grid point.
pub fn condition_samples(
    f: &HarmonicPoly,
    p: &ParamSet,
    grid: &GridSpec,
) -> Vec<(f64, f64, f64)> {
    let cond = ClassCondition::new(f, p);
    grid.points()
        .filter_map(|(r, theta, z)| cond.value(z, grid.guard_eps).ok().map(|v| (r, theta, v)))
        .collect()
}

/// `min |h'(z)| - |g'(z)|` over the grid.
pub fn sense_preserving_margin(f: &HarmonicPoly, grid: &GridSpec) -> f64 {
    grid.points()
        .map(|(_, _, z)| {
            let (hp, gp) = f.eval_derivatives_unchecked(z);
            hp.norm() - gp.norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `|f(z_1) - f(z_2)| / |z_1 - z_2|` over distinct grid pairs.
pub fn univalence_constant(f: &HarmonicPoly, grid: &GridSpec) -> Result<f64> {
    if grid.len() > MAX_UNIVALENCE_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{} points exceed the pairwise limit of {MAX_UNIVALENCE_POINTS}",
            grid.len()
        )));
    }
    let pts: Vec<(Complex64, Complex64)> =
        grid.points().map(|(_, _, z)| (z, f.eval_unchecked(z))).collect();
    let mut c = f64::INFINITY;
    for (i, &(z1, w1)) in pts.iter().enumerate() {
        for &(z2, w2) in &pts[i + 1..] {
            let dz = (z1 - z2).norm_sqr();
            if dz == 0.0 {
                continue;
            }
            c = c.min((w1 - w2).norm_sqr() / dz);
        }
    }
    Ok(c.sqrt())
}

/// Pairwise-distinct images with a positive empirical Lipschitz-from-below
/// constant. A desk check, not a proof of univalence.
pub fn univalence_desk_check(f: &HarmonicPoly, grid: &GridSpec) -> Result<bool> {
    Ok(univalence_constant(f, grid)? > 0.0)
}

/// One point of the real-axis probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbePoint {
    pub r: f64,
    /// `None` when the guard on `|D^v f(r)|` triggered.
    pub value: Option<f64>,
}

/// The class condition at `φ = 0` along `z = r`, minus `α`.
pub fn necessity_probe(
    t: &TCoefficients,
    p: &ParamSet,
    radii: &[f64],
    guard_eps: f64,
) -> Result<Vec<ProbePoint>> {
    let cond = ClassCondition::new(&t.to_poly(), p);
    radii
        .iter()
        .map(|&r| match cond.value_at_phase(Complex64::new(r, 0.0), 0.0, guard_eps) {
            Ok(v) => Ok(ProbePoint { r, value: Some(v) }),
            Err(Error::GuardTriggered(_)) => Ok(ProbePoint { r, value: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// One row of the envelope CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub r: f64,
    pub theta: f64,
    pub abs_f: f64,
    pub lower: f64,
    pub upper: f64,
}

impl EnvelopeRow {
    pub fn within(&self) -> bool {
        self.lower - DISTORTION_SLACK <= self.abs_f && self.abs_f <= self.upper + DISTORTION_SLACK
    }
}

/// `|f|` against the distortion bounds at every grid point, with
/// `|b_1|` taken from the function.
pub fn distortion_rows(
    t: &TCoefficients,
    p: &ParamSet,
    grid: &GridSpec,
) -> Result<Vec<EnvelopeRow>> {
    let env = DistortionEnvelope::new(p, t.bmag()[0])?;
    let f = t.to_poly();
    grid.points()
        .map(|(r, theta, z)| {
            let (lower, upper) = env.bounds(r)?;
            Ok(EnvelopeRow { r, theta, abs_f: f.eval_unchecked(z).norm(), lower, upper })
        })
        .collect()
}

pub fn distortion_check(t: &TCoefficients, p: &ParamSet, grid: &GridSpec) -> Result<bool> {
    Ok(distortion_rows(t, p, grid)?.iter().all(EnvelopeRow::within))
}

/// Combined verdict for one function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub min_condition_value: f64,
    pub argmin_z: [f64; 2],
    pub min_jacobian_margin: f64,
    pub univalent_ok: bool,
    pub univalence_constant: f64,
    pub skipped_points: usize,
    pub pass: bool,
}

/// Runs the condition scan, the sense-preservation margin and the
/// univalence check on one grid.
pub fn verify(f: &HarmonicPoly, p: &ParamSet, grid: &GridSpec) -> Result<VerificationReport> {
    let scan = sampled_condition_min(f, p, grid)?;
    let margin = sense_preserving_margin(f, grid);
    let c = univalence_constant(f, grid)?;
    let univalent_ok = c > 0.0;
    Ok(VerificationReport {
        min_condition_value: scan.min_value,
        argmin_z: scan.argmin,
        min_jacobian_margin: margin,
        univalent_ok,
        univalence_constant: c,
        skipped_points: scan.skipped,
        pass: scan.min_value >= -grid.tol && margin > 0.0 && univalent_ok,
    })
}

/// Writes `r,theta,condition_value` rows.
pub fn write_condition_csv<W: Write>(out: W, samples: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidCoefficients(format!("csv: {e}"));
    w.write_record(["r", "theta", "condition_value"]).map_err(io)?;
    for (r, theta, v) in samples {
        w.serialize((r, theta, v)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidCoefficients(format!("csv: {e}")))?;
    Ok(())
}

/// Writes `r,theta,abs_f,lower,upper` rows.
pub fn write_envelope_csv<W: Write>(out: W, rows: &[EnvelopeRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidCoefficients(format!("csv: {e}"));
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidCoefficients(format!("csv: {e}")))?;
    Ok(())
}
