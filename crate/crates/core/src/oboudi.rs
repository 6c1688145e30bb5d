//! The Al-Oboudi differential operator `D^u` with step parameter `λ`.
//!
//! One application maps `h` to `(1 - λ) h + λ z h'`, which multiplies the
//! coefficient of `z^n` by `1 + (n - 1)λ`. Applying it `u` times therefore
//! scales that coefficient by `(1 + (n - 1)λ)^u`. At `λ = 1` this is the
//! Sălăgean operator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::HarmonicPoly;

/// Largest operator order accepted by the API.
pub const MAX_ORDER: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    u: u32,
    lambda: f64,
}

impl OperatorParams {
    pub fn new(u: u32, lambda: f64) -> Result<Self> {
        if u > MAX_ORDER {
            return Err(Error::InvalidParams(format!("operator order {u} exceeds {MAX_ORDER}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParams(format!("λ must be finite and ≥ 0, got {lambda}")));
        }
        Ok(Self { u, lambda })
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `(1 + (n - 1)λ)^u`.
pub fn weight(n: usize, u: u32, lambda: f64) -> f64 {
    debug_assert!(n >= 1);
    let base = 1.0 + (n.saturating_sub(1)) as f64 * lambda;
    base.powi(u as i32)
}

/// `D^u` on an analytic coefficient array `[c_1, ..., c_N]`.
pub fn apply_analytic_closed(h: &[Complex64], params: OperatorParams) -> Vec<Complex64> {
    h.iter()
        .enumerate()
        .map(|(i, &c)| c * weight(i + 1, params.u, params.lambda))
        .collect()
}

/// `D^u` as `u` successive applications of `(1 - λ) h + λ z h'`.
///
/// Kept as a reference for [`apply_analytic_closed`].
pub fn apply_analytic_recursive(h: &[Complex64], params: OperatorParams) -> Vec<Complex64> {
    let lambda = params.lambda;
    let mut out = h.to_vec();
    for _ in 0..params.u {
        for (i, c) in out.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            *c = *c * (1.0 - lambda) + *c * (lambda * n);
        }
    }
    out
}

/// `D^u f = D^u h + conj((-1)^u D^u g)`.
///
/// The `(-1)^u` factor is stored on the co-analytic coefficients, so
/// evaluating the result gives `D^u f` pointwise.
pub fn apply_harmonic(f: &HarmonicPoly, params: OperatorParams) -> HarmonicPoly {
    let sign = if params.u % 2 == 0 { 1.0 } else { -1.0 };
    f.map_parts(
        |n, c| c * weight(n, params.u, params.lambda),
        |n, c| c * (sign * weight(n, params.u, params.lambda)),
    )
}
