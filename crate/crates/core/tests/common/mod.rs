//! Reference computations shared by the integration tests. Nothing here
//! goes through the operator or budget code it is used to check.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use harmclass::{HarmonicPoly, ParamSet};

/// `(1 + (n - 1)λ)^e` through `powf`.
pub fn base_pow(n: usize, e: u32, lambda: f64) -> f64 {
    (1.0 + (n as f64 - 1.0) * lambda).powf(f64::from(e))
}

/// `(1 - α)⁻¹ (B^u (1 + k) - B^v (k + α))`.
pub fn xi_ref(n: usize, p: &ParamSet) -> f64 {
    let (bu, bv) = (base_pow(n, p.u, p.lambda), base_pow(n, p.v, p.lambda));
    (bu * (1.0 + p.k) - bv * (p.k + p.alpha)) / (1.0 - p.alpha)
}

/// `(1 - α)⁻¹ (B^u (1 + k) - s B^v (k + α))`.
pub fn eta_ref(n: usize, p: &ParamSet) -> f64 {
    let (bu, bv) = (base_pow(n, p.u, p.lambda), base_pow(n, p.v, p.lambda));
    let s = (-1f64).powi((p.u - p.v) as i32);
    (bu * (1.0 + p.k) - s * bv * (p.k + p.alpha)) / (1.0 - p.alpha)
}

/// `D^e f(z)` summed term by term.
pub fn oboudi_eval(f: &HarmonicPoly, e: u32, lambda: f64, z: Complex64) -> Complex64 {
    let sign = (-1f64).powi(e as i32);
    let mut h = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for n in 1..=f.degree() {
        let zn = z.powu(n as u32);
        let w = base_pow(n, e, lambda);
        h += f.a(n) * w * zn;
        g += f.b(n) * w * zn;
    }
    h + (g * sign).conj()
}

/// `min_φ Re{(1 + k e^{iφ}) Q - k e^{iφ}} - α` over `samples` equispaced phases.
pub fn phi_min_brute_force(f: &HarmonicPoly, p: &ParamSet, z: Complex64, samples: usize) -> f64 {
    let q = oboudi_eval(f, p.u, p.lambda, z) / oboudi_eval(f, p.v, p.lambda, z);
    (0..samples)
        .map(|j| {
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / samples as f64);
            ((1.0 + p.k * e) * q - p.k * e).re - p.alpha
        })
        .fold(f64::INFINITY, f64::min)
}

/// A normalized polynomial close enough to `z` that `D^v f` stays away
/// from zero on the disk.
pub fn random_near_identity<R: Rng>(rng: &mut R, degree: usize, p: &ParamSet) -> HarmonicPoly {
    let mut a = vec![Complex64::new(1.0, 0.0)];
    let mut b = Vec::with_capacity(degree);
    let rand_c = |rng: &mut R, scale: f64| {
        Complex64::from_polar(scale * rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU)
    };
    for n in 2..=degree {
        a.push(rand_c(rng, 0.4 / (degree as f64 * base_pow(n, p.u, p.lambda))));
    }
    for n in 1..=degree {
        b.push(rand_c(rng, 0.4 / (degree as f64 * base_pow(n, p.u, p.lambda))));
    }
    HarmonicPoly::new(a, b).unwrap()
}

pub fn random_params<R: Rng>(rng: &mut R) -> ParamSet {
    let v = rng.gen_range(0..3);
    let u = v + rng.gen_range(1..4);
    ParamSet::new(u, v, rng.gen_range(0.0..3.0), rng.gen_range(0.0..0.95), rng.gen_range(0.0..2.0))
        .unwrap()
}
