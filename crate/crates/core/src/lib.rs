//! Coefficient conditions, extremal functions and numerical verification
//! for the class `k-USH(u, v, α, λ)` of harmonic functions defined through
//! the Al-Oboudi operator, and its negative-coefficient subclass `k-UTH`.
//!
//! Everything works on truncated harmonic polynomials `f = h + conj(g)`:
//!
//! - [`series`]: evaluation and coefficientwise arithmetic.
//! - [`oboudi`]: the operator `D^u`.
//! - [`classkernel`]: the `ξ`/`η` budget, membership tests, sharp functions,
//!   extreme points, distortion bounds and parameter presets.
//! - [`verifier`]: grid checks of the defining condition, sense
//!   preservation, univalence and distortion.

pub mod classkernel;
pub mod error;
pub mod oboudi;
pub mod series;
pub mod verifier;

pub use classkernel::{ParamSet, Preset};
pub use error::{Error, Result};
pub use series::{HarmonicPoly, TCoefficients};
pub use verifier::{GridSpec, VerificationReport};
