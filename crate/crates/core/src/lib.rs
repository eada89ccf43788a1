//! Numerical solver and verification harness for the parabolic equation
//! `∂ₜu = Δ∞ˢu` driven by the nonlocal (infinity fractional) Laplacian.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] – bounded scalar fields on ℝⁿ, analytic or grid-sampled.
//! * [`quad`] – graded Gauss–Legendre quadrature of the singular η-integrals.
//! * [`operator`] – pointwise evaluation of the truncated operator `L_ε`,
//!   `Δ∞ˢ`, its one-sided bracketing operators and the 1D fractional Laplacian.
//! * [`scheme`] – the explicit monotone scheme `U^{j+1} = U^j + τ L_ε[U^j]`.
//! * [`heat1d`] – the 1D fractional heat kernel used as an oracle.
//! * [`radial`] – radial and one-dimensional lifts and classical solutions.
//! * [`verify`] – executable verification suites producing reports.

pub mod catalog;
pub mod error;
pub mod field;
pub mod heat1d;
pub mod io;
pub mod operator;
pub mod quad;
pub mod radial;
pub mod scheme;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use field::{ExtensionPolicy, FieldFlags, GridSpec, ScalarField};
pub use heat1d::Kernel1D;
pub use operator::{cs_constant, DirectionSet, OperatorConfig};
pub use quad::{QuadRule, TailMode};
pub use scheme::{SchemeConfig, SchemeState, Trajectory};
pub use verify::VerificationReport;

/// Lower end of the admissible fractional order range.
pub const S_MIN: f64 = 0.5;
/// Upper end of the admissible fractional order range.
pub const S_MAX: f64 = 1.0;

/// Rejects `s` outside the open interval `(1/2, 1)`.
pub fn check_order(s: f64) -> Result<()> {
    if s.is_finite() && s > S_MIN && s < S_MAX {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange(s))
    }
}
