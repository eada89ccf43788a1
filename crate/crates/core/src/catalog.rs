//! Named initial data and test fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AnalyticField, ScalarField};
use crate::heat1d::Profile1D;
use crate::radial::{lift_profile_x1, lift_radial, RadialProfile};

/// Optional shape parameters; unset entries take per-datum defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumParams {
    pub value: Option<f64>,
    pub width: Option<f64>,
    pub radius: Option<f64>,
    pub amplitude: Option<f64>,
    pub beta: Option<f64>,
}

pub const NAMES: &[&str] = &[
    "constant",
    "gaussian",
    "tilted",
    "indicator",
    "annulus",
    "tanh",
    "even-profile",
    "ghp-bump",
    "holder",
];

/// `e^{−r²/σ²}`, cut to zero where it drops below 1e−17.
pub fn gaussian_profile(width: f64) -> RadialProfile {
    let support = width * (17.0 * 10f64.ln()).sqrt();
    RadialProfile::new(
        move |r| if r < support { (-r * r / (width * width)).exp() } else { 0.0 },
        support,
        0.0,
        1.0,
    )
    .nonincreasing()
}

pub fn indicator_profile(radius: f64) -> RadialProfile {
    RadialProfile::new(move |r| if r < radius { 1.0 } else { 0.0 }, radius, 0.0, 1.0)
        .nonincreasing()
        .with_breaks(vec![radius])
}

/// Indicator of `R−1 < |x| < R+1`.
pub fn annulus_profile(r: f64) -> RadialProfile {
    RadialProfile::new(
        move |rho| if rho > r - 1.0 && rho < r + 1.0 { 1.0 } else { 0.0 },
        r + 1.0,
        0.0,
        1.0,
    )
    .with_breaks(vec![r - 1.0, r + 1.0])
}

/// `a·e^{1 − R₀²/(R₀² − r²)}` inside `B_{R₀}`, zero outside.
pub fn ghp_bump_profile(r0: f64, amplitude: f64) -> RadialProfile {
    RadialProfile::new(
        move |r| {
            if r < r0 {
                amplitude * (1.0 - r0 * r0 / (r0 * r0 - r * r)).exp()
            } else {
                0.0
            }
        },
        r0,
        0.0,
        amplitude.abs(),
    )
    .nonincreasing()
}

/// `(1 − r^β)₊`, Hölder continuous with exponent β.
pub fn holder_profile(beta: f64) -> RadialProfile {
    RadialProfile::new(move |r| if r < 1.0 { 1.0 - r.powf(beta) } else { 0.0 }, 1.0, 0.0, 1.0)
        .nonincreasing()
        .with_breaks(vec![1.0])
}

/// `e^{−|x|²}(1 + x₁/2)`: smooth, decaying, not radial.
pub fn tilted_bump(dim: usize) -> ScalarField {
    AnalyticField::new(dim, 1.1, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (-r2).exp() * (1.0 + 0.5 * x[0])
    })
    .with_far_field(0.0)
    .into()
}

/// `tanh(x₁)`; its ray limit is `sign(y₁)`.
pub fn tanh_x1(dim: usize) -> ScalarField {
    let p = Profile1D::new(|r: f64| r.tanh(), 20.0).with_limits(-1.0, 1.0);
    lift_profile_x1(&p, dim, 1.0, Vec::new())
}

/// Even profile `e^{−x₁²}` lifted along `x₁`: decreasing away from `x₁ = 0`.
pub fn even_profile_x1(dim: usize) -> ScalarField {
    let support = (17.0 * 10f64.ln()).sqrt();
    let p = Profile1D::new(move |r: f64| if r.abs() < support { (-r * r).exp() } else { 0.0 }, support);
    lift_profile_x1(&p, dim, 1.0, Vec::new())
}

/// The quintic-glued profile `ψ`: `r²` on `[0,1]`, a polynomial in `u = r − 1`
/// on `[1,2]` matching value, slope and curvature at both ends, zero beyond.
pub fn glued_quadratic(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.0 {
        r * r
    } else if r < 2.0 {
        let u = r - 1.0;
        1.0 + 2.0 * u + u * u - 25.0 * u.powi(3) + 34.0 * u.powi(4) - 13.0 * u.powi(5)
    } else {
        0.0
    }
}

/// `sup |ψ''|`, from the closed form of the quintic piece.
pub fn glued_quadratic_curvature_bound() -> f64 {
    // ψ''(u) = 2 − 150u + 408u² − 260u³ on [0,1]; extremes at the ends and
    // at the roots of −150 + 816u − 780u² = 0.
    let dd = |u: f64| 2.0 - 150.0 * u + 408.0 * u * u - 260.0 * u.powi(3);
    let disc = (816.0f64 * 816.0 - 4.0 * 780.0 * 150.0).sqrt();
    let roots = [(816.0 - disc) / 1560.0, (816.0 + disc) / 1560.0];
    [0.0, 1.0, roots[0], roots[1]]
        .iter()
        .map(|u| dd(*u).abs())
        .fold(2.0, f64::max)
}

/// `x ↦ K ψ(|x|) + c`.
pub fn glued_test_function(dim: usize, k: f64, c: f64) -> ScalarField {
    let bound = k.abs() * 1.5 + c.abs();
    AnalyticField::new(dim, bound, move |x| k * glued_quadratic(crate::field::norm(x)) + c)
        .with_far_field(c)
        .into()
}

/// The radial profile behind a catalog name, if the datum is radial.
pub fn radial_profile(name: &str, p: &DatumParams) -> Result<Option<RadialProfile>> {
    Ok(match name {
        "constant" => {
            let c = p.value.unwrap_or(1.0);
            Some(RadialProfile::new(move |_| c, 0.0, c, c.abs()).nonincreasing())
        }
        "gaussian" => Some(gaussian_profile(positive("width", p.width.unwrap_or(2.0))?)),
        "indicator" => Some(indicator_profile(positive("radius", p.radius.unwrap_or(1.0))?)),
        "annulus" => {
            let r = p.radius.unwrap_or(10.0);
            if !(r > 1.0) {
                return Err(Error::InvalidParameter(format!("annulus radius must exceed 1, got {r}")));
            }
            Some(annulus_profile(r))
        }
        "ghp-bump" => Some(ghp_bump_profile(
            positive("radius", p.radius.unwrap_or(1.0))?,
            positive("amplitude", p.amplitude.unwrap_or(1.0))?,
        )),
        "holder" => {
            let b = p.beta.unwrap_or(0.5);
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::InvalidParameter(format!("beta must lie in (0,1], got {b}")));
            }
            Some(holder_profile(b))
        }
        "tilted" | "tanh" | "even-profile" => None,
        other => return Err(unknown(other)),
    })
}

/// The catalog datum `name` on ℝ^dim.
pub fn datum(name: &str, dim: usize, p: &DatumParams) -> Result<ScalarField> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if name == "constant" {
        return Ok(ScalarField::constant(dim, p.value.unwrap_or(1.0)));
    }
    if let Some(profile) = radial_profile(name, p)? {
        return Ok(lift_radial(&profile, dim));
    }
    match name {
        "tilted" => Ok(tilted_bump(dim)),
        "tanh" => Ok(tanh_x1(dim)),
        "even-profile" => Ok(even_profile_x1(dim)),
        other => Err(unknown(other)),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{key} must be positive, got {v}")))
    }
}

fn unknown(name: &str) -> Error {
    Error::InvalidParameter(format!("unknown datum {name:?}; known: {}", NAMES.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_builds() {
        for name in NAMES {
            let f = datum(name, 2, &DatumParams::default()).unwrap();
            assert!(f.eval(&[0.3, -0.2]).is_finite());
            f.spot_check(64, 12.0, 7).unwrap();
        }
        assert!(datum("nope", 2, &DatumParams::default()).is_err());
    }

    #[test]
    fn glued_profile_is_c2() {
        let h = 1e-6;
        for r in [1.0, 2.0] {
            let l = glued_quadratic(r - h);
            let m = glued_quadratic(r);
            let u = glued_quadratic(r + h);
            assert!((u - l).abs() < 1e-5, "value jump at {r}");
            let d1 = (m - l) / h;
            let d2 = (u - m) / h;
            assert!((d1 - d2).abs() < 1e-4, "slope jump at {r}");
        }
        let c = glued_quadratic_curvature_bound();
        assert!(c >= 2.0 && c.is_finite());
    }

    #[test]
    fn radial_flags() {
        let p = gaussian_profile(2.0);
        assert!(p.spot_check_nonincreasing(500));
        assert!(!annulus_profile(10.0).nonincreasing);
        assert!(holder_profile(0.5).spot_check_nonincreasing(500));
    }
}
