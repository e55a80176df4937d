//! Closed-form geometry of standard collars around short geodesics.
//!
//! A standard collar of a simple closed geodesic of length `l` has half-width
//! `w(l) = asinh(1 / sinh(l/2))` and, in Fermi coordinates `(rho, t)`, the
//! metric `d rho^2 + l^2 cosh^2(rho) dt^2` with `t` in `R/Z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse hyperbolic sine without cancellation for small or large arguments.
pub fn asinh(x: f64) -> f64 {
    let a = x.abs();
    let r = if a < 1e-4 {
        // odd series, error below a^7
        a * (1.0 - a * a / 6.0 + 3.0 * a.powi(4) / 40.0)
    } else if a < 1.0 {
        (a + a * a / (1.0 + (1.0 + a * a).sqrt())).ln_1p()
    } else if a < 1e8 {
        (a + (1.0 + a * a).sqrt()).ln()
    } else {
        a.ln() + std::f64::consts::LN_2 + 0.25 / (a * a)
    };
    r.copysign(x)
}

fn check_length(length: f64) -> Result<()> {
    if length.is_finite() && length > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "geodesic length must be positive and finite, got {length}"
        )))
    }
}

/// Half-width `asinh(1/sinh(l/2))` of the standard collar.
pub fn collar_width(length: f64) -> Result<f64> {
    check_length(length)?;
    Ok(asinh(1.0 / (0.5 * length).sinh()))
}

/// Injectivity radius at distance `d` from the standard-collar boundary.
///
/// Evaluates `asinh(cosh(l/2) cosh d - sinh d)` in the cancellation-free form
/// `2 sinh^2(l/4) cosh d + e^{-d}`.
pub fn injectivity_in_collar(length: f64, dist_to_boundary: f64) -> Result<f64> {
    let w = collar_width(length)?;
    let d = dist_to_boundary;
    if !(0.0..=w).contains(&d) {
        return Err(Error::domain(format!(
            "distance to collar boundary {d} outside [0, {w}]"
        )));
    }
    let s = (0.25 * length).sinh();
    Ok(asinh(2.0 * s * s * d.cosh() + (-d).exp()))
}

/// `asinh(1 / sinh(1/delta + 2))`, the short-curve threshold paired with `delta`.
pub fn eps_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::domain(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    Ok(asinh(1.0 / (1.0 / delta + 2.0).sinh()))
}

/// Area of a geodesic ball of the given radius in curvature `-eps^2`.
///
/// `(2 pi / eps^2)(cosh(eps r) - 1)`, evaluated as `(4 pi / eps^2) sinh^2(eps r / 2)`.
pub fn ball_area(eps: f64, radius: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain(format!("curvature scale must lie in (0, 1], got {eps}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
    }
    let half = 0.5 * eps * radius;
    // sinh(x)/x form keeps the eps -> 0 limit pi r^2 exact
    let sinhc = if half < 1e-8 { 1.0 } else { half.sinh() / half };
    Ok(std::f64::consts::PI * radius * radius * sinhc * sinhc)
}

/// Geometry of one standard collar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollarProfile {
    pub length: f64,
    pub width: f64,
}

impl CollarProfile {
    pub fn new(length: f64) -> Result<Self> {
        Ok(CollarProfile {
            length,
            width: collar_width(length)?,
        })
    }

    /// Length of each boundary component of the sub-collar of half-width `h`.
    pub fn boundary_length_at(&self, half_width: f64) -> f64 {
        self.length * half_width.cosh()
    }

    /// Area of the sub-collar of half-width `h`: `2 l sinh h`.
    pub fn area_at(&self, half_width: f64) -> f64 {
        2.0 * self.length * half_width.sinh()
    }

    /// Injectivity radius at distance `d` from the collar boundary.
    pub fn injectivity_at(&self, dist_to_boundary: f64) -> Result<f64> {
        injectivity_in_collar(self.length, dist_to_boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ASINH_1: f64 = 0.881_373_587_019_543;

    #[test]
    fn stable_asinh_matches_log_form() {
        for &x in &[1e-9, 1e-5, 3e-4, 0.3, 0.99, 1.0, 7.0, 1e6, 1e9, 1e200] {
            let reference = if x < 1e100 {
                (x + (x * x + 1.0f64).sqrt()).ln()
            } else {
                x.ln() + std::f64::consts::LN_2
            };
            let err = (asinh(x) - reference).abs() / reference;
            // the log form itself loses digits for tiny x
            let tol = if x < 1e-3 { 1e-7 } else { 1e-15 };
            assert!(err < tol, "x={x}: {} vs {reference}", asinh(x));
            assert_eq!(asinh(-x), -asinh(x));
        }
        assert_eq!(asinh(0.0), 0.0);
    }

    #[test]
    fn width_fixed_point() {
        let w = collar_width(2.0 * ASINH_1).unwrap();
        assert!((w - ASINH_1).abs() < 1e-15);
    }

    #[test]
    fn width_examples() {
        // high-precision references (mpmath, 30 digits)
        assert!((collar_width(0.1).unwrap() - 3.689_087_757_070_663).abs() < 1e-13);
        let w = collar_width(0.5).unwrap();
        assert!((w - 2.084_630_969_324_875_7).abs() < 1e-13);
        let boundary = 0.5 * (w - 1.0).cosh();
        assert!((boundary - 0.824_093_600_296_028_5).abs() < 1e-13 && boundary < 2.0);
    }

    #[test]
    fn width_rejects_nonpositive() {
        assert!(collar_width(0.0).is_err());
        assert!(collar_width(-1.0).is_err());
        assert!(collar_width(f64::NAN).is_err());
    }

    #[test]
    fn width_above_two_below_threshold() {
        let threshold = 2.0 * asinh(1.0 / 2f64.sinh());
        for i in 1..200 {
            let l = threshold * i as f64 / 200.0;
            assert!(collar_width(l).unwrap() > 2.0);
        }
    }

    #[test]
    fn injectivity_endpoints() {
        let l = 2.0 * ASINH_1;
        let w = collar_width(l).unwrap();
        assert!((injectivity_in_collar(l, w).unwrap() - ASINH_1).abs() < 1e-15);
        let at_boundary = injectivity_in_collar(l, 0.0).unwrap();
        assert!((at_boundary - 1.146_215_834_780_588_9).abs() < 1e-12);
        assert!(injectivity_in_collar(l, w + 1e-9).is_err());
        assert!(injectivity_in_collar(l, -1e-9).is_err());
    }

    #[test]
    fn core_realizes_half_length_for_tiny_curves() {
        for &l in &[1e-6, 1e-4, 0.01, 0.3] {
            let w = collar_width(l).unwrap();
            let inj = injectivity_in_collar(l, w).unwrap();
            assert!((inj - 0.5 * l).abs() < 1e-12 * l, "l={l}: {inj}");
        }
    }

    #[test]
    fn thin_boundary_injectivity_floor() {
        let floor = asinh(1f64.cosh() - 1f64.sinh());
        assert!((floor - 0.360_049_644_609_103_7).abs() < 1e-12);
        let eps_max = asinh(1.0 / 2f64.sinh());
        for i in 1..=50 {
            let l = 2.0 * eps_max * i as f64 / 50.0;
            let inj = injectivity_in_collar(l, 1.0).unwrap();
            assert!(inj >= floor);
            assert!(inj >= eps_max.min(floor));
        }
    }

    #[test]
    fn eps_delta_examples() {
        assert!((eps_delta(0.25).unwrap() - 0.004_957_514_506_689_977).abs() < 1e-15);
        let near_half = eps_delta(0.5 - 1e-12).unwrap();
        assert!((near_half - 0.036_635_374_743_696_3).abs() < 1e-10);
        assert!(eps_delta(0.1).unwrap() < eps_delta(0.25).unwrap());
        assert!(eps_delta(0.5).is_err());
        assert!(eps_delta(0.0).is_err());
    }

    #[test]
    fn ball_area_examples() {
        let a = ball_area(1.0, 0.5).unwrap();
        assert!((a - 2.0 * std::f64::consts::PI * (0.5f64.cosh() - 1.0)).abs() < 1e-14);
        assert!((a - 0.801_897_589_399_344_9).abs() < 1e-12);
        for i in 1..=100 {
            let eps = i as f64 / 100.0;
            assert!(ball_area(eps, 0.5).unwrap() >= std::f64::consts::FRAC_PI_4);
        }
        let flat = ball_area(1e-12, 2.0).unwrap();
        assert!((flat - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(ball_area(1.0, 0.0).is_err());
        assert!(ball_area(1.5, 1.0).is_err());
    }

    #[test]
    fn profile_area_and_boundary() {
        let p = CollarProfile::new(2.0 * ASINH_1).unwrap();
        assert!((p.area_at(p.width) - 4.0 * ASINH_1).abs() < 1e-14);
        assert!(p.boundary_length_at(1.0) > p.boundary_length_at(0.5));
    }
}
