//! Scalar weight functions of the geodesic formulas.
//!
//! * `λ(x, θ) = sin(xθ)/sin θ` (with `λ(x, 0) = x`) weights the endpoints of a
//!   geodesic between hyperplanes at angle θ.
//! * `μ(x, θ) = cos(xθ)/cos θ` governs the bulge of a pseudo-rotation.
//! * `σ(x, θ) = cos((1−x)θ)/sin θ − x/sin(xθ)` is the coefficient that enters the
//!   nonsingularity matrix of a flow when θ varies over the surface.
//!
//! The quotient forms lose digits as θ → 0, so each function switches to its
//! Taylor expansion below a cutoff.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{GeomError, Result};

/// Below this angle `λ` is evaluated from its Taylor series.
pub const TAU_SMALL: f64 = 1e-6;

/// Below this angle `∂λ/∂θ` and `σ` use their Taylor series. Their quotient
/// forms cancel to `O(θ)` and lose `log10(1/θ²)` digits.
const SERIES_CUTOFF: f64 = 1e-3;

fn check_angle(theta: f64, bound: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() < bound {
        Ok(())
    } else {
        Err(GeomError::AngleOutOfRange { theta, bound })
    }
}

/// `λ(x, θ)` for `|θ| < π`.
pub fn lambda_fn(x: f64, theta: f64) -> Result<f64> {
    check_angle(theta, PI)?;
    Ok(lambda_unchecked(x, theta))
}

pub(crate) fn lambda_unchecked(x: f64, theta: f64) -> f64 {
    if theta.abs() < TAU_SMALL {
        let x2 = x * x;
        let t2 = theta * theta;
        x * (1.0 + (1.0 - x2) * t2 / 6.0 + (3.0 * x2 * x2 - 10.0 * x2 + 7.0) * t2 * t2 / 360.0)
    } else {
        (x * theta).sin() / theta.sin()
    }
}

/// `μ(x, θ)` for `|θ| < π/2`.
pub fn mu_fn(x: f64, theta: f64) -> Result<f64> {
    check_angle(theta, FRAC_PI_2)?;
    Ok((x * theta).cos() / theta.cos())
}

/// `∂λ/∂θ (x, θ)` for `|θ| < π`; zero at θ = 0.
pub fn dlambda_dtheta(x: f64, theta: f64) -> Result<f64> {
    check_angle(theta, PI)?;
    Ok(dlambda_unchecked(x, theta))
}

pub(crate) fn dlambda_unchecked(x: f64, theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        let t = theta;
        let t2 = t * t;
        let c1 = x * (1.0 - x2) / 3.0;
        let c3 = x * (x2 * x2 / 30.0 - x2 / 9.0 + 7.0 / 90.0);
        let c5 = x * (-x2 * x2 * x2 / 840.0 + x2 * x2 / 120.0 - 7.0 * x2 / 360.0 + 31.0 / 2520.0);
        t * (c1 + t2 * (c3 + t2 * c5))
    } else {
        let s = theta.sin();
        (x * s * (x * theta).cos() - (x * theta).sin() * theta.cos()) / (s * s)
    }
}

/// `σ(x, θ)` for `|θ| < π`; `σ(x, 0) = 0`.
pub fn sigma_fn(x: f64, theta: f64) -> Result<f64> {
    check_angle(theta, PI)?;
    Ok(sigma_unchecked(x, theta))
}

pub(crate) fn sigma_unchecked(x: f64, theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        // odd in θ; every coefficient carries the factor (x − 1)(2x − 1)
        let k = (x - 1.0) * (2.0 * x - 1.0);
        let x2 = x * x;
        let c1 = -k / 3.0;
        let c3 = k * (x2 - 6.0 * x - 2.0) / 90.0;
        let c5 = -k * (x2 - 2.0 * x + 4.0) * (13.0 * x2 + 14.0 * x + 4.0) / 7560.0;
        let t2 = theta * theta;
        theta * (c1 + t2 * (c3 + t2 * c5))
    } else {
        ((1.0 - x) * theta).cos() / theta.sin() - x_over_sin(x, theta)
    }
}

/// `x / sin(xθ)`, continuous through `x = 0` where it equals `1/θ`.
fn x_over_sin(x: f64, theta: f64) -> f64 {
    let y = x * theta;
    if y.abs() < 1e-4 {
        let y2 = y * y;
        (1.0 + y2 / 6.0 + 7.0 * y2 * y2 / 360.0) / theta
    } else {
        x / y.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_fn(0.7, 0.0).unwrap(), 0.7);
        assert_abs_diff_eq!(lambda_fn(0.5, FRAC_PI_2).unwrap(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        for th in [-3.0, -1.0, 1e-9, 0.3, 2.5, 3.1] {
            assert_abs_diff_eq!(lambda_fn(1.0, th).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert!(lambda_fn(0.5, PI).is_err());
        assert!(lambda_fn(0.5, -4.0).is_err());
    }

    #[test]
    fn lambda_series_is_continuous() {
        for x in [-0.5, 0.0, 0.3, 0.9, 1.7] {
            let below = lambda_fn(x, TAU_SMALL * 0.999).unwrap();
            let above = lambda_fn(x, TAU_SMALL * 1.001).unwrap();
            assert_abs_diff_eq!(below, above, epsilon = 1e-12);
        }
    }

    #[test]
    fn mu_examples() {
        for x in [-2.0, 0.0, 0.4, 3.0] {
            assert_eq!(mu_fn(x, 0.0).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(mu_fn(1.0, 0.9).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu_fn(0.0, FRAC_PI_3).unwrap(), 2.0, epsilon = 1e-14);
        assert!(mu_fn(0.0, FRAC_PI_2).is_err());
    }

    #[test]
    fn sigma_examples() {
        for x in [0.0, 0.2, 0.5, 1.0] {
            assert_eq!(sigma_fn(x, 0.0).unwrap(), 0.0);
        }
        for th in [1e-7, 1e-4, 0.01, 0.5, 1.5, 3.0] {
            assert_abs_diff_eq!(sigma_fn(1.0, th).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(sigma_fn(0.5, th).unwrap(), 0.0, epsilon = 1e-12);
        }
        // x -> 0 limit is cot θ − 1/θ
        let th = 1.2;
        assert_abs_diff_eq!(sigma_fn(0.0, th).unwrap(), 1.0 / th.tan() - 1.0 / th, epsilon = 1e-14);
    }

    #[test]
    fn sigma_series_matches_closed_form_near_cutoff() {
        for x in [0.0, 0.1, 0.3, 0.8, 1.0] {
            let s = SERIES_CUTOFF * 0.999;
            let closed = ((1.0 - x) * s).cos() / s.sin() - x_over_sin(x, s);
            assert_abs_diff_eq!(sigma_fn(x, s).unwrap(), closed, epsilon = 1e-11);
            let closed = dlambda_closed(x, s);
            assert_abs_diff_eq!(dlambda_dtheta(x, s).unwrap(), closed, epsilon = 1e-10);
        }
    }

    fn dlambda_closed(x: f64, th: f64) -> f64 {
        let s = th.sin();
        (x * s * (x * th).cos() - (x * th).sin() * th.cos()) / (s * s)
    }

    #[test]
    fn dlambda_examples() {
        assert_eq!(dlambda_dtheta(0.4, 0.0).unwrap(), 0.0);
        for th in [0.1, 1.0, 2.9] {
            assert_abs_diff_eq!(dlambda_dtheta(1.0, th).unwrap(), 0.0, epsilon = 1e-14);
        }
        // central-difference oracle
        let h = 1e-5;
        let fd = ((0.3f64 * (0.8 + h)).sin() / (0.8 + h).sin() - (0.3f64 * (0.8 - h)).sin() / (0.8 - h).sin())
            / (2.0 * h);
        assert_abs_diff_eq!(dlambda_dtheta(0.3, 0.8).unwrap(), fd, epsilon = 1e-7);
    }

    #[test]
    fn sigma_matches_column_reduction_coefficient() {
        // σ is the n0-coefficient left after removing multiples of n_t:
        // ∂λ(1−x)/∂θ + cot θ λ(1−x) − x cot(xθ) λ(1−x)
        for &x in &[0.1, 0.25, 0.6, 0.9] {
            for &th in &[0.05, 0.7, 1.9, 3.0] {
                let l = lambda_fn(1.0 - x, th).unwrap();
                let expected = dlambda_dtheta(1.0 - x, th).unwrap() + l / th.tan() - x / (x * th).tan() * l;
                assert_abs_diff_eq!(sigma_fn(x, th).unwrap(), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn half_angle_identity() {
        let mut x = 0.0;
        while x <= 1.0 {
            for th in [-3.0, -1.0, -1e-8, 0.0, 0.5, FRAC_PI_4, 2.0, 3.0] {
                let lhs = lambda_fn(x, th).unwrap() + lambda_fn(1.0 - x, th).unwrap();
                let rhs = mu_fn(1.0 - 2.0 * x, th / 2.0).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
            x += 0.05;
        }
    }
}
