//! Weighted Hardy inequality for slit-plane test profiles.
//!
//! For `u = rho(r) sin(theta/2)` on the plane slit along `{theta = 0}`, the
//! angular ground state carries eigenvalue 1/4, and separation of variables
//! reduces `int u^2 / (4 |x|^2) <= int |grad u|^2` to the radial statement
//!
//! `(pi/4) int rho^2 / r dr  <=  pi int rho'^2 r dr + (pi/4) int rho^2 / r dr`
//!
//! with slack exactly `pi int rho'^2 r dr`. Both sides are invariant under
//! dilations `rho(r) -> rho(r/s)`.

use crate::error::{Error, Result};
use crate::geometry::quad::gauss_legendre_01;

/// Evaluate both sides of the radial Hardy inequality for a profile `rho`
/// supported in `(support.0, support.1)`, returning `(lhs, rhs)` with
/// `lhs <= rhs` for any admissible profile. Composite Gauss quadrature with
/// an even panel count, so a kink at the interval midpoint is resolved
/// exactly.
pub fn hardy_2d_check(
    rho: impl Fn(f64) -> f64,
    drho: impl Fn(f64) -> f64,
    support: (f64, f64),
) -> Result<(f64, f64)> {
    let (lo, hi) = support;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "Hardy support must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let (nodes, weights) = gauss_legendre_01(4);
    let panels = 200usize;
    let len = (hi - lo) / panels as f64;
    let mut mass = 0.0; // int rho^2 / r
    let mut grad = 0.0; // int rho'^2 r
    for panel in 0..panels {
        let a = lo + panel as f64 * len;
        for (&q, &wq) in nodes.iter().zip(&weights) {
            let r = a + len * q;
            let p = rho(r);
            let dp = drho(r);
            mass += len * wq * p * p / r;
            grad += len * wq * dp * dp * r;
        }
    }
    let quarter = std::f64::consts::FRAC_PI_4;
    Ok((quarter * mass, std::f64::consts::PI * grad + quarter * mass))
}

/// Piecewise-linear hat profile rising from 0 at `lo` to 1 at the midpoint
/// and back to 0 at `hi`. Returns `(rho, drho)`.
pub fn hardy_hat_profile(lo: f64, hi: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let mid = 0.5 * (lo + hi);
    let slope = 2.0 / (hi - lo);
    let rho = move |r: f64| -> f64 {
        if r <= lo || r >= hi {
            0.0
        } else if r < mid {
            slope * (r - lo)
        } else {
            slope * (hi - r)
        }
    };
    let drho = move |r: f64| -> f64 {
        if r <= lo || r >= hi {
            0.0
        } else if r < mid {
            slope
        } else {
            -slope
        }
    };
    (rho, drho)
}

/// C^2 polynomial bump `(4 s (1 - s))^3` in the normalized coordinate
/// `s = (r - lo) / (hi - lo)`, peaking at 1. Returns `(rho, drho)`.
pub fn hardy_smooth_bump(lo: f64, hi: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let width = hi - lo;
    let rho = move |r: f64| -> f64 {
        let s = (r - lo) / width;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        (4.0 * s * (1.0 - s)).powi(3)
    };
    let drho = move |r: f64| -> f64 {
        let s = (r - lo) / width;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        3.0 * (4.0 * s * (1.0 - s)).powi(2) * 4.0 * (1.0 - 2.0 * s) / width
    };
    (rho, drho)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_profile_slack_is_four_pi() {
        let (rho, drho) = hardy_hat_profile(1.0, 3.0);
        let (lhs, rhs) = hardy_2d_check(&rho, &drho, (1.0, 3.0)).unwrap();
        assert!(lhs <= rhs);
        // slope = 1, so the gradient term is pi * int_1^3 r dr = 4 pi.
        let slack = rhs - lhs;
        assert!(
            (slack - 4.0 * std::f64::consts::PI).abs() < 1e-10,
            "slack {slack}"
        );
    }

    #[test]
    fn smooth_bump_satisfies_inequality_strictly() {
        let (rho, drho) = hardy_smooth_bump(1.0, 2.0);
        let (lhs, rhs) = hardy_2d_check(&rho, &drho, (1.0, 2.0)).unwrap();
        assert!(lhs > 0.0 && rhs > lhs);
    }

    #[test]
    fn both_sides_are_dilation_invariant() {
        let (r1, d1) = hardy_smooth_bump(1.0, 2.0);
        let (a1, b1) = hardy_2d_check(&r1, &d1, (1.0, 2.0)).unwrap();
        let (r3, d3) = hardy_smooth_bump(3.0, 6.0);
        let (a3, b3) = hardy_2d_check(&r3, &d3, (3.0, 6.0)).unwrap();
        assert!((a1 - a3).abs() < 1e-9 * a1, "{a1} vs {a3}");
        assert!((b1 - b3).abs() < 1e-9 * b1, "{b1} vs {b3}");
    }

    #[test]
    fn zero_profile_gives_zero_on_both_sides() {
        let (lhs, rhs) = hardy_2d_check(|_| 0.0, |_| 0.0, (0.5, 2.0)).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn degenerate_support_is_rejected() {
        assert!(hardy_2d_check(|_| 0.0, |_| 0.0, (0.0, 1.0)).is_err());
        assert!(hardy_2d_check(|_| 0.0, |_| 0.0, (2.0, 1.0)).is_err());
    }
}
