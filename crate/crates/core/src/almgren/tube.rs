//! Poincare inequality on the thin tube (-1, 0) x (-eps, eps).
//!
//! Fields vanishing on the tube boundary except the mouth satisfy
//! int u^2 <= kappa eps int |grad u|^2 with kappa = 4 / (pi j_{0,1}^2),
//! the Faber-Krahn constant for doubled window length 2.

use crate::error::{Error, Result};
use crate::geometry::quad::gauss_legendre_01;

/// First zero of the zeroth-order Bessel function (frozen reference value).
const J01: f64 = 2.404825557695772769;

/// Tube Poincare constant kappa = 4 / (pi j_{0,1}^2).
pub fn tube_poincare_kappa() -> f64 {
    4.0 / (std::f64::consts::PI * J01 * J01)
}

/// Mass-to-energy ratio of the separable test field
/// sin(pi (x1 + 1)) cos(pi x2 / (2 eps)).
pub fn tube_separable_ratio(eps: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    1.0 / (pi2 * (1.0 + 1.0 / (4.0 * eps * eps)))
}

/// Sharp ratio for the doubled tube: the inverse of the first Dirichlet
/// eigenvalue pi^2 (1/(4 eps^2) + 1/4) of the (-1,1) x (-eps,eps) rectangle.
pub fn tube_sharp_ratio(eps: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    1.0 / (pi2 * (0.25 / (eps * eps) + 0.25))
}

/// Evaluates both sides of the tube Poincare inequality for a field given
/// pointwise with its gradient: returns (int u^2, kappa eps int |grad u|^2,
/// kappa). The integrals use a tensor Gauss rule resolved relative to the
/// tube aspect; the caller is responsible for the field vanishing on the
/// tube boundary away from the mouth.
pub fn tube_poincare_check(
    u: impl Fn([f64; 2]) -> f64,
    grad_u: impl Fn([f64; 2]) -> [f64; 2],
    eps: f64,
) -> Result<(f64, f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tube half-width must be positive, got {eps}"
        )));
    }
    let (ts, ws) = gauss_legendre_01(4);
    let panels = 32usize;
    let mut mass = 0.0;
    let mut energy = 0.0;
    for ix in 0..panels {
        for (tx, wx) in ts.iter().zip(&ws) {
            let x = -1.0 + (ix as f64 + tx) / panels as f64;
            let wx = wx / panels as f64;
            for iy in 0..panels {
                for (ty, wy) in ts.iter().zip(&ws) {
                    let y = eps * (-1.0 + 2.0 * (iy as f64 + ty) / panels as f64);
                    let w = wx * wy * 2.0 * eps / panels as f64;
                    let p = [x, y];
                    let v = u(p);
                    let g = grad_u(p);
                    mass += w * v * v;
                    energy += w * (g[0] * g[0] + g[1] * g[1]);
                }
            }
        }
    }
    let kappa = tube_poincare_kappa();
    Ok((mass, kappa * eps * energy, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn separable(eps: f64) -> (impl Fn([f64; 2]) -> f64, impl Fn([f64; 2]) -> [f64; 2]) {
        let u = move |p: [f64; 2]| (PI * (p[0] + 1.0)).sin() * (PI * p[1] / (2.0 * eps)).cos();
        let g = move |p: [f64; 2]| {
            [
                PI * (PI * (p[0] + 1.0)).cos() * (PI * p[1] / (2.0 * eps)).cos(),
                -(PI / (2.0 * eps)) * (PI * (p[0] + 1.0)).sin() * (PI * p[1] / (2.0 * eps)).sin(),
            ]
        };
        (u, g)
    }

    #[test]
    fn kappa_matches_frozen_value() {
        assert!((tube_poincare_kappa() - 0.22016230377042758).abs() < 1e-15);
    }

    #[test]
    fn separable_field_satisfies_the_inequality() {
        for eps in [0.2, 0.1, 0.05] {
            let (u, g) = separable(eps);
            let (lhs, rhs, kappa) = tube_poincare_check(u, g, eps).unwrap();
            assert!(lhs <= rhs, "eps={eps}: {lhs} vs {rhs}");
            // Measured ratio matches the analytic separable ratio.
            let energy = rhs / (kappa * eps);
            let ratio = lhs / energy;
            let want = tube_separable_ratio(eps);
            assert!(
                (ratio - want).abs() < 1e-10 * want.max(1e-12),
                "eps={eps}: ratio {ratio} want {want}"
            );
        }
    }

    #[test]
    fn separable_ratio_sits_near_the_sharp_constant() {
        let eps = 0.1;
        assert!((tube_separable_ratio(eps) - 0.0038969686016283758).abs() < 1e-16);
        assert!((tube_sharp_ratio(eps) - 0.0040127201442510008).abs() < 1e-16);
        let rel = 1.0 - tube_separable_ratio(eps) / tube_sharp_ratio(eps);
        assert!(rel.abs() < 0.1, "separable within 10% of sharp: {rel}");
    }

    #[test]
    fn zero_field_gives_zero_on_both_sides() {
        let (lhs, rhs, _) = tube_poincare_check(|_| 0.0, |_| [0.0, 0.0], 0.1).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }
}
