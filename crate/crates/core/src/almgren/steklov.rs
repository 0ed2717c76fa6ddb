//! Mixed Steklov-Dirichlet quotient on the unit half-disk.
//!
//! m_sigma minimizes int |grad u|^2 over the unit half-disk among fields
//! carrying unit boundary mass on the half-circle and vanishing on the
//! diameter outside the window |x2| < sigma. The window-free value is
//! m_0 = 1 with minimizer u = x1; enlarging the window only removes
//! constraints, so sigma -> m_sigma is non-increasing.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fem::{
    assemble_boundary_mass, assemble_stiffness, solve_generalized_eig, DofMap, SolverConfig,
};
use crate::geometry::{
    generate_mesh, BoundaryPiece, BoundaryTag, ElementOrder, GradingPolicy, Mesh,
    PiecewiseBoundary,
};

/// Unit half-disk with the diameter split at every +/- split ordinate, so a
/// family of windows shares one mesh and the discrete spaces are nested.
fn steklov_boundary(splits: &[f64]) -> Result<PiecewiseBoundary> {
    use BoundaryPiece::{Arc, Segment};
    let pi = std::f64::consts::PI;
    let mut ys: BTreeSet<u64> = BTreeSet::new();
    for &s in splits {
        if !(s > 0.0) || s >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "window half-width {s} outside (0, 1)"
            )));
        }
        ys.insert(s.to_bits());
    }
    let mut cuts: Vec<f64> = ys.into_iter().map(f64::from_bits).collect();
    cuts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut stops = vec![1.0];
    for &c in &cuts {
        stops.push(c);
    }
    for &c in cuts.iter().rev() {
        stops.push(-c);
    }
    stops.push(-1.0);
    let mut pieces = vec![Arc {
        center: [0.0, 0.0],
        radius: 1.0,
        theta0: pi,
        theta1: 0.0,
        tag: BoundaryTag::OuterArc,
    }];
    let mut anchors = Vec::new();
    for w in stops.windows(2) {
        pieces.push(Segment {
            a: [0.0, w[0]],
            b: [0.0, w[1]],
            tag: BoundaryTag::DirichletWall,
        });
        if w[1].abs() < 1.0 {
            anchors.push([0.0, w[1]]);
        }
    }
    PiecewiseBoundary::from_pieces(pieces, anchors)
}

/// Dofs on the diameter at or beyond the window half-width.
fn constrained_dofs(dofs: &DofMap, mesh: &Mesh, sigma: f64) -> Vec<usize> {
    let tol = 1e-12;
    let mut out: Vec<usize> = dofs
        .boundary_dofs(mesh, &[BoundaryTag::DirichletWall])
        .into_iter()
        .filter(|&d| {
            let p = dofs.coords[d];
            p[0].abs() < tol && p[1].abs() >= sigma - tol
        })
        .collect();
    out.sort_unstable();
    out
}

/// Steklov quotients for a family of window half-widths on one shared mesh.
///
/// Sharing the mesh makes the discrete minimization spaces nested, so the
/// returned values are exactly non-increasing when `sigmas` increase.
pub fn steklov_family(
    sigmas: &[f64],
    policy: &GradingPolicy,
    order: ElementOrder,
    seed: u64,
) -> Result<Vec<f64>> {
    if sigmas.is_empty() {
        return Err(Error::InvalidParameter("no window widths requested".into()));
    }
    for &s in sigmas {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "window half-width {s} outside [0, 1)"
            )));
        }
    }
    let positive: Vec<f64> = sigmas.iter().copied().filter(|&s| s > 0.0).collect();
    let boundary = steklov_boundary(&positive)?;
    let mesh = generate_mesh(&boundary, policy, order, seed)?;
    let dofs = DofMap::new(&mesh);
    let k = assemble_stiffness(&mesh, &dofs);
    let b = assemble_boundary_mass(&mesh, &dofs, &[BoundaryTag::OuterArc]);
    let cfg = SolverConfig {
        shift: 0.0,
        num_eigs: 2,
        tol: 1e-10,
        max_basis: 200,
    };
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let constrained = constrained_dofs(&dofs, &mesh, sigma);
        let (free_of, n_free) = dofs.free_map(&constrained);
        if n_free == 0 {
            return Err(Error::AllConstrained);
        }
        let kf = k.restrict(&free_of, n_free);
        let bf = b.restrict(&free_of, n_free);
        let pairs = solve_generalized_eig(&kf, &bf, &cfg)?;
        let first = pairs
            .first()
            .ok_or_else(|| Error::NonConvergence("no Steklov eigenvalue returned".into()))?;
        out.push(first.lambda);
    }
    Ok(out)
}

/// Steklov quotient for one window half-width at the reference resolution.
pub fn steklov_m_sigma(sigma: f64) -> Result<f64> {
    let policy = GradingPolicy::new(0.05, 0.02, 1.5)?;
    Ok(steklov_family(&[sigma], &policy, ElementOrder::P2, 11)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_free_quotient_is_one() {
        let m0 = steklov_m_sigma(0.0).unwrap();
        assert!((m0 - 1.0).abs() < 1e-3, "m0 = {m0}");
    }

    #[test]
    fn quotients_decrease_as_the_window_opens() {
        let policy = GradingPolicy::new(0.06, 0.02, 1.5).unwrap();
        let ms = steklov_family(&[0.0, 0.1, 0.2, 0.3], &policy, ElementOrder::P2, 11).unwrap();
        for w in ms.windows(2) {
            assert!(w[1] <= w[0] + 1e-14, "{} then {}", w[0], w[1]);
        }
        assert!(ms[3] > 0.0 && ms[3] < 1.0);
    }
}
