//! Dirichlet eigensolves on meshed domains, with mode orientation helpers.

use crate::error::{Error, Result};
use crate::fem::{
    assemble_forms, solve_generalized_eig, DofMap, EigenPair, FeField, SolverConfig, WeightField,
};
use crate::geometry::{quad::gauss_legendre_01, BoundaryTag, Mesh};

// ---------------------------------------------------------------------------
// Eigensolve
// ---------------------------------------------------------------------------

/// Eigenpairs on a mesh together with its dof map; vectors are full length
/// with zeros on the constrained boundary.
#[derive(Debug, Clone)]
pub struct DirichletModes {
    pub dofs: DofMap,
    pub pairs: Vec<EigenPair>,
}

impl DirichletModes {
    /// Field view of the j-th mode (0-based).
    pub fn field<'a>(&'a self, mesh: &'a Mesh, j: usize) -> Result<FeField<'a>> {
        let pair = self
            .pairs
            .get(j)
            .ok_or_else(|| Error::InvalidParameter(format!("mode index {j} out of range")))?;
        FeField::new(mesh, &self.dofs, pair.vector.clone())
    }
}

/// Lowest Dirichlet-Laplacian eigenpairs of a mesh. All boundary edges tagged
/// `DirichletWall` or `TubeEnd` are constrained; eigenvectors are
/// mass-normalized, expanded to full-length nodal vectors, and orientation-
/// fixed so the dominant angular harmonic near the origin has a positive
/// sine coefficient.
pub fn solve_dirichlet_modes(mesh: &Mesh, cfg: &SolverConfig) -> Result<DirichletModes> {
    let dofs = DofMap::new(mesh);
    let (k, m) = assemble_forms(mesh, &dofs, &WeightField::ConstantOne);
    let constrained = dofs.boundary_dofs(mesh, &[BoundaryTag::DirichletWall, BoundaryTag::TubeEnd]);
    let (free_of, n_free) = dofs.free_map(&constrained);
    if n_free == 0 {
        return Err(Error::AllConstrained);
    }
    let kf = k.restrict(&free_of, n_free);
    let mf = m.restrict(&free_of, n_free);
    let reduced = solve_generalized_eig(&kf, &mf, cfg)?;
    let mut pairs = Vec::with_capacity(reduced.len());
    for p in reduced {
        let mut full = vec![0.0; dofs.n_dofs];
        for (i, f) in free_of.iter().enumerate() {
            if let Some(fi) = f {
                full[i] = p.vector[*fi];
            }
        }
        pairs.push(EigenPair {
            lambda: p.lambda,
            vector: full,
        });
    }
    let mut modes = DirichletModes { dofs, pairs };
    orient_modes(mesh, &mut modes)?;
    Ok(modes)
}

// ---------------------------------------------------------------------------
// Angular structure near the origin
// ---------------------------------------------------------------------------

/// Sine coefficients a_m = (2/pi) int_0^pi f(r, theta) sin(m theta) dtheta
/// for m = 1..=max_m on the half-circle of radius `r` (theta measured from
/// the positive x2-axis).
pub fn angular_coefficients(field: &FeField, r: f64, max_m: usize) -> Result<Vec<f64>> {
    let pi = std::f64::consts::PI;
    let (ts, ws) = gauss_legendre_01(4);
    let n_panels = 32usize;
    let mut coeffs = vec![0.0; max_m];
    for p in 0..n_panels {
        for (t, w) in ts.iter().zip(&ws) {
            let theta = (p as f64 + t) * pi / n_panels as f64;
            let wt = w * pi / n_panels as f64;
            let v = field.eval([r * theta.sin(), r * theta.cos()])?;
            for (i, c) in coeffs.iter_mut().enumerate() {
                *c += wt * v * ((i as f64 + 1.0) * theta).sin();
            }
        }
    }
    for c in &mut coeffs {
        *c *= 2.0 / pi;
    }
    Ok(coeffs)
}

/// Dominant angular harmonic of each mode on a small half-circle around the
/// origin, flipping signs in place so the dominant coefficient is positive.
/// Returns the dominant harmonic index per mode.
pub fn orient_modes(mesh: &Mesh, modes: &mut DirichletModes) -> Result<Vec<u32>> {
    let r_probe = 0.12 * probe_scale(mesh);
    let mut dominant = Vec::with_capacity(modes.pairs.len());
    for pair in &mut modes.pairs {
        let field = FeField::new(mesh, &modes.dofs, pair.vector.clone())?;
        let coeffs = angular_coefficients(&field, r_probe, 8)?;
        let (best, amp) = coeffs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, v)| (i + 1, *v))
            .unwrap();
        if amp < 0.0 {
            for v in &mut pair.vector {
                *v = -*v;
            }
        }
        dominant.push(best as u32);
    }
    Ok(dominant)
}

/// Radius scale for origin probes: the tagged outer radius when present,
/// otherwise the largest vertex distance from the origin.
fn probe_scale(mesh: &Mesh) -> f64 {
    mesh.outer_radius.unwrap_or_else(|| {
        mesh.vertices
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
            .fold(0.0, f64::max)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, generate_mesh, DomainSpec, ElementOrder, GradingPolicy};
    use crate::spectral::bessel::half_disk_spectrum;

    fn half_disk_modes(h_far: f64) -> (Mesh, DirichletModes) {
        let spec = DomainSpec::unperturbed(2.0);
        let boundary = build_domain(&spec).unwrap();
        let policy = GradingPolicy::new(h_far, h_far / 3.0, 1.5).unwrap();
        let mesh = generate_mesh(&boundary, &policy, ElementOrder::P2, 7).unwrap();
        let cfg = SolverConfig {
            num_eigs: 6,
            ..SolverConfig::default()
        };
        let modes = solve_dirichlet_modes(&mesh, &cfg).unwrap();
        (mesh, modes)
    }

    #[test]
    fn half_disk_eigenvalues_match_closed_form() {
        let (_, modes) = half_disk_modes(0.08);
        let exact = half_disk_spectrum(2.0, 6).unwrap();
        for (got, want) in modes.pairs.iter().zip(&exact) {
            let rel = (got.lambda - want.lambda).abs() / want.lambda;
            assert!(
                rel < 2e-4,
                "lambda {} vs {} rel {rel:.2e}",
                got.lambda,
                want.lambda
            );
            // Quadratic elements from above: the discrete value exceeds the
            // continuum one.
            assert!(got.lambda > want.lambda - 1e-9);
        }
    }

    #[test]
    fn mode_orientation_matches_closed_form_profile() {
        let (mesh, modes) = half_disk_modes(0.1);
        let exact = half_disk_spectrum(2.0, 3).unwrap();
        // After orientation the numerical mode should agree with the
        // closed-form mode (both premultiplied by a positive leading
        // coefficient), not its negative.
        for (j, want) in exact.iter().enumerate() {
            let field = modes.field(&mesh, j).unwrap();
            let p = [0.3 * (0.9f64).sin(), 0.3 * (0.9f64).cos()];
            let got = field.eval(p).unwrap();
            let reference = want.eval(p);
            if reference.abs() > 0.05 {
                assert!(
                    got.signum() == reference.signum(),
                    "mode {j}: {got} vs {reference}"
                );
                let rel = (got - reference).abs() / reference.abs();
                assert!(rel < 0.05, "mode {j}: {got} vs {reference} rel {rel:.2e}");
            }
        }
    }

    #[test]
    fn dominant_harmonics_follow_expected_sequence() {
        let (mesh, mut modes) = half_disk_modes(0.09);
        let dominant = orient_modes(&mesh, &mut modes).unwrap();
        assert_eq!(dominant, vec![1, 2, 3, 1, 4, 2]);
    }

    #[test]
    fn perturbed_eigenvalues_sit_below_unperturbed() {
        let spec = DomainSpec::perturbed(2.0, 0.1);
        let boundary = build_domain(&spec).unwrap();
        let policy = GradingPolicy::new(0.1, 0.03, 1.5).unwrap();
        let mesh = generate_mesh(&boundary, &policy, ElementOrder::P2, 7).unwrap();
        let cfg = SolverConfig {
            num_eigs: 3,
            ..SolverConfig::default()
        };
        let modes = solve_dirichlet_modes(&mesh, &cfg).unwrap();
        let exact = half_disk_spectrum(2.0, 3).unwrap();
        // Domain monotonicity: enlarging a Dirichlet domain lowers every
        // eigenvalue. Only the first mode shifts at order eps^2, which beats
        // the mesh error; higher modes shift at eps^4 and eps^6, so for them
        // we just check closeness to the half-disk values.
        assert!(
            modes.pairs[0].lambda < exact[0].lambda,
            "{} should sit below {}",
            modes.pairs[0].lambda,
            exact[0].lambda
        );
        assert!(exact[0].lambda - modes.pairs[0].lambda > 1e-3);
        for (got, want) in modes.pairs.iter().zip(&exact).skip(1) {
            let rel = (got.lambda - want.lambda).abs() / want.lambda;
            assert!(rel < 1e-4, "mode at {} vs {} rel {rel:.2e}", got.lambda, want.lambda);
        }
        assert!(mesh.has_tube());
    }
}
