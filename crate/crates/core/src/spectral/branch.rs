//! Pairing eigenmodes of the tube-perturbed domain with half-disk modes.
//!
//! For each tube half-width eps a perturbed mesh and a grading-matched
//! half-disk companion are solved side by side; perturbed modes are matched
//! to the tracked half-disk mode by the L^2 overlap on the half-disk.

use crate::error::{Error, Result};
use crate::fem::{FeField, SolverConfig};
use crate::geometry::quad::triangle_rule;
use crate::geometry::{
    build_domain, build_paired_unperturbed, generate_mesh_with, DomainSpec, ElementOrder,
    GradingPolicy, Mesh, MeshOptions,
};
use crate::spectral::solve::{solve_dirichlet_modes, DirichletModes};

// ---------------------------------------------------------------------------
// Overlap matching
// ---------------------------------------------------------------------------

/// L^2 overlaps int_{half disk} phi0_j phi_i over the unperturbed mesh, one
/// entry per perturbed mode i. Both factors are unit L^2 vectors on their own
/// domains, so a matched branch gives an overlap near one.
pub fn mode_overlaps(
    mesh0: &Mesh,
    modes0: &DirichletModes,
    j: usize,
    mesh_eps: &Mesh,
    modes_eps: &DirichletModes,
) -> Result<Vec<f64>> {
    let phi0 = modes0.field(mesh0, j)?;
    let fields: Vec<FeField> = (0..modes_eps.pairs.len())
        .map(|i| modes_eps.field(mesh_eps, i))
        .collect::<Result<_>>()?;
    if fields.is_empty() {
        return Ok(Vec::new());
    }
    let rule = triangle_rule(4);
    let mut overlaps = vec![0.0; fields.len()];
    for (t, tri) in mesh0.triangles.iter().enumerate() {
        let a = mesh0.vertices[tri[0]];
        let b = mesh0.vertices[tri[1]];
        let c = mesh0.vertices[tri[2]];
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let p = [
                bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
            ];
            let v0 = phi0.eval_bary(t, *bary);
            let (te, be) = fields[0].locate(p)?;
            let wq = 0.5 * w * det.abs();
            for (o, f) in overlaps.iter_mut().zip(&fields) {
                *o += wq * v0 * f.eval_bary(te, be);
            }
        }
    }
    Ok(overlaps)
}

/// Index and overlap of the perturbed mode matching half-disk mode `j`.
/// Fails with a branch ambiguity unless the best |overlap| reaches 0.5.
pub fn match_mode(
    mesh0: &Mesh,
    modes0: &DirichletModes,
    j: usize,
    mesh_eps: &Mesh,
    modes_eps: &DirichletModes,
) -> Result<(usize, f64)> {
    let overlaps = mode_overlaps(mesh0, modes0, j, mesh_eps, modes_eps)?;
    let (best, val) = overlaps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .ok_or_else(|| Error::BranchAmbiguity("no perturbed modes to match".into()))?;
    if val.abs() < 0.5 {
        return Err(Error::BranchAmbiguity(format!(
            "best overlap {:.3} for mode {} below 0.5",
            val, j
        )));
    }
    Ok((best, *val))
}

// ---------------------------------------------------------------------------
// Branch tracking across a tube sweep
// ---------------------------------------------------------------------------

/// Parameters for tracking one eigenvalue branch while the tube shrinks.
#[derive(Debug, Clone)]
pub struct BranchConfig {
    /// Half-disk radius.
    pub r0: f64,
    /// 0-based index of the tracked half-disk mode.
    pub mode_index: usize,
    pub policy: GradingPolicy,
    pub order: ElementOrder,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Vertex smoothing is confined to this disk around the tube mouth so
    /// the paired meshes stay identical in the far field.
    pub smoothing_zone_radius: f64,
}

impl BranchConfig {
    pub fn new(r0: f64, mode_index: usize) -> Self {
        Self {
            r0,
            mode_index,
            policy: GradingPolicy::default(),
            order: ElementOrder::P2,
            seed: 7,
            solver: SolverConfig::default(),
            smoothing_zone_radius: 0.45 * r0,
        }
    }

    fn mesh_options(&self) -> MeshOptions {
        let mut opts = MeshOptions::new(self.order, self.seed);
        opts.smoothing_zone = Some(([0.0, 0.0], self.smoothing_zone_radius));
        // Circumcenter insertion is order-sensitive; skip it so far-field
        // triangles of the paired meshes stay bitwise identical.
        opts.quality_rounds = 0;
        opts
    }
}

/// One eps sample of a tracked branch.
#[derive(Debug, Clone, Copy)]
pub struct BranchPoint {
    pub eps: f64,
    /// Half-disk eigenvalue on the paired companion mesh.
    pub lambda0: f64,
    /// Matched perturbed eigenvalue.
    pub lambda_eps: f64,
    /// Overlap used for the match.
    pub overlap: f64,
    /// Index of the matched mode in the perturbed spectrum.
    pub matched_index: usize,
}

impl BranchPoint {
    /// Paired eigenvalue shift lambda0 - lambda_eps (positive).
    pub fn diff(&self) -> f64 {
        self.lambda0 - self.lambda_eps
    }
}

/// A branch tracked across several tube half-widths.
#[derive(Debug, Clone)]
pub struct BranchTrack {
    pub mode_index: usize,
    pub points: Vec<BranchPoint>,
}

impl BranchTrack {
    /// CSV rendering with one row per eps sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,lambda_eps,lambda0,diff,overlap,matched_index\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                p.eps,
                p.lambda_eps,
                p.lambda0,
                p.diff(),
                p.overlap,
                p.matched_index
            ));
        }
        out
    }
}

/// Solve the paired meshes for one eps and match the tracked mode.
pub fn branch_point(cfg: &BranchConfig, eps: f64) -> Result<BranchPoint> {
    let solver = SolverConfig {
        num_eigs: cfg.solver.num_eigs.max(cfg.mode_index + 3),
        ..cfg.solver
    };
    let opts = cfg.mesh_options();
    let b_eps = build_domain(&DomainSpec::perturbed(cfg.r0, eps))?;
    let b0 = build_paired_unperturbed(cfg.r0, eps)?;
    let mesh_eps = generate_mesh_with(&b_eps, &cfg.policy, &opts)?;
    let mesh0 = generate_mesh_with(&b0, &cfg.policy, &opts)?;
    let modes_eps = solve_dirichlet_modes(&mesh_eps, &solver)?;
    let modes0 = solve_dirichlet_modes(&mesh0, &solver)?;
    let j = cfg.mode_index;
    if j >= modes0.pairs.len() {
        return Err(Error::InvalidParameter(format!(
            "mode index {j} not computed (got {})",
            modes0.pairs.len()
        )));
    }
    let (matched, overlap) = match_mode(&mesh0, &modes0, j, &mesh_eps, &modes_eps)?;
    let lambda0 = modes0.pairs[j].lambda;
    let lambda_eps = modes_eps.pairs[matched].lambda;
    if lambda_eps >= lambda0 {
        return Err(Error::BranchAmbiguity(format!(
            "matched eigenvalue {lambda_eps} is not below the half-disk value {lambda0} at eps {eps}"
        )));
    }
    Ok(BranchPoint {
        eps,
        lambda0,
        lambda_eps,
        overlap,
        matched_index: matched,
    })
}

/// Track one branch across a list of tube half-widths.
pub fn track_branch(cfg: &BranchConfig, eps_list: &[f64]) -> Result<BranchTrack> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    let mut points = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        points.push(branch_point(cfg, eps)?);
    }
    Ok(BranchTrack {
        mode_index: cfg.mode_index,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracked_branch_shrinks_with_the_tube() {
        let mut cfg = BranchConfig::new(2.0, 0);
        cfg.policy = GradingPolicy::new(0.12, 0.035, 1.5).unwrap();
        let track = track_branch(&cfg, &[0.2, 0.1]).unwrap();
        assert_eq!(track.points.len(), 2);
        for p in &track.points {
            assert!(p.overlap > 0.9, "overlap {}", p.overlap);
            assert!(p.diff() > 0.0);
        }
        // The eigenvalue shift grows with the tube width.
        assert!(track.points[0].diff() > track.points[1].diff());
        let csv = track.to_csv();
        assert!(csv.starts_with("eps,lambda_eps,lambda0,diff,overlap,matched_index"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn second_branch_matches_with_high_overlap() {
        let mut cfg = BranchConfig::new(2.0, 1);
        cfg.policy = GradingPolicy::new(0.14, 0.04, 1.5).unwrap();
        let p = branch_point(&cfg, 0.15).unwrap();
        assert_eq!(p.matched_index, 1);
        assert!(p.overlap.abs() > 0.9);
        assert!(p.diff() > 0.0);
    }
}
