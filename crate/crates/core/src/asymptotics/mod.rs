//! Eigenvalue-shift sweeps in the tube half-width, with rate and constant
//! fitting, a blow-up comparison against the exterior profile, and a dense
//! quadratic-form maximization utility.
//!
//! A sweep tracks one simple eigenvalue branch while the tube shrinks and
//! fits the paired shifts `lambda_j - lambda_j^eps` against the model
//! `C eps^{2k} (1 + O(eps))`, where `k` is the vanishing order of the
//! unperturbed eigenfunction at the tube mouth. The fitted constant is
//! compared with the prediction `-2 c^2 m_k` assembled from the exterior
//! module's coupling coefficient and the measured leading coefficient `c`.
//! The blow-up comparison rescales perturbed eigenfunctions onto a fixed
//! junction-shaped reference mesh and measures their relative H^1 distance
//! to the exterior profile.

use crate::almgren::extract_vanishing_order;
use crate::error::{Error, Result};
use crate::exterior::{psi_k, MkEstimate, ProfilePhi};
use crate::fem::{assemble_forms, DofMap, SolverConfig, SparseMatrix, WeightField};
use crate::geometry::{build_domain, generate_mesh, DomainSpec, SizeCap};
use crate::spectral::{
    match_mode, solve_dirichlet_modes, track_branch, BranchConfig, BranchTrack, DirichletModes,
};
use nalgebra::DMatrix;

// ---------------------------------------------------------------------------
// Least-squares fitting of sweep data
// ---------------------------------------------------------------------------

/// Rate and constant extracted from one sweep's eigenvalue shifts.
#[derive(Debug, Clone, Copy)]
pub struct SweepFit {
    /// Log-log least-squares slope of the raw shifts over the fit window.
    pub raw_slope: f64,
    /// Log-log slope after subtracting the fitted next-order term; falls
    /// back to the raw slope if the subtraction leaves a nonpositive shift.
    pub slope: f64,
    /// Intercept of the linear model `diff / eps^{2k} = C + B eps` over the
    /// fit window: the leading constant with one-step Richardson correction.
    pub constant: f64,
    /// Fitted next-order coefficient `B`.
    pub next_coefficient: f64,
    /// Relative residual of the linear model over the fit window.
    pub residual: f64,
    /// Number of smallest-eps points used.
    pub window: usize,
}

/// Ordinary least squares for `y = a + b x`; returns `(a, b, rel_residual)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    let b = (n * sxy - sx * sy) / det;
    let a = (sy - b * sx) / n;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - a - b * x) * (y - a - b * x))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| y * y).sum();
    let rel = if ss_tot > 0.0 {
        (ss_res / ss_tot).sqrt()
    } else {
        0.0
    };
    (a, b, rel)
}

/// Fit the vanishing rate and leading constant of positive eigenvalue shifts
/// sampled on a strictly decreasing eps grid.
///
/// The `window` smallest eps values enter both fits. The constant comes from
/// the linear model `diff / eps^{2k} = C + B eps`, whose intercept removes
/// the first-order remainder; the slope is refit on the corrected shifts
/// `diff - B eps^{2k+1}`.
pub fn fit_rate_and_constant(
    k: u32,
    eps: &[f64],
    diffs: &[f64],
    window: usize,
) -> Result<SweepFit> {
    if eps.len() != diffs.len() {
        return Err(Error::InvalidParameter(format!(
            "eps and diff lengths disagree: {} vs {}",
            eps.len(),
            diffs.len()
        )));
    }
    if window < 3 || window > eps.len() {
        return Err(Error::InvalidParameter(format!(
            "fit window must have 3..={} points, got {window}",
            eps.len()
        )));
    }
    if eps.windows(2).any(|p| p[1] >= p[0]) || eps.last().is_some_and(|&e| e <= 0.0) {
        return Err(Error::InvalidParameter(
            "eps grid must be positive and strictly decreasing".into(),
        ));
    }
    if diffs.iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidParameter(
            "eigenvalue shifts must be positive to fit a rate".into(),
        ));
    }
    let tail_eps = &eps[eps.len() - window..];
    let tail_diffs = &diffs[diffs.len() - window..];

    let log_e: Vec<f64> = tail_eps.iter().map(|e| e.ln()).collect();
    let log_d: Vec<f64> = tail_diffs.iter().map(|d| d.ln()).collect();
    let (_, raw_slope, _) = line_fit(&log_e, &log_d);

    let scaled: Vec<f64> = tail_eps
        .iter()
        .zip(tail_diffs)
        .map(|(&e, &d)| d / e.powi(2 * k as i32))
        .collect();
    let (constant, next_coefficient, residual) = line_fit(tail_eps, &scaled);

    let corrected: Vec<f64> = tail_eps
        .iter()
        .zip(tail_diffs)
        .map(|(&e, &d)| d - next_coefficient * e.powi(2 * k as i32 + 1))
        .collect();
    let slope = if corrected.iter().all(|&d| d > 0.0) {
        let log_c: Vec<f64> = corrected.iter().map(|d| d.ln()).collect();
        line_fit(&log_e, &log_c).1
    } else {
        raw_slope
    };
    Ok(SweepFit {
        raw_slope,
        slope,
        constant,
        next_coefficient,
        residual,
        window,
    })
}

// ---------------------------------------------------------------------------
// Branch sweeps
// ---------------------------------------------------------------------------

/// A tracked eigenvalue branch with its fitted vanishing rate and constant.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub branch: BranchTrack,
    /// Vanishing order of the unperturbed eigenfunction at the tube mouth.
    pub k: u32,
    /// Leading angular coefficient of the unperturbed eigenfunction
    /// (positive under the solver's orientation convention).
    pub c: f64,
    /// Paired shifts `lambda_j - lambda_j^eps`, one per grid point.
    pub diffs: Vec<f64>,
    /// Corrected log-log slope; expected near `2k`.
    pub fitted_slope: f64,
    /// Uncorrected log-log slope, kept as a diagnostic.
    pub raw_slope: f64,
    /// Richardson-corrected limit of `diff / eps^{2k}`.
    pub fitted_constant: f64,
    /// Relative residual of the constant fit.
    pub fit_residual: f64,
    /// True when some shift is within ten solver tolerances of zero, i.e.
    /// the fit may be sitting on the eigensolver noise floor.
    pub near_noise_floor: bool,
    /// Exterior-route prediction `-2 c^2 m_k`, once attached.
    pub c_k_predicted: Option<f64>,
}

impl SweepResult {
    /// Attach the exterior-route prediction `-2 c^2 m_hat` for later
    /// comparison with the fitted constant.
    pub fn attach_prediction(&mut self, m_hat: f64) {
        self.c_k_predicted = Some(-2.0 * self.c * self.c * m_hat);
    }

    /// CSV rendering with one row per eps sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,lambda_eps,diff,diff_over_eps2k\n");
        for p in &self.branch.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.eps,
                p.lambda_eps,
                p.diff(),
                p.diff() / p.eps.powi(2 * self.k as i32)
            ));
        }
        out
    }
}

/// Validate a sweep grid: at least four strictly decreasing positive widths,
/// the largest at most 0.4.
fn validate_grid(eps_grid: &[f64]) -> Result<()> {
    if eps_grid.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "sweep grid needs at least 4 points, got {}",
            eps_grid.len()
        )));
    }
    if eps_grid.windows(2).any(|p| p[1] >= p[0]) || *eps_grid.last().unwrap() <= 0.0 {
        return Err(Error::InvalidParameter(
            "sweep grid must be positive and strictly decreasing".into(),
        ));
    }
    if eps_grid[0] > 0.4 {
        return Err(Error::InvalidParameter(format!(
            "largest tube half-width must be at most 0.4, got {}",
            eps_grid[0]
        )));
    }
    Ok(())
}

/// Solve the unperturbed problem behind a branch config and return the mesh,
/// the modes, and the tracked mode's index after a simplicity check.
fn solve_unperturbed(
    cfg: &BranchConfig,
) -> Result<(crate::geometry::Mesh, DirichletModes, SolverConfig)> {
    let solver = SolverConfig {
        num_eigs: cfg.solver.num_eigs.max(cfg.mode_index + 3),
        ..cfg.solver
    };
    let boundary = build_domain(&DomainSpec::unperturbed(cfg.r0))?;
    let mesh = generate_mesh(&boundary, &cfg.policy, cfg.order, cfg.seed)?;
    let modes = solve_dirichlet_modes(&mesh, &solver)?;
    let j = cfg.mode_index;
    if j + 2 > modes.pairs.len() {
        return Err(Error::InvalidParameter(format!(
            "mode index {j} needs at least {} computed modes, got {}",
            j + 2,
            modes.pairs.len()
        )));
    }
    let lambda = modes.pairs[j].lambda;
    let mut gap = f64::INFINITY;
    if j > 0 {
        gap = gap.min(lambda - modes.pairs[j - 1].lambda);
    }
    gap = gap.min(modes.pairs[j + 1].lambda - lambda);
    if gap < 1e-6 * lambda {
        return Err(Error::BranchAmbiguity(format!(
            "tracked branch must be simple; nearest spectral gap {gap:.3e} at lambda {lambda:.6}"
        )));
    }
    Ok((mesh, modes, solver))
}

/// Track one branch over a shrinking-tube grid and fit the shift's vanishing
/// rate and leading constant.
///
/// The vanishing order `k` and leading coefficient `c` are measured on the
/// unperturbed eigenfunction; the smallest four grid points feed the fits.
pub fn run_sweep(cfg: &BranchConfig, eps_grid: &[f64]) -> Result<SweepResult> {
    validate_grid(eps_grid)?;
    let (mesh0, modes0, solver) = solve_unperturbed(cfg)?;
    let j = cfg.mode_index;
    let field = modes0.field(&mesh0, j)?;
    let order = extract_vanishing_order(&field, modes0.pairs[j].lambda)?;

    let branch = track_branch(cfg, eps_grid)?;
    let diffs: Vec<f64> = branch.points.iter().map(|p| p.diff()).collect();
    let near_noise_floor = branch
        .points
        .iter()
        .any(|p| p.diff() < 10.0 * solver.tol * p.lambda0);
    let fit = fit_rate_and_constant(order.k, eps_grid, &diffs, eps_grid.len().min(4))?;
    Ok(SweepResult {
        branch,
        k: order.k,
        c: order.c,
        diffs,
        fitted_slope: fit.slope,
        raw_slope: fit.raw_slope,
        fitted_constant: fit.constant,
        fit_residual: fit.residual,
        near_noise_floor,
        c_k_predicted: None,
    })
}

/// Relative discrepancy between a sweep's fitted constant and the exterior
/// prediction `-2 c^2 m_hat`. Both inputs must concern the same vanishing
/// order.
pub fn compare_constant(sweep: &SweepResult, mk: &MkEstimate) -> Result<f64> {
    if sweep.k != mk.k {
        return Err(Error::InvalidParameter(format!(
            "sweep order {} and coupling-coefficient order {} disagree",
            sweep.k, mk.k
        )));
    }
    let predicted = -2.0 * sweep.c * sweep.c * mk.m_hat;
    if !(predicted.abs() > 0.0) {
        return Err(Error::FitUnstable(
            "predicted constant is zero; cannot form a relative discrepancy".into(),
        ));
    }
    Ok((sweep.fitted_constant - predicted).abs() / predicted.abs())
}

// ---------------------------------------------------------------------------
// Blow-up comparison
// ---------------------------------------------------------------------------

/// One rescaled eigenfunction compared against the exterior profile.
#[derive(Debug, Clone, Copy)]
pub struct BlowupPoint {
    pub eps: f64,
    /// Relative H^1 distance between the rescaled, renormalized
    /// eigenfunction and the exterior profile on the reference mesh.
    pub distance: f64,
    /// Same distance measured against the bare reference profile `psi_k`,
    /// i.e. with the correction term deleted.
    pub psi_only_distance: f64,
    /// Index of the matched mode in the perturbed spectrum.
    pub matched_index: usize,
    /// Overlap used for the match.
    pub overlap: f64,
}

/// Blow-up comparison across a family of tube half-widths.
#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub k: u32,
    /// Leading coefficient used for the amplitude normalization.
    pub c: f64,
    /// Points ordered by decreasing eps.
    pub points: Vec<BlowupPoint>,
}

impl BlowupReport {
    /// True when the distances strictly decrease over the `n` smallest
    /// widths (all of them if `n` exceeds the point count).
    pub fn tail_is_decreasing(&self, n: usize) -> bool {
        let start = self.points.len().saturating_sub(n);
        self.points[start..]
            .windows(2)
            .all(|p| p[1].distance < p[0].distance)
    }
}

/// Squared H^1 norm of `a - b` under precomputed stiffness and mass forms.
fn h1_diff2(k: &SparseMatrix, m: &SparseMatrix, a: &[f64], b: &[f64]) -> f64 {
    let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    k.bilinear(&delta, &delta) + m.bilinear(&delta, &delta)
}

/// Rescale tracked perturbed eigenfunctions by `x -> x / eps`,
/// `amplitude -> amplitude / (c eps^k)`, interpolate them onto the
/// truncated-junction reference mesh of radius 2, and measure relative H^1
/// distances to the exterior profile.
///
/// `c` is the measured leading coefficient of the unperturbed eigenfunction;
/// the match against the unperturbed mode fixes each perturbed sign. Widths
/// above 0.25 are rejected because the rescaled mesh no longer covers the
/// reference window.
pub fn blowup_compare(
    cfg: &BranchConfig,
    eps_list: &[f64],
    phi: &ProfilePhi,
    k: u32,
    c: f64,
) -> Result<BlowupReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    if k != phi.k {
        return Err(Error::InvalidParameter(format!(
            "order {k} does not match the profile's order {}",
            phi.k
        )));
    }
    if !(c.abs() > 0.0) {
        return Err(Error::InvalidParameter(
            "leading coefficient must be nonzero".into(),
        ));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    eps_sorted.dedup();
    if eps_sorted[0] > 0.25 || *eps_sorted.last().unwrap() <= 0.0 {
        return Err(Error::Interpolation(format!(
            "rescaled meshes cover the radius-2 reference window only for \
             widths in (0, 0.25], got {}",
            eps_sorted[0]
        )));
    }

    // Reference mesh and H^1 forms, shared by every width.
    let spec_ref = DomainSpec::exterior_truncated(2.0);
    if phi.big.tube_length + 1e-9 < spec_ref.tube_length || phi.big.r < 2.0 {
        return Err(Error::InvalidParameter(
            "profile solve does not cover the reference window".into(),
        ));
    }
    let mesh_ref = generate_mesh(&build_domain(&spec_ref)?, &cfg.policy, cfg.order, cfg.seed)?;
    let dofs_ref = DofMap::new(&mesh_ref);
    let (kmat, mmat) = assemble_forms(&mesh_ref, &dofs_ref, &WeightField::ConstantOne);

    let u_big = phi.u_field()?;
    let mut phi_vals = Vec::with_capacity(dofs_ref.coords.len());
    for &p in &dofs_ref.coords {
        phi_vals.push(u_big.eval(p)? / phi.big.data_scale);
    }
    let psi_vals: Vec<f64> = dofs_ref.coords.iter().map(|&p| psi_k(k, p)).collect();
    let zeros = vec![0.0; dofs_ref.coords.len()];
    let phi_norm2 = h1_diff2(&kmat, &mmat, &phi_vals, &zeros);
    let psi_norm2 = h1_diff2(&kmat, &mmat, &psi_vals, &zeros);

    // Unperturbed modes, used to pick and orient the matched branch.
    let (mesh0, modes0, solver) = solve_unperturbed(cfg)?;
    let j = cfg.mode_index;

    let per_eps = |eps: f64| -> Result<BlowupPoint> {
        let mut boundary = build_domain(&DomainSpec::perturbed(cfg.r0, eps))?;
        // The comparison window has physical size ~eps, so the mesh there
        // must be refined proportionally to eps or the rescaled field's
        // discretization error floors the distance as eps decreases. The
        // extra cap costs O(1) triangles per width regardless of eps.
        let w = 3.0 * eps;
        boundary.size_caps.push(SizeCap {
            x_min: -w,
            x_max: w,
            y_min: -w,
            y_max: w,
            h_cap: 0.12 * eps,
        });
        let mut policy = cfg.policy;
        policy.h_junction = policy.h_junction.min(0.1 * eps);
        let mesh_eps = generate_mesh(&boundary, &policy, cfg.order, cfg.seed)?;
        let modes_eps = solve_dirichlet_modes(&mesh_eps, &solver)?;
        let (matched_index, overlap) = match_mode(&mesh0, &modes0, j, &mesh_eps, &modes_eps)?;
        let f_eps = modes_eps.field(&mesh_eps, matched_index)?;
        let amplitude = overlap.signum() / (c * eps.powi(k as i32));
        let mut vals = Vec::with_capacity(dofs_ref.coords.len());
        for &p in &dofs_ref.coords {
            vals.push(amplitude * f_eps.eval([eps * p[0], eps * p[1]])?);
        }
        Ok(BlowupPoint {
            eps,
            distance: (h1_diff2(&kmat, &mmat, &vals, &phi_vals) / phi_norm2).sqrt(),
            psi_only_distance: (h1_diff2(&kmat, &mmat, &vals, &psi_vals) / psi_norm2).sqrt(),
            matched_index,
            overlap,
        })
    };
    #[cfg(feature = "parallel")]
    let points: Vec<BlowupPoint> = {
        use rayon::prelude::*;
        eps_sorted
            .par_iter()
            .map(|&e| per_eps(e))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let points: Vec<BlowupPoint> = eps_sorted
        .iter()
        .map(|&e| per_eps(e))
        .collect::<Result<_>>()?;
    Ok(BlowupReport { k, c, points })
}

// ---------------------------------------------------------------------------
// Quadratic-form maximization
// ---------------------------------------------------------------------------

/// A family of small symmetric quadratic forms tabulated over a width grid.
#[derive(Debug, Clone)]
pub struct QuadraticFormFamily {
    pub eps_grid: Vec<f64>,
    /// One symmetric coefficient matrix per grid point.
    pub tables: Vec<DMatrix<f64>>,
}

impl QuadraticFormFamily {
    /// Build a family after checking grid/table agreement, squareness,
    /// consistent dimension, and symmetry.
    pub fn from_tables(eps_grid: Vec<f64>, tables: Vec<DMatrix<f64>>) -> Result<Self> {
        if eps_grid.is_empty() || eps_grid.len() != tables.len() {
            return Err(Error::InvalidParameter(format!(
                "need one table per grid point, got {} and {}",
                eps_grid.len(),
                tables.len()
            )));
        }
        let dim = tables[0].nrows();
        for (e, t) in eps_grid.iter().zip(&tables) {
            if t.nrows() != dim || t.ncols() != dim || dim == 0 {
                return Err(Error::InvalidParameter(format!(
                    "table at eps {e} is {}x{}, expected {dim}x{dim}",
                    t.nrows(),
                    t.ncols()
                )));
            }
            check_symmetric(t)?;
        }
        Ok(Self { eps_grid, tables })
    }

    /// Dimension of the forms.
    pub fn dim(&self) -> usize {
        self.tables[0].nrows()
    }

    /// Coefficient matrix at a grid point (exact lookup).
    pub fn matrix_at(&self, eps: f64) -> Result<&DMatrix<f64>> {
        let tol = 1e-12 * eps.abs().max(1.0);
        self.eps_grid
            .iter()
            .position(|&e| (e - eps).abs() <= tol)
            .map(|i| &self.tables[i])
            .ok_or_else(|| {
                Error::InvalidParameter(format!("eps {eps} is not on the tabulated grid"))
            })
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = 1.0 + m.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::InvalidParameter(format!(
                    "coefficient matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Maximum of `xi^T M xi` over the unit sphere: the largest eigenvalue of
/// the symmetric matrix `M`.
pub fn max_on_unit_sphere(m: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(m)?;
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    Ok(eig
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |a, &v| a.max(v)))
}

/// Maximum of the tabulated quadratic form at `eps` over the unit sphere.
pub fn quadratic_form_max(q: &QuadraticFormFamily, eps: f64) -> Result<f64> {
    max_on_unit_sphere(q.matrix_at(eps)?)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::build_phi;
    use crate::geometry::GradingPolicy;
    use crate::spectral::BranchPoint;

    fn eig_policy() -> GradingPolicy {
        GradingPolicy::new(0.12, 0.035, 1.5).unwrap()
    }

    fn exterior_policy() -> GradingPolicy {
        GradingPolicy::new(0.22, 0.04, 1.5).unwrap()
    }

    // -- fitting ------------------------------------------------------------

    #[test]
    fn synthetic_fit_recovers_generator() {
        // diffs 3 eps^2 (1 + eps): the scaled model is exactly linear, so the
        // intercept and next-order coefficient are exact and the corrected
        // slope collapses to 2.
        let eps = [0.2, 0.15, 0.1, 0.07, 0.05];
        let diffs: Vec<f64> = eps.iter().map(|&e| 3.0 * e * e * (1.0 + e)).collect();
        let fit = fit_rate_and_constant(1, &eps, &diffs, 4).unwrap();
        assert!((fit.constant - 3.0).abs() < 1e-10, "constant {}", fit.constant);
        assert!((fit.constant - 3.0).abs() < 0.05);
        assert!(
            (fit.next_coefficient - 3.0).abs() < 1e-8,
            "next coefficient {}",
            fit.next_coefficient
        );
        assert!((fit.slope - 2.0).abs() < 1e-8, "slope {}", fit.slope);
        assert!((fit.slope - 2.0).abs() < 0.02);
        // The uncorrected slope carries the (1 + eps) contamination.
        assert!(
            (fit.raw_slope - 2.0828163452928471).abs() < 1e-9,
            "raw slope {}",
            fit.raw_slope
        );
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_window_can_drop_the_largest_width() {
        // Fit stability: a clean quadratic-with-remainder family moves the
        // slope by far less than 0.1 when the largest width is dropped.
        let eps = [0.2, 0.15, 0.1, 0.07, 0.05];
        let diffs: Vec<f64> = eps.iter().map(|&e| 0.9 * e * e * (1.0 - 0.4 * e)).collect();
        let wide = fit_rate_and_constant(1, &eps, &diffs, 4).unwrap();
        let narrow = fit_rate_and_constant(1, &eps, &diffs, 3).unwrap();
        assert!(
            (wide.slope - narrow.slope).abs() < 0.1,
            "slopes {} vs {}",
            wide.slope,
            narrow.slope
        );
    }

    #[test]
    fn fit_rejects_bad_grids() {
        let eps = [0.2, 0.1, 0.05, 0.025];
        let good: Vec<f64> = eps.iter().map(|&e| e * e).collect();
        assert!(fit_rate_and_constant(1, &eps, &good[..3], 3).is_err());
        assert!(fit_rate_and_constant(1, &eps, &good, 6).is_err());
        assert!(fit_rate_and_constant(1, &[0.1, 0.1, 0.05, 0.02], &good, 4).is_err());
        let negative = vec![0.04, 0.01, -0.002, 0.0006];
        assert!(fit_rate_and_constant(1, &eps, &negative, 4).is_err());
    }

    // -- sweeps -------------------------------------------------------------

    #[test]
    fn first_branch_sweep_has_quadratic_rate() {
        let mut cfg = BranchConfig::new(2.0, 0);
        cfg.policy = eig_policy();
        let result = run_sweep(&cfg, &[0.2, 0.15, 0.1, 0.07]).unwrap();
        assert_eq!(result.k, 1);
        // Orientation convention makes the leading coefficient positive; its
        // magnitude has a closed-form series value on the half-disk.
        assert!(result.c > 0.0);
        assert!(
            (result.c - 1.3418734725219005).abs() / 1.3418734725219005 < 0.05,
            "c {}",
            result.c
        );
        assert!(result.diffs.iter().all(|&d| d > 0.0));
        assert!(
            result.fitted_slope > 1.7 && result.fitted_slope < 2.3,
            "slope {}",
            result.fitted_slope
        );
        assert!(!result.near_noise_floor);
        assert!(result.c_k_predicted.is_none());
        let csv = result.to_csv();
        assert!(csv.starts_with("eps,lambda_eps,diff,diff_over_eps2k\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn sweep_grid_is_validated() {
        let cfg = BranchConfig::new(2.0, 0);
        assert!(run_sweep(&cfg, &[0.2, 0.1, 0.05]).is_err());
        assert!(run_sweep(&cfg, &[0.1, 0.15, 0.07, 0.05]).is_err());
        assert!(run_sweep(&cfg, &[0.5, 0.2, 0.1, 0.05]).is_err());
        assert!(run_sweep(&cfg, &[0.2, 0.15, 0.1, -0.05]).is_err());
    }

    #[test]
    fn constant_comparison_detects_scaling_errors() {
        let mk = MkEstimate {
            k: 1,
            m_hat: -0.3,
            c_k: 0.6,
            r_values: vec![4.0, 8.0, 16.0],
            g_values: vec![-0.59, -0.6, -0.61],
            fit_coefficient: 0.1,
            fit_residual: 1e-3,
        };
        let mut sweep = SweepResult {
            branch: BranchTrack {
                mode_index: 0,
                points: Vec::<BranchPoint>::new(),
            },
            k: 1,
            c: 1.0,
            diffs: vec![],
            fitted_slope: 2.0,
            raw_slope: 2.05,
            fitted_constant: 0.6,
            fit_residual: 0.0,
            near_noise_floor: false,
            c_k_predicted: None,
        };
        // Exact agreement.
        assert!(compare_constant(&sweep, &mk).unwrap().abs() < 1e-12);
        // A factor-4 mismatch (for instance a doubled leading coefficient on
        // one side) shows up as a relative discrepancy of 3.
        sweep.fitted_constant = 2.4;
        assert!((compare_constant(&sweep, &mk).unwrap() - 3.0).abs() < 1e-12);
        sweep.attach_prediction(mk.m_hat);
        assert!((sweep.c_k_predicted.unwrap() - 0.6).abs() < 1e-15);
        // Mixed orders are rejected.
        sweep.k = 2;
        assert!(compare_constant(&sweep, &mk).is_err());
    }

    // -- blow-up ------------------------------------------------------------

    #[test]
    fn rescaled_eigenfunctions_approach_the_profile() {
        let mut cfg = BranchConfig::new(2.0, 0);
        cfg.policy = eig_policy();
        let phi = build_phi(1, 2.0, &exterior_policy(), 3).unwrap();
        let c = 1.3418734725219005;
        let report = blowup_compare(&cfg, &[0.2, 0.1], &phi, 1, c).unwrap();
        assert_eq!(report.points.len(), 2);
        let far = &report.points[0];
        let near = &report.points[1];
        assert!(far.overlap.abs() > 0.9 && near.overlap.abs() > 0.9);
        assert!(
            near.distance < far.distance,
            "distances {} -> {}",
            far.distance,
            near.distance
        );
        assert!(near.distance < 0.35, "distance {}", near.distance);
        // Deleting the correction term leaves a visibly worse approximation.
        assert!(
            near.psi_only_distance > 1.5 * near.distance,
            "psi-only {} vs full {}",
            near.psi_only_distance,
            near.distance
        );
        assert!(report.tail_is_decreasing(2));
    }

    #[test]
    fn blowup_rejects_uncovered_widths() {
        let cfg = BranchConfig::new(2.0, 0);
        let phi = build_phi(1, 2.0, &exterior_policy(), 3).unwrap();
        let c = 1.34;
        assert!(blowup_compare(&cfg, &[0.3, 0.1], &phi, 1, c).is_err());
        assert!(blowup_compare(&cfg, &[], &phi, 1, c).is_err());
        assert!(blowup_compare(&cfg, &[0.2], &phi, 2, c).is_err());
        assert!(blowup_compare(&cfg, &[0.2], &phi, 1, 0.0).is_err());
    }

    // -- quadratic forms ----------------------------------------------------

    #[test]
    fn diagonal_and_rank_one_forms_have_known_maxima() {
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 0.5]));
        assert!((max_on_unit_sphere(&diag).unwrap() - 0.5).abs() < 1e-15);

        let xi = nalgebra::DVector::from_vec(vec![0.6, 0.8, 1.2]);
        let rank1 = &xi * xi.transpose();
        let want = xi.norm_squared();
        assert!((max_on_unit_sphere(&rank1).unwrap() - want).abs() < 1e-12);
    }

    fn stiff_small_entry_family() -> QuadraticFormFamily {
        let grid = vec![1e-1, 1e-2, 1e-3];
        let tables = grid
            .iter()
            .map(|&e| {
                DMatrix::from_row_slice(2, 2, &[-1.0 + e, 0.1 * e * e, 0.1 * e * e, 3.0 * e * e])
            })
            .collect();
        QuadraticFormFamily::from_tables(grid, tables).unwrap()
    }

    /// Cancellation-free largest root of a 2x2 characteristic polynomial
    /// with tr < 0 < D: the smaller root is computed by a stable subtraction
    /// and the larger recovered from the product of roots.
    fn stable_max_root(m: &DMatrix<f64>) -> f64 {
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let root_min = 0.5 * (tr - (tr * tr - 4.0 * det).sqrt());
        det / root_min
    }

    #[test]
    fn stiff_family_maximum_follows_the_small_diagonal_entry() {
        let q = stiff_small_entry_family();
        assert_eq!(q.dim(), 2);
        for &eps in &q.eps_grid {
            let max = quadratic_form_max(&q, eps).unwrap();
            let ratio = max / (3.0 * eps * eps);
            assert!((ratio - 1.0).abs() < 1e-2, "eps {eps}: ratio {ratio}");
            // The dense solver carries absolute rounding of order the matrix
            // norm times machine epsilon, which dominates near the tiny
            // eigenvalue; the stable closed form is the precise reference.
            let root = stable_max_root(q.matrix_at(eps).unwrap());
            assert!(
                (max - root).abs() <= 5e-15,
                "eps {eps}: dense {max:.17e} vs closed form {root:.17e}"
            );
        }
        // 60-digit reference for the smallest width, resolved by the stable
        // closed form to full f64 accuracy and by the dense solver to within
        // its conditioning limit.
        let exact = stable_max_root(q.matrix_at(1e-3).unwrap()) / 3e-6;
        assert!((exact - 1.00000000333666).abs() < 1e-12, "{exact:.14}");
        let dense = quadratic_form_max(&q, 1e-3).unwrap() / 3e-6;
        assert!((dense - 1.00000000333666).abs() < 5e-11, "{dense:.14}");
        assert!(quadratic_form_max(&q, 5e-3).is_err());
    }

    #[test]
    fn maximum_is_rotation_invariant() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[1.3, -0.4, 0.2, -0.4, -0.7, 0.5, 0.2, 0.5, 2.1],
        );
        let base = max_on_unit_sphere(&m).unwrap();
        for &(p, q, angle) in &[(0usize, 1usize, 0.7f64), (1, 2, 1.1), (0, 2, 2.3)] {
            let mut rot = DMatrix::identity(3, 3);
            rot[(p, p)] = angle.cos();
            rot[(q, q)] = angle.cos();
            rot[(p, q)] = -angle.sin();
            rot[(q, p)] = angle.sin();
            let turned = rot.transpose() * &m * &rot;
            let got = max_on_unit_sphere(&turned).unwrap();
            assert!((got - base).abs() < 1e-12, "rotated max {got} vs {base}");
        }
    }

    #[test]
    fn malformed_families_are_rejected() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, -0.2, 1.0]);
        assert!(max_on_unit_sphere(&asym).is_err());
        assert!(QuadraticFormFamily::from_tables(vec![0.1], vec![]).is_err());
        let tables = vec![DMatrix::identity(2, 2), DMatrix::identity(3, 3)];
        assert!(QuadraticFormFamily::from_tables(vec![0.1, 0.2], tables).is_err());
    }
}
