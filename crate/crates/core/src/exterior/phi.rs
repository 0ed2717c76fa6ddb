//! Blow-up profile and window-energy comparison.
//!
//! The blow-up profile of order `k` is the exterior minimizer computed on a
//! generously truncated domain (four times the radius out to which the
//! profile is consumed), so that truncation error inside the window of
//! interest is negligible. Two global identities are checked against it:
//!
//! * the window comparison `F(R)`: replacing the profile inside the
//!   half-ball `B_R^+` by the harmonic extension of its own arc trace (with
//!   zero data on the whole diameter, i.e. the tube removed) raises the
//!   energy by an amount converging to `C_k = -2 m_k`;
//! * the first-harmonic arc moment at radius 1, which equals
//!   `pi/2 - m_k / k` in the limit.

use crate::error::{Error, Result};
use crate::fem::{assemble_stiffness, energy_in_region, solve_dirichlet, DofMap, FeField};
use crate::geometry::{
    build_domain, clip_quadrature, generate_mesh, quad::gauss_legendre_01, BoundaryTag,
    DomainSpec, ElementOrder, GradingPolicy, GradingPolicy as Policy, Mesh,
};

use super::{fit_power_offset, solve_exterior, tube_energy_a, ExteriorSolution};

// ---------------------------------------------------------------------------
// Profile construction
// ---------------------------------------------------------------------------

/// Exterior blow-up profile trusted out to `r_host`, backed by a solve on the
/// domain truncated at `4 * r_host`.
#[derive(Debug, Clone)]
pub struct ProfilePhi {
    pub k: u32,
    /// Radius out to which the profile is accurate.
    pub r_host: f64,
    /// Backing solve at truncation radius `4 * r_host`.
    pub big: ExteriorSolution,
}

impl ProfilePhi {
    /// Finite-element view of the full profile `Phi = psi_k + w`.
    pub fn u_field(&self) -> Result<FeField<'_>> {
        self.big.u_field()
    }

    /// Finite-element view of the correction `w = Phi - psi_k`.
    pub fn w_field(&self) -> Result<FeField<'_>> {
        self.big.w_field()
    }

    /// Mean of `|Phi - psi_k|` over the semicircle of radius `r`, a direct
    /// measure of how fast the profile relaxes to the reference profile.
    pub fn correction_arc_mean(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < self.big.r) {
            return Err(Error::InvalidParameter(format!(
                "arc radius must lie in (0, {}), got {r}",
                self.big.r
            )));
        }
        let w = self.w_field()?;
        let (nodes, weights) = gauss_legendre_01(4);
        let panels = 64usize;
        let mut acc = 0.0;
        for panel in 0..panels {
            for (&q, &wq) in nodes.iter().zip(&weights) {
                let theta = std::f64::consts::PI * (panel as f64 + q) / panels as f64;
                let p = [r * theta.sin(), r * theta.cos()];
                acc += wq / panels as f64 * w.eval(p)?.abs();
            }
        }
        Ok(acc)
    }
}

/// Build the order-`k` blow-up profile trusted out to `r_host >= 2` by
/// solving the exterior problem at truncation radius `4 * r_host`.
pub fn build_phi(k: u32, r_host: f64, policy: &GradingPolicy, seed: u64) -> Result<ProfilePhi> {
    if !(r_host >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "profile host radius must be at least 2, got {r_host}"
        )));
    }
    let big = solve_exterior(k, 4.0 * r_host, policy, seed)?;
    Ok(ProfilePhi { k, r_host, big })
}

// ---------------------------------------------------------------------------
// Window comparison
// ---------------------------------------------------------------------------

/// Energy bookkeeping for one comparison window `B_R^+`.
#[derive(Debug, Clone)]
pub struct WindowEnergy {
    /// Window radius.
    pub r: f64,
    /// Energy of the harmonic extension of the correction's arc trace into
    /// the tube-free half-ball.
    pub zeta_energy: f64,
    /// Energy of the correction over the truncated tube plus the half-ball
    /// part of the window.
    pub window_energy: f64,
    /// Comparison value `a_k + zeta_energy - window_energy`; converges to
    /// `C_k` as the window grows.
    pub f_value: f64,
}

/// Compare the profile against its tube-free harmonic replacement in the
/// window `B_R^+`, `2 <= r_window <= phi.r_host`.
///
/// All reference-profile contributions cancel in closed form, leaving
/// `F(R) = a_k + |grad zeta|^2 - |grad w|^2_window` where `zeta` is harmonic
/// on the half-ball with the correction's arc trace as data and zero on the
/// diameter.
pub fn solve_window_energy(
    phi: &ProfilePhi,
    r_window: f64,
    policy: &Policy,
    seed: u64,
) -> Result<WindowEnergy> {
    if !(r_window >= 2.0 && r_window <= phi.r_host + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "window radius must lie in [2, {}], got {r_window}",
            phi.r_host
        )));
    }
    let spec = DomainSpec::half_ball(r_window);
    let boundary = build_domain(&spec)?;
    let mesh = generate_mesh(&boundary, policy, ElementOrder::P2, seed)?;
    let dofs = DofMap::new(&mesh);
    let stiffness = assemble_stiffness(&mesh, &dofs);

    let w_big = phi.w_field()?;
    let mut constrained: Vec<(usize, f64)> = Vec::new();
    for d in dofs.boundary_dofs(&mesh, &[BoundaryTag::OuterArc]) {
        constrained.push((d, w_big.eval(dofs.coords[d])?));
    }
    // Diameter data wins at the two shared corner dofs; the correction
    // vanishes there anyway.
    for d in dofs.boundary_dofs(&mesh, &[BoundaryTag::DirichletWall]) {
        constrained.push((d, 0.0));
    }
    constrained.sort_by_key(|&(d, _)| d);
    constrained.reverse();
    constrained.dedup_by_key(|&mut (d, _)| d);
    constrained.reverse();

    let zeros = vec![0.0; dofs.coords.len()];
    let zeta = solve_dirichlet(&stiffness, &zeros, &constrained)?;
    let zeta_energy = stiffness.bilinear(&zeta, &zeta);

    // Energy of the correction over the whole truncated tube plus the
    // half-ball part of the window. The two pieces are integrated separately
    // because the tube corners can poke outside small windows; no triangle
    // straddles the tube mouth, so a centroid sign test is exact.
    let big_mesh = &phi.big.mesh;
    let mut window_energy =
        energy_in_region(big_mesh, &phi.big.dofs, &phi.big.w, |p| p[0] < 0.0);
    let rule = clip_quadrature(big_mesh, r_window, 4)?;
    for &(tri, bary, wq) in &rule.interior {
        let [i, j, k] = big_mesh.triangles[tri];
        let cx = (big_mesh.vertices[i][0]
            + big_mesh.vertices[j][0]
            + big_mesh.vertices[k][0])
            / 3.0;
        if cx <= 0.0 {
            continue;
        }
        let g = w_big.grad_bary(tri, bary);
        window_energy += wq * (g[0] * g[0] + g[1] * g[1]);
    }
    let scale2 = phi.big.data_scale * phi.big.data_scale;
    let f_value = tube_energy_a(phi.k, phi.big.tube_length) + zeta_energy / scale2
        - window_energy / scale2;
    Ok(WindowEnergy {
        r: r_window,
        zeta_energy: zeta_energy / scale2,
        window_energy: window_energy / scale2,
        f_value,
    })
}

/// Evaluate [`solve_window_energy`] over a family of window radii, ascending.
pub fn window_energy_curve(
    phi: &ProfilePhi,
    radii: &[f64],
    policy: &Policy,
    seed: u64,
) -> Result<Vec<WindowEnergy>> {
    let mut rs: Vec<f64> = radii.to_vec();
    rs.sort_by(|a, b| a.total_cmp(b));
    rs.iter().map(|&r| solve_window_energy(phi, r, policy, seed)).collect()
}

/// Extrapolate the window comparison `F(R) = C + b R^(-2k)` to `R = inf`,
/// returning `(c_k, amplitude, rel_residual)`. Requires three or more
/// windows and a positive limit.
pub fn extrapolate_c_from_windows(k: u32, windows: &[WindowEnergy]) -> Result<(f64, f64, f64)> {
    let rs: Vec<f64> = windows.iter().map(|w| w.r).collect();
    let fs: Vec<f64> = windows.iter().map(|w| w.f_value).collect();
    let (c, amp, rel) = fit_power_offset(&rs, &fs, 2.0 * k as f64)?;
    if !(c > 0.0) {
        return Err(Error::FitUnstable(format!(
            "window comparison must extrapolate to a positive constant, got {c:.6e}"
        )));
    }
    Ok((c, amp, rel))
}

// ---------------------------------------------------------------------------
// Arc-moment identity
// ---------------------------------------------------------------------------

/// First-harmonic arc moment of the profile at radius 1:
/// `int_0^pi Phi(1, theta) sin(k theta) dtheta`, which converges to
/// `pi/2 - m_k / k`. Returns `(measured, predicted)` for a supplied coupling
/// constant `m_hat`; for the bare reference profile the moment is exactly
/// `pi/2`.
pub fn zeta_identity_check(phi: &ProfilePhi, m_hat: f64) -> Result<(f64, f64)> {
    let measured = arc_moment(&phi.big.mesh, &phi.big.dofs, &phi.big.u, phi.k)?
        / (phi.big.data_scale);
    let predicted = std::f64::consts::FRAC_PI_2 - m_hat / phi.k as f64;
    Ok((measured, predicted))
}

fn arc_moment(mesh: &Mesh, dofs: &DofMap, values: &[f64], k: u32) -> Result<f64> {
    let field = FeField::new(mesh, dofs, values.to_vec())?;
    let (nodes, weights) = gauss_legendre_01(4);
    let panels = 64usize;
    let mut acc = 0.0;
    for panel in 0..panels {
        for (&q, &wq) in nodes.iter().zip(&weights) {
            let theta = std::f64::consts::PI * (panel as f64 + q) / panels as f64;
            let p = [theta.sin(), theta.cos()];
            acc += std::f64::consts::PI / panels as f64
                * wq
                * field.eval(p)?
                * (k as f64 * theta).sin();
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
