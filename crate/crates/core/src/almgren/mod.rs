//! Frequency-function diagnostics at the tube junction.
//!
//! The frequency of a field phi with eigenvalue lambda at radius r is
//! N(r) = E(r)/H(r) with E the clipped Dirichlet energy (minus the lambda
//! mass term) over the half-ball of radius r plus the whole tube, and H the
//! averaged squared trace on the half-circle of radius r. For fields
//! vanishing to order k at the origin, N(r) -> k as r -> 0; the integer
//! plateau and the angular projection recover the order and the leading
//! coefficient.

mod steklov;
mod tube;

pub use steklov::{steklov_family, steklov_m_sigma};
pub use tube::{
    tube_poincare_check, tube_poincare_kappa, tube_separable_ratio, tube_sharp_ratio,
};

use crate::error::{Error, Result};
use crate::fem::FeField;
use crate::geometry::clip_quadrature;
use crate::spectral::angular_coefficients;

// ---------------------------------------------------------------------------
// Frequency profiles
// ---------------------------------------------------------------------------

/// One radius sample of the frequency function.
#[derive(Debug, Clone, Copy)]
pub struct FrequencyPoint {
    pub r: f64,
    /// E(r): clipped energy minus the eigenvalue mass term.
    pub energy: f64,
    /// H(r): (1/r) times the squared trace on the half-circle.
    pub height: f64,
    /// E/H; NaN when the height is not positive numerically.
    pub frequency: f64,
}

/// Frequency samples at decreasing radii for one field.
#[derive(Debug, Clone)]
pub struct FrequencyProfile {
    pub lambda: f64,
    /// Tube half-width of the underlying domain (0 for the plain half-disk).
    pub eps: f64,
    pub points: Vec<FrequencyPoint>,
}

impl FrequencyProfile {
    /// Largest finite frequency over the sampled radii.
    pub fn max_frequency(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.frequency)
            .filter(|f| f.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Frequency at the largest sampled radius.
    pub fn frequency_at_largest(&self) -> f64 {
        self.points.first().map(|p| p.frequency).unwrap_or(f64::NAN)
    }

    /// True when any sampled height failed to be positive.
    pub fn has_degenerate_height(&self) -> bool {
        self.points.iter().any(|p| !(p.height > 0.0))
    }

    /// CSV rendering with one row per radius.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,energy,height,frequency\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.r, p.energy, p.height, p.frequency
            ));
        }
        out
    }
}

/// Frequency sample of `field` (eigenvalue `lambda`) at radius `r`.
///
/// The energy integrates over the clipped region (half-ball plus the entire
/// tube when the mesh has one); the height uses the arc quadrature of the
/// same clipped rule.
pub fn frequency_point(field: &FeField, lambda: f64, r: f64) -> Result<FrequencyPoint> {
    let rule = clip_quadrature(field.mesh, r, 4)?;
    let mut energy = 0.0;
    for (t, bary, w) in &rule.interior {
        let g = field.grad_bary(*t, *bary);
        let v = field.eval_bary(*t, *bary);
        energy += w * (g[0] * g[0] + g[1] * g[1] - lambda * v * v);
    }
    let mut height = 0.0;
    for (p, w) in &rule.arc {
        let v = field.eval(*p)?;
        height += w * v * v;
    }
    height /= r;
    let frequency = if height > 0.0 {
        energy / height
    } else {
        f64::NAN
    };
    Ok(FrequencyPoint {
        r,
        energy,
        height,
        frequency,
    })
}

/// Frequency profile over the given radii (sorted to decreasing order).
pub fn frequency_profile(
    field: &FeField,
    lambda: f64,
    eps: f64,
    radii: &[f64],
) -> Result<FrequencyProfile> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("no radii requested".into()));
    }
    let mut rs: Vec<f64> = radii.to_vec();
    rs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut points = Vec::with_capacity(rs.len());
    for r in rs {
        points.push(frequency_point(field, lambda, r)?);
    }
    Ok(FrequencyProfile {
        lambda,
        eps,
        points,
    })
}

// ---------------------------------------------------------------------------
// Vanishing order extraction
// ---------------------------------------------------------------------------

/// Vanishing order and leading angular coefficient of a field at the origin.
#[derive(Debug, Clone, Copy)]
pub struct VanishingOrder {
    /// Integer order: the field behaves like c r^k sin(k theta).
    pub k: u32,
    /// Leading coefficient from the angular projection.
    pub c: f64,
    /// Radius window the estimates were sampled from.
    pub fit_window: (f64, f64),
    /// Spread (max minus min) of the per-radius coefficient estimates.
    pub fit_residual: f64,
    /// True when |c| dominates the spread by a factor of ten.
    pub certified: bool,
}

/// Extracts the vanishing order over the default window
/// [0.05 R0, 0.15 R0], with R0 the tagged outer radius of the mesh.
pub fn extract_vanishing_order(field: &FeField, lambda: f64) -> Result<VanishingOrder> {
    let r0 = field.mesh.outer_radius.ok_or_else(|| {
        Error::InvalidParameter("vanishing order needs a mesh with a tagged outer radius".into())
    })?;
    extract_vanishing_order_windowed(field, lambda, 0.05 * r0, 0.15 * r0, 17)
}

/// Extracts the vanishing order from `n_samples` geometrically spaced radii
/// in [r_lo, r_hi].
///
/// The order is the nearest integer to the median frequency; the
/// coefficient is the median over the window of r^{-k} (2/pi)
/// int_0^pi field(r, theta) sin(k theta) dtheta. Geometric spacing keeps the
/// smallest radii (where the power law is cleanest) from being outvoted by
/// the top of the window.
pub fn extract_vanishing_order_windowed(
    field: &FeField,
    lambda: f64,
    r_lo: f64,
    r_hi: f64,
    n_samples: usize,
) -> Result<VanishingOrder> {
    if !(r_lo > 0.0) || !(r_hi > r_lo) || n_samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "bad vanishing-order window [{r_lo}, {r_hi}] x {n_samples}"
        )));
    }
    let ratio = r_hi / r_lo;
    let radii: Vec<f64> = (0..n_samples)
        .map(|i| r_lo * ratio.powf(i as f64 / (n_samples - 1) as f64))
        .collect();
    let mut freqs = Vec::with_capacity(n_samples);
    for &r in &radii {
        let p = frequency_point(field, lambda, r)?;
        if p.frequency.is_finite() {
            freqs.push(p.frequency);
        }
    }
    if freqs.len() < 3 {
        return Err(Error::OrderUncertain(
            "too few radii with positive height".into(),
        ));
    }
    let nu = median(&mut freqs);
    let k_round = nu.round();
    if (nu - k_round).abs() > 0.25 || k_round < 1.0 {
        return Err(Error::OrderUncertain(format!(
            "median frequency {nu:.4} is not near a positive integer"
        )));
    }
    let k = k_round as u32;
    let mut coeffs = Vec::with_capacity(n_samples);
    for &r in &radii {
        let a = angular_coefficients(field, r, k as usize)?;
        coeffs.push(a[k as usize - 1] / r.powi(k as i32));
    }
    let spread = coeffs.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        - coeffs.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let c = median(&mut coeffs);
    Ok(VanishingOrder {
        k,
        c,
        fit_window: (r_lo, r_hi),
        fit_residual: spread,
        certified: c.abs() > 10.0 * spread,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

// ---------------------------------------------------------------------------
// Pohozaev and related inequality checks
// ---------------------------------------------------------------------------

/// Defect of the Pohozaev-type inequality at radius `r`:
///
///   int_{S_r^+} |grad phi|^2 ds
///     - 2 int_{S_r^+} (d phi / d nu)^2 ds
///     - (2 lambda / r) int_{clipped region} phi (grad phi . x) dx.
///
/// Nonnegative (up to discretization error in the gradient traces) for
/// eigenfunctions vanishing on the flat walls.
pub fn pohozaev_residual(field: &FeField, lambda: f64, r: f64) -> Result<f64> {
    let rule = clip_quadrature(field.mesh, r, 4)?;
    let mut trace_energy = 0.0;
    let mut normal_energy = 0.0;
    for (p, w) in &rule.arc {
        let g = field.grad(*p)?;
        let rad = (g[0] * p[0] + g[1] * p[1]) / r;
        trace_energy += w * (g[0] * g[0] + g[1] * g[1]);
        normal_energy += w * rad * rad;
    }
    let mut virial = 0.0;
    for (t, bary, w) in &rule.interior {
        let g = field.grad_bary(*t, *bary);
        let v = field.eval_bary(*t, *bary);
        let x = bary_point(field, *t, *bary);
        virial += w * v * (g[0] * x[0] + g[1] * x[1]);
    }
    Ok(trace_energy - 2.0 * normal_energy - 2.0 * lambda / r * virial)
}

/// Physical position of barycentric coordinates in cell `t` (straight map;
/// curved cells deviate by O(h^2), well below the quadrature tolerances of
/// the inequality checks).
fn bary_point(field: &FeField, t: usize, bary: [f64; 3]) -> [f64; 2] {
    let tri = field.mesh.triangles[t];
    let mut p = [0.0; 2];
    for i in 0..3 {
        let v = field.mesh.vertices[tri[i]];
        p[0] += bary[i] * v[0];
        p[1] += bary[i] * v[1];
    }
    p
}

/// Both sides of the half-ball Poincare-type inequality
/// (1/r^2) int_{B_r^+} u^2 <= int_{B_r^+} |grad u|^2 + (1/r) int_{S_r^+} u^2.
pub fn poincare_type_check(field: &FeField, r: f64) -> Result<(f64, f64)> {
    let rule = clip_quadrature(field.mesh, r, 4)?;
    let mut mass = 0.0;
    let mut energy = 0.0;
    for (t, bary, w) in &rule.interior {
        // Restrict to the half-ball: the clipped rule also covers the tube
        // on perturbed meshes.
        let p = bary_point(field, *t, *bary);
        if p[0] < 0.0 {
            continue;
        }
        let v = field.eval_bary(*t, *bary);
        let g = field.grad_bary(*t, *bary);
        mass += w * v * v;
        energy += w * (g[0] * g[0] + g[1] * g[1]);
    }
    let mut trace = 0.0;
    for (p, w) in &rule.arc {
        let v = field.eval(*p)?;
        trace += w * v * v;
    }
    Ok((mass / (r * r), energy + trace / r))
}

/// True when the sampled frequencies stay within the boundedness surrogate:
/// max_r N(r) <= 3 max(k, N at the largest radius).
pub fn frequency_bound_check(profile: &FrequencyProfile, k: u32) -> bool {
    let max_n = profile.max_frequency();
    let outer = profile.frequency_at_largest();
    if !max_n.is_finite() || !outer.is_finite() {
        return false;
    }
    max_n <= 3.0 * (k as f64).max(outer)
}

/// Faber-Krahn lower bound pi j_{0,1}^2 / |Omega| for the first Dirichlet
/// eigenvalue of a domain of the given area.
pub fn faber_krahn_lower_bound(area: f64) -> f64 {
    let j01 = 2.404825557695772769f64;
    std::f64::consts::PI * j01 * j01 / area
}
