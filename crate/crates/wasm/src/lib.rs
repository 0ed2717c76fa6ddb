//! Browser bindings for the shrinking-tube demo page.
//!
//! Three JSON-in/JSON-out operations back the static page in `www/`: a mesh
//! preview, a coarse eigenfunction heatmap, and a frequency curve for the
//! junction diagnostics. The `*_json` functions are plain Rust so the whole
//! crate also compiles and tests on the host; the `#[wasm_bindgen]` exports
//! are one-line wrappers.
//!
//! Requests keep the demo small on purpose: element order is fixed to P1 and
//! mesh sizes are clamped to coarse values, which the conjugate-gradient
//! fallback solves comfortably inside a browser tab.

use serde::{Deserialize, Serialize};
use tubespec_core::almgren::frequency_profile;
use tubespec_core::fem::SolverConfig;
use tubespec_core::geometry::{build_domain, generate_mesh, DomainSpec, ElementOrder, GradingPolicy};
use tubespec_core::spectral::solve_dirichlet_modes;
use wasm_bindgen::prelude::*;

// ---------------------------------------------------------------------------
// Requests and responses
// ---------------------------------------------------------------------------

/// Domain requested by the page.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRequest {
    /// "unperturbed", "perturbed", or "exterior".
    shape: String,
    #[serde(default = "default_r0")]
    r0: f64,
    /// Tube half-width; used by "perturbed" only.
    #[serde(default = "default_eps")]
    eps: f64,
    /// Far-field mesh size, clamped to [0.08, 0.6].
    #[serde(default = "default_h")]
    h: f64,
    /// 0-based eigenmode index, clamped to 0..=5.
    #[serde(default)]
    mode: usize,
}

fn default_r0() -> f64 {
    2.0
}
fn default_eps() -> f64 {
    0.15
}
fn default_h() -> f64 {
    0.3
}

#[derive(Debug, Serialize)]
struct MeshPreview {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
struct Heatmap {
    lambda: f64,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    /// One nodal value per vertex, scaled to max |value| = 1.
    values: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct FrequencyCurve {
    lambda: f64,
    radii: Vec<f64>,
    frequency: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Host-testable operations
// ---------------------------------------------------------------------------

fn parse_request(request: &str) -> Result<(DomainRequest, DomainSpec, GradingPolicy), String> {
    let mut req: DomainRequest =
        serde_json::from_str(request).map_err(|e| format!("bad request: {e}"))?;
    req.h = req.h.clamp(0.08, 0.6);
    req.mode = req.mode.min(5);
    if !(req.r0 >= 1.0 && req.r0 <= 4.0) {
        return Err(format!("r0 must lie in [1, 4], got {}", req.r0));
    }
    let spec = match req.shape.as_str() {
        "unperturbed" => DomainSpec::unperturbed(req.r0),
        "perturbed" => {
            if !(req.eps >= 0.02 && req.eps <= 0.3) {
                return Err(format!("eps must lie in [0.02, 0.3], got {}", req.eps));
            }
            DomainSpec::perturbed(req.r0, req.eps)
        }
        "exterior" => DomainSpec::exterior_truncated(req.r0.max(2.0)),
        other => return Err(format!("unknown shape \"{other}\"")),
    };
    let policy = GradingPolicy::new(req.h, (req.h / 4.0).max(0.02), 1.5)
        .map_err(|e| e.to_string())?;
    Ok((req, spec, policy))
}

/// Triangulation of the requested domain for canvas rendering.
pub fn mesh_preview_json(request: &str) -> Result<String, String> {
    let (_, spec, policy) = parse_request(request)?;
    let boundary = build_domain(&spec).map_err(|e| e.to_string())?;
    let mesh = generate_mesh(&boundary, &policy, ElementOrder::P1, 7).map_err(|e| e.to_string())?;
    let preview = MeshPreview {
        vertices: mesh.vertices.clone(),
        triangles: mesh.triangles.clone(),
        boundary: mesh.boundary_edges.iter().map(|b| b.v).collect(),
    };
    serde_json::to_string(&preview).map_err(|e| e.to_string())
}

/// Nodal heatmap of one Dirichlet eigenfunction on a coarse P1 mesh.
pub fn eigen_heatmap_json(request: &str) -> Result<String, String> {
    let (req, spec, policy) = parse_request(request)?;
    let boundary = build_domain(&spec).map_err(|e| e.to_string())?;
    let mesh = generate_mesh(&boundary, &policy, ElementOrder::P1, 7).map_err(|e| e.to_string())?;
    let solver = SolverConfig {
        num_eigs: req.mode + 2,
        ..SolverConfig::default()
    };
    let modes = solve_dirichlet_modes(&mesh, &solver).map_err(|e| e.to_string())?;
    let pair = &modes.pairs[req.mode];
    // P1 dofs are exactly the vertices, in order.
    let mut values: Vec<f64> = pair.vector[..mesh.vertices.len()].to_vec();
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if peak > 0.0 {
        for v in &mut values {
            *v /= peak;
        }
    }
    let heatmap = Heatmap {
        lambda: pair.lambda,
        vertices: mesh.vertices.clone(),
        triangles: mesh.triangles.clone(),
        values,
    };
    serde_json::to_string(&heatmap).map_err(|e| e.to_string())
}

/// Frequency curve of the selected eigenfunction near the junction.
pub fn frequency_curve_json(request: &str) -> Result<String, String> {
    let (req, spec, policy) = parse_request(request)?;
    let boundary = build_domain(&spec).map_err(|e| e.to_string())?;
    let mesh = generate_mesh(&boundary, &policy, ElementOrder::P1, 7).map_err(|e| e.to_string())?;
    let solver = SolverConfig {
        num_eigs: req.mode + 2,
        ..SolverConfig::default()
    };
    let modes = solve_dirichlet_modes(&mesh, &solver).map_err(|e| e.to_string())?;
    let field = modes.field(&mesh, req.mode).map_err(|e| e.to_string())?;
    let lo = 0.1 * req.r0;
    let hi = 0.5 * req.r0;
    let n = 12;
    let radii: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let eps = spec.eps.unwrap_or(0.0);
    let profile = frequency_profile(&field, modes.pairs[req.mode].lambda, eps, &radii)
        .map_err(|e| e.to_string())?;
    // The profile sorts radii descending; the page plots them ascending.
    let mut points: Vec<(f64, f64)> = profile.points.iter().map(|p| (p.r, p.frequency)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let curve = FrequencyCurve {
        lambda: profile.lambda,
        radii: points.iter().map(|p| p.0).collect(),
        frequency: points.iter().map(|p| p.1).collect(),
    };
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// wasm exports
// ---------------------------------------------------------------------------

fn to_js(result: Result<String, String>) -> Result<String, JsValue> {
    result.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mesh_preview(request: &str) -> Result<String, JsValue> {
    to_js(mesh_preview_json(request))
}

#[wasm_bindgen]
pub fn eigen_heatmap(request: &str) -> Result<String, JsValue> {
    to_js(eigen_heatmap_json(request))
}

#[wasm_bindgen]
pub fn frequency_curve(request: &str) -> Result<String, JsValue> {
    to_js(frequency_curve_json(request))
}
