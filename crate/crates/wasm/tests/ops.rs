//! Host-side tests for the JSON operations behind the demo page.

use serde_json::Value;
use tubespec_wasm::{eigen_heatmap_json, frequency_curve_json, mesh_preview_json};

#[test]
fn mesh_preview_returns_a_consistent_triangulation() {
    let out = mesh_preview_json(r#"{"shape":"perturbed","eps":0.15,"h":0.3}"#).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    let nv = v["vertices"].as_array().unwrap().len();
    let tris = v["triangles"].as_array().unwrap();
    assert!(nv > 20);
    assert!(!tris.is_empty());
    for t in tris {
        for idx in t.as_array().unwrap() {
            assert!((idx.as_u64().unwrap() as usize) < nv);
        }
    }
    assert!(!v["boundary"].as_array().unwrap().is_empty());
}

#[test]
fn heatmap_eigenvalue_is_near_the_half_disk_ground_state() {
    let out = eigen_heatmap_json(r#"{"shape":"unperturbed","h":0.15,"mode":0}"#).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    // First half-disk eigenvalue at R0 = 2 is (j_{1,1}/2)^2.
    let want = (3.831705970207512 / 2.0_f64).powi(2);
    let lambda = v["lambda"].as_f64().unwrap();
    assert!(
        (lambda - want).abs() / want < 0.05,
        "coarse P1 eigenvalue {lambda} too far from {want}"
    );
    let values: Vec<f64> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let peak = values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    assert!((peak - 1.0).abs() < 1e-12, "heatmap not normalized: {peak}");
    assert_eq!(values.len(), v["vertices"].as_array().unwrap().len());
}

#[test]
fn frequency_curve_of_the_first_mode_stays_near_one() {
    let out = frequency_curve_json(r#"{"shape":"unperturbed","h":0.15,"mode":0}"#).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    let radii = v["radii"].as_array().unwrap();
    let freq = v["frequency"].as_array().unwrap();
    assert_eq!(radii.len(), freq.len());
    assert!(
        radii[0].as_f64().unwrap() < radii[1].as_f64().unwrap(),
        "radii must come back ascending"
    );
    // The ground state vanishes to first order at the junction, so the
    // frequency approaches 1 at small radii.
    let inner = freq.first().unwrap().as_f64().unwrap();
    assert!((inner - 1.0).abs() < 0.1, "inner frequency {inner}");
}

#[test]
fn malformed_requests_are_rejected() {
    assert!(mesh_preview_json(r#"{"shape":"donut"}"#).is_err());
    assert!(mesh_preview_json(r#"{"shape":"perturbed","eps":0.5}"#).is_err());
    assert!(mesh_preview_json(r#"{"shape":"perturbed","twist":3}"#).is_err());
    assert!(mesh_preview_json("not json").is_err());
}
