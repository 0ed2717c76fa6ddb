//! Property tests for the invariants the pipeline stages lean on: mesh
//! conformity and orientation, clipped-quadrature monotonicity, scaling
//! behaviour of the frequency quantities, the discrete inequalities, power-law
//! fit recovery, and exact mesh serialization.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use once_cell::sync::Lazy;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubespec_core::almgren::{frequency_point, poincare_type_check, tube_poincare_check};
use tubespec_core::asymptotics::{fit_rate_and_constant, max_on_unit_sphere};
use tubespec_core::exterior::{hardy_2d_check, hardy_smooth_bump};
use tubespec_core::fem::{DofMap, FeField, SolverConfig};
use tubespec_core::geometry::{
    build_domain, clip_quadrature, generate_mesh, read_mesh, write_mesh, DomainSpec, ElementOrder,
    GradingPolicy, Mesh,
};
use tubespec_core::spectral::{solve_dirichlet_modes, DirichletModes};

// ---------------------------------------------------------------------------
// shared fixtures

/// Coarse quadratic half-disk mesh shared by the quadrature and field tests.
static DISK: Lazy<Mesh> = Lazy::new(|| {
    let boundary = build_domain(&DomainSpec::unperturbed(2.0)).expect("boundary");
    let policy = GradingPolicy::new(0.25, 0.06, 1.5).expect("policy");
    generate_mesh(&boundary, &policy, ElementOrder::P2, 7).expect("mesh")
});

/// Dof map of the shared mesh.
static DOFS: Lazy<DofMap> = Lazy::new(|| DofMap::new(&DISK));

/// Three lowest modes of the shared mesh, used by the scaling test.
static MODES: Lazy<DirichletModes> = Lazy::new(|| {
    let cfg = SolverConfig {
        num_eigs: 3,
        ..SolverConfig::default()
    };
    solve_dirichlet_modes(&DISK, &cfg).expect("modes")
});

/// Sum of the interior quadrature weights: the clipped area.
fn clipped_area(mesh: &Mesh, r: f64) -> f64 {
    let rule = clip_quadrature(mesh, r, 2).expect("clip rule");
    rule.interior.iter().map(|(_, _, w)| w).sum()
}

// ---------------------------------------------------------------------------
// meshing

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    /// Every generated mesh is a conforming triangulation with positively
    /// oriented triangles, and its rim (edges adjacent to exactly one
    /// triangle) is exactly the set of tagged boundary edges.
    #[test]
    fn meshes_are_conforming_and_positively_oriented(
        h_far in 0.2f64..0.45,
        seed in 0u64..1000,
        shape in 0usize..3,
    ) {
        let spec = match shape {
            0 => DomainSpec::unperturbed(2.0),
            1 => DomainSpec::perturbed(2.0, 0.15),
            _ => DomainSpec::exterior_truncated(3.0),
        };
        let boundary = build_domain(&spec).unwrap();
        let policy = GradingPolicy::new(h_far, h_far / 4.0, 1.5).unwrap();
        let mesh = generate_mesh(&boundary, &policy, ElementOrder::P1, seed).unwrap();

        let n = mesh.vertices.len();
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &mesh.triangles {
            prop_assert!(t.iter().all(|&v| v < n), "vertex index out of bounds");
            let a = mesh.vertices[t[0]];
            let b = mesh.vertices[t[1]];
            let c = mesh.vertices[t[2]];
            let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            prop_assert!(cross > 0.0, "triangle not positively oriented");
            for (p, q) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *counts.entry((p.min(q), p.max(q))).or_insert(0) += 1;
            }
        }
        for (&edge, &c) in &counts {
            prop_assert!(c <= 2, "edge {edge:?} shared by {c} triangles");
        }
        let rim: HashSet<(usize, usize)> = counts
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&e, _)| e)
            .collect();
        let tagged: HashSet<(usize, usize)> = mesh
            .boundary_edges
            .iter()
            .map(|be| (be.v[0].min(be.v[1]), be.v[0].max(be.v[1])))
            .collect();
        prop_assert_eq!(rim, tagged, "rim and tagged boundary disagree");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, .. ProptestConfig::default() })]

    /// Serializing, parsing, and re-serializing a mesh is the identity on the
    /// text format, for both element orders.
    #[test]
    fn mesh_roundtrip_is_exact(seed in 0u64..1000, quadratic in any::<bool>()) {
        let spec = if seed % 2 == 0 {
            DomainSpec::unperturbed(2.0)
        } else {
            DomainSpec::perturbed(2.0, 0.12)
        };
        let order = if quadratic { ElementOrder::P2 } else { ElementOrder::P1 };
        let boundary = build_domain(&spec).unwrap();
        let policy = GradingPolicy::new(0.3, 0.08, 1.5).unwrap();
        let mesh = generate_mesh(&boundary, &policy, order, seed).unwrap();

        let mut first = Vec::new();
        write_mesh(&mesh, &mut first).unwrap();
        let reread = read_mesh(first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_mesh(&reread, &mut second).unwrap();
        prop_assert_eq!(first, second, "round-trip changed the serialization");
    }
}

// ---------------------------------------------------------------------------
// clipped quadrature

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    /// The clipped area grows with the radius, stays below the half-ball
    /// area, and every quadrature weight is positive.
    #[test]
    fn clipped_area_is_monotone_and_bounded(r_lo in 0.15f64..1.85, bump in 0.01f64..0.5) {
        let r_hi = (r_lo + bump).min(1.9);
        let area_lo = clipped_area(&DISK, r_lo);
        let area_hi = clipped_area(&DISK, r_hi);
        prop_assert!(area_lo > 0.0);
        prop_assert!(area_lo <= area_hi + 1e-12, "area shrank: {area_lo} > {area_hi}");
        let half_ball = 0.5 * std::f64::consts::PI * r_lo * r_lo;
        prop_assert!(
            area_lo <= half_ball * (1.0 + 1e-6),
            "clipped area {area_lo} exceeds half-ball {half_ball}"
        );

        let rule = clip_quadrature(&DISK, r_lo, 2).unwrap();
        prop_assert!(rule.interior.iter().all(|(_, _, w)| *w > 0.0));
        prop_assert!(rule.arc.iter().all(|(_, w)| *w > 0.0));
    }
}

// ---------------------------------------------------------------------------
// frequency scaling

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, .. ProptestConfig::default() })]

    /// E(r) and H(r) are quadratic under field scaling and the frequency is
    /// invariant, so the vanishing-order extraction cannot depend on the
    /// eigenfunction normalization.
    #[test]
    fn frequency_is_invariant_under_field_scaling(
        alpha in 0.05f64..20.0,
        r in 0.3f64..1.5,
        j in 0usize..3,
    ) {
        let lambda = MODES.pairs[j].lambda;
        let base = MODES.field(&DISK, j).unwrap();
        let p0 = frequency_point(&base, lambda, r).unwrap();

        let scaled_values: Vec<f64> = MODES.pairs[j].vector.iter().map(|v| alpha * v).collect();
        let scaled = FeField::new(&DISK, &MODES.dofs, scaled_values).unwrap();
        let p1 = frequency_point(&scaled, lambda, r).unwrap();

        let a2 = alpha * alpha;
        prop_assert!((p1.height - a2 * p0.height).abs() <= 1e-10 * a2 * p0.height.abs());
        prop_assert!((p1.energy - a2 * p0.energy).abs() <= 1e-9 * a2 * p0.energy.abs().max(1e-30));
        prop_assert!(
            (p1.frequency - p0.frequency).abs() <= 1e-9 * p0.frequency.abs(),
            "frequency moved under scaling: {} vs {}", p0.frequency, p1.frequency
        );
    }
}

// ---------------------------------------------------------------------------
// inequalities

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, .. ProptestConfig::default() })]

    /// The half-ball Poincare-type bound holds for arbitrary nodal data, not
    /// just eigenfunctions.
    #[test]
    fn poincare_bound_holds_for_random_nodal_fields(seed in any::<u64>(), r in 0.4f64..1.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..DOFS.coords.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let field = FeField::new(&DISK, &DOFS, values).unwrap();
        let (lhs, rhs) = poincare_type_check(&field, r).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "bound violated: {lhs} > {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, .. ProptestConfig::default() })]

    /// The rescaled-tube Poincare bound holds for separable trial fields of
    /// any longitudinal wavenumber and half-width.
    #[test]
    fn tube_bound_holds_for_separable_fields(eps in 0.03f64..0.25, p in 1i32..4) {
        let pi = std::f64::consts::PI;
        let u = move |x: [f64; 2]| {
            (p as f64 * pi * (x[0] + 1.0)).sin() * (pi * x[1] / (2.0 * eps)).cos()
        };
        let grad = move |x: [f64; 2]| {
            [
                p as f64 * pi * (p as f64 * pi * (x[0] + 1.0)).cos()
                    * (pi * x[1] / (2.0 * eps)).cos(),
                -pi / (2.0 * eps)
                    * (p as f64 * pi * (x[0] + 1.0)).sin()
                    * (pi * x[1] / (2.0 * eps)).sin(),
            ]
        };
        let (mass, bound, _) = tube_poincare_check(u, grad, eps).unwrap();
        prop_assert!(mass <= bound, "tube bound violated: {mass} > {bound}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    /// The planar Hardy inequality holds for smooth bumps of any support.
    #[test]
    fn hardy_bound_holds_for_smooth_bumps(lo in 0.3f64..2.0, width in 0.5f64..2.5) {
        let hi = lo + width;
        let (rho, drho) = hardy_smooth_bump(lo, hi);
        let (lhs, rhs) = hardy_2d_check(rho, drho, (lo, hi)).unwrap();
        prop_assert!(lhs <= rhs, "Hardy bound violated: {lhs} > {rhs}");
    }
}

// ---------------------------------------------------------------------------
// fitting

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, .. ProptestConfig::default() })]

    /// On synthetic data `C eps^{2k} (1 + b eps)` the fit recovers the rate
    /// and the Richardson-corrected constant, and stays put when the largest
    /// width is dropped.
    #[test]
    fn sweep_fit_recovers_synthetic_power_data(
        k in 1u32..3,
        c in 0.3f64..8.0,
        b in 0.0f64..0.5,
        ratio in 1.25f64..1.9,
        eps0 in 0.15f64..0.3,
    ) {
        let eps: Vec<f64> = (0..6).map(|i| eps0 / ratio.powi(i)).collect();
        let diffs: Vec<f64> = eps
            .iter()
            .map(|&e| c * e.powi(2 * k as i32) * (1.0 + b * e))
            .collect();

        let fit = fit_rate_and_constant(k, &eps, &diffs, 4).unwrap();
        prop_assert!(
            (fit.constant - c).abs() <= 1e-8 * c,
            "constant {} differs from {c}", fit.constant
        );
        prop_assert!((fit.slope - 2.0 * k as f64).abs() <= 1e-6);
        prop_assert!(fit.residual <= 1e-10);

        let refit = fit_rate_and_constant(k, &eps[1..], &diffs[1..], 4).unwrap();
        prop_assert!(
            (refit.constant - fit.constant).abs() <= 1e-8 * c,
            "dropping the largest width moved the constant: {} vs {}",
            refit.constant,
            fit.constant
        );
    }
}

// ---------------------------------------------------------------------------
// quadratic forms

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    /// The sphere maximum of a symmetric matrix is invariant under rotation
    /// of the coordinate frame.
    #[test]
    fn sphere_maximum_is_rotation_invariant(
        entries in proptest::array::uniform6(-5.0f64..5.0),
        theta in 0.0f64..std::f64::consts::TAU,
        plane in 0usize..3,
    ) {
        let m = DMatrix::from_row_slice(3, 3, &[
            entries[0], entries[3], entries[4],
            entries[3], entries[1], entries[5],
            entries[4], entries[5], entries[2],
        ]);
        let (i, j) = [(0, 1), (0, 2), (1, 2)][plane];
        let mut g = DMatrix::identity(3, 3);
        g[(i, i)] = theta.cos();
        g[(j, j)] = theta.cos();
        g[(i, j)] = -theta.sin();
        g[(j, i)] = theta.sin();

        let rotated = &g * &m * g.transpose();
        let max0 = max_on_unit_sphere(&m).unwrap();
        let max1 = max_on_unit_sphere(&rotated).unwrap();
        prop_assert!(
            (max0 - max1).abs() <= 1e-9 * (1.0 + max0.abs()),
            "sphere maximum moved under rotation: {max0} vs {max1}"
        );
    }
}
