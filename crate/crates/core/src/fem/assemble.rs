//! Stiffness, mass, and boundary mass assembly.
//!
//! Elements are affine unless a quadratic cell has midside nodes off the
//! chord midpoints (arc-adjacent cells); those use the isoparametric
//! quadratic map with a degree-6 rule. Boundary mass on outer-arc edges is
//! integrated in the angle parameter with the exact arc length, so the total
//! boundary measure of an arc is reproduced to roundoff.

use super::dof::DofMap;
use super::sparse::SparseMatrix;
use super::WeightField;
use crate::geometry::quad::{triangle_rule, TriangleRule};
use crate::geometry::{BoundaryTag, ElementOrder, Mesh};

/// Values and reference gradients of the shape functions at a barycentric
/// point; `n` holds up to 6 entries, `dn` the gradients w.r.t. (xi, eta).
pub(crate) fn shape(order: ElementOrder, l: [f64; 3]) -> ([f64; 6], [[f64; 2]; 6], usize) {
    let (l0, l1, l2) = (l[0], l[1], l[2]);
    match order {
        ElementOrder::P1 => {
            let n = [l0, l1, l2, 0.0, 0.0, 0.0];
            let dn = [
                [-1.0, -1.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [0.0, 0.0],
                [0.0, 0.0],
                [0.0, 0.0],
            ];
            (n, dn, 3)
        }
        ElementOrder::P2 => {
            let n = [
                l0 * (2.0 * l0 - 1.0),
                l1 * (2.0 * l1 - 1.0),
                l2 * (2.0 * l2 - 1.0),
                4.0 * l1 * l2,
                4.0 * l2 * l0,
                4.0 * l0 * l1,
            ];
            let d0 = 4.0 * l0 - 1.0;
            let d1 = 4.0 * l1 - 1.0;
            let d2 = 4.0 * l2 - 1.0;
            let dn = [
                [-d0, -d0],
                [d1, 0.0],
                [0.0, d2],
                [4.0 * l2, 4.0 * l1],
                [-4.0 * l2, 4.0 * (l0 - l2)],
                [4.0 * (l0 - l1), -4.0 * l1],
            ];
            (n, dn, 6)
        }
    }
}

/// Node coordinates of a cell in local order.
fn cell_coords(dofs: &DofMap, t: usize) -> [[f64; 2]; 6] {
    let mut x = [[0.0; 2]; 6];
    let nd = dofs.dofs_per_cell();
    for i in 0..nd {
        x[i] = dofs.coords[dofs.cell_dofs[t][i]];
    }
    x
}

/// Element stiffness and weighted mass for cell `t`.
pub(crate) fn element_matrices(
    mesh: &Mesh,
    dofs: &DofMap,
    t: usize,
    weight: &WeightField,
    rule: &TriangleRule,
) -> ([[f64; 6]; 6], [[f64; 6]; 6]) {
    let x = cell_coords(dofs, t);
    let nd = dofs.dofs_per_cell();
    let curved = dofs.cell_curved[t];
    let mut ke = [[0.0; 6]; 6];
    let mut me = [[0.0; 6]; 6];
    if !curved {
        // Affine geometry: constant Jacobian from the corner triangle.
        let j = [
            [x[1][0] - x[0][0], x[2][0] - x[0][0]],
            [x[1][1] - x[0][1], x[2][1] - x[0][1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_t = [
            [j[1][1] / det, -j[1][0] / det],
            [-j[0][1] / det, j[0][0] / det],
        ];
        let area_fac = det.abs();
        for (lp, w) in rule.points.iter().zip(&rule.weights) {
            let (n, dn, _) = shape(dofs.order, *lp);
            let mut g = [[0.0; 2]; 6];
            for i in 0..nd {
                g[i][0] = inv_t[0][0] * dn[i][0] + inv_t[0][1] * dn[i][1];
                g[i][1] = inv_t[1][0] * dn[i][0] + inv_t[1][1] * dn[i][1];
            }
            let mut p = [0.0; 2];
            for i in 0..nd {
                p[0] += n[i] * x[i][0];
                p[1] += n[i] * x[i][1];
            }
            let pw = weight.eval(p);
            // Factor 1/2: rule weights sum to 1, reference area is 1/2.
            let wq = 0.5 * w * area_fac;
            for a in 0..nd {
                for b in 0..nd {
                    ke[a][b] += wq * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    me[a][b] += wq * pw * n[a] * n[b];
                }
            }
        }
    } else {
        for (lp, w) in rule.points.iter().zip(&rule.weights) {
            let (n, dn, _) = shape(dofs.order, *lp);
            let mut j = [[0.0; 2]; 2];
            let mut p = [0.0; 2];
            for i in 0..nd {
                j[0][0] += dn[i][0] * x[i][0];
                j[0][1] += dn[i][1] * x[i][0];
                j[1][0] += dn[i][0] * x[i][1];
                j[1][1] += dn[i][1] * x[i][1];
                p[0] += n[i] * x[i][0];
                p[1] += n[i] * x[i][1];
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let inv_t = [
                [j[1][1] / det, -j[1][0] / det],
                [-j[0][1] / det, j[0][0] / det],
            ];
            let mut g = [[0.0; 2]; 6];
            for i in 0..nd {
                g[i][0] = inv_t[0][0] * dn[i][0] + inv_t[0][1] * dn[i][1];
                g[i][1] = inv_t[1][0] * dn[i][0] + inv_t[1][1] * dn[i][1];
            }
            let pw = weight.eval(p);
            let wq = 0.5 * w * det.abs();
            for a in 0..nd {
                for b in 0..nd {
                    ke[a][b] += wq * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    me[a][b] += wq * pw * n[a] * n[b];
                }
            }
        }
    }
    let _ = mesh;
    (ke, me)
}

fn quad_degree(dofs: &DofMap, weighted: bool) -> usize {
    match (dofs.order, weighted) {
        (ElementOrder::P1, false) => 2,
        _ => 6,
    }
}

fn assemble_pair(
    mesh: &Mesh,
    dofs: &DofMap,
    weight: &WeightField,
) -> (SparseMatrix, SparseMatrix) {
    let weighted = !matches!(weight, WeightField::ConstantOne);
    let rule = triangle_rule(quad_degree(dofs, weighted));
    let nd = dofs.dofs_per_cell();
    let per_cell = |t: usize| -> (Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>) {
        let (ke, me) = element_matrices(mesh, dofs, t, weight, &rule);
        let cd = &dofs.cell_dofs[t];
        let mut tk = Vec::with_capacity(nd * nd);
        let mut tm = Vec::with_capacity(nd * nd);
        for a in 0..nd {
            for b in 0..nd {
                tk.push((cd[a], cd[b], ke[a][b]));
                tm.push((cd[a], cd[b], me[a][b]));
            }
        }
        (tk, tm)
    };
    #[cfg(feature = "parallel")]
    let cells: Vec<_> = {
        use rayon::prelude::*;
        (0..mesh.triangles.len())
            .into_par_iter()
            .map(per_cell)
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells: Vec<_> = (0..mesh.triangles.len()).map(per_cell).collect();
    let mut tk = Vec::with_capacity(nd * nd * mesh.triangles.len());
    let mut tm = Vec::with_capacity(nd * nd * mesh.triangles.len());
    for (a, b) in cells {
        tk.extend_from_slice(&a);
        tm.extend_from_slice(&b);
    }
    (
        SparseMatrix::from_triplets(dofs.n_dofs, dofs.n_dofs, &tk),
        SparseMatrix::from_triplets(dofs.n_dofs, dofs.n_dofs, &tm),
    )
}

/// Assembles the stiffness matrix (Dirichlet energy form).
pub fn assemble_stiffness(mesh: &Mesh, dofs: &DofMap) -> SparseMatrix {
    assemble_pair(mesh, dofs, &WeightField::ConstantOne).0
}

/// Assembles the mass matrix weighted by `p`.
pub fn assemble_mass(mesh: &Mesh, dofs: &DofMap, weight: &WeightField) -> SparseMatrix {
    assemble_pair(mesh, dofs, weight).1
}

/// Assembles both forms in one sweep.
pub fn assemble_forms(
    mesh: &Mesh,
    dofs: &DofMap,
    weight: &WeightField,
) -> (SparseMatrix, SparseMatrix) {
    assemble_pair(mesh, dofs, weight)
}

/// Boundary mass matrix on edges carrying any of `tags`. Straight edges use
/// the chord length, arc edges on the outer circle the exact arc length.
pub fn assemble_boundary_mass(
    mesh: &Mesh,
    dofs: &DofMap,
    tags: &[BoundaryTag],
) -> SparseMatrix {
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for be in &mesh.boundary_edges {
        if !tags.contains(&be.tag) {
            continue;
        }
        let (a, b) = (be.v[0], be.v[1]);
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[b];
        let len = if mesh.edge_on_outer_circle(a, b) {
            let r = mesh.outer_radius.unwrap();
            let ta = pa[0].atan2(pa[1]);
            let tb = pb[0].atan2(pb[1]);
            r * (tb - ta).abs()
        } else {
            ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt()
        };
        match dofs.order {
            ElementOrder::P1 => {
                let m = len / 6.0;
                triplets.extend_from_slice(&[
                    (a, a, 2.0 * m),
                    (a, b, m),
                    (b, a, m),
                    (b, b, 2.0 * m),
                ]);
            }
            ElementOrder::P2 => {
                let mid = dofs.edge_dof(a, b).expect("boundary edge has midside dof");
                // 1-D quadratic mass matrix on a segment of length `len`
                // with end nodes a, b and midside node: len/30 * [[4,-1,2],
                // [-1,4,2],[2,2,16]].
                let m = len / 30.0;
                let idx = [a, b, mid];
                let local = [[4.0, -1.0, 2.0], [-1.0, 4.0, 2.0], [2.0, 2.0, 16.0]];
                for i in 0..3 {
                    for j in 0..3 {
                        triplets.push((idx[i], idx[j], m * local[i][j]));
                    }
                }
            }
        }
    }
    SparseMatrix::from_triplets(dofs.n_dofs, dofs.n_dofs, &triplets)
}

/// Dirichlet energy of `u` restricted to cells whose centroid satisfies
/// `region`.
pub fn energy_in_region(
    mesh: &Mesh,
    dofs: &DofMap,
    u: &[f64],
    region: impl Fn([f64; 2]) -> bool,
) -> f64 {
    let rule = triangle_rule(quad_degree(dofs, false));
    let mut acc = 0.0;
    for t in 0..mesh.triangles.len() {
        let [i, j, k] = mesh.triangles[t];
        let c = [
            (mesh.vertices[i][0] + mesh.vertices[j][0] + mesh.vertices[k][0]) / 3.0,
            (mesh.vertices[i][1] + mesh.vertices[j][1] + mesh.vertices[k][1]) / 3.0,
        ];
        if !region(c) {
            continue;
        }
        let (ke, _) = element_matrices(mesh, dofs, t, &WeightField::ConstantOne, &rule);
        let cd = &dofs.cell_dofs[t];
        let nd = dofs.dofs_per_cell();
        for a in 0..nd {
            for b in 0..nd {
                acc += u[cd[a]] * ke[a][b] * u[cd[b]];
            }
        }
    }
    acc
}
