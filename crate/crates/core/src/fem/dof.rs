//! Degree-of-freedom bookkeeping for linear and quadratic triangles.

use std::collections::HashSet;

use crate::geometry::{BoundaryTag, ElementOrder, Mesh};

/// Maps mesh entities to global degrees of freedom.
///
/// Linear meshes carry one dof per vertex; quadratic meshes append one dof
/// per canonical edge (the midside node), with positions from
/// `Mesh::midside_positions`, i.e. snapped onto the outer circle for
/// boundary arc edges. Local cell order: corners 0, 1, 2 then the midside
/// nodes opposite each corner.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub order: ElementOrder,
    pub n_dofs: usize,
    pub n_vertex_dofs: usize,
    /// Position of every dof (vertices first, then midside nodes).
    pub coords: Vec<[f64; 2]>,
    /// Canonical edges (only populated for quadratic maps).
    pub edges: Vec<[usize; 2]>,
    /// Global dofs per triangle; linear maps use the first three slots.
    pub cell_dofs: Vec<[usize; 6]>,
    /// True for cells whose midside nodes deviate from chord midpoints,
    /// requiring the isoparametric quadrature path.
    pub cell_curved: Vec<bool>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        match mesh.element_order {
            ElementOrder::P1 => {
                let n = mesh.vertices.len();
                let cell_dofs = mesh
                    .triangles
                    .iter()
                    .map(|t| [t[0], t[1], t[2], usize::MAX, usize::MAX, usize::MAX])
                    .collect();
                Self {
                    order: ElementOrder::P1,
                    n_dofs: n,
                    n_vertex_dofs: n,
                    coords: mesh.vertices.clone(),
                    edges: Vec::new(),
                    cell_dofs,
                    cell_curved: vec![false; mesh.triangles.len()],
                }
            }
            ElementOrder::P2 => {
                let (edges, tri_edges) = mesh.canonical_edges();
                let nv = mesh.vertices.len();
                let midside = mesh.midside_positions(&edges);
                let mut coords = mesh.vertices.clone();
                coords.extend_from_slice(&midside);
                let cell_dofs: Vec<[usize; 6]> = mesh
                    .triangles
                    .iter()
                    .zip(&tri_edges)
                    .map(|(t, te)| {
                        [
                            t[0],
                            t[1],
                            t[2],
                            nv + te[0],
                            nv + te[1],
                            nv + te[2],
                        ]
                    })
                    .collect();
                let cell_curved = cell_dofs
                    .iter()
                    .map(|cd| {
                        (0..3).any(|i| {
                            let a = coords[cd[(i + 1) % 3]];
                            let b = coords[cd[(i + 2) % 3]];
                            let m = coords[cd[3 + i]];
                            let dx = m[0] - 0.5 * (a[0] + b[0]);
                            let dy = m[1] - 0.5 * (a[1] + b[1]);
                            let scale = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                            (dx * dx + dy * dy).sqrt() > 1e-13 * scale.max(1e-300)
                        })
                    })
                    .collect();
                Self {
                    order: ElementOrder::P2,
                    n_dofs: nv + edges.len(),
                    n_vertex_dofs: nv,
                    coords,
                    edges,
                    cell_dofs,
                    cell_curved,
                }
            }
        }
    }

    pub fn dofs_per_cell(&self) -> usize {
        match self.order {
            ElementOrder::P1 => 3,
            ElementOrder::P2 => 6,
        }
    }

    /// Global dofs on boundary edges carrying any of `tags` (vertex dofs
    /// plus, for quadratic maps, the edge midside dofs), sorted.
    pub fn boundary_dofs(&self, mesh: &Mesh, tags: &[BoundaryTag]) -> Vec<usize> {
        let mut out: HashSet<usize> = HashSet::new();
        for be in &mesh.boundary_edges {
            if !tags.contains(&be.tag) {
                continue;
            }
            out.insert(be.v[0]);
            out.insert(be.v[1]);
            if self.order == ElementOrder::P2 {
                let key = [be.v[0].min(be.v[1]), be.v[0].max(be.v[1])];
                let e = self
                    .edges
                    .binary_search(&key)
                    .expect("boundary edge must be a mesh edge");
                out.insert(self.n_vertex_dofs + e);
            }
        }
        let mut v: Vec<usize> = out.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Midside dof of the undirected edge (a, b), if this is a quadratic map.
    pub fn edge_dof(&self, a: usize, b: usize) -> Option<usize> {
        if self.order == ElementOrder::P1 {
            return None;
        }
        self.edges
            .binary_search(&[a.min(b), a.max(b)])
            .ok()
            .map(|e| self.n_vertex_dofs + e)
    }

    /// Forward map to a free-dof numbering given constrained dofs (sorted or
    /// not); returns (map, number of free dofs).
    pub fn free_map(&self, constrained: &[usize]) -> (Vec<Option<usize>>, usize) {
        let cset: HashSet<usize> = constrained.iter().copied().collect();
        let mut map = vec![None; self.n_dofs];
        let mut next = 0usize;
        for (i, slot) in map.iter_mut().enumerate() {
            if !cset.contains(&i) {
                *slot = Some(next);
                next += 1;
            }
        }
        (map, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, generate_mesh, DomainSpec, GradingPolicy};

    #[test]
    fn quadratic_map_counts_vertices_plus_edges() {
        let b = build_domain(&DomainSpec::unperturbed(2.0)).unwrap();
        let policy = GradingPolicy {
            h_far: 0.4,
            h_junction: 0.2,
            grading_ratio: 1.5,
        };
        let mesh = generate_mesh(&b, &policy, ElementOrder::P2, 1).unwrap();
        let dofs = DofMap::new(&mesh);
        let (edges, _) = mesh.canonical_edges();
        assert_eq!(dofs.n_dofs, mesh.vertices.len() + edges.len());
        // Euler: V - E + F = 1 for a disk-like mesh.
        let euler =
            mesh.vertices.len() as i64 - edges.len() as i64 + mesh.triangles.len() as i64;
        assert_eq!(euler, 1);
        // Some cells at the arc are curved, interior cells are not.
        assert!(dofs.cell_curved.iter().any(|&c| c));
        assert!(dofs.cell_curved.iter().any(|&c| !c));
        // Curved cells all touch the outer circle.
        for (t, curved) in dofs.cell_curved.iter().enumerate() {
            if *curved {
                let touching = mesh.triangles[t].iter().any(|&v| {
                    let p = mesh.vertices[v];
                    ((p[0] * p[0] + p[1] * p[1]).sqrt() - 2.0).abs() < 1e-9
                });
                assert!(touching);
            }
        }
    }

    #[test]
    fn boundary_dofs_cover_edges_and_midsides() {
        let b = build_domain(&DomainSpec::unperturbed(2.0)).unwrap();
        let policy = GradingPolicy {
            h_far: 0.4,
            h_junction: 0.2,
            grading_ratio: 1.5,
        };
        let mesh = generate_mesh(&b, &policy, ElementOrder::P2, 1).unwrap();
        let dofs = DofMap::new(&mesh);
        let bd = dofs.boundary_dofs(&mesh, &[BoundaryTag::DirichletWall]);
        // Whole boundary is Dirichlet here: count = boundary vertices + edges.
        let n_bv = mesh.tagged_vertices(&[BoundaryTag::DirichletWall]).len();
        assert_eq!(bd.len(), n_bv + mesh.boundary_edges.len());
        let (map, n_free) = dofs.free_map(&bd);
        assert_eq!(n_free, dofs.n_dofs - bd.len());
        assert!(bd.iter().all(|&d| map[d].is_none()));
    }
}
