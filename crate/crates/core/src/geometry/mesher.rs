//! Deterministic graded mesh generation on a constrained Delaunay core.
//!
//! The pipeline: adaptively subdivide the boundary loop and internal chains
//! against the sizing field, fill the interior with quadtree cell centers
//! (position-hashed jitter, clearance-tested against the fixed points),
//! triangulate with the chains as constraints, discard triangles outside the
//! loop, relax interior points with a few Laplacian passes, and split
//! ill-shaped triangles by circumcenter insertion. Every step is a pure
//! function of the boundary, policy, and seed, so equal inputs reproduce
//! bit-identical meshes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::delaunay::{triangulate, NearestSet};
use super::sizing::SizingField;
use super::{
    BoundaryEdge, BoundaryPiece, BoundaryTag, ElementOrder, GradingPolicy, Mesh,
    PiecewiseBoundary,
};
use crate::error::{Error, Result};

/// Knobs for [`generate_mesh_with`].
#[derive(Debug, Clone)]
pub struct MeshOptions {
    pub order: ElementOrder,
    pub seed: u64,
    /// Maximum triangle count before the mesher gives up.
    pub budget: usize,
    pub smoothing_passes: usize,
    /// When set, smoothing only moves points within this disk, keeping the
    /// rest of the point cloud bitwise comparable across related meshes.
    pub smoothing_zone: Option<([f64; 2], f64)>,
    pub quality_rounds: usize,
    pub max_aspect: f64,
}

impl MeshOptions {
    pub fn new(order: ElementOrder, seed: u64) -> Self {
        Self {
            order,
            seed,
            budget: 2_000_000,
            smoothing_passes: 2,
            smoothing_zone: None,
            quality_rounds: 8,
            max_aspect: 8.0,
        }
    }
}

/// Generates a graded mesh with default options.
pub fn generate_mesh(
    boundary: &PiecewiseBoundary,
    policy: &GradingPolicy,
    order: ElementOrder,
    seed: u64,
) -> Result<Mesh> {
    generate_mesh_with(boundary, policy, &MeshOptions::new(order, seed))
}

// ---------------------------------------------------------------------------
// point-in-polygon test with y-binned edges
// ---------------------------------------------------------------------------

struct InsideTest {
    y_min: f64,
    inv_bin: f64,
    bins: Vec<Vec<([f64; 2], [f64; 2])>>,
}

impl InsideTest {
    fn new(loop_points: &[[f64; 2]]) -> Self {
        let y_min = loop_points.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let y_max = loop_points
            .iter()
            .map(|p| p[1])
            .fold(f64::NEG_INFINITY, f64::max);
        let n_bins = 256usize;
        let span = (y_max - y_min).max(1e-300);
        let inv_bin = n_bins as f64 / span;
        let mut bins = vec![Vec::new(); n_bins];
        let n = loop_points.len();
        for i in 0..n {
            let a = loop_points[i];
            let b = loop_points[(i + 1) % n];
            if a[1] == b[1] {
                continue;
            }
            let lo = a[1].min(b[1]);
            let hi = a[1].max(b[1]);
            let b0 = (((lo - y_min) * inv_bin).floor() as isize).clamp(0, n_bins as isize - 1);
            let b1 = (((hi - y_min) * inv_bin).floor() as isize).clamp(0, n_bins as isize - 1);
            for bin in &mut bins[b0 as usize..=b1 as usize] {
                bin.push((a, b));
            }
        }
        Self { y_min, inv_bin, bins }
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        let bi = ((p[1] - self.y_min) * self.inv_bin).floor();
        if bi < 0.0 || bi >= self.bins.len() as f64 {
            return false;
        }
        let mut crossings = 0u32;
        for (a, b) in &self.bins[bi as usize] {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x_int = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if x_int > p[0] {
                    crossings += 1;
                }
            }
        }
        crossings % 2 == 1
    }
}

// ---------------------------------------------------------------------------
// boundary subdivision
// ---------------------------------------------------------------------------

fn subdivide_piece(piece: &BoundaryPiece, sizing: &SizingField) -> Vec<[f64; 2]> {
    fn rec(
        piece: &BoundaryPiece,
        t0: f64,
        t1: f64,
        depth: u32,
        sizing: &SizingField,
        out: &mut Vec<[f64; 2]>,
    ) {
        let p0 = piece.point(t0);
        let p1 = piece.point(t1);
        let chord = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
        let tm = 0.5 * (t0 + t1);
        if depth < 30 && chord > sizing.h(piece.point(tm)) {
            rec(piece, t0, tm, depth + 1, sizing, out);
            rec(piece, tm, t1, depth + 1, sizing, out);
        } else {
            out.push(p0);
        }
    }
    let mut out = Vec::new();
    rec(piece, 0.0, 1.0, 0, sizing, &mut out);
    out
}

fn subdivide_chain(a: [f64; 2], b: [f64; 2], sizing: &SizingField) -> Vec<[f64; 2]> {
    let piece = BoundaryPiece::Segment {
        a,
        b,
        tag: BoundaryTag::DirichletWall,
    };
    let mut pts = subdivide_piece(&piece, sizing);
    pts.push(b);
    pts
}

// ---------------------------------------------------------------------------
// interior fill
// ---------------------------------------------------------------------------

fn leaf_hash(seed: u64, ix: i64, iy: i64, depth: u32) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [ix as u64, iy as u64, depth as u64] {
        h ^= v.wrapping_mul(0xff51_afd7_ed55_8ccd);
        h = h.rotate_left(27).wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    }
    h ^ (h >> 31)
}

struct FillContext<'a> {
    sizing: &'a SizingField,
    inside: &'a InsideTest,
    fixed: &'a NearestSet,
    seed: u64,
    bbox: [f64; 4],
    budget: usize,
    points: Vec<[f64; 2]>,
}

impl FillContext<'_> {
    fn visit(&mut self, cx: f64, cy: f64, half: f64, ix: i64, iy: i64, depth: u32) -> Result<()> {
        // Prune cells that cannot intersect the domain bounding box.
        if cx + half < self.bbox[0]
            || cx - half > self.bbox[1]
            || cy + half < self.bbox[2]
            || cy - half > self.bbox[3]
        {
            return Ok(());
        }
        let width = 2.0 * half;
        if depth < 26 && width > self.sizing.h([cx, cy]) {
            let q = 0.5 * half;
            for (dx, dy, jx, jy) in [
                (-q, -q, 0i64, 0i64),
                (q, -q, 1, 0),
                (-q, q, 0, 1),
                (q, q, 1, 1),
            ] {
                self.visit(cx + dx, cy + dy, q, ix * 2 + jx, iy * 2 + jy, depth + 1)?;
            }
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(leaf_hash(self.seed, ix, iy, depth));
        let jx: f64 = rng.gen_range(-1.0..1.0);
        let jy: f64 = rng.gen_range(-1.0..1.0);
        let p = [cx + 0.1 * width * jx, cy + 0.1 * width * jy];
        if !self.inside.contains(p) {
            return Ok(());
        }
        let h = self.sizing.h(p);
        if let Some((_, d)) = self.fixed.nearest(p) {
            if d < 0.55 * h {
                return Ok(());
            }
        }
        if self.points.len() > self.budget {
            return Err(Error::MeshBudget {
                elements: 2 * self.points.len(),
                budget: self.budget * 2,
            });
        }
        self.points.push(p);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// geometry helpers
// ---------------------------------------------------------------------------

fn circumcenter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<[f64; 2]> {
    let d = 2.0 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    if d.abs() < 1e-300 {
        return None;
    }
    let a2 = a[0] * a[0] + a[1] * a[1];
    let b2 = b[0] * b[0] + b[1] * b[1];
    let c2 = c[0] * c[0] + c[1] * c[1];
    let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    Some([ux, uy])
}

fn aspect(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let e0 = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let e1 = ((c[0] - b[0]).powi(2) + (c[1] - b[1]).powi(2)).sqrt();
    let e2 = ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt();
    let lmax = e0.max(e1).max(e2);
    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
    if area == 0.0 {
        f64::INFINITY
    } else {
        lmax * lmax / (2.0 * area)
    }
}

fn centroid(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
}

// ---------------------------------------------------------------------------
// main entry
// ---------------------------------------------------------------------------

/// Generates a graded conforming mesh of the region bounded by `boundary`.
pub fn generate_mesh_with(
    boundary: &PiecewiseBoundary,
    policy: &GradingPolicy,
    opts: &MeshOptions,
) -> Result<Mesh> {
    policy.validate()?;
    let sizing = SizingField::new(boundary, policy);

    // Subdivide the boundary loop; remember which points belong to which
    // piece so tagged edges can be recovered afterwards.
    let mut loop_points: Vec<[f64; 2]> = Vec::new();
    let mut piece_ranges: Vec<(usize, usize, BoundaryTag)> = Vec::new();
    for piece in &boundary.pieces {
        let start = loop_points.len();
        let pts = subdivide_piece(piece, &sizing);
        loop_points.extend_from_slice(&pts);
        piece_ranges.push((start, loop_points.len(), piece.tag()));
    }
    if loop_points.len() < 3 {
        return Err(Error::MeshInvariant("boundary degenerates".into()));
    }

    // Deduplicate shared endpoints while building the global point list.
    let mut points: Vec<[f64; 2]> = Vec::new();
    let mut index: std::collections::HashMap<(u64, u64), usize> = std::collections::HashMap::new();
    let mut intern = |p: [f64; 2], points: &mut Vec<[f64; 2]>| -> usize {
        *index
            .entry((p[0].to_bits(), p[1].to_bits()))
            .or_insert_with(|| {
                points.push(p);
                points.len() - 1
            })
    };
    let loop_ids: Vec<usize> = loop_points.iter().map(|p| intern(*p, &mut points)).collect();

    let mut segments: Vec<[usize; 2]> = Vec::new();
    let n_loop = loop_ids.len();
    let mut boundary_edges: Vec<BoundaryEdge> = Vec::new();
    for &(start, end, tag) in &piece_ranges {
        for i in start..end {
            let a = loop_ids[i];
            let b = loop_ids[(i + 1) % n_loop];
            segments.push([a, b]);
            boundary_edges.push(BoundaryEdge { v: [a, b], tag });
        }
    }

    for &(a, b) in &boundary.internal_chains {
        let pts = subdivide_chain(a, b, &sizing);
        let ids: Vec<usize> = pts.iter().map(|p| intern(*p, &mut points)).collect();
        for w in ids.windows(2) {
            if w[0] != w[1] {
                segments.push([w[0], w[1]]);
            }
        }
    }
    let n_fixed = points.len();

    // Interior fill from an absolute quadtree anchored at the origin, so
    // related domains produce identical candidates away from their
    // differing boundary parts.
    let xs: Vec<f64> = loop_points.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = loop_points.iter().map(|p| p[1]).collect();
    let bbox = [
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ys.iter().cloned().fold(f64::INFINITY, f64::min),
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    ];
    let extent = bbox
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut half = 1.0;
    while half < extent * 1.25 {
        half *= 2.0;
    }
    let inside = InsideTest::new(&loop_points);
    let fixed_set = NearestSet::new(&points)?;
    let mut fill = FillContext {
        sizing: &sizing,
        inside: &inside,
        fixed: &fixed_set,
        seed: opts.seed,
        bbox,
        budget: opts.budget,
        points: Vec::new(),
    };
    fill.visit(0.0, 0.0, half, 0, 0, 0)?;
    points.extend_from_slice(&fill.points);

    // Triangulate, keep triangles whose centroid lies inside the loop.
    let keep_inside = |points: &[[f64; 2]], tris: Vec<[usize; 3]>| -> Vec<[usize; 3]> {
        tris.into_iter()
            .filter(|t| inside.contains(centroid(points[t[0]], points[t[1]], points[t[2]])))
            .collect()
    };
    let mut triangles = keep_inside(&points, triangulate(&points, &segments)?);

    // Laplacian smoothing of movable points, re-triangulating after each
    // pass; moves that would leave the domain or crowd the boundary are
    // rejected.
    let movable = |i: usize, p: [f64; 2]| -> bool {
        if i < n_fixed {
            return false;
        }
        match opts.smoothing_zone {
            None => true,
            Some((c, r)) => (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) < r * r,
        }
    };
    for _ in 0..opts.smoothing_passes {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
        for t in &triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut moved = points.clone();
        for i in 0..points.len() {
            if !movable(i, points[i]) || adj[i].is_empty() {
                continue;
            }
            let mut nb = adj[i].clone();
            nb.sort_unstable();
            nb.dedup();
            let mut cx = 0.0;
            let mut cy = 0.0;
            for &j in &nb {
                cx += points[j][0];
                cy += points[j][1];
            }
            let cand = [cx / nb.len() as f64, cy / nb.len() as f64];
            if !inside.contains(cand) {
                continue;
            }
            if let Some((_, d)) = fixed_set.nearest(cand) {
                if d < 0.45 * sizing.h(cand) {
                    continue;
                }
            }
            moved[i] = cand;
        }
        points = moved;
        triangles = keep_inside(&points, triangulate(&points, &segments)?);
    }

    // Circumcenter refinement of ill-shaped triangles.
    for _ in 0..opts.quality_rounds {
        let all_set = NearestSet::new(&points)?;
        let mut inserted = 0usize;
        let mut new_points: Vec<[f64; 2]> = Vec::new();
        for t in &triangles {
            let (a, b, c) = (points[t[0]], points[t[1]], points[t[2]]);
            if aspect(a, b, c) <= opts.max_aspect {
                continue;
            }
            let Some(cc) = circumcenter(a, b, c) else {
                continue;
            };
            if !inside.contains(cc) {
                continue;
            }
            let h = sizing.h(cc);
            if let Some((_, d)) = all_set.nearest(cc) {
                if d < 0.4 * h {
                    continue;
                }
            }
            if new_points
                .iter()
                .any(|q| (q[0] - cc[0]).powi(2) + (q[1] - cc[1]).powi(2) < (0.4 * h).powi(2))
            {
                continue;
            }
            new_points.push(cc);
            inserted += 1;
        }
        if inserted == 0 {
            break;
        }
        points.extend_from_slice(&new_points);
        if 2 * points.len() > opts.budget * 2 {
            return Err(Error::MeshBudget {
                elements: 2 * points.len(),
                budget: opts.budget,
            });
        }
        triangles = keep_inside(&points, triangulate(&points, &segments)?);
    }

    if triangles.len() > opts.budget {
        return Err(Error::MeshBudget {
            elements: triangles.len(),
            budget: opts.budget,
        });
    }

    let mesh = Mesh {
        vertices: points,
        triangles,
        boundary_edges,
        element_order: opts.order,
        outer_radius: boundary.outer_radius,
    };
    mesh.check_invariants()?;
    Ok(mesh)
}

/// Splits every triangle into four via edge midpoints; midpoints of
/// boundary edges on the outer circle are snapped onto the circle.
pub fn uniform_refine(mesh: &Mesh) -> Mesh {
    let (edges, tri_edges) = mesh.canonical_edges();
    let n_v = mesh.vertices.len();
    let boundary_set: std::collections::HashMap<[usize; 2], BoundaryTag> = mesh
        .boundary_edges
        .iter()
        .map(|be| ([be.v[0].min(be.v[1]), be.v[0].max(be.v[1])], be.tag))
        .collect();
    let mut vertices = mesh.vertices.clone();
    for e in &edges {
        let a = mesh.vertices[e[0]];
        let b = mesh.vertices[e[1]];
        let mut m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        if boundary_set.contains_key(e) && mesh.edge_on_outer_circle(e[0], e[1]) {
            if let Some(r) = mesh.outer_radius {
                let len = (m[0] * m[0] + m[1] * m[1]).sqrt();
                if len > 0.0 {
                    m = [m[0] * r / len, m[1] * r / len];
                }
            }
        }
        vertices.push(m);
    }
    let mid = |e: usize| n_v + e;
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for (t, te) in mesh.triangles.iter().zip(&tri_edges) {
        let [i, j, k] = *t;
        // te[0] is opposite corner i (edge j-k), etc.
        let m_jk = mid(te[0]);
        let m_ki = mid(te[1]);
        let m_ij = mid(te[2]);
        triangles.push([i, m_ij, m_ki]);
        triangles.push([m_ij, j, m_jk]);
        triangles.push([m_ki, m_jk, k]);
        triangles.push([m_ij, m_jk, m_ki]);
    }
    let edge_rank = |a: usize, b: usize| edges.binary_search(&[a.min(b), a.max(b)]).unwrap();
    let boundary_edges = mesh
        .boundary_edges
        .iter()
        .flat_map(|be| {
            let m = mid(edge_rank(be.v[0], be.v[1]));
            [
                BoundaryEdge {
                    v: [be.v[0], m],
                    tag: be.tag,
                },
                BoundaryEdge {
                    v: [m, be.v[1]],
                    tag: be.tag,
                },
            ]
        })
        .collect();
    Mesh {
        vertices,
        triangles,
        boundary_edges,
        element_order: mesh.element_order,
        outer_radius: mesh.outer_radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    fn policy(h_far: f64, h_junction: f64) -> GradingPolicy {
        GradingPolicy {
            h_far,
            h_junction,
            grading_ratio: 1.5,
        }
    }

    #[test]
    fn half_disk_mesh_passes_invariants_and_area() {
        let b = build_domain(&DomainSpec::unperturbed(2.0)).unwrap();
        let mesh = generate_mesh(&b, &policy(0.1, 0.05), ElementOrder::P1, 7).unwrap();
        mesh.check_invariants().unwrap();
        let area = mesh.total_area();
        let exact = 0.5 * std::f64::consts::PI * 4.0;
        // Straight edges under-cover the disk by O(h^2) per arc segment.
        assert!(
            (area - exact).abs() < 0.01 * exact,
            "area {area} vs {exact}"
        );
        assert!(area < exact, "polygonal area must undershoot the disk");
        let worst = (0..mesh.triangles.len())
            .map(|t| mesh.aspect_ratio(t))
            .fold(0.0f64, f64::max);
        assert!(worst <= 10.0, "worst aspect {worst}");
    }

    #[test]
    fn perturbed_mesh_covers_tube() {
        let b = build_domain(&DomainSpec::perturbed(2.0, 0.1)).unwrap();
        let mesh = generate_mesh(&b, &policy(0.1, 0.02), ElementOrder::P2, 7).unwrap();
        mesh.check_invariants().unwrap();
        assert!(mesh.has_tube());
        let exact = 0.5 * std::f64::consts::PI * 4.0 + 2.0 * 0.1;
        let area = mesh.total_area();
        assert!((area - exact).abs() < 0.01 * exact, "area {area}");
        // The tube end boundary is tagged.
        assert!(mesh
            .boundary_edges
            .iter()
            .any(|be| be.tag == BoundaryTag::TubeEnd));
        // Grading: triangles near the mouth are much smaller than far ones.
        let mut near = f64::INFINITY;
        let mut far: f64 = 0.0;
        for t in 0..mesh.triangles.len() {
            let c = centroid(
                mesh.vertices[mesh.triangles[t][0]],
                mesh.vertices[mesh.triangles[t][1]],
                mesh.vertices[mesh.triangles[t][2]],
            );
            let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
            let a = mesh.triangle_area(t);
            if r < 0.15 {
                near = near.min(a);
            }
            if r > 1.0 && c[0] > 0.0 {
                far = far.max(a);
            }
        }
        assert!(far > 10.0 * near, "near {near} far {far}");
    }

    #[test]
    fn exterior_mesh_keeps_sigma_vertices() {
        let b = build_domain(&DomainSpec::exterior_truncated(4.0)).unwrap();
        let mesh = generate_mesh(&b, &policy(0.2, 0.05), ElementOrder::P2, 3).unwrap();
        mesh.check_invariants().unwrap();
        // Vertices along x1 = 0 between -1 and 1 exist (the internal chain).
        let on_sigma = mesh
            .vertices
            .iter()
            .filter(|v| v[0] == 0.0 && v[1].abs() < 1.0)
            .count();
        assert!(on_sigma >= 10, "only {on_sigma} vertices on the junction");
        // Arc vertices are exactly on the circle to 1e-12 relative.
        for be in &mesh.boundary_edges {
            if be.tag == BoundaryTag::OuterArc {
                for &v in &be.v {
                    let r = (mesh.vertices[v][0].powi(2) + mesh.vertices[v][1].powi(2)).sqrt();
                    assert!((r - 4.0).abs() < 1e-12 * 4.0);
                }
            }
        }
    }

    #[test]
    fn meshing_is_deterministic() {
        let b = build_domain(&DomainSpec::perturbed(2.0, 0.1)).unwrap();
        let m1 = generate_mesh(&b, &policy(0.1, 0.02), ElementOrder::P1, 42).unwrap();
        let m2 = generate_mesh(&b, &policy(0.1, 0.02), ElementOrder::P1, 42).unwrap();
        assert_eq!(m1.vertices.len(), m2.vertices.len());
        for (a, b) in m1.vertices.iter().zip(&m2.vertices) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
        assert_eq!(m1.triangles, m2.triangles);
        // A different seed jitters the interior points.
        let m3 = generate_mesh(&b, &policy(0.1, 0.02), ElementOrder::P1, 43).unwrap();
        let same = m1.vertices.len() == m3.vertices.len()
            && m1
                .vertices
                .iter()
                .zip(&m3.vertices)
                .all(|(a, b)| a == b);
        assert!(!same, "seed change should move interior points");
    }

    #[test]
    fn budget_is_enforced() {
        let b = build_domain(&DomainSpec::unperturbed(2.0)).unwrap();
        let mut opts = MeshOptions::new(ElementOrder::P1, 1);
        opts.budget = 50;
        let err = generate_mesh_with(&b, &policy(0.05, 0.01), &opts).unwrap_err();
        assert!(matches!(err, Error::MeshBudget { .. }), "{err}");
    }

    #[test]
    fn refinement_quadruples_and_snaps_to_arc() {
        let b = build_domain(&DomainSpec::unperturbed(2.0)).unwrap();
        let mesh = generate_mesh(&b, &policy(0.3, 0.1), ElementOrder::P1, 5).unwrap();
        let fine = uniform_refine(&mesh);
        fine.check_invariants().unwrap();
        assert_eq!(fine.triangles.len(), 4 * mesh.triangles.len());
        // Refined area is closer to the disk area than the coarse one.
        let exact = 0.5 * std::f64::consts::PI * 4.0;
        let gap_coarse = exact - mesh.total_area();
        let gap_fine = exact - fine.total_area();
        assert!(gap_fine > 0.0 && gap_fine < 0.3 * gap_coarse);
    }
}
