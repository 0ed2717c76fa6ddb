//! Thin wrapper around the spade constrained Delaunay triangulator.

use spade::{ConstrainedDelaunayTriangulation, DelaunayTriangulation, Point2, Triangulation};
use std::collections::HashMap;

use crate::error::{Error, Result};

fn key(p: [f64; 2]) -> (u64, u64) {
    (p[0].to_bits(), p[1].to_bits())
}

/// Constrained Delaunay triangulation of `points` with forced `segments`.
///
/// Returns counterclockwise triangles as index triples into `points`.
/// Points must be pairwise distinct (bitwise); the caller owns any
/// deduplication and the selection of which triangles lie inside the domain.
pub fn triangulate(points: &[[f64; 2]], segments: &[[usize; 2]]) -> Result<Vec<[usize; 3]>> {
    let mut index: HashMap<(u64, u64), usize> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if index.insert(key(*p), i).is_some() {
            return Err(Error::MeshInvariant(format!(
                "duplicate mesh point at {:?}",
                p
            )));
        }
    }
    let vertices: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(
        vertices,
        segments.to_vec(),
    )
    .map_err(|e| Error::MeshInvariant(format!("triangulation failed: {e:?}")))?;
    let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let vs = face.vertices();
        let mut tri = [0usize; 3];
        for (slot, v) in tri.iter_mut().zip(vs.iter()) {
            let p = v.position();
            *slot = *index
                .get(&key([p.x, p.y]))
                .ok_or_else(|| Error::MeshInvariant("triangulator moved a vertex".into()))?;
        }
        triangles.push(tri);
    }
    Ok(triangles)
}

/// Nearest-neighbor queries against a fixed point set.
pub struct NearestSet {
    tri: DelaunayTriangulation<Point2<f64>>,
    index: HashMap<(u64, u64), usize>,
}

impl NearestSet {
    pub fn new(points: &[[f64; 2]]) -> Result<Self> {
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            index.entry(key(*p)).or_insert(i);
        }
        let tri = DelaunayTriangulation::bulk_load(
            points.iter().map(|p| Point2::new(p[0], p[1])).collect(),
        )
        .map_err(|e| Error::MeshInvariant(format!("point set degenerate: {e:?}")))?;
        Ok(Self { tri, index })
    }

    /// Distance from `p` to the closest stored point, with its index.
    pub fn nearest(&self, p: [f64; 2]) -> Option<(usize, f64)> {
        let h = self.tri.nearest_neighbor(Point2::new(p[0], p[1]))?;
        let q = h.position();
        let d = ((p[0] - q.x).powi(2) + (p[1] - q.y).powi(2)).sqrt();
        let i = *self.index.get(&key([q.x, q.y]))?;
        Some((i, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulates_square_with_diagonal_constraint() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let tris = triangulate(&pts, &[[0, 2]]).unwrap();
        assert_eq!(tris.len(), 2);
        for t in &tris {
            // Constraint edge 0-2 must appear in both triangles.
            assert!(t.contains(&0) && t.contains(&2));
            let a = pts[t[0]];
            let b = pts[t[1]];
            let c = pts[t[2]];
            let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
            assert!(area > 0.0, "triangle {t:?} not counterclockwise");
        }
    }

    #[test]
    fn nearest_set_reports_distances() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]];
        let ns = NearestSet::new(&pts).unwrap();
        let (i, d) = ns.nearest([0.1, 0.0]).unwrap();
        assert_eq!(i, 0);
        assert!((d - 0.1).abs() < 1e-14);
    }
}
