//! Plain-text mesh serialization.
//!
//! Format (`tubespec-mesh v1`):
//!
//! ```text
//! tubespec-mesh v1
//! <nodes> <triangles> <boundary_edges> <order> <outer_radius>
//! x y                 (one line per node)
//! i j k               (one line per triangle, corner indices)
//! i j TAG             (one line per tagged boundary edge)
//! ```
//!
//! For quadratic meshes the node list holds the corner vertices first and
//! then one midside node per canonical edge (undirected edges sorted
//! lexicographically), so downstream tools see the snapped arc midpoints.
//! `outer_radius` is `0` when the mesh has no outermost circular arc.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{BoundaryEdge, BoundaryTag, ElementOrder, Mesh};
use crate::error::{Error, Result};

/// Writes a mesh in the `tubespec-mesh v1` format.
pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    let (edges, _) = mesh.canonical_edges();
    let midside = match mesh.element_order {
        ElementOrder::P1 => Vec::new(),
        ElementOrder::P2 => mesh.midside_positions(&edges),
    };
    let n_nodes = mesh.vertices.len() + midside.len();
    let order = match mesh.element_order {
        ElementOrder::P1 => 1,
        ElementOrder::P2 => 2,
    };
    writeln!(w, "tubespec-mesh v1")?;
    writeln!(
        w,
        "{} {} {} {} {:.16e}",
        n_nodes,
        mesh.triangles.len(),
        mesh.boundary_edges.len(),
        order,
        mesh.outer_radius.unwrap_or(0.0)
    )?;
    for p in mesh.vertices.iter().chain(midside.iter()) {
        writeln!(w, "{:.16e} {:.16e}", p[0], p[1])?;
    }
    for t in &mesh.triangles {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    for be in &mesh.boundary_edges {
        writeln!(w, "{} {} {}", be.v[0], be.v[1], be.tag.as_str())?;
    }
    Ok(())
}

/// Reads a mesh written by [`write_mesh`], validating structure and the
/// consistency of stored midside nodes with the corner geometry.
pub fn read_mesh<R: Read>(r: R) -> Result<Mesh> {
    let mut lines = BufReader::new(r).lines();
    let mut next_line = |what: &str| -> Result<String> {
        loop {
            match lines.next() {
                None => return Err(Error::Parse(format!("unexpected end of file, expected {what}"))),
                Some(Err(e)) => return Err(Error::Io(e)),
                Some(Ok(l)) => {
                    if !l.trim().is_empty() {
                        return Ok(l);
                    }
                }
            }
        }
    };
    let header = next_line("header")?;
    if header.trim() != "tubespec-mesh v1" {
        return Err(Error::Parse(format!("unknown mesh header {header:?}")));
    }
    let counts = next_line("counts")?;
    let fields: Vec<&str> = counts.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(Error::Parse(format!(
            "counts line needs 5 fields, got {}",
            fields.len()
        )));
    }
    let n_nodes: usize = fields[0]
        .parse()
        .map_err(|_| Error::Parse("bad node count".into()))?;
    let n_tris: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse("bad triangle count".into()))?;
    let n_bedges: usize = fields[2]
        .parse()
        .map_err(|_| Error::Parse("bad boundary edge count".into()))?;
    let order = match fields[3] {
        "1" => ElementOrder::P1,
        "2" => ElementOrder::P2,
        o => return Err(Error::Parse(format!("unsupported element order {o}"))),
    };
    let r_out: f64 = fields[4]
        .parse()
        .map_err(|_| Error::Parse("bad outer radius".into()))?;
    let outer_radius = if r_out > 0.0 { Some(r_out) } else { None };

    let mut nodes = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let line = next_line("node")?;
        let mut it = line.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad node line {i}")))?;
        let y: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad node line {i}")))?;
        nodes.push([x, y]);
    }
    let mut triangles = Vec::with_capacity(n_tris);
    for i in 0..n_tris {
        let line = next_line("triangle")?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad triangle line {i}")))?;
        if idx.len() != 3 {
            return Err(Error::Parse(format!("triangle line {i} needs 3 indices")));
        }
        triangles.push([idx[0], idx[1], idx[2]]);
    }
    let n_corners = triangles
        .iter()
        .flat_map(|t| t.iter())
        .max()
        .map_or(0, |m| m + 1);
    if n_corners > n_nodes {
        return Err(Error::Parse("triangle index beyond node list".into()));
    }
    let mut boundary_edges = Vec::with_capacity(n_bedges);
    for i in 0..n_bedges {
        let line = next_line("boundary edge")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("boundary line {i} needs 3 fields")));
        }
        let a: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad boundary line {i}")))?;
        let b: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad boundary line {i}")))?;
        let tag = BoundaryTag::from_str(fields[2])
            .ok_or_else(|| Error::Parse(format!("unknown boundary tag {:?}", fields[2])))?;
        if a >= n_corners || b >= n_corners {
            return Err(Error::Parse(format!(
                "boundary line {i} references non-corner node"
            )));
        }
        boundary_edges.push(BoundaryEdge { v: [a, b], tag });
    }

    let mesh = Mesh {
        vertices: nodes[..n_corners].to_vec(),
        triangles,
        boundary_edges,
        element_order: order,
        outer_radius,
    };
    match order {
        ElementOrder::P1 => {
            if n_corners != n_nodes {
                return Err(Error::Parse(format!(
                    "linear mesh lists {n_nodes} nodes but only {n_corners} are corners"
                )));
            }
        }
        ElementOrder::P2 => {
            let (edges, _) = mesh.canonical_edges();
            if n_corners + edges.len() != n_nodes {
                return Err(Error::Parse(format!(
                    "quadratic mesh needs {} + {} nodes, file lists {n_nodes}",
                    n_corners,
                    edges.len()
                )));
            }
            let derived = mesh.midside_positions(&edges);
            for (k, (stored, want)) in nodes[n_corners..].iter().zip(&derived).enumerate() {
                let d = ((stored[0] - want[0]).powi(2) + (stored[1] - want[1]).powi(2)).sqrt();
                if d > 1e-9 {
                    return Err(Error::Parse(format!(
                        "midside node {k} inconsistent with corner geometry (off by {d:.2e})"
                    )));
                }
            }
        }
    }
    mesh.check_invariants()
        .map_err(|e| Error::Parse(format!("mesh file violates invariants: {e}")))?;
    Ok(mesh)
}

/// Writes a mesh to `path`.
pub fn write_mesh_file<P: AsRef<Path>>(mesh: &Mesh, path: P) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_mesh(mesh, std::io::BufWriter::new(f))
}

/// Reads a mesh from `path`.
pub fn read_mesh_file<P: AsRef<Path>>(path: P) -> Result<Mesh> {
    let f = std::fs::File::open(path)?;
    read_mesh(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, generate_mesh, DomainSpec, GradingPolicy};

    fn sample(order: ElementOrder) -> Mesh {
        let b = build_domain(&DomainSpec::perturbed(2.0, 0.1)).unwrap();
        let policy = GradingPolicy {
            h_far: 0.25,
            h_junction: 0.05,
            grading_ratio: 1.5,
        };
        generate_mesh(&b, &policy, order, 77).unwrap()
    }

    #[test]
    fn p1_round_trip_is_bitwise() {
        let mesh = sample(ElementOrder::P1);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(mesh.vertices.len(), back.vertices.len());
        for (a, b) in mesh.vertices.iter().zip(&back.vertices) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
        assert_eq!(mesh.triangles, back.triangles);
        assert_eq!(mesh.boundary_edges.len(), back.boundary_edges.len());
        for (x, y) in mesh.boundary_edges.iter().zip(&back.boundary_edges) {
            assert_eq!(x, y);
        }
        assert_eq!(back.element_order, ElementOrder::P1);
        assert_eq!(back.outer_radius, Some(2.0));
    }

    #[test]
    fn p2_round_trip_preserves_midside_nodes() {
        let mesh = sample(ElementOrder::P2);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("tubespec-mesh v1"));
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.element_order, ElementOrder::P2);
        assert_eq!(mesh.vertices.len(), back.vertices.len());
        // Snapped midside nodes survive: some file node must sit at radius 2
        // away from any corner position.
        let (edges, _) = back.canonical_edges();
        let mids = back.midside_positions(&edges);
        let snapped = mids
            .iter()
            .filter(|m| ((m[0] * m[0] + m[1] * m[1]).sqrt() - 2.0).abs() < 1e-12)
            .count();
        assert!(snapped > 4, "expected snapped arc midpoints, got {snapped}");
    }

    #[test]
    fn reader_rejects_garbage() {
        assert!(read_mesh("not a mesh".as_bytes()).is_err());
        let mesh = sample(ElementOrder::P1);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        // Corrupt a triangle index.
        let text = String::from_utf8(buf).unwrap();
        let bad = text.replacen("tubespec-mesh v1", "tubespec-mesh v9", 1);
        assert!(read_mesh(bad.as_bytes()).is_err());
    }
}
