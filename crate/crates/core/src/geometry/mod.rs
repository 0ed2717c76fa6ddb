//! Parametric problem geometry and graded triangular meshing.
//!
//! Domains are described by a [`DomainSpec`] and realized as a
//! [`PiecewiseBoundary`], an ordered counterclockwise loop of tagged analytic
//! segments and circular arcs, possibly with internal constraint chains and
//! grading anchors. [`generate_mesh`] turns a boundary plus a
//! [`GradingPolicy`] into a conforming triangle [`Mesh`].
//!
//! Conventions: the half-plane is {x1 > 0}; the junction segment Sigma is
//! {0} x (-1, 1); the tube attached to the perturbed domain is
//! (-1, 0] x (-eps, eps); polar angles are measured from the positive
//! x2-axis so that a point on an origin-centered circle of radius R is
//! (R sin theta, R cos theta) with theta in (0, pi).

mod clip;
mod delaunay;
mod io;
mod mesher;
pub mod quad;
mod sizing;

pub use clip::{clip_quadrature, ClippedRule};
pub use io::{read_mesh, read_mesh_file, write_mesh, write_mesh_file};
pub use mesher::{generate_mesh, generate_mesh_with, uniform_refine, MeshOptions};
pub use sizing::SizingField;

use crate::error::{Error, Result};

/// Role of a boundary edge in the boundary-value problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Homogeneous Dirichlet parts: flat walls, tube walls, outer circle of
    /// the plain half-disk.
    DirichletWall,
    /// The free part sigma*Sigma of the flat wall in the Steklov problem.
    JunctionSigma,
    /// The truncation arc S_R^+ carrying prescribed trace data.
    OuterArc,
    /// The far end of an attached tube.
    TubeEnd,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::DirichletWall => "DirichletWall",
            BoundaryTag::JunctionSigma => "JunctionSigma",
            BoundaryTag::OuterArc => "OuterArc",
            BoundaryTag::TubeEnd => "TubeEnd",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "DirichletWall" => Some(BoundaryTag::DirichletWall),
            "JunctionSigma" => Some(BoundaryTag::JunctionSigma),
            "OuterArc" => Some(BoundaryTag::OuterArc),
            "TubeEnd" => Some(BoundaryTag::TubeEnd),
            _ => None,
        }
    }
}

impl std::fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which member of the domain family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// Half-disk of radius R0.
    Unperturbed,
    /// Half-disk of radius R0 with the tube (-1, 0] x (-eps, eps) attached.
    Perturbed,
    /// Truncated exterior junction domain Pi_R = ((-1,0] x (-1,1)) u B_R^+.
    ExteriorTruncated,
    /// Half-ball B_R^+ with flat diameter wall and outer arc.
    HalfBall,
}

/// Parameters selecting a concrete domain.
///
/// `sigma_halfwidth` and `tube_length` are fixed to 1 by the normalization of
/// the problem; they are carried as fields so that configurations stay
/// explicit.
#[derive(Debug, Clone, Copy)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub r0: f64,
    pub sigma_halfwidth: f64,
    pub eps: Option<f64>,
    pub tube_length: f64,
    pub r_trunc: Option<f64>,
}

impl DomainSpec {
    /// Half-disk of radius `r0`.
    pub fn unperturbed(r0: f64) -> Self {
        Self {
            kind: DomainKind::Unperturbed,
            r0,
            sigma_halfwidth: 1.0,
            eps: None,
            tube_length: 1.0,
            r_trunc: None,
        }
    }

    /// Half-disk of radius `r0` with a tube of half-width `eps` attached.
    pub fn perturbed(r0: f64, eps: f64) -> Self {
        Self {
            kind: DomainKind::Perturbed,
            r0,
            sigma_halfwidth: 1.0,
            eps: Some(eps),
            tube_length: 1.0,
            r_trunc: None,
        }
    }

    /// Truncated exterior domain Pi_R with outer radius `r_trunc`.
    ///
    /// The continuum tube is semi-infinite; boundary data decays along it at
    /// least like `exp(pi x1 / 2)`, so truncating at length 2 leaves a
    /// relative energy error of order `exp(-2 pi) ~ 2e-3`. Use
    /// [`DomainSpec::with_tube_length`] to override.
    pub fn exterior_truncated(r_trunc: f64) -> Self {
        Self {
            kind: DomainKind::ExteriorTruncated,
            r0: r_trunc,
            sigma_halfwidth: 1.0,
            eps: None,
            tube_length: 2.0,
            r_trunc: Some(r_trunc),
        }
    }

    /// Override the tube truncation length (ExteriorTruncated only, in
    /// `[1, 8]`).
    pub fn with_tube_length(mut self, tube_length: f64) -> Self {
        self.tube_length = tube_length;
        self
    }

    /// Half-ball B_R^+ with outer radius `r_trunc`.
    pub fn half_ball(r_trunc: f64) -> Self {
        Self {
            kind: DomainKind::HalfBall,
            r0: r_trunc,
            sigma_halfwidth: 1.0,
            eps: None,
            tube_length: 1.0,
            r_trunc: Some(r_trunc),
        }
    }

    /// Checks the parameter ranges documented on each kind.
    pub fn validate(&self) -> Result<()> {
        if (self.sigma_halfwidth - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidParameter(
                "sigma_halfwidth is fixed to 1".into(),
            ));
        }
        match self.kind {
            DomainKind::ExteriorTruncated => {
                if !(self.tube_length >= 1.0 && self.tube_length <= 8.0) {
                    return Err(Error::InvalidParameter(format!(
                        "exterior tube_length must lie in [1, 8], got {}",
                        self.tube_length
                    )));
                }
            }
            _ => {
                if (self.tube_length - 1.0).abs() > 1e-14 {
                    return Err(Error::InvalidParameter(
                        "tube_length is fixed to 1 for this domain kind".into(),
                    ));
                }
            }
        }
        match self.kind {
            DomainKind::Unperturbed | DomainKind::Perturbed => {
                if !(self.r0 > 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "R0 must exceed 1, got {}",
                        self.r0
                    )));
                }
            }
            DomainKind::ExteriorTruncated | DomainKind::HalfBall => {
                let r = self.r_trunc.unwrap_or(0.0);
                if !(r > 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "R_trunc must exceed 1, got {r}"
                    )));
                }
            }
        }
        match self.kind {
            DomainKind::Perturbed => {
                let eps = self
                    .eps
                    .ok_or_else(|| Error::InvalidParameter("Perturbed requires eps".into()))?;
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "eps must lie in (0, 1], got {eps}"
                    )));
                }
                if eps >= self.r0 {
                    return Err(Error::InvalidParameter(format!(
                        "tube mouth half-width {eps} exceeds flat wall coverage R0 = {}",
                        self.r0
                    )));
                }
            }
            _ => {
                if self.eps.is_some() {
                    return Err(Error::InvalidParameter(
                        "eps is meaningful only for Perturbed domains".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One analytic piece of a domain boundary, oriented along the loop.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryPiece {
    Segment {
        a: [f64; 2],
        b: [f64; 2],
        tag: BoundaryTag,
    },
    /// Circular arc traced as theta goes from `theta0` to `theta1` (either
    /// direction); points are `center + radius * (sin theta, cos theta)`.
    Arc {
        center: [f64; 2],
        radius: f64,
        theta0: f64,
        theta1: f64,
        tag: BoundaryTag,
    },
}

impl BoundaryPiece {
    pub fn tag(&self) -> BoundaryTag {
        match *self {
            BoundaryPiece::Segment { tag, .. } | BoundaryPiece::Arc { tag, .. } => tag,
        }
    }

    /// Point at parameter `t` in [0, 1].
    pub fn point(&self, t: f64) -> [f64; 2] {
        match *self {
            BoundaryPiece::Segment { a, b, .. } => {
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            }
            BoundaryPiece::Arc {
                center,
                radius,
                theta0,
                theta1,
                ..
            } => {
                let th = theta0 + t * (theta1 - theta0);
                [center[0] + radius * th.sin(), center[1] + radius * th.cos()]
            }
        }
    }

    pub fn start(&self) -> [f64; 2] {
        self.point(0.0)
    }

    pub fn end(&self) -> [f64; 2] {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            BoundaryPiece::Segment { a, b, .. } => ((b[0] - a[0]).powi(2)
                + (b[1] - a[1]).powi(2))
            .sqrt(),
            BoundaryPiece::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius * (theta1 - theta0).abs(),
        }
    }
}

/// Axis-aligned rectangle used to cap the local mesh size (tube interiors).
#[derive(Debug, Clone, Copy)]
pub struct SizeCap {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h_cap: f64,
}

impl SizeCap {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }
}

/// Ordered closed boundary loop plus meshing metadata.
#[derive(Debug, Clone)]
pub struct PiecewiseBoundary {
    pub pieces: Vec<BoundaryPiece>,
    /// Points that receive geometric grading down to `h_junction`.
    pub anchors: Vec<[f64; 2]>,
    /// Polyline chains forced into the triangulation as internal edges
    /// (used for the junction segment Sigma of exterior domains).
    pub internal_chains: Vec<([f64; 2], [f64; 2])>,
    /// Regions with an upper bound on the local mesh size.
    pub size_caps: Vec<SizeCap>,
    /// When set, the mesh size may not exceed h_junction * (1 + |x|), the
    /// radial coarsening rule for large exterior truncation radii.
    pub radial_growth: bool,
    /// Radius of the outermost origin-centered circular arc, if any.
    pub outer_radius: Option<f64>,
}

impl PiecewiseBoundary {
    /// Builds a boundary from an ordered loop of pieces, checking closure.
    pub fn from_pieces(pieces: Vec<BoundaryPiece>, anchors: Vec<[f64; 2]>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("empty boundary".into()));
        }
        let scale = pieces.iter().map(|p| p.length()).sum::<f64>();
        for i in 0..pieces.len() {
            let e = pieces[i].end();
            let s = pieces[(i + 1) % pieces.len()].start();
            let gap = ((e[0] - s[0]).powi(2) + (e[1] - s[1]).powi(2)).sqrt();
            if gap > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "boundary not closed between pieces {i} and {}",
                    (i + 1) % pieces.len()
                )));
            }
        }
        let outer_radius = pieces
            .iter()
            .filter_map(|p| match *p {
                BoundaryPiece::Arc { center, radius, .. }
                    if center[0].abs() < 1e-14 && center[1].abs() < 1e-14 =>
                {
                    Some(radius)
                }
                _ => None,
            })
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        Ok(Self {
            pieces,
            anchors,
            internal_chains: Vec::new(),
            size_caps: Vec::new(),
            radial_growth: false,
            outer_radius,
        })
    }

    /// Replaces the grading anchors (used to mirror a perturbed domain's
    /// grading onto its paired unperturbed mesh).
    pub fn with_anchors(mut self, anchors: Vec<[f64; 2]>) -> Self {
        self.anchors = anchors;
        self
    }

    /// Replaces the size caps.
    pub fn with_size_caps(mut self, caps: Vec<SizeCap>) -> Self {
        self.size_caps = caps;
        self
    }

    /// Total boundary length.
    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length()).sum()
    }
}

/// Builds the tagged boundary loop for a validated [`DomainSpec`].
///
/// Tags follow the conventions of the solvers: every wall of the half-disk
/// family is `DirichletWall` (the outer circle of the plain half-disk
/// included; `OuterArc` is reserved for truncation spheres carrying data),
/// the far end of the perturbed domain's tube is `TubeEnd`, and the
/// truncation arc of `ExteriorTruncated` and `HalfBall` is `OuterArc`.
pub fn build_domain(spec: &DomainSpec) -> Result<PiecewiseBoundary> {
    use BoundaryPiece::{Arc, Segment};
    use BoundaryTag::*;
    spec.validate()?;
    let pi = std::f64::consts::PI;
    match spec.kind {
        DomainKind::Unperturbed => {
            let r0 = spec.r0;
            let pieces = vec![
                Arc {
                    center: [0.0, 0.0],
                    radius: r0,
                    theta0: pi,
                    theta1: 0.0,
                    tag: DirichletWall,
                },
                Segment {
                    a: [0.0, r0],
                    b: [0.0, -r0],
                    tag: DirichletWall,
                },
            ];
            PiecewiseBoundary::from_pieces(pieces, vec![])
        }
        DomainKind::Perturbed => {
            let r0 = spec.r0;
            let eps = spec.eps.unwrap();
            let pieces = vec![
                Arc {
                    center: [0.0, 0.0],
                    radius: r0,
                    theta0: pi,
                    theta1: 0.0,
                    tag: DirichletWall,
                },
                Segment {
                    a: [0.0, r0],
                    b: [0.0, eps],
                    tag: DirichletWall,
                },
                Segment {
                    a: [0.0, eps],
                    b: [-1.0, eps],
                    tag: DirichletWall,
                },
                Segment {
                    a: [-1.0, eps],
                    b: [-1.0, -eps],
                    tag: TubeEnd,
                },
                Segment {
                    a: [-1.0, -eps],
                    b: [0.0, -eps],
                    tag: DirichletWall,
                },
                Segment {
                    a: [0.0, -eps],
                    b: [0.0, -r0],
                    tag: DirichletWall,
                },
            ];
            let mut b = PiecewiseBoundary::from_pieces(pieces, vec![[0.0, eps], [0.0, -eps]])?;
            b.size_caps = vec![SizeCap {
                x_min: -1.0,
                x_max: 0.0,
                y_min: -eps,
                y_max: eps,
                h_cap: 0.5 * eps,
            }];
            Ok(b)
        }
        DomainKind::ExteriorTruncated => {
            let r = spec.r_trunc.unwrap();
            let l = spec.tube_length;
            let pieces = vec![
                Arc {
                    center: [0.0, 0.0],
                    radius: r,
                    theta0: pi,
                    theta1: 0.0,
                    tag: OuterArc,
                },
                Segment {
                    a: [0.0, r],
                    b: [0.0, 1.0],
                    tag: DirichletWall,
                },
                Segment {
                    a: [0.0, 1.0],
                    b: [-l, 1.0],
                    tag: DirichletWall,
                },
                Segment {
                    a: [-l, 1.0],
                    b: [-l, -1.0],
                    tag: DirichletWall,
                },
                Segment {
                    a: [-l, -1.0],
                    b: [0.0, -1.0],
                    tag: DirichletWall,
                },
                Segment {
                    a: [0.0, -1.0],
                    b: [0.0, -r],
                    tag: DirichletWall,
                },
            ];
            let mut b = PiecewiseBoundary::from_pieces(pieces, vec![[0.0, 1.0], [0.0, -1.0]])?;
            b.internal_chains = vec![([0.0, -1.0], [0.0, 1.0])];
            b.size_caps = vec![SizeCap {
                x_min: -1.0,
                x_max: 0.0,
                y_min: -1.0,
                y_max: 1.0,
                h_cap: 0.35,
            }];
            b.radial_growth = true;
            Ok(b)
        }
        DomainKind::HalfBall => {
            let r = spec.r_trunc.unwrap();
            build_half_ball(r)
        }
    }
}

/// Half-disk of radius `r` with the outer circle tagged `OuterArc` and the
/// diameter tagged `DirichletWall`, graded radially outward.
fn build_half_ball(r: f64) -> Result<PiecewiseBoundary> {
    use BoundaryPiece::{Arc, Segment};
    use BoundaryTag::*;
    let pi = std::f64::consts::PI;
    let pieces = vec![
        Arc {
            center: [0.0, 0.0],
            radius: r,
            theta0: pi,
            theta1: 0.0,
            tag: OuterArc,
        },
        Segment {
            a: [0.0, r],
            b: [0.0, -r],
            tag: DirichletWall,
        },
    ];
    let mut b = PiecewiseBoundary::from_pieces(pieces, vec![])?;
    b.radial_growth = true;
    Ok(b)
}

/// Half-disk companion of the tube-perturbed domain for paired sweeps.
///
/// The diameter is split at (0, +/-eps) with matching grading anchors and the
/// same size cap as the perturbed boundary, so wall subdivision and the
/// deterministic interior fill coincide with the perturbed mesh away from the
/// tube mouth. Eigenvalue differences between the paired meshes then cancel
/// most of the shared discretization error.
pub fn build_paired_unperturbed(r0: f64, eps: f64) -> Result<PiecewiseBoundary> {
    use BoundaryPiece::{Arc, Segment};
    use BoundaryTag::*;
    if !(r0 > 0.0) || !(eps > 0.0) || eps >= 0.5 * r0 {
        return Err(Error::InvalidParameter(format!(
            "paired half-disk needs 0 < eps < r0/2, got r0={r0} eps={eps}"
        )));
    }
    let pi = std::f64::consts::PI;
    let pieces = vec![
        Arc {
            center: [0.0, 0.0],
            radius: r0,
            theta0: pi,
            theta1: 0.0,
            tag: DirichletWall,
        },
        Segment {
            a: [0.0, r0],
            b: [0.0, eps],
            tag: DirichletWall,
        },
        Segment {
            a: [0.0, eps],
            b: [0.0, -eps],
            tag: DirichletWall,
        },
        Segment {
            a: [0.0, -eps],
            b: [0.0, -r0],
            tag: DirichletWall,
        },
    ];
    let mut b = PiecewiseBoundary::from_pieces(pieces, vec![[0.0, eps], [0.0, -eps]])?;
    b.size_caps = vec![SizeCap {
        x_min: -1.0,
        x_max: 0.0,
        y_min: -eps,
        y_max: eps,
        h_cap: 0.5 * eps,
    }];
    Ok(b)
}

/// Polynomial order of the Lagrange elements a mesh is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    P1,
    P2,
}

/// Mesh size targets: `h_junction` at grading anchors, growing linearly with
/// distance at rate `grading_ratio - 1` up to `h_far`.
#[derive(Debug, Clone, Copy)]
pub struct GradingPolicy {
    pub h_far: f64,
    pub h_junction: f64,
    pub grading_ratio: f64,
}

impl GradingPolicy {
    pub fn new(h_far: f64, h_junction: f64, grading_ratio: f64) -> Result<Self> {
        let p = Self {
            h_far,
            h_junction,
            grading_ratio,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_far > 0.0 && self.h_junction > 0.0) {
            return Err(Error::InvalidParameter("mesh sizes must be positive".into()));
        }
        if self.h_junction > self.h_far {
            return Err(Error::InvalidParameter(format!(
                "h_junction {} exceeds h_far {}",
                self.h_junction, self.h_far
            )));
        }
        if !(self.grading_ratio > 1.0 && self.grading_ratio <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "grading_ratio must lie in (1, 2], got {}",
                self.grading_ratio
            )));
        }
        Ok(())
    }
}

impl Default for GradingPolicy {
    fn default() -> Self {
        Self {
            h_far: 0.05,
            h_junction: 0.01,
            grading_ratio: 1.5,
        }
    }
}

/// A tagged boundary edge `v[0] -> v[1]`, oriented along the boundary loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub tag: BoundaryTag,
}

/// Conforming triangle mesh with tagged boundary.
///
/// Triangles are counterclockwise corner-vertex triples. Midside nodes for P2
/// elements are not stored; they are derived from the canonical edge
/// enumeration (see [`Mesh::canonical_edges`]) with midpoints snapped onto
/// the outer circle for edges recognized as curved.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub element_order: ElementOrder,
    pub outer_radius: Option<f64>,
}

impl Mesh {
    /// Signed area of triangle `t` (positive for counterclockwise corners).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        let a = self.vertices[i];
        let b = self.vertices[j];
        let c = self.vertices[k];
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Sum of all triangle areas.
    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Longest edge divided by the shortest altitude, a standard shape
    /// quality measure (1.155 for equilateral triangles).
    pub fn aspect_ratio(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        let a = self.vertices[i];
        let b = self.vertices[j];
        let c = self.vertices[k];
        let e = [
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt(),
            ((c[0] - b[0]).powi(2) + (c[1] - b[1]).powi(2)).sqrt(),
            ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt(),
        ];
        let lmax = e[0].max(e[1]).max(e[2]);
        let area = self.triangle_area(t).abs();
        if area == 0.0 {
            return f64::INFINITY;
        }
        // shortest altitude = 2 area / longest edge
        lmax * lmax / (2.0 * area)
    }

    /// Unique undirected edges sorted lexicographically, plus the three edge
    /// ids of each triangle (edge i is opposite corner i).
    pub fn canonical_edges(&self) -> (Vec<[usize; 2]>, Vec<[usize; 3]>) {
        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(self.triangles.len() * 3 / 2 + 4);
        for t in &self.triangles {
            for (a, b) in [(t[1], t[2]), (t[2], t[0]), (t[0], t[1])] {
                edges.push([a.min(b), a.max(b)]);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let rank = |a: usize, b: usize| -> usize {
            let key = [a.min(b), a.max(b)];
            edges.binary_search(&key).expect("edge present by construction")
        };
        let tri_edges = self
            .triangles
            .iter()
            .map(|t| {
                [
                    rank(t[1], t[2]),
                    rank(t[2], t[0]),
                    rank(t[0], t[1]),
                ]
            })
            .collect();
        (edges, tri_edges)
    }

    /// True when both endpoints of `e` lie on the outer circle, identifying
    /// boundary edges that approximate the curved arc.
    pub fn edge_on_outer_circle(&self, a: usize, b: usize) -> bool {
        let Some(r) = self.outer_radius else {
            return false;
        };
        let ra = (self.vertices[a][0].powi(2) + self.vertices[a][1].powi(2)).sqrt();
        let rb = (self.vertices[b][0].powi(2) + self.vertices[b][1].powi(2)).sqrt();
        (ra - r).abs() <= 1e-9 * r && (rb - r).abs() <= 1e-9 * r
    }

    /// True when the mesh covers an attached tube (any vertex with x1 < 0).
    pub fn has_tube(&self) -> bool {
        self.vertices.iter().any(|v| v[0] < -1e-9)
    }

    /// Structural invariants: positive orientation, conformity, closed
    /// tagged boundary loops, and arc vertices on the circle.
    pub fn check_invariants(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::MeshInvariant(format!(
                    "triangle {t} has non-positive area {}",
                    self.triangle_area(t)
                )));
            }
        }
        // Count triangles on each undirected edge.
        let mut count: std::collections::HashMap<[usize; 2], u32> = std::collections::HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *count.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
            }
        }
        let mut tagged: std::collections::HashSet<[usize; 2]> = std::collections::HashSet::new();
        for be in &self.boundary_edges {
            let key = [be.v[0].min(be.v[1]), be.v[0].max(be.v[1])];
            if !tagged.insert(key) {
                return Err(Error::MeshInvariant(format!(
                    "boundary edge {:?} tagged twice",
                    be.v
                )));
            }
            match count.get(&key) {
                Some(1) => {}
                Some(n) => {
                    return Err(Error::MeshInvariant(format!(
                        "tagged edge {:?} borders {n} triangles",
                        be.v
                    )))
                }
                None => {
                    return Err(Error::MeshInvariant(format!(
                        "tagged edge {:?} not part of any triangle",
                        be.v
                    )))
                }
            }
        }
        for (key, n) in &count {
            match n {
                1 => {
                    if !tagged.contains(key) {
                        return Err(Error::MeshInvariant(format!(
                            "boundary edge {key:?} carries no tag"
                        )));
                    }
                }
                2 => {}
                n => {
                    return Err(Error::MeshInvariant(format!(
                        "edge {key:?} shared by {n} triangles"
                    )))
                }
            }
        }
        // Boundary edges must close: every boundary vertex has degree 2.
        let mut degree: std::collections::HashMap<usize, u32> = std::collections::HashMap::new();
        for be in &self.boundary_edges {
            *degree.entry(be.v[0]).or_insert(0) += 1;
            *degree.entry(be.v[1]).or_insert(0) += 1;
        }
        if let Some((v, d)) = degree.iter().find(|(_, d)| **d != 2) {
            return Err(Error::MeshInvariant(format!(
                "boundary vertex {v} has degree {d}, loops do not close"
            )));
        }
        if let Some(r) = self.outer_radius {
            for be in &self.boundary_edges {
                if matches!(be.tag, BoundaryTag::OuterArc) {
                    for &v in &be.v {
                        let rv = (self.vertices[v][0].powi(2) + self.vertices[v][1].powi(2)).sqrt();
                        if (rv - r).abs() >= 1e-12 * r {
                            return Err(Error::MeshInvariant(format!(
                                "arc vertex {v} off the circle by {}",
                                (rv - r).abs()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Midside node position for each canonical edge: the midpoint, snapped
    /// onto the outer circle for boundary edges lying on it. This is the
    /// single source of the quadratic node coordinates, shared by assembly
    /// and by the mesh file writer.
    pub fn midside_positions(&self, edges: &[[usize; 2]]) -> Vec<[f64; 2]> {
        let boundary: std::collections::HashSet<[usize; 2]> = self
            .boundary_edges
            .iter()
            .map(|be| [be.v[0].min(be.v[1]), be.v[0].max(be.v[1])])
            .collect();
        edges
            .iter()
            .map(|e| {
                let a = self.vertices[e[0]];
                let b = self.vertices[e[1]];
                let mut m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                if boundary.contains(e) && self.edge_on_outer_circle(e[0], e[1]) {
                    if let Some(r) = self.outer_radius {
                        let len = (m[0] * m[0] + m[1] * m[1]).sqrt();
                        if len > 0.0 {
                            m = [m[0] * r / len, m[1] * r / len];
                        }
                    }
                }
                m
            })
            .collect()
    }

    /// Vertex indices carrying any of the given tags.
    pub fn tagged_vertices(&self, tags: &[BoundaryTag]) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_edges
            .iter()
            .filter(|be| tags.contains(&be.tag))
            .flat_map(|be| be.v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_validation_rejects_bad_parameters() {
        assert!(DomainSpec::unperturbed(0.9).validate().is_err());
        assert!(DomainSpec::perturbed(2.0, 0.0).validate().is_err());
        assert!(DomainSpec::perturbed(2.0, 1.5).validate().is_err());
        assert!(DomainSpec::exterior_truncated(1.0).validate().is_err());
        assert!(DomainSpec::exterior_truncated(0.5).validate().is_err());
        assert!(DomainSpec::unperturbed(2.0).validate().is_ok());
        assert!(DomainSpec::perturbed(2.0, 0.1).validate().is_ok());
    }

    #[test]
    fn perturbed_rejects_mouth_wider_than_wall() {
        // eps >= R0 cannot happen with eps <= 1 < R0, but the explicit guard
        // also rejects it for r0 barely above 1.
        let mut spec = DomainSpec::perturbed(1.05, 0.9);
        assert!(spec.validate().is_ok());
        spec.r0 = 1.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn unperturbed_boundary_is_closed_half_disk() {
        let b = build_domain(&DomainSpec::unperturbed(2.0)).unwrap();
        assert_eq!(b.pieces.len(), 2);
        assert_eq!(b.outer_radius, Some(2.0));
        assert!(b.anchors.is_empty());
        let total = b.total_length();
        let expect = std::f64::consts::PI * 2.0 + 4.0;
        assert!((total - expect).abs() < 1e-12, "length {total} vs {expect}");
        // Outer circle of the plain half-disk is a Dirichlet wall.
        assert!(b
            .pieces
            .iter()
            .all(|p| p.tag() == BoundaryTag::DirichletWall));
    }

    #[test]
    fn perturbed_boundary_lists_mouth_anchors() {
        let b = build_domain(&DomainSpec::perturbed(2.0, 0.1)).unwrap();
        assert_eq!(b.anchors, vec![[0.0, 0.1], [0.0, -0.1]]);
        let expect = std::f64::consts::PI * 2.0 + 2.0 * (2.0 - 0.1) + 2.0 + 2.0 * 0.1;
        assert!((b.total_length() - expect).abs() < 1e-12);
        assert_eq!(
            b.pieces
                .iter()
                .filter(|p| p.tag() == BoundaryTag::TubeEnd)
                .count(),
            1
        );
    }

    #[test]
    fn exterior_boundary_has_outer_arc_and_sigma_chain() {
        let b = build_domain(&DomainSpec::exterior_truncated(8.0)).unwrap();
        assert_eq!(b.outer_radius, Some(8.0));
        assert!(b.radial_growth);
        assert_eq!(b.internal_chains.len(), 1);
        let arc_len: f64 = b
            .pieces
            .iter()
            .filter(|p| p.tag() == BoundaryTag::OuterArc)
            .map(|p| p.length())
            .sum();
        assert!((arc_len - std::f64::consts::PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn grading_policy_ranges() {
        assert!(GradingPolicy::new(0.1, 0.01, 1.5).is_ok());
        assert!(GradingPolicy::new(0.1, 0.2, 1.5).is_err());
        assert!(GradingPolicy::new(0.1, 0.01, 1.0).is_err());
        assert!(GradingPolicy::new(0.1, 0.01, 2.5).is_err());
        assert!(GradingPolicy::new(-0.1, 0.01, 1.5).is_err());
    }
}
