//! Pointwise evaluation of finite element functions.

use super::assemble::shape;
use super::dof::DofMap;
use crate::error::{Error, Result};
use crate::geometry::Mesh;

/// A finite element function: nodal coefficients over a dof map.
///
/// Evaluation locates the containing triangle through a uniform bucket grid
/// and inverts the (possibly curved) reference map. Points on shared edges
/// resolve to one of the adjacent cells; continuity of the space makes the
/// choice immaterial.
pub struct FeField<'a> {
    pub mesh: &'a Mesh,
    pub dofs: &'a DofMap,
    pub values: Vec<f64>,
    grid: Grid,
}

struct Grid {
    x0: f64,
    y0: f64,
    inv_h: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn new(mesh: &Mesh) -> Self {
        let xs = mesh.vertices.iter().map(|p| p[0]);
        let ys = mesh.vertices.iter().map(|p| p[1]);
        let x0 = xs.clone().fold(f64::INFINITY, f64::min);
        let x1 = xs.fold(f64::NEG_INFINITY, f64::max);
        let y0 = ys.clone().fold(f64::INFINITY, f64::min);
        let y1 = ys.fold(f64::NEG_INFINITY, f64::max);
        let n_target = (mesh.triangles.len() as f64).sqrt().ceil() as usize + 1;
        let nx = n_target.max(1);
        let ny = n_target.max(1);
        let span = ((x1 - x0).max(y1 - y0)).max(1e-12);
        let h = span / n_target as f64;
        let inv_h = 1.0 / h;
        let gx = |x: f64| (((x - x0) * inv_h) as isize).clamp(0, nx as isize - 1) as usize;
        let gy = |y: f64| (((y - y0) * inv_h) as isize).clamp(0, ny as isize - 1) as usize;
        let mut cells = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let px: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices[v]).collect();
            let bx0 = gx(px.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min));
            let bx1 = gx(px.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max));
            let by0 = gy(px.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min));
            let by1 = gy(px.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max));
            for cx in bx0..=bx1 {
                for cy in by0..=by1 {
                    cells[cy * nx + cx].push(t as u32);
                }
            }
        }
        Self {
            x0,
            y0,
            inv_h,
            nx,
            ny,
            cells,
        }
    }

    fn candidates(&self, p: [f64; 2]) -> &[u32] {
        let cx = (((p[0] - self.x0) * self.inv_h) as isize).clamp(0, self.nx as isize - 1);
        let cy = (((p[1] - self.y0) * self.inv_h) as isize).clamp(0, self.ny as isize - 1);
        &self.cells[cy as usize * self.nx + cx as usize]
    }
}

fn straight_bary(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 3] {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

impl<'a> FeField<'a> {
    pub fn new(mesh: &'a Mesh, dofs: &'a DofMap, values: Vec<f64>) -> Result<Self> {
        if values.len() != dofs.n_dofs {
            return Err(Error::InvalidParameter(format!(
                "field has {} coefficients for {} dofs",
                values.len(),
                dofs.n_dofs
            )));
        }
        Ok(Self {
            mesh,
            dofs,
            values,
            grid: Grid::new(mesh),
        })
    }

    /// Value at barycentric coordinates of cell `t`.
    pub fn eval_bary(&self, t: usize, bary: [f64; 3]) -> f64 {
        let (n, _, nd) = shape(self.dofs.order, bary);
        let cd = &self.dofs.cell_dofs[t];
        (0..nd).map(|i| n[i] * self.values[cd[i]]).sum()
    }

    /// Physical gradient at barycentric coordinates of cell `t`.
    pub fn grad_bary(&self, t: usize, bary: [f64; 3]) -> [f64; 2] {
        let (_, dn, nd) = shape(self.dofs.order, bary);
        let cd = &self.dofs.cell_dofs[t];
        // Jacobian of the (iso)parametric map at this point.
        let mut j = [[0.0; 2]; 2];
        if self.dofs.cell_curved[t] {
            for i in 0..nd {
                let x = self.dofs.coords[cd[i]];
                j[0][0] += dn[i][0] * x[0];
                j[0][1] += dn[i][1] * x[0];
                j[1][0] += dn[i][0] * x[1];
                j[1][1] += dn[i][1] * x[1];
            }
        } else {
            let a = self.dofs.coords[cd[0]];
            let b = self.dofs.coords[cd[1]];
            let c = self.dofs.coords[cd[2]];
            j = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_t = [
            [j[1][1] / det, -j[1][0] / det],
            [-j[0][1] / det, j[0][0] / det],
        ];
        let mut g = [0.0; 2];
        for i in 0..nd {
            let u = self.values[cd[i]];
            g[0] += u * (inv_t[0][0] * dn[i][0] + inv_t[0][1] * dn[i][1]);
            g[1] += u * (inv_t[1][0] * dn[i][0] + inv_t[1][1] * dn[i][1]);
        }
        g
    }

    /// Containing cell and local coordinates of a physical point.
    pub fn locate(&self, p: [f64; 2]) -> Result<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &tu in self.grid.candidates(p) {
            let t = tu as usize;
            let [i, j, k] = self.mesh.triangles[t];
            let bary = straight_bary(
                p,
                self.mesh.vertices[i],
                self.mesh.vertices[j],
                self.mesh.vertices[k],
            );
            let worst = bary[0].min(bary[1]).min(bary[2]);
            if worst >= -1e-10 {
                return Ok((t, self.refine_bary(t, p, bary)));
            }
            if best.map_or(true, |(_, _, w)| worst > w) {
                best = Some((t, bary, worst));
            }
        }
        // Tolerate tiny excursions (points on curved arcs just outside the
        // straight triangle hull).
        if let Some((t, bary, worst)) = best {
            if worst > -1e-6 {
                return Ok((t, self.refine_bary(t, p, bary)));
            }
        }
        Err(Error::Interpolation(format!(
            "point ({}, {}) not inside the mesh",
            p[0], p[1]
        )))
    }

    /// Newton correction of barycentric coordinates for curved cells.
    fn refine_bary(&self, t: usize, p: [f64; 2], bary0: [f64; 3]) -> [f64; 3] {
        if !self.dofs.cell_curved[t] {
            return bary0;
        }
        let cd = &self.dofs.cell_dofs[t];
        let nd = self.dofs.dofs_per_cell();
        let mut l = bary0;
        for _ in 0..6 {
            let (n, dn, _) = shape(self.dofs.order, l);
            let mut x = [0.0; 2];
            let mut j = [[0.0; 2]; 2];
            for i in 0..nd {
                let xc = self.dofs.coords[cd[i]];
                x[0] += n[i] * xc[0];
                x[1] += n[i] * xc[1];
                j[0][0] += dn[i][0] * xc[0];
                j[0][1] += dn[i][1] * xc[0];
                j[1][0] += dn[i][0] * xc[1];
                j[1][1] += dn[i][1] * xc[1];
            }
            let rx = p[0] - x[0];
            let ry = p[1] - x[1];
            if rx * rx + ry * ry < 1e-28 {
                break;
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let dxi = (j[1][1] * rx - j[0][1] * ry) / det;
            let deta = (-j[1][0] * rx + j[0][0] * ry) / det;
            l = [l[0] - dxi - deta, l[1] + dxi, l[2] + deta];
        }
        l
    }

    /// Value at a physical point.
    pub fn eval(&self, p: [f64; 2]) -> Result<f64> {
        let (t, bary) = self.locate(p)?;
        Ok(self.eval_bary(t, bary))
    }

    /// Gradient at a physical point.
    pub fn grad(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let (t, bary) = self.locate(p)?;
        Ok(self.grad_bary(t, bary))
    }
}
