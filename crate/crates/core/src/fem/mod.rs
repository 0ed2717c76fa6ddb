//! Lagrange finite elements on triangle meshes: assembly, SPD solves,
//! generalized eigenpairs, and pointwise field evaluation.

mod assemble;
mod dof;
mod eig;
mod field;
mod solve;
mod sparse;

pub use assemble::{
    assemble_boundary_mass, assemble_forms, assemble_mass, assemble_stiffness, energy_in_region,
};
pub use dof::DofMap;
pub use eig::solve_generalized_eig;
pub use field::FeField;
pub use solve::{solve_dirichlet, solve_sparse, LinearSolver};
pub use sparse::SparseMatrix;

/// Mass density multiplying the eigenvalue term.
#[derive(Debug, Clone)]
pub enum WeightField {
    /// The constant density one.
    ConstantOne,
    /// Smooth radial transition: zero inside `r_inner`, one outside
    /// `r_outer`, joined by a quintic ramp (C^2 across both circles).
    RadialBump {
        center: [f64; 2],
        r_inner: f64,
        r_outer: f64,
    },
}

impl WeightField {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        match *self {
            WeightField::ConstantOne => 1.0,
            WeightField::RadialBump {
                center,
                r_inner,
                r_outer,
            } => {
                let r = ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt();
                if r <= r_inner {
                    0.0
                } else if r >= r_outer {
                    1.0
                } else {
                    let s = (r - r_inner) / (r_outer - r_inner);
                    s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
                }
            }
        }
    }
}

/// Controls for the shift-invert Lanczos eigensolver.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Spectral shift; must stay below the smallest pencil eigenvalue.
    pub shift: f64,
    pub num_eigs: usize,
    /// Relative residual target |K u - lambda M u| <= tol |K u|.
    pub tol: f64,
    /// Hard cap on the Krylov basis size.
    pub max_basis: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            shift: 0.0,
            num_eigs: 8,
            tol: 1e-10,
            max_basis: 300,
        }
    }
}

/// One eigenpair of the generalized problem, M-normalized.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_bump_profile() {
        let w = WeightField::RadialBump {
            center: [0.0, 0.0],
            r_inner: 1.0,
            r_outer: 2.0,
        };
        assert_eq!(w.eval([0.5, 0.0]), 0.0);
        assert_eq!(w.eval([3.0, 0.0]), 1.0);
        let mid = w.eval([1.5, 0.0]);
        assert!((mid - 0.5).abs() < 1e-14);
        // Monotone on the ramp.
        let mut last = 0.0;
        for i in 0..=20 {
            let r = 1.0 + (i as f64) / 20.0;
            let v = w.eval([r, 0.0]);
            assert!(v >= last);
            last = v;
        }
    }
}
