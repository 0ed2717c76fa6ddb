//! Numerical laboratory for Dirichlet-Laplacian eigenvalues on a half-disk
//! with a thin tube attached at a flat boundary point.
//!
//! The crate is organized as a pipeline:
//!
//! * [`geometry`] builds parametric domains (half-disk, half-disk with tube,
//!   truncated exterior junction domains, half-balls) and graded triangular
//!   meshes with tagged boundaries.
//! * [`fem`] assembles stiffness / mass / boundary-mass forms, applies
//!   Dirichlet constraints, and solves sparse systems and generalized
//!   eigenproblems.
//! * [`spectral`] runs the unperturbed and perturbed eigenproblems, fixes
//!   signs and normalizations, and tracks an eigenvalue branch across the
//!   tube half-widths.
//! * [`almgren`] computes frequency-function quantities (E, H, N) on discrete
//!   fields, extracts the vanishing order at the junction, and evaluates the
//!   Pohozaev, Steklov, and tube-Poincare diagnostics.
//! * [`exterior`] solves the truncated exterior problems, extrapolates the
//!   junction constant, and cross-checks it through independent identities.
//! * [`asymptotics`] fits the eigenvalue-difference sweep, compares the
//!   fitted constant to the exterior prediction, and runs the blow-up
//!   comparison.
//! * [`verify`] bundles the acceptance checks used by the CLI `verify`
//!   command and the acceptance test suite.
//!
//! All coordinates are (x1, x2) with the half-plane {x1 > 0}; the polar angle
//! theta in (0, pi) is measured from the positive x2-axis, so the degree-k
//! harmonic that vanishes on the wall is `psi_k = r^k sin(k theta)`.

pub mod almgren;
pub mod asymptotics;
pub mod error;
pub mod exterior;
pub mod fem;
pub mod geometry;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
