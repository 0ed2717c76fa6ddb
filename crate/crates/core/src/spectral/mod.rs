//! Dirichlet spectra: closed-form half-disk modes, finite element
//! eigensolves, and branch tracking across a shrinking boundary tube.

pub mod bessel;
mod branch;
mod solve;

pub use bessel::{bessel_eigen, bessel_j, bessel_j_prime, bessel_zero, half_disk_spectrum, BesselMode};
pub use branch::{
    branch_point, match_mode, mode_overlaps, track_branch, BranchConfig, BranchPoint, BranchTrack,
};
pub use solve::{angular_coefficients, orient_modes, solve_dirichlet_modes, DirichletModes};
