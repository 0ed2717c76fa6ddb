//! First-kind Bessel functions, their zeros, and half-disk Dirichlet modes.
//!
//! The half-disk {|x| < R0, x1 > 0} has the Dirichlet eigenfunctions
//! A J_m(sqrt(lambda) r) sin(m theta), lambda = (j_{m,n} / R0)^2, m >= 1,
//! where j_{m,n} is the n-th positive zero of J_m and theta is measured
//! from the positive x2-axis. These closed forms act as the reference for
//! the finite element eigensolver.

use crate::error::{Error, Result};

/// J_m(x) by the alternating power series with compensated summation.
/// Accurate to near machine precision for the argument range used here
/// (zeros up to roughly x = 30).
pub fn bessel_j(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // First term: (x/2)^m / m!.
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut comp = 0.0;
    let x2 = half * half;
    for j in 1..200 {
        term *= -x2 / (j as f64 * (j as f64 + m as f64));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

/// Derivative via the standard recurrence.
pub fn bessel_j_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

/// n-th positive zero of J_m (n starts at 1), by scanning for sign changes
/// and bisecting to near machine precision.
pub fn bessel_zero(m: u32, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("zero index starts at 1".into()));
    }
    let step = 0.05;
    let mut x_prev = 0.25;
    let mut f_prev = bessel_j(m, x_prev);
    let mut found = 0usize;
    let mut x = x_prev;
    for _ in 0..4000 {
        x += step;
        let f = bessel_j(m, x);
        if f_prev != 0.0 && f_prev.signum() != f.signum() {
            found += 1;
            if found == n {
                let (mut a, mut b) = (x_prev, x);
                let mut fa = f_prev;
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let fm = bessel_j(m, mid);
                    if fa.signum() == fm.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                    if b - a < 1e-15 * b {
                        break;
                    }
                }
                return Ok(0.5 * (a + b));
            }
        }
        x_prev = x;
        f_prev = f;
    }
    Err(Error::NonConvergence(format!(
        "zero {n} of J_{m} not found in scan range"
    )))
}

/// One closed-form half-disk mode.
#[derive(Debug, Clone, Copy)]
pub struct BesselMode {
    /// Angular index (number of the sin(m theta) harmonic), m >= 1.
    pub m: u32,
    /// Radial index, n >= 1.
    pub n: usize,
    /// Dirichlet eigenvalue (j_{m,n} / r0)^2.
    pub lambda: f64,
    /// Amplitude making the mode L^2-normalized on the half-disk.
    pub norm_a: f64,
    /// Leading coefficient: the mode behaves like c r^m sin(m theta) at the
    /// origin, c = A (sqrt(lambda)/2)^m / m!.
    pub coeff_c: f64,
}

impl BesselMode {
    /// Mode value at a point of the half-disk (x1 > 0).
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let theta = p[0].atan2(p[1]);
        self.norm_a * bessel_j(self.m, self.lambda.sqrt() * r) * (self.m as f64 * theta).sin()
    }
}

/// The (m, n) Dirichlet mode of the half-disk of radius `r0`.
pub fn bessel_eigen(r0: f64, m: u32, n: usize) -> Result<BesselMode> {
    if !(r0 > 0.0) || m == 0 {
        return Err(Error::InvalidParameter(
            "need r0 > 0 and angular index m >= 1".into(),
        ));
    }
    let j = bessel_zero(m, n)?;
    let lambda = (j / r0).powi(2);
    // Norm: int p phi^2 = A^2 (pi/2) (r0^2/2) J_{m+1}(j)^2 = 1.
    let jn = bessel_j(m + 1, j);
    let norm_a = 2.0 / (std::f64::consts::PI.sqrt() * r0 * jn.abs());
    let mut c = norm_a * (lambda.sqrt() / 2.0).powi(m as i32);
    for k in 1..=m {
        c /= k as f64;
    }
    Ok(BesselMode {
        m,
        n,
        lambda,
        norm_a,
        coeff_c: c,
    })
}

/// First `count` half-disk modes ordered by eigenvalue.
pub fn half_disk_spectrum(r0: f64, count: usize) -> Result<Vec<BesselMode>> {
    let mut modes = Vec::new();
    for m in 1..=14u32 {
        for n in 1..=10usize {
            modes.push(bessel_eigen(r0, m, n)?);
        }
    }
    modes.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    modes.truncate(count);
    Ok(modes)
}
