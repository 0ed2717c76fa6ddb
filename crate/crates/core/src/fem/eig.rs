//! Shift-invert Lanczos for the pencil K u = lambda M u.
//!
//! The operator C = (K - shift M)^{-1} M is self-adjoint in the inner
//! product induced by A = K - shift M, which must be positive definite
//! (shift below the spectrum; zero works for Dirichlet problems). Lanczos
//! runs in that inner product with full reorthogonalization; the largest
//! Ritz values of C are the smallest eigenvalues of the pencil. A positive
//! semidefinite singular M (e.g. boundary mass) is handled uniformly:
//! spurious zero Ritz values correspond to infinite pencil eigenvalues and
//! are discarded.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::solve::LinearSolver;
use super::sparse::SparseMatrix;
use super::{EigenPair, SolverConfig};
use crate::error::{Error, Result};

fn add_scaled(a: &SparseMatrix, b: &SparseMatrix, alpha: f64) -> SparseMatrix {
    let mut triplets = Vec::with_capacity(a.nnz() + b.nnz());
    for r in 0..a.n_rows {
        for k in a.row_ptr[r]..a.row_ptr[r + 1] {
            triplets.push((r, a.col_idx[k], a.values[k]));
        }
    }
    for r in 0..b.n_rows {
        for k in b.row_ptr[r]..b.row_ptr[r + 1] {
            triplets.push((r, b.col_idx[k], alpha * b.values[k]));
        }
    }
    SparseMatrix::from_triplets(a.n_rows, a.n_cols, &triplets)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Smallest `num_eigs` eigenpairs of K u = lambda M u on the free dofs.
/// Returned vectors are M-normalized; eigenvalues ascend. Close pairs
/// (relative gap below 1e-6) are reported as an error because downstream
/// branch tracking assumes simple eigenvalues.
pub fn solve_generalized_eig(
    k: &SparseMatrix,
    m: &SparseMatrix,
    cfg: &SolverConfig,
) -> Result<Vec<EigenPair>> {
    let n = k.n_rows;
    if m.n_rows != n || k.n_cols != n || m.n_cols != n {
        return Err(Error::InvalidParameter("pencil shapes differ".into()));
    }
    if cfg.num_eigs == 0 {
        return Ok(Vec::new());
    }
    let a = if cfg.shift == 0.0 {
        k.clone()
    } else {
        add_scaled(k, m, -cfg.shift)
    };
    let solver = LinearSolver::new(&a).map_err(|e| {
        Error::LinearSolve(format!(
            "shifted matrix K - {} M is not positive definite: {e}",
            cfg.shift
        ))
    })?;

    let max_basis = cfg.max_basis.min(n).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut a_basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    // Deterministic start vector.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1234);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let av = a.matvec(&v);
    let nv = dot(&v, &av).sqrt();
    if nv == 0.0 {
        return Err(Error::NonConvergence("zero start vector".into()));
    }
    let mut av: Vec<f64> = av.iter().map(|x| x / nv).collect();
    for x in v.iter_mut() {
        *x /= nv;
    }

    let mut breakdown = false;
    let mut checkpoint = (2 * cfg.num_eigs + 20).min(max_basis);
    loop {
        // Extend the Lanczos basis up to the next checkpoint.
        while basis.len() < checkpoint && !breakdown {
            basis.push(v.clone());
            a_basis.push(av.clone());
            let j = basis.len() - 1;
            let mv = m.matvec(&basis[j]);
            let mut w = solver.solve(&mv)?;
            let alpha = dot(&w, &a_basis[j]);
            alphas.push(alpha);
            // Full reorthogonalization, two classical Gram-Schmidt sweeps.
            for _ in 0..2 {
                for (vi, avi) in basis.iter().zip(&a_basis) {
                    let c = dot(avi, &w);
                    for (wx, vx) in w.iter_mut().zip(vi) {
                        *wx -= c * vx;
                    }
                }
            }
            let aw = a.matvec(&w);
            let beta2 = dot(&w, &aw);
            let beta = beta2.max(0.0).sqrt();
            let scale = alphas
                .iter()
                .map(|x| x.abs())
                .fold(f64::MIN_POSITIVE, f64::max);
            if beta <= 1e-14 * scale.max(1.0) {
                breakdown = true;
                break;
            }
            betas.push(beta);
            v = w.iter().map(|x| x / beta).collect();
            av = aw.iter().map(|x| x / beta).collect();
        }

        // Ritz extraction from the tridiagonal.
        let b = basis.len();
        let mut t = DMatrix::<f64>::zeros(b, b);
        for i in 0..b {
            t[(i, i)] = alphas[i];
            if i + 1 < b {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .partial_cmp(&eig.eigenvalues[i])
                .unwrap()
        });

        let mut pairs: Vec<EigenPair> = Vec::new();
        let mut all_converged = true;
        for &idx in order.iter() {
            if pairs.len() == cfg.num_eigs {
                break;
            }
            let mu = eig.eigenvalues[idx];
            if mu <= 1e-12 {
                // Remaining Ritz values correspond to infinite eigenvalues.
                all_converged = false;
                break;
            }
            let lambda = cfg.shift + 1.0 / mu;
            let mut u = vec![0.0; n];
            for (j, (vj, &s)) in basis.iter().zip(eig.eigenvectors.column(idx).iter()).enumerate()
            {
                let _ = j;
                for (ux, vx) in u.iter_mut().zip(vj) {
                    *ux += s * vx;
                }
            }
            let ku = k.matvec(&u);
            let mu_vec = m.matvec(&u);
            let res: f64 = ku
                .iter()
                .zip(&mu_vec)
                .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
                .sum::<f64>()
                .sqrt();
            if res > cfg.tol * norm(&ku) {
                all_converged = false;
                break;
            }
            let mnorm = dot(&u, &mu_vec).sqrt();
            if mnorm == 0.0 {
                all_converged = false;
                break;
            }
            let u: Vec<f64> = u.iter().map(|x| x / mnorm).collect();
            pairs.push(EigenPair { lambda, vector: u });
        }

        if all_converged && pairs.len() == cfg.num_eigs {
            pairs.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
            for w in pairs.windows(2) {
                let gap = (w[1].lambda - w[0].lambda).abs();
                if gap < 1e-6 * w[1].lambda.abs().max(w[0].lambda.abs()) {
                    return Err(Error::Degenerate(format!(
                        "eigenvalues {} and {} too close for simple-branch tracking",
                        w[0].lambda, w[1].lambda
                    )));
                }
            }
            return Ok(pairs);
        }
        if breakdown || basis.len() >= max_basis {
            return Err(Error::NonConvergence(format!(
                "{} of {} eigenpairs converged with basis {}",
                pairs.len(),
                cfg.num_eigs,
                basis.len()
            )));
        }
        checkpoint = (checkpoint + 20).min(max_basis);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> (SparseMatrix, SparseMatrix) {
        // Dirichlet Laplacian on (0, 1), n interior nodes, linear elements.
        let h = 1.0 / (n as f64 + 1.0);
        let mut tk = Vec::new();
        let mut tm = Vec::new();
        for i in 0..n {
            tk.push((i, i, 2.0 / h));
            tm.push((i, i, 4.0 * h / 6.0));
            if i + 1 < n {
                tk.push((i, i + 1, -1.0 / h));
                tk.push((i + 1, i, -1.0 / h));
                tm.push((i, i + 1, h / 6.0));
                tm.push((i + 1, i, h / 6.0));
            }
        }
        (
            SparseMatrix::from_triplets(n, n, &tk),
            SparseMatrix::from_triplets(n, n, &tm),
        )
    }

    #[test]
    fn interval_eigenvalues_match_theory() {
        let n = 199;
        let (k, m) = laplace_1d(n);
        let cfg = SolverConfig {
            shift: 0.0,
            num_eigs: 4,
            tol: 1e-10,
            max_basis: 120,
        };
        let pairs = solve_generalized_eig(&k, &m, &cfg).unwrap();
        let pi = std::f64::consts::PI;
        for (j, p) in pairs.iter().enumerate() {
            let exact = ((j + 1) as f64 * pi).powi(2);
            let rel = (p.lambda - exact).abs() / exact;
            assert!(rel < 1e-3, "lambda_{j} = {}, exact {exact}", p.lambda);
            // M-normalization.
            let mn = m.bilinear(&p.vector, &p.vector);
            assert!((mn - 1.0).abs() < 1e-10);
            // Residual certificate.
            let ku = k.matvec(&p.vector);
            let mu = m.matvec(&p.vector);
            let r: f64 = ku
                .iter()
                .zip(&mu)
                .map(|(a, b)| (a - p.lambda * b) * (a - p.lambda * b))
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-9 * norm(&ku));
        }
        // M-orthogonality across pairs.
        for i in 0..pairs.len() {
            for j in 0..i {
                let g = m.bilinear(&pairs[i].vector, &pairs[j].vector);
                assert!(g.abs() < 1e-8, "gram[{i}][{j}] = {g}");
            }
        }
    }

    #[test]
    fn shift_accelerates_and_agrees() {
        let (k, m) = laplace_1d(149);
        let base = SolverConfig {
            shift: 0.0,
            num_eigs: 2,
            tol: 1e-10,
            max_basis: 100,
        };
        let shifted = SolverConfig {
            shift: 5.0,
            ..base
        };
        let a = solve_generalized_eig(&k, &m, &base).unwrap();
        let b = solve_generalized_eig(&k, &m, &shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.lambda - y.lambda).abs() < 1e-8 * x.lambda);
        }
    }

    #[test]
    fn shift_above_spectrum_fails_cleanly() {
        let (k, m) = laplace_1d(49);
        let cfg = SolverConfig {
            shift: 1e4,
            num_eigs: 1,
            tol: 1e-10,
            max_basis: 60,
        };
        match solve_generalized_eig(&k, &m, &cfg) {
            Err(Error::LinearSolve(_)) => {}
            other => panic!("expected indefinite-shift error, got {other:?}"),
        }
    }

    #[test]
    fn singular_mass_pencil_finds_finite_eigenvalues() {
        // Pencil with M supported on a strict subspace: K tridiagonal,
        // M only on the first 3 coordinates. Finite eigenvalues exist and
        // Lanczos must not stall on the infinite ones.
        let n = 40;
        let (k, _) = laplace_1d(n);
        let mut tm = Vec::new();
        for i in 0..3 {
            tm.push((i, i, 1.0));
        }
        let m = SparseMatrix::from_triplets(n, n, &tm);
        let cfg = SolverConfig {
            shift: 0.0,
            num_eigs: 2,
            tol: 1e-9,
            max_basis: 40,
        };
        let pairs = solve_generalized_eig(&k, &m, &cfg).unwrap();
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            assert!(p.lambda.is_finite() && p.lambda > 0.0);
            let mn = m.bilinear(&p.vector, &p.vector);
            assert!((mn - 1.0).abs() < 1e-9);
        }
        assert!(pairs[0].lambda < pairs[1].lambda);
    }
}
