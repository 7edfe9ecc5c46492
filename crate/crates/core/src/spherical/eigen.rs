//! Lowest eigenpairs of `K x = mu M x` by shift-invert subspace iteration.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{reverse_cuthill_mckee, CsrMatrix, SkylineCholesky};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Factorized operator is `K - shift * M`; must keep it positive definite.
    pub shift: f64,
    /// Extra block vectors beyond the requested count.
    pub guard_vectors: usize,
    pub max_iterations: usize,
    /// Relative change of the Ritz values that counts as converged.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { shift: -0.25, guard_vectors: 8, max_iterations: 2000, tolerance: 1e-12, seed: 7 }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
    /// `|K x - mu M x| / |M x|` per pair.
    pub residuals: Vec<f64>,
}

pub fn lowest_eigenpairs(k: &CsrMatrix, m: &CsrMatrix, count: usize, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = k.n;
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!("{count} eigenpairs requested from a problem of size {n}")));
    }
    let a = k.add_scaled(-opts.shift, m);
    let perm = reverse_cuthill_mckee(&a);
    let ap = a.restrict(&perm);
    let chol = SkylineCholesky::factor(&ap)?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut b: Vec<f64> = perm.iter().map(|&i| rhs[i]).collect();
        chol.solve(&mut b);
        let mut x = vec![0.0; n];
        for (p, &i) in perm.iter().enumerate() {
            x[i] = b[p];
        }
        x
    };
    let p = (count + opts.guard_vectors).max(2 * count).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
    let mut prev: Vec<f64> = vec![f64::INFINITY; count];
    let mut settled = 0;
    let mut mv = vec![0.0; n];
    for it in 1..=opts.max_iterations {
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|xi| {
                m.mul_vec(xi, &mut mv);
                solve(&mv)
            })
            .collect();
        let (theta, q) = rayleigh_ritz(k, m, &y)?;
        x = (0..p)
            .map(|c| {
                let mut v = vec![0.0; n];
                for (r, yr) in y.iter().enumerate() {
                    let s = q[(r, c)];
                    v.iter_mut().zip(yr).for_each(|(a, b)| *a += s * b);
                }
                v
            })
            .collect();
        let change = theta
            .iter()
            .zip(&prev)
            .map(|(t, p)| (t - p).abs() / t.abs().max(1.0))
            .fold(0.0, f64::max);
        prev = theta[..count].to_vec();
        settled = if change <= opts.tolerance { settled + 1 } else { 0 };
        if settled >= 2 {
            let residuals = residuals(k, m, &x[..count], &prev);
            return Ok(EigenPairs { values: prev, vectors: x[..count].to_vec(), iterations: it, residuals });
        }
    }
    let res = residuals(k, m, &x[..count], &prev);
    Err(Error::EigenNonConvergence {
        iterations: opts.max_iterations,
        residual: res.into_iter().fold(0.0, f64::max),
    })
}

/// Ritz values (ascending) and coefficient matrix for the span of `y`.
fn rayleigh_ritz(k: &CsrMatrix, m: &CsrMatrix, y: &[Vec<f64>]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let p = y.len();
    let n = k.n;
    let mut ky = vec![vec![0.0; n]; p];
    let mut my = vec![vec![0.0; n]; p];
    for i in 0..p {
        k.mul_vec(&y[i], &mut ky[i]);
        m.mul_vec(&y[i], &mut my[i]);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let kr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
    let mr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i])));
    let l = mr
        .cholesky()
        .ok_or_else(|| Error::Solver("projected mass matrix lost definiteness".into()))?
        .l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Solver("projected mass factor is singular".into()))?;
    let c = &linv * kr * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let z = DMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((theta, linv.transpose() * z))
}

fn residuals(k: &CsrMatrix, m: &CsrMatrix, x: &[Vec<f64>], mu: &[f64]) -> Vec<f64> {
    let n = k.n;
    let (mut kx, mut mx) = (vec![0.0; n], vec![0.0; n]);
    x.iter()
        .zip(mu)
        .map(|(v, &t)| {
            k.mul_vec(v, &mut kx);
            m.mul_vec(v, &mut mx);
            let r: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - t * b).powi(2)).sum::<f64>().sqrt();
            r / mx.iter().map(|b| b * b).sum::<f64>().sqrt()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_generalized_problem() {
        // 1D FEM Laplacian with Neumann ends: eigenvalues approach (j pi)^2
        let n = 60;
        let h = 1.0 / (n - 1) as f64;
        let mut kt = Vec::new();
        let mut mt = Vec::new();
        for e in 0..n - 1 {
            for (a, b, kv, mv) in [(e, e, 1.0, 2.0), (e + 1, e + 1, 1.0, 2.0), (e, e + 1, -1.0, 1.0), (e + 1, e, -1.0, 1.0)] {
                kt.push((a, b, kv / h));
                mt.push((a, b, mv * h / 6.0));
            }
        }
        let k = CsrMatrix::from_triplets(n, kt);
        let m = CsrMatrix::from_triplets(n, mt);
        let pairs = lowest_eigenpairs(&k, &m, 4, &EigenOptions::default()).unwrap();
        assert!(pairs.values[0].abs() < 1e-10);
        let mut dk = DMatrix::zeros(n, n);
        let mut dm = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, v) in k.row(i) {
                dk[(i, j)] = v;
            }
            for (j, v) in m.row(i) {
                dm[(i, j)] = v;
            }
        }
        let l = dm.cholesky().unwrap().l();
        let li = l.try_inverse().unwrap();
        let mut dense: Vec<f64> = SymmetricEigen::new(&li * dk * li.transpose()).eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for i in 0..4 {
            assert!((pairs.values[i] - dense[i]).abs() < 1e-9 * dense[i].max(1.0));
            assert!(pairs.residuals[i] < 1e-6);
            // Rayleigh quotient of the returned vector
            let v = &pairs.vectors[i];
            let rq = k.dot_form(v, v) / m.dot_form(v, v);
            assert!((rq - pairs.values[i]).abs() < 1e-10);
        }
    }
}
