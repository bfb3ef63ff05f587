//! Lowest eigenpairs of Hermitian matrices.
//!
//! Dense `SymmetricEigen` below `dense_limit`; above it, an explicitly
//! restarted Lanczos with full reorthogonalization that finds one pair at a
//! time and locks it. A final run in the complement of the locked set
//! confirms nothing lower was missed, which also handles degenerate levels.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::sparse::{Csr, SparseHermitian};

#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Use the dense solver up to this dimension.
    pub dense_limit: usize,
    /// Relative residual tolerance for Lanczos pairs.
    pub tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_limit: 2000,
            tol: 1e-10,
            max_krylov: 100,
            max_restarts: 300,
            seed: 0x5eed_1a2c,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

pub fn low_spectrum(h: &SparseHermitian, k: usize) -> Result<Vec<EigenPair>> {
    low_spectrum_with(h, k, &EigenOptions::default())
}

pub fn low_spectrum_with(h: &SparseHermitian, k: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    if k == 0 || k > h.dim() {
        return Err(invalid(format!("requested {k} eigenpairs of a {}-dimensional matrix", h.dim())));
    }
    if h.dim() <= opts.dense_limit {
        Ok(dense_pairs(h, k))
    } else {
        lanczos_pairs(h, k, opts)
    }
}

/// Eigenvalues only; skips eigenvector accumulation on the dense path.
pub fn low_eigenvalues(h: &SparseHermitian, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > h.dim() {
        return Err(invalid(format!("requested {k} eigenvalues of a {}-dimensional matrix", h.dim())));
    }
    if h.dim() > EigenOptions::default().dense_limit {
        return Ok(lanczos_pairs(h, k, &EigenOptions::default())?
            .into_iter()
            .map(|p| p.value)
            .collect());
    }
    let mut vals: Vec<f64> = match h.to_dense_real() {
        Some(m) => m.symmetric_eigenvalues().iter().copied().collect(),
        None => h.to_dense().symmetric_eigenvalues().iter().copied().collect(),
    };
    vals.sort_by(f64::total_cmp);
    vals.truncate(k);
    Ok(vals)
}

fn dense_pairs(h: &SparseHermitian, k: usize) -> Vec<EigenPair> {
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = match h.to_dense_real() {
        Some(m) => {
            let e = SymmetricEigen::new(m);
            (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        }
        None => {
            let e = SymmetricEigen::new(h.to_dense());
            (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
        }
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
        .into_iter()
        .take(k)
        .map(|i| EigenPair {
            value: values[i],
            vector: vectors.column(i).iter().copied().collect(),
        })
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for q in basis {
        let c = dot(q, w);
        for (wi, qi) in w.iter_mut().zip(q) {
            *wi -= c * qi;
        }
    }
}

struct RunOutcome {
    value: f64,
    vector: Vec<Complex64>,
    residual: f64,
    matvecs: usize,
}

fn lanczos_lowest(
    csr: &Csr,
    locked: &[Vec<Complex64>],
    mut v: Vec<Complex64>,
    opts: &EigenOptions,
) -> std::result::Result<RunOutcome, (usize, f64)> {
    let n = csr.dim();
    let room = n - locked.len();
    let kmax = opts.max_krylov.min(room).max(1);
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    let mut w = vec![Complex64::new(0.0, 0.0); n];

    project_out(&mut v, locked);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    for _restart in 0..opts.max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            csr.matvec(&basis[j], &mut w);
            matvecs += 1;
            let alpha = dot(&basis[j], &w).re;
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= alpha * qi;
            }
            if j > 0 {
                let b = betas[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * qi;
                }
            }
            for _ in 0..2 {
                project_out(&mut w, locked);
                project_out(&mut w, &basis);
            }
            let beta = norm(&w);
            alphas.push(alpha);

            let m = alphas.len();
            let exhausted = m == kmax || beta <= 1e-13 * alpha.abs().max(1.0);
            if exhausted || m % 5 == 0 {
                let t = DMatrix::from_fn(m, m, |r, c| {
                    if r == c {
                        alphas[r]
                    } else if r + 1 == c {
                        betas[r]
                    } else if c + 1 == r {
                        betas[c]
                    } else {
                        0.0
                    }
                });
                let e = SymmetricEigen::new(t);
                let (imin, theta) = e
                    .eigenvalues
                    .iter()
                    .copied()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("nonempty tridiagonal");
                let s = e.eigenvectors.column(imin);
                let estimate = beta * s[m - 1].abs();
                let scale = theta.abs().max(1.0);
                if estimate <= opts.tol * scale || exhausted {
                    let mut y = vec![Complex64::new(0.0, 0.0); n];
                    for (i, q) in basis.iter().enumerate() {
                        for (yi, qi) in y.iter_mut().zip(q) {
                            *yi += s[i] * qi;
                        }
                    }
                    project_out(&mut y, locked);
                    let ny = norm(&y);
                    y.iter_mut().for_each(|x| *x /= ny);
                    csr.matvec(&y, &mut w);
                    matvecs += 1;
                    let rq = dot(&y, &w).re;
                    for (wi, yi) in w.iter_mut().zip(&y) {
                        *wi -= rq * yi;
                    }
                    // components along locked vectors belong to them, not to y
                    project_out(&mut w, locked);
                    let residual = norm(&w);
                    last_residual = residual;
                    if residual <= opts.tol * rq.abs().max(1.0) {
                        return Ok(RunOutcome {
                            value: rq,
                            vector: y,
                            residual,
                            matvecs,
                        });
                    }
                    v = y;
                    break;
                }
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }
    }
    Err((matvecs, last_residual))
}

fn lanczos_pairs(h: &SparseHermitian, k: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    let csr = h.to_csr();
    let n = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<EigenPair> = Vec::new();
    let mut matvecs = 0;
    let mut worst_residual: f64 = 0.0;

    for _round in 0..(k + 32) {
        if locked.len() == n {
            break;
        }
        let start: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let vecs: Vec<Vec<Complex64>> = locked.iter().map(|p| p.vector.clone()).collect();
        let run = lanczos_lowest(&csr, &vecs, start, opts).map_err(|(iters, residual)| Error::NoConvergence {
            iterations: matvecs + iters,
            residual,
            converged: locked.len(),
            requested: k,
        })?;
        matvecs += run.matvecs;
        worst_residual = worst_residual.max(run.residual);
        let pair = EigenPair {
            value: run.value,
            vector: run.vector,
        };
        if locked.len() < k {
            locked.push(pair);
        } else {
            let top = locked.last().expect("k >= 1").value;
            let slack = 10.0 * opts.tol * top.abs().max(1.0);
            if pair.value < top - slack {
                *locked.last_mut().expect("k >= 1") = pair;
            } else {
                locked.sort_by(|a, b| a.value.total_cmp(&b.value));
                return Ok(locked);
            }
        }
        locked.sort_by(|a, b| a.value.total_cmp(&b.value));
    }
    if locked.len() == n {
        return Ok(locked);
    }
    Err(Error::NoConvergence {
        iterations: matvecs,
        residual: worst_residual,
        converged: locked.len(),
        requested: k,
    })
}
