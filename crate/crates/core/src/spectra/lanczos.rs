//! Lowest eigenpairs by block Lanczos with full reorthogonalization.
//!
//! The Krylov basis is kept in full. Each new block is orthogonalized twice
//! against the whole basis (classical Gram-Schmidt, two passes), and the
//! projected matrix is assembled from those coefficients. Ritz pairs come
//! from a dense symmetric eigensolve of the projected matrix. When the basis
//! reaches `max_basis` it is thick-restarted: the lowest Ritz vectors are
//! kept and the iteration continues from the pending block. Converged pairs
//! are confirmed with explicit residuals.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{HamiltonianSpec, SparseOp, SzSector};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanczosConfig {
    /// Residual tolerance relative to the row-sum bound on `‖H‖`.
    pub tol: f64,
    /// Basis size that triggers a restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Seed of the random start block.
    pub seed: u64,
    /// Block width; defaults to the number of wanted pairs.
    pub block_size: Option<usize>,
    /// Spaces up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol: 1e-9,
            max_basis: 200,
            max_restarts: 30,
            seed: 0x51A7_E5EE,
            block_size: None,
            dense_threshold: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigResult {
    pub n_sites: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Real amplitudes over the full `2^N` space, one per eigenvalue.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖H v - E v‖` per pair.
    pub residual_norms: Vec<f64>,
    pub sector: Option<SzSector>,
    /// Operator applications used.
    pub matvecs: usize,
    /// Lowest Ritz value at each convergence check.
    pub ritz_history: Vec<f64>,
}

/// The `m` lowest eigenpairs of `h`, optionally within a fixed-`S^z` sector.
pub fn lowest_eigenpairs(h: &HamiltonianSpec, m: usize, sector: Option<SzSector>) -> Result<EigResult> {
    lowest_eigenpairs_with(h, m, sector, &LanczosConfig::default())
}

pub fn lowest_eigenpairs_with(
    h: &HamiltonianSpec,
    m: usize,
    sector: Option<SzSector>,
    cfg: &LanczosConfig,
) -> Result<EigResult> {
    if m == 0 {
        return Err(Error::invalid("need at least one eigenpair"));
    }
    let op = SparseOp::new(h, sector)?;
    let dim = op.dim();
    if m > dim {
        return Err(Error::invalid(format!("{m} eigenpairs requested in a space of dimension {dim}")));
    }
    let scale = h.norm_bound();
    let mut solver = Solver { op: &op, matvecs: 0 };
    let raw = if dim <= cfg.dense_threshold.max(m) {
        solver.dense(m)
    } else {
        solver.block_lanczos(m, cfg, scale)?
    };
    Ok(EigResult {
        n_sites: h.n_sites,
        eigenvalues: raw.values,
        eigenvectors: raw.vectors.iter().map(|v| op.expand(v)).collect(),
        residual_norms: raw.residuals,
        sector,
        matvecs: solver.matvecs,
        ritz_history: raw.history,
    })
}

struct Raw {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    history: Vec<f64>,
}

struct Solver<'a> {
    op: &'a SparseOp,
    matvecs: usize,
}

/// Inner product with eight independent accumulators, so the loop
/// vectorizes while the summation order stays fixed.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    acc.iter().sum::<f64>() + tail
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Ascending eigen-decomposition of a symmetric matrix.
fn sorted_eigen(t: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

impl Solver<'_> {
    fn apply(&mut self, v: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; v.len()];
        self.op.apply(v, &mut y);
        self.matvecs += 1;
        y
    }

    fn residual(&mut self, theta: f64, x: &[f64]) -> f64 {
        let mut hx = self.apply(x);
        axpy(-theta, x, &mut hx);
        norm(&hx)
    }

    fn dense(&mut self, m: usize) -> Raw {
        let dim = self.op.dim();
        let mut t = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for c in 0..dim {
            e[c] = 1.0;
            let col = self.apply(&e);
            e[c] = 0.0;
            for (r, v) in col.into_iter().enumerate() {
                t[(r, c)] = v;
            }
        }
        let t = (&t + t.transpose()) * 0.5;
        let (values, vecs) = sorted_eigen(t);
        let vectors: Vec<Vec<f64>> = (0..m).map(|i| vecs.column(i).iter().copied().collect()).collect();
        let residuals = (0..m).map(|i| self.residual(values[i], &vectors[i])).collect();
        Raw { history: vec![values[0]], values: values[..m].to_vec(), vectors, residuals }
    }

    fn block_lanczos(&mut self, m: usize, cfg: &LanczosConfig, scale: f64) -> Result<Raw> {
        let dim = self.op.dim();
        let b = cfg.block_size.unwrap_or(m).clamp(m.min(dim), dim);
        let cap = cfg.max_basis.max(3 * b + m).min(dim);
        let target = cfg.tol * scale;
        // Directions whose norm falls below this after projection are dropped.
        let breakdown = 1e-12 * scale.max(1.0);

        let mut rng = rng::sequential(cfg.seed);
        let mut random_block = |count: usize| -> Vec<Vec<f64>> {
            (0..count).map(|_| (0..dim).map(|_| rng.random::<f64>() - 0.5).collect()).collect()
        };
        let mut basis: Vec<Vec<f64>> = orthonormalize(&[], random_block(b), breakdown);
        let mut t = DMatrix::<f64>::zeros(cap, cap);
        let mut history = Vec::new();
        let mut lo = 0;
        let mut restarts = 0;
        let mut since_check = 0usize;
        let mut worst = f64::INFINITY;

        loop {
            let hi = basis.len();
            // Columns of the projected matrix for the current block; the
            // projected-out images seed the next block.
            let mut images: Vec<Vec<f64>> = (lo..hi).map(|j| self.apply(&basis[j])).collect();
            let coeff = project_out(&basis, &mut images);
            for (c, j) in (lo..hi).enumerate() {
                for (i, row) in coeff.iter().enumerate() {
                    t[(i, j)] = row[c];
                    t[(j, i)] = row[c];
                }
            }
            let k = hi;
            let (mut next, r) = orthonormalize_within(images, breakdown);
            since_check += 1;
            let restart_due = next.is_empty() || basis.len() + next.len() > cap;
            // The dense Ritz solve costs O(k³); amortize it against the
            // O(b·k·dim) block steps in between.
            if k < m || !(restart_due || since_check * b * dim >= 2 * k * k) {
                lo = basis.len();
                basis.extend(next);
                continue;
            }
            since_check = 0;
            let proj = t.view((0, 0), (k, k)).clone_owned();
            let (values, ritz) = sorted_eigen((&proj + proj.transpose()) * 0.5);
            history.push(values[0]);

            // Residual estimate of Ritz pair i: ‖R y_i[last block]‖.
            let estimate = |i: usize| -> f64 {
                r.iter()
                    .map(|row| {
                        let v: f64 = row.iter().enumerate().map(|(c, x)| x * ritz[(lo + c, i)]).sum();
                        v * v
                    })
                    .sum::<f64>()
                    .sqrt()
            };
            if next.is_empty() || (0..m).all(|i| estimate(i) <= target) {
                let vectors: Vec<Vec<f64>> = (0..m).map(|i| ritz_vector(&basis, &ritz, i)).collect();
                let residuals: Vec<f64> = (0..m).map(|i| self.residual(values[i], &vectors[i])).collect();
                worst = residuals.iter().copied().fold(0.0, f64::max);
                if worst <= target {
                    return Ok(Raw { values: values[..m].to_vec(), vectors, residuals, history });
                }
            }
            if next.is_empty() {
                // Invariant subspace: continue from fresh random directions.
                next = orthonormalize(&basis, random_block(b), breakdown);
                if next.is_empty() {
                    return Err(Error::NoConvergence { iterations: self.matvecs, residual: worst });
                }
            }
            if basis.len() + next.len() > cap {
                // Thick restart: keep the lowest Ritz vectors, whose projected
                // matrix is diagonal, and carry on from the pending block.
                restarts += 1;
                if restarts > cfg.max_restarts {
                    return Err(Error::NoConvergence { iterations: self.matvecs, residual: worst });
                }
                let keep = ((cap - next.len()) / 2).max(m).min(k);
                basis = (0..keep).map(|i| ritz_vector(&basis, &ritz, i)).collect();
                t.fill(0.0);
                for (i, &v) in values.iter().take(keep).enumerate() {
                    t[(i, i)] = v;
                }
            }
            lo = basis.len();
            basis.extend(next);
        }
    }
}

fn ritz_vector(basis: &[Vec<f64>], ritz: &DMatrix<f64>, i: usize) -> Vec<f64> {
    let mut x = vec![0.0; basis[0].len()];
    for (j, v) in basis.iter().enumerate() {
        axpy(ritz[(j, i)], v, &mut x);
    }
    let n = norm(&x);
    x.iter_mut().for_each(|e| *e /= n);
    x
}

/// Orthonormalize `block` against `basis` and itself, dropping dependent
/// directions.
fn orthonormalize(basis: &[Vec<f64>], mut block: Vec<Vec<f64>>, breakdown: f64) -> Vec<Vec<f64>> {
    project_out(basis, &mut block);
    orthonormalize_within(block, breakdown.min(1e-8)).0
}

/// Remove the span of `basis` from every vector of `block` with two passes
/// of classical Gram-Schmidt. Each pass streams the basis once for the whole
/// block. Returns the accumulated coefficients `coeff[i][c] = v_i · w_c`.
fn project_out(basis: &[Vec<f64>], block: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let mut coeff = vec![vec![0.0; block.len()]; basis.len()];
    for _pass in 0..2 {
        let pass: Vec<Vec<f64>> = basis.iter().map(|v| block.iter().map(|w| dot(v, w)).collect()).collect();
        for (v, row) in basis.iter().zip(&pass) {
            for (w, &c) in block.iter_mut().zip(row) {
                axpy(-c, v, w);
            }
        }
        for (acc, row) in coeff.iter_mut().zip(&pass) {
            acc.iter_mut().zip(row).for_each(|(a, c)| *a += c);
        }
    }
    coeff
}

/// Gram-Schmidt (two passes) inside a block already orthogonal to the basis.
/// Returns the orthonormal vectors `q` and rows of `R` with `w_c = Σ_l R[l][c] q_l`.
fn orthonormalize_within(block: Vec<Vec<f64>>, breakdown: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let width = block.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(width);
    let mut r: Vec<Vec<f64>> = Vec::with_capacity(width);
    for (c, mut w) in block.into_iter().enumerate() {
        let mut coeff = vec![0.0; q.len()];
        for _pass in 0..2 {
            for (l, v) in q.iter().enumerate() {
                let x = dot(v, &w);
                coeff[l] += x;
                axpy(-x, v, &mut w);
            }
        }
        for (l, x) in coeff.into_iter().enumerate() {
            r[l][c] = x;
        }
        let n = norm(&w);
        if n > breakdown {
            w.iter_mut().for_each(|e| *e /= n);
            let mut row = vec![0.0; width];
            row[c] = n;
            r.push(row);
            q.push(w);
        }
    }
    (q, r)
}
