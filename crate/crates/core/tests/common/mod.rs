//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use bitsig::spectra::{HamiltonianSpec, Term};
use nalgebra::{DMatrix, Matrix2, SymmetricEigen};

/// Local basis is (|0>, |1>) = (down, up).
fn sz() -> Matrix2<f64> {
    Matrix2::new(-0.5, 0.0, 0.0, 0.5)
}

fn sx() -> Matrix2<f64> {
    Matrix2::new(0.0, 0.5, 0.5, 0.0)
}

/// `i S^y`, which is real.
fn isy() -> Matrix2<f64> {
    Matrix2::new(0.0, 0.5, -0.5, 0.0)
}

/// Tensor product over all sites with site 0 as the leftmost factor.
fn embed(n: usize, ops: &[(usize, Matrix2<f64>)]) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::identity(1, 1);
    for site in 0..n {
        let local = ops.iter().find(|(s, _)| *s == site).map_or_else(Matrix2::identity, |(_, m)| *m);
        let local = DMatrix::from_column_slice(2, 2, local.as_slice());
        out = out.kronecker(&local);
    }
    out
}

/// Dense matrix of `h` assembled from Kronecker products.
pub fn dense_hamiltonian(h: &HamiltonianSpec) -> DMatrix<f64> {
    let n = h.n_sites;
    let mut m = DMatrix::<f64>::zeros(1 << n, 1 << n);
    for term in &h.terms {
        match *term {
            Term::Zz { i, j, coupling } => m += embed(n, &[(i, sz()), (j, sz())]) * coupling,
            Term::XField { site, coupling } => m += embed(n, &[(site, sx())]) * coupling,
            Term::Heisenberg { i, j, coupling } => {
                let s = embed(n, &[(i, sx()), (j, sx())]) - embed(n, &[(i, isy()), (j, isy())])
                    + embed(n, &[(i, sz()), (j, sz())]);
                m += s * coupling;
            }
        }
    }
    m
}

pub fn dense_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Rows and columns of basis states with `n_up` set bits.
pub fn restrict_to_weight(m: &DMatrix<f64>, n_up: u32) -> DMatrix<f64> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|x| x.count_ones() == n_up).collect();
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// Lowest `count` levels of the spin-1/2 TFIM ring `J Σ S^z S^z + h Σ S^x`
/// on an even number of sites, from its Jordan-Wigner solution.
///
/// In Pauli form the couplings are `J/4` and `h/2`. The even-parity sector
/// uses antiperiodic momenta and keeps states with an even number of
/// quasiparticles; the odd sector uses periodic momenta, where the `k = 0`
/// and `k = π` modes stay unpaired, and keeps odd occupations.
pub fn free_fermion_tfim_levels(n: usize, j: f64, h: f64, count: usize) -> Vec<f64> {
    assert!(n % 2 == 0 && n <= 20);
    let (jp, hp) = (j.abs() / 4.0, h.abs() / 2.0);
    let eps = |k: f64| 2.0 * (jp * jp + hp * hp - 2.0 * jp * hp * k.cos()).sqrt();
    let two_pi = 2.0 * std::f64::consts::PI;
    let even: Vec<f64> = (0..n).map(|m| eps((2 * m + 1) as f64 * std::f64::consts::PI / n as f64)).collect();
    let odd: Vec<f64> = (0..n)
        .map(|m| match m {
            0 => 2.0 * (hp - jp),
            m if 2 * m == n => 2.0 * (hp + jp),
            m => eps(two_pi * m as f64 / n as f64),
        })
        .collect();
    let mut levels = Vec::with_capacity(1 << n);
    for (modes, parity) in [(&even, 0u32), (&odd, 1u32)] {
        for occ in 0usize..1 << n {
            if occ.count_ones() % 2 != parity {
                continue;
            }
            levels.push(modes.iter().enumerate().map(|(b, e)| e * ((occ >> b & 1) as f64 - 0.5)).sum::<f64>());
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.truncate(count);
    levels
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Half-cut entropy of the Dicke state `|D^N_w>`; the Schmidt weights are
/// hypergeometric.
pub fn dicke_entropy(n: usize, w: usize) -> f64 {
    let half = n / 2;
    (0..=w)
        .map(|a| binomial(half, a) * binomial(n - half, w - a) / binomial(n, w))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// `½(1 - 1/Λ) Λ^-k`, the expected `D_k` of uncorrelated symmetric bits.
pub fn iid_partial(lambda: usize, k: usize) -> f64 {
    let l = lambda as f64;
    0.5 * (1.0 - 1.0 / l) * l.powi(-(k as i32))
}
