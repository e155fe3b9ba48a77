//! Spin Hamiltonians, their low-lying eigenstates, and entanglement entropy.

pub mod entropy;
pub mod hamiltonian;
pub mod lanczos;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub use entropy::{binary_entropy, half_cut_entropy, partial_trace_half, von_neumann_entropy};
pub use hamiltonian::{
    build_heisenberg_ring, build_ss_supercell, build_tfim, Bond, BondClass, BondList, HamiltonianSpec, SzSector,
    Term,
};
pub use lanczos::{lowest_eigenpairs, lowest_eigenpairs_with, EigResult, LanczosConfig};

use crate::error::{Error, Result};
use crate::qstate::Statevector;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Ground,
    FirstExcited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectOptions {
    /// Levels closer than this to the ground energy count as ground states.
    pub degeneracy_tol: f64,
    /// Width of the first-excited multiplet.
    pub multiplet_tol: f64,
    /// Seed of the fixed reference vector that picks a member of a
    /// degenerate excited multiplet.
    pub reference_seed: u64,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions { degeneracy_tol: 1e-8, multiplet_tol: 1e-3, reference_seed: 0x0E1C_17ED }
    }
}

/// Pick one eigenstate out of `res`.
///
/// A degenerate ground multiplet yields its global-spin-flip-even member.
/// The first excited level is the lowest above `E₀ + degeneracy_tol`; when
/// it is a multiplet, the normalized projection of a fixed pseudo-random
/// reference vector onto it is returned, which varies smoothly with the
/// Hamiltonian parameters.
pub fn select_state(res: &EigResult, which: Which, degeneracy_tol: f64) -> Result<Statevector> {
    select_state_with(res, which, &SelectOptions { degeneracy_tol, ..SelectOptions::default() })
}

pub fn select_state_with(res: &EigResult, which: Which, opts: &SelectOptions) -> Result<Statevector> {
    let e = &res.eigenvalues;
    let e0 = *e.first().ok_or_else(|| Error::Unresolved("no eigenpairs computed".into()))?;
    match which {
        Which::Ground => {
            let group: Vec<usize> = (0..e.len()).filter(|&i| e[i] <= e0 + opts.degeneracy_tol).collect();
            if group.len() == 1 {
                return Statevector::from_real(&res.eigenvectors[0]);
            }
            Statevector::from_real(&flip_even(res, &group))
        }
        Which::FirstExcited => {
            let i1 = (0..e.len())
                .find(|&i| e[i] > e0 + opts.degeneracy_tol)
                .ok_or_else(|| Error::Unresolved(format!("all {} computed levels are degenerate with E0", e.len())))?;
            let band: Vec<usize> = (i1..e.len()).filter(|&i| e[i] - e[i1] <= opts.multiplet_tol).collect();
            if *band.last().unwrap() == e.len() - 1 {
                return Err(Error::Unresolved(format!(
                    "first excited multiplet at E = {} reaches the last computed level; request more pairs",
                    e[i1]
                )));
            }
            if band.len() == 1 {
                return Statevector::from_real(&res.eigenvectors[i1]);
            }
            let mut r = rng::sequential(opts.reference_seed);
            let reference: Vec<f64> = (0..1usize << res.n_sites).map(|_| r.random::<f64>() - 0.5).collect();
            let mut x = vec![0.0; reference.len()];
            for &i in &band {
                let v = &res.eigenvectors[i];
                let c: f64 = v.iter().zip(&reference).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
            }
            Statevector::from_real(&x)
        }
    }
}

/// Member of span{v_i : i ∈ group} with the largest global-flip eigenvalue.
fn flip_even(res: &EigResult, group: &[usize]) -> Vec<f64> {
    let all = (1usize << res.n_sites) - 1;
    let g = group.len();
    let f = DMatrix::from_fn(g, g, |a, b| {
        let (va, vb) = (&res.eigenvectors[group[a]], &res.eigenvectors[group[b]]);
        va.iter().enumerate().map(|(x, &amp)| amp * vb[x ^ all]).sum::<f64>()
    });
    let eig = SymmetricEigen::new((&f + f.transpose()) * 0.5);
    let best = eig.eigenvalues.imax();
    let mut x = vec![0.0; res.eigenvectors[0].len()];
    for (a, &i) in group.iter().enumerate() {
        let c = eig.eigenvectors[(a, best)];
        x.iter_mut().zip(&res.eigenvectors[i]).for_each(|(xi, vi)| *xi += c * vi);
    }
    x
}

pub const SPECTRUM_CSV_HEADER: &str = "parameter,level_index,energy,sector";

/// Rows `parameter,level_index,energy,sector` (sector is `2Sz` or `full`).
pub fn spectrum_csv_rows(parameter: f64, res: &EigResult) -> String {
    energy_csv_rows(parameter, &res.eigenvalues, res.sector)
}

/// Same rows from bare energies.
pub fn energy_csv_rows(parameter: f64, energies: &[f64], sector: Option<SzSector>) -> String {
    let sector = sector.map_or_else(|| "full".to_string(), |s| s.0.to_string());
    let mut out = String::new();
    for (i, e) in energies.iter().enumerate() {
        let _ = writeln!(out, "{parameter},{i},{e:.12},{sector}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfim_weak_field_ground_is_ghz_like() {
        let h = build_tfim(10, -1.0, 0.05).unwrap();
        let res = lowest_eigenpairs(&h, 2, None).unwrap();
        let s = select_state(&res, Which::Ground, 1e-8).unwrap();
        let p = s.probabilities();
        assert!(p[0] + p[1023] > 0.99, "{}", p[0] + p[1023]);
        assert!((p[0] - p[1023]).abs() < 1e-6);
    }

    #[test]
    fn excited_selection_needs_headroom() {
        let h = build_heisenberg_ring(6, 1.0).unwrap();
        let res = lowest_eigenpairs(&h, 2, None).unwrap();
        // The first excited level of the ring is a triplet, which two pairs cannot hold.
        assert!(matches!(select_state(&res, Which::FirstExcited, 1e-8), Err(Error::Unresolved(_))));
        let res = lowest_eigenpairs(&h, 5, None).unwrap();
        let s = select_state(&res, Which::FirstExcited, 1e-8).unwrap();
        let v: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        let hv = h.matvec(&v).unwrap();
        let e: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        assert!((e - res.eigenvalues[1]).abs() < 1e-8);
    }

    #[test]
    fn csv_rows() {
        let h = build_heisenberg_ring(4, 1.0).unwrap();
        let res = lowest_eigenpairs(&h, 2, Some(SzSector::ZERO)).unwrap();
        let rows = spectrum_csv_rows(0.5, &res);
        assert_eq!(rows.lines().count(), 2);
        assert!(rows.starts_with("0.5,0,-2.000000000000,0"));
    }
}
