//! Multi-scale dissimilarity signatures of quantum states.
//!
//! Measurement records of a state (in the computational basis and in
//! per-shot randomized bases) are coarse-grained by block averaging, and the
//! overlaps between adjacent scales give a profile of partial
//! dissimilarities. Profiles from two or more bases form a signature that can
//! be compared across states, used to certify a prepared state against a
//! target, or tracked along a Hamiltonian parameter to locate transitions.
//!
//! Modules, bottom up:
//! - [`qstate`]: dense statevectors, gates and state families.
//! - [`sampler`]: seeded measurements and bitstring records.
//! - [`dissim`]: the coarse-graining flow and dissimilarities.
//! - [`spectra`]: spin Hamiltonians, Lanczos, entanglement entropy.
//! - [`certify`]: signatures, maps, scans, Porter-Thomas checks.
//! - [`ingest`]: reading bitstring files.

pub mod certify;
pub mod dissim;
pub mod error;
pub mod ingest;
pub mod qstate;
pub mod rng;
pub mod sampler;
pub mod spectra;
pub mod stats;

pub use error::{Error, Result};
