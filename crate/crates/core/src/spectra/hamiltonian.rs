//! Spin-½ Hamiltonians given as term lists, and their sparse action.
//!
//! Site `i` is stored in bit `N-1-i` of a basis index (the same msb-first
//! layout as [`crate::qstate`]); a set bit is spin up, `S^z = +½`. All
//! operators use `S = σ/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the eigensolver accepts.
pub const MAX_SITES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// `J S^z_i S^z_j`
    Zz { i: usize, j: usize, coupling: f64 },
    /// `J S_i · S_j`
    Heisenberg { i: usize, j: usize, coupling: f64 },
    /// `h S^x_i`
    XField { site: usize, coupling: f64 },
}

impl Term {
    pub fn coupling(&self) -> f64 {
        match *self {
            Term::Zz { coupling, .. } | Term::Heisenberg { coupling, .. } | Term::XField { coupling, .. } => coupling,
        }
    }

    fn sites(&self) -> (usize, Option<usize>) {
        match *self {
            Term::Zz { i, j, .. } | Term::Heisenberg { i, j, .. } => (i, Some(j)),
            Term::XField { site, .. } => (site, None),
        }
    }

    /// Upper bound on the row-sum norm contributed by this term.
    fn norm_bound(&self) -> f64 {
        let c = self.coupling().abs();
        match self {
            Term::Zz { .. } => 0.25 * c,
            Term::Heisenberg { .. } => 0.75 * c,
            Term::XField { .. } => 0.5 * c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n_sites: usize,
    pub terms: Vec<Term>,
}

impl HamiltonianSpec {
    pub fn new(n_sites: usize, terms: Vec<Term>) -> Result<Self> {
        let spec = HamiltonianSpec { n_sites, terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.n_sites > MAX_SITES {
            return Err(Error::TooManyQubits { requested: self.n_sites, cap: MAX_SITES });
        }
        for t in &self.terms {
            if !t.coupling().is_finite() {
                return Err(Error::NonFiniteParameter);
            }
            let (i, j) = t.sites();
            for s in std::iter::once(i).chain(j) {
                if s >= self.n_sites {
                    return Err(Error::QubitOutOfRange { index: s, n_qubits: self.n_sites });
                }
            }
            if j == Some(i) {
                return Err(Error::RepeatedQubit(i));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Row-sum bound on `‖H‖`, used to scale convergence tolerances.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(Term::norm_bound).sum::<f64>().max(f64::MIN_POSITIVE)
    }

    pub fn conserves_sz(&self) -> bool {
        !self.terms.iter().any(|t| matches!(t, Term::XField { .. }))
    }

    /// `H v` on the full space.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::LengthMismatch { left: v.len(), right: self.dim() });
        }
        let op = SparseOp::new(self, None)?;
        let mut y = vec![0.0; v.len()];
        op.apply(v, &mut y);
        Ok(y)
    }
}

/// Transverse-field Ising ring `J Σ S^z_i S^z_{i+1} + h Σ S^x_i`.
pub fn build_tfim(n_sites: usize, j: f64, h: f64) -> Result<HamiltonianSpec> {
    if n_sites < 2 {
        return Err(Error::invalid("TFIM ring needs at least two sites"));
    }
    let mut terms = Vec::with_capacity(2 * n_sites);
    for i in 0..n_sites {
        terms.push(Term::Zz { i, j: (i + 1) % n_sites, coupling: j });
    }
    for site in 0..n_sites {
        terms.push(Term::XField { site, coupling: h });
    }
    HamiltonianSpec::new(n_sites, terms)
}

/// Heisenberg ring `J Σ S_i · S_{i+1}`.
pub fn build_heisenberg_ring(n_sites: usize, j: f64) -> Result<HamiltonianSpec> {
    if n_sites < 3 {
        return Err(Error::invalid("Heisenberg ring needs at least three sites"));
    }
    let terms = (0..n_sites)
        .map(|i| Term::Heisenberg { i, j: (i + 1) % n_sites, coupling: j })
        .collect();
    HamiltonianSpec::new(n_sites, terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondClass {
    Dimer,
    Inter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub class: BondClass,
}

/// Site count plus classified bonds, read from the `sites <n>` / `i j class`
/// text format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondList {
    pub n_sites: usize,
    pub bonds: Vec<Bond>,
}

/// 4x4 periodic Shastry-Sutherland supercell, site `4y + x`.
pub const SHASTRY_SUTHERLAND_16: &str = include_str!("../../data/shastry_sutherland_16.bonds");

impl BondList {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n_sites = None;
        let mut bonds = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| Error::Parse { line: line_no, message };
            if fields[0] == "sites" {
                if n_sites.is_some() {
                    return Err(err("duplicate sites header".into()));
                }
                let n = fields
                    .get(1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|_| fields.len() == 2)
                    .ok_or_else(|| err(format!("expected `sites <n>`, got {line:?}")))?;
                n_sites = Some(n);
                continue;
            }
            let n = n_sites.ok_or_else(|| err("bond before `sites` header".into()))?;
            if fields.len() != 3 {
                return Err(err(format!("expected `i j dimer|inter`, got {line:?}")));
            }
            let site = |s: &str| -> Result<usize> {
                let v: usize = s.parse().map_err(|_| err(format!("bad site index {s:?}")))?;
                if v >= n {
                    return Err(err(format!("site {v} out of range for {n} sites")));
                }
                Ok(v)
            };
            let (i, j) = (site(fields[0])?, site(fields[1])?);
            if i == j {
                return Err(err(format!("self bond on site {i}")));
            }
            let class = match fields[2] {
                "dimer" => BondClass::Dimer,
                "inter" => BondClass::Inter,
                other => return Err(err(format!("unknown bond class {other:?}"))),
            };
            bonds.push(Bond { i, j, class });
        }
        let n_sites = n_sites.ok_or_else(|| Error::Parse { line: 0, message: "missing `sites` header".into() })?;
        let list = BondList { n_sites, bonds };
        list.validate()?;
        Ok(list)
    }

    pub fn shastry_sutherland_16() -> Self {
        Self::parse(SHASTRY_SUTHERLAND_16).expect("bundled bond list is valid")
    }

    /// No repeated bonds; dimers form a perfect matching of the sites.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        let mut in_dimer = vec![0usize; self.n_sites];
        for b in &self.bonds {
            if b.i >= self.n_sites || b.j >= self.n_sites || b.i == b.j {
                return Err(Error::invalid(format!("bad bond ({}, {})", b.i, b.j)));
            }
            if !seen.insert((b.i.min(b.j), b.i.max(b.j))) {
                return Err(Error::invalid(format!("repeated bond ({}, {})", b.i, b.j)));
            }
            if b.class == BondClass::Dimer {
                in_dimer[b.i] += 1;
                in_dimer[b.j] += 1;
            }
        }
        if let Some(site) = in_dimer.iter().position(|&c| c != 1) {
            return Err(Error::invalid(format!(
                "dimer bonds are not a perfect matching: site {site} is in {} dimers",
                in_dimer[site]
            )));
        }
        Ok(())
    }

    pub fn count(&self, class: BondClass) -> usize {
        self.bonds.iter().filter(|b| b.class == class).count()
    }
}

/// Heisenberg couplings `j1` on dimer bonds and `j2` on inter-dimer bonds.
pub fn build_ss_supercell(bonds: &BondList, j1: f64, j2: f64) -> Result<HamiltonianSpec> {
    bonds.validate()?;
    let terms = bonds
        .bonds
        .iter()
        .map(|b| Term::Heisenberg {
            i: b.i,
            j: b.j,
            coupling: match b.class {
                BondClass::Dimer => j1,
                BondClass::Inter => j2,
            },
        })
        .collect();
    HamiltonianSpec::new(bonds.n_sites, terms)
}

/// Fixed-magnetization subspace, labelled by `2 S^z` (= #up − #down).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SzSector(pub i32);

impl SzSector {
    pub const ZERO: SzSector = SzSector(0);

    fn n_up(self, n_sites: usize) -> Result<usize> {
        let n = n_sites as i32;
        if self.0.abs() > n || (n + self.0) % 2 != 0 {
            return Err(Error::invalid(format!("no 2Sz = {} sector on {n} sites", self.0)));
        }
        Ok(((n + self.0) / 2) as usize)
    }
}

const NOT_IN_SECTOR: u32 = u32::MAX;

/// Precomputed sparse action of a spec, optionally restricted to a sector.
pub(crate) struct SparseOp {
    n_sites: usize,
    /// Basis states of the sector; `None` on the full space.
    states: Option<Vec<u32>>,
    lookup: Vec<u32>,
    diag: Vec<f64>,
    /// (flip mask, amplitude, needs anti-aligned bits)
    flips: Vec<(usize, f64, bool)>,
    /// Off-diagonal entries as compressed rows, when small enough to store.
    csr: Option<Csr>,
}

struct Csr {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

/// Storage budget for the explicit off-diagonal entries.
const CSR_BUDGET_BYTES: usize = 1 << 29;

impl SparseOp {
    pub(crate) fn new(spec: &HamiltonianSpec, sector: Option<SzSector>) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_sites;
        let mask = |s: usize| 1usize << (n - 1 - s);
        let (states, lookup) = match sector {
            None => (None, Vec::new()),
            Some(sec) => {
                if !spec.conserves_sz() {
                    return Err(Error::invalid("transverse field does not conserve S^z; use the full space"));
                }
                let n_up = sec.n_up(n)?;
                let states: Vec<u32> = (0..1u32 << n).filter(|x| x.count_ones() as usize == n_up).collect();
                let mut lookup = vec![NOT_IN_SECTOR; 1 << n];
                for (a, &x) in states.iter().enumerate() {
                    lookup[x as usize] = a as u32;
                }
                (Some(states), lookup)
            }
        };
        let mut flips = Vec::new();
        let mut zz = Vec::new();
        for t in &spec.terms {
            match *t {
                Term::Zz { i, j, coupling } => zz.push((mask(i) | mask(j), 0.25 * coupling)),
                Term::Heisenberg { i, j, coupling } => {
                    zz.push((mask(i) | mask(j), 0.25 * coupling));
                    flips.push((mask(i) | mask(j), 0.5 * coupling, true));
                }
                Term::XField { site, coupling } => flips.push((mask(site), 0.5 * coupling, false)),
            }
        }
        let diag_of = |x: usize| -> f64 {
            zz.iter()
                .map(|&(m, c)| if (x & m).count_ones() == 1 { -c } else { c })
                .sum()
        };
        let diag = match &states {
            None => (0..1usize << n).into_par_iter().map(diag_of).collect(),
            Some(st) => st.par_iter().map(|&x| diag_of(x as usize)).collect(),
        };
        let mut op = SparseOp { n_sites: n, states, lookup, diag, flips, csr: None };
        if op.dim() * op.flips.len() * 12 <= CSR_BUDGET_BYTES {
            op.csr = Some(op.build_csr());
        }
        Ok(op)
    }

    /// Off-diagonal entries of each row, in the order `apply` visits them.
    fn row_entries(&self, a: usize, mut visit: impl FnMut(usize, f64)) {
        let x = self.state(a);
        for &(m, c, needs_antialigned) in &self.flips {
            if needs_antialigned && (x & m).count_ones() != 1 {
                continue;
            }
            visit(self.index(x ^ m), c);
        }
    }

    fn build_csr(&self) -> Csr {
        let mut csr = Csr { offsets: Vec::with_capacity(self.dim() + 1), cols: Vec::new(), vals: Vec::new() };
        csr.offsets.push(0);
        for a in 0..self.dim() {
            self.row_entries(a, |b, c| {
                csr.cols.push(b as u32);
                csr.vals.push(c);
            });
            csr.offsets.push(csr.cols.len());
        }
        csr
    }

    pub(crate) fn dim(&self) -> usize {
        self.diag.len()
    }

    fn state(&self, a: usize) -> usize {
        match &self.states {
            None => a,
            Some(st) => st[a] as usize,
        }
    }

    fn index(&self, x: usize) -> usize {
        match &self.states {
            None => x,
            Some(_) => self.lookup[x] as usize,
        }
    }

    /// `y = H v`, gathering each output row independently.
    pub(crate) fn apply(&self, v: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().with_min_len(1024).for_each(|(a, out)| {
            let mut acc = self.diag[a] * v[a];
            match &self.csr {
                Some(csr) => {
                    let range = csr.offsets[a]..csr.offsets[a + 1];
                    for (&b, &c) in csr.cols[range.clone()].iter().zip(&csr.vals[range]) {
                        acc += c * v[b as usize];
                    }
                }
                None => self.row_entries(a, |b, c| acc += c * v[b]),
            }
            *out = acc;
        });
    }

    /// Expand a sector vector into the full `2^N` space.
    pub(crate) fn expand(&self, v: &[f64]) -> Vec<f64> {
        match &self.states {
            None => v.to_vec(),
            Some(st) => {
                let mut full = vec![0.0; 1 << self.n_sites];
                for (&x, &a) in st.iter().zip(v) {
                    full[x as usize] = a;
                }
                full
            }
        }
    }
}
