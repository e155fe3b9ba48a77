//! Multi-basis signatures, their comparison, dissimilarity maps, parameter
//! scans and chaotic-state diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use crate::dissim::{dissimilarity_profile, CoarseGrainConfig, DissimilarityProfile};
use crate::error::{Error, Result};
use crate::qstate::{build_cat_state, build_dicke_state, build_random_circuit, build_uniform_state, Statevector};
use crate::rng::{self, RNG_ALGORITHM};
use crate::sampler::{sample, Basis, MeasurementConfig};
use crate::spectra::{
    build_ss_supercell, build_tfim, lowest_eigenpairs_with, select_state_with, BondList, LanczosConfig,
    SelectOptions, SzSector, Which,
};
use crate::stats;

/// Default certification threshold on the signature distance.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub basis_tag: String,
    pub profile: DissimilarityProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<MeasurementConfig>,
}

/// Dissimilarity profiles of one state in two or more bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashSignature {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub n_qubits: usize,
    pub n_shots: usize,
    pub lambda: usize,
    pub include_k0_in_total: bool,
    pub rng: String,
    pub entries: Vec<SignatureEntry>,
}

impl HashSignature {
    /// Assemble a signature from existing profiles; needs two distinct bases
    /// sharing one coarse-graining convention.
    pub fn from_entries(n_qubits: usize, n_shots: usize, entries: Vec<SignatureEntry>) -> Result<Self> {
        let tags: BTreeSet<&str> = entries.iter().map(|e| e.basis_tag.as_str()).collect();
        if tags.len() < 2 || tags.len() != entries.len() {
            return Err(Error::invalid(format!(
                "a signature needs at least two distinct bases, got {:?}",
                entries.iter().map(|e| &e.basis_tag).collect::<Vec<_>>()
            )));
        }
        let first = &entries[0].profile;
        if entries
            .iter()
            .any(|e| e.profile.lambda != first.lambda || e.profile.include_k0_in_total != first.include_k0_in_total)
        {
            return Err(Error::Incompatible("profiles use different coarse-graining conventions".into()));
        }
        Ok(HashSignature {
            label: None,
            n_qubits,
            n_shots,
            lambda: first.lambda,
            include_k0_in_total: first.include_k0_in_total,
            rng: RNG_ALGORITHM.into(),
            entries,
        })
    }

    pub fn entry(&self, basis_tag: &str) -> Option<&SignatureEntry> {
        self.entries.iter().find(|e| e.basis_tag == basis_tag)
    }

    pub fn total(&self, basis_tag: &str) -> Option<f64> {
        self.entry(basis_tag).map(|e| e.profile.total)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// Measure `state` once per basis configuration and profile each record.
pub fn compute_signature(
    state: &Statevector,
    bases: &[MeasurementConfig],
    cg: &CoarseGrainConfig,
) -> Result<HashSignature> {
    let entries = bases
        .iter()
        .map(|b| {
            let profile = dissimilarity_profile(&sample(state, b)?, cg)?;
            Ok(SignatureEntry { basis_tag: b.basis.tag().into(), profile, config: Some(b.clone()) })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_shots = bases.iter().map(|b| b.n_shots).max().unwrap_or(0);
    HashSignature::from_entries(state.n_qubits(), n_shots, entries)
}

/// The usual `{Z, Random}` pair with independent seeds derived from `seed`.
pub fn default_bases(n_shots: usize, seed: u64) -> Vec<MeasurementConfig> {
    vec![
        MeasurementConfig::z(n_shots, rng::derive_seed(seed, 0)),
        MeasurementConfig::random(n_shots, rng::derive_seed(seed, 1)),
    ]
}

fn check_compatible(a: &HashSignature, b: &HashSignature) -> Result<()> {
    if a.lambda != b.lambda {
        return Err(Error::Incompatible(format!("filter widths {} and {}", a.lambda, b.lambda)));
    }
    let ta: BTreeSet<&str> = a.entries.iter().map(|e| e.basis_tag.as_str()).collect();
    let tb: BTreeSet<&str> = b.entries.iter().map(|e| e.basis_tag.as_str()).collect();
    if ta != tb {
        return Err(Error::Incompatible(format!("basis sets {ta:?} and {tb:?}")));
    }
    for e in &a.entries {
        let other = b.entry(&e.basis_tag).expect("same tag set");
        if e.profile.partial.len() != other.profile.partial.len() {
            return Err(Error::Incompatible(format!(
                "basis {}: {} vs {} scale pairs",
                e.basis_tag,
                e.profile.partial.len(),
                other.profile.partial.len()
            )));
        }
    }
    Ok(())
}

/// Per-basis `candidate - target` partial differences, in `a`'s basis order.
fn residuals(candidate: &HashSignature, target: &HashSignature) -> Vec<BasisResidual> {
    candidate
        .entries
        .iter()
        .map(|e| {
            let t = &target.entry(&e.basis_tag).expect("checked").profile;
            BasisResidual {
                basis_tag: e.basis_tag.clone(),
                per_k: e.profile.partial.iter().zip(&t.partial).map(|(c, t)| c - t).collect(),
                total: e.profile.total - t.total,
            }
        })
        .collect()
}

/// Euclidean norm over all partial dissimilarities of all bases.
pub fn signature_distance(a: &HashSignature, b: &HashSignature) -> Result<f64> {
    check_compatible(a, b)?;
    Ok(residuals(a, b).iter().flat_map(|r| &r.per_k).map(|d| d * d).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisResidual {
    pub basis_tag: String,
    pub per_k: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub distance: f64,
    pub threshold: f64,
    pub residuals: Vec<BasisResidual>,
}

/// Pass iff the candidate lies within `threshold` of the target.
pub fn certify(candidate: &HashSignature, target: &HashSignature, threshold: f64) -> Result<Verdict> {
    let distance = signature_distance(candidate, target)?;
    Ok(Verdict { pass: distance <= threshold, distance, threshold, residuals: residuals(candidate, target) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub label: String,
    pub d_z: f64,
    pub d_r: f64,
}

/// `(D^z, D^r)` coordinates of labelled signatures.
pub fn dissimilarity_map(signatures: &[HashSignature]) -> Result<Vec<MapPoint>> {
    signatures
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let label = s.label.clone().unwrap_or_else(|| format!("state{i}"));
            let get = |b: Basis| {
                s.total(b.tag())
                    .ok_or_else(|| Error::invalid(format!("signature {label:?} has no {} basis", b.tag())))
            };
            Ok(MapPoint { d_z: get(Basis::Z)?, d_r: get(Basis::Random)?, label: label.clone() })
        })
        .collect()
}

pub fn map_csv(points: &[MapPoint]) -> String {
    let mut out = String::from("label,D_z,D_r\n");
    for p in points {
        let _ = writeln!(out, "{},{:.6},{:.6}", p.label, p.d_z, p.d_r);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PorterThomasReport {
    /// KS distance of `{2^N p_x}` from the unit exponential.
    pub ks_distance: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn porter_thomas_check(state: &Statevector) -> PorterThomasReport {
    let scale = state.dim() as f64;
    let scaled: Vec<f64> = state.probabilities().iter().map(|p| p * scale).collect();
    PorterThomasReport { ks_distance: stats::ks_exp1(&scaled), mean: stats::mean(&scaled), variance: stats::variance(&scaled) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub n_shots: usize,
    pub replicas: usize,
    pub mean_total: f64,
    pub std_total: f64,
    pub mean_partial: Vec<f64>,
    pub std_partial: Vec<f64>,
}

/// Profiles at several shot counts, each averaged over seed replicas.
/// Replica `r` uses the seed `derive_seed(basis.seed, r)`.
pub fn shots_sensitivity(
    state: &Statevector,
    basis: &MeasurementConfig,
    shot_counts: &[usize],
    replicas: usize,
    cg: &CoarseGrainConfig,
) -> Result<Vec<SensitivityRow>> {
    if replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    if shot_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("shot counts must be strictly ascending"));
    }
    shot_counts
        .iter()
        .map(|&n_shots| {
            let profiles = (0..replicas)
                .map(|r| {
                    let cfg = MeasurementConfig { n_shots, seed: rng::derive_seed(basis.seed, r as u64), ..basis.clone() };
                    dissimilarity_profile(&sample(state, &cfg)?, cg)
                })
                .collect::<Result<Vec<_>>>()?;
            let k = profiles.iter().map(|p| p.partial.len()).min().unwrap_or(0);
            let column = |i: usize| profiles.iter().map(|p| p.partial[i]).collect::<Vec<_>>();
            let totals: Vec<f64> = profiles.iter().map(|p| p.total).collect();
            Ok(SensitivityRow {
                n_shots,
                replicas,
                mean_total: stats::mean(&totals),
                std_total: stats::std_dev(&totals),
                mean_partial: (0..k).map(|i| stats::mean(&column(i))).collect(),
                std_partial: (0..k).map(|i| stats::std_dev(&column(i))).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Transverse-field Ising ring; the scanned parameter is `h`.
    Tfim { n_sites: usize, j: f64 },
    /// Shastry-Sutherland cluster; the scanned parameter is `J2`, in the
    /// `S^z = 0` sector with `m` computed levels.
    ShastrySutherland { bonds: BondList, j1: f64, levels: usize },
}

impl Model {
    pub fn tfim16() -> Self {
        Model::Tfim { n_sites: 16, j: -1.0 }
    }

    pub fn ss16() -> Self {
        Model::ShastrySutherland { bonds: BondList::shastry_sutherland_16(), j1: 1.0, levels: 10 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Tfim { .. } => "tfim",
            Model::ShastrySutherland { .. } => "ss",
        }
    }

    fn parameter_name(&self) -> &'static str {
        match self {
            Model::Tfim { .. } => "h",
            Model::ShastrySutherland { .. } => "J2",
        }
    }

    /// States tracked by a scan of this model.
    pub fn tracked_states(&self) -> Vec<Which> {
        match self {
            Model::Tfim { .. } => vec![Which::Ground],
            Model::ShastrySutherland { .. } => vec![Which::Ground, Which::FirstExcited],
        }
    }

    /// Symmetry sector the model is diagonalized in.
    pub fn sector(&self) -> Option<SzSector> {
        match self {
            Model::Tfim { .. } => None,
            Model::ShastrySutherland { .. } => Some(SzSector::ZERO),
        }
    }

    /// Low-lying states at one parameter value, with the computed energies.
    pub fn states_at(
        &self,
        parameter: f64,
        which: &[Which],
        lanczos: &LanczosConfig,
        select: &SelectOptions,
    ) -> Result<(Vec<f64>, Vec<Statevector>)> {
        let (h, m, sector) = match self {
            Model::Tfim { n_sites, j } => {
                let m = if which.contains(&Which::FirstExcited) { 4 } else { 2 };
                (build_tfim(*n_sites, *j, parameter)?, m, None)
            }
            Model::ShastrySutherland { bonds, j1, levels } => {
                (build_ss_supercell(bonds, *j1, parameter)?, *levels, self.sector())
            }
        };
        let res = lowest_eigenpairs_with(&h, m, sector, lanczos)?;
        let states = which.iter().map(|&w| select_state_with(&res, w, select)).collect::<Result<Vec<_>>>()?;
        Ok((res.eigenvalues, states))
    }
}

/// How transitions are located along a scanned series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Detection {
    /// Grid point of the largest `|dD/dp|`.
    DerivativePeak,
    /// Midpoints of steps with `|ΔD| > max(factor · median|ΔD|, floor)`.
    Jumps { factor: f64, floor: f64 },
}

impl Detection {
    pub fn for_model(model: &Model) -> Self {
        match model {
            Model::Tfim { .. } => Detection::DerivativePeak,
            Model::ShastrySutherland { .. } => Detection::Jumps { factor: 5.0, floor: 0.01 },
        }
    }

    /// Transition locations along `(grid, values)`.
    pub fn detect(&self, grid: &[f64], values: &[f64]) -> Vec<f64> {
        if grid.len() < 2 {
            return Vec::new();
        }
        match *self {
            Detection::DerivativePeak => {
                let d = stats::gradient(values, grid);
                let best = (0..d.len()).max_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())).unwrap();
                vec![grid[best]]
            }
            Detection::Jumps { factor, floor } => {
                let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
                let threshold = (factor * stats::median(&steps)).max(floor);
                steps
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s > threshold)
                    .map(|(i, _)| 0.5 * (grid[i] + grid[i + 1]))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Measurement settings reused unchanged at every grid point, so that
    /// neighbouring points share their random numbers.
    pub bases: Vec<MeasurementConfig>,
    pub cg: CoarseGrainConfig,
    pub lanczos: LanczosConfig,
    pub select: SelectOptions,
    pub detection: Option<Detection>,
}

impl ScanConfig {
    pub fn new(bases: Vec<MeasurementConfig>) -> Self {
        ScanConfig {
            bases,
            cg: CoarseGrainConfig::default(),
            lanczos: LanczosConfig::default(),
            select: SelectOptions::default(),
            detection: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub parameter: f64,
    pub energies: Vec<f64>,
    /// `profiles[s][b]`: tracked state `s`, basis `b`.
    pub profiles: Vec<Vec<DissimilarityProfile>>,
}

/// Total dissimilarity of one tracked state in one basis along the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub state: Which,
    pub basis_tag: String,
    pub totals: Vec<f64>,
    pub derivative: Vec<f64>,
    pub transitions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub model: String,
    pub parameter_name: String,
    pub grid: Vec<f64>,
    pub states: Vec<Which>,
    pub detection: Detection,
    pub points: Vec<ScanPoint>,
    pub series: Vec<Series>,
}

impl ScanResult {
    pub fn series(&self, state: Which, basis_tag: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.state == state && s.basis_tag == basis_tag)
    }

    /// CSV `param,state,D_<basis>...,dD_<basis>...,flags`.
    pub fn to_csv(&self) -> String {
        let tags: Vec<&str> = self.series.iter().filter(|s| s.state == self.states[0]).map(|s| s.basis_tag.as_str()).collect();
        let mut out = format!("{},state", self.parameter_name);
        for t in &tags {
            let _ = write!(out, ",D_{t}");
        }
        for t in &tags {
            let _ = write!(out, ",dD_{t}");
        }
        out.push_str(",flags\n");
        for &state in &self.states {
            let series: Vec<&Series> = tags.iter().map(|t| self.series(state, t).expect("series per basis")).collect();
            for (i, p) in self.grid.iter().enumerate() {
                let _ = write!(out, "{p},{}", which_tag(state));
                for s in &series {
                    let _ = write!(out, ",{:.6}", s.totals[i]);
                }
                for s in &series {
                    let _ = write!(out, ",{:.6}", s.derivative[i]);
                }
                let flags = transition_flags(&self.grid, i, &series[0].transitions, self.detection);
                let _ = writeln!(out, ",{flags}");
            }
        }
        out
    }
}

fn which_tag(w: Which) -> &'static str {
    match w {
        Which::Ground => "ground",
        Which::FirstExcited => "first_excited",
    }
}

fn transition_flags(grid: &[f64], i: usize, transitions: &[f64], detection: Detection) -> &'static str {
    let hit = |x: f64| transitions.iter().any(|t| (t - x).abs() < 1e-9);
    match detection {
        Detection::DerivativePeak if hit(grid[i]) => "peak",
        Detection::Jumps { .. } if i + 1 < grid.len() && hit(0.5 * (grid[i] + grid[i + 1])) => "jump_after",
        _ => "",
    }
}

/// Tracked eigenstates of a model at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridStates {
    pub parameter: f64,
    pub energies: Vec<f64>,
    /// One per entry of [`Model::tracked_states`].
    pub states: Vec<Statevector>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("scan grid must be non-empty and strictly ascending"));
    }
    Ok(())
}

fn at_parameter(model: &Model, p: f64, e: Error) -> Error {
    Error::AtParameter { context: format!("{} = {p}", model.parameter_name()), source: Box::new(e) }
}

/// Diagonalize `model` at every grid point. The result can be profiled
/// repeatedly with [`scan_from_states`] under different measurement settings.
pub fn grid_states(
    model: &Model,
    grid: &[f64],
    lanczos: &LanczosConfig,
    select: &SelectOptions,
) -> Result<Vec<GridStates>> {
    check_grid(grid)?;
    let which = model.tracked_states();
    grid.par_iter()
        .map(|&p| {
            let (energies, states) =
                model.states_at(p, &which, lanczos, select).map_err(|e| at_parameter(model, p, e))?;
            Ok(GridStates { parameter: p, energies, states })
        })
        .collect()
}

/// Profile precomputed eigenstates in every basis of `cfg` and locate
/// transitions. `cfg.lanczos` and `cfg.select` are not consulted.
pub fn scan_from_states(model: &Model, states: &[GridStates], cfg: &ScanConfig) -> Result<ScanResult> {
    let grid: Vec<f64> = states.iter().map(|g| g.parameter).collect();
    check_grid(&grid)?;
    if cfg.bases.is_empty() {
        return Err(Error::invalid("scan needs at least one basis"));
    }
    let which = model.tracked_states();
    if let Some(g) = states.iter().find(|g| g.states.len() != which.len()) {
        return Err(Error::invalid(format!(
            "grid point {} holds {} states, model tracks {}",
            g.parameter,
            g.states.len(),
            which.len()
        )));
    }
    let points = states
        .par_iter()
        .map(|g| {
            let profiles = g
                .states
                .iter()
                .map(|s| {
                    cfg.bases.iter().map(|b| dissimilarity_profile(&sample(s, b)?, &cfg.cg)).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| at_parameter(model, g.parameter, e))?;
            Ok(ScanPoint { parameter: g.parameter, energies: g.energies.clone(), profiles })
        })
        .collect::<Result<Vec<_>>>()?;
    let detection = cfg.detection.unwrap_or_else(|| Detection::for_model(model));
    let mut series = Vec::new();
    for (s, &state) in which.iter().enumerate() {
        for (b, basis) in cfg.bases.iter().enumerate() {
            let totals: Vec<f64> = points.iter().map(|pt| pt.profiles[s][b].total).collect();
            series.push(Series {
                state,
                basis_tag: basis.basis.tag().into(),
                derivative: stats::gradient(&totals, &grid),
                transitions: detection.detect(&grid, &totals),
                totals,
            });
        }
    }
    Ok(ScanResult {
        model: model.name().into(),
        parameter_name: model.parameter_name().into(),
        grid,
        states: which,
        detection,
        points,
        series,
    })
}

/// Scan `model` over `grid`, profiling the tracked eigenstates in every basis.
pub fn phase_scan(model: &Model, grid: &[f64], cfg: &ScanConfig) -> Result<ScanResult> {
    if cfg.bases.is_empty() {
        return Err(Error::invalid("scan needs at least one basis"));
    }
    let states = grid_states(model, grid, &cfg.lanczos, &cfg.select)?;
    scan_from_states(model, &states, cfg)
}

/// `start, start+step, ...` up to `stop` inclusive, rounded to suppress
/// accumulated floating-point drift.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::invalid(format!("bad grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

/// Named states spanning the families compared throughout the crate.
pub fn preset_families(circuit_seed: u64) -> Result<Vec<(String, Statevector)>> {
    let mut out = vec![
        ("trivial".to_string(), Statevector::zero(16)?),
        ("ghz".to_string(), build_cat_state(16, FRAC_PI_2)?),
    ];
    for (name, theta) in [("cat_pi/8", FRAC_PI_2 / 4.0), ("cat_pi/4", FRAC_PI_2 / 2.0), ("cat_3pi/8", 3.0 * FRAC_PI_2 / 4.0)] {
        out.push((name.to_string(), build_cat_state(16, theta)?));
    }
    for d in [1, 2, 4, 8] {
        out.push((format!("dicke_{d}"), build_dicke_state(16, d)?));
    }
    out.push(("uniform".to_string(), build_uniform_state(16)?));
    out.push(("haar".to_string(), build_random_circuit(16, 19, circuit_seed)?.simulate()?));
    let ss = Model::ss16();
    for (name, j2) in [("ss_singlet", 0.0), ("ss_neel", 1.0)] {
        let (_, states) = ss.states_at(j2, &[Which::Ground], &LanczosConfig::default(), &SelectOptions::default())?;
        out.push((name.to_string(), states.into_iter().next().expect("one state")));
    }
    for (name, h) in [("tfim_h0.25", 0.25), ("tfim_h0.5", 0.5), ("tfim_h1", 1.0)] {
        let (_, states) =
            Model::tfim16().states_at(h, &[Which::Ground], &LanczosConfig::default(), &SelectOptions::default())?;
        out.push((name.to_string(), states.into_iter().next().expect("one state")));
    }
    Ok(out)
}
