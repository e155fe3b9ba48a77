use bitsig::certify::{
    self, compute_signature, default_bases, dissimilarity_map, grid_states, linear_grid, map_csv, preset_families,
    scan_from_states, HashSignature, Model, ScanConfig, SignatureEntry,
};
use bitsig::dissim::{dissimilarity_profile, CoarseGrainConfig, DissimilarityProfile};
use bitsig::ingest::ingest_bitstrings;
use bitsig::qstate::{
    build_cat_state, build_dicke_state, build_random_circuit, build_uniform_state, StateDump, Statevector,
};
use bitsig::sampler::{sample as draw, AngleSampling, MeasurementConfig};
use bitsig::spectra::{
    build_ss_supercell, build_tfim, energy_csv_rows, lowest_eigenpairs, select_state_with, BondList, SelectOptions,
    SzSector, Which, SPECTRUM_CSV_HEADER,
};
use bitsig::{Error, Result};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::run_config::RunConfig;
use crate::{
    AngleArg, BasisArg, CertifyArgs, CoarseGrainArgs, DissimArgs, Family, MapArgs, SampleArgs, ScanCommon, ScanModel,
    SignatureArgs, SsArgs, StateArgs,
};

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// One-line summary after an artifact went to a file.
fn summarize(out: Option<&PathBuf>, json_mode: bool, cfg: &RunConfig, human: String, machine: Value) {
    let Some(path) = out else { return };
    if json_mode {
        let mut v = machine;
        v["written"] = json!(path);
        v["config_hash"] = json!(cfg.hash());
        println!("{v}");
    } else {
        println!("{human} -> {}", path.display());
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Accepts a bare payload or one wrapped in a run-config envelope under `key`.
fn unwrap_envelope(mut v: Value, key: &str) -> Value {
    match v.get_mut(key) {
        Some(inner) => inner.take(),
        None => v,
    }
}

fn load_state(path: &Path) -> Result<Statevector> {
    let dump: StateDump = serde_json::from_value(unwrap_envelope(read_json(path)?, "state"))?;
    Statevector::from_dump(&dump)
}

fn load_signature(path: &Path) -> Result<HashSignature> {
    Ok(serde_json::from_value(unwrap_envelope(read_json(path)?, "signature"))?)
}

fn bonds(path: Option<&PathBuf>) -> Result<BondList> {
    match path {
        Some(p) => BondList::parse(&read_text(p)?),
        None => Ok(BondList::shastry_sutherland_16()),
    }
}

fn coarse_grain(a: &CoarseGrainArgs) -> CoarseGrainConfig {
    CoarseGrainConfig {
        lambda: a.lambda,
        k_max: a.k_max,
        include_k0_in_total: a.include_k0,
        allow_truncation: !a.no_truncation,
    }
}

fn basis(b: BasisArg, shots: usize, seed: u64) -> MeasurementConfig {
    match b {
        BasisArg::Z => MeasurementConfig::z(shots, seed),
        BasisArg::Random => MeasurementConfig::random(shots, seed),
    }
}

fn ss_state(a: &SsArgs, which: Which) -> Result<(Statevector, Vec<f64>)> {
    let h = build_ss_supercell(&bonds(a.bonds.as_ref())?, a.j1, a.j2)?;
    let res = lowest_eigenpairs(&h, a.levels, Some(SzSector::ZERO))?;
    Ok((select_state_with(&res, which, &SelectOptions::default())?, res.eigenvalues))
}

pub fn state(a: &StateArgs, json_mode: bool) -> Result<()> {
    let (state, energies) = match a.family {
        Family::Cat { n, theta } => (build_cat_state(n, theta)?, None),
        Family::Dicke { n, weight } => (build_dicke_state(n, weight)?, None),
        Family::Uniform { n } => (build_uniform_state(n)?, None),
        Family::RandomCircuit { n, cycles, seed } => (build_random_circuit(n, cycles, seed)?.simulate()?, None),
        Family::TfimGround { n, j, h } => {
            let res = lowest_eigenpairs(&build_tfim(n, j, h)?, 2, None)?;
            let s = select_state_with(&res, Which::Ground, &SelectOptions::default())?;
            (s, Some(res.eigenvalues))
        }
        Family::SsGround(ref ss) => {
            let (s, e) = ss_state(ss, Which::Ground)?;
            (s, Some(e))
        }
        Family::SsExcited(ref ss) => {
            let (s, e) = ss_state(ss, Which::FirstExcited)?;
            (s, Some(e))
        }
    };
    let cfg = RunConfig::new("state", a);
    let mut doc = cfg.envelope("state", serde_json::to_value(state.to_dump())?);
    if let Some(e) = &energies {
        doc["energies"] = json!(e);
    }
    write_or_print(a.out.as_deref(), &pretty(&doc))?;
    summarize(
        a.out.as_ref(),
        json_mode,
        &cfg,
        match &energies {
            Some(e) => format!("{}-qubit state, E0 = {:.10}", state.n_qubits(), e[0]),
            None => format!("{}-qubit state", state.n_qubits()),
        },
        json!({ "n_qubits": state.n_qubits(), "energies": energies }),
    );
    Ok(())
}

pub fn sample(a: &SampleArgs, json_mode: bool) -> Result<()> {
    let state = load_state(&a.state)?;
    let mut mc = basis(a.basis, a.shots, a.seed);
    mc.angle_sampling = match a.angles {
        AngleArg::Sphere => AngleSampling::SphereUniform,
        AngleArg::Parameter => AngleSampling::ParameterUniform,
    };
    mc.shared_rotation_per_shot = !a.independent_rotations;
    let bits = draw(&state, &mc)?;
    let cfg = RunConfig::new("sample", a);
    write_or_print(a.out.as_deref(), &format!("{}{}", cfg.comment_header(), bits.to_text()))?;
    summarize(
        a.out.as_ref(),
        json_mode,
        &cfg,
        format!("{} shots of {} qubits in basis {}", bits.n_shots, bits.n_qubits, bits.basis_tag),
        json!({ "n_shots": bits.n_shots, "n_qubits": bits.n_qubits, "basis": bits.basis_tag }),
    );
    Ok(())
}

fn profile_rows(out: &mut String, source: &str, p: &DissimilarityProfile) {
    for (k, d) in p.partial.iter().enumerate() {
        let _ = writeln!(out, "{source},{},{k},{d:.12e}", p.basis_tag);
    }
    let _ = writeln!(out, "{source},{},total,{:.12e}", p.basis_tag, p.total);
}

pub fn dissim(a: &DissimArgs, json_mode: bool) -> Result<()> {
    let cg = coarse_grain(&a.cg);
    let cfg = RunConfig::new("dissim", a);
    let mut csv = cfg.comment_header();
    csv.push_str("source,basis,k,D_k\n");
    let mut profiles = Vec::new();
    let mut shape = None;
    for path in &a.files {
        let data = ingest_bitstrings(path)?;
        let profile = dissimilarity_profile(&data.to_bitstring_array(), &cg)?;
        for w in &profile.warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        profile_rows(&mut csv, &path.display().to_string(), &profile);
        shape.get_or_insert((data.n_qubits, data.n_shots));
        profiles.push((path.display().to_string(), profile));
    }
    if let Some(sig_path) = &a.signature {
        let (n_qubits, n_shots) = shape.expect("at least one file");
        let entries = profiles
            .iter()
            .map(|(_, p)| SignatureEntry { basis_tag: p.basis_tag.clone(), profile: p.clone(), config: None })
            .collect();
        let sig = HashSignature::from_entries(n_qubits, n_shots, entries)?;
        std::fs::write(sig_path, pretty(&cfg.envelope("signature", serde_json::to_value(&sig)?)))?;
    }
    if json_mode && a.out.is_none() {
        let list: Vec<Value> = profiles.iter().map(|(s, p)| json!({ "source": s, "profile": p })).collect();
        println!("{}", cfg.envelope("profiles", json!(list)));
        return Ok(());
    }
    write_or_print(a.out.as_deref(), &csv)?;
    summarize(
        a.out.as_ref(),
        json_mode,
        &cfg,
        format!("{} profiles", profiles.len()),
        json!({ "totals": profiles.iter().map(|(s, p)| json!({ "source": s, "total": p.total })).collect::<Vec<_>>() }),
    );
    Ok(())
}

pub fn signature(a: &SignatureArgs, json_mode: bool) -> Result<()> {
    let state = load_state(&a.state)?;
    let mut sig = compute_signature(&state, &default_bases(a.shots, a.seed), &coarse_grain(&a.cg))?;
    if let Some(label) = &a.label {
        sig = sig.with_label(label.clone());
    }
    let cfg = RunConfig::new("signature", a);
    write_or_print(a.out.as_deref(), &pretty(&cfg.envelope("signature", serde_json::to_value(&sig)?)))?;
    let (dz, dr) = (sig.total("z").unwrap_or(f64::NAN), sig.total("random").unwrap_or(f64::NAN));
    summarize(a.out.as_ref(), json_mode, &cfg, format!("D^z = {dz:.4}, D^r = {dr:.4}"), json!({ "d_z": dz, "d_r": dr }));
    Ok(())
}

pub fn scan(a: &ScanModel, json_mode: bool) -> Result<()> {
    let (model, grid, common): (Model, Vec<f64>, &ScanCommon) = match a {
        ScanModel::Tfim { hmin, hmax, step, n, j, common } => {
            (Model::Tfim { n_sites: *n, j: *j }, linear_grid(*hmin, *hmax, *step)?, common)
        }
        ScanModel::Ss { j2min, j2max, step, j1, bonds: b, levels, common } => (
            Model::ShastrySutherland { bonds: bonds(b.as_ref())?, j1: *j1, levels: *levels },
            linear_grid(*j2min, *j2max, *step)?,
            common,
        ),
    };
    let bases: Vec<MeasurementConfig> = common.bases.iter().map(|&b| basis(b, common.shots, common.seed)).collect();
    let mut sc = ScanConfig::new(bases);
    sc.cg = coarse_grain(&common.cg);
    let states = grid_states(&model, &grid, &sc.lanczos, &sc.select)?;
    let result = scan_from_states(&model, &states, &sc)?;
    let cfg = RunConfig::new("scan", a);

    if let Some(path) = &common.spectrum {
        let mut text = cfg.comment_header();
        text.push_str(SPECTRUM_CSV_HEADER);
        text.push('\n');
        for g in &states {
            text.push_str(&energy_csv_rows(g.parameter, &g.energies, model.sector()));
        }
        std::fs::write(path, text)?;
    }

    let transitions: Vec<Value> = result
        .series
        .iter()
        .map(|s| json!({ "state": s.state, "basis": s.basis_tag, "transitions": s.transitions }))
        .collect();
    if json_mode && common.out.is_none() {
        println!("{}", cfg.envelope("scan", json!({ "grid": result.grid, "series": result.series })));
        return Ok(());
    }
    write_or_print(common.out.as_deref(), &format!("{}{}", cfg.comment_header(), result.to_csv()))?;
    let human = result
        .series
        .iter()
        .map(|s| format!("{:?}/{}: transitions {:?}", s.state, s.basis_tag, s.transitions))
        .collect::<Vec<_>>()
        .join("; ");
    summarize(common.out.as_ref(), json_mode, &cfg, human, json!({ "series": transitions }));
    Ok(())
}

pub fn map(a: &MapArgs, json_mode: bool) -> Result<()> {
    let signatures: Vec<HashSignature> = match a.preset {
        Some(_) => {
            let seed = a.seed.ok_or_else(|| Error::InvalidArgument("--seed is required with --preset".into()))?;
            preset_families(a.circuit_seed)?
                .into_iter()
                .map(|(name, s)| {
                    Ok(compute_signature(&s, &default_bases(a.shots, seed), &CoarseGrainConfig::default())?
                        .with_label(name))
                })
                .collect::<Result<_>>()?
        }
        None if a.signatures.is_empty() => {
            return Err(Error::InvalidArgument("give signature files or --preset".into()));
        }
        None => a
            .signatures
            .iter()
            .map(|p| {
                let sig = load_signature(p)?;
                Ok(match sig.label {
                    Some(_) => sig,
                    None => sig.with_label(p.display().to_string()),
                })
            })
            .collect::<Result<_>>()?,
    };
    let points = dissimilarity_map(&signatures)?;
    let cfg = RunConfig::new("map", a);
    if json_mode && a.out.is_none() {
        println!("{}", cfg.envelope("map", json!(points)));
        return Ok(());
    }
    write_or_print(a.out.as_deref(), &format!("{}{}", cfg.comment_header(), map_csv(&points)))?;
    summarize(a.out.as_ref(), json_mode, &cfg, format!("{} points", points.len()), json!({ "points": points.len() }));
    Ok(())
}

pub fn certify(a: &CertifyArgs, _json_mode: bool) -> Result<()> {
    let target = load_signature(&a.target)?;
    let candidate = load_signature(&a.candidate)?;
    let verdict = certify::certify(&candidate, &target, a.threshold)?;
    let cfg = RunConfig::new("certify", a);
    write_or_print(a.out.as_deref(), &pretty(&cfg.envelope("verdict", serde_json::to_value(&verdict)?)))?;
    if let Some(path) = &a.out {
        let word = if verdict.pass { "PASS" } else { "FAIL" };
        println!("{word}: distance {:.5} (threshold {}) -> {}", verdict.distance, verdict.threshold, path.display());
    }
    Ok(())
}
