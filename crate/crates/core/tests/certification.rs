use bitsig::certify::{
    certify, compute_signature, default_bases, dissimilarity_map, signature_distance, HashSignature, Model,
    DEFAULT_THRESHOLD,
};
use bitsig::dissim::CoarseGrainConfig;
use bitsig::qstate::{build_cat_state, build_dicke_state, build_random_circuit, build_uniform_state, Statevector};
use bitsig::spectra::{LanczosConfig, SelectOptions, Which};
use std::f64::consts::FRAC_PI_2;

const SHOTS: usize = 8192;

fn families() -> Vec<(&'static str, Statevector)> {
    let (_, singlet) =
        Model::ss16().states_at(0.3, &[Which::Ground], &LanczosConfig::default(), &SelectOptions::default()).unwrap();
    vec![
        ("trivial", Statevector::zero(16).unwrap()),
        ("ghz", build_cat_state(16, FRAC_PI_2).unwrap()),
        ("dicke_8", build_dicke_state(16, 8).unwrap()),
        ("uniform", build_uniform_state(16).unwrap()),
        ("haar", build_random_circuit(16, 19, 7).unwrap().simulate().unwrap()),
        ("ss_singlet", singlet.into_iter().next().unwrap()),
    ]
}

fn signatures(states: &[(&str, Statevector)], seed: u64) -> Vec<HashSignature> {
    let cg = CoarseGrainConfig::default();
    states
        .iter()
        .map(|(name, s)| compute_signature(s, &default_bases(SHOTS, seed), &cg).unwrap().with_label(*name))
        .collect()
}

#[test]
fn signatures_are_deterministic() {
    let s = build_dicke_state(10, 3).unwrap();
    let cg = CoarseGrainConfig::default();
    let a = serde_json::to_vec(&compute_signature(&s, &default_bases(256, 5), &cg).unwrap()).unwrap();
    let b = serde_json::to_vec(&compute_signature(&s, &default_bases(256, 5), &cg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn families_are_stable_and_separable() {
    let states = families();
    let first = signatures(&states, 1);
    let second = signatures(&states, 2);

    let (m1, m2) = (dissimilarity_map(&first).unwrap(), dissimilarity_map(&second).unwrap());
    for (a, b) in m1.iter().zip(&m2) {
        assert!((a.d_z - b.d_z).abs() < 0.01 && (a.d_r - b.d_r).abs() < 0.01, "{a:?} vs {b:?}");
    }

    let within: Vec<f64> = first.iter().zip(&second).map(|(a, b)| signature_distance(a, b).unwrap()).collect();
    for i in 0..states.len() {
        assert!(certify(&second[i], &first[i], DEFAULT_THRESHOLD).unwrap().pass, "{} replica", states[i].0);
        for j in 0..states.len() {
            if i == j {
                continue;
            }
            let d = signature_distance(&first[i], &first[j]).unwrap();
            let noise = within[i].max(within[j]);
            assert!(d >= 3.0 * noise, "{} vs {}: {d} against replica spread {noise}", states[i].0, states[j].0);
        }
    }

    // The singlet and chaotic states share their totals; only the profiles tell them apart.
    let (haar, singlet) = (&first[4], &first[5]);
    assert!((haar.total("z").unwrap() - singlet.total("z").unwrap()).abs() < 0.01);
    assert!(!certify(singlet, haar, DEFAULT_THRESHOLD).unwrap().pass);
}
