//! Seeded projective measurements in the computational and randomized bases.
//!
//! Each shot is drawn from its own ChaCha stream (see [`crate::rng`]), so the
//! output is independent of thread count and shots can be regenerated
//! individually. A shot consumes one uniform `u` first, then the rotation
//! angles if any.
//!
//! Outcomes are drawn by inverse CDF in index order, descending the register
//! one qubit at a time: at qubit `j` the remaining mass splits into the
//! `x_j = 0` and `x_j = 1` halves and `u` picks a side. For the random basis
//! the rotation of qubit `j` is folded into that step, which avoids applying
//! and undoing the full tensor-product rotation on every shot.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::qstate::{u3_matrix, Statevector};
use crate::rng;

/// Norm deviation beyond which a state is refused for sampling.
pub const NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    Random,
}

impl Basis {
    pub fn tag(self) -> &'static str {
        match self {
            Basis::Z => "z",
            Basis::Random => "random",
        }
    }
}

/// How random-basis angles are spread over their ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSampling {
    /// `cos θ`, `φ`, `λ` uniform: the rotated axis covers its Bloch-sphere
    /// sector with uniform area density.
    #[default]
    SphereUniform,
    /// `θ`, `φ`, `λ` uniform in parameter space.
    ParameterUniform,
}

/// Closed angle interval in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub lo: f64,
    pub hi: f64,
}

impl AngleRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        AngleRange { lo, hi }
    }

    fn validate(&self, name: &str, upper: f64) -> Result<()> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && 0.0 <= self.lo && self.lo <= self.hi && self.hi <= upper;
        if !ok {
            return Err(Error::invalid(format!(
                "{name} range [{}, {}] must satisfy 0 <= lo <= hi <= {upper}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }
}

const DEFAULT_RANGE: AngleRange = AngleRange::new(0.0, FRAC_PI_2);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub basis: Basis,
    pub n_shots: usize,
    pub seed: u64,
    pub theta: AngleRange,
    pub phi: AngleRange,
    pub lambda: AngleRange,
    pub shared_rotation_per_shot: bool,
    pub angle_sampling: AngleSampling,
}

impl MeasurementConfig {
    pub fn z(n_shots: usize, seed: u64) -> Self {
        MeasurementConfig {
            basis: Basis::Z,
            n_shots,
            seed,
            theta: DEFAULT_RANGE,
            phi: DEFAULT_RANGE,
            lambda: DEFAULT_RANGE,
            shared_rotation_per_shot: true,
            angle_sampling: AngleSampling::default(),
        }
    }

    pub fn random(n_shots: usize, seed: u64) -> Self {
        MeasurementConfig { basis: Basis::Random, ..Self::z(n_shots, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_shots == 0 {
            return Err(Error::invalid("n_shots must be at least 1"));
        }
        let theta_cap = match self.angle_sampling {
            AngleSampling::SphereUniform => PI,
            AngleSampling::ParameterUniform => TAU,
        };
        self.theta.validate("theta", theta_cap)?;
        self.phi.validate("phi", TAU)?;
        self.lambda.validate("lambda", TAU)?;
        Ok(())
    }

    fn draw_u3(&self, rng: &mut ChaCha8Rng) -> [[Complex64; 2]; 2] {
        let theta = match self.angle_sampling {
            AngleSampling::ParameterUniform => self.theta.draw(rng),
            AngleSampling::SphereUniform => {
                let (c_hi, c_lo) = (self.theta.lo.cos(), self.theta.hi.cos());
                let c = c_lo + (c_hi - c_lo) * rng.random::<f64>();
                c.clamp(-1.0, 1.0).acos()
            }
        };
        let phi = self.phi.draw(rng);
        let lambda = self.lambda.draw(rng);
        u3_matrix(theta, phi, lambda)
    }
}

/// Measurement record: `n_shots` rows of `n_qubits` values in {-1, +1},
/// stored row-major with qubit 0 first. Bit 0 maps to -1 and bit 1 to +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitstringArray {
    pub n_qubits: usize,
    pub n_shots: usize,
    pub values: Vec<i8>,
    pub basis_tag: String,
    /// Present when the array was generated here rather than ingested.
    pub config: Option<MeasurementConfig>,
    pub seed: Option<u64>,
}

impl BitstringArray {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shot(&self, i: usize) -> &[i8] {
        &self.values[i * self.n_qubits..(i + 1) * self.n_qubits]
    }

    pub fn shots(&self) -> impl Iterator<Item = &[i8]> {
        self.values.chunks_exact(self.n_qubits)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| f64::from(v)).collect()
    }

    /// Fraction of +1 entries.
    pub fn up_fraction(&self) -> f64 {
        self.values.iter().filter(|&&v| v > 0).count() as f64 / self.len() as f64
    }

    /// Wire format: one shot per line of `0`/`1`, qubit 0 leftmost, with a
    /// comment header naming the basis and seed.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n_shots * (self.n_qubits + 1) + 128);
        let _ = writeln!(out, "# basis={}", self.basis_tag);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed={seed}");
            let _ = writeln!(out, "# rng={}", rng::RNG_ALGORITHM);
        }
        let _ = writeln!(out, "# n_qubits={} n_shots={}", self.n_qubits, self.n_shots);
        for row in self.shots() {
            out.extend(row.iter().map(|&v| if v > 0 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }
}

/// Stack 0/1 rows into a ±1 array, in the given order.
pub fn concat_shots(rows: &[Vec<u8>]) -> Result<BitstringArray> {
    let first = rows.first().ok_or_else(|| Error::invalid("no shots to concatenate"))?;
    let n = first.len();
    if n == 0 {
        return Err(Error::invalid("shots must contain at least one bit"));
    }
    let mut values = Vec::with_capacity(n * rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(format!("shot {i} has {} bits, expected {n}", row.len())));
        }
        for &b in row {
            values.push(match b {
                0 => -1,
                1 => 1,
                _ => return Err(Error::invalid(format!("shot {i} contains non-binary value {b}"))),
            });
        }
    }
    Ok(BitstringArray {
        n_qubits: n,
        n_shots: rows.len(),
        values,
        basis_tag: "unspecified".into(),
        config: None,
        seed: None,
    })
}

/// Partial sums of the probability vector over every dyadic block, each
/// summed left to right. `levels[l][p]` is the mass of the `2^(N-l)` indices
/// whose top `l` bits equal `p`.
struct MassTree {
    levels: Vec<Vec<f64>>,
}

impl MassTree {
    fn new(probs: &[f64], n_qubits: usize) -> Self {
        let levels = (0..=n_qubits)
            .map(|l| {
                let block = probs.len() >> l;
                probs.chunks_exact(block).map(|c| c.iter().sum()).collect()
            })
            .collect();
        MassTree { levels }
    }

    fn draw(&self, u: f64, n_qubits: usize) -> usize {
        let mut target = u * self.levels[0][0];
        let mut prefix = 0usize;
        for l in 1..=n_qubits {
            let p0 = self.levels[l][2 * prefix];
            let p1 = self.levels[l][2 * prefix + 1];
            prefix = 2 * prefix + pick(&mut target, p0, p1);
        }
        prefix
    }
}

/// Choose the side of a binary split, consuming `target`.
fn pick(target: &mut f64, p0: f64, p1: f64) -> usize {
    if p1 <= 0.0 || (*target < p0 && p0 > 0.0) {
        0
    } else {
        *target -= p0;
        1
    }
}

fn check_state(state: &Statevector) -> Result<()> {
    let deviation = (state.norm_sqr() - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::Unnormalized { deviation });
    }
    Ok(())
}

fn push_bits(out: &mut [i8], index: usize, n_qubits: usize) {
    for (q, v) in out.iter_mut().enumerate() {
        *v = if index >> (n_qubits - 1 - q) & 1 == 1 { 1 } else { -1 };
    }
}

fn finish(values: Vec<i8>, n_qubits: usize, config: &MeasurementConfig) -> BitstringArray {
    BitstringArray {
        n_qubits,
        n_shots: config.n_shots,
        values,
        basis_tag: config.basis.tag().into(),
        config: Some(config.clone()),
        seed: Some(config.seed),
    }
}

/// Sample `config.n_shots` outcomes of measuring every qubit in σ^z.
pub fn sample_z(state: &Statevector, config: &MeasurementConfig) -> Result<BitstringArray> {
    if config.basis != Basis::Z {
        return Err(Error::invalid("sample_z needs a Z-basis configuration"));
    }
    config.validate()?;
    check_state(state)?;
    let n = state.n_qubits();
    let tree = MassTree::new(&state.probabilities(), n);
    let mut values = vec![0i8; n * config.n_shots];
    values.par_chunks_exact_mut(n).enumerate().for_each(|(shot, row)| {
        let u: f64 = rng::for_shot(config.seed, shot as u64).random();
        push_bits(row, tree.draw(u, n), n);
    });
    Ok(finish(values, n, config))
}

/// Sample in a freshly randomized basis per shot: draw U3 angles, rotate
/// every qubit (with one shared gate or one gate per qubit), measure in σ^z.
/// The input state is not modified.
pub fn sample_random_basis(state: &Statevector, config: &MeasurementConfig) -> Result<BitstringArray> {
    if config.basis != Basis::Random {
        return Err(Error::invalid("sample_random_basis needs a Random-basis configuration"));
    }
    config.validate()?;
    check_state(state)?;
    let n = state.n_qubits();
    let amps = state.amplitudes();
    let mut values = vec![0i8; n * config.n_shots];
    values.par_chunks_exact_mut(n).enumerate().for_each_init(
        || vec![Complex64::new(0.0, 0.0); amps.len()],
        |scratch, (shot, row)| {
            let mut rng = rng::for_shot(config.seed, shot as u64);
            let u: f64 = rng.random();
            let gates: Vec<_> = if config.shared_rotation_per_shot {
                vec![config.draw_u3(&mut rng)]
            } else {
                (0..n).map(|_| config.draw_u3(&mut rng)).collect()
            };
            let index = rotated_draw(amps, &gates, u, scratch);
            push_bits(row, index, n);
        },
    );
    Ok(finish(values, n, config))
}

/// Dispatch on `config.basis`.
pub fn sample(state: &Statevector, config: &MeasurementConfig) -> Result<BitstringArray> {
    match config.basis {
        Basis::Z => sample_z(state, config),
        Basis::Random => sample_random_basis(state, config),
    }
}

/// Inverse-CDF draw from `|(⊗_q U_q) ψ|²`. `gates` holds one matrix shared
/// by all qubits or one per qubit.
fn rotated_draw(amps: &[Complex64], gates: &[[[Complex64; 2]; 2]], u: f64, scratch: &mut [Complex64]) -> usize {
    let n = amps.len().trailing_zeros() as usize;
    let mut target = u * amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut prefix = 0usize;
    let mut len = amps.len();
    for q in 0..n {
        let g = &gates[if gates.len() == 1 { 0 } else { q }];
        let half = len / 2;
        let (p0, p1) = {
            let src: &[Complex64] = if q == 0 { amps } else { &scratch[..len] };
            let (lo, hi) = src.split_at(half);
            let mut p0 = 0.0;
            let mut p1 = 0.0;
            for (a, b) in lo.iter().zip(hi) {
                p0 += (g[0][0] * a + g[0][1] * b).norm_sqr();
                p1 += (g[1][0] * a + g[1][1] * b).norm_sqr();
            }
            (p0, p1)
        };
        let bit = pick(&mut target, p0, p1);
        let row = g[bit];
        if q == 0 {
            let (lo, hi) = amps.split_at(half);
            for ((s, a), b) in scratch.iter_mut().zip(lo).zip(hi) {
                *s = row[0] * a + row[1] * b;
            }
        } else {
            for i in 0..half {
                scratch[i] = row[0] * scratch[i] + row[1] * scratch[i + half];
            }
        }
        prefix = 2 * prefix + bit;
        len = half;
    }
    prefix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build_cat_state, build_uniform_state, Gate};

    #[test]
    fn product_zero_state_is_all_down() {
        let s = Statevector::zero(16).unwrap();
        let a = sample_z(&s, &MeasurementConfig::z(8, 1)).unwrap();
        assert_eq!(a.len(), 128);
        assert!(a.values.iter().all(|&v| v == -1));
    }

    #[test]
    fn ghz_shots_are_uniform_rows() {
        let s = build_cat_state(16, FRAC_PI_2).unwrap();
        let a = sample_z(&s, &MeasurementConfig::z(512, 3)).unwrap();
        let mut ups = 0;
        for row in a.shots() {
            assert!(row.iter().all(|&v| v == row[0]));
            ups += usize::from(row[0] == 1);
        }
        assert!(ups > 150 && ups < 362, "{ups}");
    }

    #[test]
    fn uniform_state_is_balanced() {
        let s = build_uniform_state(16).unwrap();
        let a = sample_z(&s, &MeasurementConfig::z(8192, 5)).unwrap();
        assert!((a.up_fraction() - 0.5).abs() < 0.02);
    }

    #[test]
    fn identity_rotation_reproduces_z_sampling() {
        let s = Statevector::from_real(&[0.6, 0.8]).unwrap();
        let mut rc = MeasurementConfig::random(4000, 42);
        rc.theta = AngleRange::new(0.0, 0.0);
        rc.phi = AngleRange::new(0.0, 0.0);
        rc.lambda = AngleRange::new(0.0, 0.0);
        let r = sample_random_basis(&s, &rc).unwrap();
        let z = sample_z(&s, &MeasurementConfig::z(4000, 42)).unwrap();
        assert_eq!(r.values, z.values);

        let s = crate::qstate::build_random_circuit(6, 8, 1).unwrap().simulate().unwrap();
        rc.n_shots = 2000;
        let r = sample_random_basis(&s, &rc).unwrap();
        let z = sample_z(&s, &MeasurementConfig::z(2000, 42)).unwrap();
        assert_eq!(r.values, z.values);
    }

    #[test]
    fn rotated_draw_matches_explicit_rotation() {
        // Compare folded rotation against applying U3 to every qubit and
        // reading the cumulative distribution directly.
        let s = crate::qstate::build_random_circuit(4, 5, 9).unwrap().simulate().unwrap();
        let (theta, phi, lambda) = (0.9, 0.3, 1.2);
        let m = u3_matrix(theta, phi, lambda);
        let mut rotated = s.clone();
        for q in 0..4 {
            rotated.apply(&Gate::U3 { qubit: q, theta, phi, lambda }).unwrap();
        }
        let probs = rotated.probabilities();
        let mut scratch = vec![Complex64::new(0.0, 0.0); 16];
        for k in 0..200 {
            let u = (k as f64 + 0.5) / 200.0;
            let mut acc = 0.0;
            let want = probs.iter().position(|p| {
                acc += p;
                acc > u
            });
            let got = rotated_draw(s.amplitudes(), &[m], u, &mut scratch);
            let want = want.unwrap_or(15);
            // Ties at bin edges can differ by rounding only.
            if got != want {
                let edge: f64 = probs[..got.max(want)].iter().sum();
                assert!((edge - u).abs() < 1e-12, "u={u} got={got} want={want}");
            }
        }
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let s = crate::qstate::build_random_circuit(8, 6, 2).unwrap().simulate().unwrap();
        let c = MeasurementConfig::random(300, 11);
        assert_eq!(sample(&s, &c).unwrap(), sample(&s, &c).unwrap());
        let c2 = MeasurementConfig::random(300, 12);
        assert_ne!(sample(&s, &c).unwrap().values, sample(&s, &c2).unwrap().values);
    }

    #[test]
    fn concat_examples() {
        let a = concat_shots(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(a.values, vec![-1, 1, 1, -1]);
        let a = concat_shots(&[vec![1, 1, 1]]).unwrap();
        assert_eq!(a.values, vec![1, 1, 1]);
        assert!(concat_shots(&[]).is_err());
        assert!(concat_shots(&[vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let s = Statevector::zero(2).unwrap();
        assert!(sample_z(&s, &MeasurementConfig::z(0, 1)).is_err());
        assert!(sample_z(&s, &MeasurementConfig::random(4, 1)).is_err());
        let mut c = MeasurementConfig::random(4, 1);
        c.phi = AngleRange::new(1.0, 0.5);
        assert!(sample_random_basis(&s, &c).is_err());
    }

    #[test]
    fn text_has_one_line_per_shot() {
        let s = build_cat_state(4, FRAC_PI_2).unwrap();
        let a = sample_z(&s, &MeasurementConfig::z(5, 2)).unwrap();
        let text = a.to_text();
        let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| *r == "0000" || *r == "1111"));
    }
}
