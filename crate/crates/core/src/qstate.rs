//! Dense statevectors, gates, and the state families used for benchmarking.
//!
//! Basis index convention is msb-first: the bitstring `x0 x1 ... x{N-1}` maps
//! to `sum_q x_q * 2^(N-1-q)`, so qubit 0 is the leftmost character.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Tag written into state dumps to pin the index convention.
pub const INDEX_CONVENTION: &str = "msb-first";

/// Tolerance on `|‖ψ‖² - 1|` for a valid state.
pub const NORM_TOL: f64 = 1e-10;
// Below this size the rayon split costs more than it saves.
const PAR_THRESHOLD: usize = 1 << 14;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gates understood by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    U3 { qubit: usize, theta: f64, phi: f64, lambda: f64 },
    H(usize),
    X(usize),
    SqrtX(usize),
    SqrtY(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl Gate {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::U3 { qubit, .. } => vec![qubit],
            Gate::H(q) | Gate::X(q) | Gate::SqrtX(q) | Gate::SqrtY(q) | Gate::T(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Cz(..))
    }

    /// 2x2 matrix of a single-qubit gate, `None` for two-qubit gates.
    pub fn matrix(&self) -> Option<Mat2> {
        let m = match *self {
            Gate::U3 { theta, phi, lambda, .. } => u3_matrix(theta, phi, lambda),
            Gate::H(_) => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Gate::SqrtX(_) => [
                [c(0.5, 0.5), c(0.5, -0.5)],
                [c(0.5, -0.5), c(0.5, 0.5)],
            ],
            Gate::SqrtY(_) => [
                [c(0.5, 0.5), c(-0.5, -0.5)],
                [c(0.5, 0.5), c(0.5, 0.5)],
            ],
            Gate::T(_) => [
                [c(1.0, 0.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, FRAC_PI_4)],
            ],
            Gate::Cnot { .. } | Gate::Cz(..) => return None,
        };
        Some(m)
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Gate::U3 { theta, phi, lambda, .. } = *self {
            if !(theta.is_finite() && phi.is_finite() && lambda.is_finite()) {
                return Err(Error::NonFiniteParameter);
            }
        }
        let targets = self.targets();
        for &q in &targets {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::RepeatedQubit(targets[0]));
        }
        Ok(())
    }
}

/// `U3(θ,φ,λ) = [[cos θ/2, -e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [
        [c(co, 0.0), -Complex64::from_polar(s, lambda)],
        [
            Complex64::from_polar(s, phi),
            Complex64::from_polar(co, phi + lambda),
        ],
    ]
}

/// Ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Gate>,
    /// Seed used to draw the gates, when the circuit was generated randomly.
    pub seed: Option<u64>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, ops: Vec::new(), seed: None }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.ops.push(gate);
        Ok(())
    }

    /// Run the circuit on `|0...0>`.
    pub fn simulate(&self) -> Result<Statevector> {
        let mut state = Statevector::zero(self.n_qubits)?;
        for g in &self.ops {
            state.apply(g)?;
        }
        Ok(state)
    }
}

/// Pseudo-random circuit of `cycles` cycles on a ring of `n_qubits` qubits.
///
/// Each cycle draws one of {√X, √Y, T} uniformly per qubit, then a layer of CZ
/// gates on one of two fixed perfect matchings of the ring (even pairs
/// `(0,1),(2,3),...` on even cycles, odd pairs `(1,2),...,(N-1,0)` on odd ones).
/// A last layer of single-qubit draws closes the circuit.
pub fn build_random_circuit(n_qubits: usize, cycles: usize, seed: u64) -> Result<Circuit> {
    if cycles == 0 {
        return Err(Error::invalid("random circuit needs at least one cycle"));
    }
    if n_qubits < 2 || n_qubits % 2 != 0 {
        return Err(Error::invalid(format!(
            "random circuit needs an even number of qubits, got {n_qubits}"
        )));
    }
    check_size(n_qubits)?;
    let mut rng = rng::sequential(seed);
    let mut circuit = Circuit::new(n_qubits);
    circuit.seed = Some(seed);

    let single_layer = |rng: &mut rand_chacha::ChaCha8Rng, circuit: &mut Circuit| -> Result<()> {
        for q in 0..n_qubits {
            let gate = match rng.random_range(0..3u32) {
                0 => Gate::SqrtX(q),
                1 => Gate::SqrtY(q),
                _ => Gate::T(q),
            };
            circuit.push(gate)?;
        }
        Ok(())
    };

    // The two ring matchings alternate. Repeating one would let consecutive
    // CZ layers cancel through the diagonal T gates between them.
    for cycle in 0..cycles {
        single_layer(&mut rng, &mut circuit)?;
        let offset = cycle % 2;
        for p in 0..n_qubits / 2 {
            let a = (2 * p + offset) % n_qubits;
            let b = (a + 1) % n_qubits;
            circuit.push(Gate::Cz(a, b))?;
        }
    }
    single_layer(&mut rng, &mut circuit)?;
    Ok(circuit)
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::invalid("register needs at least one qubit"));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: n_qubits, cap: MAX_QUBITS });
    }
    Ok(())
}

/// Dense pure state over `2^n_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    /// Load amplitudes (e.g. an eigenvector) and renormalize them.
    ///
    /// Any nonzero vector of power-of-two length is accepted; the result has
    /// unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_size(n_qubits)?;
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFiniteParameter);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("zero vector is not a state"));
        }
        let amps = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Statevector { n_qubits, amps })
    }

    /// Real amplitudes, as produced by the eigensolver.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Bit mask of qubit `q` in a basis index.
    pub fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Fail if the norm drifted further than `tol` from one.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > tol {
            return Err(Error::Unnormalized { deviation });
        }
        Ok(())
    }

    /// Apply `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let (cm, tm) = (self.mask(control), self.mask(target));
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let both = self.mask(a) | self.mask(b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & both == both {
                        *amp = -*amp;
                    }
                }
            }
            _ => {
                let m = gate.matrix().expect("single-qubit gate has a matrix");
                let q = gate.targets()[0];
                let mask = self.mask(q);
                apply_single(&mut self.amps, mask, &m);
            }
        }
        Ok(())
    }

    /// Functional form of [`Statevector::apply`].
    pub fn with_gate(mut self, gate: &Gate) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::LengthMismatch { left: circuit.n_qubits, right: self.n_qubits });
        }
        for g in &circuit.ops {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Serializable dump (interleaved real/imag amplitudes).
    pub fn to_dump(&self) -> StateDump {
        StateDump {
            n_qubits: self.n_qubits,
            index_convention: INDEX_CONVENTION.to_string(),
            amplitudes: self.amps.iter().flat_map(|a| [a.re, a.im]).collect(),
            label: None,
        }
    }

    pub fn from_dump(dump: &StateDump) -> Result<Self> {
        if dump.index_convention != INDEX_CONVENTION {
            return Err(Error::Format(format!(
                "unsupported index convention {:?}",
                dump.index_convention
            )));
        }
        if dump.amplitudes.len() != 2usize << dump.n_qubits.min(63) {
            return Err(Error::Format(format!(
                "{} amplitude components for {} qubits",
                dump.amplitudes.len(),
                dump.n_qubits
            )));
        }
        let amps = dump
            .amplitudes
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let state = Self::from_amplitudes(amps)?;
        Ok(state)
    }
}

/// On-disk state representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub n_qubits: usize,
    pub index_convention: String,
    /// `re0, im0, re1, im1, ...`
    pub amplitudes: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub(crate) fn apply_single(amps: &mut [Complex64], mask: usize, m: &Mat2) {
    let kernel = |chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(mask);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = m[0][0] * x0 + m[0][1] * x1;
            *a1 = m[1][0] * x0 + m[1][1] * x1;
        }
    };
    if amps.len() >= PAR_THRESHOLD {
        amps.par_chunks_exact_mut(2 * mask).for_each(kernel);
    } else {
        amps.chunks_exact_mut(2 * mask).for_each(kernel);
    }
}

/// `cos(θ/2)|0...0> + sin(θ/2)|1...1>`, assigned directly.
pub fn build_cat_state(n_qubits: usize, theta: f64) -> Result<Statevector> {
    check_theta(theta)?;
    let mut state = Statevector::zero(n_qubits)?;
    let (s, co) = (theta / 2.0).sin_cos();
    let last = state.dim() - 1;
    state.amps[0] = Complex64::new(co, 0.0);
    state.amps[last] += Complex64::new(s, 0.0);
    Ok(state)
}

/// The cat state prepared by rotating qubit 0 and fanning out with a CNOT chain.
pub fn cat_state_circuit(n_qubits: usize, theta: f64) -> Result<Circuit> {
    check_theta(theta)?;
    let mut circuit = Circuit::new(n_qubits);
    circuit.push(Gate::U3 { qubit: 0, theta, phi: 0.0, lambda: 0.0 })?;
    for q in 1..n_qubits {
        circuit.push(Gate::Cnot { control: q - 1, target: q })?;
    }
    Ok(circuit)
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteParameter);
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!("cat angle {theta} outside [0, pi]")));
    }
    Ok(())
}

/// Equal superposition of all basis states with Hamming weight `weight`.
pub fn build_dicke_state(n_qubits: usize, weight: usize) -> Result<Statevector> {
    if weight > n_qubits {
        return Err(Error::invalid(format!(
            "Dicke weight {weight} exceeds {n_qubits} qubits"
        )));
    }
    check_size(n_qubits)?;
    let support = binomial(n_qubits, weight);
    let amp = Complex64::new(1.0 / (support as f64).sqrt(), 0.0);
    let amps = (0..1usize << n_qubits)
        .map(|i| if i.count_ones() as usize == weight { amp } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(Statevector { n_qubits, amps })
}

/// `(H|0>)^⊗N`.
pub fn build_uniform_state(n_qubits: usize) -> Result<Statevector> {
    check_size(n_qubits)?;
    let dim = 1usize << n_qubits;
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    Ok(Statevector { n_qubits, amps: vec![amp; dim] })
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const EPS: f64 = 1e-12;

    fn close(a: Complex64, re: f64, im: f64) -> bool {
        (a.re - re).abs() < EPS && (a.im - im).abs() < EPS
    }

    #[test]
    fn hadamard_on_zero() {
        let s = Statevector::zero(1).unwrap().with_gate(&Gate::H(0)).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(s.amplitudes()[1], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn cnot_builds_bell_pair() {
        // (|00> + |10>)/sqrt2 -> (|00> + |11>)/sqrt2
        let s = Statevector::zero(2)
            .unwrap()
            .with_gate(&Gate::H(0))
            .unwrap()
            .with_gate(&Gate::Cnot { control: 0, target: 1 })
            .unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(a[1], 0.0, 0.0));
        assert!(close(a[2], 0.0, 0.0));
        assert!(close(a[3], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn t_gate_adds_phase() {
        let s = Statevector::zero(1)
            .unwrap()
            .with_gate(&Gate::H(0))
            .unwrap()
            .with_gate(&Gate::T(0))
            .unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(a[1], 0.5, 0.5));
    }

    #[test]
    fn gate_matrices_are_unitary() {
        let gates = [
            Gate::U3 { qubit: 0, theta: 0.7, phi: -1.3, lambda: 2.9 },
            Gate::H(0),
            Gate::X(0),
            Gate::SqrtX(0),
            Gate::SqrtY(0),
            Gate::T(0),
        ];
        for g in gates {
            let m = g.matrix().unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).norm() < EPS, "{g:?}");
                }
            }
        }
    }

    #[test]
    fn sqrt_gates_square_to_paulis() {
        let sq = |m: Mat2| {
            let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = m[i][0] * m[0][j] + m[i][1] * m[1][j];
                }
            }
            r
        };
        let x = sq(Gate::SqrtX(0).matrix().unwrap());
        assert!(close(x[0][1], 1.0, 0.0) && close(x[0][0], 0.0, 0.0));
        let y = sq(Gate::SqrtY(0).matrix().unwrap());
        assert!(close(y[0][1], 0.0, -1.0) && close(y[1][0], 0.0, 1.0));
    }

    #[test]
    fn rejects_bad_targets() {
        let mut s = Statevector::zero(2).unwrap();
        assert!(matches!(s.apply(&Gate::H(2)), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(s.apply(&Gate::Cz(1, 1)), Err(Error::RepeatedQubit(1))));
        let bad = Gate::U3 { qubit: 0, theta: f64::NAN, phi: 0.0, lambda: 0.0 };
        assert!(matches!(s.apply(&bad), Err(Error::NonFiniteParameter)));
    }

    #[test]
    fn cat_state_examples() {
        let s = build_cat_state(16, 0.0).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);

        let s = build_cat_state(16, PI / 2.0).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(s.amplitudes()[65535], FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 2);

        let s = build_cat_state(2, PI / 3.0).unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], 3f64.sqrt() / 2.0, 0.0));
        assert!(close(a[3], 0.5, 0.0));
        assert!(close(a[1], 0.0, 0.0) && close(a[2], 0.0, 0.0));

        let s = build_cat_state(3, PI).unwrap();
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 1e-15).count(), 1);
        assert!(build_cat_state(3, 4.0).is_err());
    }

    #[test]
    fn cat_circuit_matches_direct_construction() {
        for n in [2, 4, 8, 16] {
            for theta in [0.0, PI / 4.0, PI / 2.0, PI] {
                let direct = build_cat_state(n, theta).unwrap();
                let via = cat_state_circuit(n, theta).unwrap().simulate().unwrap();
                for (a, b) in direct.amplitudes().iter().zip(via.amplitudes()) {
                    assert!((a - b).norm() < EPS, "n={n} theta={theta}");
                }
            }
        }
    }

    #[test]
    fn dicke_examples() {
        let s = build_dicke_state(2, 1).unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], 0.0, 0.0) && close(a[3], 0.0, 0.0));
        assert!(close(a[1], FRAC_1_SQRT_2, 0.0) && close(a[2], FRAC_1_SQRT_2, 0.0));

        let s = build_dicke_state(16, 8).unwrap();
        let nz: Vec<_> = s.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 12870);
        assert!(nz.iter().all(|a| close(**a, 1.0 / 12870f64.sqrt(), 0.0)));

        let s = build_dicke_state(16, 0).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(build_dicke_state(4, 5).is_err());
    }

    #[test]
    fn dicke_support_is_binomial() {
        for n in 1..=10 {
            for d in 0..=n {
                let s = build_dicke_state(n, d).unwrap();
                let nz = s.amplitudes().iter().filter(|a| a.norm() > 0.0).count() as u64;
                assert_eq!(nz, binomial(n, d));
                s.check_normalized(NORM_TOL).unwrap();
            }
        }
    }

    #[test]
    fn uniform_examples() {
        let s = build_uniform_state(1).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, FRAC_1_SQRT_2, 0.0)));
        let s = build_uniform_state(2).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, 0.5, 0.0)));
        let s = build_uniform_state(16).unwrap();
        assert_eq!(s.dim(), 65536);
        assert!(s.amplitudes().iter().all(|a| close(*a, 1.0 / 256.0, 0.0)));
    }

    #[test]
    fn from_amplitudes_examples() {
        let s = Statevector::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(s.probabilities(), vec![1.0, 0.0]);
        let s = Statevector::from_real(&[0.6, 0.8]).unwrap();
        assert!((s.probabilities()[0] - 0.36).abs() < EPS);
        let s = Statevector::from_real(&[1.0, 1.0]).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(Statevector::from_real(&[1.0, 0.0, 0.0]).is_err());
        assert!(Statevector::from_real(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn random_circuit_layout() {
        let c = build_random_circuit(16, 1, 11).unwrap();
        let singles = c.ops.iter().filter(|g| !g.is_two_qubit()).count();
        let czs = c.ops.iter().filter(|g| matches!(g, Gate::Cz(..))).count();
        assert_eq!((singles, czs, c.ops.len()), (32, 8, 40));
        assert!(c.ops[..16].iter().all(|g| !g.is_two_qubit()));
        assert!(c.ops[16..24].iter().all(|g| g.is_two_qubit()));

        assert_eq!(build_random_circuit(16, 19, 5).unwrap(), build_random_circuit(16, 19, 5).unwrap());
        assert_ne!(build_random_circuit(16, 19, 5).unwrap(), build_random_circuit(16, 19, 6).unwrap());
        assert!(build_random_circuit(5, 3, 0).is_err());
        assert!(build_random_circuit(4, 0, 0).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let s = build_cat_state(3, 1.1).unwrap().with_gate(&Gate::T(1)).unwrap();
        let json = serde_json::to_string(&s.to_dump()).unwrap();
        let back = Statevector::from_dump(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            Statevector::zero(MAX_QUBITS + 1),
            Err(Error::TooManyQubits { .. })
        ));
    }
}
