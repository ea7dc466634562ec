//! Dense state-vector reference engine for at most three qubits.
//!
//! Qubit `i` is bit `i` of the basis index. In the first-quantized
//! description the photon is one qubit with `|L⟩ = |0⟩` and `|R⟩ = |1⟩`; in
//! the second-quantized description each mode is an occupation-number qubit.
//! Ancillas are qubits with `|a0⟩ = |0⟩`, `|a1⟩ = |1⟩`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::outcome::Prob;

pub type C = Complex64;

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const DYADIC_TOLERANCE: f64 = 1e-9;
pub const MAX_QUBITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Description {
    /// Photon as a single which-path qubit.
    First,
    /// One occupation-number qubit per mode.
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amps: Vec<C>,
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

impl StateVector {
    pub fn new(labels: Vec<String>, amps: Vec<C>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        if amps.len() != 1 << n {
            return Err(Error::ShapeMismatch { expected: format!("{} amplitudes", 1 << n), found: amps.len().to_string() });
        }
        let s = Self { labels, amps };
        if (s.norm() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("norm {}", s.norm())));
        }
        Ok(s)
    }

    /// The computational basis state with the given bit for each qubit.
    pub fn basis(labels: &[&str], bits: &[u8]) -> Result<Self> {
        let index = bits.iter().enumerate().fold(0usize, |acc, (i, &b)| acc | (((b & 1) as usize) << i));
        let mut amps = vec![c(0.0); 1 << labels.len()];
        if index >= amps.len() {
            return Err(Error::ShapeMismatch { expected: labels.len().to_string(), found: bits.len().to_string() });
        }
        amps[index] = c(1.0);
        Self::new(labels.iter().map(|s| s.to_string()).collect(), amps)
    }

    pub fn photon(alpha_l: C, alpha_r: C) -> Result<Self> {
        Self::new(vec!["photon".into()], vec![alpha_l, alpha_r])
    }

    pub fn qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &[u8]) -> C {
        let index = bits.iter().enumerate().fold(0usize, |acc, (i, &b)| acc | (((b & 1) as usize) << i));
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Tensor product; qubits of `self` come first.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let mut amps = vec![c(0.0); self.dim() * other.dim()];
        for (j, b) in other.amps.iter().enumerate() {
            for (i, a) in self.amps.iter().enumerate() {
                amps[i | (j << self.qubits())] = a * b;
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::new(labels, amps)
    }

    /// Multiplies by the global phase that makes the first nonzero amplitude real positive.
    pub fn canonicalize(&mut self) {
        if let Some(first) = self.amps.iter().find(|a| a.norm() > NORM_TOLERANCE).copied() {
            let phase = first.conj() / first.norm();
            for a in &mut self.amps {
                *a *= phase;
            }
        }
    }

    pub fn canonical(&self) -> Self {
        let mut s = self.clone();
        s.canonicalize();
        s
    }

    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim() && self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.canonical().approx_eq(&other.canonical(), tol)
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_one(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| i >> q & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Weight outside the subspace where the listed qubits hold exactly one excitation.
    pub fn leakage_from_single_excitation(&self, modes: &[usize]) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| modes.iter().filter(|&&m| i >> m & 1 == 1).count() != 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub(crate) fn renormalized(mut self) -> Self {
        let n = self.norm();
        for a in &mut self.amps {
            *a /= n;
        }
        self
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() <= NORM_TOLERANCE {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let bits: String = (0..self.qubits()).map(|q| if i >> q & 1 == 1 { '1' } else { '0' }).collect();
            write!(f, "({:.6}{:+.6}i)|{bits}⟩", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Unitary acting on the listed qubits; `targets[0]` is the low bit of the
/// matrix index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGate {
    pub matrix: Vec<Vec<C>>,
    pub targets: Vec<usize>,
}

impl QuantumGate {
    pub fn new(matrix: Vec<Vec<C>>, targets: Vec<usize>) -> Result<Self> {
        let g = Self { matrix, targets };
        let d = 1 << g.targets.len();
        if g.matrix.len() != d || g.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::ShapeMismatch { expected: format!("{d}x{d}"), found: format!("{} rows", g.matrix.len()) });
        }
        if !g.is_unitary(NORM_TOLERANCE) {
            return Err(Error::InvalidState("matrix is not unitary".into()));
        }
        Ok(g)
    }

    /// Same matrix on different qubits.
    pub fn on(mut self, targets: &[usize]) -> Self {
        assert_eq!(targets.len(), self.targets.len());
        self.targets = targets.to_vec();
        self
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.matrix.len();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let dot: C = (0..d).map(|k| self.matrix[k][i].conj() * self.matrix[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                (dot - c(want)).norm() <= tol
            })
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        for &t in &self.targets {
            if t >= state.qubits() {
                return Err(Error::ModeOutOfRange { index: t, count: state.qubits() });
            }
        }
        let local = |i: usize| self.targets.iter().enumerate().fold(0usize, |acc, (k, &t)| acc | ((i >> t & 1) << k));
        let mask: usize = self.targets.iter().map(|&t| 1 << t).sum();
        let mut out = vec![c(0.0); state.dim()];
        for (i, a) in state.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let col = local(i);
            for (row, line) in self.matrix.iter().enumerate() {
                let m = line[col];
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                let j = (i & !mask) | self.targets.iter().enumerate().fold(0usize, |acc, (k, &t)| acc | ((row >> k & 1) << t));
                out[j] += m * a;
            }
        }
        Ok(StateVector { labels: state.labels.clone(), amps: out })
    }

    /// Matrix product `other · self` (apply `self` first), same targets.
    pub fn then(&self, other: &QuantumGate) -> QuantumGate {
        let d = self.matrix.len();
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| other.matrix[i][k] * self.matrix[k][j]).sum()).collect())
            .collect();
        QuantumGate { matrix, targets: self.targets.clone() }
    }
}

/// Balanced beamsplitter. First description acts on qubit 0; second on
/// modes 0 (`L`) and 1 (`R`), leaving `|00⟩` and `|11⟩` fixed.
pub fn bs_unitary(description: Description) -> QuantumGate {
    let h = c(FRAC_1_SQRT_2);
    let z = c(0.0);
    match description {
        // |L⟩ ↦ (|R⟩ − |L⟩)/√2, |R⟩ ↦ (|R⟩ + |L⟩)/√2
        Description::First => QuantumGate { matrix: vec![vec![-h, h], vec![h, h]], targets: vec![0] },
        // index 1 = |1⟩_L|0⟩_R, index 2 = |0⟩_L|1⟩_R
        Description::Second => QuantumGate {
            matrix: vec![
                vec![c(1.0), z, z, z],
                vec![z, -h, h, z],
                vec![z, h, h, z],
                vec![z, z, z, c(1.0)],
            ],
            targets: vec![0, 1],
        },
    }
}

/// `e^{iφ}` on `|R⟩` (first) or on `|1⟩` of mode 1 (second).
pub fn phase_unitary(phi: f64, description: Description) -> QuantumGate {
    let target = match description {
        Description::First => 0,
        Description::Second => 1,
    };
    QuantumGate { matrix: vec![vec![c(1.0), c(0.0)], vec![c(0.0), C::from_polar(1.0, phi)]], targets: vec![target] }
}

/// Flips the ancilla when the photon is in `R`. First description: photon
/// qubit 0, ancilla qubit 1. Second: control is mode 1 (`R`), ancilla qubit 2.
pub fn cnot_unitary(description: Description) -> QuantumGate {
    let (o, z) = (c(1.0), c(0.0));
    let matrix = vec![vec![o, z, z, z], vec![z, z, z, o], vec![z, z, o, z], vec![z, o, z, z]];
    let targets = match description {
        Description::First => vec![0, 1],
        Description::Second => vec![1, 2],
    };
    QuantumGate { matrix, targets }
}

/// Exchanges two qubits.
pub fn swap_unitary(a: usize, b: usize) -> QuantumGate {
    let (o, z) = (c(1.0), c(0.0));
    QuantumGate {
        matrix: vec![vec![o, z, z, z], vec![z, z, o, z], vec![z, o, z, z], vec![z, z, z, o]],
        targets: vec![a, b],
    }
}

pub fn pauli_x(target: usize) -> QuantumGate {
    QuantumGate { matrix: vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]], targets: vec![target] }
}

/// Orthonormal pair of single-qubit vectors with outcome names.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    pub qubit: usize,
    pub vectors: [(String, [C; 2]); 2],
}

impl MeasurementBasis {
    pub fn new(qubit: usize, first: (&str, [C; 2]), second: (&str, [C; 2])) -> Self {
        Self { qubit, vectors: [(first.0.into(), first.1), (second.0.into(), second.1)] }
    }

    pub fn computational(qubit: usize, zero: &str, one: &str) -> Self {
        Self::new(qubit, (zero, [c(1.0), c(0.0)]), (one, [c(0.0), c(1.0)]))
    }

    /// `{|+⟩, |−⟩}` with `|±⟩ = (|0⟩ ± |1⟩)/√2`.
    pub fn conjugate(qubit: usize, plus: &str, minus: &str) -> Self {
        let h = c(FRAC_1_SQRT_2);
        Self::new(qubit, (plus, [h, h]), (minus, [h, -h]))
    }

    fn check(&self) -> Result<()> {
        let [(_, u), (_, v)] = &self.vectors;
        let norm = |x: &[C; 2]| x[0].norm_sqr() + x[1].norm_sqr();
        let overlap = u[0].conj() * v[0] + u[1].conj() * v[1];
        if (norm(u) - 1.0).abs() > NORM_TOLERANCE || (norm(v) - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::DegenerateBasis("vectors are not normalized".into()));
        }
        if overlap.norm() > NORM_TOLERANCE {
            return Err(Error::DegenerateBasis("vectors are not orthogonal".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveOutcome {
    pub label: String,
    pub index: usize,
    pub probability: f64,
    /// Canonicalized post-measurement state, `None` for impossible outcomes.
    pub collapsed: Option<StateVector>,
}

/// Born-rule outcomes of measuring one qubit in `basis`.
pub fn measure_projective(state: &StateVector, basis: &MeasurementBasis) -> Result<Vec<ProjectiveOutcome>> {
    basis.check()?;
    let q = basis.qubit;
    if q >= state.qubits() {
        return Err(Error::ModeOutOfRange { index: q, count: state.qubits() });
    }
    let mut out = Vec::new();
    for (index, (label, v)) in basis.vectors.iter().enumerate() {
        // Amplitude of the rest of the register given the qubit is |v⟩.
        let mut amps = vec![c(0.0); state.dim()];
        for (i, a) in state.amps.iter().enumerate() {
            if i >> q & 1 == 1 {
                continue;
            }
            let partner = i | (1 << q);
            let rest = v[0].conj() * a + v[1].conj() * state.amps[partner];
            amps[i] += rest * v[0];
            amps[partner] += rest * v[1];
        }
        let projected = StateVector { labels: state.labels.clone(), amps };
        let probability = projected.norm().powi(2);
        let collapsed = (probability > NORM_TOLERANCE).then(|| projected.renormalized().canonical());
        out.push(ProjectiveOutcome { label: label.clone(), index, probability, collapsed });
    }
    Ok(out)
}

/// Embeds a first-quantized state (photon qubit 0, then ancillas) into the
/// occupation-number description (mode `L`, mode `R`, then ancillas).
pub fn translate_first_to_second(state: &StateVector) -> Result<StateVector> {
    let n = state.qubits();
    if n + 1 > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(n + 1));
    }
    let mut amps = vec![c(0.0); 1 << (n + 1)];
    for (i, a) in state.amps.iter().enumerate() {
        let photon = i & 1;
        let rest = i >> 1;
        let occupation = if photon == 0 { 0b01 } else { 0b10 };
        amps[occupation | (rest << 2)] = *a;
    }
    let mut labels = vec!["L".to_string(), "R".to_string()];
    labels.extend(state.labels.iter().skip(1).cloned());
    StateVector::new(labels, amps)
}

/// `|L⟩ ↦ |1⟩_L|0⟩_R`, `|R⟩ ↦ |0⟩_L|1⟩_R`.
pub fn translate_1q_to_2q(state: &StateVector) -> Result<StateVector> {
    if state.qubits() != 1 {
        return Err(Error::ShapeMismatch { expected: "one qubit".into(), found: format!("{} qubits", state.qubits()) });
    }
    translate_first_to_second(state)
}

/// Nearest dyadic rational within [`DYADIC_TOLERANCE`].
pub fn exactify(p: f64) -> Result<Prob> {
    if !(-DYADIC_TOLERANCE..=1.0 + DYADIC_TOLERANCE).contains(&p) {
        return Err(Error::NotDyadic(p.to_string()));
    }
    // Denominators beyond 2^16 would let any float pass the tolerance test.
    for k in 0..=16u32 {
        let den = 1u64 << k;
        let num = (p * den as f64).round();
        if (num / den as f64 - p).abs() <= DYADIC_TOLERANCE {
            return Ok(Prob::new(num.max(0.0) as u64, den));
        }
    }
    Err(Error::NotDyadic(p.to_string()))
}
