//! Dense statevector simulation.
//!
//! Amplitude index `b = Σ_q b_q 2^q`: qubit 0 is the least-significant bit.
//! Sampled bitstrings list the measured qubits left to right in
//! classical-bit order, so `"10"` from `measure [3, 5]` means qubit 3 read 1
//! and qubit 5 read 0.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateKind, Mat2};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::rng::{rng_from_seed, SimRng};

/// Largest register the engine accepts.
pub const MAX_QUBITS: usize = 24;

/// Registers at least this wide split single-qubit kernels across threads.
const PARALLEL_QUBITS: usize = 16;

/// Outcome histogram keyed by bitstring.
pub type Counts = BTreeMap<String, u64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes whose length is a power of two and whose norm is 1
    /// within `1e-10`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_width(n_qubits)?;
        let s = Self { n_qubits, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm {norm} ≠ 1")));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.same_width(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance `‖self − other‖₂`.
    pub fn distance(&self, other: &Statevector) -> Result<f64> {
        self.same_width(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn same_width(&self, other: &Statevector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies a 2×2 matrix to `target`. The caller vouches for unitarity.
    pub fn apply_single(&mut self, target: usize, m: &Mat2) -> Result<()> {
        self.check_qubit(target)?;
        let stride = 1usize << target;
        let m = *m;
        let kernel = move |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        };
        if self.n_qubits >= PARALLEL_QUBITS {
            self.amps.par_chunks_mut(2 * stride).for_each(kernel);
        } else {
            let amps = &mut self.amps[..];
            let mut base = 0;
            while base < amps.len() {
                for i in base..base + stride {
                    let (x, y) = (amps[i], amps[i + stride]);
                    amps[i] = m[0][0] * x + m[0][1] * y;
                    amps[i + stride] = m[1][0] * x + m[1][1] * y;
                }
                base += 2 * stride;
            }
        }
        Ok(())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidGate("CX control equals target".into()));
        }
        let (c, t) = (1usize << control, 1usize << target);
        for b in 0..self.amps.len() {
            if b & c != 0 && b & t == 0 {
                self.amps.swap(b, b | t);
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::InvalidGate("CZ on a single qubit".into()));
        }
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_cswap(&mut self, control: usize, a: usize, b: usize) -> Result<()> {
        for q in [control, a, b] {
            self.check_qubit(q)?;
        }
        if control == a || control == b || a == b {
            return Err(Error::InvalidGate("controlled-SWAP qubits must differ".into()));
        }
        let (c, ma, mb) = (1usize << control, 1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
        Ok(())
    }

    /// Applies the Pauli operator itself (including its phase).
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_pauli(p)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, amp) in self.amps.iter().enumerate() {
            let (to, c) = p.apply_to_basis(b);
            out[to] = c * amp;
        }
        self.amps = out;
        Ok(())
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        Ok(())
    }

    /// `|ψ⟩ ← exp(−iθP)|ψ⟩ = cos θ|ψ⟩ − i sin θ P|ψ⟩` for Hermitian `P`,
    /// in one in-place pass over amplitude pairs `(b, b ⊕ x)`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        self.check_pauli(p)?;
        if !p.is_hermitian() {
            return Err(Error::NonHermitian(p.to_string()));
        }
        let (s, c) = theta.sin_cos();
        let cos = Complex64::new(c, 0.0);
        let misin = Complex64::new(0.0, -s);
        let x = p.x_bits() as usize;
        if x == 0 {
            for (b, amp) in self.amps.iter_mut().enumerate() {
                let (_, coef) = p.apply_to_basis(b);
                *amp *= cos + misin * coef;
            }
            return Ok(());
        }
        let pivot = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & pivot != 0 {
                continue;
            }
            let bp = b ^ x;
            // P|b⟩ = cb |b'⟩ and P|b'⟩ = cbp |b⟩
            let (_, cb) = p.apply_to_basis(b);
            let (_, cbp) = p.apply_to_basis(bp);
            let (u, v) = (self.amps[b], self.amps[bp]);
            self.amps[b] = cos * u + misin * cbp * v;
            self.amps[bp] = cos * v + misin * cb * u;
        }
        Ok(())
    }

    /// `exp(−iθ Z_a Z_b)`.
    pub fn apply_zz_rotation(&mut self, a: usize, b: usize, theta: f64) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::InvalidGate("ZZ rotation needs two distinct qubits".into()));
        }
        let same = Complex64::from_polar(1.0, -theta);
        let differ = same.conj();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if ((i >> a) ^ (i >> b)) & 1 == 0 { same } else { differ };
        }
        Ok(())
    }

    pub fn apply_global_phase(&mut self, phi: f64) {
        if phi != 0.0 {
            let f = Complex64::from_polar(1.0, phi);
            self.amps.iter_mut().for_each(|a| *a *= f);
        }
    }

    /// Applies one gate; measurements are no-ops here and are handled by
    /// the samplers.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Some((t, m)) = gate.single_qubit_matrix() {
            return self.apply_single(t, &m);
        }
        match &gate.kind {
            GateKind::Cx { control, target } => self.apply_cx(*control, *target),
            GateKind::Cz { a, b } => self.apply_cz(*a, *b),
            GateKind::PauliRotation { pauli, theta } => self.apply_pauli_rotation(pauli, *theta),
            GateKind::ControlledSwap { control, a, b } => self.apply_cswap(*control, *a, *b),
            GateKind::Measure { .. } => Ok(()),
            _ => unreachable!("single-qubit gates handled above"),
        }
    }

    /// Applies every unitary gate of `circuit` and its global phase.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: circuit.n_qubits(),
            });
        }
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        self.apply_global_phase(circuit.global_phase());
        Ok(())
    }

    /// Marginal distribution of `targets`; outcome bit `j` is `targets[j]`.
    pub fn probabilities(&self, targets: &[usize]) -> Result<Vec<f64>> {
        if targets.is_empty() {
            return Err(Error::InvalidArgument("empty target list".into()));
        }
        for (i, &t) in targets.iter().enumerate() {
            self.check_qubit(t)?;
            if targets[..i].contains(&t) {
                return Err(Error::InvalidArgument(format!("repeated target {t}")));
            }
        }
        let mut probs = vec![0.0; 1 << targets.len()];
        for (b, amp) in self.amps.iter().enumerate() {
            let o = targets
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &t)| acc | (((b >> t) & 1) << j));
            probs[o] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Draws `shots` outcome indices (see [`Statevector::probabilities`]).
    pub fn sample_outcomes(
        &self,
        targets: &[usize],
        shots: u64,
        rng: &mut SimRng,
    ) -> Result<Vec<usize>> {
        let probs = self.probabilities(targets)?;
        Ok(sample_from_distribution(&probs, shots, rng))
    }

    pub fn sample_counts(&self, targets: &[usize], shots: u64, seed: u64) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be ≥ 1".into()));
        }
        let mut rng = rng_from_seed(seed);
        let outcomes = self.sample_outcomes(targets, shots, &mut rng)?;
        Ok(outcomes_to_counts(&outcomes, targets.len()))
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("a register needs at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(())
}

/// Inverse-CDF sampling of `shots` outcomes.
pub fn sample_from_distribution(probs: &[f64], shots: u64, rng: &mut SimRng) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect()
}

pub fn outcome_to_bitstring(outcome: usize, n_bits: usize) -> String {
    (0..n_bits)
        .map(|j| if (outcome >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn bitstring_to_outcome(bits: &str) -> Result<usize> {
    bits.chars().enumerate().try_fold(0usize, |acc, (j, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << j)),
        _ => Err(Error::InvalidArgument(format!("bad bitstring {bits:?}"))),
    })
}

pub fn outcomes_to_counts(outcomes: &[usize], n_bits: usize) -> Counts {
    let mut tally = BTreeMap::new();
    for &o in outcomes {
        *tally.entry(o).or_insert(0u64) += 1;
    }
    tally
        .into_iter()
        .map(|(o, n)| (outcome_to_bitstring(o, n_bits), n))
        .collect()
}

/// Empirical distribution over `2^n_bits` outcomes.
pub fn counts_to_probabilities(counts: &Counts, n_bits: usize) -> Result<Vec<f64>> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("empty counts".into()));
    }
    let mut probs = vec![0.0; 1 << n_bits];
    for (bits, &n) in counts {
        if bits.len() != n_bits {
            return Err(Error::LengthMismatch(bits.len(), n_bits));
        }
        probs[bitstring_to_outcome(bits)?] += n as f64 / total as f64;
    }
    Ok(probs)
}

/// Final state of the unitary part of `circuit` applied to `|0…0⟩`.
pub fn final_state(circuit: &Circuit) -> Result<Statevector> {
    let mut s = Statevector::zero(circuit.n_qubits())?;
    s.apply_circuit(circuit)?;
    Ok(s)
}

/// Noiseless execution: evolve `|0…0⟩` and sample the terminal measurements.
pub fn run_circuit(circuit: &Circuit, shots: u64, seed: u64) -> Result<Counts> {
    let targets = circuit.measured_qubits();
    if targets.is_empty() {
        return Err(Error::InvalidCircuit("circuit has no measurements".into()));
    }
    final_state(circuit)?.sample_counts(&targets, shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{purity, reduced_density_matrix};
    use crate::pauli::Pauli;
    use crate::CMatrix;
    use proptest::prelude::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn embed_single(n: usize, q: usize, m: &Mat2) -> CMatrix {
        let m2 = CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
        let mut out = CMatrix::identity(1, 1);
        for k in 0..n {
            let f = if k == q { m2.clone() } else { CMatrix::identity(2, 2) };
            out = f.kronecker(&out);
        }
        out
    }

    fn projector(n: usize, q: usize, bit: usize) -> CMatrix {
        let m = if bit == 0 {
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]
        } else {
            [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
        };
        embed_single(n, q, &m)
    }

    fn pauli_dense(p: &PauliString) -> CMatrix {
        let mut out = CMatrix::identity(1, 1);
        for q in 0..p.n_qubits() {
            let l = p.letter(q).matrix();
            out = CMatrix::from_row_slice(2, 2, &[l[0][0], l[0][1], l[1][0], l[1][1]])
                .kronecker(&out);
        }
        out * crate::pauli::i_pow(p.phase())
    }

    /// Dense gate matrices built from Kronecker products and projectors.
    fn dense_gate(n: usize, g: &Gate) -> CMatrix {
        let dim = 1 << n;
        let id = CMatrix::identity(dim, dim);
        match &g.kind {
            GateKind::Cx { control, target } => {
                let x = embed_single(n, *target, &Pauli::X.matrix());
                projector(n, *control, 0) + projector(n, *control, 1) * x
            }
            GateKind::Cz { a, b } => {
                let z = embed_single(n, *b, &Pauli::Z.matrix());
                projector(n, *a, 0) + projector(n, *a, 1) * z
            }
            GateKind::PauliRotation { pauli, theta } => {
                &id * c(theta.cos(), 0.0) - pauli_dense(pauli) * c(0.0, theta.sin())
            }
            GateKind::ControlledSwap { control, a, b } => {
                let mut swap = CMatrix::zeros(dim, dim);
                for p in Pauli::ALL {
                    let pa = embed_single(n, *a, &p.matrix());
                    let pb = embed_single(n, *b, &p.matrix());
                    swap += pa * pb * c(0.5, 0.0);
                }
                projector(n, *control, 0) + projector(n, *control, 1) * swap
            }
            _ => {
                let (t, m) = g.single_qubit_matrix().unwrap();
                embed_single(n, t, &m)
            }
        }
    }

    fn arb_state(n: usize) -> impl Strategy<Value = Statevector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_map(|v| {
            let mut amps: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt().max(1e-9);
            amps.iter_mut().for_each(|a| *a /= norm);
            if norm <= 1e-9 {
                amps[0] = c(1.0, 0.0);
            }
            Statevector::from_amplitudes(amps).unwrap()
        })
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        let mask = (1u64 << n) - 1;
        prop_oneof![
            (0..n).prop_map(|t| GateKind::H { target: t }.into()),
            (0..n, -3.0f64..3.0).prop_map(|(t, th)| GateKind::Rz { target: t, theta: th }.into()),
            (0..n, -3.0f64..3.0).prop_map(|(t, l)| GateKind::Phase { target: t, lambda: l }.into()),
            (0..n, 1..n).prop_map(move |(a, d)| GateKind::Cx { control: a, target: (a + d) % n }.into()),
            (0..n, 1..n).prop_map(move |(a, d)| GateKind::Cz { a, b: (a + d) % n }.into()),
            (any::<u64>(), any::<u64>(), prop::bool::ANY, -3.0f64..3.0).prop_map(move |(x, z, neg, th)| {
                let p = PauliString::from_bits(n, x & mask, z & mask, if neg { 2 } else { 0 }).unwrap();
                GateKind::PauliRotation { pauli: p, theta: th }.into()
            }),
            (0..n, 1..n).prop_map(move |(cq, da)| {
                let a = (cq + da) % n;
                let b = (0..n).find(|q| *q != cq && *q != a);
                match b {
                    Some(b) => GateKind::ControlledSwap { control: cq, a, b }.into(),
                    None => GateKind::H { target: cq }.into(),
                }
            }),
        ]
    }

    fn to_vec(s: &Statevector) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(s.amplitudes())
    }

    proptest! {
        #[test]
        fn kernels_match_dense_matrices(
            (n, state, gates) in (2usize..=4).prop_flat_map(|n| (Just(n), arb_state(n), prop::collection::vec(arb_gate(n), 1..6)))
        ) {
            let mut s = state.clone();
            let mut v = to_vec(&state);
            for g in &gates {
                s.apply_gate(g).unwrap();
                v = dense_gate(n, g) * v;
                prop_assert!((s.norm() - 1.0).abs() < 1e-10);
            }
            for (a, b) in s.amplitudes().iter().zip(v.iter()) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }

        #[test]
        fn rotation_inverse_restores_state(state in arb_state(3), x in 0u64..8, z in 0u64..8, th in -4.0f64..4.0) {
            let p = PauliString::from_bits(3, x, z, 0).unwrap();
            let mut s = state.clone();
            s.apply_pauli_rotation(&p, th).unwrap();
            s.apply_pauli_rotation(&p, -th).unwrap();
            for (a, b) in s.amplitudes().iter().zip(state.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply_gate(&GateKind::H { target: 0 }.into()).unwrap();
        assert!((s.amplitudes()[0] - c(S, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(S, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cz_on_plus_plus_is_entangled() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply_gate(&GateKind::H { target: 0 }.into()).unwrap();
        s.apply_gate(&GateKind::H { target: 1 }.into()).unwrap();
        s.apply_gate(&GateKind::Cz { a: 0, b: 1 }.into()).unwrap();
        let rho = reduced_density_matrix(&s, &[0]).unwrap();
        assert!((purity(&rho) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_unitary_is_bit_exact() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply_gate(&GateKind::H { target: 0 }.into()).unwrap();
        s.apply_gate(&GateKind::Rz { target: 1, theta: 0.3 }.into()).unwrap();
        let before = s.clone();
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        s.apply_gate(&GateKind::Unitary { target: 1, matrix: id }.into()).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn rotation_examples() {
        let x: PauliString = "X".parse().unwrap();
        let mut s = Statevector::zero(1).unwrap();
        s.apply_pauli_rotation(&x, 0.0).unwrap();
        assert_eq!(s, Statevector::zero(1).unwrap());
        s.apply_pauli_rotation(&x, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-15);

        let zz: PauliString = "ZZ".parse().unwrap();
        let th = 0.7;
        let mut s = Statevector::zero(2).unwrap();
        s.apply_pauli_rotation(&zz, th).unwrap();
        assert!((s.amplitudes()[0] - Complex64::from_polar(1.0, -th)).norm() < 1e-15);
    }

    #[test]
    fn out_of_range_and_mismatch_errors() {
        let mut s = Statevector::zero(2).unwrap();
        assert!(s.apply_gate(&GateKind::H { target: 2 }.into()).is_err());
        assert!(s.apply_pauli_rotation(&"XXX".parse().unwrap(), 0.1).is_err());
        assert!(s.apply_pauli_rotation(&"iXX".parse().unwrap(), 0.1).is_err());
        assert!(Statevector::zero(MAX_QUBITS + 1).is_err());
        assert!(s.sample_counts(&[], 10, 0).is_err());
        assert!(s.sample_counts(&[0], 0, 0).is_err());
    }

    #[test]
    fn sampling_examples() {
        let s = Statevector::zero(1).unwrap();
        let counts = s.sample_counts(&[0], 100, 3).unwrap();
        assert_eq!(counts, Counts::from([("0".to_string(), 100)]));

        let mut plus = Statevector::zero(1).unwrap();
        plus.apply_gate(&GateKind::H { target: 0 }.into()).unwrap();
        let counts = plus.sample_counts(&[0], 1_000_000, 9).unwrap();
        let zeros = counts["0"] as f64;
        assert!((zeros - 500_000.0).abs() < 3.0 * 500.0, "{zeros}");

        let mut bell = Circuit::new(2).unwrap();
        bell.h(0).unwrap().cx(0, 1).unwrap().measure_all().unwrap();
        let counts = run_circuit(&bell, 10_000, 4).unwrap();
        assert!(counts.keys().all(|k| k == "00" || k == "11"));
        assert_eq!(counts, run_circuit(&bell, 10_000, 4).unwrap());
    }

    #[test]
    fn marginal_bit_order_follows_targets() {
        let mut c = Circuit::new(3).unwrap();
        c.x(2).unwrap().measure(&[2, 0]).unwrap();
        let counts = run_circuit(&c, 10, 0).unwrap();
        assert_eq!(counts, Counts::from([("10".to_string(), 10)]));
    }

    #[test]
    fn empty_circuit_measures_zeros() {
        let mut c = Circuit::new(3).unwrap();
        c.measure_all().unwrap();
        assert_eq!(
            run_circuit(&c, 64, 1).unwrap(),
            Counts::from([("000".to_string(), 64)])
        );
    }

    #[test]
    fn bitstring_helpers() {
        assert_eq!(outcome_to_bitstring(0b01, 3), "100");
        assert_eq!(bitstring_to_outcome("100").unwrap(), 1);
        let counts = Counts::from([("10".to_string(), 3), ("01".to_string(), 1)]);
        assert_eq!(counts_to_probabilities(&counts, 2).unwrap(), vec![0.0, 0.75, 0.25, 0.0]);
    }

    #[test]
    fn large_register_parallel_kernel() {
        let mut s = Statevector::zero(PARALLEL_QUBITS + 1).unwrap();
        for q in 0..s.n_qubits() {
            s.apply_gate(&GateKind::H { target: q }.into()).unwrap();
        }
        let want = (1.0 / s.dim() as f64).sqrt();
        assert!(s.amplitudes().iter().all(|a| (a.re - want).abs() < 1e-12));
    }
}
