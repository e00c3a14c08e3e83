//! Stochastic Pauli-trajectory noise.
//!
//! Each trajectory evolves `|0…0⟩` through the circuit and, after every
//! physical gate, draws an error: with probability `p₁` a uniformly random
//! non-identity Pauli on a single-qubit gate's target, with probability `p₂`
//! one of the 15 non-identity two-qubit Paulis on a two-qubit gate's pair.
//! An optional coherent `exp(−iε Z⊗Z)` follows every two-qubit gate.
//! Readout flips are applied to the sampled bits.
//!
//! Shots are split as evenly as possible over at most `max_trajectories`
//! trajectories; trajectory `i` draws from the stream
//! `derive_seed_indexed(seed, i)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{mul2, Circuit, Gate, GateKind, Mat2};
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::rng::{derive_seed_indexed, rng_from_seed, SimRng};
use crate::state::{outcomes_to_counts, run_circuit, Counts, Statevector};

/// Asymmetric readout flip probabilities of one qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// Probability of reading 1 when the qubit is in 0.
    pub p1_given_0: f64,
    /// Probability of reading 0 when the qubit is in 1.
    pub p0_given_1: f64,
}

impl ReadoutError {
    pub fn symmetric(p: f64) -> Self {
        Self {
            p1_given_0: p,
            p0_given_1: p,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p1_given_0 == 0.0 && self.p0_given_1 == 0.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub two_qubit_depolarizing: f64,
    #[serde(default)]
    pub single_qubit_depolarizing: f64,
    /// Per-qubit readout errors. A single entry applies to every qubit;
    /// otherwise entry `q` belongs to qubit `q` and missing qubits are ideal.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub readout: Vec<ReadoutError>,
    /// Coherent `Z⊗Z` over-rotation angle after each two-qubit gate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherent_overrotation: Option<f64>,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if !(0.0..1.0).contains(&p) {
                Err(Error::InvalidArgument(format!("{name} = {p} is not in [0, 1)")))
            } else {
                Ok(())
            }
        };
        prob("two_qubit_depolarizing", self.two_qubit_depolarizing)?;
        prob("single_qubit_depolarizing", self.single_qubit_depolarizing)?;
        for r in &self.readout {
            prob("readout p(1|0)", r.p1_given_0)?;
            prob("readout p(0|1)", r.p0_given_1)?;
        }
        if let Some(eps) = self.coherent_overrotation {
            if !(eps.abs() < std::f64::consts::FRAC_PI_4) {
                return Err(Error::InvalidArgument(format!(
                    "coherent over-rotation {eps} must satisfy |ε| < π/4"
                )));
            }
        }
        Ok(())
    }

    pub fn has_gate_noise(&self) -> bool {
        self.two_qubit_depolarizing > 0.0
            || self.single_qubit_depolarizing > 0.0
            || self.coherent_overrotation.is_some_and(|e| e != 0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_gate_noise() && self.readout.iter().all(ReadoutError::is_zero)
    }

    pub fn readout_for(&self, qubit: usize) -> ReadoutError {
        match self.readout.len() {
            0 => ReadoutError::default(),
            1 => self.readout[0],
            _ => self.readout.get(qubit).copied().unwrap_or_default(),
        }
    }

    /// Short human-readable tag used in result tables.
    pub fn label(&self) -> String {
        let mut parts = vec![
            format!("p2={}", self.two_qubit_depolarizing),
            format!("p1={}", self.single_qubit_depolarizing),
        ];
        if let Some(eps) = self.coherent_overrotation {
            parts.push(format!("eps={eps}"));
        }
        if !self.readout.is_empty() {
            let r = self.readout[0];
            parts.push(format!("ro={}/{}", r.p1_given_0, r.p0_given_1));
        }
        parts.join(";")
    }
}

/// A `Z` error on `qubit` inserted before gate `position`
/// (`position == circuit.len()` means after the last gate).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ZInjection {
    pub position: usize,
    pub qubit: usize,
}

const SINGLE_ERRORS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

fn apply_letter(state: &mut Statevector, q: usize, p: Pauli) -> Result<()> {
    if p != Pauli::I {
        state.apply_single(q, &p.matrix())?;
    }
    Ok(())
}

/// A gate lowered once for repeated trajectory runs.
enum Op {
    Single(usize, Mat2),
    Cx(usize, usize),
    Cz(usize, usize),
    Other(Gate),
    Measure,
}

/// A circuit prepared for many trajectories.
pub struct CompiledCircuit {
    n_qubits: usize,
    ops: Vec<Op>,
    global_phase: f64,
}

impl CompiledCircuit {
    /// With `fuse_single`, runs of single-qubit gates on one qubit collapse
    /// into one matrix. Gate positions then no longer line up with
    /// [`ZInjection::position`], and single-qubit noise sees one gate per
    /// run.
    pub fn new(circuit: &Circuit, fuse_single: bool) -> Self {
        let n = circuit.n_qubits();
        let mut ops = Vec::with_capacity(circuit.len());
        let mut pending: Vec<Option<Mat2>> = vec![None; n];
        let flush = |ops: &mut Vec<Op>, pending: &mut Vec<Option<Mat2>>, qs: &[usize]| {
            for &q in qs {
                if let Some(m) = pending[q].take() {
                    ops.push(Op::Single(q, m));
                }
            }
        };
        let all: Vec<usize> = (0..n).collect();
        for g in circuit.gates() {
            match (&g.kind, g.single_qubit_matrix()) {
                (GateKind::Measure { .. }, _) => {
                    flush(&mut ops, &mut pending, &all);
                    ops.push(Op::Measure);
                }
                (_, Some((t, m))) if fuse_single => {
                    pending[t] = Some(match pending[t] {
                        Some(prev) => mul2(&m, &prev),
                        None => m,
                    });
                }
                (_, Some((t, m))) => ops.push(Op::Single(t, m)),
                (GateKind::Cx { control, target }, _) => {
                    flush(&mut ops, &mut pending, &[*control, *target]);
                    ops.push(Op::Cx(*control, *target));
                }
                (GateKind::Cz { a, b }, _) => {
                    flush(&mut ops, &mut pending, &[*a, *b]);
                    ops.push(Op::Cz(*a, *b));
                }
                _ => {
                    flush(&mut ops, &mut pending, &g.qubits());
                    ops.push(Op::Other(g.clone()));
                }
            }
        }
        flush(&mut ops, &mut pending, &all);
        Self {
            n_qubits: n,
            ops,
            global_phase: circuit.global_phase(),
        }
    }
}

fn two_qubit_noise(
    state: &mut Statevector,
    model: &NoiseModel,
    rng: &mut SimRng,
    a: usize,
    b: usize,
) -> Result<()> {
    if let Some(eps) = model.coherent_overrotation.filter(|e| *e != 0.0) {
        state.apply_zz_rotation(a, b, eps)?;
    }
    if model.two_qubit_depolarizing > 0.0 && rng.gen::<f64>() < model.two_qubit_depolarizing {
        let k = rng.gen_range(1..16);
        apply_letter(state, a, Pauli::ALL[k & 3])?;
        apply_letter(state, b, Pauli::ALL[k >> 2])?;
    }
    Ok(())
}

/// One noisy trajectory of the unitary part of a compiled circuit.
pub fn simulate_compiled(
    circuit: &CompiledCircuit,
    model: &NoiseModel,
    rng: &mut SimRng,
    injections: &[ZInjection],
) -> Result<Statevector> {
    let mut state = Statevector::zero(circuit.n_qubits)?;
    let mut inj = injections.iter().peekable();
    for (pos, op) in circuit.ops.iter().enumerate() {
        while let Some(i) = inj.next_if(|i| i.position <= pos) {
            apply_letter(&mut state, i.qubit, Pauli::Z)?;
        }
        match op {
            Op::Measure => {}
            Op::Single(q, m) => {
                state.apply_single(*q, m)?;
                if model.single_qubit_depolarizing > 0.0
                    && rng.gen::<f64>() < model.single_qubit_depolarizing
                {
                    apply_letter(&mut state, *q, SINGLE_ERRORS[rng.gen_range(0..3)])?;
                }
            }
            Op::Cx(c, t) => {
                state.apply_cx(*c, *t)?;
                two_qubit_noise(&mut state, model, rng, *c, *t)?;
            }
            Op::Cz(a, b) => {
                state.apply_cz(*a, *b)?;
                two_qubit_noise(&mut state, model, rng, *a, *b)?;
            }
            Op::Other(g) => state.apply_gate(g)?,
        }
    }
    for i in inj {
        apply_letter(&mut state, i.qubit, Pauli::Z)?;
    }
    state.apply_global_phase(circuit.global_phase);
    Ok(state)
}

/// One noisy trajectory of the unitary part of `circuit`.
pub fn simulate_trajectory(
    circuit: &Circuit,
    model: &NoiseModel,
    rng: &mut SimRng,
    injections: &[ZInjection],
) -> Result<Statevector> {
    simulate_compiled(&CompiledCircuit::new(circuit, false), model, rng, injections)
}

/// Samples `shots` outcomes of `targets` and applies readout flips.
pub fn sample_with_readout(
    state: &Statevector,
    targets: &[usize],
    shots: u64,
    model: &NoiseModel,
    rng: &mut SimRng,
) -> Result<Vec<usize>> {
    let mut outcomes = state.sample_outcomes(targets, shots, rng)?;
    let flips: Vec<ReadoutError> = targets.iter().map(|&q| model.readout_for(q)).collect();
    if flips.iter().all(ReadoutError::is_zero) {
        return Ok(outcomes);
    }
    for o in outcomes.iter_mut() {
        for (j, f) in flips.iter().enumerate() {
            let bit = (*o >> j) & 1;
            let p = if bit == 0 { f.p1_given_0 } else { f.p0_given_1 };
            if rng.gen::<f64>() < p {
                *o ^= 1 << j;
            }
        }
    }
    Ok(outcomes)
}

/// Shot counts of each of `min(shots, max_trajectories)` trajectories.
pub fn trajectory_shots(shots: u64, max_trajectories: u64) -> Vec<u64> {
    let t = shots.min(max_trajectories.max(1)).max(1);
    (0..t)
        .map(|i| shots / t + u64::from(i < shots % t))
        .collect()
}

/// Noisy sampled execution.
#[derive(Clone, Debug)]
pub struct TrajectorySimulator {
    pub model: NoiseModel,
    pub max_trajectories: u64,
}

impl TrajectorySimulator {
    pub fn new(model: NoiseModel, max_trajectories: u64) -> Result<Self> {
        model.validate()?;
        if max_trajectories == 0 {
            return Err(Error::InvalidArgument("max_trajectories must be ≥ 1".into()));
        }
        Ok(Self {
            model,
            max_trajectories,
        })
    }

    /// Outcome indices of `shots` noisy executions, in trajectory order.
    /// `injections` maps a trajectory index to its extra `Z` errors.
    pub fn run_outcomes(
        &self,
        circuit: &Circuit,
        shots: u64,
        seed: u64,
        injections: Option<&dyn Fn(usize) -> Vec<ZInjection>>,
    ) -> Result<Vec<usize>> {
        let targets = circuit.measured_qubits();
        if targets.is_empty() {
            return Err(Error::InvalidCircuit("circuit has no measurements".into()));
        }
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be ≥ 1".into()));
        }
        if self.model.has_gate_noise() {
            if let Some(g) = circuit.first_composite() {
                return Err(Error::NotDecomposed(format!("{:?}", g.kind)));
            }
        }
        let fuse = injections.is_none() && self.model.single_qubit_depolarizing == 0.0;
        let compiled = CompiledCircuit::new(circuit, fuse);
        let mut out = Vec::with_capacity(shots as usize);
        for (i, n) in trajectory_shots(shots, self.max_trajectories).into_iter().enumerate() {
            let mut rng = rng_from_seed(derive_seed_indexed(seed, i as u64));
            let extra = injections.map(|f| f(i)).unwrap_or_default();
            let state = simulate_compiled(&compiled, &self.model, &mut rng, &extra)?;
            out.extend(sample_with_readout(&state, &targets, n, &self.model, &mut rng)?);
        }
        Ok(out)
    }

    pub fn run(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<Counts> {
        if self.model.is_noiseless() {
            return run_circuit(circuit, shots, seed);
        }
        let outcomes = self.run_outcomes(circuit, shots, seed, None)?;
        Ok(outcomes_to_counts(&outcomes, circuit.classical_bits()))
    }
}

/// Noisy sampled execution of a decomposed circuit (see module docs).
pub fn apply_noise(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
    max_trajectories: u64,
) -> Result<Counts> {
    TrajectorySimulator::new(model.clone(), max_trajectories)?.run(circuit, shots, seed)
}

/// True iff `kind` is a two-qubit Clifford entangler that twirling supports.
pub(crate) fn is_twirlable(kind: &GateKind) -> bool {
    matches!(kind, GateKind::Cx { .. } | GateKind::Cz { .. })
}
