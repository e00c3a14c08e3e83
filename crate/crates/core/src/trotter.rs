//! First-order Trotter circuits and gate accounting.
//!
//! `U(t) ≈ (∏_n exp(−i a_n P_n δt))^r` with `δt = t/r`. In decomposed form
//! each rotation `exp(−iθP)` on support `q_0 < … < q_{w−1}` becomes: basis
//! changes (H for X, S†·H for Y), a CX ladder `q_0→q_1→…→q_{w−1}`,
//! `Rz(2θ)` on `q_{w−1}`, the reversed ladder and the inverse basis changes,
//! i.e. `2(w−1)` CX gates per term.
//!
//! Depth counts every unitary gate (single- and multi-qubit) as one layer on
//! the qubits it touches; measurements are not counted.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::exact::ExactPropagator;
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::state::Statevector;

#[derive(Clone, Debug, PartialEq)]
pub struct TrotterPlan {
    hamiltonian: PauliSum,
    t: f64,
    steps: usize,
    term_order: Vec<usize>,
}

impl TrotterPlan {
    /// Plan with the default (input) term order.
    pub fn new(hamiltonian: PauliSum, t: f64, steps: usize) -> Result<Self> {
        let order = (0..hamiltonian.len()).collect();
        Self::with_order(hamiltonian, t, steps, order)
    }

    pub fn with_order(
        hamiltonian: PauliSum,
        t: f64,
        steps: usize,
        term_order: Vec<usize>,
    ) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("Trotter step count must be ≥ 1".into()));
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("evolution time {t} is not finite")));
        }
        let mut seen = vec![false; hamiltonian.len()];
        if term_order.len() != seen.len() {
            return Err(Error::InvalidArgument(format!(
                "term order has {} entries for {} terms",
                term_order.len(),
                seen.len()
            )));
        }
        for &i in &term_order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "term order is not a permutation (entry {i})"
                )));
            }
        }
        Ok(Self {
            hamiltonian,
            t,
            steps,
            term_order,
        })
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn term_order(&self) -> &[usize] {
        &self.term_order
    }

    pub fn dt(&self) -> f64 {
        self.t / self.steps as f64
    }

    fn with_steps(&self, steps: usize, t: f64) -> Self {
        Self {
            steps,
            t,
            ..self.clone()
        }
    }
}

/// Builds the Trotter circuit (no measurements). `decomposed` selects basis
/// gates instead of native Pauli rotations.
pub fn build_trotter_circuit(plan: &TrotterPlan, decomposed: bool) -> Result<Circuit> {
    let h = &plan.hamiltonian;
    let mut circ = Circuit::new(h.n_qubits)?;
    let dt = plan.dt();
    for _ in 0..plan.steps {
        for &i in &plan.term_order {
            let term = &h.terms[i];
            let theta = term.coefficient * dt;
            if decomposed {
                append_rotation_decomposed(&mut circ, &term.pauli, theta)?;
            } else {
                circ.pauli_rotation(term.pauli, theta)?;
            }
        }
    }
    Ok(circ)
}

/// Appends `exp(−iθP)` as basis changes, a CX ladder and one Rz.
pub fn append_rotation_decomposed(circ: &mut Circuit, pauli: &PauliString, theta: f64) -> Result<()> {
    if !pauli.is_hermitian() {
        return Err(Error::NonHermitian(pauli.to_string()));
    }
    let theta = if pauli.phase() == 2 { -theta } else { theta };
    let support = pauli.support();
    let Some(&last) = support.last() else {
        circ.add_global_phase(-theta);
        return Ok(());
    };
    for &q in &support {
        match pauli.letter(q) {
            Pauli::X => {
                circ.h(q)?;
            }
            Pauli::Y => {
                circ.push(Gate::labeled(
                    GateKind::Phase { target: q, lambda: -2.0 * FRAC_PI_4 },
                    "sdg",
                ))?;
                circ.h(q)?;
            }
            _ => {}
        }
    }
    for w in support.windows(2) {
        circ.cx(w[0], w[1])?;
    }
    circ.rz(last, 2.0 * theta)?;
    for w in support.windows(2).rev() {
        circ.cx(w[0], w[1])?;
    }
    for &q in &support {
        match pauli.letter(q) {
            Pauli::X => {
                circ.h(q)?;
            }
            Pauli::Y => {
                circ.h(q)?;
                circ.push(Gate::labeled(
                    GateKind::Phase { target: q, lambda: 2.0 * FRAC_PI_4 },
                    "s",
                ))?;
            }
            _ => {}
        }
    }
    Ok(())
}

fn phase_gate(circ: &mut Circuit, target: usize, quarter_turns: f64, label: &str) -> Result<()> {
    circ.push(Gate::labeled(
        GateKind::Phase { target, lambda: quarter_turns * FRAC_PI_4 },
        label,
    ))?;
    Ok(())
}

/// Toffoli with controls `c1`, `c2` on `target` in the 6-CX Clifford+T form.
fn append_toffoli(circ: &mut Circuit, c1: usize, c2: usize, target: usize) -> Result<()> {
    circ.h(target)?;
    circ.cx(c2, target)?;
    phase_gate(circ, target, -1.0, "tdg")?;
    circ.cx(c1, target)?;
    phase_gate(circ, target, 1.0, "t")?;
    circ.cx(c2, target)?;
    phase_gate(circ, target, -1.0, "tdg")?;
    circ.cx(c1, target)?;
    phase_gate(circ, c2, 1.0, "t")?;
    phase_gate(circ, target, 1.0, "t")?;
    circ.h(target)?;
    circ.cx(c1, c2)?;
    phase_gate(circ, c1, 1.0, "t")?;
    phase_gate(circ, c2, -1.0, "tdg")?;
    circ.cx(c1, c2)?;
    Ok(())
}

/// Lowers Pauli rotations and controlled-SWAPs to single-qubit gates and CX.
/// Measurements and the global phase are carried over.
pub fn decompose(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits())?;
    out.add_global_phase(circuit.global_phase());
    for g in circuit.gates() {
        match &g.kind {
            GateKind::PauliRotation { pauli, theta } => {
                append_rotation_decomposed(&mut out, pauli, *theta)?
            }
            GateKind::ControlledSwap { control, a, b } => {
                out.cx(*b, *a)?;
                append_toffoli(&mut out, *control, *a, *b)?;
                out.cx(*b, *a)?;
            }
            _ => {
                out.push(g.clone())?;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCountReport {
    pub depth: usize,
    pub two_qubit_gates: usize,
    pub single_qubit_gates: usize,
    /// Gates on three or more qubits (native rotations, controlled-SWAPs).
    pub multi_qubit_gates: usize,
    pub per_step_depth: usize,
}

/// Depth (longest qubit-wise dependency chain) and gate counts by arity.
/// `per_step_depth` equals `depth` here; see [`trotter_gate_report`].
pub fn count_gates(circuit: &Circuit) -> GateCountReport {
    let mut level = vec![0usize; circuit.n_qubits()];
    let mut report = GateCountReport::default();
    for g in circuit.gates() {
        match g.arity() {
            0 => continue,
            1 => report.single_qubit_gates += 1,
            2 => report.two_qubit_gates += 1,
            _ => report.multi_qubit_gates += 1,
        }
        let qs = g.qubits();
        let layer = 1 + qs.iter().map(|&q| level[q]).max().unwrap_or(0);
        for q in qs {
            level[q] = layer;
        }
    }
    report.depth = level.into_iter().max().unwrap_or(0);
    report.per_step_depth = report.depth;
    report
}

/// Counts for the full plan, with `per_step_depth` taken from a single step.
pub fn trotter_gate_report(plan: &TrotterPlan, decomposed: bool) -> Result<GateCountReport> {
    let full = count_gates(&build_trotter_circuit(plan, decomposed)?);
    let one = count_gates(&build_trotter_circuit(&plan.with_steps(1, plan.dt()), decomposed)?);
    Ok(GateCountReport {
        per_step_depth: one.depth,
        ..full
    })
}

/// Trotterized evolution of `initial` with native rotations.
pub fn trotter_evolve(plan: &TrotterPlan, initial: &Statevector) -> Result<Statevector> {
    let mut s = initial.clone();
    s.apply_circuit(&build_trotter_circuit(plan, false)?)?;
    Ok(s)
}

/// `‖ψ_Trotter − ψ_exact‖₂` at the plan's final time.
pub fn trotter_error(plan: &TrotterPlan, initial: &Statevector) -> Result<f64> {
    let exact = ExactPropagator::new(&plan.hamiltonian)?.evolve(initial, plan.t)?;
    trotter_evolve(plan, initial)?.distance(&exact)
}
