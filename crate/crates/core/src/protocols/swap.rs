//! Swap test on two copies of the prepared state.
//!
//! Layout: copy 1 on qubits `0..n`, copy 2 on `n..2n`, ancilla on `2n`.
//! With `P₀` the ancilla's probability of reading 0, `Tr ρ_L² = 2P₀ − 1`.

use serde::{Deserialize, Serialize};

use super::{Backend, EntropyEstimate, EstimateMeta, Job, Protocol};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::state::{final_state, Counts, MAX_QUBITS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapMbiJob {
    pub base_circuit: Circuit,
    pub subsystem: Vec<usize>,
    pub shots: u64,
}

impl SwapMbiJob {
    /// The full register is accepted as a subsystem (its purity is 1 for any
    /// pure state), unlike the oracle's proper-subset rule.
    pub fn validate(&self) -> Result<()> {
        let n = self.base_circuit.n_qubits();
        if self.subsystem.is_empty() {
            return Err(Error::InvalidSubsystem("subsystem is empty".into()));
        }
        for (i, &q) in self.subsystem.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
            }
            if self.subsystem[..i].contains(&q) {
                return Err(Error::InvalidSubsystem(format!("qubit {q} listed twice")));
            }
        }
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be ≥ 1".into()));
        }
        if self.base_circuit.classical_bits() > 0 {
            return Err(Error::InvalidCircuit(
                "base circuit must not contain measurements".into(),
            ));
        }
        Ok(())
    }

    pub fn ancilla(&self) -> usize {
        2 * self.base_circuit.n_qubits()
    }
}

pub fn build_swap_test_circuit(job: &SwapMbiJob) -> Result<Circuit> {
    job.validate()?;
    let n = job.base_circuit.n_qubits();
    let width = 2 * n + 1;
    if width > MAX_QUBITS {
        return Err(Error::TooManyQubits(width));
    }
    let anc = 2 * n;
    let mut c = Circuit::new(width)?;
    c.append_shifted(&job.base_circuit, 0)?;
    c.append_shifted(&job.base_circuit, n)?;
    c.h(anc)?;
    for &q in &job.subsystem {
        c.cswap(anc, q, q + n)?;
    }
    c.h(anc)?.measure(&[anc])?;
    Ok(c)
}

fn swap_meta(subsystem_size: usize, shots: u64) -> EstimateMeta {
    EstimateMeta {
        protocol: Protocol::SwapMbi,
        subsystem_size,
        shots,
        n_unitaries: None,
    }
}

/// Estimate from `zeros` ancilla zeros out of `shots`.
///
/// The binomial error uses the add-one smoothed frequency
/// `(zeros + 1) / (shots + 2)`, which stays nonzero when every shot agrees.
pub fn purity_from_ancilla(zeros: u64, shots: u64, subsystem_size: usize) -> Result<EntropyEstimate> {
    if shots == 0 || zeros > shots {
        return Err(Error::InvalidArgument(format!(
            "{zeros} zeros out of {shots} shots"
        )));
    }
    let p0 = zeros as f64 / shots as f64;
    let smoothed = (zeros as f64 + 1.0) / (shots as f64 + 2.0);
    let sigma_p0 = (smoothed * (1.0 - smoothed) / shots as f64).sqrt();
    Ok(EntropyEstimate::from_purity(
        2.0 * p0 - 1.0,
        2.0 * sigma_p0,
        swap_meta(subsystem_size, shots),
    ))
}

/// Estimate from single-bit ancilla counts. The subsystem size is not
/// visible in the counts and is recorded as 0; protocol drivers fill it in.
pub fn estimate_purity_swap(counts: &Counts) -> Result<EntropyEstimate> {
    let mut zeros = 0;
    let mut shots = 0;
    for (bits, &n) in counts {
        match bits.as_str() {
            "0" => zeros += n,
            "1" => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "ancilla outcome {bits:?} is not a single bit"
                )))
            }
        }
        shots += n;
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("empty counts".into()));
    }
    purity_from_ancilla(zeros, shots, 0)
}

/// `P₀` of a measured swap-test circuit, read from the statevector.
pub fn exact_ancilla_p0(circuit: &Circuit) -> Result<f64> {
    let targets = circuit.measured_qubits();
    if targets.len() != 1 {
        return Err(Error::InvalidCircuit(
            "swap-test circuit must measure exactly the ancilla".into(),
        ));
    }
    Ok(final_state(circuit)?.probabilities(&targets)?[0])
}

pub fn run_swap_test(job: &SwapMbiJob, backend: Backend<'_>) -> Result<EntropyEstimate> {
    let circuit = build_swap_test_circuit(job)?;
    let l = job.subsystem.len();
    match backend {
        Backend::Exact => {
            let p0 = exact_ancilla_p0(&circuit)?;
            Ok(EntropyEstimate::from_purity(2.0 * p0 - 1.0, 0.0, swap_meta(l, 0)))
        }
        Backend::Sampled { sampler, tag } => {
            let jobs = [Job {
                id: format!("{tag}/swap"),
                circuit,
            }];
            let counts = sampler.run_jobs(&jobs, job.shots)?.remove(0);
            let mut est = estimate_purity_swap(&counts)?;
            est.meta.subsystem_size = l;
            Ok(est)
        }
    }
}
