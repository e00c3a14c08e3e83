//! Purity estimators: the swap test on two copies and randomized local
//! measurements.
//!
//! Both protocols run either in exact mode, reading outcome probabilities
//! straight from the statevector, or through a [`SamplingBackend`] that turns
//! measured circuits into shot counts.

pub mod rm;
pub mod swap;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::rng::derive_seed;
use crate::state::{run_circuit, Counts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    SwapMbi,
    Rm,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::SwapMbi => "swap_mbi",
            Protocol::Rm => "rm",
        }
    }
}

/// Resources behind an estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub protocol: Protocol,
    pub subsystem_size: usize,
    /// Total shots consumed; 0 in exact mode.
    pub shots: u64,
    pub n_unitaries: Option<usize>,
}

/// A purity estimate and the Rényi-2 entropy derived from it (in nats).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub purity: f64,
    pub purity_std_error: f64,
    /// `−ln(purity)`, or `None` when the estimate is not positive.
    pub renyi2: Option<f64>,
    /// Standard error of `renyi2`, propagated as `σ_purity / purity`.
    pub std_error: Option<f64>,
    pub meta: EstimateMeta,
}

impl EntropyEstimate {
    pub fn from_purity(purity: f64, purity_std_error: f64, meta: EstimateMeta) -> Self {
        let (renyi2, std_error) = if purity > 0.0 {
            (Some(-purity.ln()), Some(purity_std_error / purity))
        } else {
            (None, None)
        };
        Self {
            purity,
            purity_std_error,
            renyi2,
            std_error,
            meta,
        }
    }

    pub fn is_undefined(&self) -> bool {
        self.renyi2.is_none()
    }
}

/// A measured circuit tagged with the identifier its sampling seed is
/// derived from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    pub circuit: Circuit,
}

/// Something that samples measured circuits.
pub trait SamplingBackend: Sync {
    /// Counts of every job, in input order.
    fn run_jobs(&self, jobs: &[Job], shots: u64) -> Result<Vec<Counts>>;
}

/// Noiseless one-circuit-at-a-time sampler seeded by
/// `derive_seed(master_seed, job.id)`.
#[derive(Clone, Copy, Debug)]
pub struct IdealSampler {
    pub master_seed: u64,
}

impl SamplingBackend for IdealSampler {
    fn run_jobs(&self, jobs: &[Job], shots: u64) -> Result<Vec<Counts>> {
        jobs.iter()
            .map(|j| run_circuit(&j.circuit, shots, derive_seed(self.master_seed, &j.id)))
            .collect()
    }
}

/// Where a protocol gets its outcome statistics from.
#[derive(Clone, Copy)]
pub enum Backend<'a> {
    /// Exact probabilities (the infinite-shot limit).
    Exact,
    /// Sampled counts; job ids are prefixed with `tag`.
    Sampled {
        sampler: &'a dyn SamplingBackend,
        tag: &'a str,
    },
}
