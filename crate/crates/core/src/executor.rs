//! Multi-programmed batch execution.
//!
//! Circuits are packed side by side on a linear register with idle buffer
//! qubits between neighbours, packages run on a worker pool, and each
//! package's bitstrings are split back per member.
//!
//! Members of a package act on disjoint qubits, so a package is simulated as
//! a product of its members. Every job samples from its own stream
//! `derive_seed(master_seed, job_id)`, which makes per-job counts independent
//! of packing and scheduling. The optional crosstalk model breaks that
//! independence on purpose: a gate on a member's edge qubit triggers, with
//! probability `crosstalk`, a `Z⊗Z` error between that qubit and its physical
//! neighbour across the boundary (a no-op on an idle buffer qubit). The
//! partner error lands after the neighbour's gates in the same ASAP layer.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::{trajectory_shots, NoiseModel, TrajectorySimulator, ZInjection};
use crate::protocols::{Job, SamplingBackend};
use crate::rng::{derive_seed, rng_from_seed};
use crate::state::{final_state, outcome_to_bitstring, Counts, MAX_QUBITS};
use crate::trotter::decompose;

pub const DEFAULT_PACK_SIZE: usize = 5;
pub const DEFAULT_BUFFER_QUBITS: usize = 1;
pub const DEFAULT_MAX_TRAJECTORIES: u64 = 1000;

/// One circuit's slot in a package.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedMember {
    /// Index into the campaign's job list.
    pub job: usize,
    pub offset: usize,
    pub width: usize,
    pub clbit_offset: usize,
    pub clbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmpPackage {
    pub id: usize,
    pub members: Vec<PackedMember>,
    pub buffer_qubits: usize,
    pub total_qubits: usize,
}

impl QmpPackage {
    /// Member and local qubit at physical position `p`, or `None` for a
    /// buffer qubit.
    fn owner(&self, p: usize) -> Option<(usize, usize)> {
        self.members
            .iter()
            .position(|m| (m.offset..m.offset + m.width).contains(&p))
            .map(|i| (i, p - self.members[i].offset))
    }

    /// The wide composite circuit, for inspection and export.
    pub fn composite(&self, circuits: &[Circuit]) -> Result<Circuit> {
        let mut c = Circuit::new(self.total_qubits)?;
        let mut measured = Vec::new();
        for m in &self.members {
            let member = &circuits[m.job];
            c.append_shifted(&member.unitary_part(), m.offset)?;
            measured.extend(member.measured_qubits().iter().map(|q| q + m.offset));
        }
        if !measured.is_empty() {
            c.measure(&measured)?;
        }
        Ok(c)
    }
}

pub fn package_count(n_circuits: usize, pack_size: usize) -> usize {
    n_circuits.div_ceil(pack_size.max(1))
}

/// Greedy order-preserving packing.
pub fn pack(circuits: &[Circuit], pack_size: usize, buffer_qubits: usize) -> Result<Vec<QmpPackage>> {
    if pack_size == 0 {
        return Err(Error::InvalidArgument("pack_size must be ≥ 1".into()));
    }
    if let Some(c) = circuits.iter().find(|c| c.n_qubits() > MAX_QUBITS) {
        return Err(Error::TooManyQubits(c.n_qubits()));
    }
    Ok(circuits
        .chunks(pack_size)
        .enumerate()
        .map(|(id, chunk)| {
            let mut offset = 0;
            let mut clbit_offset = 0;
            let members = chunk
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    if k > 0 {
                        offset += buffer_qubits;
                    }
                    let m = PackedMember {
                        job: id * pack_size + k,
                        offset,
                        width: c.n_qubits(),
                        clbit_offset,
                        clbits: c.classical_bits(),
                    };
                    offset += c.n_qubits();
                    clbit_offset += m.clbits;
                    m
                })
                .collect();
            QmpPackage {
                id,
                members,
                buffer_qubits,
                total_qubits: offset,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionOptions {
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub crosstalk: f64,
    #[serde(default = "default_trajectories")]
    pub max_trajectories: u64,
}

fn default_trajectories() -> u64 {
    DEFAULT_MAX_TRAJECTORIES
}

impl Default for ExecutionOptions {
    fn default() -> Self {
        Self {
            noise: None,
            crosstalk: 0.0,
            max_trajectories: DEFAULT_MAX_TRAJECTORIES,
        }
    }
}

impl ExecutionOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        if !(0.0..1.0).contains(&self.crosstalk) {
            return Err(Error::InvalidArgument(format!(
                "crosstalk strength {} is not in [0, 1)",
                self.crosstalk
            )));
        }
        if self.max_trajectories == 0 {
            return Err(Error::InvalidArgument("max_trajectories must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub jobs: Vec<Job>,
    pub shots: u64,
    pub pack_size: usize,
    pub buffer_qubits: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl CampaignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be ≥ 1".into()));
        }
        if self.pack_size == 0 {
            return Err(Error::InvalidArgument("pack_size must be ≥ 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be ≥ 1".into()));
        }
        let mut seen = HashSet::new();
        for j in &self.jobs {
            if !seen.insert(j.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate job id {:?}", j.id)));
            }
        }
        Ok(())
    }
}

/// Outcome of one job; exactly one of `counts` and `error` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    /// `None` when the job was rejected before packing.
    pub package_id: Option<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Counts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    /// One record per job, in job order.
    pub records: Vec<JobRecord>,
}

impl CampaignResult {
    pub fn counts(&self) -> BTreeMap<String, Counts> {
        self.records
            .iter()
            .filter_map(|r| r.counts.clone().map(|c| (r.job_id.clone(), c)))
            .collect()
    }

    pub fn failures(&self) -> Vec<&JobRecord> {
        self.records.iter().filter(|r| r.error.is_some()).collect()
    }
}

/// Per-member ASAP layers and the gates on each qubit.
struct MemberLayout {
    layers: Vec<usize>,
    on_qubit: Vec<Vec<(usize, usize)>>,
}

impl MemberLayout {
    fn new(c: &Circuit) -> Self {
        let mut level = vec![0usize; c.n_qubits()];
        let mut on_qubit = vec![Vec::new(); c.n_qubits()];
        let layers = c
            .gates()
            .iter()
            .enumerate()
            .map(|(g, gate)| {
                if gate.is_measurement() {
                    return 0;
                }
                let qs = gate.qubits();
                let layer = 1 + qs.iter().map(|&q| level[q]).max().unwrap_or(0);
                for q in qs {
                    level[q] = layer;
                    on_qubit[q].push((layer, g));
                }
                layer
            })
            .collect();
        Self { layers, on_qubit }
    }

    /// Position just after the last gate on `q` in a layer `≤ layer`.
    fn position_after(&self, q: usize, layer: usize) -> usize {
        let gates = &self.on_qubit[q];
        match gates.partition_point(|&(l, _)| l <= layer) {
            0 => 0,
            k => gates[k - 1].1 + 1,
        }
    }
}

/// Crosstalk error positions per member, per trajectory.
fn crosstalk_events(
    package: &QmpPackage,
    circuits: &[&Circuit],
    n_trajectories: usize,
    strength: f64,
    seed: u64,
) -> Vec<Vec<Vec<ZInjection>>> {
    let mut out = vec![vec![Vec::new(); n_trajectories]; package.members.len()];
    if strength <= 0.0 || package.members.len() < 2 {
        return out;
    }
    let layouts: Vec<MemberLayout> = circuits.iter().map(|c| MemberLayout::new(c)).collect();
    let mut rng = rng_from_seed(seed);
    for traj in 0..n_trajectories {
        for (mi, m) in package.members.iter().enumerate() {
            let edges = [
                (0, m.offset.checked_sub(1)),
                (m.width - 1, Some(m.offset + m.width).filter(|&p| p < package.total_qubits)),
            ];
            for (g, gate) in circuits[mi].gates().iter().enumerate() {
                if gate.is_measurement() {
                    continue;
                }
                let qs = gate.qubits();
                for &(q, neighbour) in &edges {
                    let Some(np) = neighbour else { continue };
                    if !qs.contains(&q) || rng.gen::<f64>() >= strength {
                        continue;
                    }
                    out[mi][traj].push(ZInjection {
                        position: g + 1,
                        qubit: q,
                    });
                    if let Some((nj, nq)) = package.owner(np) {
                        let position = layouts[nj].position_after(nq, layouts[mi].layers[g]);
                        out[nj][traj].push(ZInjection { position, qubit: nq });
                    }
                }
            }
        }
    }
    for member in out.iter_mut() {
        for traj in member.iter_mut() {
            traj.sort();
        }
    }
    out
}

fn member_outcomes(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    options: &ExecutionOptions,
    injections: Option<&[Vec<ZInjection>]>,
) -> Result<Vec<usize>> {
    let model = options.noise.clone().unwrap_or_default();
    if model.is_noiseless() && injections.is_none() {
        let targets = circuit.measured_qubits();
        let mut rng = rng_from_seed(seed);
        return final_state(circuit)?.sample_outcomes(&targets, shots, &mut rng);
    }
    let sim = TrajectorySimulator::new(model, options.max_trajectories)?;
    let circuit = if sim.model.has_gate_noise() && !circuit.is_decomposed() {
        decompose(circuit)?
    } else {
        circuit.clone()
    };
    match injections {
        Some(inj) => sim.run_outcomes(&circuit, shots, seed, Some(&|i: usize| inj[i].clone())),
        None => sim.run_outcomes(&circuit, shots, seed, None),
    }
}

/// Runs one package and splits its bitstrings per member.
pub fn execute_package(
    package: &QmpPackage,
    jobs: &[Job],
    shots: u64,
    master_seed: u64,
    options: &ExecutionOptions,
) -> Vec<JobRecord> {
    let members: Vec<&Job> = package.members.iter().map(|m| &jobs[m.job]).collect();
    let seeds: Vec<u64> = members.iter().map(|j| derive_seed(master_seed, &j.id)).collect();
    let circuits: Vec<&Circuit> = members.iter().map(|j| &j.circuit).collect();
    let crosstalk = options.crosstalk > 0.0 && package.members.len() > 1;
    let events = crosstalk.then(|| {
        let n_traj = trajectory_shots(shots, options.max_trajectories).len();
        let first = &members[0].id;
        crosstalk_events(
            package,
            &circuits,
            n_traj,
            options.crosstalk,
            derive_seed(master_seed, &format!("crosstalk/{first}")),
        )
    });
    let outcomes: Vec<Result<Vec<usize>>> = circuits
        .iter()
        .enumerate()
        .map(|(i, c)| member_outcomes(c, shots, seeds[i], options, events.as_ref().map(|e| e[i].as_slice())))
        .collect();

    // Package-level bitstrings: member registers side by side.
    let total_bits: usize = package.members.iter().map(|m| m.clbits).sum();
    let mut tallies: Vec<Counts> = vec![Counts::new(); members.len()];
    let mut line = String::with_capacity(total_bits);
    for s in 0..shots as usize {
        line.clear();
        for (m, o) in package.members.iter().zip(&outcomes) {
            match o {
                Ok(v) => line.push_str(&outcome_to_bitstring(v[s], m.clbits)),
                Err(_) => line.extend(std::iter::repeat('0').take(m.clbits)),
            }
        }
        for (i, m) in package.members.iter().enumerate() {
            if outcomes[i].is_ok() {
                let part = &line[m.clbit_offset..m.clbit_offset + m.clbits];
                *tallies[i].entry(part.to_string()).or_insert(0) += 1;
            }
        }
    }
    members
        .iter()
        .zip(outcomes)
        .zip(tallies)
        .zip(seeds)
        .map(|(((job, o), counts), seed)| JobRecord {
            job_id: job.id.clone(),
            package_id: Some(package.id),
            seed,
            counts: o.as_ref().ok().map(|_| counts),
            error: o.err().map(|e| e.to_string()),
        })
        .collect()
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))
}

/// Why a job cannot be packed, if it cannot.
fn job_problem(job: &Job) -> Option<String> {
    if job.circuit.classical_bits() == 0 {
        Some("circuit measures nothing".into())
    } else if job.circuit.n_qubits() > MAX_QUBITS {
        Some(Error::TooManyQubits(job.circuit.n_qubits()).to_string())
    } else {
        None
    }
}

/// Packs and runs `jobs`; rejected jobs get error records. Records come
/// back in job order.
fn execute_all(
    jobs: &[Job],
    spec: &CampaignSpec,
    options: &ExecutionOptions,
    pool: &rayon::ThreadPool,
    first_package: usize,
) -> Result<Vec<JobRecord>> {
    let (runnable, rejected): (Vec<&Job>, Vec<&Job>) =
        jobs.iter().partition(|j| job_problem(j).is_none());
    let runnable: Vec<Job> = runnable.into_iter().cloned().collect();
    let circuits: Vec<Circuit> = runnable.iter().map(|j| j.circuit.clone()).collect();
    let mut packages = pack(&circuits, spec.pack_size, spec.buffer_qubits)?;
    for p in packages.iter_mut() {
        p.id += first_package;
    }
    let mut by_id: BTreeMap<String, JobRecord> = pool
        .install(|| {
            packages
                .par_iter()
                .flat_map_iter(|p| execute_package(p, &runnable, spec.shots, spec.master_seed, options))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .map(|r| (r.job_id.clone(), r))
        .collect();
    for j in rejected {
        by_id.insert(
            j.id.clone(),
            JobRecord {
                job_id: j.id.clone(),
                package_id: None,
                seed: derive_seed(spec.master_seed, &j.id),
                counts: None,
                error: job_problem(j),
            },
        );
    }
    Ok(jobs
        .iter()
        .map(|j| by_id.remove(&j.id).expect("every job has a record"))
        .collect())
}

pub fn run_campaign(spec: &CampaignSpec, options: &ExecutionOptions) -> Result<CampaignResult> {
    spec.validate()?;
    options.validate()?;
    let pool = thread_pool(spec.workers)?;
    Ok(CampaignResult {
        records: execute_all(&spec.jobs, spec, options, &pool, 0)?,
    })
}

/// What a results directory was produced from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub n_jobs: usize,
    pub shots: u64,
    pub pack_size: usize,
    pub buffer_qubits: usize,
    pub master_seed: u64,
    pub options: ExecutionOptions,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.jsonl";

/// Packages executed between appends to the record file.
const FLUSH_PACKAGES: usize = 64;

/// [`run_campaign`] that appends records to `dir/records.jsonl` as packages
/// finish and skips jobs already recorded there.
pub fn run_campaign_resumable(
    spec: &CampaignSpec,
    options: &ExecutionOptions,
    dir: &Path,
) -> Result<CampaignResult> {
    spec.validate()?;
    options.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = CampaignManifest {
        n_jobs: spec.jobs.len(),
        shots: spec.shots,
        pack_size: spec.pack_size,
        buffer_qubits: spec.buffer_qubits,
        master_seed: spec.master_seed,
        options: options.clone(),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let previous: CampaignManifest =
            serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))?;
        if previous != manifest {
            return Err(Error::InvalidArgument(format!(
                "{} belongs to a different campaign",
                dir.display()
            )));
        }
    } else {
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
    }

    let records_path = dir.join(RECORDS_FILE);
    let mut done: BTreeMap<String, JobRecord> = BTreeMap::new();
    if records_path.exists() {
        let f = File::open(&records_path).map_err(|e| Error::io(&records_path, e))?;
        for line in BufReader::new(f).lines() {
            let line = line.map_err(|e| Error::io(&records_path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            // A torn final line from an interrupted run is rerun.
            if let Ok(r) = serde_json::from_str::<JobRecord>(&line) {
                done.insert(r.job_id.clone(), r);
            }
        }
    }

    let pending: Vec<Job> = spec
        .jobs
        .iter()
        .filter(|j| !done.contains_key(&j.id))
        .cloned()
        .collect();
    let pool = thread_pool(spec.workers)?;
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&records_path)
        .map_err(|e| Error::io(&records_path, e))?;
    let chunk_jobs = FLUSH_PACKAGES * spec.pack_size;
    let mut next_package = done
        .values()
        .filter_map(|r| r.package_id)
        .max()
        .map_or(0, |p| p + 1);
    for chunk in pending.chunks(chunk_jobs) {
        let records = execute_all(chunk, spec, options, &pool, next_package)?;
        next_package += package_count(chunk.len(), spec.pack_size);
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(&r).map_err(|e| Error::Serialization(e.to_string()))?);
            buf.push('\n');
            done.insert(r.job_id.clone(), r);
        }
        file.write_all(buf.as_bytes()).map_err(|e| Error::io(&records_path, e))?;
    }
    file.flush().map_err(|e| Error::io(&records_path, e))?;

    Ok(CampaignResult {
        records: spec
            .jobs
            .iter()
            .map(|j| done.remove(&j.id).expect("every job has a record"))
            .collect(),
    })
}

/// A configured campaign runner usable as a [`SamplingBackend`].
#[derive(Clone, Debug, PartialEq)]
pub struct Executor {
    pub pack_size: usize,
    pub buffer_qubits: usize,
    pub workers: usize,
    pub master_seed: u64,
    pub options: ExecutionOptions,
}

impl Executor {
    pub fn new(master_seed: u64) -> Self {
        Self {
            pack_size: DEFAULT_PACK_SIZE,
            buffer_qubits: DEFAULT_BUFFER_QUBITS,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            master_seed,
            options: ExecutionOptions::default(),
        }
    }

    pub fn with_noise(mut self, noise: Option<NoiseModel>) -> Self {
        self.options.noise = noise;
        self
    }

    pub fn spec(&self, jobs: Vec<Job>, shots: u64) -> CampaignSpec {
        CampaignSpec {
            jobs,
            shots,
            pack_size: self.pack_size,
            buffer_qubits: self.buffer_qubits,
            master_seed: self.master_seed,
            workers: self.workers,
        }
    }
}

impl SamplingBackend for Executor {
    fn run_jobs(&self, jobs: &[Job], shots: u64) -> Result<Vec<Counts>> {
        let result = run_campaign(&self.spec(jobs.to_vec(), shots), &self.options)?;
        result
            .records
            .into_iter()
            .map(|r| match (r.counts, r.error) {
                (Some(c), _) => Ok(c),
                (None, e) => Err(Error::InvalidCircuit(format!(
                    "job {} failed: {}",
                    r.job_id,
                    e.unwrap_or_default()
                ))),
            })
            .collect()
    }
}
