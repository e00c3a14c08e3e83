//! End-to-end experiment driver: one config file in, a results table, the
//! resolved config and a gate-count report out.
//!
//! Every time point is evolved from `|0…0⟩` with `t / trotter_dt` first-order
//! steps. Each (time, subsystem, protocol) cell is measured without noise
//! and, when a noise model is configured, once more under noise (mitigated
//! if a mitigation stack is configured). Exact-evolution and
//! exact-Trotterized reference entropies sit next to every estimate.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exact::{purity, reduced_density_matrix, renyi_entropy, von_neumann_entropy, ExactPropagator, LogBase};
use crate::executor::{package_count, Executor, DEFAULT_BUFFER_QUBITS, DEFAULT_MAX_TRAJECTORIES, DEFAULT_PACK_SIZE};
use crate::mitigation::{mitigated_rm, mitigated_swap, MitigationConfig};
use crate::noise::NoiseModel;
use crate::pauli::PauliSum;
use crate::protocols::rm::{run_randomized_measurement, RandomizedMeasurementJob, RmEstimator};
use crate::protocols::swap::{build_swap_test_circuit, run_swap_test, SwapMbiJob};
use crate::protocols::{Backend, EntropyEstimate, Protocol};
use crate::rng::derive_seed;
use crate::state::Statevector;
use crate::syk::{build_hamiltonian, SykParams};
use crate::trotter::{build_trotter_circuit, count_gates, trotter_evolve, GateCountReport, TrotterPlan};

pub const RESULTS_FILE: &str = "results.csv";
pub const ORACLE_FILE: &str = "oracle.csv";
pub const CONFIG_FILE: &str = "config.resolved.json";
pub const GATE_COUNTS_FILE: &str = "gate_counts.json";

/// Recorded in every output set.
pub const INITIAL_STATE: &str = "all-zeros";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolChoice {
    SwapMbi,
    Rm,
    #[default]
    Both,
}

impl ProtocolChoice {
    pub fn protocols(self) -> Vec<Protocol> {
        match self {
            ProtocolChoice::SwapMbi => vec![Protocol::SwapMbi],
            ProtocolChoice::Rm => vec![Protocol::Rm],
            ProtocolChoice::Both => vec![Protocol::SwapMbi, Protocol::Rm],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmSettings {
    /// Random local unitaries per estimate (default 150).
    #[serde(default = "default_n_unitaries")]
    pub n_unitaries: usize,
    #[serde(default = "default_shots_per_unitary")]
    pub shots_per_unitary: u64,
    #[serde(default)]
    pub estimator: RmEstimator,
}

fn default_n_unitaries() -> usize {
    150
}
fn default_shots_per_unitary() -> u64 {
    1024
}

impl Default for RmSettings {
    fn default() -> Self {
        Self {
            n_unitaries: default_n_unitaries(),
            shots_per_unitary: default_shots_per_unitary(),
            estimator: RmEstimator::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutorSettings {
    /// Circuits per multi-programming package (default 5).
    #[serde(default = "default_pack_size")]
    pub pack_size: usize,
    /// Idle qubits between packed circuits (default 1).
    #[serde(default = "default_buffer")]
    pub buffer_qubits: usize,
    /// Worker threads; `None` uses every available core.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_trajectories")]
    pub max_trajectories: u64,
    /// Strength of the neighbour ZZ error between packed circuits.
    #[serde(default)]
    pub crosstalk: f64,
}

fn default_pack_size() -> usize {
    DEFAULT_PACK_SIZE
}
fn default_buffer() -> usize {
    DEFAULT_BUFFER_QUBITS
}
fn default_trajectories() -> u64 {
    DEFAULT_MAX_TRAJECTORIES
}

impl Default for ExecutorSettings {
    fn default() -> Self {
        Self {
            pack_size: default_pack_size(),
            buffer_qubits: default_buffer(),
            workers: None,
            max_trajectories: default_trajectories(),
            crosstalk: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub syk: SykParams,
    /// Evolution times (default 2, 4, 6, 8, 10).
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Trotter step size (default 2.0).
    #[serde(default = "default_dt")]
    pub trotter_dt: f64,
    /// Measured subsystems (default the leftmost one and two qubits).
    #[serde(default = "default_subsystems")]
    pub subsystems: Vec<Vec<usize>>,
    #[serde(default)]
    pub protocol: ProtocolChoice,
    /// Swap-test shots per circuit; the default matches the RM budget of
    /// 150 × 1024.
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Use exact outcome probabilities instead of sampled shots.
    #[serde(default)]
    pub exact_probabilities: bool,
    #[serde(default)]
    pub rm: RmSettings,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub mitigation: Option<MitigationConfig>,
    #[serde(default)]
    pub executor: ExecutorSettings,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
    /// Unit of every reported entropy.
    #[serde(default)]
    pub log_base: LogBase,
}

fn default_times() -> Vec<f64> {
    vec![2.0, 4.0, 6.0, 8.0, 10.0]
}
fn default_dt() -> f64 {
    2.0
}
fn default_subsystems() -> Vec<Vec<usize>> {
    vec![vec![0], vec![0, 1]]
}
fn default_shots() -> u64 {
    150 * 1024
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes")
    }
}

/// One line-numbered location per config key, for error messages.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

fn config_error(text: Option<&str>, key: &str, message: String) -> Error {
    match text.and_then(|t| key_line(t, key)) {
        Some(line) => Error::Config(format!("line {line}: {message}")),
        None => Error::Config(format!("{key}: {message}")),
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON config. Errors carry the offending line.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check(Some(text))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.check(None)
    }

    fn check(&self, text: Option<&str>) -> Result<()> {
        let err = |key: &str, message: String| config_error(text, key, message);
        self.syk.validate().map_err(|e| err("syk", e.to_string()))?;
        if !(self.trotter_dt.is_finite() && self.trotter_dt > 0.0) {
            return Err(err("trotter_dt", format!("trotter_dt {} must be positive", self.trotter_dt)));
        }
        if self.times.is_empty() {
            return Err(err("times", "at least one time point is required".into()));
        }
        for &t in &self.times {
            if !(t.is_finite() && t > 0.0) {
                return Err(err("times", format!("time {t} must be positive")));
            }
            let r = t / self.trotter_dt;
            if (r - r.round()).abs() > 1e-9 {
                return Err(err(
                    "times",
                    format!("time {t} is not a whole number of trotter_dt = {} steps", self.trotter_dt),
                ));
            }
        }
        let n = self.syk.n_qubits();
        if self.subsystems.is_empty() {
            return Err(err("subsystems", "at least one subsystem is required".into()));
        }
        for s in &self.subsystems {
            crate::exact::validate_subsystem(s, n).map_err(|e| err("subsystems", e.to_string()))?;
            if s.len() >= n {
                return Err(err("subsystems", format!("subsystem {s:?} is not a proper subset of {n} qubits")));
            }
        }
        if !self.exact_probabilities && self.shots == 0 {
            return Err(err("shots", "shots must be ≥ 1".into()));
        }
        if self.rm.n_unitaries < 2 {
            return Err(err("n_unitaries", "n_unitaries must be ≥ 2".into()));
        }
        let min_shots = match self.rm.estimator {
            RmEstimator::PlugIn => 1,
            RmEstimator::Unbiased => 2,
        };
        if !self.exact_probabilities && self.rm.shots_per_unitary < min_shots {
            return Err(err("shots_per_unitary", format!("shots_per_unitary must be ≥ {min_shots}")));
        }
        if let Some(noise) = &self.noise {
            noise.validate().map_err(|e| err("noise", e.to_string()))?;
            if self.exact_probabilities {
                return Err(err("exact_probabilities", "a noise model needs sampled execution".into()));
            }
        }
        if let Some(m) = &self.mitigation {
            m.validate().map_err(|e| err("mitigation", e.to_string()))?;
            if self.noise.is_none() {
                return Err(err("mitigation", "mitigation is configured without a noise model".into()));
            }
        }
        let ex = &self.executor;
        if ex.pack_size == 0 {
            return Err(err("pack_size", "pack_size must be ≥ 1".into()));
        }
        if ex.workers == Some(0) {
            return Err(err("workers", "workers must be ≥ 1".into()));
        }
        if ex.max_trajectories == 0 {
            return Err(err("max_trajectories", "max_trajectories must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&ex.crosstalk) {
            return Err(err("crosstalk", format!("crosstalk {} is not in [0, 1)", ex.crosstalk)));
        }
        Ok(())
    }

    /// `(t, r)` for every time point.
    pub fn plan(&self) -> Vec<(f64, usize)> {
        self.times
            .iter()
            .map(|&t| (t, (t / self.trotter_dt).round() as usize))
            .collect()
    }

    /// Noise settings in row order: always `None` (noiseless), then the
    /// configured model.
    pub fn noise_settings(&self) -> Vec<Option<&NoiseModel>> {
        let mut out = vec![None];
        if let Some(n) = &self.noise {
            out.push(Some(n));
        }
        out
    }

    /// Mitigated RM circuits per time point and subsystem: unitaries times
    /// folding factors times twirls.
    pub fn rm_circuits_per_time_point(&self) -> usize {
        let variants = self.mitigation.as_ref().map_or(1, MitigationConfig::variants_per_circuit);
        self.rm.n_unitaries * variants
    }

    /// Packages needed for `n_circuits` at the configured pack size.
    pub fn packages_for(&self, n_circuits: usize) -> usize {
        package_count(n_circuits, self.executor.pack_size)
    }

    fn executor(&self, seed_label: &str, noise: Option<&NoiseModel>) -> Executor {
        let mut ex = Executor::new(derive_seed(self.master_seed, seed_label)).with_noise(noise.cloned());
        ex.pack_size = self.executor.pack_size;
        ex.buffer_qubits = self.executor.buffer_qubits;
        if let Some(w) = self.executor.workers {
            ex.workers = w;
        }
        ex.options.max_trajectories = self.executor.max_trajectories;
        ex.options.crosstalk = self.executor.crosstalk;
        ex
    }
}

/// Exact reference values for one (time, subsystem) cell, in nats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub t: f64,
    pub steps: usize,
    pub subsystem: Vec<usize>,
    pub purity_exact: f64,
    pub purity_exact_trotter: f64,
    pub s2_exact: f64,
    pub s2_exact_trotter: f64,
    pub svn_exact: f64,
    pub svn_exact_trotter: f64,
}

fn entropies(state: &Statevector, keep: &[usize]) -> Result<(f64, f64, f64)> {
    let rho = reduced_density_matrix(state, keep)?;
    Ok((purity(&rho), renyi_entropy(&rho, 2)?, von_neumann_entropy(&rho)))
}

/// Exact references at time `t` with `steps` Trotter steps. `t = 0` (with
/// zero steps) gives the initial product state.
pub fn reference_point(
    hamiltonian: &PauliSum,
    propagator: &ExactPropagator,
    t: f64,
    steps: usize,
    subsystems: &[Vec<usize>],
) -> Result<Vec<Reference>> {
    let initial = Statevector::zero(hamiltonian.n_qubits)?;
    let exact = propagator.evolve(&initial, t)?;
    let trotter = if steps == 0 {
        initial
    } else {
        trotter_evolve(&TrotterPlan::new(hamiltonian.clone(), t, steps)?, &initial)?
    };
    subsystems
        .iter()
        .map(|keep| {
            let (pe, se, ve) = entropies(&exact, keep)?;
            let (pt, st, vt) = entropies(&trotter, keep)?;
            Ok(Reference {
                t,
                steps,
                subsystem: keep.clone(),
                purity_exact: pe,
                purity_exact_trotter: pt,
                s2_exact: se,
                s2_exact_trotter: st,
                svn_exact: ve,
                svn_exact_trotter: vt,
            })
        })
        .collect()
}

/// Exact references for every configured cell.
pub fn run_oracle(config: &ExperimentConfig) -> Result<Vec<Reference>> {
    config.validate()?;
    let h = build_hamiltonian(&config.syk)?.pauli_sum();
    let prop = ExactPropagator::new(&h)?;
    let mut out = Vec::new();
    for (t, r) in config.plan() {
        out.extend(reference_point(&h, &prop, t, r, &config.subsystems)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub t: f64,
    pub steps: usize,
    pub subsystem: Vec<usize>,
    pub protocol: Protocol,
    pub estimate: EntropyEstimate,
    pub reference: Reference,
    pub noise_label: String,
    pub mitigation_label: String,
    /// Unmitigated purity when the row was mitigated.
    pub purity_raw: Option<f64>,
    /// `(folding factor, twirl-averaged value)` pairs behind the extrapolation.
    pub zne_points: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GateCounts {
    pub t: f64,
    pub steps: usize,
    /// Decomposed evolution circuit.
    pub evolution: GateCountReport,
    /// Decomposed swap-test circuit per subsystem.
    pub swap_test: Vec<(Vec<usize>, GateCountReport)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub gate_counts: Vec<GateCounts>,
}

fn evolution_circuit(h: &PauliSum, t: f64, steps: usize) -> Result<Circuit> {
    build_trotter_circuit(&TrotterPlan::new(h.clone(), t, steps)?, true)
}

/// Gate counts for every time point.
pub fn gate_report(config: &ExperimentConfig) -> Result<Vec<GateCounts>> {
    config.validate()?;
    let h = build_hamiltonian(&config.syk)?.pauli_sum();
    config
        .plan()
        .into_iter()
        .map(|(t, r)| {
            let base = evolution_circuit(&h, t, r)?;
            let swap_test = config
                .subsystems
                .iter()
                .map(|s| {
                    let job = SwapMbiJob {
                        base_circuit: base.clone(),
                        subsystem: s.clone(),
                        shots: 1,
                    };
                    let c = crate::trotter::decompose(&build_swap_test_circuit(&job)?)?;
                    Ok((s.clone(), count_gates(&c)))
                })
                .collect::<Result<_>>()?;
            Ok(GateCounts {
                t,
                steps: r,
                evolution: count_gates(&base),
                swap_test,
            })
        })
        .collect()
}

fn cell_tag(t: f64, subsystem: &[usize], protocol: Protocol) -> String {
    let qs: Vec<String> = subsystem.iter().map(ToString::to_string).collect();
    format!("t{t}/q{}/{}", qs.join("-"), protocol.label())
}

/// Runs the configured protocols at every time point and subsystem.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let h = build_hamiltonian(&config.syk)?.pauli_sum();
    let prop = ExactPropagator::new(&h)?;
    let protocols = config.protocol.protocols();
    let mut rows = Vec::new();
    for (t, r) in config.plan() {
        let base = evolution_circuit(&h, t, r)?;
        let references = reference_point(&h, &prop, t, r, &config.subsystems)?;
        for reference in references {
            let keep = &reference.subsystem;
            for &protocol in &protocols {
                let tag = cell_tag(t, keep, protocol);
                for noise in config.noise_settings() {
                    let setting = if noise.is_some() { "noisy" } else { "noiseless" };
                    let executor = config.executor(setting, noise);
                    let mitigation = noise.and(config.mitigation.as_ref());
                    let (estimate, purity_raw, zne_points) =
                        measure(config, &base, keep, protocol, &tag, &executor, noise, mitigation)?;
                    rows.push(ResultRow {
                        t,
                        steps: r,
                        subsystem: keep.clone(),
                        protocol,
                        estimate,
                        reference: reference.clone(),
                        noise_label: noise.map_or_else(|| "noiseless".to_string(), NoiseModel::label),
                        mitigation_label: mitigation.map_or_else(|| "none".to_string(), MitigationConfig::label),
                        purity_raw,
                        zne_points,
                    });
                }
            }
        }
    }
    Ok(ExperimentResults {
        config: config.clone(),
        rows,
        gate_counts: gate_report(config)?,
    })
}

type Measured = (EntropyEstimate, Option<f64>, Vec<(usize, f64)>);

#[allow(clippy::too_many_arguments)]
fn measure(
    config: &ExperimentConfig,
    base: &Circuit,
    keep: &[usize],
    protocol: Protocol,
    tag: &str,
    executor: &Executor,
    noise: Option<&NoiseModel>,
    mitigation: Option<&MitigationConfig>,
) -> Result<Measured> {
    let backend = if config.exact_probabilities {
        Backend::Exact
    } else {
        Backend::Sampled { sampler: executor, tag }
    };
    match protocol {
        Protocol::SwapMbi => {
            let job = SwapMbiJob {
                base_circuit: base.clone(),
                subsystem: keep.to_vec(),
                shots: config.shots.max(1),
            };
            match (noise, mitigation) {
                (Some(n), Some(m)) => {
                    let seed = derive_seed(config.master_seed, &format!("{tag}/mitigation"));
                    let out = mitigated_swap(&job, m, n, executor, tag, seed)?;
                    Ok((out.estimate, Some(out.trace.raw_purity), out.trace.per_factor))
                }
                _ => Ok((run_swap_test(&job, backend)?, None, Vec::new())),
            }
        }
        Protocol::Rm => {
            let job = RandomizedMeasurementJob {
                base_circuit: base.clone(),
                subsystem: keep.to_vec(),
                n_unitaries: config.rm.n_unitaries,
                shots_per_unitary: config.rm.shots_per_unitary.max(2),
                seed: derive_seed(config.master_seed, &format!("{tag}/unitaries")),
                estimator: config.rm.estimator,
            };
            match (noise, mitigation) {
                (Some(n), Some(m)) => {
                    let out = mitigated_rm(&job, m, n, executor, tag)?;
                    Ok((out.estimate, Some(out.trace.raw_purity), out.trace.per_factor))
                }
                _ => Ok((run_randomized_measurement(&job, backend)?, None, Vec::new())),
            }
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn qubit_list(qs: &[usize]) -> String {
    qs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub const RESULTS_HEADER: &str = "t,L,subsystem,protocol,purity,S2,std_error,S2_exact,S2_exact_trotter,\
SvN_exact,SvN_exact_trotter,n_unitaries,shots,noise_label,mitigation_label,purity_raw,zne_points,flag";

/// The results table. Entropies are converted to `base`; an estimate with no
/// positive purity keeps its row with empty entropy columns and the
/// `undefined` flag.
pub fn results_csv(rows: &[ResultRow], base: LogBase) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for row in rows {
        let e = &row.estimate;
        let r = &row.reference;
        let b = |x: f64| base.from_nats(x);
        let zne = row
            .zne_points
            .iter()
            .map(|(f, v)| format!("{f}:{v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.t,
            row.subsystem.len(),
            qubit_list(&row.subsystem),
            row.protocol.label(),
            e.purity,
            opt(e.renyi2.map(b)),
            opt(e.std_error.map(b)),
            b(r.s2_exact),
            b(r.s2_exact_trotter),
            b(r.svn_exact),
            b(r.svn_exact_trotter),
            e.meta.n_unitaries.map(|n| n.to_string()).unwrap_or_default(),
            e.meta.shots,
            row.noise_label,
            row.mitigation_label,
            opt(row.purity_raw),
            zne,
            if e.is_undefined() { "undefined" } else { "" },
        );
    }
    out
}

pub const ORACLE_HEADER: &str =
    "t,steps,L,subsystem,purity_exact,purity_exact_trotter,S2_exact,S2_exact_trotter,SvN_exact,SvN_exact_trotter";

pub fn oracle_csv(refs: &[Reference], base: LogBase) -> String {
    let mut out = String::from(ORACLE_HEADER);
    out.push('\n');
    for r in refs {
        let b = |x: f64| base.from_nats(x);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.steps,
            r.subsystem.len(),
            qubit_list(&r.subsystem),
            r.purity_exact,
            r.purity_exact_trotter,
            b(r.s2_exact),
            b(r.s2_exact_trotter),
            b(r.svn_exact),
            b(r.svn_exact_trotter),
        );
    }
    out
}

#[derive(Serialize)]
struct GateCountFile<'a> {
    initial_state: &'static str,
    time_points: &'a [GateCounts],
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Serialization(e.to_string()))
}

/// Writes the gate-count report alone.
pub fn emit_gate_counts(counts: &[GateCounts], dir: &Path) -> Result<PathBuf> {
    ensure_dir(dir)?;
    write(
        dir,
        GATE_COUNTS_FILE,
        &json(&GateCountFile {
            initial_state: INITIAL_STATE,
            time_points: counts,
        })?,
    )
}

/// Writes the results table, the resolved config and the gate-count report.
/// Output depends only on `results`.
pub fn emit_results(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>> {
    if results.rows.is_empty() {
        return Err(Error::InvalidArgument("no result rows to emit".into()));
    }
    ensure_dir(dir)?;
    Ok(vec![
        write(dir, RESULTS_FILE, &results_csv(&results.rows, results.config.log_base))?,
        write(dir, CONFIG_FILE, &json(&results.config)?)?,
        emit_gate_counts(&results.gate_counts, dir)?,
    ])
}

/// Writes the exact reference curves and the resolved config.
pub fn emit_oracle(config: &ExperimentConfig, refs: &[Reference], dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    Ok(vec![
        write(dir, ORACLE_FILE, &oracle_csv(refs, config.log_base))?,
        write(dir, CONFIG_FILE, &json(config)?)?,
    ])
}
