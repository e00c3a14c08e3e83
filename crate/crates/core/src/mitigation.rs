//! Error mitigation: zero-noise extrapolation by global folding, Pauli
//! twirling of CX/CZ gates, and tensored readout-confusion inversion.
//!
//! [`expand_variants`] turns one measured circuit into the raw run plus
//! `factors × twirls` mitigation variants; [`combine`] folds the per-variant
//! observable values back into a single extrapolated value. RM jobs are
//! mitigated per unitary and then averaged.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::noise::{is_twirlable, NoiseModel, ReadoutError};
use crate::pauli::{Pauli, PauliString};
use crate::protocols::rm::{estimate_from_draws, x_from_probabilities, RandomizedMeasurementJob};
use crate::protocols::swap::{build_swap_test_circuit, SwapMbiJob};
use crate::protocols::{EntropyEstimate, EstimateMeta, Job, Protocol, SamplingBackend};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::state::{bitstring_to_outcome, Counts};
use crate::trotter::decompose;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZneFit {
    #[default]
    Linear,
    Exponential,
}

fn default_factors() -> Vec<usize> {
    vec![1, 3, 5]
}

fn default_twirls() -> usize {
    10
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationConfig {
    #[serde(default = "default_factors")]
    pub zne_factors: Vec<usize>,
    #[serde(default)]
    pub zne_fit: ZneFit,
    #[serde(default = "default_twirls")]
    pub pauli_twirls: usize,
    #[serde(default = "default_true")]
    pub readout_mitigation: bool,
}

impl Default for MitigationConfig {
    fn default() -> Self {
        Self {
            zne_factors: default_factors(),
            zne_fit: ZneFit::Linear,
            pauli_twirls: default_twirls(),
            readout_mitigation: true,
        }
    }
}

impl MitigationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.zne_factors.first() != Some(&1) {
            return Err(Error::InvalidArgument("zne_factors must start at 1".into()));
        }
        if self.zne_factors.iter().any(|f| f % 2 == 0) {
            return Err(Error::InvalidArgument("zne_factors must be odd".into()));
        }
        if self.zne_factors.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "zne_factors must be strictly increasing".into(),
            ));
        }
        if self.pauli_twirls == 0 {
            return Err(Error::InvalidArgument("pauli_twirls must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Circuits run per logical circuit, excluding the raw run.
    pub fn variants_per_circuit(&self) -> usize {
        self.zne_factors.len() * self.pauli_twirls
    }

    pub fn label(&self) -> String {
        let factors: Vec<String> = self.zne_factors.iter().map(|f| f.to_string()).collect();
        let fit = match self.zne_fit {
            ZneFit::Linear => "lin",
            ZneFit::Exponential => "exp",
        };
        format!(
            "zne[{}]{fit}+pt{}{}",
            factors.join(","),
            self.pauli_twirls,
            if self.readout_mitigation { "+ro" } else { "" }
        )
    }
}

/// `U (U† U)^{(factor−1)/2}` followed by the original measurements.
pub fn fold_circuit(circuit: &Circuit, factor: usize) -> Result<Circuit> {
    if factor % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "folding factor {factor} must be odd and positive"
        )));
    }
    let unitary = circuit.unitary_part();
    let inverse = unitary.inverse()?;
    let mut out = unitary.clone();
    for _ in 0..(factor - 1) / 2 {
        out.append(&inverse)?;
        out.append(&unitary)?;
    }
    let measured = circuit.measured_qubits();
    if !measured.is_empty() {
        out.measure(&measured)?;
    }
    Ok(out)
}

/// Result of an extrapolation to zero noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneOutcome {
    pub value: f64,
    pub fit: ZneFit,
    /// The exponential fit was requested but the values changed sign, so a
    /// linear fit was used.
    pub fell_back: bool,
}

/// Least-squares intercept weights: `a = Σ wᵢ yᵢ` for the line `a + b x`.
fn intercept_weights(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    if sxx <= f64::EPSILON * mean.abs().max(1.0) {
        return Err(Error::DegenerateFit("noise factors are not distinct".into()));
    }
    Ok(xs.iter().map(|x| 1.0 / n - mean * (x - mean) / sxx).collect())
}

pub fn zne_extrapolate(points: &[(f64, f64)], fit: ZneFit) -> Result<ZneOutcome> {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let w = intercept_weights(&xs)?;
    let linear = |fell_back| ZneOutcome {
        value: w.iter().zip(points).map(|(w, p)| w * p.1).sum(),
        fit: ZneFit::Linear,
        fell_back,
    };
    match fit {
        ZneFit::Linear => Ok(linear(false)),
        ZneFit::Exponential => {
            let positive = points.iter().all(|p| p.1 > 0.0);
            let negative = points.iter().all(|p| p.1 < 0.0);
            if !(positive || negative) {
                return Ok(linear(true));
            }
            let sign = if positive { 1.0 } else { -1.0 };
            let log_intercept: f64 = w.iter().zip(points).map(|(w, p)| w * (sign * p.1).ln()).sum();
            Ok(ZneOutcome {
                value: sign * log_intercept.exp(),
                fit: ZneFit::Exponential,
                fell_back: false,
            })
        }
    }
}

/// First-order error of a [`zne_extrapolate`] result given per-point errors.
pub fn zne_std_error(points: &[(f64, f64)], sigmas: &[f64], outcome: &ZneOutcome) -> Result<f64> {
    if sigmas.len() != points.len() {
        return Err(Error::LengthMismatch(sigmas.len(), points.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let w = intercept_weights(&xs)?;
    let var: f64 = match outcome.fit {
        ZneFit::Linear => w.iter().zip(sigmas).map(|(w, s)| (w * s).powi(2)).sum(),
        ZneFit::Exponential => {
            outcome.value.powi(2)
                * w.iter()
                    .zip(sigmas)
                    .zip(points)
                    .map(|((w, s), p)| (w * s / p.1).powi(2))
                    .sum::<f64>()
        }
    };
    Ok(var.sqrt())
}

fn push_letter(c: &mut Circuit, q: usize, p: Pauli) -> Result<()> {
    match p {
        Pauli::I => {}
        Pauli::X => {
            c.push(GateKind::X { target: q })?;
        }
        Pauli::Y => {
            c.push(GateKind::Y { target: q })?;
        }
        Pauli::Z => {
            c.push(GateKind::Z { target: q })?;
        }
    }
    Ok(())
}

fn twirl_once(circuit: &Circuit, rng: &mut SimRng) -> Result<Circuit> {
    let n = circuit.n_qubits();
    let mut out = Circuit::new(n)?;
    out.add_global_phase(circuit.global_phase());
    for gate in circuit.gates() {
        match &gate.kind {
            GateKind::PauliRotation { .. } | GateKind::ControlledSwap { .. } => {
                return Err(Error::NotDecomposed(format!("{:?}", gate.kind)));
            }
            kind if is_twirlable(kind) => {
                let qs = gate.qubits();
                let draw = rng.gen_range(0..16usize);
                let before = [Pauli::ALL[draw & 3], Pauli::ALL[draw >> 2]];
                let p = PauliString::single(n, qs[0], before[0])?
                    .multiply(&PauliString::single(n, qs[1], before[1])?)?;
                let after = match kind {
                    GateKind::Cx { control, target } => p.conjugate_cx(*control, *target)?,
                    GateKind::Cz { a, b } => p.conjugate_cz(*a, *b)?,
                    _ => unreachable!(),
                };
                for (q, l) in qs.iter().zip(before) {
                    push_letter(&mut out, *q, l)?;
                }
                out.push(gate.clone())?;
                for &q in &qs {
                    push_letter(&mut out, q, after.letter(q))?;
                }
                // `after` is Hermitian, so its phase is ±1.
                if after.phase() == 2 {
                    out.add_global_phase(std::f64::consts::PI);
                }
            }
            _ => {
                out.push(gate.clone())?;
            }
        }
    }
    Ok(out)
}

/// `n_twirls` logically equivalent copies with every CX/CZ sandwiched
/// between a random Pauli and its image under the gate.
pub fn pauli_twirl(circuit: &Circuit, n_twirls: usize, rng: &mut SimRng) -> Result<Vec<Circuit>> {
    if n_twirls == 0 {
        return Err(Error::InvalidArgument("n_twirls must be ≥ 1".into()));
    }
    (0..n_twirls).map(|_| twirl_once(circuit, rng)).collect()
}

/// Mitigated (quasi-)distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiDistribution {
    pub probs: Vec<f64>,
    pub has_negative: bool,
}

/// Applies the inverse of `⊗ M_j`, `M_j = [[1−p(1|0), p(0|1)], [p(1|0), 1−p(0|1)]]`,
/// to a distribution whose bit `j` was read with `flips[j]`.
pub fn readout_mitigate_probabilities(
    probs: &[f64],
    flips: &[ReadoutError],
) -> Result<QuasiDistribution> {
    if probs.len() != 1 << flips.len() {
        return Err(Error::LengthMismatch(probs.len(), 1 << flips.len()));
    }
    let mut v = probs.to_vec();
    for (j, f) in flips.iter().enumerate() {
        let det = 1.0 - f.p1_given_0 - f.p0_given_1;
        if det.abs() < 1e-12 {
            return Err(Error::SingularConfusion(j));
        }
        let stride = 1 << j;
        for b in 0..v.len() {
            if b & stride == 0 {
                let (o0, o1) = (v[b], v[b | stride]);
                v[b] = ((1.0 - f.p0_given_1) * o0 - f.p0_given_1 * o1) / det;
                v[b | stride] = ((1.0 - f.p1_given_0) * o1 - f.p1_given_0 * o0) / det;
            }
        }
    }
    let has_negative = v.iter().any(|&p| p < 0.0);
    Ok(QuasiDistribution { probs: v, has_negative })
}

/// [`readout_mitigate_probabilities`] on the empirical distribution of `counts`.
pub fn readout_mitigate(counts: &Counts, flips: &[ReadoutError]) -> Result<QuasiDistribution> {
    readout_mitigate_probabilities(&counts_distribution(counts, flips.len())?, flips)
}

fn counts_distribution(counts: &Counts, n_bits: usize) -> Result<Vec<f64>> {
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

/// One circuit of a mitigation expansion. `factor == None` is the raw run:
/// unfolded, untwirled and read out without correction.
#[derive(Clone, Debug, PartialEq)]
pub struct Variant {
    pub factor: Option<usize>,
    pub twirl: usize,
    pub circuit: Circuit,
}

impl Variant {
    pub fn id_suffix(&self) -> String {
        match self.factor {
            None => "raw".into(),
            Some(f) => format!("z{f}/t{}", self.twirl),
        }
    }
}

/// Raw run plus folded-and-twirled copies of a decomposed measured circuit.
pub fn expand_variants(circuit: &Circuit, cfg: &MitigationConfig, seed: u64) -> Result<Vec<Variant>> {
    cfg.validate()?;
    if let Some(g) = circuit.first_composite() {
        return Err(Error::NotDecomposed(format!("{:?}", g.kind)));
    }
    let mut out = vec![Variant {
        factor: None,
        twirl: 0,
        circuit: circuit.clone(),
    }];
    for &f in &cfg.zne_factors {
        let folded = fold_circuit(circuit, f)?;
        let mut rng = rng_from_seed(derive_seed(seed, &format!("twirl/{f}")));
        for (k, c) in pauli_twirl(&folded, cfg.pauli_twirls, &mut rng)?.into_iter().enumerate() {
            out.push(Variant {
                factor: Some(f),
                twirl: k,
                circuit: c,
            });
        }
    }
    Ok(out)
}

/// Per-stage values of one mitigated observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigatedValue {
    pub raw: f64,
    /// Twirl-averaged value at each noise factor.
    pub per_factor: Vec<(usize, f64)>,
    pub zne: ZneOutcome,
}

/// Combines observable values aligned with `variants`.
pub fn combine(cfg: &MitigationConfig, variants: &[Variant], values: &[f64]) -> Result<MitigatedValue> {
    if variants.len() != values.len() {
        return Err(Error::LengthMismatch(variants.len(), values.len()));
    }
    let raw = variants
        .iter()
        .zip(values)
        .find(|(v, _)| v.factor.is_none())
        .map(|(_, x)| *x)
        .ok_or_else(|| Error::InvalidArgument("no raw variant".into()))?;
    let per_factor = cfg
        .zne_factors
        .iter()
        .map(|&f| {
            let vals: Vec<f64> = variants
                .iter()
                .zip(values)
                .filter(|(v, _)| v.factor == Some(f))
                .map(|(_, x)| *x)
                .collect();
            if vals.is_empty() {
                return Err(Error::InvalidArgument(format!("no variants at factor {f}")));
            }
            Ok((f, vals.iter().sum::<f64>() / vals.len() as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = per_factor.iter().map(|&(f, v)| (f as f64, v)).collect();
    let zne = zne_extrapolate(&points, cfg.zne_fit)?;
    Ok(MitigatedValue {
        raw,
        per_factor,
        zne,
    })
}

/// Audit trail of a mitigated entropy estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationTrace {
    pub raw_purity: f64,
    pub per_factor: Vec<(usize, f64)>,
    pub fell_back: bool,
    pub has_negative_quasi: bool,
}

/// A mitigated estimate alongside the unmitigated one from the raw runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigatedEstimate {
    pub estimate: EntropyEstimate,
    pub raw: EntropyEstimate,
    pub trace: MitigationTrace,
}

struct Expanded {
    variants: Vec<Variant>,
    flips: Vec<ReadoutError>,
}

fn expand(circuit: &Circuit, cfg: &MitigationConfig, noise: &NoiseModel, seed: u64) -> Result<Expanded> {
    let circuit = decompose(circuit)?;
    let flips = circuit
        .measured_qubits()
        .iter()
        .map(|&q| noise.readout_for(q))
        .collect();
    Ok(Expanded {
        variants: expand_variants(&circuit, cfg, seed)?,
        flips,
    })
}

/// Distribution used for the observable of one variant.
fn variant_distribution(
    cfg: &MitigationConfig,
    variant: &Variant,
    counts: &Counts,
    flips: &[ReadoutError],
) -> Result<(Vec<f64>, bool)> {
    if cfg.readout_mitigation && variant.factor.is_some() {
        let q = readout_mitigate(counts, flips)?;
        Ok((q.probs, q.has_negative))
    } else {
        Ok((counts_distribution(counts, flips.len())?, false))
    }
}

fn run_expanded(
    groups: &[Expanded],
    tag: &str,
    sampler: &dyn SamplingBackend,
    shots: u64,
) -> Result<Vec<Vec<Counts>>> {
    let jobs: Vec<Job> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, e)| {
            e.variants.iter().map(move |v| Job {
                id: format!("{tag}/c{g}/{}", v.id_suffix()),
                circuit: v.circuit.clone(),
            })
        })
        .collect();
    let mut counts = sampler.run_jobs(&jobs, shots)?.into_iter();
    Ok(groups
        .iter()
        .map(|e| counts.by_ref().take(e.variants.len()).collect())
        .collect())
}

/// Swap test through the full mitigation stack.
///
/// The error bar propagates the pooled binomial error of each factor's
/// twirl average through the extrapolation weights.
pub fn mitigated_swap(
    job: &SwapMbiJob,
    cfg: &MitigationConfig,
    noise: &NoiseModel,
    sampler: &dyn SamplingBackend,
    tag: &str,
    seed: u64,
) -> Result<MitigatedEstimate> {
    let expanded = expand(&build_swap_test_circuit(job)?, cfg, noise, seed)?;
    let counts = run_expanded(std::slice::from_ref(&expanded), tag, sampler, job.shots)?.remove(0);
    let mut negative = false;
    let values = expanded
        .variants
        .iter()
        .zip(&counts)
        .map(|(v, c)| {
            let (probs, neg) = variant_distribution(cfg, v, c, &expanded.flips)?;
            negative |= neg;
            Ok(2.0 * probs[0] - 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let mv = combine(cfg, &expanded.variants, &values)?;

    let l = job.subsystem.len();
    let meta = |shots| EstimateMeta {
        protocol: Protocol::SwapMbi,
        subsystem_size: l,
        shots,
        n_unitaries: None,
    };
    let binomial = |p0: f64, n: f64| {
        let p = ((p0 * n) + 1.0) / (n + 2.0);
        2.0 * (p * (1.0 - p) / n).sqrt()
    };
    let shots = job.shots as f64;
    let raw_sigma = binomial((1.0 + mv.raw) / 2.0, shots);
    let readout_gain = if cfg.readout_mitigation {
        let f = expanded.flips[0];
        1.0 / (1.0 - f.p1_given_0 - f.p0_given_1).abs()
    } else {
        1.0
    };
    let pooled = shots * cfg.pauli_twirls as f64;
    let sigmas: Vec<f64> = mv
        .per_factor
        .iter()
        .map(|&(_, v)| readout_gain * binomial((1.0 + v) / 2.0, pooled))
        .collect();
    let points: Vec<(f64, f64)> = mv.per_factor.iter().map(|&(f, v)| (f as f64, v)).collect();
    let sigma = zne_std_error(&points, &sigmas, &mv.zne)?;
    let total_shots = job.shots * expanded.variants.len() as u64;
    Ok(MitigatedEstimate {
        estimate: EntropyEstimate::from_purity(mv.zne.value, sigma, meta(total_shots)),
        raw: EntropyEstimate::from_purity(mv.raw, raw_sigma, meta(job.shots)),
        trace: MitigationTrace {
            raw_purity: mv.raw,
            per_factor: mv.per_factor,
            fell_back: mv.zne.fell_back,
            has_negative_quasi: negative,
        },
    })
}

/// Randomized measurements with every unitary's circuit mitigated on its
/// own; the mitigated `X_a` are then averaged and bootstrapped.
pub fn mitigated_rm(
    job: &RandomizedMeasurementJob,
    cfg: &MitigationConfig,
    noise: &NoiseModel,
    sampler: &dyn SamplingBackend,
    tag: &str,
) -> Result<MitigatedEstimate> {
    job.validate()?;
    let groups = (0..job.n_unitaries)
        .map(|a| expand(&job.circuit(a)?, cfg, noise, crate::rng::derive_seed_indexed(job.seed, a as u64)))
        .collect::<Result<Vec<_>>>()?;
    let counts = run_expanded(&groups, tag, sampler, job.shots_per_unitary)?;
    let mut negative = false;
    let mut raw_x = Vec::with_capacity(groups.len());
    let mut mitigated_x = Vec::with_capacity(groups.len());
    let mut factor_sums = vec![0.0; cfg.zne_factors.len()];
    let mut fell_back = false;
    for (e, cs) in groups.iter().zip(&counts) {
        let values = e
            .variants
            .iter()
            .zip(cs)
            .map(|(v, c)| {
                let (probs, neg) = variant_distribution(cfg, v, c, &e.flips)?;
                negative |= neg;
                x_from_probabilities(&probs)
            })
            .collect::<Result<Vec<_>>>()?;
        let mv = combine(cfg, &e.variants, &values)?;
        raw_x.push(mv.raw);
        mitigated_x.push(mv.zne.value);
        fell_back |= mv.zne.fell_back;
        for (s, (_, v)) in factor_sums.iter_mut().zip(&mv.per_factor) {
            *s += v;
        }
    }
    let n = groups.len() as f64;
    let l = job.subsystem.len();
    let per_circuit = groups[0].variants.len() as u64;
    let shots = job.shots_per_unitary * job.n_unitaries as u64;
    let boot = derive_seed(job.seed, "bootstrap");
    let estimate = estimate_from_draws(&mitigated_x, l, shots * per_circuit, boot)?;
    let raw = estimate_from_draws(&raw_x, l, shots, boot)?;
    Ok(MitigatedEstimate {
        trace: MitigationTrace {
            raw_purity: raw.purity,
            per_factor: cfg
                .zne_factors
                .iter()
                .zip(factor_sums)
                .map(|(&f, s)| (f, s / n))
                .collect(),
            fell_back,
            has_negative_quasi: negative,
        },
        estimate,
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::apply_noise;
    use crate::state::final_state;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn sample_circuit() -> Circuit {
        let mut c = Circuit::new(3).unwrap();
        c.h(0)
            .unwrap()
            .cx(0, 1)
            .unwrap()
            .rz(1, 0.4)
            .unwrap()
            .cz(1, 2)
            .unwrap()
            .h(2)
            .unwrap()
            .cx(2, 0)
            .unwrap();
        c
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg: MitigationConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, MitigationConfig::default());
        assert_eq!(cfg.variants_per_circuit(), 30);
        for bad in [vec![3, 5], vec![1, 2], vec![1, 5, 3], vec![]] {
            let cfg = MitigationConfig {
                zne_factors: bad,
                ..Default::default()
            };
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn folding() {
        let c = sample_circuit();
        assert_eq!(fold_circuit(&c, 1).unwrap(), c);
        assert!(fold_circuit(&c, 2).is_err());
        assert!(fold_circuit(&c, 0).is_err());
        let f3 = fold_circuit(&c, 3).unwrap();
        assert_eq!(f3.len(), 3 * c.len());
        let d = final_state(&f3).unwrap().distance(&final_state(&c).unwrap()).unwrap();
        assert!(d < 1e-9);
    }

    #[test]
    fn folding_keeps_measurements_last() {
        let mut c = sample_circuit();
        c.measure(&[2, 0]).unwrap();
        let f = fold_circuit(&c, 5).unwrap();
        assert_eq!(f.measured_qubits(), vec![2, 0]);
        assert!(f.gates().last().unwrap().is_measurement());
    }

    #[test]
    fn zne_examples() {
        let line = zne_extrapolate(&[(1.0, 0.8), (3.0, 0.4)], ZneFit::Linear).unwrap();
        assert_abs_diff_eq!(line.value, 1.0, epsilon = 1e-12);
        let flat = zne_extrapolate(&[(1.0, 0.3), (3.0, 0.3), (5.0, 0.3)], ZneFit::Linear).unwrap();
        assert_abs_diff_eq!(flat.value, 0.3, epsilon = 1e-12);
        let pts: Vec<(f64, f64)> = [1.0f64, 3.0, 5.0].iter().map(|&x| (x, (-0.2 * x).exp())).collect();
        let e = zne_extrapolate(&pts, ZneFit::Exponential).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-6);
        assert!(!e.fell_back);
        let mixed = zne_extrapolate(&[(1.0, 0.1), (3.0, -0.1)], ZneFit::Exponential).unwrap();
        assert!(mixed.fell_back);
        assert_eq!(mixed.fit, ZneFit::Linear);
        assert!(matches!(
            zne_extrapolate(&[(1.0, 0.1)], ZneFit::Linear),
            Err(Error::DegenerateFit(_))
        ));
        assert!(zne_extrapolate(&[(3.0, 0.1), (3.0, 0.2)], ZneFit::Linear).is_err());
    }

    #[test]
    fn zne_error_of_two_point_line() {
        let pts = [(1.0, 0.8), (3.0, 0.4)];
        let out = zne_extrapolate(&pts, ZneFit::Linear).unwrap();
        // Weights are 3/2 and −1/2.
        let s = zne_std_error(&pts, &[0.1, 0.1], &out).unwrap();
        assert_abs_diff_eq!(s, 0.1 * (2.25f64 + 0.25).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn identity_twirl_inserts_nothing() {
        let c = sample_circuit();
        // Find a seed whose first two draws are the identity on both gates.
        let seed = (0..200_000u64)
            .find(|&s| {
                let mut rng = rng_from_seed(s);
                (0..3).all(|_| rng.gen_range(0..16usize) == 0)
            })
            .unwrap();
        let mut rng = rng_from_seed(seed);
        let t = pauli_twirl(&c, 1, &mut rng).unwrap().remove(0);
        assert_eq!(t.gates(), c.gates());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn twirls_are_logically_equivalent(seed in any::<u64>()) {
            let c = sample_circuit();
            let target = final_state(&c).unwrap();
            let mut rng = rng_from_seed(seed);
            for t in pauli_twirl(&c, 4, &mut rng).unwrap() {
                prop_assert!(final_state(&t).unwrap().distance(&target).unwrap() < 1e-9);
            }
        }

        #[test]
        fn readout_inversion_roundtrip(
            raw in prop::collection::vec(0.0f64..1.0, 8),
            flips in prop::collection::vec((0.0f64..0.3, 0.0f64..0.3), 3),
        ) {
            let total: f64 = raw.iter().sum::<f64>() + 1e-9;
            let truth: Vec<f64> = raw.iter().map(|p| p / total).collect();
            let flips: Vec<ReadoutError> = flips
                .into_iter()
                .map(|(a, b)| ReadoutError { p1_given_0: a, p0_given_1: b })
                .collect();
            // Forward corruption, bit by bit.
            let mut observed = truth.clone();
            for (j, f) in flips.iter().enumerate() {
                let s = 1 << j;
                for b in 0..8 {
                    if b & s == 0 {
                        let (t0, t1) = (observed[b], observed[b | s]);
                        observed[b] = (1.0 - f.p1_given_0) * t0 + f.p0_given_1 * t1;
                        observed[b | s] = f.p1_given_0 * t0 + (1.0 - f.p0_given_1) * t1;
                    }
                }
            }
            let back = readout_mitigate_probabilities(&observed, &flips).unwrap();
            for (a, b) in back.probs.iter().zip(&truth) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            prop_assert!((back.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn readout_examples() {
        let counts: Counts = [("0".to_string(), 700), ("1".to_string(), 300)].into();
        let same = readout_mitigate(&counts, &[ReadoutError::default()]).unwrap();
        assert_eq!(same.probs, vec![0.7, 0.3]);
        assert!(matches!(
            readout_mitigate(&counts, &[ReadoutError::symmetric(0.5)]),
            Err(Error::SingularConfusion(0))
        ));

        let mut c = Circuit::new(1).unwrap();
        c.measure_all().unwrap();
        let model = NoiseModel {
            readout: vec![ReadoutError::symmetric(0.1)],
            ..Default::default()
        };
        let noisy = apply_noise(&c, &model, 100_000, 8, 1).unwrap();
        let fixed = readout_mitigate(&noisy, &model.readout).unwrap();
        assert!((fixed.probs[0] - 1.0).abs() < 0.03);
        assert!(fixed.probs[1].abs() < 0.03);
    }

    #[test]
    fn negative_quasi_probabilities_are_flagged() {
        let counts: Counts = [("0".to_string(), 1000)].into();
        let q = readout_mitigate(&counts, &[ReadoutError::symmetric(0.1)]).unwrap();
        assert!(q.has_negative);
        assert_abs_diff_eq!(q.probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expansion_layout() {
        let mut c = sample_circuit();
        c.measure_all().unwrap();
        let cfg = MitigationConfig::default();
        let vs = expand_variants(&c, &cfg, 1).unwrap();
        assert_eq!(vs.len(), 31);
        assert_eq!(vs[0].circuit, c);
        assert_eq!(vs[1].id_suffix(), "z1/t0");
        assert_eq!(vs[30].id_suffix(), "z5/t9");
        let values: Vec<f64> = vs
            .iter()
            .map(|v| match v.factor {
                None => 0.0,
                Some(f) => 1.0 - 0.1 * f as f64,
            })
            .collect();
        let mv = combine(&cfg, &vs, &values).unwrap();
        assert_abs_diff_eq!(mv.zne.value, 1.0, epsilon = 1e-12);
        assert_eq!(mv.per_factor.len(), 3);
    }

    #[test]
    fn folding_amplifies_depolarizing_damage() {
        let mut c = sample_circuit();
        c.measure_all().unwrap();
        let ideal = final_state(&c).unwrap().probabilities(&[0, 1, 2]).unwrap();
        let model = NoiseModel {
            two_qubit_depolarizing: 0.05,
            ..Default::default()
        };
        let tvd = |f: usize| {
            let counts = apply_noise(&fold_circuit(&c, f).unwrap(), &model, 200_000, 2, 4000).unwrap();
            let p = counts_distribution(&counts, 3).unwrap();
            p.iter().zip(&ideal).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
        };
        assert!(tvd(3) > tvd(1));
    }
}
