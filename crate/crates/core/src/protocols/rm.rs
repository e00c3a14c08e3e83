//! Randomized local measurements.
//!
//! For each of `N_U` draws, an independent Haar-random single-qubit unitary
//! is applied to every subsystem qubit before a computational-basis
//! measurement. Each draw yields
//! `X_a = 2^L Σ_{s,s'} (−2)^{−D(s,s')} P(s) P(s')` with `D` the Hamming
//! distance, and the mean of the `X_a` estimates `Tr ρ_L²`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Backend, EntropyEstimate, EstimateMeta, Job, Protocol};
use crate::circuit::{Circuit, Mat2};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derive_seed_indexed, rng_from_seed, standard_normal, SimRng};
use crate::state::{bitstring_to_outcome, final_state, Counts};

/// How `P(s)` enters `X_a`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RmEstimator {
    /// `P(s) = n(s) / shots`.
    #[default]
    PlugIn,
    /// Pairs of distinct shots only; removes the `O(2^L / shots)` upward bias.
    Unbiased,
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomizedMeasurementJob {
    pub base_circuit: Circuit,
    pub subsystem: Vec<usize>,
    pub n_unitaries: usize,
    pub shots_per_unitary: u64,
    pub seed: u64,
    #[serde(default)]
    pub estimator: RmEstimator,
}

impl RandomizedMeasurementJob {
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
        if self.n_unitaries < 2 {
            return Err(Error::InvalidArgument("n_unitaries must be ≥ 2".into()));
        }
        let min_shots = match self.estimator {
            RmEstimator::PlugIn => 1,
            RmEstimator::Unbiased => 2,
        };
        if self.shots_per_unitary < min_shots {
            return Err(Error::InvalidArgument(format!(
                "shots_per_unitary must be ≥ {min_shots}"
            )));
        }
        if self.base_circuit.classical_bits() > 0 {
            return Err(Error::InvalidCircuit(
                "base circuit must not contain measurements".into(),
            ));
        }
        Ok(())
    }

    /// The local unitaries of draw `index`, one per subsystem qubit.
    pub fn unitaries(&self, index: usize) -> Vec<Mat2> {
        let mut rng = rng_from_seed(derive_seed_indexed(self.seed, index as u64));
        self.subsystem.iter().map(|_| sample_cue_unitary(&mut rng)).collect()
    }

    /// Base circuit, the local unitaries of draw `index` and a subsystem
    /// measurement.
    pub fn circuit(&self, index: usize) -> Result<Circuit> {
        let mut c = self.base_circuit.clone();
        for (&q, u) in self.subsystem.iter().zip(self.unitaries(index)) {
            c.unitary(q, u)?;
        }
        c.measure(&self.subsystem)?;
        Ok(c)
    }
}

/// Haar-random element of SU(2): a uniformly random unit quaternion
/// `(a, b, c, d)` mapped to `[[a+ib, c+id], [−c+id, a−ib]]`.
pub fn sample_cue_unitary(rng: &mut SimRng) -> Mat2 {
    let mut q = [0.0; 4];
    let norm = loop {
        for x in q.iter_mut() {
            *x = standard_normal(rng);
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            break n;
        }
    };
    let [a, b, c, d] = q.map(|x| x / norm);
    [
        [Complex64::new(a, b), Complex64::new(c, d)],
        [Complex64::new(-c, d), Complex64::new(a, -b)],
    ]
}

pub fn hamming_distance(s: &str, s_prime: &str) -> Result<usize> {
    if s.len() != s_prime.len() {
        return Err(Error::LengthMismatch(s.len(), s_prime.len()));
    }
    Ok(s.bytes().zip(s_prime.bytes()).filter(|(a, b)| a != b).count())
}

/// Applies the single-bit kernel `[[1, −½], [−½, 1]]` on every bit, which is
/// `v(s) = Σ_{s'} (−2)^{−D(s,s')} w(s')`.
fn hamming_kernel(w: &[f64]) -> Vec<f64> {
    let mut v = w.to_vec();
    let mut stride = 1;
    while stride < v.len() {
        for b in 0..v.len() {
            if b & stride == 0 {
                let (p0, p1) = (v[b], v[b | stride]);
                v[b] = p0 - 0.5 * p1;
                v[b | stride] = p1 - 0.5 * p0;
            }
        }
        stride <<= 1;
    }
    v
}

fn check_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "distribution length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// `X_a` from a (quasi-)probability vector over `2^L` outcomes.
pub fn x_from_probabilities(probs: &[f64]) -> Result<f64> {
    let l = check_len(probs.len())?;
    let v = hamming_kernel(probs);
    Ok((1u64 << l) as f64 * probs.iter().zip(&v).map(|(p, k)| p * k).sum::<f64>())
}

/// `X_a` from raw outcome tallies over `2^L` outcomes.
pub fn x_from_tallies(tallies: &[f64], estimator: RmEstimator) -> Result<f64> {
    let l = check_len(tallies.len())?;
    let total: f64 = tallies.iter().sum();
    match estimator {
        RmEstimator::PlugIn => {
            if total <= 0.0 {
                return Err(Error::InvalidArgument("empty counts".into()));
            }
            let probs: Vec<f64> = tallies.iter().map(|n| n / total).collect();
            x_from_probabilities(&probs)
        }
        RmEstimator::Unbiased => {
            if total < 2.0 {
                return Err(Error::InvalidArgument(
                    "the unbiased estimator needs at least two shots".into(),
                ));
            }
            let v = hamming_kernel(tallies);
            let pairs: f64 = tallies.iter().zip(&v).map(|(n, k)| n * k).sum::<f64>() - total;
            Ok((1u64 << l) as f64 * pairs / (total * (total - 1.0)))
        }
    }
}

/// `X_a` from bitstring counts over `n_bits` measured qubits.
pub fn x_from_counts(counts: &Counts, n_bits: usize, estimator: RmEstimator) -> Result<f64> {
    let mut tallies = vec![0.0; 1 << n_bits];
    for (bits, &n) in counts {
        if bits.len() != n_bits {
            return Err(Error::LengthMismatch(bits.len(), n_bits));
        }
        tallies[bitstring_to_outcome(bits)?] += n as f64;
    }
    x_from_tallies(&tallies, estimator)
}

/// Standard deviation of the mean of `xs` over bootstrap resamples.
pub fn bootstrap_std_error(xs: &[f64], resamples: usize, seed: u64) -> f64 {
    if xs.len() < 2 || resamples < 2 {
        return 0.0;
    }
    let mut rng = rng_from_seed(seed);
    let n = xs.len();
    let means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| xs[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / resamples as f64;
    (means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64).sqrt()
}

/// Combines per-draw values into an estimate with a bootstrap error.
pub fn estimate_from_draws(
    xs: &[f64],
    subsystem_size: usize,
    shots: u64,
    bootstrap_seed: u64,
) -> Result<EntropyEstimate> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("need at least two draws".into()));
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sigma = bootstrap_std_error(xs, BOOTSTRAP_RESAMPLES, bootstrap_seed);
    Ok(EntropyEstimate::from_purity(
        mean,
        sigma,
        EstimateMeta {
            protocol: Protocol::Rm,
            subsystem_size,
            shots,
            n_unitaries: Some(xs.len()),
        },
    ))
}

/// Per-draw `X_a` values of `job`.
pub fn rm_draws(job: &RandomizedMeasurementJob, backend: Backend<'_>) -> Result<Vec<f64>> {
    job.validate()?;
    match backend {
        Backend::Exact => {
            let base = final_state(&job.base_circuit)?;
            (0..job.n_unitaries)
                .into_par_iter()
                .map(|a| {
                    let mut s = base.clone();
                    for (&q, u) in job.subsystem.iter().zip(job.unitaries(a)) {
                        s.apply_single(q, &u)?;
                    }
                    x_from_probabilities(&s.probabilities(&job.subsystem)?)
                })
                .collect()
        }
        Backend::Sampled { sampler, tag } => {
            let jobs = (0..job.n_unitaries)
                .map(|a| {
                    Ok(Job {
                        id: format!("{tag}/rm/u{a}"),
                        circuit: job.circuit(a)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            sampler
                .run_jobs(&jobs, job.shots_per_unitary)?
                .iter()
                .map(|c| x_from_counts(c, job.subsystem.len(), job.estimator))
                .collect()
        }
    }
}

pub fn run_randomized_measurement(
    job: &RandomizedMeasurementJob,
    backend: Backend<'_>,
) -> Result<EntropyEstimate> {
    let xs = rm_draws(job, backend)?;
    let shots = match backend {
        Backend::Exact => 0,
        Backend::Sampled { .. } => job.shots_per_unitary * job.n_unitaries as u64,
    };
    estimate_from_draws(
        &xs,
        job.subsystem.len(),
        shots,
        derive_seed(job.seed, "bootstrap"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitarity_deviation;
    use crate::exact::{purity, reduced_density_matrix};
    use crate::protocols::IdealSampler;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2).unwrap();
        c.h(0).unwrap().cx(0, 1).unwrap();
        c
    }

    fn rm_job(base: Circuit, subsystem: Vec<usize>, n_unitaries: usize) -> RandomizedMeasurementJob {
        RandomizedMeasurementJob {
            base_circuit: base,
            subsystem,
            n_unitaries,
            shots_per_unitary: 1024,
            seed: 11,
            estimator: RmEstimator::PlugIn,
        }
    }

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            assert!(unitarity_deviation(&sample_cue_unitary(&mut rng)) < 1e-12);
        }
    }

    #[test]
    fn haar_moments() {
        let mut rng = rng_from_seed(2);
        let draws = 100_000;
        let mut first = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut fourth = 0.0;
        for _ in 0..draws {
            let u = sample_cue_unitary(&mut rng);
            let col = [u[0][0], u[1][0]];
            for i in 0..2 {
                for j in 0..2 {
                    first[i][j] += col[i] * col[j].conj();
                }
            }
            fourth += u[0][0].norm_sqr().powi(2);
        }
        for (i, row) in first.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 0.5 } else { 0.0 };
                assert!((v / draws as f64 - target).norm() < 0.01, "{i}{j}: {v}");
            }
        }
        assert!((fourth / draws as f64 - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance("010", "011").unwrap(), 1);
        assert_eq!(hamming_distance("0110", "0110").unwrap(), 0);
        assert_eq!(hamming_distance("000", "111").unwrap(), 3);
        assert!(hamming_distance("01", "011").is_err());
    }

    #[test]
    fn x_examples() {
        assert_abs_diff_eq!(x_from_probabilities(&[1.0, 0.0]).unwrap(), 2.0);
        assert_abs_diff_eq!(x_from_probabilities(&[0.5, 0.5]).unwrap(), 0.5);
        assert!(x_from_probabilities(&[0.5, 0.25, 0.25]).is_err());
    }

    /// Direct double sum over bitstring pairs.
    fn x_by_pairs(probs: &[f64], l: usize) -> f64 {
        let mut acc = 0.0;
        for (s, ps) in probs.iter().enumerate() {
            for (t, pt) in probs.iter().enumerate() {
                let d = (s ^ t).count_ones() as i32;
                acc += (-2.0f64).powi(-d) * ps * pt;
            }
        }
        (1 << l) as f64 * acc
    }

    fn arb_distribution() -> impl Strategy<Value = Vec<f64>> {
        (1usize..5).prop_flat_map(|l| {
            prop::collection::vec(0.0f64..1.0, 1 << l).prop_map(|w| {
                let total: f64 = w.iter().sum::<f64>() + 1e-9;
                w.into_iter().map(|x| x / total).collect()
            })
        })
    }

    proptest! {
        #[test]
        fn kernel_matches_pair_sum(probs in arb_distribution()) {
            let l = probs.len().trailing_zeros() as usize;
            let fast = x_from_probabilities(&probs).unwrap();
            prop_assert!((fast - x_by_pairs(&probs, l)).abs() < 1e-12);
        }

        #[test]
        fn x_is_invariant_under_bit_relabeling(probs in arb_distribution(), seed in 0u64..100) {
            let l = probs.len().trailing_zeros() as usize;
            let mut perm: Vec<usize> = (0..l).collect();
            let mut rng = rng_from_seed(seed);
            for i in (1..l).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let mut permuted = vec![0.0; probs.len()];
            for (s, p) in probs.iter().enumerate() {
                let t = (0..l).fold(0, |acc, j| acc | ((s >> j & 1) << perm[j]));
                permuted[t] = *p;
            }
            let a = x_from_probabilities(&probs).unwrap();
            let b = x_from_probabilities(&permuted).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unbiased_drops_self_pairs() {
        // One shot per outcome of a single bit: no equal pairs remain, only
        // the two ordered cross pairs weighted by −½.
        let x = x_from_tallies(&[1.0, 1.0], RmEstimator::Unbiased).unwrap();
        assert_abs_diff_eq!(x, 2.0 * (-0.5 * 2.0) / 2.0);
        let plug = x_from_tallies(&[1.0, 1.0], RmEstimator::PlugIn).unwrap();
        assert_abs_diff_eq!(plug, 0.5);
        assert!(x_from_tallies(&[1.0, 0.0], RmEstimator::Unbiased).is_err());
    }

    #[test]
    fn exact_mode_converges_for_pure_and_mixed_qubits() {
        let mut plus = Circuit::new(2).unwrap();
        plus.h(0).unwrap();
        let pure = run_randomized_measurement(&rm_job(plus, vec![0], 10_000), Backend::Exact).unwrap();
        assert!((pure.purity - 1.0).abs() < 0.02, "{}", pure.purity);
        let mixed = run_randomized_measurement(&rm_job(bell(), vec![0], 10_000), Backend::Exact).unwrap();
        assert!((mixed.purity - 0.5).abs() < 0.02, "{}", mixed.purity);
        assert_eq!(mixed.meta.shots, 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let j = rm_job(bell(), vec![0], 20);
        let sampler = IdealSampler { master_seed: 3 };
        let b = Backend::Sampled { sampler: &sampler, tag: "x" };
        let a = run_randomized_measurement(&j, b).unwrap();
        assert_eq!(a, run_randomized_measurement(&j, b).unwrap());
        assert_eq!(a.meta.shots, 20 * 1024);
    }

    #[test]
    fn unbiased_sampled_mean_tracks_exact_purity() {
        let mut base = Circuit::new(3).unwrap();
        base.h(0).unwrap().cx(0, 1).unwrap().h(2).unwrap().rz(1, 0.7).unwrap().cx(1, 2).unwrap();
        let subsystem = vec![0, 1];
        let exact = purity(&reduced_density_matrix(&final_state(&base).unwrap(), &subsystem).unwrap());
        let mut j = rm_job(base, subsystem, 400);
        j.estimator = RmEstimator::Unbiased;
        let sampler = IdealSampler { master_seed: 9 };
        let est = run_randomized_measurement(&j, Backend::Sampled { sampler: &sampler, tag: "u" }).unwrap();
        assert!((est.purity - exact).abs() < 3.0 * est.purity_std_error, "{} vs {exact}", est.purity);
    }

    #[test]
    fn validation() {
        assert!(rm_job(bell(), vec![0], 1).validate().is_err());
        assert!(rm_job(bell(), vec![], 10).validate().is_err());
        let mut j = rm_job(bell(), vec![0], 10);
        j.shots_per_unitary = 1;
        j.estimator = RmEstimator::Unbiased;
        assert!(j.validate().is_err());
    }

    #[test]
    fn bootstrap_matches_standard_error_of_mean() {
        let mut rng = rng_from_seed(5);
        let xs: Vec<f64> = (0..400).map(|_| standard_normal(&mut rng)).collect();
        let se = bootstrap_std_error(&xs, 2000, 1);
        assert!((se - 0.05).abs() < 0.01, "{se}");
    }
}
