//! The q-body Majorana SYK Hamiltonian and its Pauli-sum form.
//!
//! `H = i^{q/2} Σ_{i1<…<iq} J_{i1…iq} χ_{i1}…χ_{iq}` with i.i.d. Gaussian
//! couplings of variance `(q−1)! 𝒥² / N^{q−1}`. Each Majorana product is
//! mapped through Jordan–Wigner, so every term becomes `a_n P_n` with a real
//! `a_n = ±J` and a phase-free Pauli string.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{majorana_to_pauli, PauliString, PauliSum, PauliTerm};
use crate::rng::{rng_from_seed, standard_normal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SykParams {
    /// Number of Majorana fermions `N`.
    #[serde(default = "default_n_majorana")]
    pub n_majorana: usize,
    /// Interaction order `q`.
    #[serde(default = "default_q")]
    pub q: usize,
    /// Overall energy scale `𝒥`.
    #[serde(default = "default_j_scale")]
    pub j_scale: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_n_majorana() -> usize {
    6
}
fn default_q() -> usize {
    4
}
fn default_j_scale() -> f64 {
    1.0
}

impl Default for SykParams {
    fn default() -> Self {
        Self {
            n_majorana: default_n_majorana(),
            q: default_q(),
            j_scale: default_j_scale(),
            seed: 0,
        }
    }
}

impl SykParams {
    pub fn new(n_majorana: usize, q: usize, j_scale: f64, seed: u64) -> Result<Self> {
        let p = Self {
            n_majorana,
            q,
            j_scale,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n_majorana == 0 || self.n_majorana % 2 != 0 {
            return bad(format!(
                "n_majorana must be even and positive, got {}",
                self.n_majorana
            ));
        }
        if self.q == 0 || self.q % 2 != 0 {
            return bad(format!("q must be even and positive, got {}", self.q));
        }
        if self.q > self.n_majorana {
            return bad(format!(
                "q = {} exceeds n_majorana = {}",
                self.q, self.n_majorana
            ));
        }
        if !(self.j_scale > 0.0 && self.j_scale.is_finite()) {
            return bad(format!("j_scale must be positive, got {}", self.j_scale));
        }
        if self.n_majorana > 2 * crate::pauli::MAX_PAULI_QUBITS {
            return bad(format!("n_majorana = {} is too large", self.n_majorana));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_majorana / 2
    }

    /// Coupling variance `(q−1)! 𝒥² / N^{q−1}`.
    pub fn coupling_variance(&self) -> f64 {
        let fact: f64 = (1..self.q).map(|k| k as f64).product();
        fact * self.j_scale * self.j_scale / (self.n_majorana as f64).powi(self.q as i32 - 1)
    }

    /// Number of terms `C(N, q)`.
    pub fn term_count(&self) -> usize {
        binomial(self.n_majorana, self.q)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All strictly increasing `k`-tuples from `1..=n`, lexicographic.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 || k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - 1 - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// One Gaussian coupling per index tuple, drawn in lexicographic order from
/// the stream seeded by `params.seed`.
pub fn sample_couplings(params: &SykParams) -> Result<BTreeMap<Vec<usize>, f64>> {
    params.validate()?;
    let sigma = params.coupling_variance().sqrt();
    let mut rng = rng_from_seed(params.seed);
    Ok(index_tuples(params.n_majorana, params.q)
        .into_iter()
        .map(|t| (t, sigma * standard_normal(&mut rng)))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykTerm {
    /// 1-based Majorana indices of the product.
    pub indices: Vec<usize>,
    pub coefficient: f64,
    pub pauli: PauliString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SykHamiltonian {
    pub params: SykParams,
    pub n_qubits: usize,
    pub terms: Vec<SykTerm>,
}

/// `i^{q/2} χ_{i1}…χ_{iq}` as a phase-free Pauli string and a sign.
pub fn majorana_product(indices: &[usize], n_qubits: usize) -> Result<(f64, PauliString)> {
    let mut prod = PauliString::identity(n_qubits)?;
    for &i in indices {
        prod = prod.multiply(&majorana_to_pauli(i, n_qubits)?)?;
    }
    let half = (indices.len() / 2) as u8;
    let phase = (prod.phase() + half) & 3;
    let sign = match phase {
        0 => 1.0,
        2 => -1.0,
        _ => {
            return Err(Error::ImaginaryTerm {
                indices: indices.to_vec(),
            })
        }
    };
    Ok((sign, prod.with_phase(0)))
}

pub fn build_hamiltonian(params: &SykParams) -> Result<SykHamiltonian> {
    params.validate()?;
    let n_qubits = params.n_qubits();
    if n_qubits < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least two qubits, got N/2 = {n_qubits}"
        )));
    }
    let couplings = sample_couplings(params)?;
    let terms = couplings
        .into_iter()
        .map(|(indices, j)| {
            let (sign, pauli) = majorana_product(&indices, n_qubits)?;
            Ok(SykTerm {
                indices,
                coefficient: sign * j,
                pauli,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SykHamiltonian {
        params: params.clone(),
        n_qubits,
        terms,
    })
}

impl SykHamiltonian {
    pub fn pauli_sum(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coefficient: t.coefficient,
                    pauli: t.pauli,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: Self =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        h.params.validate()?;
        for t in &h.terms {
            if t.pauli.n_qubits() != h.n_qubits || t.pauli.phase() != 0 {
                return Err(Error::Serialization(format!(
                    "term {:?} has an invalid Pauli string {}",
                    t.indices, t.pauli
                )));
            }
        }
        Ok(h)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMatrix;
    use num_complex::Complex64;

    fn params(seed: u64) -> SykParams {
        SykParams::new(6, 4, 1.0, seed).unwrap()
    }

    #[test]
    fn variance_formula() {
        let p = params(0);
        assert!((p.coupling_variance() - 1.0 / 36.0).abs() < 1e-15);
        assert_eq!(p.term_count(), 15);
        assert_eq!(sample_couplings(&p).unwrap().len(), 15);
    }

    #[test]
    fn couplings_are_seed_deterministic() {
        assert_eq!(
            sample_couplings(&params(5)).unwrap(),
            sample_couplings(&params(5)).unwrap()
        );
        assert_ne!(
            sample_couplings(&params(5)).unwrap(),
            sample_couplings(&params(6)).unwrap()
        );
    }

    #[test]
    fn parameter_validation() {
        assert!(SykParams::new(5, 4, 1.0, 0).is_err());
        assert!(SykParams::new(6, 3, 1.0, 0).is_err());
        assert!(SykParams::new(4, 6, 1.0, 0).is_err());
        assert!(SykParams::new(6, 4, 0.0, 0).is_err());
        assert!(build_hamiltonian(&SykParams::new(2, 2, 1.0, 0).unwrap()).is_err());
    }

    #[test]
    fn first_tuple_is_zz() {
        let h = build_hamiltonian(&params(3)).unwrap();
        let j = sample_couplings(&params(3)).unwrap()[&vec![1, 2, 3, 4]];
        assert_eq!(h.terms[0].indices, vec![1, 2, 3, 4]);
        assert_eq!(h.terms[0].pauli.to_string(), "+ZZI");
        assert_eq!(h.terms[0].coefficient, j);
    }

    #[test]
    fn term_supports_are_two_or_three_qubits() {
        let h = build_hamiltonian(&params(1)).unwrap();
        assert_eq!(h.terms.len(), 15);
        for t in &h.terms {
            assert!(matches!(t.pauli.weight(), 2 | 3), "{}", t.pauli);
            assert_eq!(t.pauli.phase(), 0);
        }
    }

    #[test]
    fn tuples_are_lexicographic() {
        let t = index_tuples(5, 3);
        assert_eq!(t.len(), 10);
        assert_eq!(t[0], vec![1, 2, 3]);
        assert_eq!(t[9], vec![3, 4, 5]);
        let mut sorted = t.clone();
        sorted.sort();
        assert_eq!(t, sorted);
    }

    fn majorana_matrix(i: usize, n: usize) -> CMatrix {
        // Z…Z X or Z…Z Y built from Kronecker products.
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let im = Complex64::new(0.0, 1.0);
        let x = CMatrix::from_row_slice(2, 2, &[o, l, l, o]);
        let y = CMatrix::from_row_slice(2, 2, &[o, -im, im, o]);
        let z = CMatrix::from_row_slice(2, 2, &[l, o, o, -l]);
        let site = (i - 1) / 2;
        let mut m = CMatrix::identity(1, 1);
        for q in 0..n {
            let f = if q < site {
                z.clone()
            } else if q == site {
                if i % 2 == 1 {
                    x.clone()
                } else {
                    y.clone()
                }
            } else {
                CMatrix::identity(2, 2)
            };
            m = f.kronecker(&m);
        }
        m
    }

    #[test]
    fn dense_equivalence_with_direct_majorana_products() {
        for seed in 0..5 {
            let p = params(seed);
            let h = build_hamiltonian(&p).unwrap();
            let couplings = sample_couplings(&p).unwrap();
            let dim = 8;
            let mut direct = CMatrix::zeros(dim, dim);
            for (idx, j) in &couplings {
                let mut prod = CMatrix::identity(dim, dim);
                for &i in idx {
                    prod *= majorana_matrix(i, 3);
                }
                // i^{q/2} = i^2 = -1
                direct += prod * Complex64::new(-j, 0.0);
            }
            let m = h.pauli_sum().to_matrix().unwrap();
            assert!((&m - &direct).iter().all(|c| c.norm() < 1e-13));
            assert!((&m - m.adjoint()).iter().all(|c| c.norm() < 1e-14));
            assert!(m.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn imaginary_phase_always_cancels_for_q2() {
        let p = SykParams::new(8, 2, 1.0, 1).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.terms.len(), 28);
    }

    #[test]
    fn pooled_coupling_variance() {
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut n = 0usize;
        for seed in 0..10_000 {
            for j in sample_couplings(&params(seed)).unwrap().values() {
                sum += j;
                sum2 += j * j;
                n += 1;
            }
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        let want = 1.0 / 36.0;
        assert!((var - want).abs() / want < 0.05, "variance {var}");
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let h = build_hamiltonian(&params(42)).unwrap();
        let back = SykHamiltonian::from_json(&h.to_json().unwrap()).unwrap();
        assert_eq!(back, h);
        for (a, b) in h.terms.iter().zip(&back.terms) {
            assert_eq!(a.coefficient.to_bits(), b.coefficient.to_bits());
        }
    }
}
