//! Pauli strings in symplectic form.
//!
//! A [`PauliString`] on `n` qubits stores an X-bitmask, a Z-bitmask and a
//! phase exponent `k` so that the operator is `i^k · P_0 ⊗ P_1 ⊗ …` where the
//! letter on qubit `j` is `I` (x=0,z=0), `X` (1,0), `Z` (0,1) or `Y` (1,1).
//! Qubits are 0-based; in text form the leftmost letter is qubit 0.
//!
//! Majorana operators use 1-based indices: `χ_{2i-1} → Z…Z X_i` and
//! `χ_{2i} → Z…Z Y_i`, where the 1-based qubit `i` is internal
//! qubit `i - 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::CMatrix;

/// Maximum register width of a [`PauliString`] (one bit per qubit in a `u64`).
pub const MAX_PAULI_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The 2×2 matrix `[[m00, m01], [m10, m11]]`.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// `i^k` as a complex number.
pub fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// An `n`-qubit Pauli operator `i^phase · ⊗_j P_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::from_bits(n_qubits, 0, 0, 0)
    }

    /// Builds a string from raw bitmasks; bits at or above `n_qubits` are rejected.
    pub fn from_bits(n_qubits: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_PAULI_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "Pauli string width must be in 1..={MAX_PAULI_QUBITS}, got {n_qubits}"
            )));
        }
        let mask = low_mask(n_qubits);
        if (x | z) & !mask != 0 {
            let qubit = 63 - ((x | z) & !mask).leading_zeros() as usize;
            return Err(Error::QubitOutOfRange { qubit, n_qubits });
        }
        Ok(Self {
            n_qubits,
            x,
            z,
            phase: phase & 3,
        })
    }

    /// Builds a string from letters, `letters[j]` acting on qubit `j`.
    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (q, p) in letters.iter().enumerate().take(MAX_PAULI_QUBITS) {
            let (xb, zb) = p.bits();
            x |= (xb as u64) << q;
            z |= (zb as u64) << q;
        }
        Self::from_bits(letters.len(), x, z, 0)
    }

    /// A single letter on qubit `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits });
        }
        let (xb, zb) = letter.bits();
        Self::from_bits(n_qubits, (xb as u64) << qubit, (zb as u64) << qubit, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Phase exponent `k` of the prefactor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(self, phase: u8) -> Self {
        Self {
            phase: phase & 3,
            ..self
        }
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    /// Number of qubits with a non-identity letter.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits with a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        let s = self.x | self.z;
        (0..self.n_qubits).filter(|q| (s >> q) & 1 == 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Hermitian iff the prefactor is real (`±1`).
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Operator product `self · other`, tracking the phase exactly.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        // Per-qubit phase of σ_a σ_b, counted in powers of i. Only qubits where
        // both factors are non-identity contribute.
        let mut k = self.phase as i32 + other.phase as i32;
        let both = (self.x | self.z) & (other.x | other.z);
        let mut bits = both;
        while bits != 0 {
            let q = bits.trailing_zeros();
            bits &= bits - 1;
            let x1 = ((self.x >> q) & 1) as i32;
            let z1 = ((self.z >> q) & 1) as i32;
            let x2 = ((other.x >> q) & 1) as i32;
            let z2 = ((other.z >> q) & 1) as i32;
            k += match (x1, z1) {
                (1, 1) => z2 - x2,
                (1, 0) => z2 * (2 * x2 - 1),
                (0, 1) => x2 * (1 - 2 * z2),
                _ => 0,
            };
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: k.rem_euclid(4) as u8,
        })
    }

    /// True iff the symplectic inner product is even.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_width(other)?;
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(s % 2 == 0)
    }

    /// Action on a computational basis state: `P|b⟩ = c·|b ⊕ x⟩`; returns `(b ⊕ x, c)`.
    #[inline]
    pub fn apply_to_basis(&self, b: usize) -> (usize, Complex64) {
        let k = self.phase as u32
            + (self.x & self.z).count_ones()
            + 2 * ((b as u64) & self.z).count_ones();
        (b ^ self.x as usize, i_pow((k & 3) as u8))
    }

    /// Dense `2^n × 2^n` matrix with basis index `Σ b_q 2^q`.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n_qubits > 12 {
            return Err(Error::DimensionTooLarge(self.n_qubits));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (row, c) = self.apply_to_basis(b);
            m[(row, b)] = c;
        }
        Ok(m)
    }

    /// Embeds the string into a wider register starting at `offset`.
    pub fn embed(&self, n_qubits: usize, offset: usize) -> Result<Self> {
        if offset + self.n_qubits > n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: offset + self.n_qubits - 1,
                n_qubits,
            });
        }
        Self::from_bits(n_qubits, self.x << offset, self.z << offset, self.phase)
    }

    /// `H P H†` for a Hadamard on `qubit`.
    pub fn conjugate_h(&self, qubit: usize) -> Result<Self> {
        self.check_qubit(qubit)?;
        let xa = (self.x >> qubit) & 1;
        let za = (self.z >> qubit) & 1;
        let flip = (xa & za) as u8;
        let mut out = *self;
        out.x = (self.x & !(1 << qubit)) | (za << qubit);
        out.z = (self.z & !(1 << qubit)) | (xa << qubit);
        out.phase = (self.phase + 2 * flip) & 3;
        Ok(out)
    }

    /// `CX P CX†` for a CNOT with the given control and target.
    pub fn conjugate_cx(&self, control: usize, target: usize) -> Result<Self> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidGate("CX control equals target".into()));
        }
        let xa = (self.x >> control) & 1;
        let za = (self.z >> control) & 1;
        let xb = (self.x >> target) & 1;
        let zb = (self.z >> target) & 1;
        let flip = (xa & zb & (xb ^ za ^ 1)) as u8;
        let mut out = *self;
        out.x ^= xa << target;
        out.z ^= zb << control;
        out.phase = (self.phase + 2 * flip) & 3;
        Ok(out)
    }

    /// `CZ P CZ†`.
    pub fn conjugate_cz(&self, a: usize, b: usize) -> Result<Self> {
        self.conjugate_h(b)?.conjugate_cx(a, b)?.conjugate_h(b)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Jordan–Wigner image of the Majorana operator `χ_index` (1-based).
///
/// Odd `index = 2i−1` maps to `Z…Z X` with the `X` on internal qubit `i−1`;
/// even `index = 2i` maps to `Z…Z Y`. The images square to the identity.
pub fn majorana_to_pauli(index: usize, n_qubits: usize) -> Result<PauliString> {
    let max = 2 * n_qubits;
    if index == 0 || index > max {
        return Err(Error::MajoranaIndex { index, max });
    }
    let site = (index - 1) / 2;
    let chain = low_mask(site);
    let x = 1u64 << site;
    let z = if index % 2 == 0 { chain | x } else { chain };
    PauliString::from_bits(n_qubits, x, z, 0)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sign, imag) = match self.phase {
            0 => ('+', ""),
            1 => ('+', "i"),
            2 => ('-', ""),
            _ => ('-', "i"),
        };
        write!(f, "{sign}{imag}")?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `±[i]XYZI…`; the sign is optional and defaults to `+`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::PauliParse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let mut rest = s;
        let mut phase = 0u8;
        if let Some(r) = rest.strip_prefix('-') {
            phase = 2;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            rest = r;
        }
        if rest.is_empty() {
            return Err(err("no Pauli letters"));
        }
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(err(&format!("unexpected character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() > MAX_PAULI_QUBITS {
            return Err(err("too many qubits"));
        }
        Ok(PauliString::from_letters(&letters)?.with_phase(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A real-weighted Pauli operator `coefficient · pauli`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub pauli: PauliString,
}

/// A Hamiltonian `Σ_n a_n P_n` over Hermitian Pauli strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.pauli.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch {
                    left: n_qubits,
                    right: t.pauli.n_qubits(),
                });
            }
            if !t.pauli.is_hermitian() {
                return Err(Error::NonHermitian(t.pauli.to_string()));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n_qubits > 12 {
            return Err(Error::DimensionTooLarge(self.n_qubits));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            for b in 0..dim {
                let (row, c) = t.pauli.apply_to_basis(b);
                m[(row, b)] += c * t.coefficient;
            }
        }
        Ok(m)
    }

    /// True iff every pair of terms commutes.
    pub fn is_commuting(&self) -> bool {
        self.terms.iter().enumerate().all(|(i, a)| {
            self.terms[i + 1..]
                .iter()
                .all(|b| a.pauli.commutes(&b.pauli).unwrap_or(false))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }

    /// Independent oracle: Kronecker product of single-qubit matrices,
    /// qubit 0 as the least-significant factor.
    fn kron_oracle(ps: &PauliString) -> CMatrix {
        let mut m = CMatrix::identity(1, 1);
        for q in 0..ps.n_qubits() {
            let l = ps.letter(q).matrix();
            let lm = CMatrix::from_row_slice(2, 2, &[l[0][0], l[0][1], l[1][0], l[1][1]]);
            m = kron(&lm, &m);
        }
        m * i_pow(ps.phase())
    }

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        (a - b).iter().all(|c| c.norm() < 1e-12)
    }

    #[test]
    fn majorana_examples() {
        assert_eq!(majorana_to_pauli(1, 3).unwrap(), p("XII"));
        assert_eq!(majorana_to_pauli(2, 3).unwrap(), p("YII"));
        assert_eq!(majorana_to_pauli(3, 3).unwrap(), p("ZXI"));
        assert_eq!(majorana_to_pauli(6, 3).unwrap(), p("ZZY"));
    }

    #[test]
    fn majorana_out_of_range() {
        assert!(matches!(
            majorana_to_pauli(0, 3),
            Err(Error::MajoranaIndex { .. })
        ));
        assert!(matches!(
            majorana_to_pauli(7, 3),
            Err(Error::MajoranaIndex { index: 7, max: 6 })
        ));
    }

    #[test]
    fn majoranas_satisfy_clifford_algebra() {
        let n = 4;
        for i in 1..=2 * n {
            let a = majorana_to_pauli(i, n).unwrap();
            assert!(a.is_hermitian());
            for j in 1..=2 * n {
                let b = majorana_to_pauli(j, n).unwrap();
                let ab = a.multiply(&b).unwrap();
                let ba = b.multiply(&a).unwrap();
                if i == j {
                    assert_eq!(ab, PauliString::identity(n).unwrap());
                } else {
                    assert_eq!(ab.with_phase(0), ba.with_phase(0));
                    assert_eq!((ab.phase() + 4 - ba.phase()) % 4, 2);
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(p("X").multiply(&p("Y")).unwrap(), p("+iZ"));
        assert_eq!(p("ZX").multiply(&p("ZY")).unwrap(), p("+iIZ"));
        for s in ["X", "Y", "Z", "XYZ", "-ZZI"] {
            let a = p(s);
            assert!(a.multiply(&a).unwrap().is_identity());
            assert_eq!(a.multiply(&a).unwrap().phase(), 0);
        }
        // dense check of the derived example
        let lhs = kron_oracle(&p("ZX")) * kron_oracle(&p("ZY"));
        assert!(close(&lhs, &kron_oracle(&p("iIZ"))));
    }

    #[test]
    fn multiply_width_mismatch() {
        assert!(matches!(
            p("X").multiply(&p("XX")),
            Err(Error::QubitCountMismatch { left: 1, right: 2 })
        ));
        assert!(p("X").commutes(&p("XX")).is_err());
    }

    #[test]
    fn commutes_examples() {
        assert!(p("XI").commutes(&p("IZ")).unwrap());
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        let m1 = kron_oracle(&p("XX"));
        let m2 = kron_oracle(&p("ZZ"));
        assert!(close(&(&m1 * &m2), &(&m2 * &m1)));
    }

    #[test]
    fn text_form() {
        assert_eq!(p("-iXYZI").to_string(), "-iXYZI");
        assert_eq!(p("XY").to_string(), "+XY");
        assert_eq!(p("+iZ").phase(), 1);
        assert_eq!(p("-Z").phase(), 2);
        assert!("".parse::<PauliString>().is_err());
        assert!("+i".parse::<PauliString>().is_err());
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn conjugation_examples() {
        // CX: X_c -> X_c X_t, Z_t -> Z_c Z_t, Y_c Y_t -> -X_c Z_t ... checked densely below
        assert_eq!(p("XI").conjugate_cx(0, 1).unwrap(), p("XX"));
        assert_eq!(p("IZ").conjugate_cx(0, 1).unwrap(), p("ZZ"));
        assert_eq!(p("Y").conjugate_h(0).unwrap(), p("-Y"));
        assert_eq!(p("XI").conjugate_cz(0, 1).unwrap(), p("XZ"));
    }

    fn cx_matrix(n: usize, c: usize, t: usize) -> CMatrix {
        let dim = 1 << n;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let out = if (b >> c) & 1 == 1 { b ^ (1 << t) } else { b };
            m[(out, b)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn h_matrix(n: usize, q: usize) -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[s.into(), s.into(), s.into(), (-s).into()],
        );
        let mut m = CMatrix::identity(1, 1);
        for k in 0..n {
            let f = if k == q { h.clone() } else { CMatrix::identity(2, 2) };
            m = kron(&f, &m);
        }
        m
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        let mask = (1u64 << n) - 1;
        (any::<u64>(), any::<u64>(), 0u8..4)
            .prop_map(move |(x, z, k)| PauliString::from_bits(n, x & mask, z & mask, k).unwrap())
    }

    proptest! {
        #[test]
        fn multiply_is_associative(a in arb_pauli(5), b in arb_pauli(5), c in arb_pauli(5)) {
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn multiply_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let prod = a.multiply(&b).unwrap();
            let dense = kron_oracle(&a) * kron_oracle(&b);
            prop_assert!(close(&prod.to_matrix().unwrap(), &dense));
            prop_assert!(close(&kron_oracle(&prod), &dense));
        }

        #[test]
        fn commutes_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let (ma, mb) = (kron_oracle(&a), kron_oracle(&b));
            let dense = close(&(&ma * &mb), &(&mb * &ma));
            prop_assert_eq!(a.commutes(&b).unwrap(), dense);
        }

        #[test]
        fn text_round_trip(a in arb_pauli(7)) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<PauliString>().unwrap(), a);
        }

        #[test]
        fn conjugation_matches_dense(a in arb_pauli(3), c in 0usize..3, dt in 1usize..3) {
            let t = (c + dt) % 3;
            let cx = cx_matrix(3, c, t);
            let want = &cx * kron_oracle(&a) * &cx;
            prop_assert!(close(&kron_oracle(&a.conjugate_cx(c, t).unwrap()), &want));
            let h = h_matrix(3, c);
            let want = &h * kron_oracle(&a) * &h;
            prop_assert!(close(&kron_oracle(&a.conjugate_h(c).unwrap()), &want));
        }
    }
}
