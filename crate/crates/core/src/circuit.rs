//! Gate vocabulary and circuits.
//!
//! Circuits serialize to JSON as `{"n_qubits": n, "gates": [...]}` where each
//! gate is an object tagged by `kind`, e.g.
//! `{"kind": "cx", "control": 0, "target": 1}` or
//! `{"kind": "pauli_rotation", "pauli": "+ZZI", "theta": 0.25}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateKind {
    H { target: usize },
    X { target: usize },
    Y { target: usize },
    Z { target: usize },
    /// `diag(1, e^{iλ})`.
    Phase { target: usize, lambda: f64 },
    /// `exp(-i θ Z / 2)`.
    Rz { target: usize, theta: f64 },
    Unitary { target: usize, matrix: Mat2 },
    Cx { control: usize, target: usize },
    Cz { a: usize, b: usize },
    /// `exp(-i θ P)`.
    PauliRotation { pauli: PauliString, theta: f64 },
    #[serde(rename = "cswap")]
    ControlledSwap { control: usize, a: usize, b: usize },
    Measure { targets: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(flatten)]
    pub kind: GateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl From<GateKind> for Gate {
    fn from(kind: GateKind) -> Self {
        Gate { kind, label: None }
    }
}

impl Gate {
    pub fn labeled(kind: GateKind, label: &str) -> Self {
        Gate {
            kind,
            label: Some(label.to_string()),
        }
    }

    /// Qubits the gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        use GateKind::*;
        match &self.kind {
            H { target }
            | X { target }
            | Y { target }
            | Z { target }
            | Phase { target, .. }
            | Rz { target, .. }
            | Unitary { target, .. } => vec![*target],
            Cx { control, target } => vec![*control, *target],
            Cz { a, b } => vec![*a, *b],
            PauliRotation { pauli, .. } => pauli.support(),
            ControlledSwap { control, a, b } => vec![*control, *a, *b],
            Measure { targets } => targets.clone(),
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, GateKind::Measure { .. })
    }

    /// Number of qubits acted on by a unitary gate (0 for measurements).
    pub fn arity(&self) -> usize {
        if self.is_measurement() {
            0
        } else {
            self.qubits().len()
        }
    }

    /// Matrix of a single-qubit gate, `None` otherwise.
    pub fn single_qubit_matrix(&self) -> Option<(usize, Mat2)> {
        use GateKind::*;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Some(match &self.kind {
            H { target } => (*target, [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]),
            X { target } => (*target, Pauli::X.matrix()),
            Y { target } => (*target, Pauli::Y.matrix()),
            Z { target } => (*target, Pauli::Z.matrix()),
            Phase { target, lambda } => (
                *target,
                [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, *lambda)]],
            ),
            Rz { target, theta } => (
                *target,
                [
                    [Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
                    [c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
                ],
            ),
            Unitary { target, matrix } => (*target, *matrix),
            _ => return None,
        })
    }

    /// The adjoint gate; measurements have none.
    pub fn inverse(&self) -> Result<Gate> {
        use GateKind::*;
        let kind = match &self.kind {
            H { .. } | X { .. } | Y { .. } | Z { .. } | Cx { .. } | Cz { .. } => self.kind.clone(),
            ControlledSwap { .. } => self.kind.clone(),
            Phase { target, lambda } => Phase {
                target: *target,
                lambda: -lambda,
            },
            Rz { target, theta } => Rz {
                target: *target,
                theta: -theta,
            },
            Unitary { target, matrix } => Unitary {
                target: *target,
                matrix: adjoint2(matrix),
            },
            PauliRotation { pauli, theta } => PauliRotation {
                pauli: *pauli,
                theta: -theta,
            },
            Measure { .. } => {
                return Err(Error::InvalidCircuit(
                    "measurements cannot be inverted".into(),
                ))
            }
        };
        Ok(Gate {
            kind,
            label: self.label.clone(),
        })
    }

    /// The same gate with every qubit index shifted by `offset` into an
    /// `n_qubits`-wide register.
    pub fn shifted(&self, offset: usize, n_qubits: usize) -> Result<Gate> {
        use GateKind::*;
        let kind = match &self.kind {
            H { target } => H { target: target + offset },
            X { target } => X { target: target + offset },
            Y { target } => Y { target: target + offset },
            Z { target } => Z { target: target + offset },
            Phase { target, lambda } => Phase {
                target: target + offset,
                lambda: *lambda,
            },
            Rz { target, theta } => Rz {
                target: target + offset,
                theta: *theta,
            },
            Unitary { target, matrix } => Unitary {
                target: target + offset,
                matrix: *matrix,
            },
            Cx { control, target } => Cx {
                control: control + offset,
                target: target + offset,
            },
            Cz { a, b } => Cz {
                a: a + offset,
                b: b + offset,
            },
            PauliRotation { pauli, theta } => PauliRotation {
                pauli: pauli.embed(n_qubits, offset)?,
                theta: *theta,
            },
            ControlledSwap { control, a, b } => ControlledSwap {
                control: control + offset,
                a: a + offset,
                b: b + offset,
            },
            Measure { targets } => Measure {
                targets: targets.iter().map(|t| t + offset).collect(),
            },
        };
        Ok(Gate {
            kind,
            label: self.label.clone(),
        })
    }

    pub(crate) fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            if qs[..i].contains(&q) {
                return Err(Error::InvalidGate(format!(
                    "repeated qubit {q} in {:?}",
                    self.kind
                )));
            }
        }
        match &self.kind {
            GateKind::Unitary { matrix, .. } => {
                let dev = unitarity_deviation(matrix);
                if dev > UNITARY_TOL {
                    return Err(Error::NonUnitary(dev));
                }
            }
            GateKind::PauliRotation { pauli, .. } => {
                if pauli.n_qubits() != n_qubits {
                    return Err(Error::QubitCountMismatch {
                        left: n_qubits,
                        right: pauli.n_qubits(),
                    });
                }
                if !pauli.is_hermitian() {
                    return Err(Error::NonHermitian(pauli.to_string()));
                }
            }
            GateKind::Measure { targets } if targets.is_empty() => {
                return Err(Error::InvalidGate("measurement without targets".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

pub fn adjoint2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Max-entry deviation of `U U†` from the identity.
pub fn unitarity_deviation(m: &Mat2) -> f64 {
    let p = mul2(m, &adjoint2(m));
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[i][j] - Complex64::new(want, 0.0)).norm());
        }
    }
    dev
}

/// An ordered gate list with terminal measurements only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "is_zero")]
    global_phase: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Deserialize)]
struct RawCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    global_phase: f64,
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCircuit::deserialize(d)?;
        let mut c = Circuit::new(raw.n_qubits).map_err(serde::de::Error::custom)?;
        c.global_phase = raw.global_phase;
        for g in raw.gates {
            c.push(g).map_err(serde::de::Error::custom)?;
        }
        Ok(c)
    }
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidCircuit("circuit needs at least one qubit".into()));
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
            global_phase: 0.0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Global phase `φ` multiplying the circuit unitary by `e^{iφ}`.
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phi: f64) {
        self.global_phase = (self.global_phase + phi).rem_euclid(std::f64::consts::TAU);
    }

    /// Measurements are terminal, so only the last gate needs checking.
    fn has_measurement(&self) -> bool {
        self.gates.last().is_some_and(Gate::is_measurement)
    }

    /// Appends a gate after validating it; unitary gates may not follow a
    /// measurement and no qubit may be measured twice.
    pub fn push(&mut self, gate: impl Into<Gate>) -> Result<&mut Self> {
        let gate = gate.into();
        gate.validate(self.n_qubits)?;
        if gate.is_measurement() {
            let measured = self.measured_qubits();
            if let Some(q) = gate.qubits().iter().find(|q| measured.contains(q)) {
                return Err(Error::InvalidCircuit(format!("qubit {q} measured twice")));
            }
        } else if self.has_measurement() {
            return Err(Error::InvalidCircuit(
                "mid-circuit measurement is not supported".into(),
            ));
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn h(&mut self, target: usize) -> Result<&mut Self> {
        self.push(GateKind::H { target })
    }

    pub fn x(&mut self, target: usize) -> Result<&mut Self> {
        self.push(GateKind::X { target })
    }

    pub fn rz(&mut self, target: usize, theta: f64) -> Result<&mut Self> {
        self.push(GateKind::Rz { target, theta })
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(GateKind::Cx { control, target })
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateKind::Cz { a, b })
    }

    pub fn unitary(&mut self, target: usize, matrix: Mat2) -> Result<&mut Self> {
        self.push(GateKind::Unitary { target, matrix })
    }

    pub fn pauli_rotation(&mut self, pauli: PauliString, theta: f64) -> Result<&mut Self> {
        self.push(GateKind::PauliRotation { pauli, theta })
    }

    pub fn cswap(&mut self, control: usize, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateKind::ControlledSwap { control, a, b })
    }

    pub fn measure(&mut self, targets: &[usize]) -> Result<&mut Self> {
        self.push(GateKind::Measure {
            targets: targets.to_vec(),
        })
    }

    pub fn measure_all(&mut self) -> Result<&mut Self> {
        let all: Vec<usize> = (0..self.n_qubits).collect();
        self.measure(&all)
    }

    /// Measured qubits in classical-bit order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        self.gates
            .iter()
            .filter_map(|g| match &g.kind {
                GateKind::Measure { targets } => Some(targets.clone()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    pub fn classical_bits(&self) -> usize {
        self.measured_qubits().len()
    }

    /// The circuit with measurements removed.
    pub fn unitary_part(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self
                .gates
                .iter()
                .filter(|g| !g.is_measurement())
                .cloned()
                .collect(),
            global_phase: self.global_phase,
        }
    }

    /// `U†` for a measurement-free circuit.
    pub fn inverse(&self) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
            global_phase: (-self.global_phase).rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Appends `other`'s gates with qubit indices shifted by `offset`.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        if offset + other.n_qubits > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: offset + other.n_qubits - 1,
                n_qubits: self.n_qubits,
            });
        }
        for g in &other.gates {
            self.push(g.shifted(offset, self.n_qubits)?)?;
        }
        self.add_global_phase(other.global_phase);
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        self.append_shifted(other, 0)
    }

    /// True iff every gate acts on at most two qubits and two-qubit gates
    /// are CX or CZ.
    pub fn is_decomposed(&self) -> bool {
        self.first_composite().is_none()
    }

    pub(crate) fn first_composite(&self) -> Option<&Gate> {
        self.gates.iter().find(|g| {
            matches!(
                g.kind,
                GateKind::PauliRotation { .. } | GateKind::ControlledSwap { .. }
            )
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_repeated_qubits() {
        let mut c = Circuit::new(2).unwrap();
        assert!(matches!(
            c.h(2),
            Err(Error::QubitOutOfRange { qubit: 2, n_qubits: 2 })
        ));
        assert!(c.cx(1, 1).is_err());
        assert!(Circuit::new(0).is_err());
    }

    #[test]
    fn rejects_non_unitary() {
        let mut c = Circuit::new(1).unwrap();
        let m = [
            [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        assert!(matches!(c.unitary(0, m), Err(Error::NonUnitary(_))));
    }

    #[test]
    fn measurements_are_terminal() {
        let mut c = Circuit::new(2).unwrap();
        c.h(0).unwrap().measure(&[0]).unwrap();
        assert!(c.x(1).is_err());
        assert!(c.measure(&[0]).is_err());
        c.measure(&[1]).unwrap();
        assert_eq!(c.measured_qubits(), vec![0, 1]);
        assert_eq!(c.classical_bits(), 2);
        assert!(c.inverse().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(3).unwrap();
        c.h(0)
            .unwrap()
            .cx(0, 1)
            .unwrap()
            .rz(1, 0.3)
            .unwrap()
            .pauli_rotation("+XYZ".parse().unwrap(), -0.125)
            .unwrap()
            .cswap(2, 0, 1)
            .unwrap()
            .push(Gate::labeled(GateKind::Phase { target: 2, lambda: 1.5 }, "t"))
            .unwrap()
            .measure(&[0, 2])
            .unwrap();
        c.add_global_phase(0.5);
        let text = c.to_json().unwrap();
        assert!(text.contains(r#"{"kind":"cx","control":0,"target":1}"#));
        assert!(text.contains(r#""kind":"cswap""#));
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_rejects_invalid_gates() {
        let text = r#"{"n_qubits":2,"gates":[{"kind":"cx","control":0,"target":5}]}"#;
        assert!(Circuit::from_json(text).is_err());
    }

    #[test]
    fn shifted_append() {
        let mut a = Circuit::new(2).unwrap();
        a.cx(0, 1).unwrap().pauli_rotation("+ZX".parse().unwrap(), 0.1).unwrap();
        let mut big = Circuit::new(5).unwrap();
        big.append_shifted(&a, 3).unwrap();
        assert_eq!(big.gates()[0].qubits(), vec![3, 4]);
        assert_eq!(big.gates()[1].qubits(), vec![3, 4]);
        assert!(big.append_shifted(&a, 4).is_err());
    }
}
