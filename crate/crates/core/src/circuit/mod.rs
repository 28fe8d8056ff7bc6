//! Circuit data model.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s acting on `n_qubits` qubits.
//! Qubit `q` corresponds to bit `q` of a basis-state index, so the outcome
//! index of a measurement has qubit 0 as its least significant bit.
//! Measurement of all qubits is implicit at the end of every circuit.
//!
//! The native gate set is {CZ, SX, RZ, X}. The IR also admits H, CX, RY and
//! CP so circuit builders can emit readable circuits before lowering.

mod text;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use text::{parse_circuit, serialize_circuit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("gate {kind} expects {expected} qubit(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate {kind} applied to repeated qubit {qubit}")]
    RepeatedQubit { kind: GateKind, qubit: usize },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("gate {0} is not in the native set {{CZ, SX, RZ, X}}")]
    NotNative(GateKind),
    #[error("non-finite angle on gate {0}")]
    NonFiniteAngle(GateKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Cz,
    Sx,
    Rz,
    X,
    H,
    Cx,
    Ry,
    Cp,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::Cz,
        GateKind::Sx,
        GateKind::Rz,
        GateKind::X,
        GateKind::H,
        GateKind::Cx,
        GateKind::Ry,
        GateKind::Cp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Cz => "cz",
            GateKind::Sx => "sx",
            GateKind::Rz => "rz",
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::Ry => "ry",
            GateKind::Cp => "cp",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cz | GateKind::Cx | GateKind::Cp => 2,
            _ => 1,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::Ry | GateKind::Cp)
    }

    pub fn is_native(self) -> bool {
        matches!(
            self,
            GateKind::Cz | GateKind::Sx | GateKind::Rz | GateKind::X
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().to_uppercase())
    }
}

/// A single gate application. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cz(usize, usize),
    Sx(usize),
    Rz(f64, usize),
    X(usize),
    H(usize),
    /// Control, target.
    Cx(usize, usize),
    Ry(f64, usize),
    /// Controlled phase `diag(1, 1, 1, e^{i angle})`; symmetric in its qubits.
    Cp(f64, usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Cz(..) => GateKind::Cz,
            Gate::Sx(_) => GateKind::Sx,
            Gate::Rz(..) => GateKind::Rz,
            Gate::X(_) => GateKind::X,
            Gate::H(_) => GateKind::H,
            Gate::Cx(..) => GateKind::Cx,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Cp(..) => GateKind::Cp,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cz(a, b) | Gate::Cx(a, b) | Gate::Cp(_, a, b) => vec![a, b],
            Gate::Sx(q) | Gate::Rz(_, q) | Gate::X(q) | Gate::H(q) | Gate::Ry(_, q) => vec![q],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz(t, _) | Gate::Ry(t, _) | Gate::Cp(t, _, _) => Some(t),
            _ => None,
        }
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        self.qubits().contains(&qubit)
    }

    /// Build a gate from its parts, checking arity and angle presence.
    pub fn from_parts(
        kind: GateKind,
        qubits: &[usize],
        angle: Option<f64>,
    ) -> Result<Gate, CircuitError> {
        if qubits.len() != kind.arity() {
            return Err(CircuitError::Arity {
                kind,
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        let theta = angle.unwrap_or(0.0);
        let gate = match kind {
            GateKind::Cz => Gate::Cz(qubits[0], qubits[1]),
            GateKind::Sx => Gate::Sx(qubits[0]),
            GateKind::Rz => Gate::Rz(theta, qubits[0]),
            GateKind::X => Gate::X(qubits[0]),
            GateKind::H => Gate::H(qubits[0]),
            GateKind::Cx => Gate::Cx(qubits[0], qubits[1]),
            GateKind::Ry => Gate::Ry(theta, qubits[0]),
            GateKind::Cp => Gate::Cp(theta, qubits[0], qubits[1]),
        };
        Ok(gate)
    }

    pub fn validate(&self, n_qubits: usize) -> Result<(), CircuitError> {
        let qubits = self.qubits();
        for &q in &qubits {
            if q >= n_qubits {
                return Err(CircuitError::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::RepeatedQubit {
                kind: self.kind(),
                qubit: qubits[0],
            });
        }
        if let Some(t) = self.angle() {
            if !t.is_finite() {
                return Err(CircuitError::NonFiniteAngle(self.kind()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Gate>,
    pub name: String,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Circuit, CircuitError> {
        if n_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(Circuit {
            n_qubits,
            ops: Vec::new(),
            name: String::new(),
        })
    }

    pub fn with_ops(n_qubits: usize, ops: Vec<Gate>) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::new(n_qubits)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn named(mut self, name: impl Into<String>) -> Circuit {
        self.name = name.into();
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.n_qubits)?;
        self.ops.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// True when every op is in {CZ, SX, RZ, X}.
    pub fn is_native(&self) -> bool {
        self.ops.iter().all(|g| g.kind().is_native())
    }

    pub fn ensure_native(&self) -> Result<(), CircuitError> {
        match self.ops.iter().find(|g| !g.kind().is_native()) {
            Some(g) => Err(CircuitError::NotNative(g.kind())),
            None => Ok(()),
        }
    }

    /// Same qubit count and identical op sequence; the name is ignored.
    pub fn structurally_eq(&self, other: &Circuit) -> bool {
        self.n_qubits == other.n_qubits && self.ops == other.ops
    }

    pub(crate) fn from_validated(n_qubits: usize, ops: Vec<Gate>, name: String) -> Circuit {
        Circuit {
            n_qubits,
            ops,
            name,
        }
    }
}

/// Per-kind gate counts, with zero entries for kinds that do not occur.
pub fn gate_counts(c: &Circuit) -> BTreeMap<GateKind, usize> {
    let mut counts: BTreeMap<GateKind, usize> = GateKind::ALL.iter().map(|&k| (k, 0)).collect();
    for g in c.ops() {
        *counts.entry(g.kind()).or_default() += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_counts_are_zero() {
        let c = Circuit::new(3).unwrap();
        let counts = gate_counts(&c);
        assert_eq!(counts.len(), GateKind::ALL.len());
        assert!(counts.values().all(|&v| v == 0));
    }

    #[test]
    fn counts_per_kind() {
        let c = Circuit::with_ops(1, vec![Gate::X(0), Gate::X(0), Gate::Sx(0)]).unwrap();
        let counts = gate_counts(&c);
        assert_eq!(counts[&GateKind::X], 2);
        assert_eq!(counts[&GateKind::Sx], 1);
        assert_eq!(counts[&GateKind::Cz], 0);
    }

    #[test]
    fn rejects_bad_ops() {
        let mut c = Circuit::new(2).unwrap();
        assert_eq!(
            c.push(Gate::Cz(0, 5)),
            Err(CircuitError::QubitOutOfRange {
                qubit: 5,
                n_qubits: 2
            })
        );
        assert!(matches!(
            c.push(Gate::Cx(1, 1)),
            Err(CircuitError::RepeatedQubit { .. })
        ));
        assert!(matches!(
            c.push(Gate::Rz(f64::NAN, 0)),
            Err(CircuitError::NonFiniteAngle(GateKind::Rz))
        ));
        assert!(matches!(
            Gate::from_parts(GateKind::Cz, &[0], None),
            Err(CircuitError::Arity {
                expected: 2,
                got: 1,
                ..
            })
        ));
        assert_eq!(Circuit::new(0), Err(CircuitError::NoQubits));
    }

    #[test]
    fn native_flag() {
        let mut c = Circuit::with_ops(2, vec![Gate::Sx(0), Gate::Cz(0, 1)]).unwrap();
        assert!(c.is_native());
        c.push(Gate::H(1)).unwrap();
        assert!(!c.is_native());
        assert_eq!(c.ensure_native(), Err(CircuitError::NotNative(GateKind::H)));
    }
}
