//! Pauli strings in X/Z bit-mask form.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("invalid Pauli label `{0}`")]
    InvalidLabel(String),
    #[error("Pauli strings support at most 64 qubits, got {0}")]
    TooManyQubits(usize),
    #[error("mask has bits at or above qubit count {0}")]
    MaskOutOfRange(usize),
}

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An `n`-qubit Pauli string `⊗ X^{x_q} Z^{z_q}` up to phase.
///
/// Bit `q` of each mask refers to qubit `q`. Phases are not tracked: Pauli
/// conjugation of a density matrix and the map on basis states are both
/// insensitive to them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn new(n: usize, x_mask: u64, z_mask: u64) -> Result<PauliString, PauliError> {
        if n > 64 {
            return Err(PauliError::TooManyQubits(n));
        }
        let allowed = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if (x_mask | z_mask) & !allowed != 0 {
            return Err(PauliError::MaskOutOfRange(n));
        }
        Ok(PauliString { n, x_mask, z_mask })
    }

    pub fn identity(n: usize) -> PauliString {
        PauliString {
            n,
            x_mask: 0,
            z_mask: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x_mask >> qubit & 1 == 1, self.z_mask >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (x, z) = p.bits();
        let bit = 1u64 << qubit;
        self.x_mask = (self.x_mask & !bit) | if x { bit } else { 0 };
        self.z_mask = (self.z_mask & !bit) | if z { bit } else { 0 };
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    /// Conjugate by CZ on qubits `a`, `b`: `X_a -> X_a Z_b`, `X_b -> Z_a X_b`,
    /// Z factors unchanged. The sign is discarded.
    pub fn conjugate_cz(&self, a: usize, b: usize) -> PauliString {
        let xa = self.x_mask >> a & 1;
        let xb = self.x_mask >> b & 1;
        PauliString {
            n: self.n,
            x_mask: self.x_mask,
            z_mask: self.z_mask ^ (xa << b) ^ (xb << a),
        }
    }

    /// Parse a label such as `"XIZ"`, leftmost character = highest qubit.
    pub fn from_label(label: &str) -> Result<PauliString, PauliError> {
        let n = label.chars().count();
        if n > 64 {
            return Err(PauliError::TooManyQubits(n));
        }
        let mut p = PauliString::identity(n);
        for (i, ch) in label.chars().enumerate() {
            let f = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(PauliError::InvalidLabel(label.to_string())),
            };
            p.set(n - 1 - i, f);
        }
        Ok(p)
    }

    pub fn label(&self) -> String {
        (0..self.n).rev().map(|q| self.get(q).symbol()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliString::from_label(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_round_trip() {
        let p = PauliString::from_label("XIYZ").unwrap();
        assert_eq!(p.get(3), Pauli::X);
        assert_eq!(p.get(0), Pauli::Z);
        assert_eq!(p.x_mask(), 0b1010);
        assert_eq!(p.z_mask(), 0b0011);
        assert_eq!(p.label(), "XIYZ");
        assert_eq!(p.weight(), 3);
        assert!(PauliString::from_label("XA").is_err());
    }

    #[test]
    fn masks_validated() {
        assert!(PauliString::new(2, 0b100, 0).is_err());
        assert!(PauliString::new(2, 0b11, 0b01).is_ok());
        assert!(PauliString::identity(3).is_identity());
    }

    #[test]
    fn cz_conjugation_table() {
        // qubit 0 is the rightmost label character
        let cases = [
            ("IX", "ZX"),
            ("XI", "XZ"),
            ("ZZ", "ZZ"),
            ("II", "II"),
            ("XX", "YY"),
            ("IY", "ZY"),
        ];
        for (pre, post) in cases {
            let p = PauliString::from_label(pre).unwrap();
            assert_eq!(p.conjugate_cz(0, 1).label(), post, "{pre}");
            assert_eq!(p.conjugate_cz(0, 1).conjugate_cz(0, 1), p);
        }
    }
}
