//! Exact density-matrix evolution.
//!
//! The matrix is stored row-major as a `2n`-qubit vector: index `r << n | c`.
//! Left multiplication by `U` acts on qubits `n..2n` and right multiplication
//! by `U†` is `conj(U)` on qubits `0..n`, so the statevector kernels do all
//! the work.

use num_complex::Complex64 as C64;

use super::statevector::{apply_matrix, gate_matrix, StateVector};
use crate::circuit::Gate;
use crate::pauli::PauliString;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> DensityMatrix {
        let n = psi.n();
        let dim = 1usize << n;
        let amps = psi.amplitudes();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            if amps[r] == C64::new(0.0, 0.0) {
                continue;
            }
            for col in 0..dim {
                data[r << n | col] = amps[r] * amps[col].conj();
            }
        }
        DensityMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&mut self, g: &Gate) {
        let m = gate_matrix(g);
        apply_matrix(&mut self.data, &m.shifted(self.n));
        apply_matrix(&mut self.data, &m.conj());
    }

    /// `P ρ P†`; phases of `P` cancel.
    fn conjugated(&self, p: &PauliString) -> Vec<C64> {
        let n = self.n;
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        let dim = 1usize << n;
        let mut out = vec![C64::new(0.0, 0.0); self.data.len()];
        for r in 0..dim {
            let sr = (r & z).count_ones() & 1;
            for col in 0..dim {
                let sc = (col & z).count_ones() & 1;
                let v = self.data[r << n | col];
                out[(r ^ x) << n | (col ^ x)] = if sr ^ sc == 1 { -v } else { v };
            }
        }
        out
    }

    /// Replace `ρ` by `Σ_i w_i P_i ρ P_i`. The weights must sum to one.
    pub fn apply_pauli_channel(&mut self, terms: &[(PauliString, f64)]) {
        let mut acc = vec![C64::new(0.0, 0.0); self.data.len()];
        for (p, w) in terms {
            if *w == 0.0 {
                continue;
            }
            if p.is_identity() {
                for (a, v) in acc.iter_mut().zip(&self.data) {
                    *a += v * *w;
                }
            } else {
                for (a, v) in acc.iter_mut().zip(self.conjugated(p)) {
                    *a += v * *w;
                }
            }
        }
        self.data = acc;
    }

    /// Uniform depolarizing channel on `qubits`: each of the `4^k - 1`
    /// non-identity Paulis with probability `p / (4^k - 1)`.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) {
        if p == 0.0 {
            return;
        }
        let terms = depolarizing_terms(self.n, qubits, p);
        self.apply_pauli_channel(&terms);
    }

    pub fn trace(&self) -> C64 {
        let dim = 1usize << self.n;
        (0..dim).map(|i| self.data[i << self.n | i]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n;
        (0..dim).map(|i| self.data[i << self.n | i].re).collect()
    }
}

/// Terms of the depolarizing channel on `qubits`, identity first.
pub(crate) fn depolarizing_terms(n: usize, qubits: &[usize], p: f64) -> Vec<(PauliString, f64)> {
    let k = qubits.len();
    let count = (1usize << (2 * k)) - 1;
    let mut terms = vec![(PauliString::identity(n), 1.0 - p)];
    for code in 1..=count {
        terms.push((local_pauli(n, qubits, code), p / count as f64));
    }
    terms
}

/// Pauli on `qubits` encoded two bits per qubit (`x` low, `z` high), first
/// qubit in the lowest pair.
pub(crate) fn local_pauli(n: usize, qubits: &[usize], code: usize) -> PauliString {
    let mut x = 0u64;
    let mut z = 0u64;
    for (i, &q) in qubits.iter().enumerate() {
        let pair = code >> (2 * i) & 3;
        x |= ((pair & 1) as u64) << q;
        z |= ((pair >> 1) as u64) << q;
    }
    PauliString::new(n, x, z).expect("qubits validated by circuit")
}
