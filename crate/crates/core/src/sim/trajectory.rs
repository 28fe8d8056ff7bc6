//! Noisy trajectories with per-qubit fusion of one-qubit gates.
//!
//! One-qubit gates and inserted Pauli errors accumulate in a pending 2×2
//! matrix per qubit and touch the state only when a two-qubit gate needs
//! that qubit, or at the end.

use num_complex::Complex64 as C64;

use super::statevector::{
    apply_1q, apply_2q, apply_cz, gate_matrix, mat2_mul, pauli_matrix, GateMatrix, Mat2, Mat4,
};
use crate::circuit::{Circuit, Gate};
use crate::pauli::PauliString;

fn is_diagonal(m: &Mat2) -> bool {
    m[0][1] == C64::new(0.0, 0.0) && m[1][0] == C64::new(0.0, 0.0)
}

#[derive(Debug, Clone, Copy)]
enum Step {
    One(usize, Mat2),
    Cz(usize, usize),
    Two(usize, usize, Mat4),
}

#[derive(Debug, Clone)]
pub(super) struct CompiledCircuit {
    n: usize,
    steps: Vec<Step>,
}

impl CompiledCircuit {
    pub(super) fn new(c: &Circuit) -> CompiledCircuit {
        let steps = c
            .ops()
            .iter()
            .map(|g| match (*g, gate_matrix(g)) {
                (Gate::Cz(a, b), _) => Step::Cz(a, b),
                (_, GateMatrix::One(q, m)) => Step::One(q, m),
                (_, GateMatrix::Two(a, b, m)) => Step::Two(a, b, m),
            })
            .collect();
        CompiledCircuit {
            n: c.n_qubits(),
            steps,
        }
    }

    /// Outcome probabilities from `|0…0>` with Pauli `p` inserted after op `i`
    /// for every `(i, p)` in `events` (sorted by `i`).
    pub(super) fn run(&self, events: &[(usize, PauliString)]) -> Vec<f64> {
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << self.n];
        amps[0] = C64::new(1.0, 0.0);
        let mut pending: Vec<Option<Mat2>> = vec![None; self.n];
        let push = |pending: &mut [Option<Mat2>], q: usize, m: &Mat2| {
            pending[q] = Some(match &pending[q] {
                Some(prev) => mat2_mul(m, prev),
                None => *m,
            });
        };
        let flush = |amps: &mut [C64], pending: &mut [Option<Mat2>], q: usize| {
            if let Some(m) = pending[q].take() {
                apply_1q(amps, q, &m);
            }
        };
        let mut events = events.iter().peekable();
        for (i, step) in self.steps.iter().enumerate() {
            match *step {
                Step::One(q, ref m) => push(&mut pending, q, m),
                Step::Cz(a, b) => {
                    // diagonal pending matrices commute with CZ
                    for q in [a, b] {
                        if pending[q].is_some_and(|m| !is_diagonal(&m)) {
                            flush(&mut amps, &mut pending, q);
                        }
                    }
                    apply_cz(&mut amps, a, b);
                }
                Step::Two(a, b, ref m) => {
                    flush(&mut amps, &mut pending, a);
                    flush(&mut amps, &mut pending, b);
                    apply_2q(&mut amps, a, b, m);
                }
            }
            while let Some((_, p)) = events.next_if(|(at, _)| *at == i) {
                for q in 0..self.n {
                    let single = p.get(q);
                    if single != crate::pauli::Pauli::I {
                        push(&mut pending, q, &pauli_matrix(single));
                    }
                }
            }
        }
        for q in 0..self.n {
            flush(&mut amps, &mut pending, q);
        }
        amps.iter().map(|a| a.norm_sqr()).collect()
    }
}
