//! Dense statevector kernels.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::circuit::Gate;
use crate::pauli::{Pauli, PauliString};

pub(crate) type Mat2 = [[C64; 2]; 2];
pub(crate) type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Unitary of a gate. Two-qubit matrices use local index `bit(q0) + 2 * bit(q1)`
/// where `(q0, q1)` are the gate's qubits in order.
#[derive(Debug, Clone, Copy)]
pub(crate) enum GateMatrix {
    One(usize, Mat2),
    Two(usize, usize, Mat4),
}

pub(crate) fn sx_matrix() -> Mat2 {
    [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]
}

pub(crate) fn rz_matrix(theta: f64) -> Mat2 {
    let h = theta / 2.0;
    [
        [C64::from_polar(1.0, -h), ZERO],
        [ZERO, C64::from_polar(1.0, h)],
    ]
}

pub(crate) fn ry_matrix(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub(crate) fn gate_matrix(g: &Gate) -> GateMatrix {
    let h = FRAC_1_SQRT_2;
    match *g {
        Gate::Sx(q) => GateMatrix::One(q, sx_matrix()),
        Gate::X(q) => GateMatrix::One(q, [[ZERO, ONE], [ONE, ZERO]]),
        Gate::H(q) => GateMatrix::One(q, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
        Gate::Rz(t, q) => GateMatrix::One(q, rz_matrix(t)),
        Gate::Ry(t, q) => GateMatrix::One(q, ry_matrix(t)),
        Gate::Cz(a, b) => {
            let mut m = identity4();
            m[3][3] = c(-1.0, 0.0);
            GateMatrix::Two(a, b, m)
        }
        Gate::Cp(t, a, b) => {
            let mut m = identity4();
            m[3][3] = C64::from_polar(1.0, t);
            GateMatrix::Two(a, b, m)
        }
        Gate::Cx(ctrl, tgt) => {
            // local bit 0 = control, bit 1 = target: swap |01> and |11>
            let mut m = [[ZERO; 4]; 4];
            m[0][0] = ONE;
            m[2][2] = ONE;
            m[1][3] = ONE;
            m[3][1] = ONE;
            GateMatrix::Two(ctrl, tgt, m)
        }
    }
}

fn identity4() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

impl GateMatrix {
    pub(crate) fn dagger(&self) -> GateMatrix {
        match *self {
            GateMatrix::One(q, m) => {
                let mut d = [[ZERO; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        d[i][j] = m[j][i].conj();
                    }
                }
                GateMatrix::One(q, d)
            }
            GateMatrix::Two(a, b, m) => {
                let mut d = [[ZERO; 4]; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        d[i][j] = m[j][i].conj();
                    }
                }
                GateMatrix::Two(a, b, d)
            }
        }
    }

    pub(crate) fn conj(&self) -> GateMatrix {
        match *self {
            GateMatrix::One(q, m) => GateMatrix::One(q, m.map(|r| r.map(|x| x.conj()))),
            GateMatrix::Two(a, b, m) => GateMatrix::Two(a, b, m.map(|r| r.map(|x| x.conj()))),
        }
    }

    /// Same matrix acting on qubits shifted by `offset`.
    pub(crate) fn shifted(&self, offset: usize) -> GateMatrix {
        match *self {
            GateMatrix::One(q, m) => GateMatrix::One(q + offset, m),
            GateMatrix::Two(a, b, m) => GateMatrix::Two(a + offset, b + offset, m),
        }
    }
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn pauli_matrix(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, c(-1.0, 0.0)]],
    }
}

pub(crate) fn apply_cz(amps: &mut [C64], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    for (i, amp) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *amp = -*amp;
        }
    }
}

pub(crate) fn apply_matrix(amps: &mut [C64], gm: &GateMatrix) {
    match *gm {
        GateMatrix::One(q, m) => apply_1q(amps, q, &m),
        GateMatrix::Two(a, b, m) => apply_2q(amps, a, b, &m),
    }
}

pub(crate) fn apply_1q(amps: &mut [C64], q: usize, m: &Mat2) {
    let bit = 1usize << q;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + bit {
            let a0 = amps[i];
            let a1 = amps[i | bit];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += bit << 1;
    }
}

pub(crate) fn apply_2q(amps: &mut [C64], q0: usize, q1: usize, m: &Mat4) {
    let b0 = 1usize << q0;
    let b1 = 1usize << q1;
    for i in 0..amps.len() {
        if i & (b0 | b1) != 0 {
            continue;
        }
        let idx = [i, i | b0, i | b1, i | b0 | b1];
        let v = idx.map(|j| amps[j]);
        for (r, &j) in idx.iter().enumerate() {
            amps[j] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

/// Apply a gate with specialized kernels for the permutation and diagonal gates.
pub(crate) fn apply_gate(amps: &mut [C64], g: &Gate) {
    match *g {
        Gate::X(q) => {
            let bit = 1usize << q;
            for i in 0..amps.len() {
                if i & bit == 0 {
                    amps.swap(i, i | bit);
                }
            }
        }
        Gate::Cz(a, b) => apply_cz(amps, a, b),
        Gate::Rz(t, q) => {
            let bit = 1usize << q;
            let p0 = C64::from_polar(1.0, -t / 2.0);
            let p1 = C64::from_polar(1.0, t / 2.0);
            for (i, amp) in amps.iter_mut().enumerate() {
                *amp *= if i & bit == 0 { p0 } else { p1 };
            }
        }
        _ => apply_matrix(amps, &gate_matrix(g)),
    }
}

/// Apply `X^x Z^z` (the Pauli string up to global phase).
pub(crate) fn apply_pauli(amps: &mut [C64], p: &PauliString) {
    let z = p.z_mask() as usize;
    let x = p.x_mask() as usize;
    if z != 0 {
        for (i, amp) in amps.iter_mut().enumerate() {
            if (i & z).count_ones() & 1 == 1 {
                *amp = -*amp;
            }
        }
    }
    if x != 0 {
        for i in 0..amps.len() {
            let j = i ^ x;
            if i < j {
                amps.swap(i, j);
            }
        }
    }
}

/// Pure state of `n` qubits; qubit `q` is bit `q` of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n: usize, k: u64) -> StateVector {
        let mut amps = vec![ZERO; 1usize << n];
        amps[k as usize] = ONE;
        StateVector { n, amps }
    }

    pub fn zero(n: usize) -> StateVector {
        Self::basis(n, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn apply(&mut self, g: &Gate) {
        apply_gate(&mut self.amps, g);
    }

    pub fn apply_inverse(&mut self, g: &Gate) {
        apply_matrix(&mut self.amps, &gate_matrix(g).dagger());
    }

    pub fn apply_pauli(&mut self, p: &PauliString) {
        apply_pauli(&mut self.amps, p);
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|<self|other>|`, 1 when the states agree up to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }

    /// Largest `|a_i - e^{iφ} b_i|` after aligning the global phase on the
    /// largest-magnitude amplitude of `self`.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> f64 {
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bi, bv), (i, a)| {
                if a.norm() > bv {
                    (i, a.norm())
                } else {
                    (bi, bv)
                }
            });
        let a = self.amps[pivot];
        let b = other.amps[pivot];
        if b.norm() == 0.0 {
            return f64::INFINITY;
        }
        let phase = (a / b) / (a / b).norm();
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - phase * y).norm())
            .fold(0.0, f64::max)
    }
}
