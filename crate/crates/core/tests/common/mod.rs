//! Reference implementations used as test oracles. Written from the
//! definitions, sharing no code with the crate's kernels.
#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C;
use rand::Rng;

use dec_core::pauli::{Pauli, PauliString};
use dec_core::sim::PauliChannel;
use dec_core::{Circuit, Gate};

fn one_qubit_matrix(g: &Gate) -> Option<(usize, [[C; 2]; 2])> {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    Some(match *g {
        Gate::X(q) => (q, [[z, o], [o, z]]),
        Gate::H(q) => (q, [[h, h], [h, -h]]),
        // √X
        Gate::Sx(q) => {
            let p = C::new(0.5, 0.5);
            let m = C::new(0.5, -0.5);
            (q, [[p, m], [m, p]])
        }
        Gate::Rz(t, q) => (
            q,
            [
                [C::from_polar(1.0, -t / 2.0), z],
                [z, C::from_polar(1.0, t / 2.0)],
            ],
        ),
        Gate::Ry(t, q) => {
            let (s, c) = (t / 2.0).sin_cos();
            (
                q,
                [
                    [C::new(c, 0.0), C::new(-s, 0.0)],
                    [C::new(s, 0.0), C::new(c, 0.0)],
                ],
            )
        }
        _ => return None,
    })
}

/// Statevector of `c` from |0…0>, applying each gate entry by entry.
pub fn reference_state(c: &Circuit) -> Vec<C> {
    let dim = 1usize << c.n_qubits();
    let mut psi = vec![C::new(0.0, 0.0); dim];
    psi[0] = C::new(1.0, 0.0);
    for g in c.ops() {
        let mut out = vec![C::new(0.0, 0.0); dim];
        if let Some((q, m)) = one_qubit_matrix(g) {
            for (i, &amp) in psi.iter().enumerate() {
                let b = (i >> q) & 1;
                for (nb, row) in m.iter().enumerate() {
                    let j = (i & !(1 << q)) | (nb << q);
                    out[j] += row[b] * amp;
                }
            }
        } else {
            for (i, &amp) in psi.iter().enumerate() {
                let bit = |q: usize| (i >> q) & 1 == 1;
                match *g {
                    Gate::Cz(a, b) => out[i] += if bit(a) && bit(b) { -amp } else { amp },
                    Gate::Cp(t, a, b) => {
                        out[i] += if bit(a) && bit(b) {
                            amp * C::from_polar(1.0, t)
                        } else {
                            amp
                        }
                    }
                    Gate::Cx(ctl, tgt) => {
                        let j = if bit(ctl) { i ^ (1 << tgt) } else { i };
                        out[j] += amp;
                    }
                    _ => unreachable!(),
                }
            }
        }
        psi = out;
    }
    psi
}

pub fn probabilities(psi: &[C]) -> Vec<f64> {
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Max amplitude difference after removing the relative global phase.
pub fn phase_aligned_distance(a: &[C], b: &[C]) -> f64 {
    let inner: C = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        C::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

fn pauli_1q(p: Pauli) -> [[C; 2]; 2] {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match p {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

/// Dense matrix of a Pauli string (qubit q = bit q of the index).
pub fn pauli_matrix(p: &PauliString) -> Vec<Vec<C>> {
    let n = p.n();
    let dim = 1usize << n;
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    for (r, row) in m.iter_mut().enumerate() {
        for (col, entry) in row.iter_mut().enumerate() {
            let mut v = C::new(1.0, 0.0);
            for q in 0..n {
                v *= pauli_1q(p.get(q))[(r >> q) & 1][(col >> q) & 1];
            }
            *entry = v;
        }
    }
    m
}

/// `Ã[j][l] = Σ_i χ_i |<j| P_i |l>|²`, computed with dense Pauli matrices.
pub fn assignment_oracle(ch: &PauliChannel) -> Vec<Vec<f64>> {
    let dim = 1usize << ch.n();
    let mut a = vec![vec![0.0; dim]; dim];
    for (p, w) in ch.terms() {
        let m = pauli_matrix(p);
        for (j, row) in a.iter_mut().enumerate() {
            for (l, entry) in row.iter_mut().enumerate() {
                *entry += w * m[j][l].norm_sqr();
            }
        }
    }
    a
}

pub fn naive_hadamard(v: &[f64]) -> Vec<f64> {
    let len = v.len();
    let mut out = vec![0.0; len];
    for (u, o) in out.iter_mut().enumerate() {
        for (x, &w) in v.iter().enumerate() {
            let sign = if (u & x).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *o += sign * w;
        }
    }
    out
}

/// `(a ⊛ x)[s] = Σ_d a[d] x[s ⊕ d]`.
pub fn xor_convolve(a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..a.len())
        .map(|s| (0..a.len()).map(|d| a[d] * x[s ^ d]).sum())
        .collect()
}

pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// ℓ2 projection onto the simplex by trying every support and keeping the
/// feasible candidate closest to `v`.
pub fn simplex_bruteforce(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1usize..(1 << m) {
        let k = mask.count_ones() as f64;
        let sum: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).sum();
        let tau = (sum - 1.0) / k;
        let cand: Vec<f64> = (0..m)
            .map(|i| if mask >> i & 1 == 1 { v[i] - tau } else { 0.0 })
            .collect();
        if cand.iter().any(|&c| c < 0.0) {
            continue;
        }
        let dist: f64 = cand.iter().zip(v).map(|(c, x)| (c - x).powi(2)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, cand));
        }
    }
    best.expect("the support of the largest entry is always feasible")
        .1
}

/// Random probability vector; roughly `zero_fraction` of entries are zero.
pub fn random_distribution<R: Rng>(rng: &mut R, len: usize, zero_fraction: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| {
            if rng.gen_bool(zero_fraction) {
                0.0
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[rng.gen_range(0..len)] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// `(Σ √(p q))²` over dense vectors.
pub fn fidelity_dense(p: &[f64], q: &[f64]) -> f64 {
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    bc * bc
}
