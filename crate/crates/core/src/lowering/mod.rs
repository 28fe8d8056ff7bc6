//! Lowering to the native set {CZ, SX, RZ, X}, Pauli twirling, noise
//! estimation circuits and the benchmark circuit catalog.

mod catalog;
mod nec;
mod twirl;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};

pub use catalog::{catalog, optimal_grover_iterations, Family};
pub use nec::{build_nec, nec_ideal_output};
pub use twirl::{apply_twirl, pauli_twirl, sample_twirl, TwirlRecord, TwirlSite};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoweringError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("noise estimation circuit contains SX at op {0}")]
    SxInNec(usize),
    #[error("twirl record does not match circuit: {0}")]
    TwirlMismatch(String),
    #[error("invalid catalog parameters: {0}")]
    InvalidParams(String),
}

const ZERO_ANGLE_TOL: f64 = 1e-12;

fn is_zero_angle(theta: f64) -> bool {
    let r = theta.rem_euclid(TAU);
    r < ZERO_ANGLE_TOL || TAU - r < ZERO_ANGLE_TOL
}

/// `U(θ, φ, λ)` as `RZ(λ) SX RZ(θ + π) SX RZ(φ + π)` in circuit order.
pub fn u3_native(theta: f64, phi: f64, lambda: f64, q: usize) -> [Gate; 5] {
    [
        Gate::Rz(lambda, q),
        Gate::Sx(q),
        Gate::Rz(theta + PI, q),
        Gate::Sx(q),
        Gate::Rz(phi + PI, q),
    ]
}

fn h_native(q: usize) -> [Gate; 3] {
    [Gate::Rz(FRAC_PI_2, q), Gate::Sx(q), Gate::Rz(FRAC_PI_2, q)]
}

fn cx_via_cz(ctrl: usize, tgt: usize, out: &mut Vec<Gate>) {
    out.push(Gate::H(tgt));
    out.push(Gate::Cz(ctrl, tgt));
    out.push(Gate::H(tgt));
}

/// Remove adjacent `H·H` pairs on the same wire.
fn cancel_hadamard_pairs(ops: &[Gate], n: usize) -> Vec<Gate> {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(ops.len());
    let mut last_h: Vec<Option<usize>> = vec![None; n];
    for g in ops {
        match *g {
            Gate::H(q) => match last_h[q].take() {
                Some(idx) => out[idx] = None,
                None => {
                    out.push(Some(*g));
                    last_h[q] = Some(out.len() - 1);
                }
            },
            _ => {
                for q in g.qubits() {
                    last_h[q] = None;
                }
                out.push(Some(*g));
            }
        }
    }
    out.into_iter().flatten().collect()
}

/// Merge runs of RZ on the same wire into the first RZ of the run and drop
/// rotations whose angle is a multiple of 2π.
pub fn merge_rz(c: &Circuit) -> Circuit {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(c.len());
    let mut last_rz: Vec<Option<usize>> = vec![None; c.n_qubits()];
    for g in c.ops() {
        match *g {
            Gate::Rz(t, q) => match last_rz[q] {
                Some(idx) => {
                    if let Some(Gate::Rz(prev, _)) = out[idx] {
                        out[idx] = Some(Gate::Rz(prev + t, q));
                    }
                }
                None => {
                    out.push(Some(*g));
                    last_rz[q] = Some(out.len() - 1);
                }
            },
            _ => {
                for q in g.qubits() {
                    last_rz[q] = None;
                }
                out.push(Some(*g));
            }
        }
    }
    let ops = out
        .into_iter()
        .flatten()
        .filter(|g| !matches!(g, Gate::Rz(t, _) if is_zero_angle(*t)))
        .collect();
    Circuit::from_validated(c.n_qubits(), ops, c.name.clone())
}

/// Rewrite `c` over {CZ, SX, RZ, X}, preserving its unitary up to global phase.
pub fn lower_to_native(c: &Circuit) -> Result<Circuit, LoweringError> {
    let n = c.n_qubits();
    // First pass: everything except H is native afterwards.
    let mut staged = Vec::with_capacity(c.len() * 3);
    for &g in c.ops() {
        g.validate(n)?;
        match g {
            Gate::Cz(..) | Gate::Sx(_) | Gate::Rz(..) | Gate::X(_) | Gate::H(_) => staged.push(g),
            Gate::Ry(theta, q) => staged.extend(u3_native(theta, 0.0, 0.0, q)),
            Gate::Cx(ctrl, tgt) => cx_via_cz(ctrl, tgt, &mut staged),
            Gate::Cp(lambda, a, b) => {
                staged.push(Gate::Rz(lambda / 2.0, a));
                staged.push(Gate::Rz(lambda / 2.0, b));
                cx_via_cz(a, b, &mut staged);
                staged.push(Gate::Rz(-lambda / 2.0, b));
                cx_via_cz(a, b, &mut staged);
            }
        }
    }
    let mut ops = Vec::with_capacity(staged.len() * 2);
    for g in cancel_hadamard_pairs(&staged, n) {
        match g {
            Gate::H(q) => ops.extend(h_native(q)),
            other => ops.push(other),
        }
    }
    let lowered = Circuit::from_validated(n, ops, c.name.clone());
    Ok(merge_rz(&lowered))
}
