//! Pauli twirling of CZ gates (randomized compiling).
//!
//! Every CZ is dressed as `P' · CZ · P` with `P` uniform over the 16
//! two-qubit Paulis and `P' = CZ P CZ`, which leaves the ideal unitary
//! unchanged up to global phase while averaging the CZ noise into a Pauli
//! channel.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LoweringError;
use crate::circuit::{Circuit, Gate};
use crate::pauli::{Pauli, PauliString};
use crate::sim::local_pauli;

/// One twirled CZ. Labels list the Pauli on the first CZ qubit, then the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwirlSite {
    /// Index of the CZ in the untwirled circuit.
    pub op_index: usize,
    pub qubits: [usize; 2],
    pub pre: String,
    pub post: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwirlRecord {
    pub seed: u64,
    pub sites: Vec<TwirlSite>,
}

fn pair_label(p: &PauliString, a: usize, b: usize) -> String {
    [p.get(a).symbol(), p.get(b).symbol()].iter().collect()
}

fn parse_pair(label: &str) -> Option<[Pauli; 2]> {
    let mut it = label.chars().map(|ch| match ch {
        'I' => Some(Pauli::I),
        'X' => Some(Pauli::X),
        'Y' => Some(Pauli::Y),
        'Z' => Some(Pauli::Z),
        _ => None,
    });
    let first = it.next()??;
    let second = it.next()??;
    if it.next().is_some() {
        return None;
    }
    Some([first, second])
}

/// Native gates for a single-qubit Pauli, up to global phase.
fn pauli_gates(p: Pauli, q: usize, out: &mut Vec<Gate>) {
    match p {
        Pauli::I => {}
        Pauli::X => out.push(Gate::X(q)),
        Pauli::Z => out.push(Gate::Rz(PI, q)),
        Pauli::Y => {
            out.push(Gate::Rz(PI, q));
            out.push(Gate::X(q));
        }
    }
}

/// Draw a twirl for every CZ of a native circuit.
pub fn sample_twirl(c: &Circuit, seed: u64) -> Result<TwirlRecord, LoweringError> {
    c.ensure_native()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.n_qubits();
    let mut sites = Vec::new();
    for (op_index, g) in c.ops().iter().enumerate() {
        if let Gate::Cz(a, b) = *g {
            let pre = local_pauli(n, &[a, b], rng.gen_range(0..16));
            let post = pre.conjugate_cz(a, b);
            sites.push(TwirlSite {
                op_index,
                qubits: [a, b],
                pre: pair_label(&pre, a, b),
                post: pair_label(&post, a, b),
            });
        }
    }
    Ok(TwirlRecord { seed, sites })
}

/// Insert the Paulis of `record` around the CZ gates of `c`.
///
/// The record must have been drawn for a circuit with the same CZ placement;
/// a payload and its noise estimation circuit qualify.
pub fn apply_twirl(c: &Circuit, record: &TwirlRecord) -> Result<Circuit, LoweringError> {
    c.ensure_native()?;
    let mut sites = record.sites.iter();
    let mut ops = Vec::with_capacity(c.len() + 4 * record.sites.len());
    for (i, g) in c.ops().iter().enumerate() {
        let Gate::Cz(a, b) = *g else {
            ops.push(*g);
            continue;
        };
        let site = sites
            .next()
            .ok_or_else(|| LoweringError::TwirlMismatch(format!("no site for CZ at op {i}")))?;
        if site.op_index != i || site.qubits != [a, b] {
            return Err(LoweringError::TwirlMismatch(format!(
                "site for op {} on {:?} does not match CZ at op {i} on [{a}, {b}]",
                site.op_index, site.qubits
            )));
        }
        let bad = || LoweringError::TwirlMismatch(format!("bad Pauli labels at op {i}"));
        let pre = parse_pair(&site.pre).ok_or_else(bad)?;
        let post = parse_pair(&site.post).ok_or_else(bad)?;
        pauli_gates(pre[0], a, &mut ops);
        pauli_gates(pre[1], b, &mut ops);
        ops.push(*g);
        pauli_gates(post[0], a, &mut ops);
        pauli_gates(post[1], b, &mut ops);
    }
    if sites.next().is_some() {
        return Err(LoweringError::TwirlMismatch(
            "record has more sites than the circuit has CZ gates".into(),
        ));
    }
    let mut out = Circuit::new(c.n_qubits())?.named(c.name.clone());
    out.extend(ops)?;
    Ok(out)
}

/// Twirl every CZ of a native circuit; deterministic in `seed`.
pub fn pauli_twirl(c: &Circuit, seed: u64) -> Result<(Circuit, TwirlRecord), LoweringError> {
    let record = sample_twirl(c, seed)?;
    let twirled = apply_twirl(c, &record)?;
    Ok((twirled, record))
}
