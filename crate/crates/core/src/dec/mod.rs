//! Distribution correction for Pauli noise.
//!
//! Under a Pauli channel the noisy distribution `z` is the XOR convolution of
//! the ideal distribution `x` with one column `a` of the assignment matrix,
//! indexed by displacement (`observed ^ ideal`). Correction measures a single
//! column from a noise estimation circuit with known ideal output `k`,
//! relabels it to displacements, restricts both vectors to a common GF(2)
//! subspace, divides Walsh-Hadamard spectra and projects the result back onto
//! the probability simplex.

mod fwht;
mod simplex;
mod subspace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{DistributionError, SparseDistribution};

pub use fwht::{
    deconvolve, fwht, fwht_in_place, ifwht, ifwht_in_place, Deconvolution, DEFAULT_EPS,
};
pub use simplex::{project_distribution, project_to_simplex};
pub use subspace::{compact_subspace, Compaction, Gf2Basis, ReducedIndexMap, DEFAULT_T_MAX, MAX_T};

/// Quasi entries smaller than this in magnitude are dropped after mapping back.
const QUASI_FLOOR: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecError {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("width mismatch: {0} vs {1} bits")]
    WidthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("non-finite input")]
    NonFinite,
    #[error("t_max must be in 1..={max}, got {0}", max = MAX_T)]
    InvalidTMax(usize),
    #[error("eps must be a nonnegative number, got {0}")]
    InvalidEps(f64),
    #[error("dense path limited to {max} qubits, got {0}", max = MAX_T)]
    TooWideForDense(usize),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// One column of the assignment matrix indexed by displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentColumn(SparseDistribution);

impl AssignmentColumn {
    pub fn new(d: SparseDistribution) -> Result<AssignmentColumn, DecError> {
        d.ensure_strict()?;
        Ok(AssignmentColumn(d))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, displacement: u64) -> f64 {
        self.0.get(displacement)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_distribution(&self) -> &SparseDistribution {
        &self.0
    }

    pub fn to_dense(&self) -> Vec<f64> {
        self.0.to_dense()
    }
}

/// `a[d] = b[d ^ k]`: the column measured at ideal outcome `k`, moved to displacements.
pub fn relabel_column(b: &SparseDistribution, k: u64) -> Result<AssignmentColumn, DecError> {
    AssignmentColumn::new(b.xor_relabel(k))
}

/// `F(p, q) = (Σ_i sqrt(p_i q_i))^2`.
pub fn fidelity(p: &SparseDistribution, q: &SparseDistribution) -> Result<f64, DecError> {
    p.ensure_strict()?;
    q.ensure_strict()?;
    if p.n() != q.n() {
        return Err(DecError::WidthMismatch(p.n(), q.n()));
    }
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    let bc: f64 = small.iter().map(|(k, w)| (w * large.get(k)).sqrt()).sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionOptions {
    pub t_max: usize,
    pub eps: f64,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        CorrectionOptions {
            t_max: DEFAULT_T_MAX,
            eps: DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Reduced dimension; the dense arrays had `2^t` entries.
    pub t: usize,
    /// How the common index set was built.
    pub compaction: String,
    /// Argmax of the payload distribution, the reference outcome `z0`.
    pub reference: String,
    pub dropped_mass: f64,
    pub dropped_payload_mass: f64,
    pub dropped_column_mass: f64,
    pub zeroed_bins: usize,
    /// Sum of negative quasi weights before projection (≤ 0).
    pub negative_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub corrected: SparseDistribution,
    pub quasi: SparseDistribution,
    pub diagnostics: Diagnostics,
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.iter().map(|x| x / total).collect()
}

fn finish(
    n: usize,
    quasi_entries: Vec<(u64, f64)>,
    mut diagnostics: Diagnostics,
) -> Result<Correction, DecError> {
    let quasi = SparseDistribution::quasi(
        n,
        quasi_entries
            .into_iter()
            .filter(|(_, w)| w.abs() >= QUASI_FLOOR),
    )?;
    diagnostics.negative_mass = quasi.negative_mass();
    let corrected = project_distribution(&quasi)?;
    Ok(Correction {
        corrected,
        quasi,
        diagnostics,
    })
}

fn check_inputs(z: &SparseDistribution, b: &SparseDistribution) -> Result<(), DecError> {
    z.ensure_strict()?;
    b.ensure_strict()?;
    if z.n() != b.n() {
        return Err(DecError::WidthMismatch(z.n(), b.n()));
    }
    Ok(())
}

/// Correct the payload distribution `z` with the noise estimation
/// distribution `b` whose ideal output is `k`.
pub fn correct(
    z: &SparseDistribution,
    b: &SparseDistribution,
    k: u64,
    opts: &CorrectionOptions,
) -> Result<Correction, DecError> {
    check_inputs(z, b)?;
    let a = relabel_column(b, k)?;
    let compaction = compact_subspace(z, &a, opts.t_max)?;
    let dec = deconvolve(
        &normalized(&compaction.z),
        &normalized(&compaction.a),
        opts.eps,
    )?;
    let map = &compaction.map;
    let entries = dec
        .x
        .iter()
        .enumerate()
        .map(|(i, &w)| (map.outcome(i), w))
        .collect();
    let diagnostics = Diagnostics {
        t: map.t(),
        compaction: "gf2-subspace".into(),
        reference: crate::distribution::bitstring(map.reference(), z.n()),
        dropped_mass: compaction.dropped_mass(),
        dropped_payload_mass: compaction.dropped_z_mass,
        dropped_column_mass: compaction.dropped_a_mass,
        zeroed_bins: dec.zeroed_bins,
        negative_mass: 0.0,
    };
    finish(z.n(), entries, diagnostics)
}

/// Same correction on the full `2^n` outcome space with no compaction.
pub fn correct_dense(
    z: &SparseDistribution,
    b: &SparseDistribution,
    k: u64,
    eps: f64,
) -> Result<Correction, DecError> {
    check_inputs(z, b)?;
    let n = z.n();
    if n > MAX_T {
        return Err(DecError::TooWideForDense(n));
    }
    let a = relabel_column(b, k)?;
    let dec = deconvolve(&z.to_dense(), &a.to_dense(), eps)?;
    let entries = dec
        .x
        .iter()
        .enumerate()
        .map(|(i, &w)| (i as u64, w))
        .collect();
    let diagnostics = Diagnostics {
        t: n,
        compaction: "dense".into(),
        reference: crate::distribution::bitstring(0, n),
        dropped_mass: 0.0,
        dropped_payload_mass: 0.0,
        dropped_column_mass: 0.0,
        zeroed_bins: dec.zeroed_bins,
        negative_mass: 0.0,
    };
    finish(n, entries, diagnostics)
}
