//! GF(2) subspace compaction of sparse distributions.
//!
//! Deconvolution needs `z` and `a` on a common power-of-two index set on
//! which XOR is the group operation. Both supports are mapped into the span
//! `V` of the column support and the payload support shifted by its argmax
//! `z0`; coordinates with respect to a basis of `V` are a group isomorphism
//! `V -> (Z_2)^t`, so XOR convolution on `V` is exactly convolution of the
//! compact arrays.

use super::{AssignmentColumn, DecError};
use crate::distribution::SparseDistribution;

/// Default cap on the reduced dimension: arrays of at most `2^15` entries.
pub const DEFAULT_T_MAX: usize = 15;
/// Hard limit on `t_max` to keep dense arrays addressable.
pub const MAX_T: usize = 30;

/// Basis of a GF(2) subspace kept in reduced row-echelon form: every pivot
/// bit is set in exactly one basis vector.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gf2Basis {
    vectors: Vec<u64>,
    pivots: Vec<u32>,
}

impl Gf2Basis {
    pub fn new() -> Gf2Basis {
        Gf2Basis::default()
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[u64] {
        &self.vectors
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for (&b, &p) in self.vectors.iter().zip(&self.pivots) {
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Add `v` to the spanning set; returns whether the dimension grew.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pivot = 63 - r.leading_zeros();
        for b in &mut self.vectors {
            if *b >> pivot & 1 == 1 {
                *b ^= r;
            }
        }
        self.vectors.push(r);
        self.pivots.push(pivot);
        true
    }

    /// Coordinate index of `v` (bit `i` = coefficient of basis vector `i`).
    pub fn coordinates(&self, v: u64) -> Option<usize> {
        let mut coord = 0usize;
        let mut rebuilt = 0u64;
        for (i, (&b, &p)) in self.vectors.iter().zip(&self.pivots).enumerate() {
            if v >> p & 1 == 1 {
                coord |= 1 << i;
                rebuilt ^= b;
            }
        }
        (rebuilt == v).then_some(coord)
    }

    pub fn vector(&self, coord: usize) -> u64 {
        self.vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| coord >> i & 1 == 1)
            .fold(0, |acc, (_, &b)| acc ^ b)
    }
}

/// Bijection between retained outcomes `z0 ^ v` (`v ∈ V`) and `0..2^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedIndexMap {
    n: usize,
    basis: Gf2Basis,
    reference: u64,
}

impl ReducedIndexMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.basis.dim()
    }

    pub fn len(&self) -> usize {
        1 << self.t()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn basis(&self) -> &[u64] {
        self.basis.vectors()
    }

    /// The reference outcome `z0`.
    pub fn reference(&self) -> u64 {
        self.reference
    }

    pub fn displacement_index(&self, d: u64) -> Option<usize> {
        self.basis.coordinates(d)
    }

    pub fn outcome_index(&self, s: u64) -> Option<usize> {
        self.basis.coordinates(s ^ self.reference)
    }

    pub fn displacement(&self, index: usize) -> u64 {
        self.basis.vector(index)
    }

    pub fn outcome(&self, index: usize) -> u64 {
        self.reference ^ self.basis.vector(index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compaction {
    pub map: ReducedIndexMap,
    /// `z'[i] = z[outcome(i)]`.
    pub z: Vec<f64>,
    /// `a'[i] = a[displacement(i)]`.
    pub a: Vec<f64>,
    /// Payload mass outside the retained coset.
    pub dropped_z_mass: f64,
    /// Column mass outside the retained subspace.
    pub dropped_a_mass: f64,
}

impl Compaction {
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_z_mass + self.dropped_a_mass
    }

    pub fn is_lossless(&self) -> bool {
        self.dropped_z_mass == 0.0 && self.dropped_a_mass == 0.0
    }
}

/// Map `z` and `a` onto a common subspace of dimension at most `t_max`.
///
/// If the full span is too large, support elements are discarded in order of
/// increasing weight until it fits. Every support element that still lies in
/// the final span is kept.
pub fn compact_subspace(
    z: &SparseDistribution,
    a: &AssignmentColumn,
    t_max: usize,
) -> Result<Compaction, DecError> {
    if t_max == 0 || t_max > MAX_T {
        return Err(DecError::InvalidTMax(t_max));
    }
    let n = z.n();
    if a.n() != n {
        return Err(DecError::WidthMismatch(n, a.n()));
    }
    if z.is_empty() || a.is_empty() {
        return Err(DecError::Empty);
    }
    let reference = z.argmax().ok_or(DecError::Empty)?;

    // (weight, source, displacement) with the column first on ties
    let mut elements: Vec<(f64, u8, u64)> = a
        .iter()
        .map(|(d, w)| (w, 0u8, d))
        .chain(z.iter().map(|(s, w)| (w, 1u8, s ^ reference)))
        .collect();
    elements.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut basis = Gf2Basis::new();
    for &(_, _, v) in &elements {
        if basis.contains(v) {
            continue;
        }
        if basis.dim() == t_max {
            break;
        }
        basis.insert(v);
    }

    let map = ReducedIndexMap {
        n,
        basis,
        reference,
    };
    let len = map.len();
    let mut zc = vec![0.0; len];
    let mut ac = vec![0.0; len];
    let mut dropped_z_mass = 0.0;
    let mut dropped_a_mass = 0.0;
    for (s, w) in z.iter() {
        match map.outcome_index(s) {
            Some(i) => zc[i] += w,
            None => dropped_z_mass += w,
        }
    }
    for (d, w) in a.iter() {
        match map.displacement_index(d) {
            Some(i) => ac[i] += w,
            None => dropped_a_mass += w,
        }
    }
    Ok(Compaction {
        map,
        z: zc,
        a: ac,
        dropped_z_mass,
        dropped_a_mass,
    })
}
