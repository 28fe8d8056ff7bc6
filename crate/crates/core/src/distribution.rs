//! Sparse distributions over `n`-bit outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Normalization tolerance for both kinds.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("outcome {outcome} does not fit in {n} bits")]
    OutcomeOutOfRange { outcome: u64, n: usize },
    #[error("negative weight {weight} at outcome {outcome} in a strict distribution")]
    Negative { outcome: u64, weight: f64 },
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("non-finite weight at outcome {0}")]
    NonFinite(u64),
    #[error("total count is zero")]
    ZeroTotal,
    #[error("distributions have different widths ({0} vs {1} bits)")]
    WidthMismatch(usize, usize),
    #[error("expected a strict distribution")]
    NotStrict,
    #[error("invalid bitstring `{0}`")]
    InvalidBitstring(String),
    #[error("distributions support at most 64 bits, got {0}")]
    TooWide(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    /// Nonnegative weights summing to one.
    Strict,
    /// Signed weights summing to one.
    Quasi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseDistribution {
    n: usize,
    kind: DistributionKind,
    entries: BTreeMap<u64, f64>,
}

fn check_width(n: usize) -> Result<(), DistributionError> {
    if n > 64 {
        Err(DistributionError::TooWide(n))
    } else {
        Ok(())
    }
}

fn in_range(outcome: u64, n: usize) -> bool {
    n >= 64 || outcome >> n == 0
}

impl SparseDistribution {
    /// Build a strict distribution; zero entries are dropped.
    pub fn strict(
        n: usize,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<SparseDistribution, DistributionError> {
        Self::build(n, DistributionKind::Strict, entries)
    }

    /// Build a quasi distribution; zero entries are dropped.
    pub fn quasi(
        n: usize,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<SparseDistribution, DistributionError> {
        Self::build(n, DistributionKind::Quasi, entries)
    }

    fn build(
        n: usize,
        kind: DistributionKind,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<SparseDistribution, DistributionError> {
        check_width(n)?;
        let mut map = BTreeMap::new();
        for (outcome, weight) in entries {
            if !in_range(outcome, n) {
                return Err(DistributionError::OutcomeOutOfRange { outcome, n });
            }
            if !weight.is_finite() {
                return Err(DistributionError::NonFinite(outcome));
            }
            if kind == DistributionKind::Strict && weight < 0.0 {
                return Err(DistributionError::Negative { outcome, weight });
            }
            *map.entry(outcome).or_insert(0.0) += weight;
        }
        map.retain(|_, w| *w != 0.0);
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(DistributionError::NotNormalized(sum));
        }
        Ok(SparseDistribution {
            n,
            kind,
            entries: map,
        })
    }

    /// Point mass on `outcome`.
    pub fn delta(n: usize, outcome: u64) -> Result<SparseDistribution, DistributionError> {
        Self::strict(n, [(outcome, 1.0)])
    }

    /// Normalize nonnegative counts (or unnormalized weights) into a strict distribution.
    pub fn from_counts(
        n: usize,
        counts: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<SparseDistribution, DistributionError> {
        check_width(n)?;
        let mut raw = Vec::new();
        let mut total = 0.0;
        for (outcome, c) in counts {
            if !in_range(outcome, n) {
                return Err(DistributionError::OutcomeOutOfRange { outcome, n });
            }
            if !c.is_finite() {
                return Err(DistributionError::NonFinite(outcome));
            }
            if c < 0.0 {
                return Err(DistributionError::Negative { outcome, weight: c });
            }
            total += c;
            raw.push((outcome, c));
        }
        if total <= 0.0 {
            return Err(DistributionError::ZeroTotal);
        }
        Self::strict(n, raw.into_iter().map(|(o, c)| (o, c / total)))
    }

    /// Dense vector of length `2^n` (only sensible for small `n`).
    pub fn from_dense(n: usize, probs: &[f64]) -> Result<SparseDistribution, DistributionError> {
        Self::strict(
            n,
            probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(i, &p)| (i as u64, p)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn is_strict(&self) -> bool {
        self.kind == DistributionKind::Strict
    }

    pub fn entries(&self) -> &BTreeMap<u64, f64> {
        &self.entries
    }

    pub fn get(&self, outcome: u64) -> f64 {
        self.entries.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Sum of the negative weights (zero for strict distributions).
    pub fn negative_mass(&self) -> f64 {
        self.entries.values().filter(|w| **w < 0.0).sum()
    }

    /// Highest-weight outcome; ties go to the smallest outcome.
    pub fn argmax(&self) -> Option<u64> {
        let mut best: Option<(u64, f64)> = None;
        for (&k, &v) in &self.entries {
            match best {
                Some((_, bv)) if v <= bv => {}
                _ => best = Some((k, v)),
            }
        }
        best.map(|(k, _)| k)
    }

    /// Dense vector of length `2^n`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1usize << self.n];
        for (&k, &w) in &self.entries {
            v[k as usize] = w;
        }
        v
    }

    /// Relabel every outcome `s` to `s ^ mask`.
    pub fn xor_relabel(&self, mask: u64) -> SparseDistribution {
        SparseDistribution {
            n: self.n,
            kind: self.kind,
            entries: self.entries.iter().map(|(&k, &v)| (k ^ mask, v)).collect(),
        }
    }

    pub fn ensure_strict(&self) -> Result<(), DistributionError> {
        if self.is_strict() {
            Ok(())
        } else {
            Err(DistributionError::NotStrict)
        }
    }
}

/// Format `outcome` as an `n`-character bitstring, most significant (highest qubit) first.
pub fn bitstring(outcome: u64, n: usize) -> String {
    (0..n)
        .rev()
        .map(|q| if outcome >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Result<u64, DistributionError> {
    if s.is_empty() || s.len() > 64 || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(DistributionError::InvalidBitstring(s.to_string()));
    }
    u64::from_str_radix(s, 2).map_err(|_| DistributionError::InvalidBitstring(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_validation() {
        assert!(SparseDistribution::strict(1, [(0, 0.5), (1, 0.5)]).is_ok());
        assert!(matches!(
            SparseDistribution::strict(1, [(0, 1.2), (1, -0.2)]),
            Err(DistributionError::Negative { .. })
        ));
        assert!(SparseDistribution::quasi(1, [(0, 1.2), (1, -0.2)]).is_ok());
        assert!(matches!(
            SparseDistribution::strict(1, [(0, 0.5)]),
            Err(DistributionError::NotNormalized(_))
        ));
        assert!(matches!(
            SparseDistribution::strict(1, [(2, 1.0)]),
            Err(DistributionError::OutcomeOutOfRange { .. })
        ));
    }

    #[test]
    fn counts_normalize() {
        let d = SparseDistribution::from_counts(2, [(0, 100.0), (3, 100.0)]).unwrap();
        assert_eq!(d.get(0), 0.5);
        assert_eq!(d.get(3), 0.5);
        assert_eq!(
            SparseDistribution::from_counts(1, [(0, 0.0)]),
            Err(DistributionError::ZeroTotal)
        );
    }

    #[test]
    fn argmax_breaks_ties_low() {
        let d = SparseDistribution::strict(2, [(3, 0.4), (1, 0.4), (2, 0.2)]).unwrap();
        assert_eq!(d.argmax(), Some(1));
    }

    #[test]
    fn bitstrings() {
        assert_eq!(bitstring(1, 2), "01");
        assert_eq!(bitstring(6, 4), "0110");
        assert_eq!(parse_bitstring("0110").unwrap(), 6);
        assert!(parse_bitstring("01a").is_err());
        assert!(parse_bitstring("").is_err());
    }
}
