//! Brute-force assignment matrices and exact column characterization.

use rand::Rng;
use thiserror::Error;

use super::{SimError, Simulator, StateVector, PROBABILITY_FLOOR};
use crate::circuit::Circuit;
use crate::dec::AssignmentColumn;
use crate::distribution::SparseDistribution;
use crate::pauli::PauliString;

pub const MAX_BRUTE_FORCE_QUBITS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("negative weight {0}")]
    NegativeWeight(f64),
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("duplicate Pauli term {0}")]
    Duplicate(String),
    #[error("term acts on {got} qubits, channel has {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("channel has no terms")]
    Empty,
}

/// `ρ -> Σ χ_i P_i ρ P_i` with `χ_i ≥ 0`, `Σ χ_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    n: usize,
    terms: Vec<(PauliString, f64)>,
}

impl PauliChannel {
    pub fn new(n: usize, terms: Vec<(PauliString, f64)>) -> Result<PauliChannel, ChannelError> {
        if terms.is_empty() {
            return Err(ChannelError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for (p, w) in &terms {
            if p.n() != n {
                return Err(ChannelError::WidthMismatch {
                    expected: n,
                    got: p.n(),
                });
            }
            if *w < 0.0 || !w.is_finite() {
                return Err(ChannelError::NegativeWeight(*w));
            }
            if !seen.insert(*p) {
                return Err(ChannelError::Duplicate(p.label()));
            }
        }
        let sum: f64 = terms.iter().map(|t| t.1).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ChannelError::NotNormalized(sum));
        }
        Ok(PauliChannel { n, terms })
    }

    /// Random channel on `n` qubits: a random subset of Pauli strings (always
    /// including the identity) with random weights.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliChannel {
        let total = 1u64 << (2 * n);
        let mut terms = Vec::new();
        for code in 0..total {
            if code == 0 || rng.gen_bool(0.5) {
                let p = PauliString::new(n, code & ((1 << n) - 1), code >> n)
                    .expect("masks fit in n bits");
                terms.push((p, rng.gen::<f64>() + if code == 0 { 1.0 } else { 0.0 }));
            }
        }
        let sum: f64 = terms.iter().map(|t| t.1).sum();
        for t in &mut terms {
            t.1 /= sum;
        }
        PauliChannel::new(n, terms).expect("normalized by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }
}

/// Dense row-major `2^n × 2^n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl AssignmentMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// `Ã[j][l]`: probability that ideal outcome `l` is observed as `j`, built by
/// letting every channel term act on every basis state.
pub fn brute_force_assignment(ch: &PauliChannel) -> Result<AssignmentMatrix, SimError> {
    let n = ch.n();
    if n > MAX_BRUTE_FORCE_QUBITS {
        return Err(SimError::QubitCap {
            n,
            cap: MAX_BRUTE_FORCE_QUBITS,
            what: "brute-force assignment",
        });
    }
    let dim = 1usize << n;
    let mut data = vec![0.0; dim * dim];
    for l in 0..dim {
        for (p, w) in ch.terms() {
            // P|l> = phase * |l ^ x>, so the term moves all of l's weight to l ^ x
            let j = l ^ p.x_mask() as usize;
            data[j * dim + l] += w;
        }
    }
    Ok(AssignmentMatrix { dim, data })
}

/// Column `k` of the composite channel's assignment matrix, relabeled to
/// displacements: prepares `U†|k>` noiselessly, runs the noisy circuit
/// exactly, and returns `d -> P(observe k ^ d)`.
pub fn exact_column_oracle(
    c: &Circuit,
    nm: &super::NoiseModel,
    k: u64,
) -> Result<AssignmentColumn, SimError> {
    Simulator::default().exact_column_oracle(c, nm, k)
}

impl Simulator {
    pub fn exact_column_oracle(
        &self,
        c: &Circuit,
        nm: &super::NoiseModel,
        k: u64,
    ) -> Result<AssignmentColumn, SimError> {
        let n = c.n_qubits();
        self.check_density(n)?;
        let mut initial = StateVector::basis(n, k);
        for g in c.ops().iter().rev() {
            initial.apply_inverse(g);
        }
        let probs = self.exact_noisy_probs(c, nm, &initial)?;
        let column = SparseDistribution::strict(
            n,
            probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p >= PROBABILITY_FLOOR)
                .map(|(i, &p)| (i as u64 ^ k, p)),
        )?;
        Ok(AssignmentColumn::new(column)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn channel(n: usize, terms: &[(&str, f64)]) -> PauliChannel {
        PauliChannel::new(
            n,
            terms
                .iter()
                .map(|(l, w)| (PauliString::from_label(l).unwrap(), *w))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_qubit_bit_flip() {
        let a = brute_force_assignment(&channel(1, &[("I", 0.9), ("X", 0.1)])).unwrap();
        assert_eq!(a.column(0), vec![0.9, 0.1]);
        assert_eq!(a.column(1), vec![0.1, 0.9]);
    }

    #[test]
    fn z_only_channel_is_identity() {
        let a =
            brute_force_assignment(&channel(2, &[("II", 0.5), ("ZI", 0.3), ("ZZ", 0.2)])).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((a.get(r, c) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn channel_validation() {
        let p = PauliString::from_label("X").unwrap();
        assert!(matches!(
            PauliChannel::new(1, vec![(p, 0.5)]),
            Err(ChannelError::NotNormalized(_))
        ));
        assert!(matches!(
            PauliChannel::new(1, vec![(p, 0.5), (p, 0.5)]),
            Err(ChannelError::Duplicate(_))
        ));
        assert!(matches!(
            PauliChannel::new(2, vec![(p, 1.0)]),
            Err(ChannelError::WidthMismatch { .. })
        ));
        assert!(matches!(
            PauliChannel::new(1, vec![(p, 1.5), (PauliString::identity(1), -0.5)]),
            Err(ChannelError::NegativeWeight(_))
        ));
    }

    #[test]
    fn random_channel_is_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let ch = PauliChannel::random(n, &mut rng);
            assert_eq!(ch.n(), n);
            assert!(ch.terms().iter().any(|t| t.0.is_identity()));
        }
        assert!(brute_force_assignment(&PauliChannel::random(7, &mut rng)).is_err());
    }
}
