//! Noiseless and Pauli-noisy circuit simulation.
//!
//! Noise model: one depolarizing channel immediately after every gate (rate
//! `p1` after single-qubit gates, `p2` after two-qubit gates), nothing on
//! idle qubits, then an optional independent readout bit flip with rate
//! `p_meas` on every qubit. The trajectory sampler and the exact
//! density-matrix path use the same placement.

mod assignment;
mod density;
mod statevector;
mod trajectory;

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::distribution::{DistributionError, SparseDistribution};
use crate::pauli::PauliString;

pub use assignment::{
    brute_force_assignment, exact_column_oracle, AssignmentMatrix, ChannelError, PauliChannel,
    MAX_BRUTE_FORCE_QUBITS,
};
pub use density::DensityMatrix;
pub use statevector::StateVector;

pub(crate) use density::local_pauli;

pub const DEFAULT_MAX_STATEVECTOR_QUBITS: usize = 20;
pub const DEFAULT_MAX_DENSITY_QUBITS: usize = 8;

/// Probabilities below this are dropped from simulated distributions.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the {what} cap of {cap}")]
    QubitCap {
        n: usize,
        cap: usize,
        what: &'static str,
    },
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("shots must be at least 1")]
    NoShots,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Dec(#[from] crate::dec::DecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Single-qubit depolarizing probability.
    pub p1: f64,
    /// Two-qubit depolarizing probability.
    pub p2: f64,
    /// Per-qubit readout bit-flip probability.
    #[serde(default)]
    pub p_meas: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_meas: f64) -> Result<NoiseModel, SimError> {
        let nm = NoiseModel { p1, p2, p_meas };
        nm.validate()?;
        Ok(nm)
    }

    pub fn noiseless() -> NoiseModel {
        NoiseModel::default()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p_meas", self.p_meas)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidNoise(format!(
                    "{name} = {p} not in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn rate_for_arity(&self, arity: usize) -> f64 {
        if arity == 1 {
            self.p1
        } else {
            self.p2
        }
    }
}

/// Histogram of measured outcomes.
pub type Counts = BTreeMap<u64, u64>;

/// Simulation limits and trajectory batching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    pub max_statevector_qubits: usize,
    pub max_density_qubits: usize,
    /// Shots drawn from each sampled trajectory.
    pub shots_per_trajectory: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            max_statevector_qubits: DEFAULT_MAX_STATEVECTOR_QUBITS,
            max_density_qubits: DEFAULT_MAX_DENSITY_QUBITS,
            shots_per_trajectory: 1,
        }
    }
}

fn dist_from_probs(n: usize, probs: &[f64]) -> Result<SparseDistribution, DistributionError> {
    SparseDistribution::strict(
        n,
        probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= PROBABILITY_FLOOR)
            .map(|(i, &p)| (i as u64, p)),
    )
}

/// Independent bit flip with probability `p` on every qubit of a dense distribution.
fn apply_readout_flips(probs: &mut [f64], n: usize, p: f64) {
    if p == 0.0 {
        return;
    }
    for q in 0..n {
        let bit = 1usize << q;
        for i in 0..probs.len() {
            if i & bit == 0 {
                let (a, b) = (probs[i], probs[i | bit]);
                probs[i] = (1.0 - p) * a + p * b;
                probs[i | bit] = (1.0 - p) * b + p * a;
            }
        }
    }
}

impl Simulator {
    fn check_statevector(&self, n: usize) -> Result<(), SimError> {
        if n > self.max_statevector_qubits {
            return Err(SimError::QubitCap {
                n,
                cap: self.max_statevector_qubits,
                what: "statevector",
            });
        }
        Ok(())
    }

    fn check_density(&self, n: usize) -> Result<(), SimError> {
        if n > self.max_density_qubits {
            return Err(SimError::QubitCap {
                n,
                cap: self.max_density_qubits,
                what: "density-matrix",
            });
        }
        Ok(())
    }

    pub fn statevector(&self, c: &Circuit) -> Result<StateVector, SimError> {
        self.check_statevector(c.n_qubits())?;
        let mut psi = StateVector::zero(c.n_qubits());
        for g in c.ops() {
            psi.apply(g);
        }
        Ok(psi)
    }

    pub fn simulate_noiseless(&self, c: &Circuit) -> Result<SparseDistribution, SimError> {
        let psi = self.statevector(c)?;
        Ok(dist_from_probs(c.n_qubits(), &psi.probabilities())?)
    }

    /// Trajectory sampling. Trajectory `t` draws from its own ChaCha stream
    /// `(seed, t)`, so counts do not depend on thread scheduling.
    pub fn sample_counts(
        &self,
        c: &Circuit,
        nm: &NoiseModel,
        shots: u64,
        seed: u64,
    ) -> Result<Counts, SimError> {
        let n = c.n_qubits();
        self.check_statevector(n)?;
        nm.validate()?;
        if shots == 0 {
            return Err(SimError::NoShots);
        }
        let per = self.shots_per_trajectory.max(1) as u64;
        let trajectories = shots.div_ceil(per);

        // Error-free trajectories sample straight from the ideal distribution.
        let ideal = self.statevector(c)?.probabilities();
        let ideal_cdf = cumulative(&ideal);
        let compiled = trajectory::CompiledCircuit::new(c);

        let merged = (0..trajectories)
            .into_par_iter()
            .fold(HashMap::<u64, u64>::new, |mut acc, t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let take = per.min(shots - t * per);
                let events = sample_events(c, nm, &mut rng);
                if events.is_empty() {
                    for _ in 0..take {
                        let outcome = draw_from_cdf(&ideal_cdf, rng.gen());
                        *acc.entry(readout(outcome, n, nm.p_meas, &mut rng))
                            .or_default() += 1;
                    }
                } else {
                    let probs = compiled.run(&events);
                    for _ in 0..take {
                        let outcome = draw_linear(&probs, rng.gen());
                        *acc.entry(readout(outcome, n, nm.p_meas, &mut rng))
                            .or_default() += 1;
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });
        Ok(merged.into_iter().collect())
    }

    /// Empirical distribution of [`Simulator::sample_counts`].
    pub fn sample_noisy(
        &self,
        c: &Circuit,
        nm: &NoiseModel,
        shots: u64,
        seed: u64,
    ) -> Result<SparseDistribution, SimError> {
        let counts = self.sample_counts(c, nm, shots, seed)?;
        Ok(counts_to_distribution(c.n_qubits(), &counts)?)
    }

    /// Evolve `initial` through `c` under `nm` exactly and return the
    /// measured outcome probabilities (readout flips included).
    pub(crate) fn exact_noisy_probs(
        &self,
        c: &Circuit,
        nm: &NoiseModel,
        initial: &StateVector,
    ) -> Result<Vec<f64>, SimError> {
        let n = c.n_qubits();
        self.check_density(n)?;
        nm.validate()?;
        let mut rho = DensityMatrix::from_pure(initial);
        for g in c.ops() {
            rho.apply(g);
            let qubits = g.qubits();
            rho.depolarize(&qubits, nm.rate_for_arity(qubits.len()));
        }
        let mut probs: Vec<f64> = rho.diagonal().into_iter().map(|p| p.max(0.0)).collect();
        apply_readout_flips(&mut probs, n, nm.p_meas);
        Ok(probs)
    }

    pub fn exact_noisy_distribution(
        &self,
        c: &Circuit,
        nm: &NoiseModel,
    ) -> Result<SparseDistribution, SimError> {
        self.check_density(c.n_qubits())?;
        let probs = self.exact_noisy_probs(c, nm, &StateVector::zero(c.n_qubits()))?;
        Ok(dist_from_probs(c.n_qubits(), &probs)?)
    }
}

pub fn counts_to_distribution(
    n: usize,
    counts: &Counts,
) -> Result<SparseDistribution, DistributionError> {
    SparseDistribution::from_counts(n, counts.iter().map(|(&k, &v)| (k, v as f64)))
}

fn sample_events(c: &Circuit, nm: &NoiseModel, rng: &mut ChaCha8Rng) -> Vec<(usize, PauliString)> {
    let mut events = Vec::new();
    for (i, g) in c.ops().iter().enumerate() {
        let (pair, arity) = match *g {
            Gate::Cz(a, b) | Gate::Cx(a, b) | Gate::Cp(_, a, b) => ([a, b], 2),
            Gate::Sx(q) | Gate::Rz(_, q) | Gate::X(q) | Gate::H(q) | Gate::Ry(_, q) => ([q, q], 1),
        };
        let p = nm.rate_for_arity(arity);
        if p > 0.0 && rng.gen::<f64>() < p {
            let nontrivial = (1usize << (2 * arity)) - 1;
            let code = rng.gen_range(1..=nontrivial);
            events.push((i, local_pauli(c.n_qubits(), &pair[..arity], code)));
        }
    }
    events
}

fn readout(outcome: u64, n: usize, p_meas: f64, rng: &mut ChaCha8Rng) -> u64 {
    if p_meas == 0.0 {
        return outcome;
    }
    let mut out = outcome;
    for q in 0..n {
        if rng.gen::<f64>() < p_meas {
            out ^= 1 << q;
        }
    }
    out
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn last_nonzero(probs: impl DoubleEndedIterator<Item = f64> + ExactSizeIterator) -> u64 {
    let len = probs.len();
    probs
        .rev()
        .position(|p| p > 0.0)
        .map_or(0, |from_end| (len - 1 - from_end) as u64)
}

fn draw_from_cdf(cdf: &[f64], u: f64) -> u64 {
    let target = u * cdf.last().copied().unwrap_or(1.0);
    let i = cdf.partition_point(|&c| c <= target);
    if i < cdf.len() {
        i as u64
    } else {
        let probs = cdf.iter().scan(0.0, |prev, &c| {
            let p = c - *prev;
            *prev = c;
            Some(p)
        });
        last_nonzero(probs.collect::<Vec<_>>().into_iter())
    }
}

fn draw_linear(probs: &[f64], u: f64) -> u64 {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if target < acc {
            return i as u64;
        }
    }
    last_nonzero(probs.iter().copied())
}

/// Noiseless output distribution with the default qubit cap.
pub fn simulate_noiseless(c: &Circuit) -> Result<SparseDistribution, SimError> {
    Simulator::default().simulate_noiseless(c)
}

/// Trajectory-sampled noisy distribution with default settings.
pub fn sample_noisy(
    c: &Circuit,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<SparseDistribution, SimError> {
    Simulator::default().sample_noisy(c, nm, shots, seed)
}

/// Exact output distribution from density-matrix evolution.
pub fn exact_noisy_distribution(
    c: &Circuit,
    nm: &NoiseModel,
) -> Result<SparseDistribution, SimError> {
    Simulator::default().exact_noisy_distribution(c, nm)
}
