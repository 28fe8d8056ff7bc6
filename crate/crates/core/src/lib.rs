//! Distribution error correction for Pauli noise.
//!
//! When the composite noise of a circuit is a Pauli channel, the noisy output
//! distribution is the XOR convolution of the ideal distribution with a single
//! column of the assignment matrix. This crate simulates noisy circuits,
//! characterizes that column with a superposition-free twin of the circuit
//! (SX replaced by X), and inverts the convolution with a fast Walsh-Hadamard
//! transform.
//!
//! Modules:
//! - [`circuit`]: circuit IR and text format
//! - [`lowering`]: native-gate lowering, Pauli twirling, noise estimation circuits, catalog
//! - [`sim`]: statevector, trajectory and density-matrix simulation, brute-force oracles
//! - [`dec`]: FWHT deconvolution, subspace compaction, simplex projection, fidelity
//! - [`pipeline`]: experiment orchestration, persistence and reports
//! - [`validate`]: self-checks exposed by the CLI

pub mod circuit;
pub mod dec;
pub mod distribution;
pub mod lowering;
pub mod pauli;
pub mod pipeline;
pub mod sim;
pub mod validate;

pub use circuit::{gate_counts, parse_circuit, serialize_circuit, Circuit, Gate, GateKind};
pub use distribution::SparseDistribution;
