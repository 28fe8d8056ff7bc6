//! Numerical self-checks: circulant structure of Pauli assignment matrices,
//! the Walsh-Hadamard transform and simplex projection, each against a
//! brute-force reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dec::{deconvolve, fwht, ifwht, project_to_simplex};
use crate::pauli::PauliString;
use crate::sim::{brute_force_assignment, PauliChannel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, cases: usize, max_error: f64, tolerance: f64) -> CheckOutcome {
        CheckOutcome {
            name,
            cases,
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

/// Channel whose identity weight dominates, so every spectral bin is ≥ 0.2.
fn well_conditioned_channel(n: usize, rng: &mut ChaCha8Rng) -> PauliChannel {
    let base = PauliChannel::random(n, rng);
    let terms = base
        .terms()
        .iter()
        .map(|(p, w)| {
            let id = if *p == PauliString::identity(n) {
                0.6
            } else {
                0.0
            };
            (*p, id + 0.4 * w)
        })
        .collect();
    PauliChannel::new(n, terms).expect("convex mix of channels")
}

/// `Ã[j][l] = a[j ^ l]` for random channels on 1..=4 qubits, and exact
/// inversion of `Ã·x` by deconvolution.
pub fn check_circulant(trials: usize, seed: u64) -> (CheckOutcome, CheckOutcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut structure: f64 = 0.0;
    let mut recovery: f64 = 0.0;
    for trial in 0..trials {
        let n = 1 + trial % 4;
        let ch = if trial % 2 == 0 {
            PauliChannel::random(n, &mut rng)
        } else {
            well_conditioned_channel(n, &mut rng)
        };
        let a = brute_force_assignment(&ch).expect("n <= 4");
        let dim = a.dim();
        let col0 = a.column(0);
        for j in 0..dim {
            for l in 0..dim {
                structure = structure.max((a.get(j, l) - col0[j ^ l]).abs());
            }
        }
        if trial % 2 == 1 {
            let mut x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= s);
            let y = a.mul_vec(&x);
            let back = deconvolve(&y, &col0, 0.0).expect("power-of-two lengths").x;
            for (u, v) in back.iter().zip(&x) {
                recovery = recovery.max((u - v).abs());
            }
        }
    }
    (
        CheckOutcome::new("circulant-structure", trials, structure, 1e-12),
        CheckOutcome::new("circulant-recovery", trials / 2, recovery, 1e-9),
    )
}

fn naive_hadamard(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|u| {
            v.iter()
                .enumerate()
                .map(|(x, &w)| if (u & x).count_ones() % 2 == 0 { w } else { -w })
                .sum()
        })
        .collect()
}

/// Transform against the explicit Hadamard matrix, the inverse round trip,
/// and the XOR-convolution theorem, for lengths 1..=2^10.
pub fn check_fwht(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 0..=10 {
        let len = 1usize << n;
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fv = fwht(&v).expect("power of two");
        for (a, b) in fv.iter().zip(naive_hadamard(&v)) {
            worst = worst.max((a - b).abs());
        }
        for (a, b) in ifwht(&fv).expect("power of two").iter().zip(&v) {
            worst = worst.max((a - b).abs());
        }
        let fw = fwht(&w).expect("power of two");
        let product: Vec<f64> = fv.iter().zip(&fw).map(|(a, b)| a * b).collect();
        let conv = ifwht(&product).expect("power of two");
        for (s, c) in conv.iter().enumerate() {
            let direct: f64 = (0..len).map(|x| v[x] * w[x ^ s]).sum();
            worst = worst.max((c - direct).abs());
        }
        cases += 1;
    }
    CheckOutcome::new("fwht", cases, worst, 1e-10)
}

/// Projection by enumerating every candidate support and keeping the one
/// that satisfies the KKT conditions.
pub fn kkt_projection(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    for mask in 1u32..(1 << m) {
        let support: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let shift = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let inside = support.iter().all(|&i| v[i] - shift > 0.0);
        let outside = (0..m)
            .filter(|i| mask >> i & 1 == 0)
            .all(|i| v[i] - shift <= 0.0);
        if inside && outside {
            return v.iter().map(|&x| (x - shift).max(0.0)).collect();
        }
    }
    unreachable!("the projection always has a KKT support")
}

pub fn check_projection(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let m = rng.gen_range(1..=5);
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.5)).collect();
        let got = project_to_simplex(&v).expect("finite input");
        for (a, b) in got.iter().zip(kkt_projection(&v)) {
            worst = worst.max((a - b).abs());
        }
    }
    CheckOutcome::new("simplex-projection", trials, worst, 1e-6)
}

/// All self-checks with default sizes.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let (structure, recovery) = check_circulant(100, seed);
    vec![
        structure,
        recovery,
        check_fwht(seed),
        check_projection(500, seed),
    ]
}
