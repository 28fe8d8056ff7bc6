//! Benchmark circuit families, emitted before lowering.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::LoweringError;
use crate::circuit::{Circuit, Gate};
use crate::sim::DEFAULT_MAX_STATEVECTOR_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `(|0…0> + |1…1>) / √2`.
    Ghz { n: usize },
    /// Uniform superposition of the `n` one-hot strings.
    DickeN1 { n: usize },
    /// Phase estimation of `P(2πθ)` on its `|1>` eigenstate with `counting`
    /// readout qubits; the eigenstate qubit is measured too.
    Qpe { counting: usize, theta: f64 },
    /// Grover search for the all-ones string; `None` uses the optimal count.
    Grover {
        n: usize,
        #[serde(default)]
        iterations: Option<usize>,
    },
}

impl Family {
    pub fn n_qubits(&self) -> usize {
        match *self {
            Family::Ghz { n } | Family::DickeN1 { n } | Family::Grover { n, .. } => n,
            Family::Qpe { counting, .. } => counting + 1,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Family::Ghz { n } => format!("GHZ{n}"),
            Family::DickeN1 { n } => format!("Dicke{n}_1"),
            Family::Qpe { counting, .. } => format!("QPE{}", counting + 1),
            Family::Grover { n, .. } => format!("Grover{n}"),
        }
    }
}

/// `⌊(π/4)·√(2^n)⌋`, at least one.
pub fn optimal_grover_iterations(n: usize) -> usize {
    ((PI / 4.0) * (2f64.powi(n as i32)).sqrt()).floor().max(1.0) as usize
}

fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Diagonal `Z` on the all-ones state of `qubits` (a multi-controlled Z),
/// expanded as a phase polynomial over all parities. For each target the
/// control subsets are visited in Gray-code order so consecutive parities
/// differ by one CX.
fn multi_controlled_z(qubits: &[usize], out: &mut Vec<Gate>) {
    let m = qubits.len();
    let scale = PI / 2f64.powi(m as i32 - 1);
    // x_1 x_2 … x_m = 2^{1-m} Σ_{S ≠ ∅} (-1)^{|S|+1} parity_S(x)
    let angle = |size: u32| if size % 2 == 1 { scale } else { -scale };
    for (j, &target) in qubits.iter().enumerate() {
        let controls = &qubits[..j];
        out.push(Gate::Rz(angle(1), target));
        let mut prev = 0usize;
        for i in 1..(1usize << j) {
            let gray = i ^ (i >> 1);
            let flipped = (gray ^ prev).trailing_zeros() as usize;
            out.push(Gate::Cx(controls[flipped], target));
            out.push(Gate::Rz(angle(gray.count_ones() + 1), target));
            prev = gray;
        }
        if prev != 0 {
            out.push(Gate::Cx(controls[prev.trailing_zeros() as usize], target));
        }
    }
}

fn check_size(n: usize, min: usize) -> Result<(), LoweringError> {
    if n < min || n > DEFAULT_MAX_STATEVECTOR_QUBITS {
        return Err(LoweringError::InvalidParams(format!(
            "qubit count {n} outside {min}..={DEFAULT_MAX_STATEVECTOR_QUBITS}"
        )));
    }
    Ok(())
}

/// Build the pre-lowering circuit for a benchmark family.
pub fn catalog(family: &Family) -> Result<Circuit, LoweringError> {
    let n = family.n_qubits();
    let mut ops = Vec::new();
    match *family {
        Family::Ghz { n } => {
            check_size(n, 1)?;
            ops.push(Gate::H(0));
            for q in 0..n - 1 {
                ops.push(Gate::Cx(q, q + 1));
            }
        }
        Family::DickeN1 { n } => {
            check_size(n, 1)?;
            ops.push(Gate::X(0));
            for k in 0..n - 1 {
                // keep amplitude 1/√n on qubit k, move the rest to k + 1
                let theta = 2.0 * (1.0 / ((n - k) as f64).sqrt()).acos();
                ops.push(Gate::Ry(theta / 2.0, k + 1));
                ops.push(Gate::Cx(k, k + 1));
                ops.push(Gate::Ry(-theta / 2.0, k + 1));
                ops.push(Gate::Cx(k, k + 1));
                ops.push(Gate::Cx(k + 1, k));
            }
        }
        Family::Qpe { counting, theta } => {
            check_size(counting + 1, 2)?;
            if !(0.0..1.0).contains(&theta) {
                return Err(LoweringError::InvalidParams(format!(
                    "theta {theta} outside [0, 1)"
                )));
            }
            let eigen = counting;
            ops.push(Gate::X(eigen));
            for q in 0..counting {
                ops.push(Gate::H(q));
            }
            // counting qubit i accumulates phase 2^{m-1-i} θ and ends up holding bit i
            for i in 0..counting {
                let power = 2f64.powi((counting - 1 - i) as i32);
                ops.push(Gate::Cp(wrap_angle(TAU * theta * power), i, eigen));
            }
            for i in 0..counting {
                for l in 0..i {
                    ops.push(Gate::Cp(-TAU / 2f64.powi((i - l + 1) as i32), l, i));
                }
                ops.push(Gate::H(i));
            }
        }
        Family::Grover { n, iterations } => {
            check_size(n, 1)?;
            let iters = iterations.unwrap_or_else(|| optimal_grover_iterations(n));
            let all: Vec<usize> = (0..n).collect();
            ops.extend(all.iter().map(|&q| Gate::H(q)));
            for _ in 0..iters {
                multi_controlled_z(&all, &mut ops);
                ops.extend(all.iter().map(|&q| Gate::H(q)));
                ops.extend(all.iter().map(|&q| Gate::X(q)));
                multi_controlled_z(&all, &mut ops);
                ops.extend(all.iter().map(|&q| Gate::X(q)));
                ops.extend(all.iter().map(|&q| Gate::H(q)));
            }
        }
    }
    Ok(Circuit::with_ops(n, ops)?.named(family.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_noiseless, Simulator};

    fn probs(f: Family) -> Vec<f64> {
        let c = catalog(&f).unwrap();
        Simulator::default()
            .statevector(&c)
            .unwrap()
            .probabilities()
    }

    #[test]
    fn ghz_distribution() {
        let d = simulate_noiseless(&catalog(&Family::Ghz { n: 2 }).unwrap()).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.get(0) - 0.5).abs() < 1e-12 && (d.get(3) - 0.5).abs() < 1e-12);
        let p = probs(Family::Ghz { n: 5 });
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[31] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dicke_is_uniform_over_one_hot() {
        for n in 1..=6 {
            let p = probs(Family::DickeN1 { n });
            for (i, &v) in p.iter().enumerate() {
                let expect = if (i as u64).count_ones() == 1 {
                    1.0 / n as f64
                } else {
                    0.0
                };
                assert!((v - expect).abs() < 1e-12, "n={n} i={i} p={v}");
            }
        }
    }

    #[test]
    fn qpe_reads_exact_phases() {
        let m = 4;
        for y in 0..16u64 {
            let p = probs(Family::Qpe {
                counting: m,
                theta: y as f64 / 16.0,
            });
            let expected = y | 1 << m;
            assert!((p[expected as usize] - 1.0).abs() < 1e-10, "y={y}");
        }
        let p = probs(Family::Qpe {
            counting: 5,
            theta: 31.0 / 32.0,
        });
        assert!((p[63] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grover_success_probability() {
        // closed form sin²((2k+1)·asin(2^{-n/2}))
        for n in 2..=5 {
            let k = optimal_grover_iterations(n);
            let p = probs(Family::Grover {
                n,
                iterations: None,
            });
            let target = (1usize << n) - 1;
            let expect = ((2 * k + 1) as f64 * (2f64.powf(-(n as f64) / 2.0)).asin())
                .sin()
                .powi(2);
            assert!((p[target] - expect).abs() < 1e-10, "n={n}");
        }
        assert_eq!(optimal_grover_iterations(5), 4);
        let p = probs(Family::Grover {
            n: 5,
            iterations: Some(4),
        });
        assert!((p[31] - 0.9992).abs() < 1e-4);
    }

    #[test]
    fn multi_controlled_z_cx_count() {
        for m in 1..=5 {
            let mut ops = Vec::new();
            multi_controlled_z(&(0..m).collect::<Vec<_>>(), &mut ops);
            let cx = ops.iter().filter(|g| matches!(g, Gate::Cx(..))).count();
            assert_eq!(cx, (1 << m) - 2);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(catalog(&Family::Ghz { n: 0 }).is_err());
        assert!(catalog(&Family::Ghz { n: 21 }).is_err());
        assert!(catalog(&Family::Qpe {
            counting: 3,
            theta: 1.5
        })
        .is_err());
        assert!(catalog(&Family::Qpe {
            counting: 0,
            theta: 0.5
        })
        .is_err());
    }

    #[test]
    fn family_json() {
        let f: Family = serde_json::from_str(r#"{"family":"grover","n":5}"#).unwrap();
        assert_eq!(
            f,
            Family::Grover {
                n: 5,
                iterations: None
            }
        );
        let q: Family =
            serde_json::from_str(r#"{"family":"qpe","counting":5,"theta":0.96875}"#).unwrap();
        assert_eq!(q.n_qubits(), 6);
    }
}
