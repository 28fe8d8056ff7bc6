//! End-to-end experiments: build, lower, twirl, sample, correct, score, persist.

mod counts;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{gate_counts, parse_circuit, Circuit, CircuitError, GateKind};
use crate::dec::{
    correct, fidelity, Correction, CorrectionOptions, DecError, Diagnostics, DEFAULT_EPS,
};
use crate::distribution::{bitstring, DistributionError, SparseDistribution};
use crate::lowering::{
    apply_twirl, build_nec, catalog, lower_to_native, merge_rz, nec_ideal_output, sample_twirl,
    Family, LoweringError, TwirlRecord,
};
use crate::sim::{counts_to_distribution, Counts, NoiseModel, SimError, Simulator};

pub use counts::{ingest_counts, parse_counts, CountsFile, CountsMetadata};
pub use report::{histogram_csv, render_report, write_report, Report};

pub(crate) use counts::{distribution_to_strings, parse_keyed};

pub const DEFAULT_SHOTS: u64 = 200_000;
pub const DEFAULT_N_RAND: usize = 16;
pub const MAX_PIPELINE_T_MAX: usize = 20;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Lowering(#[from] LoweringError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> PipelineError {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A catalog family or a circuit file in the text format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitSource {
    File { path: PathBuf },
    Catalog(Family),
}

impl CircuitSource {
    pub fn label(&self) -> String {
        match self {
            CircuitSource::Catalog(f) => f.label(),
            CircuitSource::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "circuit".into()),
        }
    }

    pub fn build(&self) -> Result<Circuit, PipelineError> {
        match self {
            CircuitSource::Catalog(f) => Ok(catalog(f)?),
            CircuitSource::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
                Ok(parse_circuit(&text)?.named(self.label()))
            }
        }
    }
}

fn default_noise() -> NoiseModel {
    NoiseModel {
        p1: 1e-3,
        p2: 1e-2,
        p_meas: 0.0,
    }
}
fn default_shots() -> u64 {
    DEFAULT_SHOTS
}
fn default_n_rand() -> usize {
    DEFAULT_N_RAND
}
fn default_t_max() -> usize {
    crate::dec::DEFAULT_T_MAX
}
fn default_eps() -> f64 {
    DEFAULT_EPS
}
fn default_shots_per_trajectory() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub circuit: CircuitSource,
    #[serde(default = "default_noise")]
    pub noise: NoiseModel,
    /// Shots per logical circuit, split across the twirl instances.
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Twirl instances per logical circuit.
    #[serde(default = "default_n_rand")]
    pub n_rand: usize,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    /// Twirl the noise estimation circuit with the payload's Paulis.
    #[serde(default)]
    pub shared_twirls: bool,
    #[serde(default = "default_shots_per_trajectory")]
    pub shots_per_trajectory: usize,
}

impl ExperimentConfig {
    pub fn new(circuit: CircuitSource) -> ExperimentConfig {
        ExperimentConfig {
            circuit,
            noise: default_noise(),
            shots: DEFAULT_SHOTS,
            n_rand: DEFAULT_N_RAND,
            t_max: default_t_max(),
            eps: DEFAULT_EPS,
            seed: 0,
            shared_twirls: false,
            shots_per_trajectory: 1,
        }
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig, PipelineError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        self.noise.validate()?;
        if self.shots == 0 {
            return bad("shots must be positive".into());
        }
        if self.n_rand == 0 {
            return bad("n_rand must be positive".into());
        }
        if self.n_rand as u64 > self.shots {
            return bad(format!(
                "n_rand ({}) exceeds shots ({})",
                self.n_rand, self.shots
            ));
        }
        if !(1..=MAX_PIPELINE_T_MAX).contains(&self.t_max) {
            return bad(format!(
                "t_max {} outside 1..={MAX_PIPELINE_T_MAX}",
                self.t_max
            ));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return bad(format!("eps {} must be finite and non-negative", self.eps));
        }
        if self.shots_per_trajectory == 0 {
            return bad("shots_per_trajectory must be positive".into());
        }
        Ok(())
    }
}

/// Independent per-instance seeds derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
enum SeedStream {
    PayloadTwirl = 1,
    NecTwirl = 2,
    PayloadSampling = 3,
    NecSampling = 4,
}

fn derive_seed(master: u64, stream: SeedStream, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((stream as u64) << 32) | index as u64);
    rng.next_u64()
}

/// Shots of instance `i` when `total` is split as evenly as possible over `parts`.
fn instance_shots(total: u64, parts: usize, i: usize) -> u64 {
    let parts = parts as u64;
    total / parts + u64::from((i as u64) < total % parts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSampling {
    pub instances: usize,
    pub shots: u64,
    pub twirls: Vec<TwirlRecord>,
    pub sampling_seeds: Vec<u64>,
}

/// What was sampled. A run always samples exactly two logical circuits:
/// the payload and its noise estimation circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingManifest {
    pub logical_circuits: usize,
    pub shared_twirls: bool,
    pub noise_placement: String,
    pub payload: CircuitSampling,
    pub nec: CircuitSampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCountSummary {
    pub payload: BTreeMap<GateKind, usize>,
    pub nec: BTreeMap<GateKind, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelities {
    pub raw: f64,
    pub corrected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub label: String,
    pub n_qubits: usize,
    pub config: ExperimentConfig,
    /// Ideal output of the noise estimation circuit.
    pub nec_ideal_output: String,
    pub gate_counts: GateCountSummary,
    pub manifest: SamplingManifest,
    pub fidelity: Fidelities,
    pub diagnostics: Diagnostics,
    pub ideal: BTreeMap<String, f64>,
    pub raw_counts: BTreeMap<String, u64>,
    pub nec_counts: BTreeMap<String, u64>,
    pub quasi: BTreeMap<String, f64>,
    pub corrected: BTreeMap<String, f64>,
}

fn strings_to_distribution(
    n: usize,
    map: &BTreeMap<String, f64>,
    quasi: bool,
) -> Result<SparseDistribution, PipelineError> {
    let entries = if map.is_empty() {
        Vec::new()
    } else {
        let (width, entries) = parse_keyed(map.iter().map(|(k, &v)| (k.as_str(), v)), quasi)?;
        check_width(n, width)?;
        entries
    };
    Ok(if quasi {
        SparseDistribution::quasi(n, entries)?
    } else {
        SparseDistribution::strict(n, entries)?
    })
}

fn check_width(n: usize, width: usize) -> Result<(), PipelineError> {
    if width != n {
        return Err(PipelineError::Schema(format!(
            "expected {n}-bit outcomes, found {width}"
        )));
    }
    Ok(())
}

fn counts_map_to_distribution(
    n: usize,
    counts: &BTreeMap<String, u64>,
) -> Result<SparseDistribution, PipelineError> {
    let (width, entries) = parse_keyed(counts.iter().map(|(k, &v)| (k.as_str(), v as f64)), false)?;
    check_width(n, width)?;
    Ok(SparseDistribution::from_counts(n, entries)?)
}

impl ExperimentResult {
    pub fn ideal_distribution(&self) -> Result<SparseDistribution, PipelineError> {
        strings_to_distribution(self.n_qubits, &self.ideal, false)
    }

    pub fn raw_distribution(&self) -> Result<SparseDistribution, PipelineError> {
        counts_map_to_distribution(self.n_qubits, &self.raw_counts)
    }

    pub fn nec_distribution(&self) -> Result<SparseDistribution, PipelineError> {
        counts_map_to_distribution(self.n_qubits, &self.nec_counts)
    }

    pub fn corrected_distribution(&self) -> Result<SparseDistribution, PipelineError> {
        strings_to_distribution(self.n_qubits, &self.corrected, false)
    }

    pub fn quasi_distribution(&self) -> Result<SparseDistribution, PipelineError> {
        strings_to_distribution(self.n_qubits, &self.quasi, true)
    }

    /// Recompute both fidelities from the stored distributions.
    pub fn recompute_fidelities(&self) -> Result<Fidelities, PipelineError> {
        let ideal = self.ideal_distribution()?;
        Ok(Fidelities {
            raw: fidelity(&ideal, &self.raw_distribution()?)?,
            corrected: fidelity(&ideal, &self.corrected_distribution()?)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn load(path: &Path) -> Result<ExperimentResult, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Write `result.json`, both counts files and `histogram.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), PipelineError> {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
        let meta = |shots: u64| CountsMetadata {
            n_qubits: Some(self.n_qubits),
            shots: Some(shots),
            seed: Some(self.config.seed),
            noise_model: Some(self.config.noise),
        };
        let payload_counts = CountsFile {
            metadata: meta(self.manifest.payload.shots),
            counts: self.raw_counts.clone(),
        };
        let nec_counts = CountsFile {
            metadata: meta(self.manifest.nec.shots),
            counts: self.nec_counts.clone(),
        };
        let files = [
            ("result.json", self.to_json()),
            (
                "raw_counts.json",
                serde_json::to_string_pretty(&payload_counts)?,
            ),
            (
                "nec_counts.json",
                serde_json::to_string_pretty(&nec_counts)?,
            ),
            ("histogram.csv", histogram_csv(self)?),
        ];
        for (name, body) in files {
            let path = dir.join(name);
            std::fs::write(&path, body + "\n").map_err(|e| PipelineError::io(&path, e))?;
        }
        Ok(())
    }
}

/// Standalone correction output, as written by the `correct` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionFile {
    pub n_qubits: usize,
    pub nec_ideal_output: String,
    pub corrected: BTreeMap<String, f64>,
    pub quasi: BTreeMap<String, f64>,
    pub diagnostics: CorrectionFileDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionFileDiagnostics {
    #[serde(flatten)]
    pub correction: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_raw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_corrected: Option<f64>,
}

impl CorrectionFile {
    /// Package a correction; with `ideal`, both fidelities are filled in.
    pub fn new(
        raw: &SparseDistribution,
        k: u64,
        correction: &Correction,
        ideal: Option<&SparseDistribution>,
    ) -> Result<CorrectionFile, PipelineError> {
        let (fidelity_raw, fidelity_corrected) = match ideal {
            Some(ideal) => (
                Some(fidelity(ideal, raw)?),
                Some(fidelity(ideal, &correction.corrected)?),
            ),
            None => (None, None),
        };
        Ok(CorrectionFile {
            n_qubits: raw.n(),
            nec_ideal_output: bitstring(k, raw.n()),
            corrected: distribution_to_strings(&correction.corrected),
            quasi: distribution_to_strings(&correction.quasi),
            diagnostics: CorrectionFileDiagnostics {
                correction: correction.diagnostics.clone(),
                fidelity_raw,
                fidelity_corrected,
            },
        })
    }

    pub fn corrected_distribution(&self) -> Result<SparseDistribution, PipelineError> {
        strings_to_distribution(self.n_qubits, &self.corrected, false)
    }
}

/// Load a distribution from a counts file, a correction file (its
/// `corrected` field) or a result file (its `corrected` field).
pub fn load_distribution(path: &Path) -> Result<SparseDistribution, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("corrected").is_some() {
        if value.get("manifest").is_some() {
            let r: ExperimentResult = serde_json::from_value(value)?;
            return r.corrected_distribution();
        }
        let c: CorrectionFile = serde_json::from_value(value)?;
        return c.corrected_distribution();
    }
    Ok(parse_counts(&text)?.0)
}

/// Twirl, compile the inserted Paulis into neighbouring rotations and sample.
fn sample_instance(
    sim: &Simulator,
    c: &Circuit,
    record: &TwirlRecord,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
    acc: &mut Counts,
) -> Result<(), PipelineError> {
    let twirled = merge_rz(&apply_twirl(c, record)?);
    for (k, v) in sim.sample_counts(&twirled, nm, shots, seed)? {
        *acc.entry(k).or_default() += v;
    }
    Ok(())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, PipelineError> {
    cfg.validate()?;
    let sim = Simulator {
        shots_per_trajectory: cfg.shots_per_trajectory,
        ..Simulator::default()
    };
    let source = cfg.circuit.build()?;
    let payload = lower_to_native(&source)?;
    let nec = build_nec(&payload)?;
    let k = nec_ideal_output(&nec)?;
    let n = payload.n_qubits();
    let ideal = sim.simulate_noiseless(&payload)?;

    let mut raw_counts = Counts::new();
    let mut nec_counts = Counts::new();
    let mut payload_twirls = Vec::with_capacity(cfg.n_rand);
    let mut nec_twirls = Vec::with_capacity(cfg.n_rand);
    let mut payload_seeds = Vec::with_capacity(cfg.n_rand);
    let mut nec_seeds = Vec::with_capacity(cfg.n_rand);
    for i in 0..cfg.n_rand {
        let shots = instance_shots(cfg.shots, cfg.n_rand, i);
        let p_record = sample_twirl(&payload, derive_seed(cfg.seed, SeedStream::PayloadTwirl, i))?;
        let n_record = if cfg.shared_twirls {
            p_record.clone()
        } else {
            sample_twirl(&nec, derive_seed(cfg.seed, SeedStream::NecTwirl, i))?
        };
        let p_seed = derive_seed(cfg.seed, SeedStream::PayloadSampling, i);
        let n_seed = derive_seed(cfg.seed, SeedStream::NecSampling, i);
        sample_instance(
            &sim,
            &payload,
            &p_record,
            &cfg.noise,
            shots,
            p_seed,
            &mut raw_counts,
        )?;
        sample_instance(
            &sim,
            &nec,
            &n_record,
            &cfg.noise,
            shots,
            n_seed,
            &mut nec_counts,
        )?;
        payload_twirls.push(p_record);
        nec_twirls.push(n_record);
        payload_seeds.push(p_seed);
        nec_seeds.push(n_seed);
    }

    let z = counts_to_distribution(n, &raw_counts)?;
    let b = counts_to_distribution(n, &nec_counts)?;
    let opts = CorrectionOptions {
        t_max: cfg.t_max,
        eps: cfg.eps,
    };
    let correction = correct(&z, &b, k, &opts)?;
    let fidelities = Fidelities {
        raw: fidelity(&ideal, &z)?,
        corrected: fidelity(&ideal, &correction.corrected)?,
    };

    let sampling = |twirls, seeds| CircuitSampling {
        instances: cfg.n_rand,
        shots: cfg.shots,
        twirls,
        sampling_seeds: seeds,
    };
    Ok(ExperimentResult {
        label: cfg.circuit.label(),
        n_qubits: n,
        config: cfg.clone(),
        nec_ideal_output: bitstring(k, n),
        gate_counts: GateCountSummary {
            payload: gate_counts(&payload),
            nec: gate_counts(&nec),
        },
        manifest: SamplingManifest {
            logical_circuits: 2,
            shared_twirls: cfg.shared_twirls,
            noise_placement: "depolarizing channel after every gate on the qubits it acts on; \
                              independent readout flips at measurement"
                .into(),
            payload: sampling(payload_twirls, payload_seeds),
            nec: sampling(nec_twirls, nec_seeds),
        },
        fidelity: fidelities,
        diagnostics: correction.diagnostics,
        ideal: distribution_to_strings(&ideal),
        raw_counts: counts::counts_to_strings(n, &raw_counts),
        nec_counts: counts::counts_to_strings(n, &nec_counts),
        quasi: distribution_to_strings(&correction.quasi),
        corrected: distribution_to_strings(&correction.corrected),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            shots: 4_000,
            n_rand: 4,
            seed,
            ..ExperimentConfig::new(CircuitSource::Catalog(Family::Ghz { n: 3 }))
        }
    }

    #[test]
    fn shot_split() {
        let total: u64 = (0..16).map(|i| instance_shots(200_000, 16, i)).sum();
        assert_eq!(total, 200_000);
        assert_eq!(instance_shots(10, 4, 0), 3);
        assert_eq!(instance_shots(10, 4, 3), 2);
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = ExperimentConfig::from_json(r#"{"circuit": {"family": "ghz", "n": 4}}"#).unwrap();
        assert_eq!(cfg.shots, DEFAULT_SHOTS);
        assert_eq!(cfg.n_rand, DEFAULT_N_RAND);
        assert_eq!(cfg.t_max, 15);
        let file = ExperimentConfig::from_json(r#"{"circuit": {"path": "x.circ"}}"#).unwrap();
        assert_eq!(file.circuit.label(), "x");
        for bad in [
            r#"{"circuit": {"family": "ghz", "n": 4}, "t_max": 0}"#,
            r#"{"circuit": {"family": "ghz", "n": 4}, "t_max": 21}"#,
            r#"{"circuit": {"family": "ghz", "n": 4}, "shots": 0}"#,
            r#"{"circuit": {"family": "ghz", "n": 4}, "shots": 3, "n_rand": 4}"#,
            r#"{"circuit": {"family": "ghz", "n": 4}, "eps": -1.0}"#,
        ] {
            assert!(matches!(
                ExperimentConfig::from_json(bad),
                Err(PipelineError::Config(_))
            ));
        }
        assert!(ExperimentConfig::from_json(
            r#"{"circuit": {"family": "ghz", "n": 4}, "noise": {"p1": 2, "p2": 0, "p_meas": 0}}"#
        )
        .is_err());
    }

    #[test]
    fn run_is_deterministic_and_consistent() {
        let a = run_experiment(&small(3)).unwrap();
        let b = run_experiment(&small(3)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.manifest.logical_circuits, 2);
        assert_eq!(a.manifest.payload.twirls.len(), 4);
        assert_eq!(a.raw_counts.values().sum::<u64>(), 4_000);
        assert_eq!(a.nec_counts.values().sum::<u64>(), 4_000);
        let again = a.recompute_fidelities().unwrap();
        assert_eq!(again, a.fidelity);
        let c = run_experiment(&small(4)).unwrap();
        assert_ne!(a.raw_counts, c.raw_counts);
    }

    #[test]
    fn shared_twirls_reuse_records() {
        let cfg = ExperimentConfig {
            shared_twirls: true,
            ..small(1)
        };
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.manifest.payload.twirls, r.manifest.nec.twirls);
        let r = run_experiment(&small(1)).unwrap();
        assert_ne!(r.manifest.payload.twirls, r.manifest.nec.twirls);
    }

    #[test]
    fn result_json_round_trip() {
        let r = run_experiment(&small(7)).unwrap();
        let back: ExperimentResult = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.quasi_distribution().unwrap().len(), r.quasi.len());
    }

    #[test]
    fn load_distribution_variants() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_experiment(&small(2)).unwrap();
        r.write_to(dir.path()).unwrap();
        let from_result = load_distribution(&dir.path().join("result.json")).unwrap();
        assert_eq!(from_result, r.corrected_distribution().unwrap());
        let raw = load_distribution(&dir.path().join("raw_counts.json")).unwrap();
        assert_eq!(raw, r.raw_distribution().unwrap());

        let nec = r.nec_distribution().unwrap();
        let correction = correct(&raw, &nec, 1, &CorrectionOptions::default()).unwrap();
        let ideal = r.ideal_distribution().unwrap();
        let file = CorrectionFile::new(&raw, 1, &correction, Some(&ideal)).unwrap();
        assert_eq!(
            file.diagnostics.fidelity_corrected,
            Some(r.fidelity.corrected)
        );
        let path = dir.path().join("corrected.json");
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(load_distribution(&path).unwrap(), correction.corrected);
        let back: CorrectionFile =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, file);
    }
}
