use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dec_core::dec::{correct, fidelity, CorrectionOptions, DEFAULT_EPS, DEFAULT_T_MAX};
use dec_core::distribution::{bitstring, parse_bitstring};
use dec_core::lowering::{
    build_nec, catalog, lower_to_native, nec_ideal_output, pauli_twirl, Family,
};
use dec_core::pipeline::{
    load_distribution, render_report, run_experiment, write_report, CircuitSource, CorrectionFile,
    CountsFile, CountsMetadata, ExperimentConfig, ExperimentResult, DEFAULT_SHOTS,
};
use dec_core::sim::{NoiseModel, Simulator};
use dec_core::{parse_circuit, serialize_circuit, Circuit};

/// Distribution error correction for Pauli-twirled circuits.
#[derive(Debug, Parser)]
#[command(name = "dec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyName {
    Ghz,
    DickeN1,
    Qpe,
    Grover,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Benchmark circuit family.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    /// Qubit count (GHZ, Dicke, Grover).
    #[arg(long)]
    n: Option<usize>,
    /// Counting qubits (QPE).
    #[arg(long, default_value_t = 5)]
    counting: usize,
    /// Eigenphase in turns (QPE).
    #[arg(long, default_value_t = 31.0 / 32.0)]
    theta: f64,
    /// Grover iterations; optimal when omitted.
    #[arg(long)]
    iterations: Option<usize>,
}

impl FamilyArgs {
    fn family(&self) -> Result<Option<Family>> {
        let Some(name) = self.family else {
            return Ok(None);
        };
        let n = || self.n.context("--n is required for this family");
        Ok(Some(match name {
            FamilyName::Ghz => Family::Ghz { n: n()? },
            FamilyName::DickeN1 => Family::DickeN1 { n: n()? },
            FamilyName::Qpe => Family::Qpe {
                counting: self.counting,
                theta: self.theta,
            },
            FamilyName::Grover => Family::Grover {
                n: n()?,
                iterations: self.iterations,
            },
        }))
    }
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// One-qubit depolarizing probability.
    #[arg(long)]
    p1: Option<f64>,
    /// Two-qubit depolarizing probability.
    #[arg(long)]
    p2: Option<f64>,
    /// Per-qubit readout flip probability.
    #[arg(long = "p-meas")]
    p_meas: Option<f64>,
}

impl NoiseArgs {
    fn apply(&self, base: NoiseModel) -> Result<NoiseModel> {
        let nm = NoiseModel {
            p1: self.p1.unwrap_or(base.p1),
            p2: self.p2.unwrap_or(base.p2),
            p_meas: self.p_meas.unwrap_or(base.p_meas),
        };
        nm.validate()?;
        Ok(nm)
    }
}

fn default_noise() -> NoiseModel {
    NoiseModel {
        p1: 1e-3,
        p2: 1e-2,
        p_meas: 0.0,
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a benchmark circuit in the text format.
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower a circuit to {CZ, SX, RZ, X}.
    Lower {
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pauli-twirl the CZ gates of a native circuit.
    Twirl {
        circuit: PathBuf,
        #[arg(long, env = "DEC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the twirl record (JSON).
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Build the noise estimation circuit (SX replaced by X).
    Nec {
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a native circuit under depolarizing noise; writes counts JSON.
    Simulate {
        circuit: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, env = "DEC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = 1)]
        shots_per_trajectory: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correct payload counts with noise estimation counts.
    Correct {
        /// Payload counts JSON.
        payload: PathBuf,
        /// Noise estimation circuit counts JSON.
        nec: PathBuf,
        /// Ideal output of the noise estimation circuit (bitstring).
        #[arg(long, conflicts_with = "nec_circuit")]
        k: Option<String>,
        /// Noise estimation circuit file; its ideal output is used as k.
        #[arg(long)]
        nec_circuit: Option<PathBuf>,
        /// Ideal distribution; adds fidelities to the diagnostics.
        #[arg(long)]
        ideal: Option<PathBuf>,
        #[arg(long = "t-max", default_value_t = DEFAULT_T_MAX)]
        t_max: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical fidelity between two distributions.
    Fidelity { p: PathBuf, q: PathBuf },
    /// Run a full experiment: payload and NEC sampling, correction, scoring.
    Run {
        /// Experiment config JSON; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Circuit file instead of a catalog family.
        #[arg(long, conflicts_with = "family")]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, env = "DEC_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long = "n-rand")]
        n_rand: Option<usize>,
        #[arg(long = "t-max")]
        t_max: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "shared-twirls")]
        shared_twirls: bool,
        #[arg(long)]
        shots_per_trajectory: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "dec-out")]
        out: PathBuf,
    },
    /// Fidelity table and histograms from result files.
    Report {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical self-checks.
    Validate {
        #[arg(long, env = "DEC_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    let body = if body.ends_with('\n') {
        body.to_string()
    } else {
        format!("{body}\n")
    };
    match out {
        Some(path) => {
            std::fs::write(path, &body).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build { family, out } => {
            let f = family.family()?.context("--family is required")?;
            emit(out.as_deref(), &serialize_circuit(&catalog(&f)?))?;
        }
        Command::Lower { circuit, out } => {
            let lowered = lower_to_native(&read_circuit(&circuit)?)?;
            emit(out.as_deref(), &serialize_circuit(&lowered))?;
        }
        Command::Twirl {
            circuit,
            seed,
            out,
            record,
        } => {
            let (twirled, rec) = pauli_twirl(&read_circuit(&circuit)?, seed)?;
            emit(out.as_deref(), &serialize_circuit(&twirled))?;
            if let Some(path) = record {
                std::fs::write(&path, serde_json::to_string_pretty(&rec)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Nec { circuit, out } => {
            let nec = build_nec(&read_circuit(&circuit)?)?;
            let k = nec_ideal_output(&nec)?;
            let body = format!(
                "# ideal output {}\n{}",
                bitstring(k, nec.n_qubits()),
                serialize_circuit(&nec)
            );
            emit(out.as_deref(), &body)?;
        }
        Command::Simulate {
            circuit,
            shots,
            seed,
            noise,
            shots_per_trajectory,
            out,
        } => {
            let c = read_circuit(&circuit)?;
            if !c.is_native() {
                bail!("{} is not native; run `dec lower` first", circuit.display());
            }
            let nm = noise.apply(default_noise())?;
            let sim = Simulator {
                shots_per_trajectory,
                ..Simulator::default()
            };
            let counts = sim.sample_counts(&c, &nm, shots, seed)?;
            let file = CountsFile::new(
                c.n_qubits(),
                &counts,
                CountsMetadata {
                    n_qubits: None,
                    shots: Some(shots),
                    seed: Some(seed),
                    noise_model: Some(nm),
                },
            );
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&file)? + "\n"),
            )?;
        }
        Command::Correct {
            payload,
            nec,
            k,
            nec_circuit,
            ideal,
            t_max,
            eps,
            out,
        } => {
            let z = load_distribution(&payload)?;
            let b = load_distribution(&nec)?;
            let k = match (k, nec_circuit) {
                (Some(k), _) => {
                    if k.len() != z.n() {
                        bail!("--k has {} bits, distributions have {}", k.len(), z.n());
                    }
                    parse_bitstring(&k)?
                }
                (None, Some(path)) => nec_ideal_output(&read_circuit(&path)?)?,
                (None, None) => bail!("one of --k or --nec-circuit is required"),
            };
            let ideal = ideal.map(|p| load_distribution(&p)).transpose()?;
            let correction = correct(&z, &b, k, &CorrectionOptions { t_max, eps })?;
            let file = CorrectionFile::new(&z, k, &correction, ideal.as_ref())?;
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&file)? + "\n"),
            )?;
        }
        Command::Fidelity { p, q } => {
            let f = fidelity(&load_distribution(&p)?, &load_distribution(&q)?)?;
            println!("{f}");
        }
        Command::Run {
            config,
            circuit,
            family,
            noise,
            seed,
            shots,
            n_rand,
            t_max,
            eps,
            shared_twirls,
            shots_per_trajectory,
            out,
        } => {
            let source = match (circuit, family.family()?) {
                (Some(path), _) => Some(CircuitSource::File { path }),
                (None, Some(f)) => Some(CircuitSource::Catalog(f)),
                (None, None) => None,
            };
            let mut cfg = match (config, source) {
                (Some(path), source) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let mut cfg: ExperimentConfig = serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    if let Some(s) = source {
                        cfg.circuit = s;
                    }
                    cfg
                }
                (None, Some(s)) => ExperimentConfig::new(s),
                (None, None) => bail!("give --config, --circuit or --family"),
            };
            cfg.noise = noise.apply(cfg.noise)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.shots = shots.unwrap_or(cfg.shots);
            cfg.n_rand = n_rand.unwrap_or(cfg.n_rand);
            cfg.t_max = t_max.unwrap_or(cfg.t_max);
            cfg.eps = eps.unwrap_or(cfg.eps);
            cfg.shared_twirls |= shared_twirls;
            cfg.shots_per_trajectory = shots_per_trajectory.unwrap_or(cfg.shots_per_trajectory);
            let result = run_experiment(&cfg)?;
            result.write_to(&out)?;
            println!(
                "{}: raw fidelity {:.6}, corrected fidelity {:.6} (t = {}, dropped mass {:.3e})",
                result.label,
                result.fidelity.raw,
                result.fidelity.corrected,
                result.diagnostics.t,
                result.diagnostics.dropped_mass
            );
            println!("wrote {}", out.display());
        }
        Command::Report { results, out } => {
            let loaded = results
                .iter()
                .map(|p| {
                    ExperimentResult::load(p).with_context(|| format!("loading {}", p.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            let report = match out {
                Some(dir) => write_report(&loaded, &dir)?,
                None => render_report(&loaded)?,
            };
            print!("{}", report.table);
        }
        Command::Validate { seed } => {
            let outcomes = dec_core::validate::run_all(seed);
            for o in &outcomes {
                println!(
                    "{} {:<20} cases={:<4} max_error={:.3e} tol={:.0e}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.cases,
                    o.max_error,
                    o.tolerance
                );
            }
            return Ok(outcomes.iter().all(|o| o.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
