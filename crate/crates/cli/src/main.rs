//! `spingate`: assemble, evolve, diagonalize and verify `.ham` spin
//! Hamiltonians, and search two-spin couplings for gate realizations.
//!
//! stdout carries JSON only; diagnostics go to stderr. Exit status is 0 on
//! success, 1 when verification or search fails, 2 on usage or input errors.

mod render;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use spingate::gate::DEFAULT_VERIFY_TOL;
use spingate::hamfile::write_hamiltonian;
use spingate::search::{realize, search, InteractionTemplate, SearchConfig};
use spingate::{
    canonical_xor_unitary, hermitian_eigen, induced_map, parse_file, unitary_exponential,
    verify_gate, xor_hamiltonian, GateSpec, Hamiltonian, ParseError, SpinSystem,
};

use render::{matrix, to_json, DemoJson, MapJson, ReportJson, SearchJson};

/// Tolerance for reading an evolution as a signed permutation.
const TRUTH_TABLE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "spingate",
    version,
    about = "Pauli-string spin Hamiltonians and gate verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Hamiltonian matrix of a `.ham` file.
    Assemble { file: PathBuf },
    /// Print U = exp(-i H t).
    Evolve {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        time: f64,
    },
    /// Check that exp(-i H t) writes a gate into the output spin.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        time: f64,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
    /// Print the signed permutation induced by exp(-i H t), or null.
    TruthTable {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        time: f64,
    },
    /// Print the eigenvalues of H in ascending order.
    Eig { file: PathBuf },
    /// Search two-spin couplings for a Hamiltonian realizing a gate at t = 1.
    Search {
        /// Site names of the system.
        #[arg(long, value_delimiter = ',', default_value = "A,B,C")]
        spins: Vec<String>,
        /// Coupled pairs such as `AB,BC` (or `A-B` for longer names); default all pairs.
        #[arg(long, value_delimiter = ',')]
        pairs: Option<Vec<String>>,
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        /// Also allow one-spin x, y, z terms on every site.
        #[arg(long)]
        single_site: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 2000)]
        max_iterations: usize,
    },
    /// Reproduce the three-spin XOR Hamiltonian and its signed-permutation evolution.
    XorDemo,
}

#[derive(Debug, Args)]
struct GateArgs {
    /// xor, xnor, and, nand, or, nor (over all inputs).
    #[arg(long, default_value = "xor")]
    gate: String,
    #[arg(long, value_delimiter = ',', default_value = "A,B")]
    inputs: Vec<String>,
    #[arg(long, default_value = "C")]
    output: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

type CliResult<T> = Result<T, CliError>;

/// Result of a command: JSON for stdout and whether the semantic check passed.
struct Outcome {
    json: String,
    passed: bool,
}

impl Outcome {
    fn ok(json: String) -> Self {
        Outcome { json, passed: true }
    }
}

fn load(path: &Path) -> CliResult<Hamiltonian> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    let doc = parse_file(&text).map_err(|source| CliError::Parse {
        path: shown.clone(),
        source,
    })?;
    doc.to_hamiltonian()
        .map_err(|e| CliError::Usage(format!("{shown}: {e}")))
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn check_time(time: f64) -> CliResult<f64> {
    if time.is_finite() {
        Ok(time)
    } else {
        Err(CliError::Usage(format!(
            "--time must be finite, got {time}"
        )))
    }
}

fn site(system: &SpinSystem, name: &str) -> CliResult<usize> {
    system.site_index(name.trim()).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown site `{name}`; sites are {}",
            system.names().join(",")
        ))
    })
}

fn gate_spec(system: &SpinSystem, args: &GateArgs) -> CliResult<GateSpec> {
    let inputs = args
        .inputs
        .iter()
        .map(|n| site(system, n))
        .collect::<CliResult<Vec<_>>>()?;
    let output = site(system, &args.output)?;
    let f: fn(&[bool]) -> bool = match args.gate.to_ascii_lowercase().as_str() {
        "xor" => |b| b.iter().filter(|&&x| x).count() % 2 == 1,
        "xnor" => |b| b.iter().filter(|&&x| x).count() % 2 == 0,
        "and" => |b| b.iter().all(|&x| x),
        "nand" => |b| !b.iter().all(|&x| x),
        "or" => |b| b.iter().any(|&x| x),
        "nor" => |b| !b.iter().any(|&x| x),
        other => return Err(CliError::Usage(format!("unknown gate `{other}`"))),
    };
    GateSpec::from_fn(inputs, output, f).map_err(|e| CliError::Usage(e.to_string()))
}

/// `AB` splits into two known site names; `A-B` or `A:B` splits explicitly.
fn parse_pair(system: &SpinSystem, text: &str) -> CliResult<(usize, usize)> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once(['-', ':']) {
        return Ok((site(system, a)?, site(system, b)?));
    }
    let splits: Vec<(usize, usize)> = text
        .char_indices()
        .skip(1)
        .filter_map(|(k, _)| {
            Some((
                system.site_index(&text[..k])?,
                system.site_index(&text[k..])?,
            ))
        })
        .collect();
    match splits.as_slice() {
        [pair] => Ok(*pair),
        [] => Err(CliError::Usage(format!(
            "`{text}` is not a pair of site names"
        ))),
        _ => Err(CliError::Usage(format!(
            "pair `{text}` is ambiguous; write it as A-B"
        ))),
    }
}

fn run(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Assemble { file } => {
            let h = load(&file)?;
            Ok(Outcome::ok(to_json(&matrix(&h.assemble()))))
        }
        Command::Evolve { file, time } => {
            let h = load(&file)?;
            let u = unitary_exponential(&h.assemble(), check_time(time)?).map_err(compute)?;
            Ok(Outcome::ok(to_json(&matrix(&u))))
        }
        Command::Verify {
            file,
            gate,
            time,
            tol,
        } => {
            let h = load(&file)?;
            let spec = gate_spec(h.system(), &gate)?;
            let u = unitary_exponential(&h.assemble(), check_time(time)?).map_err(compute)?;
            let report = verify_gate(&u, &spec, tol).map_err(compute)?;
            Ok(Outcome {
                json: to_json(&ReportJson::from(&report)),
                passed: report.passed,
            })
        }
        Command::TruthTable { file, time } => {
            let h = load(&file)?;
            let u = unitary_exponential(&h.assemble(), check_time(time)?).map_err(compute)?;
            let map = induced_map(&u, TRUTH_TABLE_TOL);
            Ok(Outcome::ok(to_json(&map.as_ref().map(MapJson::from))))
        }
        Command::Eig { file } => {
            let h = load(&file)?;
            let eig = hermitian_eigen(&h.assemble(), spingate::linalg::DEFAULT_HERMITICITY_TOL)
                .map_err(compute)?;
            Ok(Outcome::ok(to_json(&eig.eigenvalues)))
        }
        Command::Search {
            spins,
            pairs,
            gate,
            seed,
            restarts,
            single_site,
            tol,
            max_iterations,
        } => {
            let system = SpinSystem::new(spins.iter().map(|s| s.trim().to_string()))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let spec = gate_spec(&system, &gate)?;
            let template = match pairs {
                Some(pairs) => {
                    let pairs = pairs
                        .iter()
                        .filter(|p| !p.trim().is_empty())
                        .map(|p| parse_pair(&system, p))
                        .collect::<CliResult<Vec<_>>>()?;
                    InteractionTemplate::new(system, pairs)
                }
                None => InteractionTemplate::all_pairs(system),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?
            .with_single_site(single_site);
            let config = SearchConfig {
                restarts: restarts as usize,
                rng_seed: seed,
                success_tol: tol,
                max_iterations,
                ..SearchConfig::default()
            };
            let result = search(&template, &spec, &config).map_err(|e| match e {
                spingate::SearchError::BadConfig(_) => CliError::Usage(e.to_string()),
                other => compute(other),
            })?;
            let h = realize(&template, &result.best_parameters).map_err(compute)?;
            Ok(Outcome {
                json: to_json(&SearchJson {
                    succeeded: result.succeeded,
                    best_objective: result.best_objective,
                    restart_index: result.restart_index,
                    iterations_used: result.iterations_used,
                    best_parameters: result.best_parameters.0.clone(),
                    hamiltonian: write_hamiltonian(&h),
                }),
                passed: result.succeeded,
            })
        }
        Command::XorDemo => {
            let h = xor_hamiltonian();
            let hm = h.assemble();
            let u = unitary_exponential(&hm, 1.0).map_err(compute)?;
            let reference = canonical_xor_unitary();
            let max_deviation = u.max_abs_diff(&reference).map_err(compute)?;
            let report =
                verify_gate(&u, &spingate::xor_gate_spec(), DEFAULT_VERIFY_TOL).map_err(compute)?;
            let passed = max_deviation <= DEFAULT_VERIFY_TOL && report.passed;
            eprintln!(
                "max |U - U_ref| = {max_deviation:.3e}; verification {}",
                if report.passed { "passed" } else { "FAILED" }
            );
            Ok(Outcome {
                json: to_json(&DemoJson {
                    hamiltonian_file: write_hamiltonian(&h),
                    hamiltonian: matrix(&hm),
                    unitary: matrix(&u),
                    reference: matrix(&reference),
                    max_deviation,
                    report: ReportJson::from(&report),
                }),
                passed,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            // A closed pipe on stdout is not an error worth a panic.
            let _ = writeln!(std::io::stdout(), "{}", outcome.json);
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
