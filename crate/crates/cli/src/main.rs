//! `povmcoarse`: entropies, coarseness certificates, measurement composition,
//! verification suites and the two-outcome region scan.
//!
//! Exit codes: 0 success / feasible, 1 infeasible or failed suite,
//! 2 usage, parse or validation error, 3 ambiguous feasibility verdict.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use povm_coarse::coarse::{check_coarser, check_coarser_in_subspace, Verdict, TOL_FEAS};
use povm_coarse::info::observational_entropy;
use povm_coarse::io::{self, MeasurementFile};
use povm_coarse::qm::matrix::{self, frobenius};
use povm_coarse::qm::compose_measurements;
use povm_coarse::region::{self, RegionSpec};
use povm_coarse::verify::{self, counterexample_registry};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "povmcoarse", version, about = "Coarse-graining of generalized quantum measurements")]
struct Cli {
    /// Feasibility tolerance on the phase-1 optimum and residual.
    #[arg(long, global = true, default_value_t = TOL_FEAS)]
    tol: f64,

    /// Output format (json for most commands, csv for region-scan, text for counterexamples).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the main output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Observational and von Neumann entropy of a state under a measurement.
    Entropy { measurement: PathBuf, state: PathBuf },
    /// Decide whether COARSE is coarser than FINE, optionally within a subspace.
    CheckCoarser {
        coarse: PathBuf,
        fine: PathBuf,
        #[arg(long)]
        subspace: Option<PathBuf>,
    },
    /// Measure FIRST, then SECOND; writes the composite measurement.
    Compose { first: PathBuf, second: PathBuf },
    /// Run a verification suite, or all of them.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Scan (p2, v2) against a two-outcome reference (p1, v1) of total volume vtot.
    RegionScan {
        #[arg(long, default_value_t = 0.75)]
        p1: f64,
        #[arg(long, default_value_t = 1.0)]
        v1: f64,
        #[arg(long, default_value_t = 2.0)]
        vtot: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Replay the golden counterexamples.
    Counterexamples,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn with_path<T>(path: &Path, r: povm_coarse::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

fn run(cli: Cli) -> Result<u8, String> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(format!("--tol must be positive, got {}", cli.tol));
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Entropy { measurement, state } => {
            let c = with_path(&measurement, io::parse_measurement(&read(&measurement)?))?;
            let rho = with_path(&state, io::parse_state(&read(&state)?))?;
            let report = observational_entropy(&c, &rho).map_err(|e| e.to_string())?;
            let gap = report.identity_gap();
            if gap > 1e-9 {
                return Err(format!("entropy decomposition violated by {gap:e}"));
            }
            emit(out, &json(&report))?;
            Ok(EXIT_OK)
        }
        Command::CheckCoarser { coarse, fine, subspace } => {
            let c2 = with_path(&coarse, io::parse_measurement(&read(&coarse)?))?;
            let c1 = with_path(&fine, io::parse_measurement(&read(&fine)?))?;
            let cert = match subspace {
                Some(g_path) => {
                    let g = with_path(&g_path, io::parse_subspace(&read(&g_path)?))?;
                    check_coarser_in_subspace(&c2, &c1, &g, cli.tol)
                }
                None => check_coarser(&c2, &c1, cli.tol),
            }
            .map_err(|e| e.to_string())?;
            emit(out, &json(&cert))?;
            Ok(match cert.verdict {
                Verdict::Feasible => EXIT_OK,
                Verdict::Infeasible => EXIT_NEGATIVE,
                Verdict::Ambiguous => EXIT_AMBIGUOUS,
            })
        }
        Command::Compose { first, second } => {
            let c1 = with_path(&first, io::parse_measurement(&read(&first)?))?;
            let c2 = with_path(&second, io::parse_measurement(&read(&second)?))?;
            let comp = compose_measurements(&c1, &c2).map_err(|e| e.to_string())?;
            for i in 0..c1.len() {
                let mut acc = matrix::zeros(c1.dim());
                for (k, &(a, _)) in comp.labels.iter().enumerate() {
                    if a == i {
                        acc += comp.measurement.element(k);
                    }
                }
                let dev = frobenius(&(acc - c1.element(i)));
                if dev > 1e-8 {
                    return Err(format!("composite elements do not sum to element {i} of the first measurement ({dev:e})"));
                }
            }
            let file = MeasurementFile::from_measurement(&comp.measurement);
            match out {
                Some(p) => {
                    emit(Some(p), &json(&file))?;
                    #[derive(Serialize)]
                    struct Summary<'a> {
                        out: String,
                        outcomes: usize,
                        labels: &'a [(usize, usize)],
                        dropped: &'a [(usize, usize)],
                    }
                    emit(
                        None,
                        &json(&Summary {
                            out: p.display().to_string(),
                            outcomes: comp.measurement.len(),
                            labels: &comp.labels,
                            dropped: &comp.dropped,
                        }),
                    )?;
                }
                None => emit(None, &json(&file))?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, trials, dim, seed } => {
            if trials == 0 {
                return Err("--trials must be at least 1".into());
            }
            let reports = if suite == "all" {
                verify::run_all(trials, dim, seed)
            } else {
                verify::run_suite(&suite, trials, dim, seed).map(|r| vec![r])
            }
            .map_err(|e| e.to_string())?;
            for r in &reports {
                let status = if r.passed() { "pass" } else { "FAIL" };
                eprintln!("{status} {} ({} trials, {} failures, {} ms)", r.suite, r.trials, r.failures, r.elapsed_ms);
            }
            emit(out, &json(&reports))?;
            Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::RegionScan { p1, v1, vtot, grid } => {
            let spec = RegionSpec { p1, v1, vtot, grid_n: grid };
            let points = region::region_scan(&spec, cli.tol).map_err(|e| e.to_string())?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Json => json(&points),
                _ => region::to_csv(&points),
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Counterexamples => {
            #[derive(Serialize)]
            struct Line {
                name: &'static str,
                passed: bool,
                values: serde_json::Value,
            }
            let mut lines = Vec::new();
            for g in counterexample_registry() {
                let outcome = (g.run)().map_err(|e| format!("{}: {e}", g.name))?;
                lines.push(Line { name: g.name, passed: outcome.passed, values: outcome.values });
            }
            let text = match cli.format.unwrap_or(Format::Text) {
                Format::Json => json(&lines),
                _ => lines
                    .iter()
                    .map(|l| format!("{} {}: {}\n", if l.passed { "PASS" } else { "FAIL" }, l.name, l.values))
                    .collect(),
            };
            emit(out, &text)?;
            Ok(if lines.iter().all(|l| l.passed) { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
