//! `gaborpol` — construct phase retrievable multi-window Gabor frames,
//! measure signals against them, and reconstruct up to a global phase.
//!
//! Exit codes: 0 success, 2 validation error, 3 search budget exceeded,
//! 4 reconstruction refused (report still written).

mod config;
mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use config::{default_exhaustive_limit_from_budget, ExperimentConfig};
use gaborpol::io::{
    read_json, read_measurements_path, read_signal, write_graph_edges_path, write_json,
    write_measurements_path, write_signal, FrameDescriptor, ReconstructionReport,
};
use gaborpol::{
    beta, bias_ratio, full_spark_check, reconstruct, spectral_gap, BetaMode, IndexSet,
    PhaseGraph, PhaseMethod, RecoverOptions, SparkMode, SpectralStructure, DEFAULT_SPARK_BUDGET,
    EPS_VANISH,
};

const BUDGET_ENV: &str = "GABOR_POLAR_BUDGET";

#[derive(Parser)]
#[command(
    name = "gaborpol",
    version,
    about = "Phase retrieval with polarization-built multi-window Gabor frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Propagate,
    Sync,
}

impl From<MethodArg> for PhaseMethod {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Propagate => PhaseMethod::Propagate,
            MethodArg::Sync => PhaseMethod::Sync,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SparkModeArg {
    Exhaustive,
    Montecarlo,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SearchModeArg {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StructureArg {
    Auto,
    Dense,
}

#[derive(Subcommand)]
enum Command {
    /// Build a frame from a descriptor; writes the descriptor back with the
    /// window resolved to explicit values.
    Construct {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run a full-spark check on the primary window before writing.
        #[arg(long)]
        verify_spark: bool,
        #[arg(long, value_enum, default_value_t = SparkModeArg::Montecarlo)]
        mode: SparkModeArg,
        /// Monte-carlo subset samples for --verify-spark.
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Phaseless measurements of a signal: frame + signal JSON -> CSV.
    Measure {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a signal class from measurements.
    Reconstruct {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Sync)]
        method: MethodArg,
        #[arg(long)]
        eps_vanish: Option<f64>,
        /// Also write the recovered signal alone as a JSON vector.
        #[arg(long)]
        estimate_out: Option<PathBuf>,
        /// Export the weighted, pruned measurement graph as edge-list CSV.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        /// Ground-truth signal; adds the up-to-phase distance to the report.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Fourier bias report for an index set JSON file.
    Bias {
        #[arg(long)]
        set: PathBuf,
        /// Pseudorandomness factor to test against.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Minimum cardinality of a low-bias subset of Z_M, with witness.
    Beta {
        #[arg(long)]
        m: usize,
        /// Oversampling constant C > 3; the bias bound is (C-3)/(C-1).
        #[arg(long)]
        c: f64,
        #[arg(long, value_enum, default_value_t = SearchModeArg::Exhaustive)]
        mode: SearchModeArg,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral gap of a frame's measurement graph.
    SpectralGap {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, value_enum, default_value_t = StructureArg::Auto)]
        structure: StructureArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded multi-trial experiment; writes a JSON report and a CSV of
    /// per-trial rows next to it.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn search_budget() -> anyhow::Result<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(raw) => {
            let value = raw.trim().parse::<u64>().with_context(|| {
                format!("{BUDGET_ENV} must be a positive integer, got {raw:?}")
            })?;
            Ok(Some(value))
        }
        Err(_) => Ok(None),
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<gaborpol::Error>() {
        Some(
            gaborpol::Error::BudgetExceeded { .. }
            | gaborpol::Error::SearchInconclusive { .. },
        ) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Construct {
            config,
            out,
            verify_spark,
            mode,
            trials,
            seed,
        } => {
            let descriptor: FrameDescriptor =
                read_json(&config).with_context(|| format!("reading {}", config.display()))?;
            let frame = descriptor.build()?;
            if verify_spark {
                let budget = search_budget()?.unwrap_or(DEFAULT_SPARK_BUDGET);
                let spark_mode = match mode {
                    SparkModeArg::Exhaustive => SparkMode::Exhaustive,
                    SparkModeArg::Montecarlo => SparkMode::MonteCarlo { trials, seed },
                };
                let report =
                    full_spark_check(frame.primary_window(), frame.lattice(), &spark_mode, budget)?;
                println!(
                    "spark check: {} ({} subsets, min margin {:.3e}{})",
                    if report.full_spark { "pass" } else { "FAIL" },
                    report.subsets_checked,
                    report.min_margin,
                    if report.certified { ", certified" } else { "" },
                );
                for failure in &report.failures {
                    println!(
                        "  dependent subset {:?} with margin {:.3e}",
                        failure.points, failure.margin
                    );
                }
            }
            write_json(&out, &FrameDescriptor::canonical(&frame))?;
            println!(
                "frame: {} vectors over {} lattice points (M = {})",
                frame.len(),
                frame.lattice().len(),
                frame.modulus()
            );
            Ok(0)
        }

        Command::Measure { frame, signal, out } => {
            let descriptor: FrameDescriptor = read_json(&frame)?;
            let frame = descriptor.build()?;
            let x = read_signal(&signal)?;
            let b = frame.measure(&x)?;
            write_measurements_path(&out, &b)?;
            println!("wrote {} measurements", b.len());
            Ok(0)
        }

        Command::Reconstruct {
            frame,
            measurements,
            out,
            method,
            eps_vanish,
            estimate_out,
            graph_out,
            truth,
        } => {
            let descriptor: FrameDescriptor = read_json(&frame)?;
            let frame = descriptor.build()?;
            let b = read_measurements_path(&measurements)?;
            let options = RecoverOptions {
                method: method.into(),
                eps_vanish: eps_vanish.unwrap_or(EPS_VANISH),
            };
            let started = Instant::now();
            let mut result = reconstruct(&frame, &b, &options)?;
            let wall_ms = started.elapsed().as_millis() as u64;
            if let Some(truth_path) = truth {
                let x = read_signal(&truth_path)?;
                result = result.with_truth(&x)?;
            }
            if let Some(graph_path) = graph_out {
                let assignment =
                    gaborpol::recover::extract_relative_phases(&frame, &b, options.eps_vanish)?;
                write_graph_edges_path(&graph_path, &assignment.graph)?;
            }
            let report = ReconstructionReport::from_result(&result, Some(wall_ms));
            write_json(&out, &report)?;
            if let Some(estimate_path) = estimate_out {
                write_signal(&estimate_path, &result.estimate)?;
            }
            if result.is_success() {
                println!(
                    "reconstructed: component {} of {}, residual {:.3e}",
                    result.component_size,
                    frame.lattice().len(),
                    result.solve_residual.unwrap_or(0.0)
                );
                Ok(0)
            } else {
                let status = serde_json::to_value(result.status)?;
                eprintln!(
                    "reconstruction refused: {} (component {} of {})",
                    status.as_str().unwrap_or("failure"),
                    result.component_size,
                    frame.lattice().len()
                );
                Ok(4)
            }
        }

        Command::Bias { set, c } => {
            let set: IndexSet = read_json(&set)?;
            let bias = set.fourier_bias();
            let density = set.density();
            println!("modulus {} cardinality {}", set.modulus(), set.len());
            println!("density {density:.12}");
            println!("fourier_bias {bias:.12}");
            if density > 0.0 {
                println!("bias_ratio {:.12}", bias / density);
            }
            if let Some(c) = c {
                let ok = gaborpol::check_pseudorandom(&set, c)?;
                println!("pseudorandom_at_c {}", if ok { "yes" } else { "no" });
            }
            Ok(0)
        }

        Command::Beta {
            m,
            c,
            mode,
            trials,
            seed,
            out,
        } => {
            let search_mode = match mode {
                SearchModeArg::Exhaustive => BetaMode::Exhaustive {
                    max_modulus: default_exhaustive_limit_from_budget(search_budget()?),
                },
                SearchModeArg::Randomized => BetaMode::Randomized { trials, seed },
            };
            let result = beta(m, c, &search_mode)?;
            let label = if result.exact { "exact" } else { "upper bound" };
            println!("beta({m}, {c}) = {} [{label}]", result.cardinality);
            println!("witness {:?}", result.witness.members());
            let implied = c * m as f64 * (1.0 + 3.0 * result.cardinality as f64);
            println!("implied_measurement_count C*M*(1+3*beta) = {implied}");
            if let Some(path) = out {
                #[derive(serde::Serialize)]
                struct BetaReport<'a> {
                    m: usize,
                    c: f64,
                    beta: usize,
                    witness: &'a [usize],
                    exact: bool,
                    implied_measurement_count: f64,
                }
                write_json(
                    &path,
                    &BetaReport {
                        m,
                        c,
                        beta: result.cardinality,
                        witness: result.witness.members(),
                        exact: result.exact,
                        implied_measurement_count: implied,
                    },
                )?;
            }
            Ok(0)
        }

        Command::SpectralGap {
            frame,
            structure,
            out,
        } => {
            let descriptor: FrameDescriptor = read_json(&frame)?;
            let frame = descriptor.build()?;
            let graph = PhaseGraph::build(frame.lattice(), frame.q_set(), frame.p_set())?;
            let report = spectral_gap(
                &graph,
                match structure {
                    StructureArg::Auto => SpectralStructure::Auto,
                    StructureArg::Dense => SpectralStructure::Dense,
                },
            )?;
            println!(
                "gap {:.12} lambda_max {} method {}",
                report.gap,
                report.lambda_max,
                serde_json::to_value(report.method)?.as_str().unwrap_or("?")
            );
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            Ok(0)
        }

        Command::Experiment { config, out } => {
            let config: ExperimentConfig = read_json(&config)?;
            bias_ratio(config.c)?; // C > 3 is a hard validation gate
            let limit = default_exhaustive_limit_from_budget(search_budget()?);
            let report = experiment::run(&config, limit)?;
            write_json(&out, &report)?;
            let csv_path = out.with_extension("csv");
            std::fs::write(&csv_path, experiment::trials_csv(&report))?;
            println!(
                "{}/{} trials succeeded, max relative distance {}",
                report.summary.successes,
                report.summary.trials,
                report
                    .summary
                    .max_relative_distance
                    .map_or("n/a".into(), |v| format!("{v:.3e}")),
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
