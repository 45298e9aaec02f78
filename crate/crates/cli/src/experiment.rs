//! Seeded multi-trial experiment runner: resolve the configuration, verify
//! the hypotheses it claims, run the trials, and assemble a deterministic
//! report.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gaborpol::io::pairs_to_signal;
use gaborpol::{
    bias_ratio, check_pseudorandom, full_spark_check, phase_distance, random_window, reconstruct,
    reconstruct_subspace, spectral_gap, Error, Lattice, MultiWindowGaborFrame, RecoverOptions,
    Result, Signal, SparkMode, SpectralStructure, SubspacePrior, DEFAULT_SPARK_BUDGET, EPS_VANISH,
};

use crate::config::{
    ExperimentConfig, ExperimentReport, ExperimentSummary, HypothesisChecks, SparkSummary,
    SubspaceMapSpec, TrialRecord,
};

/// Per-trial seed derivation (SplitMix64 over the base seed, trial index and
/// a role salt) so trials are independent yet reproducible.
fn derive_seed(base: u64, trial: u64, salt: u64) -> u64 {
    let mut z = base
        .wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(salt.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run(config: &ExperimentConfig, exhaustive_limit: usize) -> Result<ExperimentReport> {
    let started = Instant::now();
    let m = config.m;
    let ratio = bias_ratio(config.c)?;

    let lattice = Lattice::new(config.t.resolve(m)?, config.f.resolve(m)?)?;
    let (q, beta_q) = config.q.resolve(m, config.c, &lattice, exhaustive_limit)?;
    let (p, beta_p) = config.p.resolve(m, config.c, &lattice, exhaustive_limit)?;

    if let Some(spec) = &config.subspace {
        if spec.d == 0 || spec.d > m {
            return Err(Error::Invalid {
                what: "subspace dimension",
                detail: format!("d = {} outside 1..={m}", spec.d),
            });
        }
    }
    let solve_dim = config.subspace.as_ref().map_or(m, |s| s.d);

    let fixed_prior = match &config.subspace {
        Some(spec) => match &spec.w {
            SubspaceMapSpec::Seed { .. } => None,
            SubspaceMapSpec::Columns { columns } => {
                if columns.len() != spec.d {
                    return Err(Error::Invalid {
                        what: "subspace map",
                        detail: format!("{} columns for d = {}", columns.len(), spec.d),
                    });
                }
                let basis: Vec<Signal> = columns
                    .iter()
                    .map(|c| pairs_to_signal(c))
                    .collect::<Result<_>>()?;
                Some(SubspacePrior::from_basis(&basis)?)
            }
        },
        None => None,
    };

    let options = RecoverOptions {
        method: config.method,
        eps_vanish: config.eps_vanish.unwrap_or(EPS_VANISH),
    };

    let count_formula = lattice.len() * (1 + 3 * q.len() * p.len());
    let lattice_points = lattice.len();

    let mut trials = Vec::with_capacity(config.trials as usize);
    let mut successes = 0u64;
    let mut max_relative: Option<f64> = None;
    let mut measurement_count = 0usize;
    let mut spark_summary = None;

    for trial in 0..config.trials {
        let window = random_window(m, derive_seed(config.seed, trial, 1));
        let frame = MultiWindowGaborFrame::assemble(
            window.clone(),
            lattice.clone(),
            q.clone(),
            p.clone(),
        )?;

        if trial == 0 {
            if let Some(spark_trials) = config.spark_trials {
                let report = full_spark_check(
                    &window,
                    &lattice,
                    &SparkMode::MonteCarlo {
                        trials: spark_trials,
                        seed: derive_seed(config.seed, trial, 5),
                    },
                    DEFAULT_SPARK_BUDGET,
                )?;
                spark_summary = Some(SparkSummary {
                    trials: spark_trials,
                    failures: report.failures.len(),
                    min_margin: report.min_margin,
                    passed: report.full_spark,
                });
            }
        }

        let (x, prior) = match &config.subspace {
            Some(spec) => {
                let prior = match (&spec.w, &fixed_prior) {
                    (SubspaceMapSpec::Seed { seed }, _) => {
                        SubspacePrior::random(m, spec.d, derive_seed(*seed, trial, 3))?
                    }
                    (_, Some(fixed)) => fixed.clone(),
                    _ => unreachable!("fixed prior resolved above"),
                };
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, trial, 4));
                let h = Signal::random(spec.d, &mut rng);
                (prior.synthesize(h.values())?, Some(prior))
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, trial, 2));
                (Signal::random(m, &mut rng), None)
            }
        };

        let b = frame.measure(&x)?;
        measurement_count = b.len();

        let result = match &prior {
            Some(prior) => reconstruct_subspace(&frame, prior, &b, &options)?,
            None => reconstruct(&frame, &b, &options)?,
        };
        let distance = phase_distance(&result.estimate, &x)?;
        let x_norm = x.norm();
        let relative = if x_norm > 0.0 { distance / x_norm } else { 0.0 };
        if result.is_success() {
            successes += 1;
            max_relative = Some(max_relative.map_or(relative, |v: f64| v.max(relative)));
        }
        trials.push(TrialRecord {
            trial,
            status: result.status,
            phase_distance: Some(distance),
            relative_distance: Some(relative),
            component_size: result.component_size,
            pruned_vertices: result.pruned_vertices,
            solve_residual: result.solve_residual,
            condition_number: result.condition_number,
        });
    }

    let spectral = {
        let graph = gaborpol::PhaseGraph::build(&lattice, &q, &p)?;
        spectral_gap(&graph, SpectralStructure::Auto).ok()
    };

    let hypotheses = HypothesisChecks {
        q_pseudorandom: check_pseudorandom(&q, ratio).ok(),
        p_pseudorandom: check_pseudorandom(&p, ratio).ok(),
        lattice_exceeds_threshold: (lattice_points as f64) > config.c * solve_dim as f64,
        spark: spark_summary,
    };

    let success_rate = if config.trials > 0 {
        successes as f64 / config.trials as f64
    } else {
        0.0
    };

    Ok(ExperimentReport {
        schema_version: config.schema_version,
        config: config.clone(),
        q: q.members().to_vec(),
        p: p.members().to_vec(),
        beta_q,
        beta_p,
        lattice_points,
        measurement_count,
        count_formula,
        hypotheses,
        spectral,
        trials,
        summary: ExperimentSummary {
            trials: config.trials,
            successes,
            success_rate,
            max_relative_distance: max_relative,
        },
        wall_ms: started.elapsed().as_millis() as u64,
    })
}

/// One CSV row per trial, for spreadsheet-side digestion of sweeps.
pub fn trials_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(
        "trial,status,phase_distance,relative_distance,component_size,pruned_vertices,solve_residual,condition_number\n",
    );
    for t in &report.trials {
        let status = serde_json::to_value(t.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let fmt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.17e}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t.trial,
            status,
            fmt(t.phase_distance),
            fmt(t.relative_distance),
            t.component_size,
            t.pruned_vertices,
            fmt(t.solve_residual),
            fmt(t.condition_number),
        ));
    }
    out
}
