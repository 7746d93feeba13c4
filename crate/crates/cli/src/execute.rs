//! Carries out a [`RunRequest`] and builds its result envelope.

use std::collections::BTreeMap;
use std::path::Path;

use qpair_core::algorithm::{self, Circuit};
use qpair_core::entanglement::{audit_theorem_seeded, trace_run_separability};
use qpair_core::noise::{
    bhattacharyya, statistical_fidelity_with, DEFAULT_BOOTSTRAP_RESAMPLES, DEFAULT_BOOTSTRAP_SEED,
};
use qpair_core::state::parse_bits;
use qpair_core::{
    all_promise_pairs, run_noisy, sample_shots, Algorithm, BoolFn, DecodeTable, DecodedAnswer,
    Distribution, NoiseModel, ShotResult,
};

use crate::emit::{
    AlgorithmCheck, FidelityPayload, FidelitySummary, Payload, ResultEnvelope, RunPayload,
    StepFlag, SweepPoint, SweepReport, VerifyReport,
};
use crate::error::CliError;
use crate::request::{Command, RunRequest, Shots};

/// Success probability a noiseless run must reach.
const CERTAINTY: f64 = 1.0 - 1e-10;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub envelope: ResultEnvelope,
    /// 0 on success, 1 when a verification or audit failed.
    pub exit_code: u8,
}

pub fn execute(request: &RunRequest) -> Result<Outcome, CliError> {
    let (payload, ok) = match request.command {
        Command::Run => (Payload::Run(run(request)?), true),
        Command::Verify => {
            let report = verify(request.decode_table.unwrap_or_default())?;
            let ok = report.passed;
            (Payload::Verify(report), ok)
        }
        Command::AuditTheorem => {
            let audit = audit_theorem_seeded(
                request.samples.unwrap_or(1000),
                request.grid.unwrap_or(50),
                request.seed,
            )?;
            let ok = audit.holds;
            (Payload::AuditTheorem(audit), ok)
        }
        Command::Fidelity => (Payload::Fidelity(fidelity(request)?), true),
        Command::SweepNoise => {
            let report = sweep(request)?;
            (Payload::SweepNoise(report), true)
        }
    };
    Ok(Outcome {
        envelope: ResultEnvelope::new(request.clone(), payload),
        exit_code: if ok { 0 } else { 1 },
    })
}

fn required<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{flag} is required")))
}

/// Keeps the bootstrap stream independent of the shot-sampling stream.
fn bootstrap_seed(seed: u64) -> u64 {
    seed ^ DEFAULT_BOOTSTRAP_SEED
}

fn theory_distribution(
    algorithm: Algorithm,
    f: BoolFn,
    g: Option<BoolFn>,
    noise: Option<&NoiseModel>,
) -> Result<Distribution, CliError> {
    Ok(match noise {
        Some(model) => run_noisy(algorithm, f, g, model)?,
        None => algorithm::run(algorithm, f, g)?.final_distribution,
    })
}

fn run(request: &RunRequest) -> Result<RunPayload, CliError> {
    let algorithm = required(request.algorithm, "--algorithm")?;
    let f = required(request.f, "--f")?;
    let g = request.g;
    let record = algorithm::run(algorithm, f, g)?;
    let noise = request.noise.resolve()?;
    let noisy = match &noise {
        Some(model) => Some(run_noisy(algorithm, f, g, model)?),
        None => None,
    };
    let source = noisy.as_ref().unwrap_or(&record.final_distribution);

    let (probabilities, counts, fidelity) = match request.shots {
        Shots::Exact => {
            let fidelity = noisy.as_ref().map(|p| FidelitySummary {
                value: bhattacharyya(p, &record.final_distribution),
                stderr: 0.0,
            });
            (source.clone(), None, fidelity)
        }
        Shots::Count(shots) => {
            let sampled = sample_shots(source, shots, request.seed)?;
            let report = statistical_fidelity_with(
                &sampled,
                &record.final_distribution,
                DEFAULT_BOOTSTRAP_RESAMPLES,
                bootstrap_seed(request.seed),
            )?;
            let summary = FidelitySummary {
                value: report.fidelity,
                stderr: report.stderr,
            };
            (report.p_exp, Some(sampled.counts), Some(summary))
        }
    };

    let decoded = DecodeTable::STANDARD.decode_distribution(algorithm, &probabilities)?;
    let separability = trace_run_separability(&record)
        .into_iter()
        .map(|s| StepFlag {
            step: s.step,
            product: s.product,
        })
        .collect();
    Ok(RunPayload {
        algorithm,
        queries: record.query_counts.clone(),
        probabilities,
        counts,
        correct: decoded == record.truth(),
        decoded,
        separability,
        fidelity,
        gate_count: algorithm.circuit().gate_count(f, g),
    })
}

fn expected_queries(algorithm: Algorithm) -> BTreeMap<String, usize> {
    let pairs: &[(&str, usize)] = match algorithm {
        Algorithm::Deutsch => &[("f", 1)],
        Algorithm::EntangledPair => &[("f", 1), ("g", 1)],
        Algorithm::ProductPair => &[("f", 2), ("g", 1)],
    };
    pairs.iter().map(|&(k, v)| (k.to_owned(), v)).collect()
}

fn check(
    algorithm: Algorithm,
    f: BoolFn,
    g: Option<BoolFn>,
    table: &DecodeTable,
) -> Result<AlgorithmCheck, CliError> {
    let record = Circuit::run(&algorithm.circuit(), f, g)?;
    let truth = record.truth();
    let decoded = table.decode_distribution(algorithm, &record.final_distribution)?;
    let success_probability = record.success_probability(table)?;
    let entangled_steps = trace_run_separability(&record)
        .iter()
        .filter(|s| !s.product)
        .count();

    let mut failures = Vec::new();
    if decoded != truth {
        failures.push("decoded answer is wrong".to_owned());
    }
    if success_probability < CERTAINTY {
        failures.push(format!(
            "success probability {success_probability} is below 1"
        ));
    }
    let expected = expected_queries(algorithm);
    if record.query_counts != expected {
        failures.push(format!(
            "queries {:?}, expected {:?}",
            record.query_counts, expected
        ));
    }
    match algorithm {
        Algorithm::EntangledPair if entangled_steps == 0 => {
            failures.push("no intermediate state is entangled".to_owned());
        }
        Algorithm::ProductPair if entangled_steps > 0 => {
            failures.push(format!(
                "{entangled_steps} intermediate states are entangled"
            ));
        }
        _ => {}
    }

    Ok(AlgorithmCheck {
        algorithm,
        f: f.to_string(),
        g: g.map(|g| g.to_string()),
        decoded,
        truth,
        success_probability,
        queries: record.query_counts,
        entangled_steps,
        passed: failures.is_empty(),
        failures,
    })
}

/// Runs every promise pair through both pair algorithms and every function through Deutsch.
pub fn verify(table: DecodeTable) -> Result<VerifyReport, CliError> {
    let mut checks = Vec::new();
    for algorithm in [Algorithm::EntangledPair, Algorithm::ProductPair] {
        for pair in all_promise_pairs() {
            checks.push(check(algorithm, pair.f(), Some(pair.g()), &table)?);
        }
    }
    for f in BoolFn::NAMED {
        checks.push(check(Algorithm::Deutsch, f, None, &table)?);
    }

    let mut summary = BTreeMap::new();
    for algorithm in Algorithm::ALL {
        let of_kind: Vec<&AlgorithmCheck> =
            checks.iter().filter(|c| c.algorithm == algorithm).collect();
        let passed = of_kind.iter().filter(|c| c.passed).count();
        summary.insert(algorithm.to_string(), format!("{passed}/{}", of_kind.len()));
    }
    Ok(VerifyReport {
        decode_table: table.to_string(),
        summary,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn fidelity(request: &RunRequest) -> Result<FidelityPayload, CliError> {
    let theory = required(request.theory, "--theory")?;
    let path = request
        .counts
        .as_deref()
        .ok_or_else(|| CliError::Usage("--counts is required".into()))?;
    let counts = read_counts(path)?;
    let noise = request.noise.resolve()?;
    let p_th = theory_distribution(theory.algorithm, theory.f, theory.g, noise.as_ref())?;

    let width = theory.algorithm.circuit().num_qubits();
    if let Some(bad) = counts.keys().find(|k| k.len() != width) {
        return Err(CliError::Input(format!(
            "{}: outcome `{bad}` does not have {width} bits",
            path.display()
        )));
    }
    let result =
        ShotResult::new(counts).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let report = statistical_fidelity_with(
        &result,
        &p_th,
        DEFAULT_BOOTSTRAP_RESAMPLES,
        bootstrap_seed(request.seed),
    )?;
    Ok(FidelityPayload {
        theory: theory.to_string(),
        shots: result.shots,
        counts: result.counts,
        probabilities: report.p_exp,
        theory_probabilities: report.p_th,
        fidelity: FidelitySummary {
            value: report.fidelity,
            stderr: report.stderr,
        },
    })
}

/// Reads raw counts from JSON (a bare object or an envelope with `counts`) or CSV.
pub fn read_counts(path: &Path) -> Result<BTreeMap<String, u64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read counts file {}: {e}", path.display())))?;
    let input = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));

    let counts: BTreeMap<String, u64> = if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| input(format!("invalid JSON: {e}")))?;
        let object = value.get("counts").cloned().unwrap_or(value);
        serde_json::from_value(object).map_err(|e| {
            input(format!(
                "counts must map bitstrings to non-negative integers: {e}"
            ))
        })?
    } else {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| input(format!("invalid CSV: {e}")))?
            .clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| input(format!("CSV needs a `{name}` column")))
        };
        let (bits_col, count_col) = (column("bitstring")?, column("count")?);
        let mut counts = BTreeMap::new();
        for row in reader.records() {
            let row = row.map_err(|e| input(format!("invalid CSV: {e}")))?;
            let bits = row.get(bits_col).unwrap_or("").trim().to_owned();
            let raw = row.get(count_col).unwrap_or("").trim();
            let count: u64 = raw.parse().map_err(|_| {
                input(format!(
                    "count `{raw}` for `{bits}` is not a non-negative integer"
                ))
            })?;
            *counts.entry(bits).or_insert(0) += count;
        }
        counts
    };

    for bits in counts.keys() {
        parse_bits(bits).map_err(|e| input(e.to_string()))?;
    }
    if counts.values().sum::<u64>() == 0 {
        return Err(input("counts are empty".into()));
    }
    Ok(counts)
}

fn sweep(request: &RunRequest) -> Result<SweepReport, CliError> {
    let algorithm = required(request.algorithm, "--algorithm")?;
    let f = required(request.f, "--f")?;
    let g = request.g;
    let base = request
        .noise
        .resolve()?
        .ok_or_else(|| CliError::Usage("sweep-noise needs a noise model, not `off`".into()))?;
    let ideal = algorithm::run(algorithm, f, g)?.final_distribution;
    let truth = DecodedAnswer::truth(f, g);

    let mut scales = request
        .scales
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0]);
    scales.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(scales.len());
    for scale in scales {
        let noisy = run_noisy(algorithm, f, g, &base.scaled(scale))?;
        let decoded = DecodeTable::STANDARD.decode_distribution(algorithm, &noisy)?;
        points.push(SweepPoint {
            scale,
            fidelity: bhattacharyya(&noisy, &ideal),
            correct: decoded == truth,
            decoded,
        });
    }
    let non_increasing = points
        .windows(2)
        .all(|w| w[1].fidelity <= w[0].fidelity + 1e-12);
    Ok(SweepReport {
        algorithm,
        points,
        non_increasing,
    })
}
