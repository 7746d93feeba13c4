//! Result envelopes and their JSON / CSV renderings.

use std::collections::BTreeMap;

use qpair_core::entanglement::{Quantity, TheoremAudit};
use qpair_core::{Algorithm, DecodedAnswer, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::request::{OutputFormat, RunRequest};

pub const TOOL_NAME: &str = "qpair";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub tool: String,
    pub version: String,
    /// RFC 3339, UTC. The only field that changes between identical runs.
    pub timestamp: String,
    pub request: RunRequest,
    #[serde(flatten)]
    pub payload: Payload,
}

impl ResultEnvelope {
    pub fn new(request: RunRequest, payload: Payload) -> Self {
        Self {
            tool: TOOL_NAME.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            request,
            payload,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Run(RunPayload),
    Verify(VerifyReport),
    AuditTheorem(TheoremAudit),
    Fidelity(FidelityPayload),
    SweepNoise(SweepReport),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelitySummary {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFlag {
    pub step: String,
    pub product: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunPayload {
    pub algorithm: Algorithm,
    pub queries: BTreeMap<String, usize>,
    pub probabilities: Distribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    pub decoded: DecodedAnswer,
    /// Whether `decoded` matches the oracles' true properties.
    pub correct: bool,
    pub separability: Vec<StepFlag>,
    /// Present whenever the distribution is noisy or sampled; compared against the ideal run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<FidelitySummary>,
    pub gate_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmCheck {
    pub algorithm: Algorithm,
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    pub decoded: DecodedAnswer,
    pub truth: DecodedAnswer,
    pub success_probability: f64,
    pub queries: BTreeMap<String, usize>,
    pub entangled_steps: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub decode_table: String,
    /// e.g. `"entangled_pair": "8/8"`.
    pub summary: BTreeMap<String, String>,
    pub checks: Vec<AlgorithmCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPayload {
    pub theory: String,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
    pub probabilities: Distribution,
    pub theory_probabilities: Distribution,
    pub fidelity: FidelitySummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub scale: f64,
    pub fidelity: f64,
    pub decoded: DecodedAnswer,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub algorithm: Algorithm,
    pub points: Vec<SweepPoint>,
    /// Fidelity never rises as the scale grows.
    pub non_increasing: bool,
}

/// Renders an envelope. JSON carries everything; CSV carries the table a
/// plotting tool needs for the payload kind.
pub fn emit(envelope: &ResultEnvelope, format: OutputFormat) -> Result<Vec<u8>, CliError> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(envelope)
                .map_err(|e| CliError::Internal(format!("serializing result: {e}")))?;
            out.push(b'\n');
            Ok(out)
        }
        OutputFormat::Csv => emit_csv(&envelope.payload),
    }
}

/// 15 significant digits.
fn prob(p: f64) -> String {
    format!("{p:.14e}")
}

fn emit_csv(payload: &Payload) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, row: Vec<String>| {
        w.write_record(&row)
            .map_err(|e| CliError::Internal(format!("writing csv: {e}")))
    };
    match payload {
        Payload::Run(run) => {
            write_distribution(&mut w, &run.probabilities, run.counts.as_ref())?;
        }
        Payload::Fidelity(fid) => {
            write_distribution(&mut w, &fid.probabilities, Some(&fid.counts))?;
        }
        Payload::Verify(report) => {
            write(
                &mut w,
                to_row(&[
                    "algorithm",
                    "f",
                    "g",
                    "balanced",
                    "different",
                    "success_probability",
                    "queries",
                    "entangled_steps",
                    "passed",
                ]),
            )?;
            for c in &report.checks {
                write(
                    &mut w,
                    vec![
                        c.algorithm.to_string(),
                        c.f.clone(),
                        c.g.clone().unwrap_or_default(),
                        c.decoded.balanced.to_string(),
                        c.decoded
                            .different
                            .map(|d| d.to_string())
                            .unwrap_or_default(),
                        prob(c.success_probability),
                        c.queries.values().sum::<usize>().to_string(),
                        c.entangled_steps.to_string(),
                        c.passed.to_string(),
                    ],
                )?;
            }
        }
        Payload::AuditTheorem(audit) => {
            write(
                &mut w,
                to_row(&[
                    "family",
                    "samples",
                    "f0_decidable",
                    "f1_decidable",
                    "parity_decidable",
                    "max_simultaneous",
                    "at_most_one",
                ]),
            )?;
            for fam in &audit.families {
                let count = |q: Quantity| {
                    fam.decidable_counts
                        .get(&q)
                        .copied()
                        .unwrap_or(0)
                        .to_string()
                };
                write(
                    &mut w,
                    vec![
                        fam.family.to_string(),
                        fam.samples.to_string(),
                        count(Quantity::F0),
                        count(Quantity::F1),
                        count(Quantity::Parity),
                        fam.max_simultaneous.to_string(),
                        fam.at_most_one_decidable.to_string(),
                    ],
                )?;
            }
        }
        Payload::SweepNoise(sweep) => {
            write(&mut w, to_row(&["scale", "fidelity", "correct"]))?;
            for p in &sweep.points {
                write(
                    &mut w,
                    vec![p.scale.to_string(), prob(p.fidelity), p.correct.to_string()],
                )?;
            }
        }
    }
    w.into_inner()
        .map_err(|e| CliError::Internal(format!("writing csv: {e}")))
}

fn to_row(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| (*c).to_owned()).collect()
}

fn write_distribution(
    w: &mut csv::Writer<Vec<u8>>,
    probabilities: &Distribution,
    counts: Option<&BTreeMap<String, u64>>,
) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Internal(format!("writing csv: {e}"));
    w.write_record(["bitstring", "probability", "count"])
        .map_err(err)?;
    let mut keys: Vec<&String> = probabilities.keys().collect();
    if let Some(c) = counts {
        keys.extend(c.keys());
    }
    keys.sort();
    keys.dedup();
    for k in keys {
        let p = probabilities.get(k).copied().unwrap_or(0.0);
        let count = counts
            .map(|c| c.get(k).copied().unwrap_or(0).to_string())
            .unwrap_or_default();
        w.write_record([k.clone(), prob(p), count]).map_err(err)?;
    }
    Ok(())
}
