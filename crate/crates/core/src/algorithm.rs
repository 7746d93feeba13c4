//! Instrumented runs of the three circuits.
//!
//! Each circuit is a fixed list of steps. Oracle steps go through an
//! [`InstrumentedOracle`], which counts every application, so the query
//! totals in a [`RunRecord`] are measured rather than asserted.
//!
//! | circuit          | qubits | queries      |
//! |------------------|--------|--------------|
//! | `deutsch`        | 2      | f once       |
//! | `entangled_pair` | 3      | f once, g once |
//! | `product_pair`   | 3      | f twice, g once |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{BoolFn, OracleGate, PromisePair};
use crate::state::{StateVector, Unitary};
use crate::Distribution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Deutsch,
    EntangledPair,
    ProductPair,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::Deutsch,
        Algorithm::EntangledPair,
        Algorithm::ProductPair,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Deutsch => "deutsch",
            Algorithm::EntangledPair => "entangled_pair",
            Algorithm::ProductPair => "product_pair",
        }
    }

    pub fn circuit(self) -> Circuit {
        match self {
            Algorithm::Deutsch => Circuit::deutsch(),
            Algorithm::EntangledPair => Circuit::entangled_pair(),
            Algorithm::ProductPair => Circuit::product_pair(),
        }
    }

    pub fn uses_g(self) -> bool {
        self != Algorithm::Deutsch
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "deutsch" => Ok(Algorithm::Deutsch),
            "entangled" | "entangled_pair" => Ok(Algorithm::EntangledPair),
            "product" | "product_pair" => Ok(Algorithm::ProductPair),
            _ => Err(Error::parse(s, "expected deutsch, entangled or product")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleSlot {
    F,
    G,
}

impl OracleSlot {
    pub fn label(self) -> &'static str {
        match self {
            OracleSlot::F => "f",
            OracleSlot::G => "g",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Prepare,
    Query,
    /// Local gates between queries.
    Interlude,
    Readout,
}

impl Stage {
    fn as_str(self) -> &'static str {
        match self {
            Stage::Prepare => "prepare",
            Stage::Query => "query",
            Stage::Interlude => "interlude",
            Stage::Readout => "readout",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    Gate {
        name: &'static str,
        gate: Unitary,
        targets: Vec<usize>,
    },
    Query {
        slot: OracleSlot,
        input: usize,
        output: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub stage: Stage,
    pub op: Operation,
}

impl Step {
    fn gate(stage: Stage, name: &'static str, gate: Unitary, targets: &[usize]) -> Self {
        Self {
            stage,
            op: Operation::Gate {
                name,
                gate,
                targets: targets.to_vec(),
            },
        }
    }

    fn query(slot: OracleSlot, input: usize, output: usize) -> Self {
        Self {
            stage: Stage::Query,
            op: Operation::Query {
                slot,
                input,
                output,
            },
        }
    }

    /// e.g. `"prepare:CNOT(1,2)"` or `"query:U_f(0,1)"`.
    pub fn label(&self) -> String {
        let (name, targets) = match &self.op {
            Operation::Gate { name, targets, .. } => ((*name).to_owned(), targets.clone()),
            Operation::Query {
                slot,
                input,
                output,
            } => (format!("U_{}", slot.label()), vec![*input, *output]),
        };
        let targets: Vec<String> = targets.iter().map(usize::to_string).collect();
        format!("{}:{}({})", self.stage.as_str(), name, targets.join(","))
    }
}

/// An oracle wrapper that counts its applications.
#[derive(Debug)]
pub struct InstrumentedOracle {
    slot: OracleSlot,
    function: BoolFn,
    unitary: Unitary,
    queries: usize,
}

impl InstrumentedOracle {
    pub fn new(slot: OracleSlot, function: BoolFn) -> Self {
        Self {
            slot,
            function,
            unitary: function.oracle_unitary(),
            queries: 0,
        }
    }

    pub fn query(
        &mut self,
        state: &StateVector,
        input: usize,
        output: usize,
    ) -> Result<StateVector> {
        self.queries += 1;
        state.apply_gate(&self.unitary, &[input, output])
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn function(&self) -> BoolFn {
        self.function
    }

    pub fn slot(&self) -> OracleSlot {
        self.slot
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    algorithm: Algorithm,
    num_qubits: usize,
    steps: Vec<Step>,
}

impl Circuit {
    /// `|0⟩|1⟩`, `H⊗H`, one query, `H` on qubit 0.
    pub fn deutsch() -> Self {
        use Stage::*;
        Self {
            algorithm: Algorithm::Deutsch,
            num_qubits: 2,
            steps: vec![
                Step::gate(Prepare, "X", Unitary::pauli_x(), &[1]),
                Step::gate(Prepare, "H", Unitary::hadamard(), &[0]),
                Step::gate(Prepare, "H", Unitary::hadamard(), &[1]),
                Step::query(OracleSlot::F, 0, 1),
                Step::gate(Readout, "H", Unitary::hadamard(), &[0]),
            ],
        }
    }

    /// Prepares `|+⟩ ⊗ (|00⟩ − |11⟩)/√2`, queries `f` on (0,1) and `g` on (0,2),
    /// then applies `H` to qubit 0.
    pub fn entangled_pair() -> Self {
        use Stage::*;
        Self {
            algorithm: Algorithm::EntangledPair,
            num_qubits: 3,
            steps: vec![
                Step::gate(Prepare, "X", Unitary::pauli_x(), &[1]),
                Step::gate(Prepare, "H", Unitary::hadamard(), &[1]),
                Step::gate(Prepare, "CNOT", Unitary::cnot(), &[1, 2]),
                Step::gate(Prepare, "H", Unitary::hadamard(), &[0]),
                Step::query(OracleSlot::F, 0, 1),
                Step::query(OracleSlot::G, 0, 2),
                Step::gate(Readout, "H", Unitary::hadamard(), &[0]),
            ],
        }
    }

    /// Three-query circuit that never leaves a product state.
    ///
    /// A phase-kickback query of `f` leaves qubit 0 in `|f(0)⊕f(1)⟩` after
    /// `H`, with qubit 1 restored to `|0⟩`. With `b = f(0)⊕f(1)` held in a
    /// basis state, `f` and `g` are then queried at `b`, writing `f(b)` and
    /// `g(b)` into qubits 1 and 2. Under the promise `f(b)⊕g(b) = f(0)⊕g(0)`.
    pub fn product_pair() -> Self {
        use Stage::*;
        Self {
            algorithm: Algorithm::ProductPair,
            num_qubits: 3,
            steps: vec![
                Step::gate(Prepare, "H", Unitary::hadamard(), &[0]),
                Step::gate(Prepare, "X", Unitary::pauli_x(), &[1]),
                Step::gate(Prepare, "H", Unitary::hadamard(), &[1]),
                Step::query(OracleSlot::F, 0, 1),
                Step::gate(Interlude, "H", Unitary::hadamard(), &[0]),
                Step::gate(Interlude, "H", Unitary::hadamard(), &[1]),
                Step::gate(Interlude, "X", Unitary::pauli_x(), &[1]),
                Step::query(OracleSlot::F, 0, 1),
                Step::query(OracleSlot::G, 0, 2),
            ],
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn query_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.op, Operation::Query { .. }))
            .count()
    }

    /// Elementary gates once each oracle is expanded into its gate realization.
    pub fn gate_count(&self, f: BoolFn, g: Option<BoolFn>) -> usize {
        self.steps
            .iter()
            .map(|s| match s.op {
                Operation::Gate { .. } => 1,
                Operation::Query {
                    slot: OracleSlot::F,
                    ..
                } => f.decomposition().len(),
                Operation::Query {
                    slot: OracleSlot::G,
                    ..
                } => g.map_or(0, |g| g.decomposition().len()),
            })
            .sum()
    }

    /// Runs the circuit on `|0…0⟩`, recording the state after every step.
    pub fn run(&self, f: BoolFn, g: Option<BoolFn>) -> Result<RunRecord> {
        let mut oracle_f = InstrumentedOracle::new(OracleSlot::F, f);
        let mut oracle_g = g.map(|g| InstrumentedOracle::new(OracleSlot::G, g));

        let mut state = StateVector::basis_state(self.num_qubits, 0)?;
        let mut step_states = vec![("init".to_owned(), state.clone())];
        for step in &self.steps {
            state = match &step.op {
                Operation::Gate { gate, targets, .. } => state.apply_gate(gate, targets)?,
                Operation::Query {
                    slot: OracleSlot::F,
                    input,
                    output,
                } => oracle_f.query(&state, *input, *output)?,
                Operation::Query {
                    slot: OracleSlot::G,
                    input,
                    output,
                } => oracle_g
                    .as_mut()
                    .ok_or_else(|| Error::domain("circuit queries g but no g was supplied"))?
                    .query(&state, *input, *output)?,
            };
            step_states.push((step.label(), state.clone()));
        }

        let mut query_counts = BTreeMap::from([("f".to_owned(), oracle_f.queries())]);
        if let Some(o) = &oracle_g {
            query_counts.insert("g".to_owned(), o.queries());
        }

        let final_distribution = state.bitstring_distribution();
        let decoded =
            DecodeTable::STANDARD.decode_distribution(self.algorithm, &final_distribution)?;
        Ok(RunRecord {
            algorithm: self.algorithm,
            f,
            g,
            final_distribution,
            query_counts,
            step_states,
            decoded,
        })
    }
}

/// What a measured bitstring says about `f` and `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecodedAnswer {
    /// `f(0) ⊕ f(1)`.
    pub balanced: u8,
    /// `f(0) ⊕ g(0)`; absent for single-function runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub different: Option<u8>,
}

impl DecodedAnswer {
    /// The correct answer for the given functions.
    pub fn truth(f: BoolFn, g: Option<BoolFn>) -> Self {
        Self {
            balanced: f.is_balanced(),
            different: g.map(|g| f.f0() ^ g.f0()),
        }
    }
}

/// Lookup from measured bits to answers.
///
/// `balanced[a]` is the answer when qubit 0 reads `a`; `different[p]` is the
/// answer when the ancilla parity `a₁ ⊕ a₂` is `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeTable {
    pub balanced: [u8; 2],
    pub different: [u8; 2],
}

impl DecodeTable {
    pub const STANDARD: DecodeTable = DecodeTable {
        balanced: [0, 1],
        different: [0, 1],
    };

    /// Decodes a 3-bit outcome `A a₁ a₂`.
    pub fn decode(&self, bits: &str) -> Result<DecodedAnswer> {
        let b = outcome_bits(bits, 3)?;
        Ok(DecodedAnswer {
            balanced: self.balanced[usize::from(b[0])],
            different: Some(self.different[usize::from(b[1] ^ b[2])]),
        })
    }

    /// Decodes a Deutsch outcome; only qubit 0 carries the answer.
    pub fn decode_deutsch(&self, bits: &str) -> Result<DecodedAnswer> {
        let b = outcome_bits(bits, 2)?;
        Ok(DecodedAnswer {
            balanced: self.balanced[usize::from(b[0])],
            different: None,
        })
    }

    pub fn decode_for(&self, algorithm: Algorithm, bits: &str) -> Result<DecodedAnswer> {
        match algorithm {
            Algorithm::Deutsch => self.decode_deutsch(bits),
            _ => self.decode(bits),
        }
    }

    /// Decodes the most probable outcome (ties go to the smallest bitstring).
    pub fn decode_distribution(
        &self,
        algorithm: Algorithm,
        dist: &Distribution,
    ) -> Result<DecodedAnswer> {
        let (bits, _) =
            argmax(dist).ok_or_else(|| Error::domain("cannot decode an empty distribution"))?;
        self.decode_for(algorithm, bits)
    }
}

impl Default for DecodeTable {
    fn default() -> Self {
        Self::STANDARD
    }
}

impl fmt::Display for DecodeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}{}",
            self.balanced[0], self.balanced[1], self.different[0], self.different[1]
        )
    }
}

impl FromStr for DecodeTable {
    type Err = Error;

    /// Four bits: answers for `A=0`, `A=1`, parity 0, parity 1. The standard table is `"0101"`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = outcome_bits(s.trim(), 4)
            .map_err(|_| Error::parse(s, "decode table must be four binary digits, e.g. 0101"))?;
        Ok(Self {
            balanced: [bits[0], bits[1]],
            different: [bits[2], bits[3]],
        })
    }
}

fn outcome_bits(bits: &str, len: usize) -> Result<Vec<u8>> {
    if bits.chars().count() != len {
        return Err(Error::domain(format!(
            "expected a {len}-bit outcome, got `{bits}`"
        )));
    }
    bits.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::parse(bits, format!("`{c}` is not a binary digit"))),
        })
        .collect()
}

pub(crate) fn argmax(dist: &Distribution) -> Option<(&String, f64)> {
    dist.iter()
        .map(|(k, &p)| (k, p))
        .fold(None, |best, (k, p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((k, p)),
        })
}

/// Decodes a 3-bit outcome with the standard table.
pub fn decode(bits: &str) -> Result<DecodedAnswer> {
    DecodeTable::STANDARD.decode(bits)
}

/// Outcome of one algorithm execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub f: BoolFn,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<BoolFn>,
    pub final_distribution: Distribution,
    pub query_counts: BTreeMap<String, usize>,
    pub step_states: Vec<(String, StateVector)>,
    pub decoded: DecodedAnswer,
}

impl RunRecord {
    pub fn truth(&self) -> DecodedAnswer {
        DecodedAnswer::truth(self.f, self.g)
    }

    pub fn total_queries(&self) -> usize {
        self.query_counts.values().sum()
    }

    /// Total probability of outcomes that decode to the correct answer.
    pub fn success_probability(&self, table: &DecodeTable) -> Result<f64> {
        let truth = self.truth();
        let mut total = 0.0;
        for (bits, p) in &self.final_distribution {
            if table.decode_for(self.algorithm, bits)? == truth {
                total += p;
            }
        }
        Ok(total)
    }

    pub fn final_state(&self) -> &StateVector {
        &self
            .step_states
            .last()
            .expect("records always hold the initial state")
            .1
    }
}

pub fn run_deutsch(f: BoolFn) -> Result<RunRecord> {
    Circuit::deutsch().run(f, None)
}

pub fn run_entangled_pair(pair: &PromisePair) -> Result<RunRecord> {
    Circuit::entangled_pair().run(pair.f(), Some(pair.g()))
}

pub fn run_product_pair(pair: &PromisePair) -> Result<RunRecord> {
    Circuit::product_pair().run(pair.f(), Some(pair.g()))
}

/// Runs `algorithm`; `g` is ignored for Deutsch and required otherwise.
pub fn run(algorithm: Algorithm, f: BoolFn, g: Option<BoolFn>) -> Result<RunRecord> {
    match (algorithm, g) {
        (Algorithm::Deutsch, _) => run_deutsch(f),
        (_, Some(g)) => algorithm
            .circuit()
            .run(PromisePair::new(f, g)?.f(), Some(g)),
        (_, None) => Err(Error::domain(format!("{algorithm} needs both f and g"))),
    }
}

impl OracleGate {
    /// The gate and its wires for an oracle acting on `(input, output)`.
    pub fn realize(self, input: usize, output: usize) -> (&'static str, Unitary, Vec<usize>) {
        match self {
            OracleGate::Cnot => ("CNOT", Unitary::cnot(), vec![input, output]),
            OracleGate::FlipOutput => ("X", Unitary::pauli_x(), vec![output]),
        }
    }
}
