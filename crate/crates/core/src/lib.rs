//! Exact simulation of the paired Deutsch problem.
//!
//! Two one-bit Boolean functions `f` and `g` are promised to be both constant
//! or both balanced. The task is to learn `f(0) ⊕ f(1)` and `f(0) ⊕ g(0)`.
//! This crate provides:
//!
//! * [`state`]: dense state vectors, unitaries and density matrices over a few qubits.
//! * [`oracle`]: Boolean functions and their XOR oracles.
//! * [`algorithm`]: instrumented runs of Deutsch's circuit, the entangled
//!   two-query circuit and the three-query product-state circuit.
//! * [`entanglement`]: Schmidt analysis, per-step separability and the
//!   product-state distinguishability audit.
//! * [`noise`]: depolarizing/readout noise, shot sampling and statistical fidelity.
//!
//! Qubit 0 is the most significant bit of a basis index, so the bitstring
//! `"100"` means qubit 0 (`A`) is set and both ancillas are clear.

pub mod algorithm;
pub mod entanglement;
pub mod error;
pub mod noise;
pub mod oracle;
pub mod state;

pub use algorithm::{
    decode, run_deutsch, run_entangled_pair, run_product_pair, Algorithm, DecodeTable,
    DecodedAnswer, RunRecord,
};
pub use error::{Error, Result};
pub use noise::{
    run_noisy, sample_shots, statistical_fidelity, FidelityReport, NoiseModel, ShotResult,
};
pub use oracle::{all_promise_pairs, BoolFn, PromisePair};
pub use state::{DensityMatrix, StateVector, Unitary};

/// Probability distribution over measured bitstrings, ordered by bitstring.
pub type Distribution = std::collections::BTreeMap<String, f64>;
