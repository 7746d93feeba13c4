//! Separability checks and the product-state query audit.
//!
//! Entanglement of a pure state across a bipartition is read off the
//! singular values of its reshaped amplitude matrix. On top of that this
//! module audits the claim that a single oracle query on a product input,
//! with a product output, can settle at most one of `f(0)`, `f(1)` and
//! `f(0) ⊕ f(1)`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algorithm::RunRecord;
use crate::error::{Error, Result};
use crate::oracle::{all_promise_pairs, BoolFn};
use crate::state::{StateVector, Unitary, EXACT_TOL, SPECTRAL_TOL};

/// Second Schmidt coefficient below this counts as a product state.
pub const ENTANGLEMENT_THRESHOLD: f64 = SPECTRAL_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Descending.
    pub schmidt_coefficients: Vec<f64>,
    pub is_product: bool,
}

impl SeparabilityVerdict {
    pub fn second_coefficient(&self) -> f64 {
        self.schmidt_coefficients.get(1).copied().unwrap_or(0.0)
    }
}

/// Schmidt coefficients of `state` across `left | rest`.
pub fn schmidt_analyze(state: &StateVector, left: &[usize]) -> Result<SeparabilityVerdict> {
    let n = state.num_qubits();
    let mut seen = vec![false; n];
    for &q in left {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(Error::domain(format!(
                "invalid or repeated qubit {q} in bipartition"
            )));
        }
    }
    if left.is_empty() || left.len() == n {
        return Err(Error::domain(
            "bipartition must split the register into two non-empty parts",
        ));
    }
    let right: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();

    let offsets = |qs: &[usize]| -> Vec<usize> {
        (0..1usize << qs.len())
            .map(|local| {
                qs.iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> (qs.len() - 1 - j)) & 1 == 1)
                    .map(|(_, &q)| 1usize << (n - 1 - q))
                    .sum()
            })
            .collect()
    };
    let rows = offsets(left);
    let cols = offsets(&right);
    let amps = state.amplitudes();
    let m = DMatrix::from_fn(rows.len(), cols.len(), |r, c| amps[rows[r] | cols[c]]);

    let mut coefficients: Vec<f64> = m.singular_values().iter().copied().collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let is_product = coefficients
        .get(1)
        .is_none_or(|&s| s < ENTANGLEMENT_THRESHOLD);
    Ok(SeparabilityVerdict {
        left: left.to_vec(),
        right,
        schmidt_coefficients: coefficients,
        is_product,
    })
}

/// Largest second Schmidt coefficient over all single-qubit cuts.
pub fn max_single_cut_entanglement(state: &StateVector) -> f64 {
    if state.num_qubits() < 2 {
        return 0.0;
    }
    (0..state.num_qubits())
        .map(|q| {
            schmidt_analyze(state, &[q])
                .expect("single-qubit cuts are valid")
                .second_coefficient()
        })
        .fold(0.0, f64::max)
}

/// True when the state is a tensor product of single-qubit states.
pub fn fully_product(state: &StateVector) -> bool {
    max_single_cut_entanglement(state) < ENTANGLEMENT_THRESHOLD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSeparability {
    pub step: String,
    pub product: bool,
    pub max_second_coefficient: f64,
}

pub fn trace_run_separability(record: &RunRecord) -> Vec<StepSeparability> {
    record
        .step_states
        .iter()
        .map(|(step, state)| {
            let e = max_single_cut_entanglement(state);
            StepSeparability {
                step: step.clone(),
                product: e < ENTANGLEMENT_THRESHOLD,
                max_second_coefficient: e,
            }
        })
        .collect()
}

/// `(α|0⟩ + β|1⟩) ⊗ (γ|0⟩ + δ|1⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStateParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl ProductStateParams {
    pub fn new(
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        delta: Complex64,
    ) -> Result<Self> {
        let first = alpha.norm_sqr() + beta.norm_sqr();
        let second = gamma.norm_sqr() + delta.norm_sqr();
        if (first - 1.0).abs() > EXACT_TOL || (second - 1.0).abs() > EXACT_TOL {
            return Err(Error::domain(format!(
                "product-state parameters are not normalized ({first}, {second})"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let c = |x| Complex64::new(x, 0.0);
        Self::new(c(alpha), c(beta), c(gamma), c(delta))
    }

    /// Haar-random single-qubit factors.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut qubit = || {
            let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            [
                Complex64::new(v[0] / norm, v[1] / norm),
                Complex64::new(v[2] / norm, v[3] / norm),
            ]
        };
        let [alpha, beta] = qubit();
        let [gamma, delta] = qubit();
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::product(&[[self.alpha, self.beta], [self.gamma, self.delta]])
            .expect("normalized by construction")
    }

    /// `|αβ(γ² − δ²)|`, the determinant of the CNOT output's amplitude matrix.
    pub fn cnot_criterion(&self) -> f64 {
        (self.alpha * self.beta * (self.gamma * self.gamma - self.delta * self.delta)).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnotProductCheck {
    /// From the algebraic criterion `|αβ(γ² − δ²)| < 1e-9`.
    pub predicted_product: bool,
    /// From the Schmidt decomposition of `CNOT(|ψ₀⟩|ψ₁⟩)`.
    pub actual_product: bool,
    pub criterion: f64,
    pub second_coefficient: f64,
}

impl CnotProductCheck {
    pub fn agree(&self) -> bool {
        self.predicted_product == self.actual_product
    }
}

pub fn cnot_product_condition(params: &ProductStateParams) -> CnotProductCheck {
    let criterion = params.cnot_criterion();
    let out = params
        .state()
        .apply_gate(&Unitary::cnot(), &[0, 1])
        .expect("two-qubit gate on a two-qubit state");
    let verdict = schmidt_analyze(&out, &[0]).expect("valid cut");
    CnotProductCheck {
        predicted_product: criterion < ENTANGLEMENT_THRESHOLD,
        actual_product: verdict.is_product,
        criterion,
        second_coefficient: verdict.second_coefficient(),
    }
}

/// The four input families that a balanced oracle leaves unentangled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProductFamily {
    /// `|0⟩(γ|0⟩ + δ|1⟩)`
    #[serde(rename = "ket0-tensor-any")]
    Ket0TensorAny,
    /// `|1⟩(γ|0⟩ + δ|1⟩)`
    #[serde(rename = "ket1-tensor-any")]
    Ket1TensorAny,
    /// `(α|0⟩ + β|1⟩)|+⟩`
    #[serde(rename = "any-tensor-plus")]
    AnyTensorPlus,
    /// `(α|0⟩ + β|1⟩)|−⟩`
    #[serde(rename = "any-tensor-minus")]
    AnyTensorMinus,
}

impl ProductFamily {
    pub const ALL: [ProductFamily; 4] = [
        ProductFamily::Ket0TensorAny,
        ProductFamily::Ket1TensorAny,
        ProductFamily::AnyTensorPlus,
        ProductFamily::AnyTensorMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ProductFamily::Ket0TensorAny => "ket0-tensor-any",
            ProductFamily::Ket1TensorAny => "ket1-tensor-any",
            ProductFamily::AnyTensorPlus => "any-tensor-plus",
            ProductFamily::AnyTensorMinus => "any-tensor-minus",
        }
    }

    /// Member with free qubit `cos θ |0⟩ + e^{iφ} sin θ |1⟩`.
    pub fn member(self, theta: f64, phi: f64) -> ProductStateParams {
        let free = [
            Complex64::new(theta.cos(), 0.0),
            Complex64::from_polar(theta.sin(), phi),
        ];
        let c = |x| Complex64::new(x, 0.0);
        let (alpha, beta, gamma, delta) = match self {
            ProductFamily::Ket0TensorAny => (c(1.0), c(0.0), free[0], free[1]),
            ProductFamily::Ket1TensorAny => (c(0.0), c(1.0), free[0], free[1]),
            ProductFamily::AnyTensorPlus => (free[0], free[1], c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)),
            ProductFamily::AnyTensorMinus => {
                (free[0], free[1], c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2))
            }
        };
        ProductStateParams {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// `points × points` members: θ evenly over `[0, π/2]`, φ evenly over `[0, 2π)`.
    pub fn grid(self, points: usize) -> Vec<ProductStateParams> {
        let points = points.max(1);
        let theta_step = if points > 1 {
            FRAC_PI_2 / (points - 1) as f64
        } else {
            0.0
        };
        let phi_step = TAU / points as f64;
        (0..points)
            .flat_map(|i| (0..points).map(move |j| (i as f64 * theta_step, j as f64 * phi_step)))
            .map(|(theta, phi)| self.member(theta, phi))
            .collect()
    }

    /// Whether the parameters lie in this family (fixed factor equal up to phase).
    pub fn contains(self, p: &ProductStateParams) -> bool {
        let fixed_matches = |a: Complex64, b: Complex64, x: Complex64, y: Complex64| {
            ((a.conj() * x + b.conj() * y).norm() - 1.0).abs() <= EXACT_TOL
        };
        let c = |x| Complex64::new(x, 0.0);
        match self {
            ProductFamily::Ket0TensorAny => fixed_matches(p.alpha, p.beta, c(1.0), c(0.0)),
            ProductFamily::Ket1TensorAny => fixed_matches(p.alpha, p.beta, c(0.0), c(1.0)),
            ProductFamily::AnyTensorPlus => {
                fixed_matches(p.gamma, p.delta, c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2))
            }
            ProductFamily::AnyTensorMinus => {
                fixed_matches(p.gamma, p.delta, c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2))
            }
        }
    }
}

impl fmt::Display for ProductFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProductFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.label() == s.trim())
            .ok_or_else(|| Error::domain(format!("unknown product-state family `{s}`")))
    }
}

/// A one-bit property of `f` that a single query might reveal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "f(0)")]
    F0,
    #[serde(rename = "f(1)")]
    F1,
    #[serde(rename = "f(0)^f(1)")]
    Parity,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::F0, Quantity::F1, Quantity::Parity];

    pub fn of(self, f: BoolFn) -> u8 {
        match self {
            Quantity::F0 => f.f0(),
            Quantity::F1 => f.f1(),
            Quantity::Parity => f.is_balanced(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quantity::F0 => "f(0)",
            Quantity::F1 => "f(1)",
            Quantity::Parity => "f(0)^f(1)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleAudit {
    pub params: ProductStateParams,
    /// `|⟨out_i|out_j⟩|` for the oracles of C1, C2, B1, B2.
    pub overlaps: [[f64; 4]; 4],
    pub decidable: Vec<Quantity>,
    pub outputs_product: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyAudit {
    pub family: ProductFamily,
    pub samples: usize,
    /// Samples in which each quantity was perfectly decidable.
    pub decidable_counts: BTreeMap<Quantity, usize>,
    /// Most quantities decidable from a single sample.
    pub max_simultaneous: usize,
    pub all_outputs_product: bool,
    pub at_most_one_decidable: bool,
}

/// Which quantities separate the four oracle outputs into mutually orthogonal groups.
pub fn audit_sample(params: &ProductStateParams) -> SampleAudit {
    let input = params.state();
    let outputs: Vec<StateVector> = BoolFn::NAMED
        .iter()
        .map(|f| {
            input
                .apply_gate(&f.oracle_unitary(), &[0, 1])
                .expect("two-qubit oracle on a two-qubit state")
        })
        .collect();
    let mut overlaps = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            overlaps[i][j] = outputs[i].inner(&outputs[j]).expect("same size").norm();
        }
    }
    let decidable = Quantity::ALL
        .into_iter()
        .filter(|q| {
            (0..4).all(|i| {
                (0..4).all(|j| {
                    q.of(BoolFn::NAMED[i]) == q.of(BoolFn::NAMED[j])
                        || overlaps[i][j] < ENTANGLEMENT_THRESHOLD
                })
            })
        })
        .collect();
    SampleAudit {
        params: *params,
        overlaps,
        decidable,
        outputs_product: outputs.iter().all(fully_product),
    }
}

pub fn audit_family_distinguishability(
    family: ProductFamily,
    samples: &[ProductStateParams],
) -> Result<FamilyAudit> {
    let mut decidable_counts: BTreeMap<Quantity, usize> =
        Quantity::ALL.iter().map(|&q| (q, 0)).collect();
    let mut max_simultaneous = 0;
    let mut all_outputs_product = true;
    for params in samples {
        if !family.contains(params) {
            return Err(Error::domain(format!(
                "sample {params:?} is not a member of {family}"
            )));
        }
        let audit = audit_sample(params);
        for q in &audit.decidable {
            *decidable_counts.entry(*q).or_default() += 1;
        }
        max_simultaneous = max_simultaneous.max(audit.decidable.len());
        all_outputs_product &= audit.outputs_product;
    }
    Ok(FamilyAudit {
        family,
        samples: samples.len(),
        decidable_counts,
        max_simultaneous,
        all_outputs_product,
        at_most_one_decidable: max_simultaneous <= 1,
    })
}

/// Whether learning one quantity of `f` and one of `g` pins down both answers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationCheck {
    pub from_f: Quantity,
    pub from_g: Quantity,
    pub determines_both: bool,
}

/// Brute force over all promise pairs: does `(x(f), y(g))` always fix
/// `(f(0)⊕f(1), f(0)⊕g(0))`?
pub fn combination_checks() -> Vec<CombinationCheck> {
    let pairs = all_promise_pairs();
    let mut out = Vec::new();
    for from_f in Quantity::ALL {
        for from_g in Quantity::ALL {
            let mut seen: BTreeMap<(u8, u8), (u8, u8)> = BTreeMap::new();
            let mut determines_both = true;
            for p in &pairs {
                let key = (from_f.of(p.f()), from_g.of(p.g()));
                let answer = (p.f().is_balanced(), p.same_at_zero());
                if *seen.entry(key).or_insert(answer) != answer {
                    determines_both = false;
                }
            }
            out.push(CombinationCheck {
                from_f,
                from_g,
                determines_both,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnotConditionSummary {
    pub random_samples: usize,
    pub family_samples: usize,
    pub disagreements: usize,
    /// Family members that CNOT nonetheless entangled.
    pub family_entangled: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremAudit {
    pub cnot_condition: CnotConditionSummary,
    pub families: Vec<FamilyAudit>,
    pub combinations: Vec<CombinationCheck>,
    pub holds: bool,
}

/// Runs every check: the CNOT product criterion on random and family inputs,
/// the four-family distinguishability audit on a `grid_points²` grid, and the
/// final combination argument.
pub fn audit_theorem<R: Rng + ?Sized>(
    random_samples: usize,
    grid_points: usize,
    rng: &mut R,
) -> Result<TheoremAudit> {
    let mut disagreements = 0;
    for _ in 0..random_samples {
        if !cnot_product_condition(&ProductStateParams::random(rng)).agree() {
            disagreements += 1;
        }
    }

    let mut families = Vec::new();
    let mut family_samples = 0;
    let mut family_entangled = 0;
    for family in ProductFamily::ALL {
        let grid = family.grid(grid_points);
        for p in &grid {
            let check = cnot_product_condition(p);
            if !check.agree() {
                disagreements += 1;
            }
            if !check.actual_product {
                family_entangled += 1;
            }
        }
        family_samples += grid.len();
        families.push(audit_family_distinguishability(family, &grid)?);
    }

    let combinations = combination_checks();
    let holds = disagreements == 0
        && family_entangled == 0
        && families
            .iter()
            .all(|f| f.at_most_one_decidable && f.all_outputs_product)
        && combinations.iter().all(|c| !c.determines_both);
    Ok(TheoremAudit {
        cnot_condition: CnotConditionSummary {
            random_samples,
            family_samples,
            disagreements,
            family_entangled,
        },
        families,
        combinations,
        holds,
    })
}

/// [`audit_theorem`] with a seeded ChaCha generator.
pub fn audit_theorem_seeded(
    random_samples: usize,
    grid_points: usize,
    seed: u64,
) -> Result<TheoremAudit> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    audit_theorem(random_samples, grid_points, &mut rng)
}
