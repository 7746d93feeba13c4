//! Noisy re-simulation, shot sampling and statistical fidelity.
//!
//! Gate noise is a depolarizing channel applied after every elementary gate
//! at that gate's rate; oracles are expanded into their CNOT/X realization
//! first, so a constant-zero oracle is noiseless. Readout noise is a
//! symmetric bit flip per qubit applied to the final outcome distribution.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _, Poisson};
use serde::{Deserialize, Serialize};

use crate::algorithm::{Algorithm, Operation, OracleSlot};
use crate::error::{Error, Result};
use crate::oracle::BoolFn;
use crate::state::{bit_of, format_bits, qubit_mask, DensityMatrix, Unitary, PROB_CUTOFF};
use crate::Distribution;

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 1000;
pub const DEFAULT_BOOTSTRAP_SEED: u64 = 0x5eed;

/// Error rate of a two-qubit gate between `control` and `target` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRate {
    pub control: usize,
    pub target: usize,
    pub error: f64,
}

/// Per-qubit and per-pair error probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub single_qubit_gate_error: Vec<f64>,
    pub two_qubit_gate_error: Vec<PairRate>,
    pub readout_error: Vec<f64>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::table2()
    }
}

impl NoiseModel {
    /// Calibration of the three-qubit superconducting device the experiment ran on.
    pub fn table2() -> Self {
        Self {
            single_qubit_gate_error: vec![1.72e-3, 1.46e-3, 1.80e-3],
            two_qubit_gate_error: vec![
                PairRate {
                    control: 0,
                    target: 1,
                    error: 3.17e-2,
                },
                PairRate {
                    control: 1,
                    target: 2,
                    error: 2.87e-2,
                },
                PairRate {
                    control: 0,
                    target: 2,
                    error: 2.67e-2,
                },
            ],
            readout_error: vec![4.20e-2, 7.00e-2, 1.40e-2],
        }
    }

    pub fn noiseless(num_qubits: usize) -> Self {
        let mut two_qubit_gate_error = Vec::new();
        for control in 0..num_qubits {
            for target in control + 1..num_qubits {
                two_qubit_gate_error.push(PairRate {
                    control,
                    target,
                    error: 0.0,
                });
            }
        }
        Self {
            single_qubit_gate_error: vec![0.0; num_qubits],
            two_qubit_gate_error,
            readout_error: vec![0.0; num_qubits],
        }
    }

    /// Only readout noise, at the given per-qubit rates.
    pub fn readout_only(readout_error: Vec<f64>) -> Self {
        let mut model = Self::noiseless(readout_error.len());
        model.readout_error = readout_error;
        model
    }

    pub fn validate(&self) -> Result<()> {
        let rates = self
            .single_qubit_gate_error
            .iter()
            .chain(&self.readout_error)
            .chain(self.two_qubit_gate_error.iter().map(|p| &p.error));
        for &p in rates {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("error rate {p} is outside [0, 1]")));
            }
        }
        for p in &self.two_qubit_gate_error {
            if p.control == p.target {
                return Err(Error::domain(format!(
                    "two-qubit rate for qubit {} paired with itself",
                    p.control
                )));
            }
        }
        Ok(())
    }

    /// Every rate multiplied by `factor`, clamped to 1.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |p: f64| (p * factor).clamp(0.0, 1.0);
        Self {
            single_qubit_gate_error: self.single_qubit_gate_error.iter().map(|&p| s(p)).collect(),
            two_qubit_gate_error: self
                .two_qubit_gate_error
                .iter()
                .map(|p| PairRate {
                    error: s(p.error),
                    ..*p
                })
                .collect(),
            readout_error: self.readout_error.iter().map(|&p| s(p)).collect(),
        }
    }

    /// Missing qubits count as noiseless.
    pub fn gate_error(&self, qubit: usize) -> f64 {
        self.single_qubit_gate_error
            .get(qubit)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn readout(&self, qubit: usize) -> f64 {
        self.readout_error.get(qubit).copied().unwrap_or(0.0)
    }

    /// Rate for a two-qubit gate; the ordered entry wins, otherwise the reversed one.
    pub fn pair_error(&self, control: usize, target: usize) -> Result<f64> {
        let find = |c, t| {
            self.two_qubit_gate_error
                .iter()
                .find(|p| p.control == c && p.target == t)
                .map(|p| p.error)
        };
        find(control, target)
            .or_else(|| find(target, control))
            .ok_or_else(|| {
                Error::domain(format!(
                    "noise model has no two-qubit rate for qubits ({control}, {target})"
                ))
            })
    }

    /// Serializes to the `key = value` config format, 1-based qubit labels.
    ///
    /// ```text
    /// gate_error.1 = 0.00172
    /// readout_error.1 = 0.042
    /// cnot_error.1.2 = 0.0317
    /// ```
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for (q, p) in self.single_qubit_gate_error.iter().enumerate() {
            let _ = writeln!(out, "gate_error.{} = {p:?}", q + 1);
        }
        for (q, p) in self.readout_error.iter().enumerate() {
            let _ = writeln!(out, "readout_error.{} = {p:?}", q + 1);
        }
        for p in &self.two_qubit_gate_error {
            let _ = writeln!(
                out,
                "cnot_error.{}.{} = {:?}",
                p.control + 1,
                p.target + 1,
                p.error
            );
        }
        out
    }

    /// Parses the format written by [`to_config`](Self::to_config). Blank lines
    /// and `#` comments are ignored; unspecified qubits default to 0.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut gate: BTreeMap<usize, f64> = BTreeMap::new();
        let mut readout: BTreeMap<usize, f64> = BTreeMap::new();
        let mut pairs: Vec<PairRate> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |reason: &str| Error::parse(line, format!("line {}: {reason}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at("expected `key = value`"))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| at(&format!("`{}` is not a number", value.trim())))?;
            let qubit = |s: &str| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(q) if q >= 1 => Ok(q - 1),
                    _ => Err(at(&format!("`{s}` is not a 1-based qubit label"))),
                }
            };
            let parts: Vec<&str> = key.split('.').collect();
            let duplicate = match parts.as_slice() {
                ["gate_error", q] => gate.insert(qubit(q)?, value).is_some(),
                ["readout_error", q] => readout.insert(qubit(q)?, value).is_some(),
                ["cnot_error", c, t] => {
                    let (control, target) = (qubit(c)?, qubit(t)?);
                    let dup = pairs
                        .iter()
                        .any(|p| p.control == control && p.target == target);
                    pairs.push(PairRate {
                        control,
                        target,
                        error: value,
                    });
                    dup
                }
                _ => return Err(at(&format!("unknown key `{key}`"))),
            };
            if duplicate {
                return Err(at(&format!("`{key}` given twice")));
            }
        }

        let dense = |m: BTreeMap<usize, f64>| -> Vec<f64> {
            let len = m.keys().next_back().map_or(0, |q| q + 1);
            (0..len)
                .map(|q| m.get(&q).copied().unwrap_or(0.0))
                .collect()
        };
        let model = Self {
            single_qubit_gate_error: dense(gate),
            two_qubit_gate_error: pairs,
            readout_error: dense(readout),
        };
        model.validate()?;
        Ok(model)
    }
}

/// `(1 − p)·ρ + p·(I/d on targets ⊗ Tr_targets ρ)`.
pub fn depolarize(rho: &DensityMatrix, targets: &[usize], p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "depolarizing probability {p} outside [0, 1]"
        )));
    }
    let n = rho.num_qubits();
    for (i, &t) in targets.iter().enumerate() {
        if t >= n || targets[..i].contains(&t) {
            return Err(Error::domain(format!("invalid depolarizing target {t}")));
        }
    }
    if p == 0.0 || targets.is_empty() {
        return Ok(rho.clone());
    }

    let target_bits: usize = targets.iter().map(|&t| qubit_mask(t, n)).sum();
    // all assignments of the target bits, as register offsets
    let target_configs: Vec<usize> = (0..rho.dim()).filter(|i| i & !target_bits == 0).collect();
    let d_t = target_configs.len() as f64;
    let m = rho.matrix();
    let dim = rho.dim();
    let mixed = DMatrix::from_fn(dim, dim, |i, j| {
        if i & target_bits != j & target_bits {
            return Complex64::new(0.0, 0.0);
        }
        let (ri, rj) = (i & !target_bits, j & !target_bits);
        let reduced: Complex64 = target_configs.iter().map(|t| m[(ri | t, rj | t)]).sum();
        reduced / d_t
    });
    let out = m * Complex64::new(1.0 - p, 0.0) + mixed * Complex64::new(p, 0.0);
    Ok(DensityMatrix::from_matrix_unchecked(n, out))
}

/// Pushes outcome probabilities (indexed by basis state) through symmetric
/// bit-flip readout errors.
pub fn apply_readout(probabilities: &[f64], num_qubits: usize, model: &NoiseModel) -> Vec<f64> {
    let mut p = probabilities.to_vec();
    for q in 0..num_qubits {
        let eps = model.readout(q);
        if eps == 0.0 {
            continue;
        }
        let mask = qubit_mask(q, num_qubits);
        p = (0..p.len())
            .map(|i| (1.0 - eps) * p[i] + eps * p[i ^ mask])
            .collect();
    }
    p
}

fn noisy_gate(
    rho: DensityMatrix,
    gate: &Unitary,
    targets: &[usize],
    model: &NoiseModel,
) -> Result<DensityMatrix> {
    let rho = rho.apply_unitary(gate, targets)?;
    let rate = match targets {
        [q] => model.gate_error(*q),
        [c, t] => model.pair_error(*c, *t)?,
        _ => {
            return Err(Error::domain(
                "noise is only modeled for one- and two-qubit gates",
            ))
        }
    };
    depolarize(&rho, targets, rate)
}

/// Final density matrix of `algorithm` under gate noise (readout not applied).
pub fn simulate_noisy_state(
    algorithm: Algorithm,
    f: BoolFn,
    g: Option<BoolFn>,
    model: &NoiseModel,
) -> Result<DensityMatrix> {
    model.validate()?;
    let circuit = algorithm.circuit();
    let n = circuit.num_qubits();
    let mut rho = DensityMatrix::from_pure(&crate::state::StateVector::basis_state(n, 0)?);
    for step in circuit.steps() {
        match &step.op {
            Operation::Gate { gate, targets, .. } => {
                rho = noisy_gate(rho, gate, targets, model)?;
            }
            Operation::Query {
                slot,
                input,
                output,
            } => {
                let function = match slot {
                    OracleSlot::F => f,
                    OracleSlot::G => {
                        g.ok_or_else(|| Error::domain("circuit queries g but none given"))?
                    }
                };
                for part in function.decomposition() {
                    let (_, gate, targets) = part.realize(*input, *output);
                    rho = noisy_gate(rho, &gate, &targets, model)?;
                }
            }
        }
    }
    Ok(rho)
}

/// Outcome distribution of a noisy run, after readout errors.
pub fn run_noisy(
    algorithm: Algorithm,
    f: BoolFn,
    g: Option<BoolFn>,
    model: &NoiseModel,
) -> Result<Distribution> {
    if algorithm.uses_g() {
        let g = g.ok_or_else(|| Error::domain(format!("{algorithm} needs both f and g")))?;
        crate::oracle::PromisePair::new(f, g)?;
    }
    let rho = simulate_noisy_state(algorithm, f, g, model)?;
    let n = rho.num_qubits();
    let probs = apply_readout(&rho.probabilities(), n, model);
    Ok(probs
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p >= PROB_CUTOFF)
        .map(|(i, p)| (format_bits(i, n), p))
        .collect())
}

/// Counts from a finite number of shots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotResult {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ShotResult {
    pub fn new(counts: BTreeMap<String, u64>) -> Result<Self> {
        let shots = counts.values().sum();
        if shots == 0 {
            return Err(Error::domain("shot result has no counts"));
        }
        Ok(Self { shots, counts })
    }

    pub fn frequencies(&self) -> Distribution {
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.shots as f64))
            .collect()
    }
}

fn check_distribution(dist: &Distribution) -> Result<()> {
    if let Some((k, p)) = dist.iter().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::domain(format!("probability of `{k}` is {p}")));
    }
    let total: f64 = dist.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "distribution sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// Multinomial draw of `shots` outcomes, reproducible for a fixed seed.
pub fn sample_shots(dist: &Distribution, shots: u64, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::domain("shots must be positive"));
    }
    check_distribution(dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    let mut counts = BTreeMap::new();
    let entries: Vec<(&String, f64)> = dist.iter().map(|(k, &p)| (k, p)).collect();
    for (i, (key, p)) in entries.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let count = if i + 1 == entries.len() {
            remaining
        } else {
            // conditional binomial for sequential multinomial sampling
            let q = (p / mass_left).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .map_err(|e| Error::domain(format!("binomial({remaining}, {q}): {e}")))?
                .sample(&mut rng)
        };
        if count > 0 {
            counts.insert((*key).clone(), count);
        }
        remaining -= count;
        mass_left -= p;
    }
    Ok(ShotResult { shots, counts })
}

/// `Σ_k √(p(k)·q(k))` over the union of supports.
pub fn bhattacharyya(p: &Distribution, q: &Distribution) -> f64 {
    let overlap: f64 = p
        .iter()
        .filter_map(|(k, &a)| q.get(k).map(|&b| (a * b).sqrt()))
        .sum();
    overlap.min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub stderr: f64,
    pub p_exp: Distribution,
    pub p_th: Distribution,
}

/// Statistical fidelity with the default bootstrap settings.
pub fn statistical_fidelity(result: &ShotResult, p_th: &Distribution) -> Result<FidelityReport> {
    statistical_fidelity_with(
        result,
        p_th,
        DEFAULT_BOOTSTRAP_RESAMPLES,
        DEFAULT_BOOTSTRAP_SEED,
    )
}

/// Fidelity of the observed frequencies against `p_th`, with a standard
/// error from a Poisson bootstrap: each count is redrawn as `Poisson(count)`,
/// the frequencies renormalized and the fidelity recomputed.
pub fn statistical_fidelity_with(
    result: &ShotResult,
    p_th: &Distribution,
    resamples: usize,
    seed: u64,
) -> Result<FidelityReport> {
    if result.shots == 0 || result.counts.values().sum::<u64>() != result.shots {
        return Err(Error::domain(
            "shot counts must be positive and sum to `shots`",
        ));
    }
    let p_exp = result.frequencies();
    let fidelity = bhattacharyya(&p_exp, p_th);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(resamples);
    while values.len() < resamples {
        let redrawn: Vec<(&String, f64)> = result
            .counts
            .iter()
            .map(|(k, &c)| (k, poisson(&mut rng, c as f64)))
            .collect();
        let total: f64 = redrawn.iter().map(|(_, c)| c).sum();
        if total == 0.0 {
            continue;
        }
        let resampled: Distribution = redrawn
            .into_iter()
            .map(|(k, c)| (k.clone(), c / total))
            .collect();
        values.push(bhattacharyya(&resampled, p_th));
    }
    Ok(FidelityReport {
        fidelity,
        stderr: std_dev(&values),
        p_exp,
        p_th: p_th.clone(),
    })
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng)
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Marginal probability that `qubit` reads 1.
pub fn marginal_one(dist: &Distribution, qubit: usize) -> f64 {
    dist.iter()
        .filter(|(k, _)| {
            crate::state::parse_bits(k)
                .map(|i| bit_of(i, qubit, k.len()) == 1)
                .unwrap_or(false)
        })
        .map(|(_, p)| p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;
    use approx::assert_abs_diff_eq;

    fn dist(entries: &[(&str, f64)]) -> Distribution {
        entries.iter().map(|(k, p)| (k.to_string(), *p)).collect()
    }

    fn counts(entries: &[(&str, u64)]) -> ShotResult {
        ShotResult::new(entries.iter().map(|(k, c)| (k.to_string(), *c)).collect()).unwrap()
    }

    #[test]
    fn depolarize_examples() {
        let zero = DensityMatrix::from_pure(&StateVector::basis_state(1, 0).unwrap());
        assert_eq!(depolarize(&zero, &[0], 0.0).unwrap(), zero);
        let full = depolarize(&zero, &[0], 1.0).unwrap();
        assert!(full.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-15);
        let half = depolarize(&zero, &[0], 0.5).unwrap();
        assert_eq!(half.probabilities(), vec![0.75, 0.25]);
        assert!(matches!(
            depolarize(&zero, &[0], 1.5),
            Err(Error::Domain(_))
        ));
        assert!(depolarize(&zero, &[0], -0.1).is_err());
    }

    #[test]
    fn depolarize_keeps_untouched_qubits() {
        // |10⟩, fully depolarize qubit 1: qubit 0 stays |1⟩
        let rho = DensityMatrix::from_pure(&StateVector::basis_state(2, 0b10).unwrap());
        let out = depolarize(&rho, &[1], 1.0).unwrap();
        assert_eq!(out.probabilities(), vec![0.0, 0.0, 0.5, 0.5]);
        assert!(
            out.partial_trace(&[0])
                .unwrap()
                .max_abs_diff(&rho.partial_trace(&[0]).unwrap())
                < 1e-15
        );
    }

    #[test]
    fn noiseless_model_reduces_to_ideal() {
        let d = run_noisy(
            Algorithm::EntangledPair,
            BoolFn::B1,
            Some(BoolFn::B1),
            &NoiseModel::noiseless(3),
        )
        .unwrap();
        assert_eq!(d.len(), 2);
        assert_abs_diff_eq!(d["100"], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(d["111"], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn table2_case_one_sanity_band() {
        let d = run_noisy(
            Algorithm::EntangledPair,
            BoolFn::B1,
            Some(BoolFn::B1),
            &NoiseModel::table2(),
        )
        .unwrap();
        let mut ranked: Vec<(&String, &f64)> = d.iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(a.1));
        let top: Vec<&str> = ranked[..2].iter().map(|(k, _)| k.as_str()).collect();
        assert!(top.contains(&"100") && top.contains(&"111"), "{ranked:?}");
        for (_, &p) in &ranked[..2] {
            assert!(p > 0.35 && p < 0.5, "{p}");
        }
        assert_abs_diff_eq!(d.values().sum::<f64>(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn total_readout_noise_is_uniform() {
        let model = NoiseModel::readout_only(vec![0.5; 3]);
        let d = run_noisy(
            Algorithm::EntangledPair,
            BoolFn::B1,
            Some(BoolFn::B1),
            &model,
        )
        .unwrap();
        assert_eq!(d.len(), 8);
        for p in d.values() {
            assert_abs_diff_eq!(*p, 0.125, epsilon = 1e-10);
        }
    }

    #[test]
    fn run_noisy_checks_promise() {
        assert!(run_noisy(
            Algorithm::ProductPair,
            BoolFn::B1,
            Some(BoolFn::C2),
            &NoiseModel::table2()
        )
        .is_err());
    }

    #[test]
    fn sampling_examples() {
        let r = sample_shots(&dist(&[("111", 1.0)]), 100, 3).unwrap();
        assert_eq!(r.counts, BTreeMap::from([("111".to_string(), 100)]));

        let d = dist(&[("100", 0.5), ("111", 0.5)]);
        let r = sample_shots(&d, 8192, 42).unwrap();
        let sigma = (8192.0f64 * 0.25).sqrt();
        for k in ["100", "111"] {
            assert!((r.counts[k] as f64 - 4096.0).abs() < 6.0 * sigma);
        }
        assert_eq!(r.counts.values().sum::<u64>(), 8192);
        assert_eq!(sample_shots(&d, 8192, 42).unwrap(), r);
    }

    #[test]
    fn sampling_rejects_bad_input() {
        assert!(sample_shots(&dist(&[("0", 0.5)]), 10, 0).is_err());
        assert!(sample_shots(&dist(&[("0", 1.0)]), 0, 0).is_err());
        assert!(sample_shots(&dist(&[("0", 1.5), ("1", -0.5)]), 10, 0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let r = statistical_fidelity(
            &counts(&[("100", 50), ("111", 50)]),
            &dist(&[("100", 0.5), ("111", 0.5)]),
        )
        .unwrap();
        assert_abs_diff_eq!(r.fidelity, 1.0, epsilon = 1e-12);
        let r = statistical_fidelity(&counts(&[("000", 100)]), &dist(&[("111", 1.0)])).unwrap();
        assert_eq!(r.fidelity, 0.0);
        let r = statistical_fidelity(&counts(&[("000", 50), ("111", 50)]), &dist(&[("000", 1.0)]))
            .unwrap();
        assert_abs_diff_eq!(r.fidelity, 0.5f64.sqrt(), epsilon = 1e-12);
        assert!(r.stderr > 0.0);
    }

    #[test]
    fn config_round_trip_is_exact() {
        let m = NoiseModel::table2();
        let text = m.to_config();
        assert!(text.contains("cnot_error.1.2 = 0.0317"));
        assert_eq!(NoiseModel::from_config(&text).unwrap(), m);
        assert_eq!(NoiseModel::from_config(&text).unwrap().to_config(), text);
    }

    #[test]
    fn config_errors() {
        assert!(NoiseModel::from_config("gate_error.1 = 2.0").is_err());
        assert!(NoiseModel::from_config("gate_error.0 = 0.1").is_err());
        assert!(NoiseModel::from_config("bogus = 0.1").is_err());
        assert!(NoiseModel::from_config("gate_error.1 = x").is_err());
        assert!(NoiseModel::from_config("gate_error.1 = 0.1\ngate_error.1 = 0.2").is_err());
        let m = NoiseModel::from_config("# comment\n\nreadout_error.2 = 0.5 # trailing\n").unwrap();
        assert_eq!(m.readout_error, vec![0.0, 0.5]);
    }

    #[test]
    fn pair_lookup_falls_back_to_reverse() {
        let m = NoiseModel::table2();
        assert_eq!(m.pair_error(0, 1).unwrap(), 3.17e-2);
        assert_eq!(m.pair_error(2, 1).unwrap(), 2.87e-2);
        assert!(NoiseModel::readout_only(vec![0.0])
            .pair_error(0, 1)
            .is_err());
    }

    #[test]
    fn marginals() {
        let d = dist(&[("100", 0.25), ("011", 0.75)]);
        assert_abs_diff_eq!(marginal_one(&d, 0), 0.25);
        assert_abs_diff_eq!(marginal_one(&d, 2), 0.75);
    }
}
