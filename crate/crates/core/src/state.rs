//! Dense few-qubit states and operators.
//!
//! Ordering is big-endian throughout: qubit 0 is the most significant bit of
//! a basis index, and the first target handed to [`StateVector::apply_gate`]
//! lines up with the most significant axis of the gate matrix.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Distribution;

/// Tolerance for identities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for checks that go through an eigen- or singular-value solver.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Probabilities below this are dropped from reported distributions.
pub const PROB_CUTOFF: f64 = 1e-12;
pub const MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn qubit_mask(qubit: usize, num_qubits: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

#[inline]
pub(crate) fn bit_of(index: usize, qubit: usize, num_qubits: usize) -> usize {
    (index >> (num_qubits - 1 - qubit)) & 1
}

/// Renders a basis index as a bitstring, qubit 0 first.
pub fn format_bits(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .map(|q| {
            if bit_of(index, q, num_qubits) == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parses a bitstring (qubit 0 first) into a basis index.
pub fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > MAX_QUBITS {
        return Err(Error::parse(bits, "expected 1 to 12 binary digits"));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::parse(bits, format!("`{c}` is not a binary digit"))),
    })
}

fn check_num_qubits(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::domain(format!(
            "number of qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

fn num_qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::domain(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    check_num_qubits(n)?;
    Ok(n)
}

fn check_targets(targets: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::domain(format!(
                "qubit {t} out of range for a {num_qubits}-qubit register"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::domain(format!("qubit {t} listed twice")));
        }
    }
    Ok(())
}

/// Offsets of the `2^k` sub-basis states spanned by `targets`, in gate order.
fn target_offsets(targets: &[usize], num_qubits: usize) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| (local >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &q)| qubit_mask(q, num_qubits))
                .sum()
        })
        .collect()
}

/// A normalized pure state of `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        check_num_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::domain(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = num_qubits_for_dim(amplitudes.len())?;
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::domain(format!(
                "amplitudes are not normalized (sum of squares = {norm})"
            )));
        }
        Ok(state)
    }

    /// Tensor product of single-qubit states `[a0, a1]`, qubit 0 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self> {
        check_num_qubits(qubits.len())?;
        let mut amplitudes = vec![ONE];
        for q in qubits {
            amplitudes = amplitudes
                .iter()
                .flat_map(|&a| [a * q[0], a * q[1]])
                .collect();
        }
        Self::from_amplitudes(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        check_num_qubits(self.num_qubits + other.num_qubits)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        Ok(Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        })
    }

    /// Applies `gate` to the listed qubits and the identity elsewhere.
    pub fn apply_gate(&self, gate: &Unitary, targets: &[usize]) -> Result<Self> {
        if gate.dim() != 1usize << targets.len() {
            return Err(Error::domain(format!(
                "gate of dimension {} cannot act on {} target(s)",
                gate.dim(),
                targets.len()
            )));
        }
        check_targets(targets, self.num_qubits)?;

        let offsets = target_offsets(targets, self.num_qubits);
        let target_bits: usize = offsets.iter().fold(0, |acc, o| acc | o);
        let m = gate.matrix();
        let mut out = vec![ZERO; self.dim()];
        let mut local = vec![ZERO; offsets.len()];
        for base in (0..self.dim()).filter(|i| i & target_bits == 0) {
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                out[base | off] = local
                    .iter()
                    .enumerate()
                    .map(|(col, a)| m[(row, col)] * a)
                    .sum();
            }
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: out,
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::domain(
                "inner product of states with different sizes",
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the states agree up to a global phase.
    pub fn equal_up_to_phase(&self, other: &StateVector) -> bool {
        self.inner(other)
            .map(|z| (z.norm() - 1.0).abs() <= EXACT_TOL)
            .unwrap_or(false)
    }

    /// Born-rule probabilities keyed by basis index; negligible entries omitted.
    pub fn measurement_distribution(&self) -> BTreeMap<usize, f64> {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .filter(|&(_, p)| p >= PROB_CUTOFF)
            .collect()
    }

    /// Same as [`measurement_distribution`](Self::measurement_distribution) but keyed by bitstring.
    pub fn bitstring_distribution(&self) -> Distribution {
        self.measurement_distribution()
            .into_iter()
            .map(|(i, p)| (format_bits(i, self.num_qubits), p))
            .collect()
    }

    /// Probability of reading `qubit` as 0 and as 1.
    pub fn marginal(&self, qubit: usize) -> Result<[f64; 2]> {
        check_targets(&[qubit], self.num_qubits)?;
        let mut out = [0.0; 2];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[bit_of(i, qubit, self.num_qubits)] += a.norm_sqr();
        }
        Ok(out)
    }
}

/// A unitary on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    matrix: DMatrix<Complex64>,
}

impl Unitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::domain("gate matrix is not square"));
        }
        num_qubits_for_dim(matrix.nrows())?;
        let dev = unitarity_defect(&matrix);
        if dev > EXACT_TOL {
            return Err(Error::domain(format!(
                "matrix is not unitary (max |U U† - I| = {dev:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Builds a unitary from row-major real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::domain("entry count does not match dimension"));
        }
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(2, &[s, s, s, -s]).expect("hadamard is unitary")
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("X is unitary")
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("Z is unitary")
    }

    /// CNOT with the first target as control.
    pub fn cnot() -> Self {
        Self::pauli_x().controlled().expect("X is single-qubit")
    }

    /// Block-diagonal `diag(I, self)`: acts with `self` when the control (first target) is 1.
    pub fn controlled(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::domain(format!(
                "controlled() needs a single-qubit gate, got dimension {}",
                self.dim()
            )));
        }
        let mut m = DMatrix::identity(4, 4);
        m.view_mut((2, 2), (2, 2)).copy_from(&self.matrix);
        Ok(Self { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Unitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::domain("cannot compose gates of different dimension"));
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Unitary) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// The full `2^n × 2^n` operator of this gate acting on `targets` of an `n`-qubit register.
    pub fn embed(&self, num_qubits: usize, targets: &[usize]) -> Result<DMatrix<Complex64>> {
        check_num_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        let mut full = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let column = StateVector {
                num_qubits,
                amplitudes: (0..dim)
                    .map(|r| if r == col { ONE } else { ZERO })
                    .collect(),
            }
            .apply_gate(self, targets)?;
            for (row, a) in column.amplitudes.into_iter().enumerate() {
                full[(row, col)] = a;
            }
        }
        Ok(full)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m * m.adjoint()), &DMatrix::identity(n, n))
}

/// A density matrix over `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::domain("density matrix is not square"));
        }
        let num_qubits = num_qubits_for_dim(matrix.nrows())?;
        let rho = Self { num_qubits, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(num_qubits: usize, matrix: DMatrix<Complex64>) -> Self {
        Self { num_qubits, matrix }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let dim = state.dim();
        let amps = &state.amplitudes;
        Self {
            num_qubits: state.num_qubits,
            matrix: DMatrix::from_fn(dim, dim, |r, c| amps[r] * amps[c].conj()),
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_num_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            num_qubits,
            matrix: DMatrix::identity(dim, dim) * scale,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = max_abs_diff(&self.matrix, &self.matrix.adjoint());
        if herm > EXACT_TOL {
            return Err(Error::domain(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > EXACT_TOL {
            return Err(Error::domain(format!(
                "density matrix trace is {tr}, not 1"
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -SPECTRAL_TOL {
            return Err(Error::domain(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    /// `U ρ U†` with `U` acting on `targets`.
    pub fn apply_unitary(&self, gate: &Unitary, targets: &[usize]) -> Result<Self> {
        let full = gate.embed(self.num_qubits, targets)?;
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: &full * &self.matrix * full.adjoint(),
        })
    }

    /// Reduced state on `keep`; the reduced register lists qubits in `keep` order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::domain("partial trace must keep at least one qubit"));
        }
        check_targets(keep, self.num_qubits)?;
        let n = self.num_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let keep_offsets = target_offsets(keep, n);
        let traced_offsets = target_offsets(&traced, n);
        let k = keep_offsets.len();
        let mut out = DMatrix::zeros(k, k);
        for (a, ka) in keep_offsets.iter().enumerate() {
            for (b, kb) in keep_offsets.iter().enumerate() {
                out[(a, b)] = traced_offsets
                    .iter()
                    .map(|t| self.matrix[(ka | t, kb | t)])
                    .sum();
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            matrix: out,
        })
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Diagonal of `ρ`, i.e. computational-basis outcome probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn amps(state: &StateVector) -> Vec<Complex64> {
        state.amplitudes().to_vec()
    }

    fn bell_minus() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_amplitudes(vec![c(s), c(0.0), c(0.0), c(-s)]).unwrap()
    }

    #[test]
    fn basis_states() {
        assert_eq!(
            amps(&StateVector::basis_state(1, 0).unwrap()),
            vec![c(1.0), c(0.0)]
        );
        let s = StateVector::basis_state(2, 3).unwrap();
        assert_eq!(amps(&s), vec![c(0.0), c(0.0), c(0.0), c(1.0)]);
        let s = StateVector::basis_state(3, 4).unwrap();
        assert_eq!(s.bitstring_distribution().keys().next().unwrap(), "100");
        assert_eq!(s.marginal(0).unwrap(), [0.0, 1.0]);
    }

    #[test]
    fn basis_state_out_of_range() {
        assert!(matches!(
            StateVector::basis_state(2, 4),
            Err(Error::Domain(_))
        ));
        assert!(StateVector::basis_state(0, 0).is_err());
    }

    #[test]
    fn hadamard_on_zero() {
        let s = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_gate(&Unitary::hadamard(), &[0])
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, h, epsilon = 1e-15);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = StateVector::basis_state(2, 0b10)
            .unwrap()
            .apply_gate(&Unitary::cnot(), &[0, 1])
            .unwrap();
        assert_eq!(s.measurement_distribution(), BTreeMap::from([(3, 1.0)]));
        // reversed target order makes qubit 1 the control
        let s = StateVector::basis_state(2, 0b10)
            .unwrap()
            .apply_gate(&Unitary::cnot(), &[1, 0])
            .unwrap();
        assert_eq!(s.measurement_distribution(), BTreeMap::from([(2, 1.0)]));
    }

    #[test]
    fn x_on_last_qubit() {
        let s = StateVector::basis_state(3, 0)
            .unwrap()
            .apply_gate(&Unitary::pauli_x(), &[2])
            .unwrap();
        assert_eq!(
            s.bitstring_distribution(),
            Distribution::from([("001".into(), 1.0)])
        );
    }

    #[test]
    fn apply_gate_rejects_bad_targets() {
        let s = StateVector::basis_state(2, 0).unwrap();
        assert!(s.apply_gate(&Unitary::cnot(), &[0]).is_err());
        assert!(s.apply_gate(&Unitary::cnot(), &[1, 1]).is_err());
        assert!(s.apply_gate(&Unitary::hadamard(), &[2]).is_err());
    }

    #[test]
    fn controlled_gates() {
        let cx = Unitary::pauli_x().controlled().unwrap();
        let expected = Unitary::from_real(
            4,
            &[
                1., 0., 0., 0., //
                0., 1., 0., 0., //
                0., 0., 0., 1., //
                0., 0., 1., 0.,
            ],
        )
        .unwrap();
        assert_eq!(cx.max_abs_diff(&expected), 0.0);
        assert_eq!(
            Unitary::identity(1)
                .controlled()
                .unwrap()
                .max_abs_diff(&Unitary::identity(2)),
            0.0
        );
        assert!(Unitary::cnot().controlled().is_err());
    }

    #[test]
    fn controlled_z_kicks_back_phase() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (|0⟩+|1⟩)|1⟩/√2
        let input = StateVector::from_amplitudes(vec![c(0.0), c(s), c(0.0), c(s)]).unwrap();
        let out = input
            .apply_gate(&Unitary::pauli_z().controlled().unwrap(), &[0, 1])
            .unwrap();
        assert_eq!(amps(&out), vec![c(0.0), c(s), c(0.0), c(-s)]);
    }

    #[test]
    fn non_unitary_rejected() {
        assert!(matches!(
            Unitary::from_real(2, &[1.0, 1.0, 0.0, 1.0]),
            Err(Error::Domain(_))
        ));
        assert!(Unitary::from_real(3, &[0.0; 9]).is_err());
    }

    #[test]
    fn distributions() {
        let plus = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_gate(&Unitary::hadamard(), &[0])
            .unwrap();
        let d = plus.measurement_distribution();
        assert_abs_diff_eq!(d[&0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d[&1], 0.5, epsilon = 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![c(0.0); 8];
        a[4] = c(s);
        a[7] = c(s);
        let d = StateVector::from_amplitudes(a)
            .unwrap()
            .bitstring_distribution();
        assert_eq!(d.len(), 2);
        assert_abs_diff_eq!(d["100"], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d["111"], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn partial_traces() {
        let rho = DensityMatrix::from_pure(&StateVector::basis_state(2, 0b01).unwrap());
        let reduced = rho.partial_trace(&[0]).unwrap();
        let zero = DensityMatrix::from_pure(&StateVector::basis_state(1, 0).unwrap());
        assert!(reduced.max_abs_diff(&zero) < 1e-15);

        let bell = DensityMatrix::from_pure(&bell_minus());
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(bell.partial_trace(&[0]).unwrap().max_abs_diff(&mixed) < 1e-15);
        assert!(bell.partial_trace(&[1]).unwrap().max_abs_diff(&mixed) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus_zero = StateVector::product(&[[c(s), c(s)], [c(1.0), c(0.0)]]).unwrap();
        let reduced = DensityMatrix::from_pure(&plus_zero)
            .partial_trace(&[0])
            .unwrap();
        let plus =
            DensityMatrix::from_pure(&StateVector::from_amplitudes(vec![c(s), c(s)]).unwrap());
        assert!(reduced.max_abs_diff(&plus) < 1e-15);

        assert!(matches!(bell.partial_trace(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn partial_trace_follows_keep_order() {
        let rho = DensityMatrix::from_pure(&StateVector::basis_state(3, 0b100).unwrap());
        let kept = rho.partial_trace(&[2, 0]).unwrap();
        assert_abs_diff_eq!(kept.probabilities()[0b01], 1.0);
    }

    #[test]
    fn purities() {
        assert_abs_diff_eq!(
            DensityMatrix::from_pure(&bell_minus()).purity(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(DensityMatrix::maximally_mixed(1).unwrap().purity(), 0.5);
        assert_abs_diff_eq!(DensityMatrix::maximally_mixed(2).unwrap().purity(), 0.25);
    }

    #[test]
    fn density_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.4)]);
        assert!(DensityMatrix::new(bad).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(neg).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)]);
        assert!(DensityMatrix::new(ok).is_ok());
    }

    #[test]
    fn density_evolution_matches_pure_evolution() {
        let psi = StateVector::basis_state(2, 0)
            .unwrap()
            .apply_gate(&Unitary::hadamard(), &[0])
            .unwrap();
        let via_rho = DensityMatrix::from_pure(&psi)
            .apply_unitary(&Unitary::cnot(), &[0, 1])
            .unwrap();
        let via_psi = DensityMatrix::from_pure(&psi.apply_gate(&Unitary::cnot(), &[0, 1]).unwrap());
        assert!(via_rho.max_abs_diff(&via_psi) < 1e-15);
    }

    #[test]
    fn bit_helpers() {
        assert_eq!(format_bits(4, 3), "100");
        assert_eq!(parse_bits("011").unwrap(), 3);
        assert!(parse_bits("012").is_err());
        assert!(parse_bits("").is_err());
    }
}
