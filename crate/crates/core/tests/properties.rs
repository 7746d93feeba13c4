use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qpair_core::entanglement::{cnot_product_condition, schmidt_analyze, ProductStateParams};
use qpair_core::noise::{bhattacharyya, depolarize, run_noisy, sample_shots};
use qpair_core::{
    all_promise_pairs, Algorithm, DecodeTable, DecodedAnswer, DensityMatrix, Distribution,
    NoiseModel, StateVector, Unitary,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    complex_vec(1 << n)
        .prop_filter("non-zero", |v| {
            v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            StateVector::from_amplitudes(v.into_iter().map(|c| c / norm).collect()).unwrap()
        })
}

/// Q factor of a random complex matrix.
fn unitary(k: usize) -> impl Strategy<Value = Unitary> {
    let d = 1 << k;
    complex_vec(d * d).prop_map(move |v| {
        let m = DMatrix::from_vec(d, d, v);
        Unitary::new(m.qr().q()).unwrap()
    })
}

fn distinct_targets(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(move |v| v[..k].to_vec())
}

fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// The full `2ⁿ × 2ⁿ` matrix of `gate` on `targets`, built entry by entry.
fn full_matrix(gate: &Unitary, targets: &[usize], n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let sub = |i: usize| targets.iter().fold(0, |acc, &t| (acc << 1) | bit(i, t, n));
    let rest = |i: usize| {
        (0..n)
            .filter(|q| !targets.contains(q))
            .fold(0, |acc, q| (acc << 1) | bit(i, q, n))
    };
    DMatrix::from_fn(dim, dim, |i, j| {
        if rest(i) == rest(j) {
            gate.matrix()[(sub(i), sub(j))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    let d = 1 << n;
    complex_vec(d * d).prop_map(move |v| {
        let a = DMatrix::from_vec(d, d, v);
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityMatrix::new(m / tr).unwrap()
    })
}

fn distribution(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.0..1.0f64, 1 << n)
        .prop_filter("non-zero", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let total: f64 = v.iter().sum();
            v.iter()
                .enumerate()
                .map(|(i, p)| (format!("{i:0width$b}", width = n), p / total))
                .collect()
        })
}

proptest! {
    #[test]
    fn gates_preserve_norm(psi in state(3), u in unitary(2), targets in distinct_targets(3, 2)) {
        let out = psi.apply_gate(&u, &targets).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn apply_gate_matches_full_matrix(psi in state(3), u in unitary(2), targets in distinct_targets(3, 2)) {
        let out = psi.apply_gate(&u, &targets).unwrap();
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let expected = full_matrix(&u, &targets, 3) * v;
        let expected = StateVector::from_amplitudes(expected.iter().copied().collect()).unwrap();
        prop_assert!(max_diff(&out, &expected) < TOL);
    }

    #[test]
    fn disjoint_gates_commute(psi in state(3), a in unitary(1), b in unitary(2), targets in distinct_targets(3, 3)) {
        let (ta, tb) = (&targets[..1], &targets[1..]);
        let ab = psi.apply_gate(&a, ta).unwrap().apply_gate(&b, tb).unwrap();
        let ba = psi.apply_gate(&b, tb).unwrap().apply_gate(&a, ta).unwrap();
        prop_assert!(max_diff(&ab, &ba) < TOL);
    }

    #[test]
    fn inverse_undoes_gate(psi in state(3), u in unitary(2), targets in distinct_targets(3, 2)) {
        let back = psi.apply_gate(&u, &targets).unwrap().apply_gate(&u.adjoint(), &targets).unwrap();
        prop_assert!(max_diff(&back, &psi) < TOL);
    }

    #[test]
    fn product_states_have_pure_marginals(a in state(1), b in state(2)) {
        let psi = a.tensor(&b).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        prop_assert!((rho.partial_trace(&[0]).unwrap().purity() - 1.0).abs() < TOL);
        prop_assert!((rho.partial_trace(&[1, 2]).unwrap().purity() - 1.0).abs() < TOL);
        prop_assert!(schmidt_analyze(&psi, &[0]).unwrap().is_product);
    }

    #[test]
    fn schmidt_coefficients_are_local_invariants(psi in state(3), a in unitary(1), b in unitary(2)) {
        let before = schmidt_analyze(&psi, &[0]).unwrap().schmidt_coefficients;
        let moved = psi.apply_gate(&a, &[0]).unwrap().apply_gate(&b, &[1, 2]).unwrap();
        let after = schmidt_analyze(&moved, &[0]).unwrap().schmidt_coefficients;
        prop_assert_eq!(before.len(), after.len());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn bhattacharyya_symmetric_and_bounded(p in distribution(3), q in distribution(3)) {
        let pq = bhattacharyya(&p, &q);
        prop_assert!((pq - bhattacharyya(&q, &p)).abs() < TOL);
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!((bhattacharyya(&p, &p) - 1.0).abs() < TOL);
    }

    #[test]
    fn sampling_is_reproducible(p in distribution(3), shots in 1u64..5000, seed in any::<u64>()) {
        let a = sample_shots(&p, shots, seed).unwrap();
        let b = sample_shots(&p, shots, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.counts.values().sum::<u64>(), shots);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn depolarizing_keeps_states_physical(
        rho in density(3),
        targets in (1usize..=3).prop_flat_map(|k| distinct_targets(3, k)),
        p in 0.0..=1.0f64,
    ) {
        let out = depolarize(&rho, &targets, p).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < TOL);
        prop_assert!(out.trace().im.abs() < TOL);
        prop_assert!(out.min_eigenvalue() > -1e-9);
        prop_assert!(out.validate().is_ok());
    }
}

#[test]
fn cnot_criterion_agrees_with_schmidt_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let params = ProductStateParams::random(&mut rng);
        let check = cnot_product_condition(&params);
        assert!(check.agree(), "{params:?}: {check:?}");
    }
}

#[test]
fn fidelity_degrades_monotonically() {
    let scales = [0.0, 0.5, 1.0, 2.0];
    let base = NoiseModel::table2();
    for algorithm in [Algorithm::EntangledPair, Algorithm::ProductPair] {
        for pair in all_promise_pairs() {
            let ideal = qpair_core::algorithm::run(algorithm, pair.f(), Some(pair.g()))
                .unwrap()
                .final_distribution;
            let fidelities: Vec<f64> = scales
                .iter()
                .map(|&s| {
                    let noisy =
                        run_noisy(algorithm, pair.f(), Some(pair.g()), &base.scaled(s)).unwrap();
                    bhattacharyya(&noisy, &ideal)
                })
                .collect();
            assert!(
                (fidelities[0] - 1.0).abs() < TOL,
                "{algorithm} {pair}: {fidelities:?}"
            );
            assert!(
                fidelities.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                "{algorithm} {pair}: {fidelities:?}"
            );
        }
    }
}

#[test]
fn argmax_decoding_survives_table2_noise() {
    let model = NoiseModel::table2();
    for algorithm in [Algorithm::EntangledPair, Algorithm::ProductPair] {
        for pair in all_promise_pairs() {
            let noisy = run_noisy(algorithm, pair.f(), Some(pair.g()), &model).unwrap();
            let decoded = DecodeTable::STANDARD
                .decode_distribution(algorithm, &noisy)
                .unwrap();
            assert_eq!(
                decoded,
                DecodedAnswer::truth(pair.f(), Some(pair.g())),
                "{algorithm} {pair}"
            );
        }
    }
}

proptest! {
    #[test]
    fn noise_config_round_trips(rates in prop::collection::vec(0.0..0.5f64, 9)) {
        let mut model = NoiseModel::table2();
        model.single_qubit_gate_error.copy_from_slice(&rates[..3]);
        model.readout_error.copy_from_slice(&rates[3..6]);
        for (pair, &r) in model.two_qubit_gate_error.iter_mut().zip(&rates[6..]) {
            pair.error = r;
        }
        prop_assert_eq!(NoiseModel::from_config(&model.to_config()).unwrap(), model);
    }
}
