//! Simulated distributions checked against formulas worked out by hand.

use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use qpair_core::noise::run_noisy;
use qpair_core::{
    all_promise_pairs, run_deutsch, run_entangled_pair, run_product_pair, Algorithm, BoolFn,
    Distribution, NoiseModel,
};

fn bits(values: &[u8]) -> String {
    values
        .iter()
        .map(|b| if *b == 1 { '1' } else { '0' })
        .collect()
}

fn assert_same(actual: &Distribution, expected: &BTreeMap<String, f64>) {
    let keys: std::collections::BTreeSet<&String> = actual.keys().chain(expected.keys()).collect();
    for k in keys {
        let a = actual.get(k).copied().unwrap_or(0.0);
        let e = expected.get(k).copied().unwrap_or(0.0);
        assert_abs_diff_eq!(a, e, epsilon = 1e-10);
    }
}

/// After the two queries the register is `½ Σₓ |x⟩(|f(x) g(x)⟩ − |¬f(x) ¬g(x)⟩)`;
/// the final Hadamard on A gives amplitude
/// `(2√2)⁻¹ Σₓ (−1)^{A·x} ([b₁=f(x), b₂=g(x)] − [b₁=¬f(x), b₂=¬g(x)])`.
fn entangled_oracle(f: BoolFn, g: BoolFn) -> BTreeMap<String, f64> {
    let mut dist = BTreeMap::new();
    for a in 0..2u8 {
        for b1 in 0..2u8 {
            for b2 in 0..2u8 {
                let mut amp = 0.0;
                for x in 0..2u8 {
                    let sign = if a & x == 1 { -1.0 } else { 1.0 };
                    let (fx, gx) = (f.eval(x), g.eval(x));
                    let plus = f64::from(u8::from(b1 == fx && b2 == gx));
                    let minus = f64::from(u8::from(b1 != fx && b2 != gx));
                    amp += sign * (plus - minus);
                }
                let p = (amp / (2.0 * 2f64.sqrt())).powi(2);
                if p > 1e-12 {
                    dist.insert(bits(&[a, b1, b2]), p);
                }
            }
        }
    }
    dist
}

/// Phase kickback leaves `|b⟩|0⟩|0⟩` with `b = f(0)⊕f(1)`; the second round
/// writes `f(b)` and `g(b)` into the ancillas.
fn product_oracle(f: BoolFn, g: BoolFn) -> BTreeMap<String, f64> {
    let b = f.eval(0) ^ f.eval(1);
    BTreeMap::from([(bits(&[b, f.eval(b), g.eval(b)]), 1.0)])
}

/// Qubit 0 reads the parity; the `|−⟩` ancilla is uniform.
fn deutsch_oracle(f: BoolFn) -> BTreeMap<String, f64> {
    let b = f.eval(0) ^ f.eval(1);
    BTreeMap::from([(bits(&[b, 0]), 0.5), (bits(&[b, 1]), 0.5)])
}

#[test]
fn entangled_matches_closed_form() {
    for pair in all_promise_pairs() {
        let record = run_entangled_pair(&pair).unwrap();
        assert_same(
            &record.final_distribution,
            &entangled_oracle(pair.f(), pair.g()),
        );
    }
}

#[test]
fn entangled_support_sits_on_the_answer() {
    for pair in all_promise_pairs() {
        let dist = entangled_oracle(pair.f(), pair.g());
        let balanced = pair.f().eval(0) ^ pair.f().eval(1);
        let different = pair.f().eval(0) ^ pair.g().eval(0);
        for key in dist.keys() {
            let b: Vec<u8> = key.bytes().map(|c| c - b'0').collect();
            assert_eq!(b[0], balanced, "{pair}: {key}");
            assert_eq!(b[1] ^ b[2], different, "{pair}: {key}");
        }
    }
}

#[test]
fn product_matches_closed_form() {
    for pair in all_promise_pairs() {
        let record = run_product_pair(&pair).unwrap();
        assert_same(
            &record.final_distribution,
            &product_oracle(pair.f(), pair.g()),
        );
    }
}

#[test]
fn deutsch_matches_closed_form() {
    for f in BoolFn::NAMED {
        let record = run_deutsch(f).unwrap();
        assert_same(&record.final_distribution, &deutsch_oracle(f));
    }
}

/// A deterministic outcome seen through independent bit flips.
#[test]
fn readout_noise_on_deterministic_output() {
    let eps = [0.03, 0.11, 0.2];
    let model = NoiseModel::readout_only(eps.to_vec());
    for pair in all_promise_pairs() {
        let ideal = product_oracle(pair.f(), pair.g());
        let target: Vec<u8> = ideal
            .keys()
            .next()
            .unwrap()
            .bytes()
            .map(|c| c - b'0')
            .collect();
        let mut expected = BTreeMap::new();
        for outcome in 0..8u8 {
            let seen = [outcome >> 2 & 1, outcome >> 1 & 1, outcome & 1];
            let p: f64 = (0..3)
                .map(|q| {
                    if seen[q] == target[q] {
                        1.0 - eps[q]
                    } else {
                        eps[q]
                    }
                })
                .product();
            expected.insert(bits(&seen), p);
        }
        let noisy = run_noisy(Algorithm::ProductPair, pair.f(), Some(pair.g()), &model).unwrap();
        assert_same(&noisy, &expected);
    }
}

/// With C1 the oracle is empty, so qubit 0 sees H, noise, H, noise: its
/// Bloch vector shrinks by `(1 − p)` twice.
#[test]
fn single_gate_depolarizing_on_deutsch() {
    let p = 0.3;
    let mut model = NoiseModel::noiseless(2);
    model.single_qubit_gate_error[0] = p;
    let f = BoolFn::C1;
    let noisy = run_noisy(Algorithm::Deutsch, f, None, &model).unwrap();
    let z = (1.0 - p) * (1.0 - p);
    let p0 = (1.0 + z) / 2.0;
    let expected = BTreeMap::from([
        ("00".to_owned(), p0 / 2.0),
        ("01".to_owned(), p0 / 2.0),
        ("10".to_owned(), (1.0 - p0) / 2.0),
        ("11".to_owned(), (1.0 - p0) / 2.0),
    ]);
    assert_same(&noisy, &expected);
}
