//! One-bit Boolean functions and their XOR oracles `|x⟩|y⟩ → |x⟩|y ⊕ f(x)⟩`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::Unitary;

/// A function `{0,1} → {0,1}` given by its truth table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoolFn {
    f0: u8,
    f1: u8,
}

/// One gate of an oracle's circuit realization on (input, output) wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleGate {
    /// CNOT controlled on the input wire, targeting the output wire.
    Cnot,
    /// Unconditional X on the output wire.
    FlipOutput,
}

impl BoolFn {
    /// Balanced, `B1(0)=0, B1(1)=1`.
    pub const B1: BoolFn = BoolFn { f0: 0, f1: 1 };
    /// Balanced, `B2(0)=1, B2(1)=0`.
    pub const B2: BoolFn = BoolFn { f0: 1, f1: 0 };
    /// Constant zero.
    pub const C1: BoolFn = BoolFn { f0: 0, f1: 0 };
    /// Constant one.
    pub const C2: BoolFn = BoolFn { f0: 1, f1: 1 };

    pub const NAMED: [BoolFn; 4] = [Self::C1, Self::C2, Self::B1, Self::B2];

    pub fn new(f0: u8, f1: u8) -> Result<Self> {
        if f0 > 1 || f1 > 1 {
            return Err(Error::domain(format!(
                "truth table entries must be bits, got ({f0}, {f1})"
            )));
        }
        Ok(Self { f0, f1 })
    }

    pub fn f0(self) -> u8 {
        self.f0
    }

    pub fn f1(self) -> u8 {
        self.f1
    }

    pub fn eval(self, x: u8) -> u8 {
        if x & 1 == 0 {
            self.f0
        } else {
            self.f1
        }
    }

    /// `f(0) ⊕ f(1)`: 0 for constant, 1 for balanced.
    pub fn is_balanced(self) -> u8 {
        self.f0 ^ self.f1
    }

    /// Every one-bit function is one of the four named ones.
    pub fn name(self) -> &'static str {
        match (self.f0, self.f1) {
            (0, 0) => "C1",
            (1, 1) => "C2",
            (0, 1) => "B1",
            _ => "B2",
        }
    }

    pub fn kind(self) -> &'static str {
        if self.is_balanced() == 1 {
            "balanced"
        } else {
            "constant"
        }
    }

    /// Truth-table syntax accepted by [`FromStr`], e.g. `"0:0,1:1"`.
    pub fn truth_table(self) -> String {
        format!("0:{},1:{}", self.f0, self.f1)
    }

    /// The XOR oracle as a 4×4 permutation matrix, input wire first.
    pub fn oracle_unitary(self) -> Unitary {
        let mut m = DMatrix::zeros(4, 4);
        for x in 0..2u8 {
            for y in 0..2u8 {
                let col = usize::from(x << 1 | y);
                let row = usize::from(x << 1 | (y ^ self.eval(x)));
                m[(row, col)] = Complex64::new(1.0, 0.0);
            }
        }
        Unitary::new(m).expect("permutation matrices are unitary")
    }

    /// Gate-level circuit for the oracle, in application order.
    ///
    /// `f(x) = f(0) ⊕ (f(0) ⊕ f(1))·x`, so a CNOT realizes the balanced part
    /// and an X on the output realizes `f(0) = 1`.
    pub fn decomposition(self) -> Vec<OracleGate> {
        let mut gates = Vec::new();
        if self.is_balanced() == 1 {
            gates.push(OracleGate::Cnot);
        }
        if self.f0 == 1 {
            gates.push(OracleGate::FlipOutput);
        }
        gates
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoolFn {
    type Err = Error;

    /// Accepts a name (`B1`, `B2`, `C1`, `C2`) or a truth table `"0:b,1:b"`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if let Some(named) = Self::NAMED
            .iter()
            .find(|f| f.name().eq_ignore_ascii_case(trimmed))
        {
            return Ok(*named);
        }
        if !trimmed.contains(':') {
            return Err(Error::parse(
                trimmed,
                "expected B1, B2, C1, C2 or a truth table like \"0:0,1:1\"",
            ));
        }

        let mut table: [Option<u8>; 2] = [None, None];
        for entry in trimmed.split(',') {
            let entry = entry.trim();
            let (input, output) = entry
                .split_once(':')
                .ok_or_else(|| Error::parse(entry, "expected `input:output`"))?;
            let input = match input.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(Error::parse(other, "input must be 0 or 1")),
            };
            let output = match output.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(Error::parse(other, "output must be 0 or 1")),
            };
            if table[input].replace(output).is_some() {
                return Err(Error::parse(entry, format!("input {input} given twice")));
            }
        }
        match table {
            [Some(f0), Some(f1)] => Ok(BoolFn { f0, f1 }),
            [None, _] => Err(Error::parse(trimmed, "missing entry for input 0")),
            [_, None] => Err(Error::parse(trimmed, "missing entry for input 1")),
        }
    }
}

/// Two functions that are both constant or both balanced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct PromisePair {
    f: BoolFn,
    g: BoolFn,
}

#[derive(Deserialize)]
struct RawPair {
    f: BoolFn,
    g: BoolFn,
}

impl TryFrom<RawPair> for PromisePair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        PromisePair::new(raw.f, raw.g)
    }
}

impl PromisePair {
    pub fn new(f: BoolFn, g: BoolFn) -> Result<Self> {
        if f.is_balanced() != g.is_balanced() {
            return Err(Error::PromiseViolation {
                f: f.name().to_owned(),
                f_kind: f.kind(),
                g: g.name().to_owned(),
                g_kind: g.kind(),
            });
        }
        Ok(Self { f, g })
    }

    pub fn f(&self) -> BoolFn {
        self.f
    }

    pub fn g(&self) -> BoolFn {
        self.g
    }

    /// `f(0) ⊕ g(0)`, which equals `f(1) ⊕ g(1)` under the promise.
    pub fn same_at_zero(&self) -> u8 {
        self.f.f0 ^ self.g.f0
    }
}

impl fmt::Display for PromisePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.f, self.g)
    }
}

pub fn is_balanced(f: BoolFn) -> u8 {
    f.is_balanced()
}

pub fn same_at_zero(pair: &PromisePair) -> u8 {
    pair.same_at_zero()
}

pub fn oracle_unitary(f: BoolFn) -> Unitary {
    f.oracle_unitary()
}

/// The eight ordered pairs of named functions that satisfy the promise.
pub fn all_promise_pairs() -> Vec<PromisePair> {
    BoolFn::NAMED
        .iter()
        .flat_map(|&f| BoolFn::NAMED.iter().map(move |&g| (f, g)))
        .filter_map(|(f, g)| PromisePair::new(f, g).ok())
        .collect()
}
