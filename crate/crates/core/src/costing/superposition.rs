//! Equal superpositions over ranges that are not powers of two, prepared by
//! Hadamards, inequality tests flagging success and amplitude amplification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{bit_length, ceil_log2};

use super::arith::{arithmetic_cost, constant_inequality_cost, ArithKind, OperandKind};

/// One inequality test used to flag success.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Test {
    /// Between two `bits`-wide registers.
    Variable { bits: u32 },
    /// Against a classical value on `bits` qubits.
    Constant { bits: u32, value: u64 },
}

impl Test {
    pub fn cost(&self) -> u64 {
        match *self {
            Test::Variable { bits } => arithmetic_cost(ArithKind::Inequality, bits, OperandKind::Variable, 0),
            Test::Constant { bits, value } => constant_inequality_cost(bits, value),
        }
    }
}

/// Ancilla register in an equal superposition over `count` of its
/// `2^bits` basis states, used only to tune the initial amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaChoice {
    pub count: u64,
    pub bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub name: String,
    /// Tests defining the target state.
    pub tests: Vec<Test>,
    /// Qubits of the target registers.
    pub register_qubits: u32,
    /// Basis states of the target registers that pass every test.
    pub successes: u128,
    pub ancilla: Option<AncillaChoice>,
    /// Amplitude-amplification steps.
    pub steps: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuperpositionCost {
    /// One preparation.
    pub single: u64,
    /// Preparation plus inverse preparation.
    pub toffoli: u64,
    pub state_tests: u64,
    pub ancilla_test: u64,
    pub reflection: u64,
    pub success_reflection: u64,
    pub final_flag: u64,
    /// Initial success amplitude `sin φ`.
    pub sin_phi: f64,
    /// Success amplitude after amplification, `sin((2k+1)φ)`.
    pub amplitude: f64,
    /// `sin((2k+2)φ)`, the expression printed beside the published
    /// amplitudes; their numerical values are those of `amplitude`.
    pub printed_formula_value: f64,
}

impl SuperpositionSpec {
    /// All qubits reflected about zero, including the ancilla.
    pub fn total_qubits(&self) -> u32 {
        self.register_qubits + self.ancilla.map_or(0, |a| a.bits)
    }

    pub fn ancilla_test(&self) -> Option<Test> {
        self.ancilla.map(|a| Test::Constant { bits: a.bits, value: a.count })
    }

    fn validate(&self) -> Result<()> {
        if self.tests.is_empty() {
            return Err(Error::Invalid(format!("superposition `{}` has no tests", self.name)));
        }
        let space = 1u128.checked_shl(self.total_qubits()).unwrap_or(0);
        let good = self.successes * self.ancilla.map_or(1, |a| a.count as u128);
        if self.successes == 0 || (space != 0 && good > space) {
            return Err(Error::Invalid(format!("superposition `{}`: success count inconsistent with register size", self.name)));
        }
        if let Some(a) = self.ancilla {
            if a.count == 0 || a.count > 1u64 << a.bits {
                return Err(Error::Invalid(format!("superposition `{}`: ancilla count {} does not fit {} bits", self.name, a.count, a.bits)));
            }
        }
        Ok(())
    }

    /// `sin φ = √(successes · count / 2^qubits)`.
    pub fn sin_phi(&self) -> f64 {
        let good = self.successes as f64 * self.ancilla.map_or(1.0, |a| a.count as f64);
        (good / 2f64.powi(self.total_qubits() as i32)).sqrt()
    }
}

/// Costs per preparation with `k` amplification steps:
/// state tests `(2k+1)×`, ancilla test `2k×`, and per step a reflection on
/// all qubits (`n − 2`) and on the test outputs (`#tests − 2`); a final
/// flag on the state tests costs `#tests − 1`. The total doubles for the
/// inverse preparation.
pub fn equal_superposition_cost(spec: &SuperpositionSpec) -> Result<SuperpositionCost> {
    spec.validate()?;
    let k = spec.steps as u64;
    let state_tests: u64 = spec.tests.iter().map(Test::cost).sum();
    let ancilla_test = spec.ancilla_test().map_or(0, |t| t.cost());
    let n_tests = spec.tests.len() as u64 + spec.ancilla.is_some() as u64;
    let reflection = (spec.total_qubits() as u64).saturating_sub(2);
    let success_reflection = n_tests.saturating_sub(2);
    let final_flag = spec.tests.len() as u64 - 1;
    let single = state_tests * (2 * k + 1) + ancilla_test * 2 * k + (reflection + success_reflection) * k + final_flag;
    let sin_phi = spec.sin_phi();
    let phi = sin_phi.clamp(0.0, 1.0).asin();
    Ok(SuperpositionCost {
        single,
        toffoli: 2 * single,
        state_tests,
        ancilla_test,
        reflection,
        success_reflection,
        final_flag,
        sin_phi,
        amplitude: ((2 * k + 1) as f64 * phi).sin(),
        printed_formula_value: ((2 * k + 2) as f64 * phi).sin(),
    })
}

/// Number of `(p, q)` pairs with `N/2 > p ≥ q ≥ 0`, i.e. `N²/8 + N/4`.
pub fn triangle(n_spin: u64) -> u64 {
    let h = n_spin / 2;
    h * (h + 1) / 2
}

fn orbital_bits(n_spin: u64) -> u32 {
    ceil_log2(n_spin / 2)
}

fn pair_tests(n_spin: u64) -> [Test; 2] {
    let b = orbital_bits(n_spin);
    [Test::Variable { bits: b }, Test::Constant { bits: b, value: n_spin / 2 }]
}

/// Rank index `ℓ ≤ L` on `bit_length(L)` qubits.
fn rank_test(rank: u64) -> Test {
    Test::Constant { bits: bit_length(rank), value: rank + 1 }
}

/// Joint superposition over `ℓ ≤ L`, `N/2 > p ≥ q`, `N/2 > r ≥ s`.
pub fn lowrank_joint(n_spin: u64, rank: u64, ancilla: Option<AncillaChoice>, steps: u32) -> SuperpositionSpec {
    let b = orbital_bits(n_spin);
    let c = triangle(n_spin) as u128;
    let mut tests = vec![rank_test(rank)];
    tests.extend(pair_tests(n_spin));
    tests.extend(pair_tests(n_spin));
    SuperpositionSpec {
        name: "l,p,q,r,s".into(),
        tests,
        register_qubits: bit_length(rank) + 4 * b,
        successes: (rank as u128 + 1) * c * c,
        ancilla,
        steps,
    }
}

/// Superposition over `ℓ ≤ L`, `N/2 > p ≥ q`.
pub fn lowrank_first(n_spin: u64, rank: u64, ancilla: Option<AncillaChoice>, steps: u32) -> SuperpositionSpec {
    let mut tests = vec![rank_test(rank)];
    tests.extend(pair_tests(n_spin));
    SuperpositionSpec {
        name: "l,p,q".into(),
        tests,
        register_qubits: bit_length(rank) + 2 * orbital_bits(n_spin),
        successes: (rank as u128 + 1) * triangle(n_spin) as u128,
        ancilla,
        steps,
    }
}

/// Superposition over `N/2 > r ≥ s`.
pub fn lowrank_second(n_spin: u64, ancilla: Option<AncillaChoice>, steps: u32) -> SuperpositionSpec {
    SuperpositionSpec {
        name: "r,s".into(),
        tests: pair_tests(n_spin).to_vec(),
        register_qubits: 2 * orbital_bits(n_spin),
        successes: triangle(n_spin) as u128,
        ancilla,
        steps,
    }
}

/// Single register over `0..d`.
pub fn single_register(d: u64, ancilla: Option<AncillaChoice>, steps: u32) -> SuperpositionSpec {
    let bits = ceil_log2(d);
    SuperpositionSpec {
        name: "sparse index".into(),
        tests: vec![Test::Constant { bits, value: d }],
        register_qubits: bits,
        successes: d as u128,
        ancilla,
        steps,
    }
}
