//! Toffoli costs of arithmetic and of the selection oracle.

use serde::{Deserialize, Serialize};

use crate::math::ceil_log2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithKind {
    /// Addition discarding the carry.
    Add,
    /// Addition with a carry-out qubit.
    AddCarry,
    Subtract,
    Inequality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperandKind {
    Variable,
    Constant,
}

/// Base cost `n` (carry, inequality) or `n − 1` (add, subtract), less one
/// per trailing zero of a shared power-of-two factor, less one for a
/// classical operand; floored at zero.
pub fn arithmetic_cost(kind: ArithKind, n_bits: u32, operand: OperandKind, trailing_zeros: u32) -> u64 {
    let base = match kind {
        ArithKind::AddCarry | ArithKind::Inequality => n_bits as i64,
        ArithKind::Add | ArithKind::Subtract => n_bits as i64 - 1,
    };
    let constant = (operand == OperandKind::Constant) as i64;
    (base - trailing_zeros as i64 - constant).max(0) as u64
}

/// Cost of `t < c` against a classical `c` held on `n_bits`.
pub fn constant_inequality_cost(n_bits: u32, c: u64) -> u64 {
    let tz = if c == 0 { n_bits } else { c.trailing_zeros().min(n_bits) };
    arithmetic_cost(ArithKind::Inequality, n_bits, OperandKind::Constant, tz)
}

/// Two controlled selections (one per factor), each `2N` for the ranged
/// operations plus `2⌈log2 N⌉` for their inequality tests: `4N + 4⌈log2 N⌉`.
pub fn select_cost(n_spin: u64) -> u64 {
    4 * n_spin + 4 * ceil_log2(n_spin) as u64
}

/// Symmetry swaps `p↔q`, `r↔s` (and the pair swap) on `⌈log2(N/2)⌉`-bit
/// registers, forward and inverse: `4⌈log2(N/2)⌉`.
pub fn symmetry_swap_cost(n_spin: u64) -> u64 {
    4 * ceil_log2(n_spin / 2) as u64
}
