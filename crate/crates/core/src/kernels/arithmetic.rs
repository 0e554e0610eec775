//! Adders, subtractors and comparators whose carries are erased by
//! X-measurement instead of a second Toffoli ladder.

use crate::circuit::{Builder, Circuit, Qubit, Role};
use crate::error::{Error, Result};

/// `t ← t + a (mod 2^n)`; with `carry`, also `carry ^= carry-out`.
///
/// Costs `n − 1` Toffolis, or `n` with a carry qubit.
pub fn add_into(b: &mut Builder, a: &[Qubit], t: &[Qubit], carry: Option<Qubit>) {
    assert_eq!(a.len(), t.len(), "adder operands must have equal width");
    let n = t.len();
    if n == 0 {
        return;
    }
    let top = if carry.is_some() { n } else { n - 1 };
    if top == 0 {
        b.cnot(a[0], t[0]);
        return;
    }
    // c[k] is the carry into bit k; c[0] is never used.
    let mut c: Vec<Qubit> = vec![usize::MAX; top + 1];
    c[1] = match carry {
        Some(cq) if top == 1 => {
            b.toffoli(a[0], t[0], cq);
            cq
        }
        _ => b.and(a[0], t[0]),
    };
    for k in 1..top {
        b.cnot(c[k], a[k]);
        b.cnot(c[k], t[k]);
        let target = match carry {
            Some(cq) if k + 1 == top => {
                b.toffoli(a[k], t[k], cq);
                cq
            }
            _ => b.and(a[k], t[k]),
        };
        b.cnot(c[k], target);
        c[k + 1] = target;
    }
    if carry.is_some() {
        if n > 1 {
            b.cnot(c[n - 1], a[n - 1]);
        }
        b.cnot(a[n - 1], t[n - 1]);
    } else {
        b.cnot(c[n - 1], t[n - 1]);
        b.cnot(a[n - 1], t[n - 1]);
    }
    for k in (1..n - 1).rev() {
        b.cnot(c[k], c[k + 1]);
        b.unand(a[k], t[k], c[k + 1]);
        b.cnot(c[k], a[k]);
        b.cnot(a[k], t[k]);
    }
    if n > 1 {
        b.unand(a[0], t[0], c[1]);
        b.cnot(a[0], t[0]);
    }
}

/// `t ← t − a (mod 2^n)` as `¬(¬t + a)`; `n − 1` Toffolis.
pub fn subtract_into(b: &mut Builder, a: &[Qubit], t: &[Qubit]) {
    t.iter().for_each(|&q| b.x(q));
    add_into(b, a, t, None);
    t.iter().for_each(|&q| b.x(q));
}

/// Adds `operand · 2^shift` into `acc[..width]`, zero-padding the operand.
///
/// Only bits `shift..width` of the accumulator take part, so the cost is
/// `width − shift − 1` (floored at zero).
pub fn add_shifted(b: &mut Builder, operand: &[Qubit], acc: &[Qubit], shift: usize, width: usize, subtract: bool) {
    if width <= shift {
        return;
    }
    let slice = &acc[shift..width];
    let used = operand.len().min(slice.len());
    let pad = b.ancillas(slice.len() - used);
    let a: Vec<Qubit> = operand[..used].iter().copied().chain(pad.iter().copied()).collect();
    if subtract {
        subtract_into(b, &a, slice);
    } else {
        add_into(b, &a, slice, None);
    }
    b.release_all(&pad);
}

/// `flag ^= [t < i]`; `n` Toffolis. `t` and `i` are restored.
///
/// The flag is the carry out of `¬t + i`, computed with a majority ladder
/// whose intermediate carries are erased by measurement.
pub fn less_than_into(b: &mut Builder, t: &[Qubit], i: &[Qubit], flag: Qubit) {
    assert_eq!(t.len(), i.len(), "comparator operands must have equal width");
    let n = t.len();
    if n == 0 {
        return;
    }
    t.iter().for_each(|&q| b.x(q));
    if n == 1 {
        b.toffoli(t[0], i[0], flag);
        b.x(t[0]);
        return;
    }
    let mut c: Vec<Qubit> = vec![usize::MAX; n];
    c[1] = b.and(t[0], i[0]);
    for k in 1..n {
        b.cnot(c[k], t[k]);
        b.cnot(c[k], i[k]);
        if k == n - 1 {
            b.toffoli(t[k], i[k], flag);
            b.cnot(c[k], flag);
        } else {
            c[k + 1] = b.and(t[k], i[k]);
            b.cnot(c[k], c[k + 1]);
        }
    }
    b.cnot(c[n - 1], t[n - 1]);
    b.cnot(c[n - 1], i[n - 1]);
    for k in (1..n - 1).rev() {
        b.cnot(c[k], c[k + 1]);
        b.unand(t[k], i[k], c[k + 1]);
        b.cnot(c[k], t[k]);
        b.cnot(c[k], i[k]);
    }
    b.unand(t[0], i[0], c[1]);
    t.iter().for_each(|&q| b.x(q));
}

/// `flag ^= [t < k]` for a classical `k < 2^n`.
///
/// Costs `n − 1 − tz(k)` Toffolis (zero for `k = 0`): trailing zero bits of
/// `k` cannot produce a carry and the first one-bit forwards `¬t` directly.
pub fn less_than_const_into(b: &mut Builder, t: &[Qubit], k: u64, flag: Qubit) {
    let n = t.len();
    assert!(n >= 64 || k >> n == 0, "constant out of range");
    if k == 0 {
        return;
    }
    let tz = k.trailing_zeros() as usize;
    t.iter().for_each(|&q| b.x(q));
    let mut carry = t[tz];
    let mut stack: Vec<(usize, Qubit, Qubit)> = Vec::new();
    for bit in tz + 1..n {
        let target = if bit == n - 1 { flag } else { b.ancilla() };
        if (k >> bit) & 1 == 0 {
            b.toffoli(t[bit], carry, target);
        } else {
            b.x(t[bit]);
            b.x(carry);
            b.toffoli(t[bit], carry, target);
            b.x(target);
            b.x(t[bit]);
            b.x(carry);
        }
        if target != flag {
            stack.push((bit, carry, target));
        }
        carry = target;
    }
    if tz == n - 1 {
        b.cnot(t[tz], flag);
    }
    for (bit, cin, anc) in stack.into_iter().rev() {
        if (k >> bit) & 1 == 0 {
            b.unand(t[bit], cin, anc);
        } else {
            b.x(t[bit]);
            b.x(cin);
            b.x(anc);
            b.unand(t[bit], cin, anc);
            b.x(t[bit]);
            b.x(cin);
        }
    }
    t.iter().for_each(|&q| b.x(q));
}

/// Second operand of a comparator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Variable,
    Constant(u64),
}

/// `t ← t + i`, registers `i` and `t` (plus `carry` when not modular).
pub fn build_adder(n: usize, modular: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Invalid("adder width must be at least 1".into()));
    }
    let mut b = Builder::new();
    let i = b.register("i", Role::Data, n);
    let t = b.register("t", Role::Output, n);
    let carry = (!modular).then(|| b.qubit("carry", Role::Output));
    add_into(&mut b, &i, &t, carry);
    Ok(b.finish())
}

/// `t ← t − i (mod 2^n)`.
pub fn build_subtractor(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Invalid("subtractor width must be at least 1".into()));
    }
    let mut b = Builder::new();
    let i = b.register("i", Role::Data, n);
    let t = b.register("t", Role::Output, n);
    subtract_into(&mut b, &i, &t);
    Ok(b.finish())
}

/// `flag ^= [t < i]` against a second register or a classical constant.
pub fn build_inequality(n: usize, operand: Operand) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Invalid("comparator width must be at least 1".into()));
    }
    let mut b = Builder::new();
    let t = b.register("t", Role::Data, n);
    match operand {
        Operand::Variable => {
            let i = b.register("i", Role::Data, n);
            let flag = b.qubit("flag", Role::Flag);
            less_than_into(&mut b, &t, &i, flag);
        }
        Operand::Constant(k) => {
            if n < 64 && k >> n != 0 {
                return Err(Error::Invalid(format!("constant {k} does not fit in {n} bits")));
            }
            let flag = b.qubit("flag", Role::Flag);
            less_than_const_into(&mut b, &t, k, flag);
        }
    }
    Ok(b.finish())
}
