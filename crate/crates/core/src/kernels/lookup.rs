//! Unary iteration, plain table lookup and the select-swap lookups that
//! trade Toffolis for clean or borrowed (dirty) workspace.

use crate::circuit::{Builder, Circuit, MeasId, Qubit, Role};
use crate::error::{Error, Result};
use crate::math::{ceil_div, ceil_log2, is_power_of_two};

/// Callback run once per address value with the qubit that is set exactly
/// when the iteration control is set and the address equals that value.
pub type Leaf<'a> = dyn FnMut(&mut Builder, usize, Qubit) + 'a;

/// Controlled unary iteration over `0..count`; `count − 1` Toffolis.
///
/// Addresses at or beyond `count` must not occur: the upper half of a
/// partial range is entered without testing the bits above it.
pub fn unary_iterate(b: &mut Builder, ctrl: Qubit, addr: &[Qubit], count: usize, leaf: &mut Leaf<'_>) {
    assert!(count >= 1, "unary iteration over an empty range");
    let levels = ceil_log2(count as u64) as usize;
    assert!(addr.len() >= levels, "address register too narrow for the range");
    iterate_level(b, ctrl, addr, levels, 0, count, leaf);
}

fn iterate_level(
    b: &mut Builder,
    ctrl: Qubit,
    addr: &[Qubit],
    levels: usize,
    offset: usize,
    count: usize,
    leaf: &mut Leaf<'_>,
) {
    if count == 1 || levels == 0 {
        leaf(b, offset, ctrl);
        return;
    }
    let lvl = levels - 1;
    let half = 1usize << lvl;
    if count <= half {
        iterate_level(b, ctrl, addr, lvl, offset, count, leaf);
        return;
    }
    let bit = addr[lvl];
    b.x(bit);
    let t = b.and(ctrl, bit);
    b.x(bit);
    iterate_level(b, t, addr, lvl, offset, half, leaf);
    b.cnot(ctrl, t);
    iterate_level(b, t, addr, lvl, offset + half, count - half, leaf);
    b.unand(ctrl, bit, t);
}

/// XORs `table[addr]` into `out`; `table.len() − 1` Toffolis.
pub fn qrom_into(b: &mut Builder, ctrl: Qubit, addr: &[Qubit], table: &[u64], out: &[Qubit]) {
    unary_iterate(b, ctrl, addr, table.len(), &mut |b, j, t| write_word(b, t, table[j], out));
}

fn write_word(b: &mut Builder, ctrl: Qubit, word: u64, out: &[Qubit]) {
    for (bit, &q) in out.iter().enumerate() {
        if (word >> bit) & 1 == 1 {
            b.cnot(ctrl, q);
        }
    }
}

/// Moves register `sel` to position 0 with a binary tree of controlled
/// swaps (low address bit first). The other registers are permuted as
/// described by [`swap_network_permutation`]. Costs `M (k − 1)` controlled
/// swaps for `k` registers of `M` qubits.
pub fn swap_network(b: &mut Builder, sel: &[Qubit], regs: &[Vec<Qubit>]) {
    for (lvl, &s) in sel.iter().enumerate() {
        swap_layer(b, s, lvl, regs);
    }
}

/// Inverse of [`swap_network`]: sends register 0 to position `sel`.
pub fn swap_network_inverse(b: &mut Builder, sel: &[Qubit], regs: &[Vec<Qubit>]) {
    for (lvl, &s) in sel.iter().enumerate().rev() {
        swap_layer(b, s, lvl, regs);
    }
}

fn swap_layer(b: &mut Builder, s: Qubit, lvl: usize, regs: &[Vec<Qubit>]) {
    let step = 1usize << lvl;
    for i in (0..regs.len()).step_by(2 * step) {
        if i + step >= regs.len() {
            continue;
        }
        for (&x, &y) in regs[i].iter().zip(&regs[i + step]) {
            b.cswap(s, x, y);
        }
    }
}

/// `perm[i]` is the register whose contents sit at position `i` after
/// [`swap_network`] with selector value `sel`.
pub fn swap_network_permutation(k: usize, sel: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut lvl = 0;
    while (1usize << lvl) < k {
        let step = 1usize << lvl;
        if (sel >> lvl) & 1 == 1 {
            for i in (0..k).step_by(2 * step) {
                if i + step < k {
                    perm.swap(i, i + step);
                }
            }
        }
        lvl += 1;
    }
    perm
}

/// Clean select-swap lookup body: loads block `addr / k` into the `k`
/// registers and swaps entry `addr mod k` to `regs[0]`.
///
/// Costs `⌈d/k⌉ − 1 + M (k − 1)`. The remaining registers hold other table
/// entries afterwards; see [`junk_content`].
pub fn qroam_clean_into(b: &mut Builder, ctrl: Qubit, addr: &[Qubit], table: &[u64], regs: &[Vec<Qubit>]) {
    let k = regs.len();
    let low_bits = ceil_log2(k as u64) as usize;
    let (low, high) = addr.split_at(low_bits);
    let blocks = ceil_div(table.len() as u64, k as u64) as usize;
    unary_iterate(b, ctrl, high, blocks, &mut |b, h, t| {
        for (i, reg) in regs.iter().enumerate() {
            if let Some(&word) = table.get(h * k + i) {
                write_word(b, t, word, reg);
            }
        }
    });
    swap_network(b, low, regs);
}

/// Borrowed-workspace lookup: XORs `table[addr]` into `out`, which must
/// start at zero, and returns every `dirty` register to its prior contents.
///
/// Sequence `H·U·H·U` on the output with `U = S T S⁻¹`; costs
/// `2(⌈d/k⌉ − 1) + 4 M (k − 1)`.
pub fn qroam_dirty_into(
    b: &mut Builder,
    ctrl: Qubit,
    addr: &[Qubit],
    table: &[u64],
    out: &[Qubit],
    dirty: &[Vec<Qubit>],
) {
    let mut regs = vec![out.to_vec()];
    regs.extend(dirty.iter().cloned());
    let k = regs.len();
    let low_bits = ceil_log2(k as u64) as usize;
    let (low, high) = addr.split_at(low_bits);
    let blocks = ceil_div(table.len() as u64, k as u64) as usize;
    let toggle = |b: &mut Builder| {
        swap_network_inverse(b, low, &regs);
        unary_iterate(b, ctrl, high, blocks, &mut |b, h, t| {
            for (i, reg) in regs.iter().enumerate() {
                if let Some(&word) = table.get(h * k + i) {
                    write_word(b, t, word, reg);
                }
            }
        });
        swap_network(b, low, &regs);
    };
    out.iter().for_each(|&q| b.h(q));
    toggle(b);
    out.iter().for_each(|&q| b.h(q));
    toggle(b);
}

/// Value held by bit `bit` of junk register `i` after a clean lookup of `x`.
pub fn junk_content(table: &[u64], k: usize, i: usize, bit: usize, x: usize) -> bool {
    let idx = (x / k) * k + swap_network_permutation(k, x % k)[i];
    table.get(idx).is_some_and(|w| (w >> bit) & 1 == 1)
}

/// A measurement record together with the classical function of the
/// address that the measured qubit held just before measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasuredBit {
    pub record: MeasId,
    pub content: Vec<bool>,
}

/// X-measures and resets every qubit of `regs`, recording what each held.
pub fn measure_registers(
    b: &mut Builder,
    regs: &[Vec<Qubit>],
    d: usize,
    content: impl Fn(usize, usize, usize) -> bool,
) -> Vec<MeasuredBit> {
    let mut out = Vec::new();
    for (i, reg) in regs.iter().enumerate() {
        for (bit, &q) in reg.iter().enumerate() {
            let record = b.measure_x(q);
            b.reset_after_mx(q, record);
            out.push(MeasuredBit { record, content: (0..d).map(|x| content(i, bit, x)).collect() });
        }
    }
    out
}

/// What to do with the `k − 1` junk registers of a clean lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Garbage {
    /// Leave them in a `junk` register.
    Keep,
    /// Erase them by X measurement; phases are fixed up by the unlookup.
    Measure,
}

pub(crate) fn check_table(table: &[u64], m: usize) -> Result<()> {
    if table.is_empty() {
        return Err(Error::Invalid("lookup table is empty".into()));
    }
    if m == 0 || m > 64 {
        return Err(Error::Invalid(format!("output width {m} must be in 1..=64")));
    }
    if let Some((j, w)) = table.iter().enumerate().find(|(_, &w)| m < 64 && w >> m != 0) {
        return Err(Error::Invalid(format!("table entry {j} = {w} does not fit in {m} bits")));
    }
    Ok(())
}

pub(crate) fn check_block(k: usize, addr_bits: usize) -> Result<()> {
    if !is_power_of_two(k as u64) {
        return Err(Error::Invalid(format!("block size k = {k} is not a power of two")));
    }
    if ceil_log2(k as u64) as usize > addr_bits {
        return Err(Error::Invalid(format!("block size k = {k} exceeds the address range")));
    }
    Ok(())
}

/// Address width used by the builders: enough for `d` entries and `k` blocks.
pub(crate) fn address_bits(d: usize, k: usize) -> usize {
    (ceil_log2(d as u64) as usize).max(ceil_log2(k as u64) as usize).max(1)
}

/// Unary iteration writing a one-hot `onehot` register of width `d`.
pub fn build_unary_iteration(d: usize) -> Result<Circuit> {
    if d == 0 {
        return Err(Error::Invalid("unary iteration needs at least one value".into()));
    }
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let addr = b.register("addr", Role::Address, address_bits(d, 1));
    let onehot = b.register("onehot", Role::Output, d);
    unary_iterate(&mut b, ctrl, &addr, d, &mut |b, j, t| b.cnot(t, onehot[j]));
    Ok(b.finish())
}

/// Two nested iterations (`p` outer, `q` inner) writing `onehot[p·Q + q]`;
/// `P·Q − 1` Toffolis.
pub fn build_nested_unary_iteration(p_range: usize, q_range: usize) -> Result<Circuit> {
    if p_range == 0 || q_range == 0 {
        return Err(Error::Invalid("nested iteration needs nonempty ranges".into()));
    }
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let p = b.register("p", Role::Address, address_bits(p_range, 1));
    let q = b.register("q", Role::Address, address_bits(q_range, 1));
    let onehot = b.register("onehot", Role::Output, p_range * q_range);
    unary_iterate(&mut b, ctrl, &p, p_range, &mut |b, i, tp| {
        unary_iterate(b, tp, &q, q_range, &mut |b, j, tq| b.cnot(tq, onehot[i * q_range + j]));
    });
    Ok(b.finish())
}

/// Controlled plain lookup of an `m`-bit table.
pub fn build_qrom(table: &[u64], m: usize) -> Result<Circuit> {
    check_table(table, m)?;
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let addr = b.register("addr", Role::Address, address_bits(table.len(), 1));
    let out = b.register("out", Role::Output, m);
    qrom_into(&mut b, ctrl, &addr, table, &out);
    Ok(b.finish())
}

/// Controlled clean select-swap lookup with block size `k`.
pub fn build_qroam_clean(table: &[u64], m: usize, k: usize, garbage: Garbage) -> Result<Circuit> {
    Ok(build_qroam_clean_with_records(table, m, k, garbage)?.0)
}

/// Like [`build_qroam_clean`], also returning the junk measurement records.
pub fn build_qroam_clean_with_records(
    table: &[u64],
    m: usize,
    k: usize,
    garbage: Garbage,
) -> Result<(Circuit, Vec<MeasuredBit>)> {
    check_table(table, m)?;
    let bits = address_bits(table.len(), k);
    check_block(k, bits)?;
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let addr = b.register("addr", Role::Address, bits);
    let out = b.register("out", Role::Output, m);
    let junk: Vec<Vec<Qubit>> = match garbage {
        Garbage::Keep => {
            let flat = b.register("junk", Role::Workspace, (k - 1) * m);
            flat.chunks(m).map(|c| c.to_vec()).collect()
        }
        Garbage::Measure => (1..k).map(|_| b.ancillas(m)).collect(),
    };
    let mut regs = vec![out];
    regs.extend(junk.iter().cloned());
    qroam_clean_into(&mut b, ctrl, &addr, table, &regs);
    let mut records = Vec::new();
    if garbage == Garbage::Measure {
        records = measure_registers(&mut b, &junk, table.len(), |i, bit, x| junk_content(table, k, i + 1, bit, x));
        for reg in &junk {
            b.release_all(reg);
        }
    }
    Ok((b.finish(), records))
}

/// Controlled lookup borrowing `(k − 1)·m` qubits from a `dirty` register.
pub fn build_qroam_dirty(table: &[u64], m: usize, k: usize) -> Result<Circuit> {
    check_table(table, m)?;
    let bits = address_bits(table.len(), k);
    check_block(k, bits)?;
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let addr = b.register("addr", Role::Address, bits);
    let out = b.register("out", Role::Output, m);
    let flat = b.register("dirty", Role::Dirty, (k - 1) * m);
    let dirty: Vec<Vec<Qubit>> = flat.chunks(m.max(1)).map(|c| c.to_vec()).collect();
    qroam_dirty_into(&mut b, ctrl, &addr, table, &out, &dirty);
    Ok(b.finish())
}
