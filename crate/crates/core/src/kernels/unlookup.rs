//! Measurement-based erasure of lookup outputs.
//!
//! The output qubits are measured in the X basis. Each outcome `m` leaves
//! a phase `(-1)^(m·c(x))` where `c(x)` is what the qubit held for address
//! `x`; the fixup applies the product of those phases with a lookup whose
//! data bits are parities of measurement records.

use crate::circuit::{Builder, Circuit, Gate, MeasId, Qubit, Role};
use crate::error::{Error, Result};
use crate::math::{ceil_div, ceil_log2};

use super::lookup::{address_bits, check_block, check_table, measure_registers, swap_network, swap_network_inverse, unary_iterate, MeasuredBit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnlookupMode {
    /// One-hot register of `k` clean qubits; `⌈d/k⌉ − 1 + (k − 1)` Toffolis.
    Clean,
    /// One clean qubit plus `k − 1` borrowed ones; `2(⌈d/k⌉ − 1) + 4(k − 1)`.
    Dirty,
    /// Low address bit and one clean qubit; `⌈d/2⌉ − 1` Toffolis, `k` unused.
    Halved,
}

/// For each address, the records whose measured qubit held a one there.
fn parity_sets(d: usize, records: &[MeasuredBit]) -> Vec<Vec<MeasId>> {
    (0..d)
        .map(|x| records.iter().filter(|r| r.content.get(x) == Some(&true)).map(|r| r.record).collect())
        .collect()
}

/// Addresses that need a `-1` phase for a given outcome assignment.
pub fn phase_fixup_set(d: usize, records: &[MeasuredBit], outcomes: &[bool]) -> Vec<usize> {
    (0..d)
        .filter(|&x| {
            records.iter().zip(outcomes).filter(|(r, &m)| m && r.content.get(x) == Some(&true)).count() % 2 == 1
        })
        .collect()
}

/// Halved fixup table: entry `j` is `([2j+1 ∈ S], [2j ∈ S])`.
pub fn fixup_table(d: usize, set: &[usize]) -> Vec<(bool, bool)> {
    (0..ceil_div(d as u64, 2) as usize).map(|j| (set.contains(&(2 * j + 1)), set.contains(&(2 * j)))).collect()
}

/// Applies XOR of the listed records onto `target` under `ctrl`.
fn write_parity(b: &mut Builder, ctrl: Qubit, target: Qubit, ids: &[MeasId]) {
    for &m in ids {
        b.push_if(Gate::Cnot(ctrl, target), m);
    }
}

fn check_records(b: &Builder, d: usize, records: &[MeasuredBit]) -> Result<()> {
    for r in records {
        if r.record.0 >= b.n_measurements() {
            return Err(Error::Missing(format!("measurement record m{}", r.record.0)));
        }
        if r.content.len() != d {
            return Err(Error::Invalid(format!("record m{} has {} content bits, expected {d}", r.record.0, r.content.len())));
        }
    }
    Ok(())
}

/// Erases a one-hot register `onehot[sel]` using only Cliffords and
/// measurements. Each controlled swap of the inverse sending network moves
/// a qubit that can only be set when its control is set, so it becomes a
/// CNOT followed by an X measurement and a conditioned CZ.
pub fn unary_erasure(b: &mut Builder, sel: &[Qubit], onehot: &[Qubit]) {
    let k = onehot.len();
    for (lvl, &c) in sel.iter().enumerate() {
        let step = 1usize << lvl;
        for i in (0..k).step_by(2 * step) {
            if i + step >= k {
                continue;
            }
            let (x, y) = (onehot[i], onehot[i + step]);
            b.cnot(y, x);
            let m = b.measure_x(y);
            b.push_if(Gate::Cz(c, x), m);
            b.reset_after_mx(y, m);
        }
    }
    b.x(onehot[0]);
}

/// Applies `(-1)^(parity of records at addr)` under `ctrl`.
///
/// `dirty` supplies the `k − 1` borrowed qubits in [`UnlookupMode::Dirty`]
/// and is ignored otherwise.
#[allow(clippy::too_many_arguments)]
pub fn phase_fixup_into(
    b: &mut Builder,
    ctrl: Qubit,
    addr: &[Qubit],
    d: usize,
    k: usize,
    mode: UnlookupMode,
    records: &[MeasuredBit],
    dirty: &[Qubit],
) -> Result<()> {
    check_records(b, d, records)?;
    let sets = parity_sets(d, records);
    match mode {
        UnlookupMode::Halved => {
            let q = addr[0];
            let u = b.ancilla();
            b.x(u);
            b.cnot(q, u);
            b.h(q);
            b.h(u);
            unary_iterate(b, ctrl, &addr[1..], ceil_div(d as u64, 2) as usize, &mut |b, j, t| {
                if let Some(s) = sets.get(2 * j + 1) {
                    write_parity(b, t, q, s);
                }
                write_parity(b, t, u, &sets[2 * j]);
            });
            b.h(q);
            b.h(u);
            b.cnot(q, u);
            b.x(u);
            b.release(u);
        }
        UnlookupMode::Clean | UnlookupMode::Dirty => {
            check_block(k, addr.len())?;
            let low_bits = ceil_log2(k as u64) as usize;
            let (low, high) = addr.split_at(low_bits);
            let blocks = ceil_div(d as u64, k as u64) as usize;
            let fix = |b: &mut Builder, regs: &[Qubit]| {
                unary_iterate(b, ctrl, high, blocks, &mut |b, h, t| {
                    for (i, &r) in regs.iter().enumerate() {
                        if let Some(s) = sets.get(h * k + i) {
                            write_parity(b, t, r, s);
                        }
                    }
                });
            };
            if mode == UnlookupMode::Clean {
                let regs = b.ancillas(k);
                let wrapped: Vec<Vec<Qubit>> = regs.iter().map(|&q| vec![q]).collect();
                b.x(regs[0]);
                swap_network_inverse(b, low, &wrapped);
                regs.iter().for_each(|&q| b.h(q));
                fix(b, &regs);
                regs.iter().for_each(|&q| b.h(q));
                unary_erasure(b, low, &regs);
                b.release_all(&regs);
            } else {
                if dirty.len() != k - 1 {
                    return Err(Error::Invalid(format!("dirty fixup needs {} borrowed qubits, got {}", k - 1, dirty.len())));
                }
                let r0 = b.ancilla();
                let mut regs = vec![r0];
                regs.extend_from_slice(dirty);
                let wrapped: Vec<Vec<Qubit>> = regs.iter().map(|&q| vec![q]).collect();
                b.h(r0);
                for _ in 0..2 {
                    swap_network_inverse(b, low, &wrapped);
                    fix(b, &regs);
                    swap_network(b, low, &wrapped);
                    b.z(r0);
                }
                b.h(r0);
                b.release(r0);
            }
        }
    }
    Ok(())
}

/// X-measures `out` (holding `table[addr]`) and erases the phase garbage.
#[allow(clippy::too_many_arguments)]
pub fn unlookup_into(
    b: &mut Builder,
    ctrl: Qubit,
    addr: &[Qubit],
    table: &[u64],
    out: &[Qubit],
    k: usize,
    mode: UnlookupMode,
    extra: &[MeasuredBit],
    dirty: &[Qubit],
) -> Result<()> {
    let d = table.len();
    let mut records = measure_registers(b, &[out.to_vec()], d, |_, bit, x| (table[x] >> bit) & 1 == 1);
    records.extend_from_slice(extra);
    phase_fixup_into(b, ctrl, addr, d, k, mode, &records, dirty)
}

/// Erases an output register that holds `table[addr]` (when `ctrl` is set).
///
/// Registers: `ctrl`, `addr`, `out`, plus `dirty` (width `k − 1`) in dirty
/// mode. Only the fixup contributes Toffolis.
pub fn build_unlookup(table: &[u64], m: usize, k: usize, mode: UnlookupMode) -> Result<Circuit> {
    check_table(table, m)?;
    let kk = if mode == UnlookupMode::Halved { 2 } else { k };
    let bits = address_bits(table.len(), kk);
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let addr = b.register("addr", Role::Address, bits);
    let out = b.register("out", Role::Output, m);
    let dirty = if mode == UnlookupMode::Dirty { b.register("dirty", Role::Dirty, k.saturating_sub(1)) } else { Vec::new() };
    unlookup_into(&mut b, ctrl, &addr, table, &out, k, mode, &[], &dirty)?;
    Ok(b.finish())
}

/// Binary-to-unary erasure alone: registers `sel` (log2 k bits) and
/// `onehot` (k qubits, holding `e_sel`). Contains no Toffolis.
pub fn build_unary_erasure(k: usize) -> Result<Circuit> {
    let bits = ceil_log2(k as u64) as usize;
    check_block(k, bits)?;
    let mut b = Builder::new();
    let sel = b.register("sel", Role::Address, bits);
    let onehot = b.register("onehot", Role::Workspace, k);
    unary_erasure(&mut b, &sel, &onehot);
    Ok(b.finish())
}

/// Which lookup a round trip uses for the compute step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LookupMode {
    Clean,
    Dirty,
}

/// Lookup followed by measurement-based unlookup, restoring `|addr>|0>`.
///
/// Registers: `ctrl`, `addr`, `out`, `dirty` (width `max(k_c − 1)·m, k_u − 1)`
/// when either step borrows). The clean lookup's junk registers are measured
/// immediately and their phases folded into the same fixup.
pub fn build_lookup_round_trip(
    table: &[u64],
    m: usize,
    k_compute: usize,
    k_uncompute: usize,
    lookup: LookupMode,
    unlookup: UnlookupMode,
) -> Result<Circuit> {
    check_table(table, m)?;
    let ku = if unlookup == UnlookupMode::Halved { 2 } else { k_uncompute };
    let bits = address_bits(table.len(), k_compute.max(ku));
    check_block(k_compute, bits)?;
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let addr = b.register("addr", Role::Address, bits);
    let out = b.register("out", Role::Output, m);
    let need_dirty = match lookup {
        LookupMode::Dirty => (k_compute - 1) * m,
        LookupMode::Clean => 0,
    }
    .max(if unlookup == UnlookupMode::Dirty { k_uncompute - 1 } else { 0 });
    let dirty = b.register("dirty", Role::Dirty, need_dirty);
    let mut extra = Vec::new();
    match lookup {
        LookupMode::Clean => {
            let junk: Vec<Vec<Qubit>> = (1..k_compute).map(|_| b.ancillas(m)).collect();
            let mut regs = vec![out.clone()];
            regs.extend(junk.iter().cloned());
            super::lookup::qroam_clean_into(&mut b, ctrl, &addr, table, &regs);
            extra = measure_registers(&mut b, &junk, table.len(), |i, bit, x| {
                super::lookup::junk_content(table, k_compute, i + 1, bit, x)
            });
            for reg in &junk {
                b.release_all(reg);
            }
        }
        LookupMode::Dirty => {
            let regs: Vec<Vec<Qubit>> = dirty[..(k_compute - 1) * m].chunks(m).map(|c| c.to_vec()).collect();
            super::lookup::qroam_dirty_into(&mut b, ctrl, &addr, table, &out, &regs);
        }
    }
    let borrowed = if unlookup == UnlookupMode::Dirty { &dirty[..k_uncompute - 1] } else { &[][..] };
    unlookup_into(&mut b, ctrl, &addr, table, &out, k_uncompute, unlookup, &extra, borrowed)?;
    Ok(b.finish())
}
