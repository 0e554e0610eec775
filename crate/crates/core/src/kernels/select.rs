//! Controlled selection of the Jordan-Wigner strings `X Z…Z X`, `Y Z…Z Y`
//! and `−Z`, indexed by spatial orbitals and a spin bit.
//!
//! System qubit `p + α·N/2` holds spin-orbital `(p, α)`.

use crate::circuit::{Builder, Circuit, Qubit, Role};
use crate::error::{Error, Result};
use crate::math::is_power_of_two;

use super::lookup::unary_iterate;

/// Applies `Z_0 … Z_{j−1} A_j` to `psi` for the `j` held in `addr`, under
/// `ctrl`. An accumulator tracks `[j > leaf]` so each leaf adds one CZ.
/// Costs `N − 1` Toffolis.
fn ranged_z_string(b: &mut Builder, ctrl: Qubit, addr: &[Qubit], psi: &[Qubit], use_y: bool) {
    let acc = b.ancilla();
    b.cnot(ctrl, acc);
    unary_iterate(b, ctrl, addr, psi.len(), &mut |b, j, f| {
        b.cnot(f, acc);
        b.cz(acc, psi[j]);
        if use_y {
            b.cy(f, psi[j]);
        } else {
            b.cnot(f, psi[j]);
        }
    });
    b.release(acc);
}

/// Registers of one `(p, q, α, q1, θ)` index tuple.
#[derive(Clone, Debug)]
pub struct TermRegisters {
    pub p: Vec<Qubit>,
    pub q: Vec<Qubit>,
    pub alpha: Qubit,
    pub q1: Qubit,
    pub theta: Qubit,
}

impl TermRegisters {
    pub fn allocate(b: &mut Builder, suffix: &str, bits: usize) -> TermRegisters {
        TermRegisters {
            p: b.register(&format!("p{suffix}"), Role::Data, bits),
            q: b.register(&format!("q{suffix}"), Role::Data, bits),
            alpha: b.qubit(&format!("alpha{suffix}"), Role::Data),
            q1: b.qubit(&format!("q1{suffix}"), Role::Data),
            theta: b.qubit(&format!("theta{suffix}"), Role::Data),
        }
    }

    pub fn qubits(&self) -> Vec<Qubit> {
        let mut v = self.p.clone();
        v.extend(&self.q);
        v.extend([self.alpha, self.q1, self.theta]);
        v
    }
}

/// Controlled selection of one string:
/// `p<q → X_p Z⃗ X_q`, `p>q → Y_p Z⃗ Y_q`, `p=q ∧ q1 → I`, `p=q ∧ ¬q1 → −Z_p`,
/// all times `(−1)^θ`.
///
/// A flag `control ∧ ¬(q1 ∧ p=q)` drives two ranged strings, `Z⃗Y` on
/// `(p, α)` then `Z⃗X` on `(q, α)`, with an `S` on the flag supplying the
/// missing factor of `i`. The equality test is one AND ladder, erased by
/// measurement. Costs `2(N − 1) + log2 N` Toffolis.
pub fn select_1_into(b: &mut Builder, control: Qubit, regs: &TermRegisters, psi: &[Qubit]) {
    let n_bits = regs.p.len();
    let eq_test = |b: &mut Builder| {
        for (&pi, &qi) in regs.p.iter().zip(&regs.q) {
            b.cnot(pi, qi);
            b.x(qi);
        }
    };
    let eq_undo = |b: &mut Builder| {
        for (&pi, &qi) in regs.p.iter().zip(&regs.q) {
            b.x(qi);
            b.cnot(pi, qi);
        }
    };
    // Ladder control ∧ q1 ∧ [p_i = q_i] for all i.
    eq_test(b);
    let inputs: Vec<Qubit> = [control, regs.q1].into_iter().chain(regs.q.iter().copied()).collect();
    let mut ladder = Vec::with_capacity(n_bits + 1);
    let mut acc = inputs[0];
    for &x in &inputs[1..] {
        let t = b.and(acc, x);
        ladder.push((acc, x, t));
        acc = t;
    }
    let e = acc;
    eq_undo(b);

    let flag = b.ancilla();
    b.cnot(control, flag);
    b.cnot(e, flag);

    let p_addr: Vec<Qubit> = regs.p.iter().copied().chain([regs.alpha]).collect();
    let q_addr: Vec<Qubit> = regs.q.iter().copied().chain([regs.alpha]).collect();
    ranged_z_string(b, flag, &p_addr, psi, true);
    b.s(flag);
    ranged_z_string(b, flag, &q_addr, psi, false);
    b.cz(control, regs.theta);

    b.cnot(e, flag);
    b.cnot(control, flag);
    b.release(flag);

    eq_test(b);
    for (a, x, t) in ladder.into_iter().rev() {
        b.unand(a, x, t);
    }
    eq_undo(b);
}

pub(crate) fn check_orbitals(n_spin: usize) -> Result<usize> {
    if n_spin < 4 || n_spin % 2 != 0 || !is_power_of_two((n_spin / 2) as u64) {
        return Err(Error::Invalid(format!(
            "selection needs N/2 a power of two with N ≥ 4, got N = {n_spin}"
        )));
    }
    if n_spin > 8 {
        return Err(Error::Limit(format!("N = {n_spin} spin orbitals is too large to simulate (max 8)")));
    }
    Ok((n_spin / 2).trailing_zeros() as usize)
}

/// Controlled `select_1` on `N` spin orbitals.
///
/// Registers: `control`, `p`, `q`, `alpha`, `q1`, `theta`, `psi` (`N` qubits).
pub fn build_select_ranged(n_spin: usize) -> Result<Circuit> {
    let bits = check_orbitals(n_spin)?;
    let mut b = Builder::new();
    let control = b.qubit("control", Role::Control);
    let regs = TermRegisters::allocate(&mut b, "", bits);
    let psi = b.register("psi", Role::System, n_spin);
    select_1_into(&mut b, control, &regs, &psi);
    Ok(b.finish())
}
