//! Contiguous lookup index `s = ℓC + p(p+1)/2 + q` following an
//! [`IndexPlan`], so the circuit spends exactly the planned Toffolis.

use crate::circuit::{Builder, Circuit, Qubit, Role};
use crate::costing::index::{IndexOp, IndexPlan};
use crate::error::{Error, Result};
use crate::math::bit_length;

use super::arithmetic::add_shifted;

/// Registers `p`, `q` (orbital bits), `l` (`bit_length(L)`) and output `s`.
///
/// Width pins are rejected: a pinned accumulator is narrower than the
/// running maximum and would drop carries.
pub fn build_contiguous_index(plan: &IndexPlan) -> Result<Circuit> {
    let natural = crate::costing::index::index_plan(plan.n_spin, plan.rank, &plan.schedule, &[])?;
    if natural.steps != plan.steps {
        return Err(Error::Invalid("index circuit needs an unpinned plan".into()));
    }
    let n = plan.orbital_bits as usize;
    let mut b = Builder::new();
    let p = b.register("p", Role::Data, n);
    let q = b.register("q", Role::Data, n);
    let l = b.register("l", Role::Data, bit_length(plan.rank) as usize);
    let s = b.register("s", Role::Output, plan.output_bits as usize);

    let mut work: Vec<Qubit> = Vec::new();
    let mut ands: Vec<(Qubit, Qubit, Qubit)> = Vec::new();
    for step in &plan.steps {
        let (shift, width) = (step.shift as usize, step.width as usize);
        match step.op {
            IndexOp::CopyHalfP => {
                for i in 1..n {
                    b.cnot(p[i], s[i - 1]);
                }
            }
            IndexOp::CopyTerm { j } => {
                let j = j as usize;
                let len = if j == 0 { n } else { n - j + 1 };
                work = b.ancillas(len);
                b.cnot(p[j], work[0]);
                for i in j + 1..n {
                    let pos = if j == 0 { i } else { i - j + 1 };
                    b.toffoli(p[j], p[i], work[pos]);
                    ands.push((p[j], p[i], work[pos]));
                }
            }
            IndexOp::AddTerm { j } => {
                add_shifted(&mut b, &work, &s, shift, width, false);
                for (x, y, t) in ands.drain(..).rev() {
                    // `unand` returns `t` to the pool.
                    b.unand(x, y, t);
                    work.retain(|&w| w != t);
                }
                b.cnot(p[j as usize], work[0]);
                b.release_all(&work);
                work.clear();
            }
            IndexOp::AddQ => add_shifted(&mut b, &q, &s, shift, width, false),
            IndexOp::AddRank { coefficient } => add_shifted(&mut b, &l, &s, shift, width, coefficient < 0),
        }
    }
    Ok(b.finish())
}
