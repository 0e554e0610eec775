//! Gate-level constructions of the lookup, arithmetic, preparation and
//! selection kernels. Every builder returns a [`Circuit`](crate::circuit::Circuit)
//! whose Toffoli count is exact.

pub mod arithmetic;
pub mod index;
pub mod lookup;
pub mod prepare;
pub mod select;
pub mod unlookup;
pub mod walk;

pub use arithmetic::{build_adder, build_inequality, build_subtractor, Operand};
pub use index::build_contiguous_index;
pub use lookup::{
    build_nested_unary_iteration, build_qroam_clean, build_qroam_dirty, build_qrom, build_unary_iteration, Garbage,
};
pub use prepare::{build_alias_prepare, build_sparse_prepare, build_symmetry_swaps, AliasTable};
pub use select::build_select_ranged;
pub use unlookup::{build_lookup_round_trip, build_unary_erasure, build_unlookup, LookupMode, UnlookupMode};
pub use walk::{build_full_select, build_qubitization_walk, lcu_terms, LcuTerm, QubitizationWalk};
