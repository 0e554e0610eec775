//! Toffoli and qubit cost model for the qubitized walk variants.

pub mod arith;
pub mod exact;
pub mod fixtures;
pub mod index;
pub mod params;
pub mod qroam;
pub mod report;
pub mod superposition;

pub use fixtures::{Dataset, Fixtures};
pub use index::{index_plan, IndexPlan, WidthPin};
pub use params::{PhaseEstimationParams, CHEMICAL_ACCURACY};
pub use qroam::{optimal_k, qroam_cost, QroamConfig, QroamCost, QroamMode};
pub use report::{estimate_variant, reproduce, Comparison, CostReport, EstimateOptions, Variant};
pub use superposition::{equal_superposition_cost, SuperpositionCost, SuperpositionSpec};
