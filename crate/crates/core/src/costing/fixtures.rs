//! Dataset constants for the estimator, including the bundled published
//! FeMoco inputs.
//!
//! The bundled file can be replaced at runtime by pointing `QUBITIZE_FIXTURES`
//! at a directory containing `published.json` (or at the file itself).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::index::WidthPin;
use super::superposition::AncillaChoice;

pub const FIXTURES_ENV: &str = "QUBITIZE_FIXTURES";
pub const FIXTURES_FILE: &str = "published.json";
pub const FORMAT_VERSION: u32 = 1;

const BUNDLED: &str = include_str!("../../fixtures/published.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperpositionChoice {
    pub ancilla: Option<AncillaChoice>,
    pub steps: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantChoice {
    #[serde(default)]
    pub reallocate_error: bool,
    #[serde(default)]
    pub k_compute: Option<u64>,
    #[serde(default)]
    pub k_uncompute: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VariantChoices {
    #[serde(default)]
    pub lowrank_dirty: VariantChoice,
    #[serde(default)]
    pub lowrank_clean: VariantChoice,
    #[serde(default)]
    pub sparse: VariantChoice,
}

/// A published count the cost rules do not reproduce, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjustment {
    /// Variant name, or `lowrank` for both low-rank variants.
    pub variant: String,
    pub line: String,
    pub rule: u64,
    pub published: u64,
    /// Whether the published value replaces the rule value.
    pub applied: bool,
    pub reason: String,
}

/// One published result to compare against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedCell {
    pub variant: String,
    pub reallocate_error: bool,
    pub m: u32,
    pub mu: u32,
    pub per_step_toffoli: u64,
    #[serde(default)]
    pub per_step_tolerance: u64,
    /// Printed to two significant figures.
    pub total_toffoli: f64,
    pub qubits: u64,
}

/// Inputs describing one Hamiltonian for the estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    /// Spin orbitals `N`.
    pub n_spin: u64,
    /// Factorization rank `L`.
    #[serde(default)]
    pub rank: Option<u64>,
    #[serde(default)]
    pub lambda_lowrank: Option<f64>,
    #[serde(default)]
    pub lambda_sparse: Option<f64>,
    #[serde(default)]
    pub sparse_threshold: Option<f64>,
    /// Unique nonzero two-body representatives after truncation.
    #[serde(default)]
    pub unique_count: Option<u64>,
    #[serde(default)]
    pub nonzero_count: Option<u64>,
    /// Signed power-of-two expansion of `N²/8 + N/4`; binary when absent.
    #[serde(default)]
    pub index_schedule: Option<Vec<i64>>,
    #[serde(default)]
    pub index_width_pins: Vec<WidthPin>,
    /// One entry for a joint preparation, two for split `ℓ,p,q` / `r,s`.
    #[serde(default)]
    pub lowrank_superposition: Option<Vec<SuperpositionChoice>>,
    #[serde(default)]
    pub sparse_superposition: Option<SuperpositionChoice>,
    #[serde(default)]
    pub variants: VariantChoices,
    #[serde(default)]
    pub published: Vec<PublishedCell>,
    #[serde(default)]
    pub adjustments: Vec<Adjustment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixtures {
    pub format_version: u32,
    #[serde(default)]
    pub description: String,
    pub delta_e: f64,
    pub datasets: Vec<Dataset>,
}

impl Fixtures {
    pub fn from_json(text: &str) -> Result<Fixtures> {
        let f: Fixtures = serde_json::from_str(text)?;
        if f.format_version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "fixtures format version {} is not supported (expected {FORMAT_VERSION})",
                f.format_version
            )));
        }
        Ok(f)
    }

    /// The bundled constants.
    pub fn bundled() -> Fixtures {
        Fixtures::from_json(BUNDLED).expect("bundled fixtures are valid")
    }

    pub fn load(path: &Path) -> Result<Fixtures> {
        let file: PathBuf = if path.is_dir() { path.join(FIXTURES_FILE) } else { path.to_path_buf() };
        Fixtures::from_json(&std::fs::read_to_string(file)?)
    }

    /// Bundled constants unless `QUBITIZE_FIXTURES` is set.
    pub fn from_env() -> Result<Fixtures> {
        match std::env::var_os(FIXTURES_ENV) {
            Some(p) => Fixtures::load(Path::new(&p)),
            None => Ok(Fixtures::bundled()),
        }
    }

    pub fn dataset(&self, name: &str) -> Result<&Dataset> {
        self.datasets
            .iter()
            .find(|d| d.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Missing(format!("dataset `{name}` in fixtures")))
    }
}
