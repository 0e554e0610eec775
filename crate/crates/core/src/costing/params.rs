//! Phase-estimation precision parameters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::ceil_log2_f64;

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 0.0016;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseEstimationParams {
    pub lambda: f64,
    pub delta_e: f64,
    /// Phase-estimation exponent; the walk is repeated `2^m` times.
    pub m: u32,
    /// Allowable error per walk step, `√2 ΔE / (4λ)`.
    pub epsilon: f64,
    /// Keep-probability bits.
    pub mu: u32,
    pub n_prep_stages: u32,
    pub reallocated: bool,
}

fn check(lambda: f64, delta_e: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) || !(delta_e > 0.0 && delta_e.is_finite()) {
        return Err(Error::Invalid(format!("need λ > 0 and ΔE > 0, got λ = {lambda}, ΔE = {delta_e}")));
    }
    Ok(())
}

/// `⌈log2(stages · 2√2 λ / ΔE)⌉`.
///
/// Each chained preparation contributes its own rounding error, so the
/// per-stage precision target shrinks by the stage count.
pub fn keep_bits(lambda: f64, delta_e: f64, n_prep_stages: u32) -> Result<u32> {
    check(lambda, delta_e)?;
    if n_prep_stages == 0 {
        return Err(Error::Invalid("at least one preparation stage is needed".into()));
    }
    let x = n_prep_stages as f64 * 2.0 * std::f64::consts::SQRT_2 * lambda / delta_e;
    Ok(ceil_log2_f64(x).max(1) as u32)
}

/// Phase-estimation exponent.
///
/// The default splits the squared error budget evenly between phase
/// estimation and the rest, giving `⌈log2(√2 π λ / (2ΔE))⌉`. With
/// reallocation the phase estimation alone may use the whole budget,
/// `λπ / 2^(m+1) ≤ ΔE`, i.e. `⌈log2(πλ / (2ΔE))⌉`.
pub fn repetitions(lambda: f64, delta_e: f64, reallocate_error: bool) -> Result<u32> {
    check(lambda, delta_e)?;
    let pi = std::f64::consts::PI;
    let x = if reallocate_error {
        pi * lambda / (2.0 * delta_e)
    } else {
        std::f64::consts::SQRT_2 * pi * lambda / (2.0 * delta_e)
    };
    Ok(ceil_log2_f64(x).max(0) as u32)
}

impl PhaseEstimationParams {
    pub fn new(lambda: f64, delta_e: f64, n_prep_stages: u32, reallocate_error: bool) -> Result<Self> {
        Ok(PhaseEstimationParams {
            lambda,
            delta_e,
            m: repetitions(lambda, delta_e, reallocate_error)?,
            epsilon: std::f64::consts::SQRT_2 * delta_e / (4.0 * lambda),
            mu: keep_bits(lambda, delta_e, n_prep_stages)?,
            n_prep_stages,
            reallocated: reallocate_error,
        })
    }

    /// Phase-estimation error `λπ / 2^(m+1)`.
    pub fn phase_error(&self) -> f64 {
        self.lambda * std::f64::consts::PI / 2f64.powi(self.m as i32 + 1)
    }

    /// Error left for preparation and Fourier-transform synthesis,
    /// `√(ΔE² − phase_error²)`.
    pub fn residual_error(&self) -> f64 {
        (self.delta_e.powi(2) - self.phase_error().powi(2)).max(0.0).sqrt()
    }
}
