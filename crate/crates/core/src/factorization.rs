//! Eigendecomposition of the matricized two-body tensor and the LCU norms
//! that follow from it.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{matricize, unmatricize, IntegralSet};

/// Relative cutoff below which eigenvalues count as zero.
const RANK_TOL: f64 = 1e-10;
/// Relative tolerance for negative eigenvalues that are clamped away.
const PSD_TOL: f64 = 1e-8;
const ASYMMETRY_TOL: f64 = 1e-6;
const FORMAT_VERSION: u32 = 1;

/// `W = Σ_ℓ ω_ℓ g^(ℓ) g^(ℓ)ᵀ` with each `g^(ℓ)` a symmetric `n × n` matrix
/// stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizedCoulomb {
    pub format: u32,
    pub n_spatial: usize,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// True when no eigenpair above the rank cutoff has been dropped.
    pub full_rank: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub lambda_t: f64,
    pub lambda_v: f64,
    pub lambda_w: f64,
    /// `lambda_t + lambda_w`.
    pub lambda_total: f64,
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and eigenvectors as matrix columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();
    if n == 0 || scale == 0.0 {
        return (vec![0.0; n], v);
    }
    let off = |a: &DMatrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) < 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn fix_sign(g: &mut [f64]) {
    if let Some(&x) = g.iter().find(|x| x.abs() > 1e-12) {
        if x < 0.0 {
            g.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    let round = |x: f64| (x * 1e10).round();
    for (x, y) in a.iter().zip(b) {
        match round(*x).partial_cmp(&round(*y)).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

/// Factorizes the two-body tensor of `iset`, keeping eigenpairs above
/// `1e-10 · max(1, ω_max)`.
pub fn factorize(iset: &IntegralSet) -> Result<FactorizedCoulomb> {
    iset.validate()?;
    let n = iset.n_spatial;
    let w = matricize(iset);
    let (vals, vecs) = jacobi_eigen(&w);
    let omega_max = vals.iter().cloned().fold(0.0, f64::max);
    if let Some(&neg) = vals.iter().find(|&&x| x < -PSD_TOL * omega_max.max(1e-300)) {
        if neg.abs() > RANK_TOL * omega_max.max(1.0) {
            return Err(Error::Invalid(format!(
                "matricized two-body tensor is not positive semidefinite (eigenvalue {neg:e})"
            )));
        }
    }
    let cutoff = RANK_TOL * omega_max.max(1.0);
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, &omega) in vals.iter().enumerate() {
        if omega <= cutoff {
            continue;
        }
        let col = vecs.column(i);
        let mut g = vec![0.0; n * n];
        let mut asym: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                asym = asym.max((col[p * n + q] - col[q * n + p]).abs());
                g[p * n + q] = 0.5 * (col[p * n + q] + col[q * n + p]);
            }
        }
        if asym > ASYMMETRY_TOL {
            return Err(Error::Invalid(format!(
                "eigenvector for eigenvalue {omega:e} is not symmetric (deviation {asym:e}); input symmetry is corrupted"
            )));
        }
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        g.iter_mut().for_each(|x| *x /= norm);
        fix_sign(&mut g);
        pairs.push((omega, g));
    }
    let tie = RANK_TOL * omega_max.max(1.0);
    pairs.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= tie {
            lexicographic(&a.1, &b.1)
        } else {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal)
        }
    });
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(FactorizedCoulomb { format: FORMAT_VERSION, n_spatial: n, eigenvalues, eigenvectors, full_rank: true })
}

impl FactorizedCoulomb {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Keeps the `l` largest eigenpairs.
    pub fn truncate(&self, l: usize) -> Result<FactorizedCoulomb> {
        if l > self.rank() {
            return Err(Error::Invalid(format!("rank {l} exceeds the factorization rank {}", self.rank())));
        }
        Ok(FactorizedCoulomb {
            format: self.format,
            n_spatial: self.n_spatial,
            eigenvalues: self.eigenvalues[..l].to_vec(),
            eigenvectors: self.eigenvectors[..l].to_vec(),
            full_rank: self.full_rank && l == self.rank(),
        })
    }

    /// `Σ_ℓ ω_ℓ g gᵀ` as a matrix over composite indices.
    pub fn reconstruct_matrix(&self) -> DMatrix<f64> {
        let m = self.n_spatial * self.n_spatial;
        let mut w = DMatrix::zeros(m, m);
        for (omega, g) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..m {
                for j in 0..m {
                    w[(i, j)] += omega * g[i] * g[j];
                }
            }
        }
        w
    }

    pub fn reconstruct_tensor(&self) -> Vec<f64> {
        unmatricize(&self.reconstruct_matrix(), self.n_spatial)
    }

    /// Number of eigenvalues at or above `threshold`.
    pub fn rank_for_threshold(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().take_while(|&&w| w >= threshold).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<FactorizedCoulomb> {
        let fac: FactorizedCoulomb = serde_json::from_str(text)?;
        if fac.format != FORMAT_VERSION {
            return Err(Error::Invalid(format!("unsupported factorization format {}", fac.format)));
        }
        if fac.eigenvalues.len() != fac.eigenvectors.len()
            || fac.eigenvectors.iter().any(|g| g.len() != fac.n_spatial * fac.n_spatial)
        {
            return Err(Error::Invalid("factorization arrays have inconsistent sizes".into()));
        }
        Ok(fac)
    }
}

/// Max-norm difference between `W` and its reconstruction.
pub fn reconstruction_error(iset: &IntegralSet, fac: &FactorizedCoulomb) -> f64 {
    (matricize(iset) - fac.reconstruct_matrix()).amax()
}

/// `λ_T = 2Σ|T|`, `λ_W = 4Σ_ℓ ω_ℓ (Σ|g|)²` and `λ_V = 4Σ|V|`, with `V`
/// rebuilt from `fac` when it has been truncated.
pub fn lambdas(iset: &IntegralSet, fac: &FactorizedCoulomb) -> LambdaReport {
    let lambda_t = 2.0 * iset.t.iter().map(|x| x.abs()).sum::<f64>();
    let lambda_w = 4.0
        * fac
            .eigenvalues
            .iter()
            .zip(&fac.eigenvectors)
            .map(|(w, g)| w * g.iter().map(|x| x.abs()).sum::<f64>().powi(2))
            // `fold` from +0.0: an empty `sum` would give -0.0 at rank 0.
            .fold(0.0, |acc, x| acc + x);
    let lambda_v = if fac.full_rank {
        4.0 * iset.v.iter().map(|x| x.abs()).sum::<f64>()
    } else {
        4.0 * fac.reconstruct_tensor().iter().map(|x| x.abs()).sum::<f64>()
    };
    LambdaReport { lambda_t, lambda_v, lambda_w, lambda_total: lambda_t + lambda_w }
}

/// `L(N²/8 + N/4)`, or `(L + 1)(N²/8 + N/4)` with the one-body block.
pub fn unique_coefficient_count(l: u64, n_spin: u64, include_zero_block: bool) -> Result<u64> {
    if n_spin % 2 != 0 {
        return Err(Error::Invalid(format!("spin-orbital count {n_spin} is odd")));
    }
    // N²/8 + N/4 = h(h + 1)/2 with h = N/2, exact for every even N.
    let h = n_spin / 2;
    let per_block = h * (h + 1) / 2;
    Ok(if include_zero_block { l + 1 } else { l } * per_block)
}

/// One row of a rank sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankScanRow {
    pub rank: usize,
    pub lambda_w: f64,
    pub reconstruction_error: f64,
}

/// `λ_W` and reconstruction error for every rank `0..=fac.rank()`.
pub fn rank_scan(iset: &IntegralSet, fac: &FactorizedCoulomb) -> Result<Vec<RankScanRow>> {
    (0..=fac.rank())
        .map(|l| {
            let t = fac.truncate(l)?;
            Ok(RankScanRow { rank: l, lambda_w: lambdas(iset, &t).lambda_w, reconstruction_error: reconstruction_error(iset, &t) })
        })
        .collect()
}
