//! Weighted Gaussian kernel density estimates and peak extraction.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NiphError, Result};

/// Sampled density with a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    pub fn step(&self) -> f64 {
        if self.grid.len() < 2 {
            0.0
        } else {
            (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
        }
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    pub grid_points: usize,
    /// Refine the grid argmax with a three-point parabola.
    pub refine: bool,
    /// Fixed bandwidth; Scott's rule when `None`.
    pub bandwidth: Option<f64>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            grid_points: 512,
            refine: true,
            bandwidth: None,
        }
    }
}

fn check_samples(samples: &[f64], weights: &[f64]) -> Result<f64> {
    if samples.len() != weights.len() {
        return Err(NiphError::DimensionMismatch {
            expected: samples.len(),
            found: weights.len(),
        });
    }
    if samples.is_empty() {
        return Err(NiphError::EmptyDistribution("no samples".into()));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(NiphError::InvalidInput("non-finite sample".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(NiphError::InvalidInput(
            "weights must be finite and >= 0".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(NiphError::EmptyDistribution("total weight is zero".into()));
    }
    Ok(total)
}

/// Weighted mean, reliability-weighted unbiased standard deviation and effective sample size.
pub fn weighted_moments(samples: &[f64], weights: &[f64]) -> Result<(f64, f64, f64)> {
    let total = check_samples(samples, weights)?;
    let mean = samples.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / total;
    let sum_sq_w: f64 = weights.iter().map(|w| (w / total).powi(2)).sum();
    let n_eff = 1.0 / sum_sq_w;
    let biased = samples
        .iter()
        .zip(weights)
        .map(|(x, w)| w / total * (x - mean).powi(2))
        .sum::<f64>();
    let var = if sum_sq_w < 1.0 {
        biased / (1.0 - sum_sq_w)
    } else {
        0.0
    };
    Ok((mean, var.sqrt(), n_eff))
}

/// Scott's rule `h = sigma_w * n_eff^(-1/5)`.
pub fn scott_bandwidth(samples: &[f64], weights: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(NiphError::Degenerate(
            "bandwidth needs at least two samples".into(),
        ));
    }
    let (_, sd, n_eff) = weighted_moments(samples, weights)?;
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(NiphError::Degenerate(
            "zero weighted variance; the distribution is a single atom".into(),
        ));
    }
    Ok(sd * n_eff.powf(-0.2))
}

/// Gaussian KDE on a uniform grid spanning `[min - 4h, max + 4h]`.
pub fn kde(samples: &[f64], weights: &[f64], h: f64, grid_points: usize) -> Result<DensityCurve> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "bandwidth must be > 0, got {h}"
        )));
    }
    let total = check_samples(samples, weights)?;
    let n = grid_points.max(2);
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 4.0 * h;
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 4.0 * h;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|k| lo + k as f64 * step).collect();
    let norm = 1.0 / (total * h * (2.0 * PI).sqrt());
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&x| {
            samples
                .iter()
                .zip(weights)
                .map(|(s, w)| {
                    let z = (x - s) / h;
                    w * (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Ok(DensityCurve {
        grid,
        values,
        bandwidth: h,
    })
}

/// Location of the density maximum; ties go to the smallest x.
pub fn find_peak(curve: &DensityCurve) -> Result<f64> {
    find_peak_with(curve, true)
}

pub fn find_peak_with(curve: &DensityCurve, refine: bool) -> Result<f64> {
    if curve.grid.is_empty() || curve.grid.len() != curve.values.len() {
        return Err(NiphError::EmptyDistribution("empty density curve".into()));
    }
    let mut best = 0;
    for (k, v) in curve.values.iter().enumerate() {
        if *v > curve.values[best] {
            best = k;
        }
    }
    let x = curve.grid[best];
    if !refine || best == 0 || best + 1 == curve.grid.len() {
        return Ok(x);
    }
    let (l, c, r) = (
        curve.values[best - 1],
        curve.values[best],
        curve.values[best + 1],
    );
    let denom = l - 2.0 * c + r;
    if denom >= 0.0 {
        return Ok(x);
    }
    let offset = (0.5 * (l - r) / denom).clamp(-0.5, 0.5);
    Ok(x + offset * curve.step())
}

/// Density curve and peak of a weighted sample; a zero-variance sample yields its atom and no curve.
pub fn density_peak(
    samples: &[f64],
    weights: &[f64],
    cfg: &DensityConfig,
) -> Result<(Option<DensityCurve>, f64)> {
    check_samples(samples, weights)?;
    let h = match cfg.bandwidth {
        Some(h) => h,
        None => match scott_bandwidth(samples, weights) {
            Ok(h) => h,
            Err(NiphError::Degenerate(_)) => {
                // single atom (or a single sample): the atom itself is the peak
                let atom = samples
                    .iter()
                    .zip(weights)
                    .find(|(_, w)| **w > 0.0)
                    .map(|(s, _)| *s)
                    .unwrap_or(samples[0]);
                return Ok((None, atom));
            }
            Err(e) => return Err(e),
        },
    };
    let curve = kde(samples, weights, h, cfg.grid_points)?;
    let peak = find_peak_with(&curve, cfg.refine)?;
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((Some(curve), peak.clamp(lo, hi)))
}
