//! Empirical checks of the a priori estimates along a computed path.

use serde::{Deserialize, Serialize};

use super::{background_sigma2, choose_f, continue_path, DiagnosticsRecord, SolveConfig};
use crate::error::{Error, Result};
use crate::geometry::S1xS3;

pub const UPPER_BOUND_SLACK: f64 = 1e-6;
pub const HARNACK_SLACK: f64 = 1e-9;
pub const DELTA_BAR_SLACK: f64 = 1e-6;

/// σ₁(g⁻¹Aᵗ_g) = 3 − 2t on S¹×S³ with a unit sphere.
pub fn background_sigma1(t: f64) -> f64 {
    3.0 - 2.0 * t
}

/// Newton's inequality bound (4/√6)·f·e^{2u_max} ≤ σ₁(Aᵗ_g), homogeneous data only.
/// Returns the t values of the records that violate it.
pub fn upper_bound_violations(cfg: &SolveConfig, trace: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    if !cfg.is_homogeneous() {
        return Err(Error::InvalidInput("upper-bound monitor needs homogeneous data".into()));
    }
    let f = choose_f(cfg.delta)?;
    let k = 4.0 / 6f64.sqrt();
    Ok(trace
        .iter()
        .filter(|d| k * f * (2.0 * d.u_max).exp() > background_sigma1(d.t) + UPPER_BOUND_SLACK)
        .map(|d| d.t)
        .collect())
}

/// max over the path of ¼ln(σ₂(Aᵗ_g)/f²), the exact constant solutions.
pub fn delta_bar_empirical(cfg: &SolveConfig, trace: &[DiagnosticsRecord]) -> Result<f64> {
    let f2 = choose_f(cfg.delta)?.powi(2);
    Ok(trace
        .iter()
        .map(|d| 0.25 * (background_sigma2(d.t) / f2).ln())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// u_max ≤ δ̄ + slack along the whole trace.
pub fn delta_bar_holds(cfg: &SolveConfig, trace: &[DiagnosticsRecord]) -> Result<bool> {
    let bound = delta_bar_empirical(cfg, trace)?;
    Ok(trace.iter().all(|d| d.u_max <= bound + DELTA_BAR_SLACK))
}

/// max u − min u ≤ max|u′|·L/2.
pub fn harnack_holds(record: &DiagnosticsRecord, period: f64) -> bool {
    record.harnack_gap >= 0.0 && record.harnack_gap <= record.grad_max * period / 2.0 + HARNACK_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    /// (t, ¼ln λ_t − u_max) for each record with t < 1.
    pub offsets: Vec<(f64, f64)>,
    /// The empirical constant: the largest offset.
    pub c_empirical: f64,
    /// Largest minus smallest offset.
    pub spread: f64,
}

/// λ_t = F₂ + (1/6)(1−t)(2−t)Y².
pub fn lambda_t(f2: f64, yamabe: f64, t: f64) -> f64 {
    f2 + (1.0 - t) * (2.0 - t) * yamabe * yamabe / 6.0
}

/// Offsets between ¼ln λ_t and max u_t along the trace.
pub fn lower_bound_report(trace: &[DiagnosticsRecord], f2: f64, yamabe: f64) -> Result<LowerBoundReport> {
    let mut offsets = Vec::new();
    for d in trace {
        let lam = lambda_t(f2, yamabe, d.t);
        if !(lam > 0.0) {
            return Err(Error::Hypothesis(format!("lambda_t = {lam} <= 0 at t = {}", d.t)));
        }
        offsets.push((d.t, 0.25 * lam.ln() - d.u_max));
    }
    let hi = offsets.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = offsets.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    Ok(LowerBoundReport {
        offsets,
        c_empirical: hi,
        spread: hi - lo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientStability {
    pub grids: Vec<usize>,
    /// max over the path of grad_max, per grid.
    pub grad_bounds: Vec<f64>,
    /// (max − min)/max over the grids.
    pub relative_spread: f64,
}

/// Solves the same path on several grids and compares the gradient bounds.
pub fn gradient_stability(bg: S1xS3, cfg: &SolveConfig, grids: &[usize]) -> Result<GradientStability> {
    let mut grad_bounds = Vec::with_capacity(grids.len());
    for &n in grids {
        let run = SolveConfig {
            grid_n: n,
            ..cfg.clone()
        };
        let (_, trace) = continue_path(bg, &run)?;
        grad_bounds.push(trace.iter().map(|d| d.grad_max).fold(0.0, f64::max));
    }
    let hi = grad_bounds.iter().copied().fold(0.0, f64::max);
    let lo = grad_bounds.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GradientStability {
        grids: grids.to_vec(),
        grad_bounds,
        relative_spread: if hi > 0.0 { (hi - lo) / hi } else { 0.0 },
    })
}
