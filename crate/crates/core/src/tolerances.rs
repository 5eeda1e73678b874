//! Numerical thresholds shared across the pipeline.

use serde::{Deserialize, Serialize};

/// Speed below which a curve counts as singular.
pub const TOL_SPEED: f64 = 1e-9;
/// Allowed deviation of `|d1|` from one on the grid.
pub const TOL_UNIT: f64 = 1e-8;
/// Planarity threshold, relative to total length.
pub const TOL_PLANAR: f64 = 1e-8;
/// Projection identity of the lift.
pub const TOL_PROJ: f64 = 1e-9;
/// Longest run of zero samples still treated as an isolated zero.
pub const MAX_ZERO_RUN: usize = 3;
/// Largest offset, in grid steps, used for one-sided limits.
pub const LIMIT_WINDOW_STEPS: usize = 256;
/// Residuals at or below this are treated as round-off in order estimates.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// User-adjustable tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Curvature below this counts as zero.
    pub kappa: f64,
    /// Cauchy tolerance for one-sided angle limits.
    pub limit: f64,
    /// Agreement of one-sided derivatives of the lifted angle.
    pub c1: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { kappa: 1e-7, limit: 1e-3, c1: 1e-2 }
    }
}
