//! The Beta frame: a normal that stays continuous through isolated
//! curvature zeros, with signed curvature and torsion.

use serde::Serialize;
use thiserror::Error;

use crate::bishop::BishopField;
use crate::curve::CurveJet;
use crate::lift::{PolarLift, Reason, Verdict};
use crate::scalar::Scalar;
use crate::tolerances::RESIDUAL_FLOOR;
use crate::vec3::Vec3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BetaError {
    #[error("no Beta frame: development not liftable at s = {s0} ({}{})", reason.describe(), mismatch.map(|m| format!(", mismatch {m:.6} rad")).unwrap_or_default())]
    NotLiftable { reason: Reason, s0: f64, mismatch: Option<f64> },
    #[error("no Beta frame: development vanishes on a stretch near s = {s0}")]
    Unsupported { s0: f64 },
    #[error("Bishop field and lift use different grids")]
    GridMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaField<S> {
    pub s: Vec<S>,
    pub t: Vec<Vec3<S>>,
    pub n: Vec<Vec3<S>>,
    pub b: Vec<Vec3<S>>,
    pub kappa: Vec<S>,
    pub tau: Vec<Option<S>>,
    pub base_index: usize,
}

impl<S: Scalar> BetaField<S> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// `d theta / ds` by central differences (second-order one-sided at the
/// ends); absent on zero samples where the angle is not differentiable.
pub fn differentiate_lift<S: Scalar>(lift: &PolarLift<S>, zero_samples: &[(std::ops::Range<usize>, bool)]) -> Vec<Option<S>> {
    let (s, th) = (&lift.s, &lift.theta_tilde);
    let n = s.len();
    let mut tau: Vec<Option<S>> = (0..n)
        .map(|i| {
            if n < 3 {
                return Some((th[n - 1] - th[0]) / (s[n - 1] - s[0]));
            }
            let (a, b, c, at) = match i {
                0 => (0, 1, 2, 0),
                i if i == n - 1 => (n - 3, n - 2, n - 1, n - 1),
                i => (i - 1, i, i + 1, i),
            };
            Some(three_point(s[a], s[b], s[c], th[a], th[b], th[c], s[at]))
        })
        .collect();
    for (range, c1) in zero_samples {
        if !c1 {
            for i in range.clone() {
                tau[i] = None;
            }
        }
    }
    tau
}

fn three_point<S: Scalar>(x0: S, x1: S, x2: S, y0: S, y1: S, y2: S, x: S) -> S {
    let w0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    let w1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    let w2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    w0 * y0 + w1 * y1 + w2 * y2
}

/// `N = cos th M1 + sin th M2`, `B = -sin th M1 + cos th M2`, `kappa = r`.
pub fn assemble<S: Scalar>(
    field: &BishopField<S>,
    lift: &PolarLift<S>,
    zero_samples: &[(std::ops::Range<usize>, bool)],
) -> Result<BetaField<S>, BetaError> {
    match lift.verdict {
        Verdict::Liftable => {}
        Verdict::NotLiftable { reason, s0, mismatch, .. } => {
            return Err(BetaError::NotLiftable {
                reason,
                s0: s0.to_f64_lossy(),
                mismatch: mismatch.map(|m| m.to_f64_lossy()),
            })
        }
        Verdict::Unsupported { s0, .. } => return Err(BetaError::Unsupported { s0: s0.to_f64_lossy() }),
    }
    if field.s != lift.s {
        return Err(BetaError::GridMismatch);
    }
    let (n, b): (Vec<_>, Vec<_>) = (0..field.len())
        .map(|i| {
            let (sn, cs) = lift.theta_tilde[i].sin_cos();
            (field.m1[i] * cs + field.m2[i] * sn, field.m2[i] * cs - field.m1[i] * sn)
        })
        .unzip();
    Ok(BetaField {
        s: field.s.clone(),
        t: field.t.clone(),
        n,
        b,
        kappa: lift.r_tilde.clone(),
        tau: differentiate_lift(lift, zero_samples),
        base_index: lift.base_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals<S> {
    /// `T' - kappa N`
    pub tangent: S,
    /// `N' + kappa T - tau B`
    pub normal: S,
    /// `B' + tau N`
    pub binormal: S,
    /// Grid step the residuals were measured at.
    pub h: S,
}

impl<S: Scalar> Residuals<S> {
    pub fn max(&self) -> S {
        self.tangent.max(self.normal).max(self.binormal)
    }

    pub fn as_array(&self) -> [S; 3] {
        [self.tangent, self.normal, self.binormal]
    }
}

/// Max residuals of the three frame equations under central differences on
/// interior samples, skipping samples whose neighbors lack torsion.
pub fn frenet_residuals<S: Scalar>(beta: &BetaField<S>) -> Residuals<S> {
    let n = beta.len();
    let mut r = [S::zero(); 3];
    for i in 1..n.saturating_sub(1) {
        let Some(tau) = beta.tau[i] else { continue };
        let ds = beta.s[i + 1] - beta.s[i - 1];
        let d = |v: &[Vec3<S>]| (v[i + 1] - v[i - 1]) / ds;
        let k = beta.kappa[i];
        let e = [
            (d(&beta.t) - beta.n[i] * k).norm(),
            (d(&beta.n) + beta.t[i] * k - beta.b[i] * tau).norm(),
            (d(&beta.b) + beta.n[i] * tau).norm(),
        ];
        for c in 0..3 {
            r[c] = r[c].max(e[c]);
        }
    }
    let h = if n > 1 { (beta.s[n - 1] - beta.s[0]) / S::from_usize_lossy(n - 1) } else { S::zero() };
    Residuals { tangent: r[0], normal: r[1], binormal: r[2], h }
}

/// Observed convergence between a coarse and a fine run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderReport<S> {
    pub coarse: Residuals<S>,
    pub fine: Residuals<S>,
    /// Per equation `log(r_coarse / r_fine) / log(h_coarse / h_fine)`;
    /// `None` when both sit at round-off.
    pub order: [Option<S>; 3],
    pub ratio: [Option<S>; 3],
}

impl<S: Scalar> OrderReport<S> {
    pub fn new(coarse: Residuals<S>, fine: Residuals<S>) -> Self {
        let floor = S::lit(RESIDUAL_FLOOR);
        let hr = (coarse.h / fine.h).ln();
        let (c, f) = (coarse.as_array(), fine.as_array());
        let ratio = [0, 1, 2].map(|k| (c[k] > floor || f[k] > floor).then(|| c[k] / f[k]));
        let order = ratio.map(|r| r.map(|r| r.ln() / hr));
        Self { coarse, fine, order, ratio }
    }

    /// Every equation converges at least at `min_order` (ratio compared for
    /// halving), or sits at round-off on both grids.
    pub fn satisfied(&self, min_ratio: S) -> bool {
        self.ratio.iter().all(|r| r.is_none_or(|r| r >= min_ratio))
    }
}

/// Check `kappa = <d2, N>` on the grid.
pub fn curvature_consistency<S: Scalar>(beta: &BetaField<S>, jets: &[CurveJet<S>]) -> S {
    jets.iter()
        .zip(beta.n.iter().zip(&beta.kappa))
        .fold(S::zero(), |m, (j, (n, k))| m.max((j.d2.dot(*n) - *k).abs()))
}
