//! End-to-end runs: curve to Beta frame, development to lift, and the
//! two-grid residual check.

use std::ops::Range;

use crate::beta::{assemble, frenet_residuals, BetaError, BetaField, OrderReport, Residuals};
use crate::bishop::{initial_frame, initial_frame_at, transport, BishopField, InitialFrame, NormalDevelopment};
use crate::curve::{reparametrize_arclength, ArcLengthCurve, CurveJet, CurveSpec};
use crate::error::Error;
use crate::frenet::{frenet_field, planar_from_jet, is_planar, FrenetSample, Plane, PlanarSample};
use crate::lift::{lift, LiftAnalysis, PolarLift};
use crate::scalar::Scalar;
use crate::tolerances::Tolerances;

/// Grid size used when none is given: about 2000 samples per unit length,
/// odd so that symmetric curves put their midpoint on the grid.
pub fn default_samples<S: Scalar>(length: S) -> usize {
    let n = (length.to_f64_lossy() * 2000.0).round().max(16.0) as usize + 1;
    if n.is_multiple_of(2) { n + 1 } else { n }
}

/// Arclength curve on `samples` points, or the default density.
pub fn prepare<S: Scalar>(spec: CurveSpec<S>, samples: Option<usize>) -> Result<ArcLengthCurve<S>, Error> {
    match samples {
        Some(n) => Ok(reparametrize_arclength(spec, n)?),
        None => {
            let probe = reparametrize_arclength(spec.clone(), 257)?;
            let n = default_samples(probe.total_length());
            Ok(reparametrize_arclength(spec, n)?)
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameRun<S> {
    pub curve: ArcLengthCurve<S>,
    pub jets: Vec<CurveJet<S>>,
    pub frenet: Vec<FrenetSample<S>>,
    pub planar: Option<(Plane<S>, Vec<PlanarSample<S>>)>,
    pub bishop: BishopField<S>,
    pub development: NormalDevelopment<S>,
    pub analysis: LiftAnalysis<S>,
    pub lift: PolarLift<S>,
    pub beta: Result<BetaField<S>, BetaError>,
}

impl<S: Scalar> FrameRun<S> {
    pub fn beta(&self) -> Result<&BetaField<S>, Error> {
        self.beta.as_ref().map_err(|e| Error::Beta(e.clone()))
    }
}

/// Zero samples with their differentiability flag, for torsion.
pub fn zero_samples<S: Scalar>(analysis: &LiftAnalysis<S>) -> Vec<(Range<usize>, bool)> {
    analysis.zeros.iter().map(|z| (z.zero.zero_samples(), z.c1.unwrap_or(false))).collect()
}

/// Every frame of an arclength curve, up to the Beta frame.
pub fn frame_curve<S: Scalar>(
    curve: ArcLengthCurve<S>,
    tol: &Tolerances,
    base: Option<usize>,
) -> Result<FrameRun<S>, Error> {
    let jets = curve.grid_jets()?;
    let tk = S::lit(tol.kappa);
    let init = match base {
        Some(b) => initial_frame_at(&curve, &jets, b, tk)?,
        None => initial_frame(&curve, &jets, tk)?,
    };
    frame_with(curve, jets, init, tol)
}

/// As [`frame_curve`], with an explicit initial frame.
pub fn frame_with<S: Scalar>(
    curve: ArcLengthCurve<S>,
    jets: Vec<CurveJet<S>>,
    init: InitialFrame<S>,
    tol: &Tolerances,
) -> Result<FrameRun<S>, Error> {
    let frenet = frenet_field(&jets, S::lit(tol.kappa));
    let planar = is_planar(&curve, &jets).map(|p| {
        let f = jets.iter().map(|j| planar_from_jet(j, &p)).collect();
        (p, f)
    });
    let bishop = transport(&curve, &jets, init)?;
    let development = bishop.development();
    let (analysis, lift) = lift(&development, Some(bishop.base_index), tol);
    let beta = assemble(&bishop, &lift, &zero_samples(&analysis));
    Ok(FrameRun { curve, jets, frenet, planar, bishop, development, analysis, lift, beta })
}

pub fn run_frame<S: Scalar>(
    spec: CurveSpec<S>,
    samples: Option<usize>,
    tol: &Tolerances,
) -> Result<FrameRun<S>, Error> {
    frame_curve(prepare(spec, samples)?, tol, None)
}

/// Residuals on one grid; fails when no Beta frame exists.
pub fn residuals<S: Scalar>(spec: CurveSpec<S>, samples: usize, tol: &Tolerances) -> Result<Residuals<S>, Error> {
    let run = run_frame(spec, Some(samples), tol)?;
    Ok(frenet_residuals(run.beta()?))
}

/// Two-grid study of the frame-equation residuals.
pub fn check<S: Scalar>(
    spec: CurveSpec<S>,
    coarse: usize,
    fine: usize,
    tol: &Tolerances,
) -> Result<OrderReport<S>, Error> {
    let a = residuals(spec.clone(), coarse, tol)?;
    let b = residuals(spec, fine, tol)?;
    Ok(OrderReport::new(a, b))
}
