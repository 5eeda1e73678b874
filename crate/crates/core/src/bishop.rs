//! Relatively parallel frames, the normal development, and reconstruction
//! of a curve from a prescribed development.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::curve::{reparametrize_arclength, ArcLengthCurve, CurveError, CurveJet, CurveKind, CurveSpec};
use crate::frenet::{frenet_from_jet, is_planar};
use crate::scalar::Scalar;
use crate::vec3::{RigidMotion, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BishopError {
    #[error("curvature vanishes on the whole grid; no base point for the frame")]
    NoBasePoint,
    #[error("grid index {index} is not an admissible base point")]
    InadmissibleBase { index: usize },
    #[error("normal development has a non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("normal development needs at least 2 samples")]
    TooShort,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Planar,
    Nonplanar,
    /// Supplied directly by the caller.
    Seeded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialFrame<S> {
    pub base_index: usize,
    pub m1: Vec3<S>,
    pub m2: Vec3<S>,
    pub kind: BaseKind,
}

impl<S: Scalar> InitialFrame<S> {
    pub fn seeded(base_index: usize, m1: Vec3<S>, m2: Vec3<S>) -> Self {
        Self { base_index, m1, m2, kind: BaseKind::Seeded }
    }
}

/// Frame at the first grid index whose curvature exceeds `tol_kappa`.
pub fn initial_frame<S: Scalar>(
    curve: &ArcLengthCurve<S>,
    jets: &[CurveJet<S>],
    tol_kappa: S,
) -> Result<InitialFrame<S>, BishopError> {
    let base = jets.iter().position(|j| j.d2.norm() > tol_kappa).ok_or(BishopError::NoBasePoint)?;
    initial_frame_at(curve, jets, base, tol_kappa)
}

/// Frame at a chosen base index (which must have nonzero curvature).
pub fn initial_frame_at<S: Scalar>(
    curve: &ArcLengthCurve<S>,
    jets: &[CurveJet<S>],
    base: usize,
    tol_kappa: S,
) -> Result<InitialFrame<S>, BishopError> {
    let j = jets.get(base).ok_or(BishopError::InadmissibleBase { index: base })?;
    let f = frenet_from_jet(j, tol_kappa);
    let (Some(n), Some(b)) = (f.n_f, f.b_f) else {
        return Err(BishopError::InadmissibleBase { index: base });
    };
    Ok(match is_planar(curve, jets) {
        Some(plane) => {
            let m1 = plane.good_normal(f.t);
            InitialFrame { base_index: base, m1, m2: f.t.cross(m1), kind: BaseKind::Planar }
        }
        None => InitialFrame { base_index: base, m1: n, m2: b, kind: BaseKind::Nonplanar },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BishopField<S> {
    pub s: Vec<S>,
    pub t: Vec<Vec3<S>>,
    pub m1: Vec<Vec3<S>>,
    pub m2: Vec<Vec3<S>>,
    pub k1: Vec<S>,
    pub k2: Vec<S>,
    pub base_index: usize,
    pub base_kind: BaseKind,
    /// Largest orthonormality defect seen before each per-step correction.
    pub max_drift: S,
}

impl<S: Scalar> BishopField<S> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn development(&self) -> NormalDevelopment<S> {
        NormalDevelopment { s: self.s.clone(), k1: self.k1.clone(), k2: self.k2.clone() }
    }
}

/// Bishop's normal development: `(k1, k2)` per arclength sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalDevelopment<S> {
    pub s: Vec<S>,
    pub k1: Vec<S>,
    pub k2: Vec<S>,
}

impl<S: Scalar> NormalDevelopment<S> {
    pub fn new(s: Vec<S>, k1: Vec<S>, k2: Vec<S>) -> Result<Self, BishopError> {
        assert!(s.len() == k1.len() && s.len() == k2.len(), "column lengths differ");
        if s.len() < 2 {
            return Err(BishopError::TooShort);
        }
        for i in 0..s.len() {
            if !(s[i].is_finite() && k1[i].is_finite() && k2[i].is_finite()) {
                return Err(BishopError::NonFinite(i));
            }
        }
        Ok(Self { s, k1, k2 })
    }

    /// Project polar samples `(r cos th, r sin th)`.
    pub fn from_polar(s: Vec<S>, r: &[S], theta: &[S]) -> Result<Self, BishopError> {
        let (k1, k2) = r.iter().zip(theta).map(|(&r, &th)| (r * th.cos(), r * th.sin())).unzip();
        Self::new(s, k1, k2)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn point(&self, i: usize) -> [S; 2] {
        [self.k1[i], self.k2[i]]
    }

    pub fn norm(&self, i: usize) -> S {
        self.k1[i].hypot(self.k2[i])
    }

    pub fn max_diff(&self, other: &Self) -> S {
        self.k1
            .iter()
            .zip(&self.k2)
            .zip(other.k1.iter().zip(&other.k2))
            .fold(S::zero(), |m, ((a1, a2), (b1, b2))| m.max((*a1 - *b1).hypot(*a2 - *b2)))
    }
}

fn rk4_transport<S: Scalar>(m: Vec3<S>, h: S, j0: &CurveJet<S>, jm: &CurveJet<S>, j1: &CurveJet<S>) -> Vec3<S> {
    let f = |j: &CurveJet<S>, m: Vec3<S>| j.d1 * (-j.d2.dot(m));
    let half = h * S::half();
    let a = f(j0, m);
    let b = f(jm, m + a * half);
    let c = f(jm, m + b * half);
    let d = f(j1, m + c * h);
    m + (a + (b + c) * S::two() + d) * (h / S::lit(6.0))
}

/// Integrate the frame both ways from the base index, re-orthonormalizing
/// against the exact tangent after every step.
pub fn transport<S: Scalar>(
    curve: &ArcLengthCurve<S>,
    jets: &[CurveJet<S>],
    init: InitialFrame<S>,
) -> Result<BishopField<S>, BishopError> {
    let n = jets.len();
    let base = init.base_index;
    if base >= n {
        return Err(BishopError::InadmissibleBase { index: base });
    }
    let t: Vec<Vec3<S>> = jets.iter().map(|j| j.d1.normalize()).collect();
    let mut m1 = vec![Vec3::zero(); n];
    let mut m2 = vec![Vec3::zero(); n];
    m1[base] = init.m1;
    m2[base] = init.m2;
    let mut drift = S::zero();
    let mut step = |from: usize, to: usize, m1: &mut [Vec3<S>], m2: &mut [Vec3<S>]| -> Result<(), BishopError> {
        let (j0, j1) = (&jets[from], &jets[to]);
        let jm = curve.jet((j0.s + j1.s) * S::half())?;
        let h = j1.s - j0.s;
        let a = rk4_transport(m1[from], h, j0, &jm, j1);
        let b = rk4_transport(m2[from], h, j0, &jm, j1);
        let tt = t[to];
        let defect = a.dot(tt).abs()
            .max(b.dot(tt).abs())
            .max(a.dot(b).abs())
            .max((a.norm() - S::one()).abs())
            .max((b.norm() - S::one()).abs());
        drift = drift.max(defect);
        let a = (a - tt * a.dot(tt)).normalize();
        m1[to] = a;
        m2[to] = tt.cross(a);
        Ok(())
    };
    for i in base..n.saturating_sub(1) {
        step(i, i + 1, &mut m1, &mut m2)?;
    }
    for i in (1..=base).rev() {
        step(i, i - 1, &mut m1, &mut m2)?;
    }
    let k1 = jets.iter().zip(&m1).map(|(j, m)| j.d2.dot(*m)).collect();
    let k2 = jets.iter().zip(&m2).map(|(j, m)| j.d2.dot(*m)).collect();
    Ok(BishopField {
        s: jets.iter().map(|j| j.s).collect(),
        t,
        m1,
        m2,
        k1,
        k2,
        base_index: base,
        base_kind: init.kind,
        max_drift: drift,
    })
}

/// Starting point and frame for [`reconstruct`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed<S> {
    pub position: Vec3<S>,
    pub t: Vec3<S>,
    pub m1: Vec3<S>,
    pub m2: Vec3<S>,
}

impl<S: Scalar> Default for Seed<S> {
    fn default() -> Self {
        Self { position: Vec3::zero(), t: Vec3::unit_x(), m1: Vec3::unit_y(), m2: Vec3::unit_z() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct FrameState<S> {
    gamma: Vec3<S>,
    t: Vec3<S>,
    m1: Vec3<S>,
    m2: Vec3<S>,
}

impl<S: Scalar> FrameState<S> {
    fn axpy(&self, h: S, d: &Self) -> Self {
        Self { gamma: self.gamma + d.gamma * h, t: self.t + d.t * h, m1: self.m1 + d.m1 * h, m2: self.m2 + d.m2 * h }
    }

    fn orthonormalized(self) -> Self {
        let t = self.t.normalize();
        let m1 = (self.m1 - t * self.m1.dot(t)).normalize();
        Self { gamma: self.gamma, t, m1, m2: t.cross(m1) }
    }
}

/// A unit-speed curve integrated from a normal development.
///
/// `(k1, k2)` is interpolated by a cubic Hermite spline with three-point
/// slopes; between knots the curve is one RK4 step from the left knot, the
/// same step that produced the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopedCurve<S> {
    s: Vec<S>,
    k: Vec<[S; 2]>,
    dk: Vec<[S; 2]>,
    states: Vec<FrameState<S>>,
}

fn knot_slopes<S: Scalar>(s: &[S], k: &[[S; 2]]) -> Vec<[S; 2]> {
    let n = s.len();
    if n == 2 {
        let d = [(k[1][0] - k[0][0]) / (s[1] - s[0]), (k[1][1] - k[0][1]) / (s[1] - s[0])];
        return vec![d, d];
    }
    // Three-point derivative of the quadratic through (i-1, i, i+1), or the
    // one-sided version at the ends.
    let quad = |a: usize, at: usize| -> [S; 2] {
        let (x0, x1, x2) = (s[a], s[a + 1], s[a + 2]);
        let x = s[at];
        let w0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
        let w1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
        let w2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
        [0, 1].map(|c| w0 * k[a][c] + w1 * k[a + 1][c] + w2 * k[a + 2][c])
    };
    (0..n).map(|i| quad(i.clamp(1, n - 2) - 1, i)).collect()
}

impl<S: Scalar> DevelopedCurve<S> {
    fn build(nd: &NormalDevelopment<S>, seed: Seed<S>) -> Self {
        let k: Vec<[S; 2]> = (0..nd.len()).map(|i| nd.point(i)).collect();
        let dk = knot_slopes(&nd.s, &k);
        let mut me = Self { s: nd.s.clone(), k, dk, states: Vec::with_capacity(nd.len()) };
        let mut st = FrameState { gamma: seed.position, t: seed.t, m1: seed.m1, m2: seed.m2 }.orthonormalized();
        me.states.push(st);
        for i in 0..nd.len() - 1 {
            st = me.step(i, st, me.s[i + 1] - me.s[i]);
            me.states.push(st);
        }
        me
    }

    /// Hermite interpolant of the development and its derivative on interval `i`.
    fn interp(&self, i: usize, s: S) -> ([S; 2], [S; 2]) {
        let h = self.s[i + 1] - self.s[i];
        let u = (s - self.s[i]) / h;
        let (u2, u3) = (u * u, u * u * u);
        let (two, three, six) = (S::two(), S::lit(3.0), S::lit(6.0));
        let h00 = two * u3 - three * u2 + S::one();
        let h10 = u3 - two * u2 + u;
        let h01 = three * u2 - two * u3;
        let h11 = u3 - u2;
        let d00 = (six * u2 - six * u) / h;
        let d10 = three * u2 - S::lit(4.0) * u + S::one();
        let d01 = -d00;
        let d11 = three * u2 - two * u;
        let (p0, p1, m0, m1) = (self.k[i], self.k[i + 1], self.dk[i], self.dk[i + 1]);
        let v = [0, 1].map(|c| h00 * p0[c] + h10 * h * m0[c] + h01 * p1[c] + h11 * h * m1[c]);
        let d = [0, 1].map(|c| d00 * p0[c] + d10 * m0[c] + d01 * p1[c] + d11 * m1[c]);
        (v, d)
    }

    fn rhs(&self, i: usize, s: S, y: &FrameState<S>) -> FrameState<S> {
        let (k, _) = self.interp(i, s);
        FrameState {
            gamma: y.t,
            t: y.m1 * k[0] + y.m2 * k[1],
            m1: y.t * (-k[0]),
            m2: y.t * (-k[1]),
        }
    }

    fn step(&self, i: usize, y: FrameState<S>, h: S) -> FrameState<S> {
        let s0 = self.s[i];
        let half = h * S::half();
        let a = self.rhs(i, s0, &y);
        let b = self.rhs(i, s0 + half, &y.axpy(half, &a));
        let c = self.rhs(i, s0 + half, &y.axpy(half, &b));
        let d = self.rhs(i, s0 + h, &y.axpy(h, &c));
        let sixth = h / S::lit(6.0);
        let sum = FrameState {
            gamma: a.gamma + (b.gamma + c.gamma) * S::two() + d.gamma,
            t: a.t + (b.t + c.t) * S::two() + d.t,
            m1: a.m1 + (b.m1 + c.m1) * S::two() + d.m1,
            m2: a.m2 + (b.m2 + c.m2) * S::two() + d.m2,
        };
        y.axpy(sixth, &sum).orthonormalized()
    }

    pub fn s_range(&self) -> (S, S) {
        (self.s[0], *self.s.last().expect("non-empty"))
    }

    pub fn knots(&self) -> &[S] {
        &self.s
    }

    /// Frame `(T, M1, M2)` at knot `i`.
    pub fn knot_frame(&self, i: usize) -> (Vec3<S>, Vec3<S>, Vec3<S>) {
        let st = &self.states[i];
        (st.t, st.m1, st.m2)
    }

    pub fn jet_at(&self, s: S) -> Option<CurveJet<S>> {
        let (a, b) = self.s_range();
        let slack = (b - a) * S::epsilon() * S::lit(16.0);
        if !(s >= a - slack && s <= b + slack) {
            return None;
        }
        let s = s.max(a).min(b);
        let n = self.s.len();
        let (i, st, kd) = match self.s.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => (i.min(n - 2), self.states[i], (self.k[i], self.dk[i])),
            Err(j) => {
                let i = j.clamp(1, n - 1) - 1;
                (i, self.step(i, self.states[i], s - self.s[i]), self.interp(i, s))
            }
        };
        let _ = i;
        let (k, dk) = kd;
        let d2 = st.m1 * k[0] + st.m2 * k[1];
        let d3 = st.m1 * dk[0] + st.m2 * dk[1] - st.t * (k[0] * k[0] + k[1] * k[1]);
        Some(CurveJet { s, gamma: st.gamma, d1: st.t, d2, d3 })
    }

    pub fn transformed(&self, m: &RigidMotion<S>) -> Self {
        let states = self
            .states
            .iter()
            .map(|st| FrameState {
                gamma: m.apply(st.gamma),
                t: m.rotate(st.t),
                m1: m.rotate(st.m1),
                m2: m.rotate(st.m2),
            })
            .collect();
        Self { s: self.s.clone(), k: self.k.clone(), dk: self.dk.clone(), states }
    }
}

/// Integrate `gamma' = T, T' = k1 M1 + k2 M2, Mi' = -ki T` from `seed` at
/// the first development sample. The grid of the result is the
/// development's own grid.
pub fn reconstruct<S: Scalar>(
    nd: &NormalDevelopment<S>,
    seed: Seed<S>,
) -> Result<ArcLengthCurve<S>, BishopError> {
    if nd.len() < 2 {
        return Err(BishopError::TooShort);
    }
    let dev = DevelopedCurve::build(nd, seed);
    let spec = CurveSpec {
        name: "reconstructed".into(),
        kind: CurveKind::Developed(Arc::new(dev)),
        planar_hint: None,
        interpolation: Some("cubic Hermite development, RK4"),
    };
    Ok(reparametrize_arclength(spec, nd.len())?)
}

/// The seed frame of a reconstructed curve, as a transport initial frame.
pub fn seeded_frame<S: Scalar>(curve: &ArcLengthCurve<S>, index: usize) -> Option<InitialFrame<S>> {
    match &curve.source().kind {
        CurveKind::Developed(d) => {
            let (_, m1, m2) = d.knot_frame(index);
            Some(InitialFrame::seeded(index, m1, m2))
        }
        _ => None,
    }
}
