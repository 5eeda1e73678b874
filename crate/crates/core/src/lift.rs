//! Continuous polar lift `(r, theta)` of a normal development through
//! isolated zeros.
//!
//! Away from zeros the lift is the unwrapped argument with `r = |k|`. At an
//! isolated zero the folded angle `theta_hat` (values in `(-pi/2, pi/2]`) must
//! have matching one-sided limits; the spans on either side are then glued
//! by a multiple of `pi`, flipping the sign of `r` when the development
//! passes straight through the origin.

use serde::Serialize;
use thiserror::Error;

use crate::bishop::NormalDevelopment;
use crate::scalar::Scalar;
use crate::tolerances::{Tolerances, LIMIT_WINDOW_STEPS, MAX_ZERO_RUN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("angle undefined at the origin")]
pub struct UndefinedAngle;

/// Folded argument of `(x, y)` in `(-pi/2, pi/2]`.
pub fn theta_hat<S: Scalar>(x: S, y: S) -> Result<S, UndefinedAngle> {
    if x == S::zero() {
        if y == S::zero() {
            return Err(UndefinedAngle);
        }
        return Ok(S::FRAC_PI_2());
    }
    Ok((y / x).atan())
}

/// Counter-clockwise quarter-pi rotation; takes the positive `y` axis to
/// the line of slope -1.
pub fn rotate_quarter<S: Scalar>(x: S, y: S) -> (S, S) {
    let c = S::FRAC_1_SQRT_2();
    (c * (x - y), c * (x + y))
}

fn rem_euclid<S: Scalar>(a: S, m: S) -> S {
    let r = a % m;
    if r < S::zero() { r + m } else { r }
}

/// Distance on the circle of angles modulo `pi`.
pub fn mod_pi_distance<S: Scalar>(a: S, b: S) -> S {
    let pi = S::PI();
    let d = rem_euclid(a - b, pi);
    d.min(pi - d)
}

fn wrap_pi<S: Scalar>(a: S) -> S {
    let two_pi = S::PI() * S::two();
    let w = rem_euclid(a + S::PI(), two_pi) - S::PI();
    if w == -S::PI() { S::PI() } else { w }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// One or more grid samples have norm at most `tol_kappa`.
    Sampled,
    /// The development passes the origin between two adjacent samples.
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRecord<S> {
    /// Inclusive index range of the zero samples; for a crossing, the two
    /// flanking samples.
    pub index_range: (usize, usize),
    pub s0: S,
    pub isolated: bool,
    pub kind: ZeroKind,
}

impl<S: Scalar> ZeroRecord<S> {
    /// Last nonzero sample before the zero.
    pub fn left(&self) -> Option<usize> {
        match self.kind {
            ZeroKind::Sampled => self.index_range.0.checked_sub(1),
            ZeroKind::Crossing => Some(self.index_range.0),
        }
    }

    /// First nonzero sample after the zero.
    pub fn right(&self, n: usize) -> Option<usize> {
        match self.kind {
            ZeroKind::Sampled => Some(self.index_range.1 + 1).filter(|&i| i < n),
            ZeroKind::Crossing => Some(self.index_range.1),
        }
    }

    /// Samples lying on the zero itself.
    pub fn zero_samples(&self) -> std::ops::Range<usize> {
        match self.kind {
            ZeroKind::Sampled => self.index_range.0..self.index_range.1 + 1,
            ZeroKind::Crossing => 0..0,
        }
    }
}

const FLANK: usize = 4;

/// Zero runs of the development, plus sub-grid passages through the origin.
pub fn find_zeros<S: Scalar>(nd: &NormalDevelopment<S>, tol_kappa: S) -> Vec<ZeroRecord<S>> {
    let n = nd.len();
    let norms: Vec<S> = (0..n).map(|i| nd.norm(i)).collect();
    let strong = tol_kappa * S::lit(10.0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if norms[i] > tol_kappa {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && norms[i] <= tol_kappa {
            i += 1;
        }
        let end = i - 1;
        let left_ok = start == 0 || (start >= FLANK && norms[start - FLANK..start].iter().all(|&v| v > strong));
        let right_ok = end + 1 == n || (end + FLANK < n && norms[end + 1..=end + FLANK].iter().all(|&v| v > strong));
        let touches_both = start == 0 && end + 1 == n;
        out.push(ZeroRecord {
            index_range: (start, end),
            s0: (nd.s[start] + nd.s[end]) * S::half(),
            isolated: end - start < MAX_ZERO_RUN && left_ok && right_ok && !touches_both,
            kind: ZeroKind::Sampled,
        });
    }
    let sampled: Vec<(usize, usize)> = out.iter().map(|z| z.index_range).collect();
    let near_sampled =
        |i: usize| sampled.iter().any(|&(a, b)| i + LIMIT_WINDOW_STEPS >= a && i <= b + LIMIT_WINDOW_STEPS);
    let min_turn = S::PI() * S::lit(2.0 / 3.0);
    for i in 0..n.saturating_sub(1) {
        if norms[i] <= tol_kappa || norms[i + 1] <= tol_kappa || near_sampled(i) {
            continue;
        }
        let (p, q) = (nd.point(i), nd.point(i + 1));
        let turn = wrap_pi(q[1].atan2(q[0]) - p[1].atan2(p[0])).abs();
        if turn <= min_turn {
            continue;
        }
        let d = [q[0] - p[0], q[1] - p[1]];
        let dd = d[0] * d[0] + d[1] * d[1];
        let lam = (-(p[0] * d[0] + p[1] * d[1]) / dd).max(S::zero()).min(S::one());
        let closest = (p[0] + lam * d[0]).hypot(p[1] + lam * d[1]);
        if closest <= S::lit(0.1) * norms[i].max(norms[i + 1]) {
            out.push(ZeroRecord {
                index_range: (i, i + 1),
                s0: nd.s[i] + lam * (nd.s[i + 1] - nd.s[i]),
                isolated: true,
                kind: ZeroKind::Crossing,
            });
        }
    }
    out.sort_by_key(|z| z.index_range.0);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

/// One-sided limits of `theta_hat` and of `theta_hat` after the quarter-pi rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideLimits<S> {
    pub theta_hat: Option<S>,
    pub theta_hat_rot: Option<S>,
    /// Point values near the zero sit on both sides of the fold.
    pub straddles_axis: bool,
}

/// Limit of a sequence sampled at geometrically shrinking offsets.
///
/// Accepts when the last three differences are within `tol`, first on the
/// Aitken-accelerated sequence (only where it contracts), then on the raw one.
pub fn extrapolate<S: Scalar>(e: &[S], tol: S) -> Option<S> {
    let cauchy = |v: &[S]| v.len() >= 4 && v[v.len() - 4..].windows(2).all(|w| (w[1] - w[0]).abs() <= tol);
    let mut acc = Vec::with_capacity(e.len());
    for w in e.windows(3) {
        let (d1, d2) = (w[1] - w[0], w[2] - w[1]);
        let a = if d1 == S::zero() && d2 == S::zero() {
            Some(w[2])
        } else if d1 != S::zero() && (d2 / d1).abs() < S::one() && d2 != d1 {
            Some(w[2] - d2 * d2 / (d2 - d1))
        } else {
            None
        };
        match a {
            Some(a) if a.is_finite() => acc.push(a),
            _ => acc.clear(),
        }
    }
    if cauchy(&acc) {
        return acc.last().copied();
    }
    if cauchy(e) {
        return e.last().copied();
    }
    None
}

/// Offsets `2^K, ..., 2, 1` (in samples) that fit `room` samples.
fn dyadic_offsets(room: usize, cap: usize) -> Option<Vec<usize>> {
    let mut top = 1usize;
    while top * 2 <= room.min(cap) {
        top *= 2;
    }
    if top < 8 {
        return None;
    }
    let mut v = Vec::new();
    let mut m = top;
    while m >= 1 {
        v.push(m);
        m /= 2;
    }
    Some(v)
}

/// Estimate one-sided limits at `zero` from point values and window means of
/// the folded angle.
pub fn one_sided_limits<S: Scalar>(
    nd: &NormalDevelopment<S>,
    zero: &ZeroRecord<S>,
    side: Side,
    tol: &Tolerances,
) -> SideLimits<S> {
    let absent = SideLimits { theta_hat: None, theta_hat_rot: None, straddles_axis: false };
    let n = nd.len();
    let (anchor, room) = match (side, zero.left(), zero.right(n)) {
        (Side::Plus, _, Some(r)) => (r - 1, n - r),
        (Side::Minus, Some(l), _) => (l + 1, l + 1),
        _ => return absent,
    };
    let Some(offsets) = dyadic_offsets(room, LIMIT_WINDOW_STEPS) else {
        return absent;
    };
    let at = |m: usize| match side {
        Side::Plus => anchor + m,
        Side::Minus => anchor - m,
    };
    let strong = S::lit(tol.kappa * 10.0);
    let mut raw = Vec::with_capacity(offsets.len());
    let mut rot = Vec::with_capacity(offsets.len());
    let mut window: Vec<(S, S)> = Vec::with_capacity(offsets[0]);
    for m in 1..=offsets[0] {
        let i = at(m);
        if nd.norm(i) > strong {
            let (x, y) = (nd.k1[i], nd.k2[i]);
            let (u, v) = rotate_quarter(x, y);
            window.push((theta_hat(x, y).expect("nonzero"), theta_hat(u, v).expect("nonzero")));
        } else {
            window.push((S::nan(), S::nan()));
        }
    }
    for &m in &offsets {
        let vals: Vec<&(S, S)> = window[..m].iter().filter(|v| !v.0.is_nan()).collect();
        if vals.is_empty() {
            break;
        }
        let k = S::from_usize_lossy(vals.len()).recip();
        raw.push(vals.iter().fold(S::zero(), |a, v| a + v.0) * k);
        rot.push(vals.iter().fold(S::zero(), |a, v| a + v.1) * k);
    }
    // Point values at the same offsets; these stay exactly geometric for
    // power-law approaches, where window means pick up discretization drift.
    // Weak samples right at the zero are dropped from the short end.
    let point = |pick: fn(&(S, S)) -> S| -> Option<Vec<(usize, S)>> {
        let mut v: Vec<(usize, S)> = offsets.iter().map(|&m| (m, pick(&window[m - 1]))).collect();
        while v.last().is_some_and(|p| p.1.is_nan()) {
            v.pop();
        }
        (!v.iter().any(|p| p.1.is_nan())).then_some(v)
    };
    let t = S::lit(tol.limit);
    // A crossing zero sits a fraction of a step beyond the anchor; move the
    // limit there along the chord to the nearest usable sample.
    let frac = match (zero.kind, side) {
        (ZeroKind::Sampled, _) => S::zero(),
        (ZeroKind::Crossing, Side::Plus) => (zero.s0 - nd.s[anchor]) / (nd.s[anchor + 1] - nd.s[anchor]),
        (ZeroKind::Crossing, Side::Minus) => (nd.s[anchor] - zero.s0) / (nd.s[anchor] - nd.s[anchor - 1]),
    };
    let limit = |pick: fn(&(S, S)) -> S, means: &[S]| {
        if let Some(p) = point(pick) {
            let vals: Vec<S> = p.iter().map(|q| q.1).collect();
            if let (Some(l), Some(&(m, first))) = (extrapolate(&vals, t), p.last()) {
                let w = frac / S::from_usize_lossy(m);
                return Some(if (first - l).abs() < S::FRAC_PI_2() { l + w * (first - l) } else { l });
            }
        }
        extrapolate(means, t)
    };
    let near = &window[..8.min(window.len())];
    let quarter = S::FRAC_PI_4();
    let straddles_axis =
        near.iter().any(|v| v.0 > quarter) && near.iter().any(|v| v.0 < -quarter);
    SideLimits { theta_hat: limit(|v| v.0, &raw), theta_hat_rot: limit(|v| v.1, &rot), straddles_axis }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
    Undefined,
}

/// Resolved one-sided angle (`pi/2` for the axis cases) and its case.
pub fn resolve_theta<S: Scalar>(lim: &SideLimits<S>, tol_limit: S) -> (Option<S>, CaseTag) {
    let half_pi = S::FRAC_PI_2();
    if let Some(t) = lim.theta_hat {
        if t.abs() < half_pi - tol_limit {
            return (Some(t), CaseTag::Case1);
        }
    }
    if let Some(r) = lim.theta_hat_rot {
        if (r + S::FRAC_PI_4()).abs() <= tol_limit {
            let tag = if lim.theta_hat.is_some() { CaseTag::Case2 } else { CaseTag::Case3 };
            return (Some(half_pi), tag);
        }
        // Off the axis but close enough that samples fold across it.
        let t = r - S::FRAC_PI_4();
        let t = t - S::PI() * (t / S::PI()).round();
        if t.abs() < half_pi - tol_limit {
            return (Some(t), CaseTag::Case1);
        }
    }
    (None, CaseTag::Undefined)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    ThetaPlusAbsent,
    ThetaMinusAbsent,
    Mismatch,
    /// Neither the folded nor the rotated angle settles; the development
    /// oscillates across both axes.
    AxisOscillation,
    /// Adjacent lifted angles jump by more than `pi/2`; the grid is too coarse.
    Underresolved,
}

impl Reason {
    pub fn describe(self) -> &'static str {
        match self {
            Reason::ThetaPlusAbsent => "theta_plus absent",
            Reason::ThetaMinusAbsent => "theta_minus absent",
            Reason::Mismatch => "theta_plus and theta_minus differ",
            Reason::AxisOscillation => "oscillation across both axes",
            Reason::Underresolved => "grid too coarse for a continuous angle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict<S> {
    Liftable,
    NotLiftable {
        reason: Reason,
        zero: usize,
        s0: S,
        /// `|theta_plus - theta_minus|` modulo `pi`, when both exist.
        mismatch: Option<S>,
    },
    /// The development vanishes on a stretch, not at isolated points.
    Unsupported { zero: usize, s0: S },
}

impl<S: Scalar> Verdict<S> {
    pub fn is_liftable(&self) -> bool {
        matches!(self, Verdict::Liftable)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroAnalysis<S> {
    pub zero: ZeroRecord<S>,
    pub theta_hat_plus: Option<S>,
    pub theta_hat_minus: Option<S>,
    pub theta_hat_rot_plus: Option<S>,
    pub theta_hat_rot_minus: Option<S>,
    pub theta_plus: Option<S>,
    pub theta_minus: Option<S>,
    pub case_plus: CaseTag,
    pub case_minus: CaseTag,
    pub case_tag: CaseTag,
    pub mismatch: Option<S>,
    /// Glue offset modulo `2 pi`: 0 or `pi`.
    pub j_offset: Option<S>,
    /// Both branch choices were close; the smaller jump was taken.
    pub ambiguous_branch: bool,
    pub c1: Option<bool>,
    pub derivative_plus: Option<S>,
    pub derivative_minus: Option<S>,
    #[serde(skip)]
    straddle: (bool, bool),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftAnalysis<S> {
    pub zeros: Vec<ZeroAnalysis<S>>,
}

/// Limits and case analysis at every isolated zero.
pub fn analyze<S: Scalar>(nd: &NormalDevelopment<S>, tol: &Tolerances) -> LiftAnalysis<S> {
    let tl = S::lit(tol.limit);
    let zeros = find_zeros(nd, S::lit(tol.kappa))
        .into_iter()
        .map(|z| {
            let (p, m) = if z.isolated {
                (one_sided_limits(nd, &z, Side::Plus, tol), one_sided_limits(nd, &z, Side::Minus, tol))
            } else {
                let none = SideLimits { theta_hat: None, theta_hat_rot: None, straddles_axis: false };
                (none, none)
            };
            let (tp, cp) = resolve_theta(&p, tl);
            let (tm, cm) = resolve_theta(&m, tl);
            let mismatch = tp.zip(tm).map(|(a, b)| mod_pi_distance(a, b));
            ZeroAnalysis {
                zero: z,
                theta_hat_plus: p.theta_hat,
                theta_hat_minus: m.theta_hat,
                theta_hat_rot_plus: p.theta_hat_rot,
                theta_hat_rot_minus: m.theta_hat_rot,
                theta_plus: tp,
                theta_minus: tm,
                case_plus: cp,
                case_minus: cm,
                case_tag: cp.max(cm),
                mismatch,
                j_offset: None,
                ambiguous_branch: false,
                c1: None,
                derivative_plus: None,
                derivative_minus: None,
                straddle: (p.straddles_axis, m.straddles_axis),
            }
        })
        .collect();
    LiftAnalysis { zeros }
}

fn verdict_of<S: Scalar>(a: &LiftAnalysis<S>, n: usize, tol_limit: S) -> Verdict<S> {
    for (k, z) in a.zeros.iter().enumerate() {
        let s0 = z.zero.s0;
        if !z.zero.isolated {
            return Verdict::Unsupported { zero: k, s0 };
        }
        let has_left = z.zero.left().is_some();
        let has_right = z.zero.right(n).is_some();
        let fail = |reason| Verdict::NotLiftable { reason, zero: k, s0, mismatch: z.mismatch };
        if has_right && z.theta_plus.is_none() {
            return fail(if z.straddle.0 && z.theta_hat_rot_plus.is_none() {
                Reason::AxisOscillation
            } else {
                Reason::ThetaPlusAbsent
            });
        }
        if has_left && z.theta_minus.is_none() {
            return fail(if z.straddle.1 && z.theta_hat_rot_minus.is_none() {
                Reason::AxisOscillation
            } else {
                Reason::ThetaMinusAbsent
            });
        }
        if let Some(d) = z.mismatch {
            if d > tol_limit {
                return fail(Reason::Mismatch);
            }
        }
    }
    Verdict::Liftable
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarLift<S> {
    pub s: Vec<S>,
    pub r_tilde: Vec<S>,
    pub theta_tilde: Vec<S>,
    pub base_index: usize,
    pub verdict: Verdict<S>,
    /// Per zero, whether the lifted angle is differentiable there.
    pub c1_flags: Vec<bool>,
}

impl<S: Scalar> PolarLift<S> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Largest distance between `(r cos th, r sin th)` and the development.
    pub fn projection_error(&self, nd: &NormalDevelopment<S>) -> S {
        (0..self.len()).fold(S::zero(), |m, i| {
            let (s, c) = self.theta_tilde[i].sin_cos();
            let r = self.r_tilde[i];
            m.max((r * c - nd.k1[i]).hypot(r * s - nd.k2[i]))
        })
    }

    /// The other lift: `r` negated, `theta` shifted by `pi`.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        out.r_tilde.iter_mut().for_each(|r| *r = -*r);
        out.theta_tilde.iter_mut().for_each(|t| *t = *t + S::PI());
        out
    }
}

fn shift<S: Scalar>(r: &mut [S], th: &mut [S], k: i64) {
    if k == 0 {
        return;
    }
    let d = S::PI() * S::lit(k as f64);
    for t in th.iter_mut() {
        *t = *t + d;
    }
    if k % 2 != 0 {
        for v in r.iter_mut() {
            *v = -*v;
        }
    }
}

fn nearest_rep<S: Scalar>(limit: S, near: S) -> S {
    limit + S::PI() * ((near - limit) / S::PI()).round()
}

/// Glue the unwrapped spans at each zero and normalize at the base sample.
///
/// `base` defaults to the first nonzero sample; the angle there equals
/// `theta_hat` of the development.
pub fn build_lift<S: Scalar>(
    nd: &NormalDevelopment<S>,
    analysis: &mut LiftAnalysis<S>,
    base: Option<usize>,
    tol: &Tolerances,
) -> PolarLift<S> {
    let n = nd.len();
    let tol_kappa = S::lit(tol.kappa);
    let mut verdict = verdict_of(analysis, n, S::lit(tol.limit));
    let mut is_zero = vec![false; n];
    let mut cut_after = vec![false; n];
    for z in &analysis.zeros {
        for i in z.zero.zero_samples() {
            is_zero[i] = true;
        }
        if z.zero.kind == ZeroKind::Crossing {
            cut_after[z.zero.index_range.0] = true;
        }
    }
    // Non-analyzed small samples (inside a zero's window) still need an angle.
    let mut r = vec![S::zero(); n];
    let mut th = vec![S::nan(); n];
    let mut span_start = vec![usize::MAX; n];
    let mut i = 0;
    while i < n {
        if is_zero[i] {
            i += 1;
            continue;
        }
        let start = i;
        let mut prev = S::nan();
        let mut acc = S::zero();
        while i < n && !is_zero[i] {
            let (x, y) = (nd.k1[i], nd.k2[i]);
            let a = y.atan2(x);
            acc = if prev.is_nan() { a } else { acc + wrap_pi(a - prev) };
            if nd.norm(i) > S::zero() {
                prev = a;
            }
            th[i] = acc;
            r[i] = nd.norm(i);
            span_start[i] = start;
            i += 1;
            if cut_after[i - 1] {
                break;
            }
        }
    }

    for z in analysis.zeros.iter_mut() {
        let (Some(a), Some(b)) = (z.zero.left(), z.zero.right(n)) else {
            continue;
        };
        let la = z.theta_minus.map_or(th[a], |t| nearest_rep(t, th[a]));
        let lb = z.theta_plus.map_or(th[b], |t| nearest_rep(t, th[b]));
        let q = (la - lb) / S::PI();
        let k = q.round();
        z.ambiguous_branch = (q - k).abs() > S::lit(0.25);
        let k = k.to_i64().unwrap_or(0);
        z.j_offset = Some(if k % 2 == 0 { S::zero() } else { S::PI() });
        let end = (b..n).find(|&i| span_start[i] != b).unwrap_or(n);
        shift(&mut r[b..end], &mut th[b..end], k);
        // zero samples: interpolate the glued flank angles
        let zs = z.zero.zero_samples();
        let (ta, tb) = (th[a], th[b]);
        for i in zs {
            let w = (nd.s[i] - nd.s[a]) / (nd.s[b] - nd.s[a]);
            th[i] = ta + (tb - ta) * w;
        }
    }
    // zeros touching the ends take the angle of their only neighbor
    for z in &analysis.zeros {
        let (left, right) = (z.zero.left(), z.zero.right(n));
        let fill = match (left, right) {
            (None, Some(b)) => Some(z.theta_plus.map_or(th[b], |t| nearest_rep(t, th[b]))),
            (Some(a), None) => Some(z.theta_minus.map_or(th[a], |t| nearest_rep(t, th[a]))),
            (None, None) => Some(S::zero()),
            _ => None,
        };
        if let Some(v) = fill {
            for i in z.zero.zero_samples() {
                th[i] = v;
            }
        }
    }
    for i in 0..n {
        if is_zero[i] {
            let (s, c) = th[i].sin_cos();
            r[i] = nd.k1[i] * c + nd.k2[i] * s;
        }
    }

    let base = base
        .filter(|&b| b < n && nd.norm(b) > tol_kappa)
        .or_else(|| (0..n).find(|&i| nd.norm(i) > tol_kappa))
        .unwrap_or(0);
    if let Ok(target) = theta_hat(nd.k1[base], nd.k2[base]) {
        let k = ((target - th[base]) / S::PI()).round().to_i64().unwrap_or(0);
        shift(&mut r, &mut th, k);
        th[base] = target;
    }

    if verdict.is_liftable() {
        let budget = S::FRAC_PI_2();
        if let Some(i) = (1..n).find(|&i| (th[i] - th[i - 1]).abs() > budget) {
            let zero = analysis
                .zeros
                .iter()
                .position(|z| z.zero.index_range.0 >= i.saturating_sub(1))
                .unwrap_or(analysis.zeros.len());
            verdict = Verdict::NotLiftable { reason: Reason::Underresolved, zero, s0: nd.s[i], mismatch: None };
        }
    }

    let mut lift = PolarLift { s: nd.s.clone(), r_tilde: r, theta_tilde: th, base_index: base, verdict, c1_flags: Vec::new() };
    if lift.verdict.is_liftable() {
        lift.c1_flags = c1_check(&lift, analysis, tol);
    }
    lift
}

/// One-sided difference quotients of the lifted angle at each zero,
/// extrapolated like the angle limits; true when both exist and agree.
///
/// Quotients use two samples on the same side, `(th(2m) - th(m)) / (s(2m) - s(m))`,
/// so they never touch the zero itself.
pub fn c1_check<S: Scalar>(lift: &PolarLift<S>, analysis: &mut LiftAnalysis<S>, tol: &Tolerances) -> Vec<bool> {
    let n = lift.len();
    let th = &lift.theta_tilde;
    let s = &lift.s;
    let tc = S::lit(tol.c1);
    let side = |anchor: usize, room: usize, dir: i64| -> Option<S> {
        let offs = dyadic_offsets(room / 2, LIMIT_WINDOW_STEPS / 2)?;
        let idx = |m: usize| (anchor as i64 + dir * m as i64) as usize;
        let q: Vec<S> = offs
            .iter()
            .map(|&m| (th[idx(2 * m)] - th[idx(m)]) / (s[idx(2 * m)] - s[idx(m)]))
            .collect();
        extrapolate(&q, tc)
    };
    analysis
        .zeros
        .iter_mut()
        .map(|z| {
            let plus = z.zero.right(n).and_then(|r| side(r - 1, n - r, 1));
            let minus = z.zero.left().and_then(|l| side(l + 1, l + 1, -1));
            z.derivative_plus = plus;
            z.derivative_minus = minus;
            let ok = match (plus, minus) {
                (Some(a), Some(b)) => (a - b).abs() <= tc,
                _ => false,
            };
            z.c1 = Some(ok);
            ok
        })
        .collect()
}

/// Analyze, lift and check differentiability in one call.
pub fn lift<S: Scalar>(
    nd: &NormalDevelopment<S>,
    base: Option<usize>,
    tol: &Tolerances,
) -> (LiftAnalysis<S>, PolarLift<S>) {
    let mut a = analyze(nd, tol);
    let l = build_lift(nd, &mut a, base, tol);
    (a, l)
}
