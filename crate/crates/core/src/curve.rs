//! Curve definitions, third-order jets, and arclength reparametrization.

use std::io::Read;
use std::sync::Arc;

use thiserror::Error;

use crate::bishop::DevelopedCurve;
use crate::expr::{parse_curve, EvalError, Expr, ParseError};
use crate::quadrature::{adaptive, gauss_legendre, gauss_legendre_nodes};
use crate::scalar::{eps_floor, Scalar};
use crate::tolerances::TOL_SPEED;
use crate::vec3::{RigidMotion, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("parameter t = {t} outside domain [{a}, {b}]")]
    OutsideDomain { t: f64, a: f64, b: f64 },
    #[error("arclength s = {s} outside [{start}, {end}]")]
    OutsideRange { s: f64, start: f64, end: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("curve is not regular: speed {speed:e} at t = {t}")]
    NotRegular { t: f64, speed: f64 },
    #[error("sampled curve needs at least 4 points, got {0}")]
    TooFewSamples(usize),
    #[error("sample parameters must be strictly increasing (row {0})")]
    NonMonotone(usize),
    #[error("non-finite sample value (row {0})")]
    NonFinite(usize),
    #[error("CSV input: {0}")]
    Csv(String),
    #[error("grid needs at least 2 samples, got {0}")]
    GridTooSmall(usize),
}

/// Position and first three arclength derivatives at arclength `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet<S> {
    pub s: S,
    pub gamma: Vec3<S>,
    pub d1: Vec3<S>,
    pub d2: Vec3<S>,
    pub d3: Vec3<S>,
}

/// Natural cubic spline through `(t_i, p_i)`, one per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline3<S> {
    knots: Vec<S>,
    // per segment: p(t) = a + b u + c u^2 + d u^3, u = t - t_i
    coeffs: Vec<[Vec3<S>; 4]>,
}

impl<S: Scalar> CubicSpline3<S> {
    pub fn new(ts: &[S], points: &[Vec3<S>]) -> Result<Self, CurveError> {
        let n = ts.len();
        if n < 4 || points.len() != n {
            return Err(CurveError::TooFewSamples(n.min(points.len())));
        }
        for (i, (t, p)) in ts.iter().zip(points).enumerate() {
            if !t.is_finite() || !p.is_finite() {
                return Err(CurveError::NonFinite(i));
            }
        }
        if let Some(i) = ts.windows(2).position(|w| w[1] <= w[0]) {
            return Err(CurveError::NonMonotone(i + 1));
        }
        let h: Vec<S> = ts.windows(2).map(|w| w[1] - w[0]).collect();
        // Second derivatives m_i with natural ends m_0 = m_{n-1} = 0 (Thomas algorithm).
        let mut m = vec![Vec3::zero(); n];
        let mut diag = vec![S::zero(); n];
        let mut rhs = vec![Vec3::zero(); n];
        for i in 1..n - 1 {
            diag[i] = S::two() * (h[i - 1] + h[i]);
            rhs[i] = ((points[i + 1] - points[i]) / h[i] - (points[i] - points[i - 1]) / h[i - 1])
                * S::lit(6.0);
        }
        for i in 2..n - 1 {
            let w = h[i - 1] / diag[i - 1];
            diag[i] = diag[i] - w * h[i - 1];
            rhs[i] = rhs[i] - rhs[i - 1] * w;
        }
        for i in (1..n - 1).rev() {
            let next = if i + 1 < n - 1 { m[i + 1] * h[i] } else { Vec3::zero() };
            m[i] = (rhs[i] - next) / diag[i];
        }
        let coeffs = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                let b = (points[i + 1] - points[i]) / hi - (m[i] * S::two() + m[i + 1]) * (hi / S::lit(6.0));
                [points[i], b, m[i] * S::half(), (m[i + 1] - m[i]) / (S::lit(6.0) * hi)]
            })
            .collect();
        Ok(Self { knots: ts.to_vec(), coeffs })
    }

    pub fn knots(&self) -> &[S] {
        &self.knots
    }

    pub fn jet(&self, t: S) -> [Vec3<S>; 4] {
        let n = self.coeffs.len();
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let u = t - self.knots[i];
        let [a, b, c, d] = self.coeffs[i];
        let three = S::lit(3.0);
        [
            a + (b + (c + d * u) * u) * u,
            b + (c * S::two() + d * (three * u)) * u,
            c * S::two() + d * (S::lit(6.0) * u),
            d * S::lit(6.0),
        ]
    }
}

#[derive(Debug, Clone)]
pub enum CurveKind<S> {
    Analytic { components: [Expr<S>; 3], domain: (S, S) },
    Sampled { spline: CubicSpline3<S> },
    Developed(Arc<DevelopedCurve<S>>),
}

/// A parametric curve plus metadata.
#[derive(Debug, Clone)]
pub struct CurveSpec<S> {
    pub name: String,
    pub kind: CurveKind<S>,
    pub planar_hint: Option<bool>,
    /// How a sampled curve was made smooth, for output metadata.
    pub interpolation: Option<&'static str>,
}

impl<S: Scalar> CurveSpec<S> {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let p = parse_curve(text)?;
        Ok(Self::analytic("dsl", p.components, p.domain))
    }

    pub fn analytic(name: impl Into<String>, components: [Expr<S>; 3], domain: (S, S)) -> Self {
        Self {
            name: name.into(),
            kind: CurveKind::Analytic { components, domain },
            planar_hint: None,
            interpolation: None,
        }
    }

    pub fn sampled(name: impl Into<String>, ts: &[S], points: &[Vec3<S>]) -> Result<Self, CurveError> {
        Ok(Self {
            name: name.into(),
            kind: CurveKind::Sampled { spline: CubicSpline3::new(ts, points)? },
            planar_hint: None,
            interpolation: Some("natural cubic spline"),
        })
    }

    /// Read a `t,x,y,z` CSV with strictly increasing `t`.
    pub fn from_csv(name: impl Into<String>, reader: impl Read) -> Result<Self, CurveError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| CurveError::Csv(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["t", "x", "y", "z"] {
            return Err(CurveError::Csv(format!("expected header t,x,y,z, got {:?}", header)));
        }
        let mut ts = Vec::new();
        let mut pts = Vec::new();
        for rec in rdr.deserialize::<(f64, f64, f64, f64)>() {
            let (t, x, y, z) = rec.map_err(|e| CurveError::Csv(e.to_string()))?;
            ts.push(S::lit(t));
            pts.push(Vec3::new(S::lit(x), S::lit(y), S::lit(z)));
        }
        Self::sampled(name, &ts, &pts)
    }

    pub fn with_planar_hint(mut self, hint: bool) -> Self {
        self.planar_hint = Some(hint);
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain(&self) -> (S, S) {
        match &self.kind {
            CurveKind::Analytic { domain, .. } => *domain,
            CurveKind::Sampled { spline } => {
                (spline.knots[0], *spline.knots.last().expect("spline has knots"))
            }
            CurveKind::Developed(d) => d.s_range(),
        }
    }

    fn breakpoints(&self) -> Vec<S> {
        match &self.kind {
            CurveKind::Sampled { spline } => spline.knots.clone(),
            _ => {
                let (a, b) = self.domain();
                vec![a, b]
            }
        }
    }

    /// Position and `t`-derivatives up to order three.
    pub fn eval_jet(&self, t: S) -> Result<[Vec3<S>; 4], CurveError> {
        let (a, b) = self.domain();
        let slack = (b - a) * S::epsilon() * S::lit(16.0);
        if !(t >= a - slack && t <= b + slack) {
            return Err(CurveError::OutsideDomain { t: t.to_f64_lossy(), a: a.to_f64_lossy(), b: b.to_f64_lossy() });
        }
        let t = t.max(a).min(b);
        match &self.kind {
            CurveKind::Analytic { components, .. } => {
                let mut d = [Vec3::zero(); 4];
                let cs: Vec<[S; 4]> = components
                    .iter()
                    .map(|e| e.eval_jet(t).map(|j| j.derivatives()))
                    .collect::<Result<_, _>>()?;
                for (k, dk) in d.iter_mut().enumerate() {
                    *dk = Vec3::new(cs[0][k], cs[1][k], cs[2][k]);
                }
                Ok(d)
            }
            CurveKind::Sampled { spline } => Ok(spline.jet(t)),
            CurveKind::Developed(dev) => {
                let j = dev.jet_at(t).ok_or(CurveError::OutsideDomain {
                    t: t.to_f64_lossy(),
                    a: a.to_f64_lossy(),
                    b: b.to_f64_lossy(),
                })?;
                Ok([j.gamma, j.d1, j.d2, j.d3])
            }
        }
    }

    pub fn speed(&self, t: S) -> Result<S, CurveError> {
        Ok(self.eval_jet(t)?[1].norm())
    }

    /// Apply a rigid motion. Analytic curves stay analytic.
    pub fn transformed(&self, m: &RigidMotion<S>) -> Self {
        let kind = match &self.kind {
            CurveKind::Analytic { components, domain } => {
                let r = &m.rotation;
                let comp = |i: usize| {
                    let mut e = Expr::Num(m.translation_component(i));
                    for (j, c) in components.iter().enumerate() {
                        e = e + Expr::Num(r[i][j]) * c.clone();
                    }
                    e
                };
                CurveKind::Analytic { components: [comp(0), comp(1), comp(2)], domain: *domain }
            }
            CurveKind::Sampled { spline } => {
                let pts: Vec<_> = spline.knots.iter().map(|&t| m.apply(spline.jet(t)[0])).collect();
                CurveKind::Sampled {
                    spline: CubicSpline3::new(&spline.knots, &pts).expect("knots already validated"),
                }
            }
            CurveKind::Developed(d) => CurveKind::Developed(Arc::new(d.transformed(m))),
        };
        Self { kind, name: self.name.clone(), planar_hint: self.planar_hint, interpolation: self.interpolation }
    }

    /// Reparametrize `t = 2u` style: `t = a + scale * (u - a')`, domain
    /// mapped accordingly. Only analytic curves support it.
    pub fn rescaled(&self, scale: S) -> Option<Self> {
        let CurveKind::Analytic { components, domain } = &self.kind else {
            return None;
        };
        let sub = Expr::Num(scale) * Expr::Param;
        let comps = components.clone().map(|c| substitute(&c, &sub));
        Some(Self::analytic(self.name.clone(), comps, (domain.0 / scale, domain.1 / scale)))
    }
}

impl<S: Scalar> RigidMotion<S> {
    fn translation_component(&self, i: usize) -> S {
        match i {
            0 => self.translation.x,
            1 => self.translation.y,
            _ => self.translation.z,
        }
    }
}

fn substitute<S: Scalar>(e: &Expr<S>, t: &Expr<S>) -> Expr<S> {
    let b = |x: &Expr<S>| Box::new(substitute(x, t));
    match e {
        Expr::Num(v) => Expr::Num(*v),
        Expr::Param => t.clone(),
        Expr::Neg(a) => Expr::Neg(b(a)),
        Expr::Add(x, y) => Expr::Add(b(x), b(y)),
        Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
        Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
        Expr::Div(x, y) => Expr::Div(b(x), b(y)),
        Expr::Pow(x, y) => Expr::Pow(b(x), b(y)),
        Expr::Call(f, x) => Expr::Call(*f, b(x)),
    }
}

/// Converts `t`-derivatives to arclength derivatives.
fn to_arclength<S: Scalar>(s: S, p: [Vec3<S>; 4]) -> CurveJet<S> {
    let [g, p1, p2, p3] = p;
    let v = p1.norm();
    let v1 = p1.dot(p2) / v;
    let v2 = (p2.norm_squared() + p1.dot(p3) - v1 * v1) / v;
    let u1 = v.recip();
    let u2 = -v1 / (v * v * v);
    let v4 = v * v * v * v;
    let u3 = -v2 / v4 + S::lit(3.0) * v1 * v1 / (v4 * v);
    CurveJet {
        s,
        gamma: g,
        d1: p1 * u1,
        d2: p2 * (u1 * u1) + p1 * u2,
        d3: p3 * (u1 * u1 * u1) + p2 * (S::lit(3.0) * u1 * u2) + p1 * u3,
    }
}

#[derive(Debug, Clone)]
enum Lookup<S> {
    /// Parameter already is arclength.
    Identity,
    /// Cumulative arclength at panel boundaries `t[j]`, with speed there.
    Table { t: Vec<S>, s: Vec<S>, speed: Vec<S> },
}

/// A regular curve reparametrized by arclength, with a sampling grid.
#[derive(Debug, Clone)]
pub struct ArcLengthCurve<S> {
    source: Arc<CurveSpec<S>>,
    s_start: S,
    total_length: S,
    lookup: Lookup<S>,
    grid: Vec<S>,
}

/// Build the arclength lookup for `spec` and a uniform grid of `n_samples`.
///
/// Curves derived from a normal development are already unit speed; their
/// grid is the development's own sample grid and `n_samples` is ignored.
pub fn reparametrize_arclength<S: Scalar>(
    spec: CurveSpec<S>,
    n_samples: usize,
) -> Result<ArcLengthCurve<S>, CurveError> {
    if n_samples < 2 {
        return Err(CurveError::GridTooSmall(n_samples));
    }
    if let CurveKind::Developed(d) = &spec.kind {
        let grid = d.knots().to_vec();
        let (a, b) = d.s_range();
        return Ok(ArcLengthCurve {
            source: Arc::new(spec),
            s_start: a,
            total_length: b - a,
            lookup: Lookup::Identity,
            grid,
        });
    }

    let breaks = spec.breakpoints();
    let intervals = breaks.len() - 1;
    let panels_wanted = (n_samples - 1).max(256);
    let per_interval = panels_wanted.div_ceil(intervals).max(1);
    let mut t_knots = Vec::with_capacity(intervals * per_interval + 1);
    t_knots.push(breaks[0]);
    for w in breaks.windows(2) {
        for k in 1..=per_interval {
            let f = S::from_usize_lossy(k) / S::from_usize_lossy(per_interval);
            t_knots.push(if k == per_interval { w[1] } else { w[0] + (w[1] - w[0]) * f });
        }
    }

    let mut speed_at = |t: S| spec.speed(t);
    // Regularity scan: panel ends and quadrature nodes, refined at deep dips.
    let mut samples: Vec<(S, S)> = Vec::with_capacity(t_knots.len() * 11);
    for w in t_knots.windows(2) {
        samples.push((w[0], speed_at(w[0])?));
        for x in gauss_legendre_nodes(w[0], w[1]) {
            samples.push((x, speed_at(x)?));
        }
    }
    let t_end = *t_knots.last().expect("non-empty");
    samples.push((t_end, speed_at(t_end)?));
    let tol_speed = S::lit(TOL_SPEED);
    let vmax = samples.iter().fold(S::zero(), |m, &(_, v)| m.max(v));
    for i in 0..samples.len() {
        let (t, v) = samples[i];
        if !(v >= tol_speed) {
            return Err(CurveError::NotRegular { t: t.to_f64_lossy(), speed: v.to_f64_lossy() });
        }
        let left = if i > 0 { samples[i - 1].1 } else { S::infinity() };
        let right = samples.get(i + 1).map_or(S::infinity(), |p| p.1);
        if v <= left && v <= right && v < vmax * S::lit(1e-3) {
            let lo = if i > 0 { samples[i - 1].0 } else { t };
            let hi = samples.get(i + 1).map_or(t, |p| p.0);
            let (tm, vm) = golden_min(lo, hi, &mut speed_at)?;
            if vm < tol_speed {
                return Err(CurveError::NotRegular { t: tm.to_f64_lossy(), speed: vm.to_f64_lossy() });
            }
        }
    }

    let mut s_knots = Vec::with_capacity(t_knots.len());
    let mut speed = Vec::with_capacity(t_knots.len());
    let mut acc = S::zero();
    s_knots.push(acc);
    speed.push(speed_at(t_knots[0])?);
    for w in t_knots.windows(2) {
        let tol = eps_floor::<S>(1e-15, 4.0) * (w[1] - w[0]).max(S::epsilon());
        acc = acc + adaptive(w[0], w[1], tol, 12, &mut speed_at)?;
        s_knots.push(acc);
        speed.push(speed_at(w[1])?);
    }
    let grid = uniform_grid(S::zero(), acc, n_samples);
    Ok(ArcLengthCurve {
        source: Arc::new(spec),
        s_start: S::zero(),
        total_length: acc,
        lookup: Lookup::Table { t: t_knots, s: s_knots, speed },
        grid,
    })
}

fn uniform_grid<S: Scalar>(a: S, len: S, n: usize) -> Vec<S> {
    let last = S::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { a + len } else { a + len * S::from_usize_lossy(i) / last })
        .collect()
}

fn golden_min<S: Scalar>(
    mut a: S,
    mut b: S,
    f: &mut impl FnMut(S) -> Result<S, CurveError>,
) -> Result<(S, S), CurveError> {
    let r = S::lit(0.618_033_988_749_894_8);
    let mut c = b - (b - a) * r;
    let mut d = a + (b - a) * r;
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= S::epsilon() * (S::one() + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * r;
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * r;
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

impl<S: Scalar> ArcLengthCurve<S> {
    pub fn source(&self) -> &CurveSpec<S> {
        &self.source
    }

    pub fn name(&self) -> &str {
        &self.source.name
    }

    pub fn total_length(&self) -> S {
        self.total_length
    }

    pub fn s_range(&self) -> (S, S) {
        (self.s_start, self.s_start + self.total_length)
    }

    pub fn grid(&self) -> &[S] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Uniform grid spacing (exact for table-based curves).
    pub fn step(&self) -> S {
        self.total_length / S::from_usize_lossy(self.grid.len() - 1)
    }

    /// Same curve on a fresh uniform grid of `n` samples.
    pub fn regrid(&self, n: usize) -> Result<Self, CurveError> {
        if n < 2 {
            return Err(CurveError::GridTooSmall(n));
        }
        let mut out = self.clone();
        out.grid = uniform_grid(self.s_start, self.total_length, n);
        Ok(out)
    }

    /// Curve parameter at arclength `s`.
    pub fn t_of_s(&self, s: S) -> Result<S, CurveError> {
        let (start, end) = self.s_range();
        let slack = eps_floor::<S>(1e-12, 64.0) * (S::one() + self.total_length);
        if !(s >= start - slack && s <= end + slack) {
            return Err(CurveError::OutsideRange {
                s: s.to_f64_lossy(),
                start: start.to_f64_lossy(),
                end: end.to_f64_lossy(),
            });
        }
        let s = s.max(start).min(end);
        let Lookup::Table { t, s: sk, speed } = &self.lookup else {
            return Ok(s);
        };
        let n = sk.len();
        let j = match sk.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(j) => return Ok(t[j]),
            Err(j) => j.clamp(1, n - 1) - 1,
        };
        let (t0, t1, s0, s1) = (t[j], t[j + 1], sk[j], sk[j + 1]);
        let guess = monotone_hermite(s0, s1, t0, t1, speed[j].recip(), speed[j + 1].recip(), s);
        let src = &self.source;
        let tol = eps_floor::<S>(1e-13, 64.0) * (S::one() + self.total_length);
        let (mut lo, mut hi) = (t0, t1);
        let mut x = guess.max(t0).min(t1);
        for _ in 0..80 {
            let f = s0 + gauss_legendre(t0, x, |u| src.speed(u))? - s;
            if f.abs() <= tol {
                break;
            }
            if f > S::zero() {
                hi = x;
            } else {
                lo = x;
            }
            let step = f / src.speed(x)?;
            let next = x - step;
            x = if next > lo && next < hi { next } else { (lo + hi) * S::half() };
            if hi - lo <= S::epsilon() * (S::one() + x.abs()) {
                break;
            }
        }
        Ok(x)
    }

    pub fn jet(&self, s: S) -> Result<CurveJet<S>, CurveError> {
        if let CurveKind::Developed(d) = &self.source.kind {
            let (a, b) = d.s_range();
            return d.jet_at(s).ok_or(CurveError::OutsideRange {
                s: s.to_f64_lossy(),
                start: a.to_f64_lossy(),
                end: b.to_f64_lossy(),
            });
        }
        let t = self.t_of_s(s)?;
        let p = self.source.eval_jet(t)?;
        Ok(to_arclength(s, p))
    }

    pub fn grid_jets(&self) -> Result<Vec<CurveJet<S>>, CurveError> {
        self.grid.iter().map(|&s| self.jet(s)).collect()
    }
}

/// Fritsch-Carlson limited cubic Hermite interpolation of `y(x)`.
fn monotone_hermite<S: Scalar>(x0: S, x1: S, y0: S, y1: S, m0: S, m1: S, x: S) -> S {
    let h = x1 - x0;
    if h <= S::zero() {
        return y0;
    }
    let delta = (y1 - y0) / h;
    let (mut m0, mut m1) = (m0, m1);
    if delta > S::zero() {
        let a = m0 / delta;
        let b = m1 / delta;
        let r = a * a + b * b;
        if r > S::lit(9.0) {
            let tau = S::lit(3.0) / r.sqrt();
            m0 = tau * a * delta;
            m1 = tau * b * delta;
        }
    }
    let u = (x - x0) / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let two = S::two();
    let three = S::lit(3.0);
    let h00 = two * u3 - three * u2 + S::one();
    let h10 = u3 - two * u2 + u;
    let h01 = -two * u3 + three * u2;
    let h11 = u3 - u2;
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}
