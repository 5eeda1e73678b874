//! Built-in curves and synthetic normal developments with known behavior.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use serde::Serialize;

use crate::bishop::NormalDevelopment;
use crate::curve::CurveSpec;
use crate::expr::{Expr, Func};
use crate::scalar::Scalar;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Stated outright for the example in the literature.
    Literature,
    /// Computed independently by a closed form or a separate numerical oracle.
    Oracle,
    /// Immediate from the definitions.
    Definition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedVerdict {
    Liftable,
    NotLiftable,
    Unsupported,
    NoBasePoint,
}

impl ExpectedVerdict {
    pub fn label(self) -> &'static str {
        match self {
            ExpectedVerdict::Liftable => "liftable",
            ExpectedVerdict::NotLiftable => "not_liftable",
            ExpectedVerdict::Unsupported => "unsupported",
            ExpectedVerdict::NoBasePoint => "no_base_point",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub verdict: ExpectedVerdict,
    /// Common value of the one-sided limits at the zero.
    pub theta_limit: Option<f64>,
    /// Mismatch between the one-sided limits, modulo pi.
    pub jump: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub planar: Option<bool>,
    pub c1: Option<bool>,
    pub source: Source,
}

impl Expected {
    fn new(verdict: ExpectedVerdict, source: Source) -> Self {
        Self { verdict, theta_limit: None, jump: None, kappa: None, tau: None, planar: None, c1: None, source }
    }

    pub fn summary(&self) -> String {
        let mut parts = vec![self.verdict.label().to_string()];
        let mut push = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                parts.push(format!("{k}={v:.6}"));
            }
        };
        push("theta", self.theta_limit);
        push("jump", self.jump);
        push("kappa", self.kappa);
        push("tau", self.tau);
        if let Some(p) = self.planar {
            parts.push(format!("planar={p}"));
        }
        if let Some(c) = self.c1 {
            parts.push(format!("c1={c}"));
        }
        parts.push(format!("[{:?}]", self.source).to_lowercase());
        parts.join(" ")
    }
}

#[derive(Debug, Clone)]
pub enum Payload<S> {
    Curve(CurveSpec<S>),
    Development(NormalDevelopment<S>),
}

#[derive(Debug, Clone)]
pub struct GalleryEntry<S> {
    pub name: &'static str,
    pub description: &'static str,
    pub payload: Payload<S>,
    pub expected: Expected,
}

impl<S> GalleryEntry<S> {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Curve(_) => "curve",
            Payload::Development(_) => "development",
        }
    }
}

/// Samples per synthetic development over `s in [-1, 1]`.
pub const DEVELOPMENT_SAMPLES: usize = 4001;

/// Sample `(r(s), theta(s))` on `[-1, 1]`, projecting to `(k1, k2)`; the
/// sample at `s = 0` is the origin.
pub fn synthetic_development<S: Scalar>(f: impl Fn(f64) -> (f64, f64)) -> NormalDevelopment<S> {
    let n = DEVELOPMENT_SAMPLES;
    let mid = (n - 1) / 2;
    let mut s = Vec::with_capacity(n);
    let mut k1 = Vec::with_capacity(n);
    let mut k2 = Vec::with_capacity(n);
    for i in 0..n {
        let x = (i as f64 - mid as f64) / mid as f64;
        let (a, b) = if i == mid {
            (0.0, 0.0)
        } else {
            let (r, th) = f(x);
            (r * th.cos(), r * th.sin())
        };
        s.push(S::lit(x));
        k1.push(S::lit(a));
        k2.push(S::lit(b));
    }
    NormalDevelopment::new(s, k1, k2).expect("finite synthetic development")
}

fn parsed<S: Scalar>(name: &str, src: &str) -> CurveSpec<S> {
    CurveSpec::parse(src).expect("gallery curve parses").named(name)
}

fn t<S: Scalar>() -> Expr<S> {
    Expr::param()
}

pub fn gallery<S: Scalar>() -> Vec<GalleryEntry<S>> {
    use ExpectedVerdict::*;
    use Source::*;
    let mut out = Vec::new();
    let mut curve = |name, description, spec: CurveSpec<S>, expected| {
        out.push(GalleryEntry { name, description, payload: Payload::Curve(spec), expected })
    };

    curve(
        "circle",
        "unit circle, counter-clockwise",
        parsed("circle", "(cos(t), sin(t), 0) t in (0, 6.283185307179586)").with_planar_hint(true),
        Expected { kappa: Some(1.0), tau: Some(0.0), planar: Some(true), ..Expected::new(Liftable, Definition) },
    );
    curve(
        "circle_cw",
        "unit circle, clockwise",
        parsed("circle_cw", "(cos(t), -sin(t), 0) t in (0, 6.283185307179586)").with_planar_hint(true),
        Expected { kappa: Some(-1.0), tau: Some(0.0), planar: Some(true), ..Expected::new(Liftable, Definition) },
    );
    curve(
        "circle2",
        "half circle of radius 2",
        parsed("circle2", "(2*cos(t), 2*sin(t), 0) t in (0, 3.141592653589793)").with_planar_hint(true),
        Expected { kappa: Some(0.5), tau: Some(0.0), planar: Some(true), ..Expected::new(Liftable, Oracle) },
    );
    curve(
        "line",
        "straight segment; no frame can be based on it",
        parsed("line", "(t/3, 2*t/3, 2*t/3) t in (0, 1)"),
        Expected { kappa: Some(0.0), ..Expected::new(NoBasePoint, Definition) },
    );
    curve(
        "helix11",
        "circular helix (cos t, sin t, t)",
        parsed("helix11", "(cos(t), sin(t), t) t in (0, 6.283185307179586)").with_planar_hint(false),
        Expected { kappa: Some(0.5), tau: Some(0.5), planar: Some(false), ..Expected::new(Liftable, Oracle) },
    );
    curve(
        "inflection",
        "planar cubic graph (t, t^3) with one inflection",
        parsed("inflection", "(t, t^3, 0) t in (-1, 1)").with_planar_hint(true),
        Expected { theta_limit: Some(0.0), tau: Some(0.0), planar: Some(true), c1: Some(true), ..Expected::new(Liftable, Literature) },
    );
    curve(
        "inflection3d",
        "space curve (t, t^3, t^4) through a curvature zero",
        parsed("inflection3d", "(t, t^3, t^4) t in (-1, 1)").with_planar_hint(false),
        Expected { planar: Some(false), c1: Some(true), ..Expected::new(Liftable, Oracle) },
    );
    curve(
        "sphere",
        "closed curve on the unit sphere, latitude 0.3 sin 2t",
        parsed(
            "sphere",
            "(cos(0.3*sin(2*t))*cos(t), cos(0.3*sin(2*t))*sin(t), sin(0.3*sin(2*t))) t in (0, 6.283185307179586)",
        )
        .with_planar_hint(false),
        Expected { planar: Some(false), ..Expected::new(Liftable, Literature) },
    );
    // Osculating plane switches from xz to xy at t = 0; quartic pieces keep it C^3.
    let ramp4 = |e: Expr<S>| Expr::call(Func::Ramp, e).pow(Expr::num(4.0));
    curve(
        "spivak",
        "(t, max(t,0)^4, max(-t,0)^4): plane jumps by a right angle at t = 0",
        CurveSpec::analytic("spivak", [t(), ramp4(t()), ramp4(-t())], (S::lit(-1.0), S::lit(1.0))),
        Expected { jump: Some(FRAC_PI_2), ..Expected::new(NotLiftable, Literature) },
    );
    let flat = |e: Expr<S>| Expr::call(Func::Flat, Expr::call(Func::Ramp, e));
    curve(
        "spivak_exp",
        "(t, exp(-1/t^2) for t>0, exp(-1/t^2) for t<0): curvature flat to all orders at 0",
        CurveSpec::analytic("spivak_exp", [t(), flat(t()), flat(-t())], (S::lit(-1.0), S::lit(1.0))),
        Expected::new(Unsupported, Oracle),
    );

    let mut dev = |name, description, f: &dyn Fn(f64) -> (f64, f64), expected| {
        out.push(GalleryEntry {
            name,
            description,
            payload: Payload::Development(synthetic_development(f)),
            expected,
        })
    };
    dev(
        "fig3a",
        "enters along angle 0, leaves along pi/3",
        &|s| (s, if s < 0.0 { 0.0 } else { PI / 3.0 }),
        Expected { jump: Some(PI / 3.0), ..Expected::new(NotLiftable, Literature) },
    );
    dev(
        "fig3b",
        "(s, pi/4 + (pi/8) sin(1/s))",
        &|s| (s, FRAC_PI_4 + FRAC_PI_8 * (1.0 / s).sin()),
        Expected::new(NotLiftable, Literature),
    );
    dev(
        "fig3c",
        "(s, 1/sqrt|s|)",
        &|s| (s, 1.0 / s.abs().sqrt()),
        Expected::new(NotLiftable, Literature),
    );
    dev(
        "fig4a",
        "(s, s + pi/4)",
        &|s| (s, s + FRAC_PI_4),
        Expected { theta_limit: Some(FRAC_PI_4), c1: Some(true), tau: Some(1.0), ..Expected::new(Liftable, Literature) },
    );
    dev(
        "fig4b",
        "(|s|, s + pi/4)",
        &|s| (s.abs(), s + FRAC_PI_4),
        Expected { theta_limit: Some(FRAC_PI_4), c1: Some(true), ..Expected::new(Liftable, Literature) },
    );
    dev(
        "fig4c",
        "(s, |s| + pi/4)",
        &|s| (s, s.abs() + FRAC_PI_4),
        Expected { theta_limit: Some(FRAC_PI_4), c1: Some(false), ..Expected::new(Liftable, Literature) },
    );
    dev(
        "fig5",
        "(s, pi/4 + s (pi/8) sin(1/s))",
        &|s| (s, FRAC_PI_4 + s * FRAC_PI_8 * (1.0 / s).sin()),
        Expected { theta_limit: Some(FRAC_PI_4), ..Expected::new(Liftable, Literature) },
    );
    dev(
        "fig6",
        "(s, s^(1/3)): continuous but not differentiable angle",
        &|s| (s, s.cbrt()),
        Expected { theta_limit: Some(0.0), c1: Some(false), ..Expected::new(Liftable, Literature) },
    );
    out
}

pub fn find<S: Scalar>(name: &str) -> Option<GalleryEntry<S>> {
    gallery().into_iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    gallery::<f64>().into_iter().map(|e| e.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut n = names();
        let len = n.len();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), len);
    }

    #[test]
    fn synthetic_zero_is_centered() {
        let d = synthetic_development::<f64>(|s| (s, 0.3));
        let mid = DEVELOPMENT_SAMPLES / 2;
        assert_eq!(d.s[mid], 0.0);
        assert_eq!(d.point(mid), [0.0, 0.0]);
    }
}
