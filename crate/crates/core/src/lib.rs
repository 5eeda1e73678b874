//! Frames for space curves that stay defined through curvature zeros.
//!
//! The Beta frame extends the principal normal through isolated points of
//! zero curvature by lifting the normal development `(k1, k2)` to a
//! continuous polar pair `(r, theta)` with `r` allowed to change sign.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod beta;
pub mod bishop;
pub mod curve;
pub mod error;
pub mod expr;
pub mod frenet;
pub mod gallery;
pub mod io;
pub mod jet;
pub mod lift;
pub mod pipeline;
pub mod quadrature;
pub mod scalar;
pub mod tolerances;
pub mod vec3;

#[doc(hidden)]
pub mod cli;

pub use error::Error;
pub use scalar::Scalar;
pub use tolerances::Tolerances;

pub type Vec3d = vec3::Vec3<f64>;
pub type Spec = curve::CurveSpec<f64>;
pub type Curve = curve::ArcLengthCurve<f64>;
pub type Jet = curve::CurveJet<f64>;
pub type Frenet = frenet::FrenetSample<f64>;
pub type Bishop = bishop::BishopField<f64>;
pub type Development = bishop::NormalDevelopment<f64>;
pub type Lift = lift::PolarLift<f64>;
pub type Analysis = lift::LiftAnalysis<f64>;
pub type Beta = beta::BetaField<f64>;
