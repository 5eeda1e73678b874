//! Frenet apparatus and the planar signed-curvature frame.

use serde::Serialize;

use crate::curve::{ArcLengthCurve, CurveError, CurveJet};
use crate::scalar::Scalar;
use crate::tolerances::TOL_PLANAR;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetSample<S> {
    pub s: S,
    pub t: Vec3<S>,
    pub kappa_f: S,
    pub n_f: Option<Vec3<S>>,
    pub b_f: Option<Vec3<S>>,
    pub tau_f: Option<S>,
}

/// Frenet data from a jet; normal, binormal and torsion only above `tol_kappa`.
pub fn frenet_from_jet<S: Scalar>(j: &CurveJet<S>, tol_kappa: S) -> FrenetSample<S> {
    let t = j.d1.normalize();
    let kappa_f = j.d2.norm();
    let (n_f, b_f, tau_f) = if kappa_f > tol_kappa {
        let n = j.d2 / kappa_f;
        let tau = j.d1.cross(j.d2).dot(j.d3) / (kappa_f * kappa_f);
        (Some(n), Some(t.cross(n)), Some(tau))
    } else {
        (None, None, None)
    };
    FrenetSample { s: j.s, t, kappa_f, n_f, b_f, tau_f }
}

pub fn frenet_at<S: Scalar>(
    curve: &ArcLengthCurve<S>,
    s: S,
    tol_kappa: S,
) -> Result<FrenetSample<S>, CurveError> {
    Ok(frenet_from_jet(&curve.jet(s)?, tol_kappa))
}

pub fn frenet_field<S: Scalar>(jets: &[CurveJet<S>], tol_kappa: S) -> Vec<FrenetSample<S>> {
    jets.iter().map(|j| frenet_from_jet(j, tol_kappa)).collect()
}

/// In-plane frame of a planar curve, in plane coordinates `(e1, e2)` with
/// `e1 x e2 = normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarSample<S> {
    pub s: S,
    pub t: [S; 2],
    pub n_good: [S; 2],
    pub kappa_signed: S,
}

/// Best-fit plane of a planar curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plane<S> {
    pub normal: Vec3<S>,
    pub e1: Vec3<S>,
    pub e2: Vec3<S>,
}

impl<S: Scalar> Plane<S> {
    /// Plane through the origin direction `normal`, sign fixed by the first
    /// nonzero of (z, y, x) being positive.
    pub fn from_normal(normal: Vec3<S>) -> Self {
        let mut n = normal.normalize();
        let key = if n.z.abs() > S::epsilon() {
            n.z
        } else if n.y.abs() > S::epsilon() {
            n.y
        } else {
            n.x
        };
        if key < S::zero() {
            n = -n;
        }
        let helper = if n.x.abs() < S::lit(0.9) { Vec3::unit_x() } else { Vec3::unit_y() };
        let e1 = (helper - n * n.dot(helper)).normalize();
        let e2 = n.cross(e1);
        Self { normal: n, e1, e2 }
    }

    pub fn coords(&self, v: Vec3<S>) -> [S; 2] {
        [v.dot(self.e1), v.dot(self.e2)]
    }

    pub fn embed(&self, v: [S; 2]) -> Vec3<S> {
        self.e1 * v[0] + self.e2 * v[1]
    }

    /// `T` turned by a quarter turn about the normal.
    pub fn good_normal(&self, t: Vec3<S>) -> Vec3<S> {
        self.normal.cross(t)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanarError {
    #[error("curve is not planar")]
    NotPlanar,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Best-fit plane of the grid positions if every point lies within
/// `TOL_PLANAR * length` of it.
pub fn is_planar<S: Scalar>(curve: &ArcLengthCurve<S>, jets: &[CurveJet<S>]) -> Option<Plane<S>> {
    let pts: Vec<Vec3<S>> = jets.iter().map(|j| j.gamma).collect();
    plane_fit(&pts, S::lit(TOL_PLANAR) * curve.total_length())
}

fn plane_fit<S: Scalar>(pts: &[Vec3<S>], tol: S) -> Option<Plane<S>> {
    if pts.len() < 3 {
        return None;
    }
    let inv = S::from_usize_lossy(pts.len()).recip();
    let c = pts.iter().fold(Vec3::zero(), |a, &p| a + p) * inv;
    let mut m = [[S::zero(); 3]; 3];
    for p in pts {
        let d = *p - c;
        let v = [d.x, d.y, d.z];
        for i in 0..3 {
            for k in 0..3 {
                m[i][k] = m[i][k] + v[i] * v[k];
            }
        }
    }
    let (vals, vecs) = jacobi_eigen(m);
    let imin = (0..3).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap()).unwrap();
    let normal = Vec3::new(vecs[0][imin], vecs[1][imin], vecs[2][imin]);
    let dev = pts.iter().fold(S::zero(), |a, &p| a.max((p - c).dot(normal).abs()));
    (dev <= tol).then(|| Plane::from_normal(normal))
}

/// Cyclic Jacobi for a symmetric 3x3 matrix; eigenvectors are columns.
fn jacobi_eigen<S: Scalar>(mut a: [[S; 3]; 3]) -> ([S; 3], [[S; 3]; 3]) {
    let mut v = [[S::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = S::one();
    }
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        let scale = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
        if off <= S::epsilon() * S::epsilon() * scale || off == S::zero() {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == S::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (S::two() * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
            let c = (t * t + S::one()).sqrt().recip();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

pub fn planar_from_jet<S: Scalar>(j: &CurveJet<S>, plane: &Plane<S>) -> PlanarSample<S> {
    let t = j.d1.normalize();
    let n = plane.good_normal(t);
    PlanarSample { s: j.s, t: plane.coords(t), n_good: plane.coords(n), kappa_signed: j.d2.dot(n) }
}

pub fn planar_frame_at<S: Scalar>(
    curve: &ArcLengthCurve<S>,
    plane: &Plane<S>,
    s: S,
) -> Result<PlanarSample<S>, CurveError> {
    Ok(planar_from_jet(&curve.jet(s)?, plane))
}

/// Planar frame on the whole grid, or `NotPlanar`.
pub fn planar_field<S: Scalar>(
    curve: &ArcLengthCurve<S>,
    jets: &[CurveJet<S>],
) -> Result<(Plane<S>, Vec<PlanarSample<S>>), PlanarError> {
    let plane = is_planar(curve, jets).ok_or(PlanarError::NotPlanar)?;
    Ok((plane, jets.iter().map(|j| planar_from_jet(j, &plane)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{reparametrize_arclength, CurveSpec};

    fn curve(src: &str, n: usize) -> (ArcLengthCurve<f64>, Vec<CurveJet<f64>>) {
        let c = reparametrize_arclength(CurveSpec::parse(src).unwrap(), n).unwrap();
        let j = c.grid_jets().unwrap();
        (c, j)
    }

    #[test]
    fn circle_frenet() {
        let (_, jets) = curve("(cos(t), sin(t), 0) t in (0, 6)", 101);
        for (j, f) in jets.iter().zip(frenet_field(&jets, 1e-7)) {
            assert!((f.kappa_f - 1.0).abs() < 1e-10);
            assert!((f.n_f.unwrap() + j.gamma).norm() < 1e-9);
            assert!(f.tau_f.unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn line_has_no_normal() {
        let (_, jets) = curve("(t/3, 2*t/3, 2*t/3) t in (0, 1)", 20);
        let f = frenet_from_jet(&jets[5], 1e-7);
        assert!(f.n_f.is_none() && f.tau_f.is_none());
    }

    #[test]
    fn signed_curvature_follows_orientation() {
        for (src, sign) in [
            ("(cos(t), sin(t), 0) t in (0, 6)", 1.0),
            ("(cos(t), -sin(t), 0) t in (0, 6)", -1.0),
        ] {
            let (c, jets) = curve(src, 80);
            let (plane, f) = planar_field(&c, &jets).unwrap();
            assert_eq!(plane.normal, Vec3::unit_z());
            for p in f {
                assert!((p.kappa_signed - sign).abs() < 1e-10);
                let det = p.t[0] * p.n_good[1] - p.t[1] * p.n_good[0];
                assert!((det - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn helix_not_planar() {
        let (c, jets) = curve("(cos(t), sin(t), t) t in (0, 6)", 100);
        assert!(is_planar(&c, &jets).is_none());
    }

    #[test]
    fn jacobi_diagonalizes() {
        let m: [[f64; 3]; 3] = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let (mut vals, _) = jacobi_eigen(m);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in vals.iter().zip([1.0, 3.0, 5.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }
}
