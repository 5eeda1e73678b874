use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use framecast::bishop::NormalDevelopment;
use framecast::curve::{reparametrize_arclength, CurveSpec};
use framecast::lift::{lift, mod_pi_distance, rotate_quarter, theta_hat};
use framecast::pipeline::run_frame;
use framecast::vec3::{RigidMotion, Vec3};
use framecast::Tolerances;

fn position(a: f64, b: f64, c: f64, t: f64) -> [f64; 3] {
    [a * (b * t).sin() + t, c * t.cos() + t * t, (0.3 * t).exp() - a * t]
}

fn dsl(a: f64, b: f64, c: f64) -> String {
    format!("({a}*sin({b}*t) + t, {c}*cos(t) + t^2, exp(0.3*t) - {a}*t) t in (-2, 2)")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jet_derivatives_match_finite_differences(
        a in -1.0..1.0f64, b in 0.5..2.0f64, c in -1.0..1.0f64, t in -1.9..1.9f64,
    ) {
        let spec: CurveSpec<f64> = CurveSpec::parse(&dsl(a, b, c)).unwrap();
        let jet = spec.eval_jet(t).unwrap();
        let h = 1e-5;
        let p = |t| position(a, b, c, t);
        let (m, z, q) = (p(t - h), p(t), p(t + h));
        for k in 0..3 {
            let d1 = (q[k] - m[k]) / (2.0 * h);
            let d2 = (q[k] - 2.0 * z[k] + m[k]) / (h * h);
            let v = jet[0].to_f64()[k];
            let j1 = jet[1].to_f64()[k];
            let j2 = jet[2].to_f64()[k];
            prop_assert!((v - z[k]).abs() <= 1e-12 * (1.0 + z[k].abs()));
            prop_assert!((j1 - d1).abs() <= 1e-6 * (1.0 + j1.abs()), "d1 {j1} vs {d1}");
            prop_assert!((j2 - d2).abs() <= 1e-3 * (1.0 + j2.abs()), "d2 {j2} vs {d2}");
        }
    }

    #[test]
    fn theta_hat_stays_in_half_open_interval(x in -10.0..10.0f64, y in -10.0..10.0f64) {
        prop_assume!(x != 0.0 || y != 0.0);
        let th = theta_hat(x, y).unwrap();
        prop_assert!(th > -FRAC_PI_2 && th <= FRAC_PI_2);
        // Same line through the origin as (x, y).
        prop_assert!((th.cos() * y - th.sin() * x).abs() <= 1e-12 * x.hypot(y));
        let (u, v) = rotate_quarter(x, y);
        prop_assert!((u.hypot(v) - x.hypot(y)).abs() <= 1e-12 * x.hypot(y));
    }

    #[test]
    fn mod_pi_distance_is_a_metric_on_the_circle(a in -10.0..10.0f64, b in -10.0..10.0f64, k in -3i32..3) {
        let d = mod_pi_distance(a, b);
        prop_assert!((0.0..=FRAC_PI_2 + 1e-12).contains(&d));
        prop_assert!((d - mod_pi_distance(b, a)).abs() <= 1e-12);
        prop_assert!((d - mod_pi_distance(a + k as f64 * PI, b)).abs() <= 1e-9);
    }
}

/// `(r, theta)` sampled on `[-1, 1]` with `r` vanishing at the given roots.
fn polar_development(roots: &[f64], w: f64, phase: f64) -> NormalDevelopment<f64> {
    let n = 1601;
    let s: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let r: Vec<f64> = s.iter().map(|&x| roots.iter().fold(1.0, |p, z| p * (x - z))).collect();
    let th: Vec<f64> = s.iter().map(|&x| phase + w * x + 0.2 * (3.0 * x).sin()).collect();
    NormalDevelopment::from_polar(s, &r, &th).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lift_reproduces_development_and_admits_the_flip(
        roots in proptest::collection::vec(-0.8..0.8f64, 0..3),
        w in -2.0..2.0f64,
        phase in -3.0..3.0f64,
    ) {
        let mut roots = roots;
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assume!(roots.windows(2).all(|p| p[1] - p[0] > 0.1));
        let nd = polar_development(&roots, w, phase);
        let tol = Tolerances::default();
        let (analysis, l) = lift(&nd, None, &tol);
        prop_assert!(l.verdict.is_liftable(), "{:?}", l.verdict);
        prop_assert!(l.projection_error(&nd) <= 1e-9);
        prop_assert!((l.theta_tilde[l.base_index] - theta_hat(nd.k1[l.base_index], nd.k2[l.base_index]).unwrap()).abs() == 0.0);
        for w in l.theta_tilde.windows(2) {
            prop_assert!((w[1] - w[0]).abs() <= FRAC_PI_2);
        }
        let f = l.flipped();
        prop_assert!(f.projection_error(&nd) <= 1e-9);
        prop_assert!(analysis.zeros.len() >= roots.len());
    }

    #[test]
    fn rigid_motions_preserve_curvature_and_torsion(
        ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in 0.1..1.0f64,
        angle in -3.0..3.0f64,
        bx in -5.0..5.0f64, by in -5.0..5.0f64, bz in -5.0..5.0f64,
    ) {
        let spec: CurveSpec<f64> = CurveSpec::parse("(2*cos(t), sin(t), 0.5*t) t in (0, 4)").unwrap();
        let m = RigidMotion::from_axis_angle(Vec3::new(ax, ay, az), angle, Vec3::new(bx, by, bz));
        let tol = Tolerances::default();
        let a = run_frame(spec.clone(), Some(801), &tol).unwrap();
        let b = run_frame(spec.transformed(&m), Some(801), &tol).unwrap();
        let (x, y) = (a.beta().unwrap(), b.beta().unwrap());
        for i in 0..x.len() {
            prop_assert!((x.kappa[i] - y.kappa[i]).abs() <= 1e-8);
            prop_assert!((x.tau[i].unwrap() - y.tau[i].unwrap()).abs() <= 1e-8);
        }
    }
}

#[test]
fn reparametrization_leaves_the_arclength_grid_alone() {
    let spec: CurveSpec<f64> = CurveSpec::parse("(t, t^2, sin(t)) t in (0, 1)").unwrap();
    let fast = spec.rescaled(2.0).unwrap();
    assert_eq!(fast.domain(), (0.0, 0.5));
    let a = reparametrize_arclength(spec, 301).unwrap();
    let b = reparametrize_arclength(fast, 301).unwrap();
    assert!((a.total_length() - b.total_length()).abs() <= 1e-12);
    for (p, q) in a.grid_jets().unwrap().iter().zip(b.grid_jets().unwrap()) {
        assert!((p.gamma - q.gamma).norm() <= 1e-9);
        assert!((p.d2 - q.d2).norm() <= 1e-8);
    }
}

#[test]
fn single_precision_pipeline_runs() {
    let spec: CurveSpec<f32> = CurveSpec::parse("(cos(t), sin(t), t) t in (0, 3)").unwrap();
    let run = run_frame(spec, Some(401), &Tolerances::default()).unwrap();
    let beta = run.beta().unwrap();
    for i in 0..beta.len() {
        assert!((beta.kappa[i] - 0.5).abs() < 1e-3);
        assert!((beta.tau[i].unwrap() - 0.5).abs() < 1e-2);
    }
}
