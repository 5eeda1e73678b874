//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints a single PASS or FAIL line.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use framecast::bishop::{reconstruct, seeded_frame, Seed};
use framecast::gallery::{self, ExpectedVerdict, Payload};
use framecast::lift::{lift, Verdict};
use framecast::pipeline::{check, frame_curve, frame_with, prepare, run_frame, FrameRun};
use framecast::vec3::{RigidMotion, Vec3};
use framecast::{Development, Spec, Tolerances};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn tol() -> Tolerances {
    Tolerances::default()
}

fn curve(name: &str) -> Spec {
    match gallery::find::<f64>(name).expect("gallery entry").payload {
        Payload::Curve(c) => c,
        Payload::Development(_) => panic!("{name} is a development"),
    }
}

fn development(name: &str) -> Development {
    match gallery::find::<f64>(name).expect("gallery entry").payload {
        Payload::Development(d) => d,
        Payload::Curve(_) => panic!("{name} is a curve"),
    }
}

fn frame(name: &str) -> FrameRun<f64> {
    run_frame(curve(name), None, &tol()).expect("frame")
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

fn planar_agreement() -> Outcome {
    let start = Instant::now();
    let run = frame("inflection");
    let beta = run.beta().map_err(|e| e.to_string())?;
    let (plane, good) = run.planar.as_ref().ok_or("inflection not detected as planar")?;
    let mut dev = 0.0_f64;
    for (i, g) in good.iter().enumerate() {
        dev = dev.max((beta.kappa[i] - g.kappa_signed).abs());
        dev = dev.max((beta.n[i] - plane.embed(g.n_good)).norm());
    }
    let z = run.analysis.zeros.first().ok_or("no inflection found")?;
    let (l, r) = (z.zero.left().unwrap(), z.zero.right(beta.len()).unwrap());
    let flank = beta.n[l].dot(beta.n[r]);
    let elapsed = start.elapsed();
    ensure(dev <= 1e-6, format!("frame deviation {dev:.2e}"))?;
    ensure(flank > 0.99, format!("flanking N dot {flank}"))?;
    within(elapsed, 5.0)?;
    Ok(format!("deviation {dev:.2e}, flanking N dot {flank:.6}, {:.2}s", elapsed.as_secs_f64()))
}

fn frenet_consistency() -> Outcome {
    let tk = tol().kappa;
    let mut worst = [0.0_f64; 3];
    for name in ["circle", "helix11", "sphere"] {
        let run = frame(name);
        let beta = run.beta().map_err(|e| e.to_string())?;
        for (i, f) in run.frenet.iter().enumerate() {
            if f.kappa_f <= tk {
                continue;
            }
            worst[0] = worst[0].max((beta.kappa[i].abs() - f.kappa_f).abs());
            worst[1] = worst[1].max(1.0 - beta.n[i].dot(f.n_f.unwrap()).abs());
            if let (Some(tb), Some(tf)) = (beta.tau[i], f.tau_f) {
                worst[2] = worst[2].max((tb - tf).abs());
            } else {
                return Err(format!("{name}: torsion missing at sample {i}"));
            }
        }
    }
    ensure(worst[0] <= 1e-6, format!("kappa {:.2e}", worst[0]))?;
    ensure(worst[1] <= 1e-6, format!("normal {:.2e}", worst[1]))?;
    ensure(worst[2] <= 1e-5, format!("tau {:.2e}", worst[2]))?;
    Ok(format!("kappa {:.2e}, 1-|N.N| {:.2e}, tau {:.2e}", worst[0], worst[1], worst[2]))
}

/// Curvature and torsion of `(cos t, sin t, t)` by central differences of
/// the position alone.
fn helix_oracle(t: f64) -> (f64, f64) {
    let p = |t: f64| [t.cos(), t.sin(), t];
    let h = 1e-3;
    let pts: Vec<[f64; 3]> = (-2..=2).map(|k| p(t + k as f64 * h)).collect();
    let comp = |c: usize| {
        let y: Vec<f64> = pts.iter().map(|q| q[c]).collect();
        let d1 = (-y[4] + 8.0 * y[3] - 8.0 * y[1] + y[0]) / (12.0 * h);
        let d2 = (-y[4] + 16.0 * y[3] - 30.0 * y[2] + 16.0 * y[1] - y[0]) / (12.0 * h * h);
        let d3 = (y[4] - 2.0 * y[3] + 2.0 * y[1] - y[0]) / (2.0 * h * h * h);
        (d1, d2, d3)
    };
    let (a, b, c) = (comp(0), comp(1), comp(2));
    let v1 = Vec3::new(a.0, b.0, c.0);
    let v2 = Vec3::new(a.1, b.1, c.1);
    let v3 = Vec3::new(a.2, b.2, c.2);
    let x = v1.cross(v2);
    let kappa = x.norm() / v1.norm().powi(3);
    let tau = x.dot(v3) / x.norm_squared();
    (kappa, tau)
}

fn helix_values() -> Outcome {
    let run = frame("helix11");
    let beta = run.beta().map_err(|e| e.to_string())?;
    let c = 2.0_f64.sqrt();
    let mut err = 0.0_f64;
    let mut oracle_gap = 0.0_f64;
    for i in 0..beta.len() {
        let (ko, to) = helix_oracle(beta.s[i] / c);
        oracle_gap = oracle_gap.max((ko - 0.5).abs()).max((to - 0.5).abs());
        let tb = beta.tau[i].ok_or("torsion missing")?;
        err = err.max((beta.kappa[i].abs() - ko).abs()).max((tb - to).abs());
    }
    ensure(oracle_gap <= 1e-6, format!("oracle itself off by {oracle_gap:.2e}"))?;
    ensure(err <= 1e-6, format!("kappa/tau off by {err:.2e}"))?;
    let nd = &run.development;
    let mut radius = 0.0_f64;
    let mut rates = Vec::new();
    for i in 0..nd.len() {
        radius = radius.max((nd.norm(i) - 0.5).abs());
        if i + 1 < nd.len() {
            let a = nd.k2[i].atan2(nd.k1[i]);
            let b = nd.k2[i + 1].atan2(nd.k1[i + 1]);
            let da = (b - a + PI).rem_euclid(2.0 * PI) - PI;
            rates.push(da / (nd.s[i + 1] - nd.s[i]));
        }
    }
    let (lo, hi) = rates.iter().fold((f64::MAX, f64::MIN), |(l, h), &r| (l.min(r), h.max(r)));
    ensure(radius <= 1e-6, format!("development radius off by {radius:.2e}"))?;
    ensure(hi - lo <= 1e-5, format!("angular speed varies by {:.2e}", hi - lo))?;
    Ok(format!("kappa/tau {err:.2e}, radius {radius:.2e}, angular speed {:.6} spread {:.2e}", 0.5 * (lo + hi), hi - lo))
}

fn classification() -> Outcome {
    let start = Instant::now();
    let t = tol();
    for name in ["fig3a", "fig3b", "fig3c"] {
        let (_, l) = lift(&development(name), None, &t);
        ensure(matches!(l.verdict, Verdict::NotLiftable { .. }), format!("{name}: {:?}", l.verdict))?;
    }
    for name in ["fig4a", "fig4b", "fig4c", "fig5"] {
        let (a, l) = lift(&development(name), None, &t);
        ensure(l.verdict.is_liftable(), format!("{name}: {:?}", l.verdict))?;
        let z = a.zeros.first().ok_or(format!("{name}: no zero"))?;
        for th in [z.theta_plus, z.theta_minus] {
            let th = th.ok_or(format!("{name}: missing one-sided angle"))?;
            ensure((th - FRAC_PI_4).abs() <= 1e-3, format!("{name}: angle {th}"))?;
        }
    }
    let run = frame("spivak");
    let Verdict::NotLiftable { mismatch, .. } = run.lift.verdict else {
        return Err(format!("spivak: {:?}", run.lift.verdict));
    };
    let m = mismatch.ok_or("spivak: no mismatch recorded")?;
    ensure((m - FRAC_PI_2).abs() <= 1e-3, format!("spivak mismatch {m}"))?;
    let elapsed = start.elapsed();
    within(elapsed, 10.0)?;
    Ok(format!("fig3 rejected, fig4/fig5 at pi/4, spivak jump {m:.6}, {:.2}s", elapsed.as_secs_f64()))
}

/// Beta torsion of the curve rebuilt from a development, framed with the
/// seed frame so that the development is reproduced.
fn rebuilt(nd: &Development) -> Result<FrameRun<f64>, String> {
    let c = reconstruct(nd, Seed::default()).map_err(|e| e.to_string())?;
    let jets = c.grid_jets().map_err(|e| e.to_string())?;
    let init = seeded_frame(&c, 0).ok_or("no seed frame")?;
    frame_with(c, jets, init, &tol()).map_err(|e| e.to_string())
}

fn c1_caveat() -> Outcome {
    let t = tol();
    let nd6 = development("fig6");
    let (_, l6) = lift(&nd6, None, &t);
    ensure(l6.verdict.is_liftable(), format!("fig6: {:?}", l6.verdict))?;
    ensure(l6.c1_flags == [false], format!("fig6 c1 flags {:?}", l6.c1_flags))?;
    let run6 = rebuilt(&nd6)?;
    let b6 = run6.beta().map_err(|e| e.to_string())?;
    let zero = nd6.s.iter().position(|&s| s == 0.0).unwrap();
    let absent: Vec<usize> = (0..b6.len()).filter(|&i| b6.tau[i].is_none()).collect();
    ensure(absent == [zero], format!("fig6 torsion absent at {absent:?}, zero at {zero}"))?;

    let nd4 = development("fig4a");
    let (_, l4) = lift(&nd4, None, &t);
    ensure(l4.c1_flags == [true], format!("fig4a c1 flags {:?}", l4.c1_flags))?;
    let run4 = rebuilt(&nd4)?;
    let b4 = run4.beta().map_err(|e| e.to_string())?;
    let tau0 = b4.tau[zero].ok_or("fig4a torsion absent at the zero")?;
    ensure((tau0 - 1.0).abs() <= 1e-2, format!("fig4a torsion at zero {tau0}"))?;
    Ok(format!("fig6 torsion absent only at s=0; fig4a torsion at zero {tau0:.6}"))
}

fn frame_equations() -> Outcome {
    let mut notes = Vec::new();
    for name in ["circle", "helix11"] {
        let spec = curve(name);
        let len = prepare(spec.clone(), Some(257)).map_err(|e| e.to_string())?.total_length();
        let coarse = (len / 1e-3).round() as usize + 1;
        let rep = check(spec, coarse, 2 * coarse - 1, &tol()).map_err(|e| e.to_string())?;
        let worst = rep.coarse.max();
        ensure(rep.satisfied(3.5), format!("{name}: ratios {:?}", rep.ratio))?;
        ensure(worst <= 1e-5, format!("{name}: residual {worst:.2e} at h={:.2e}", rep.coarse.h))?;
        let ratios: Vec<String> =
            rep.ratio.iter().map(|r| r.map_or("roundoff".into(), |r| format!("{r:.2}"))).collect();
        notes.push(format!("{name} residual {worst:.2e} ratios [{}]", ratios.join(", ")));
    }
    Ok(notes.join("; "))
}

fn round_trips() -> Outcome {
    let t = tol();
    let mut worst = 0.0_f64;
    let mut proj = 0.0_f64;
    for e in gallery::gallery::<f64>() {
        if e.expected.verdict != ExpectedVerdict::Liftable {
            continue;
        }
        let Payload::Development(nd) = &e.payload else { continue };
        let back = rebuilt(nd)?.development;
        worst = worst.max(nd.max_diff(&back));
        let (_, l) = lift(nd, None, &t);
        proj = proj.max(l.projection_error(nd));
    }
    for name in ["circle", "helix11", "inflection", "inflection3d", "sphere"] {
        let run = frame(name);
        proj = proj.max(run.lift.projection_error(&run.development));
    }
    ensure(worst <= 1e-6, format!("development round trip {worst:.2e}"))?;
    ensure(proj <= 1e-9, format!("projection {proj:.2e}"))?;
    Ok(format!("development round trip {worst:.2e}, projection {proj:.2e}"))
}

fn max_gap(a: &FrameRun<f64>, b: &FrameRun<f64>) -> Result<f64, String> {
    let (x, y) = (a.beta().map_err(|e| e.to_string())?, b.beta().map_err(|e| e.to_string())?);
    if x.len() != y.len() {
        return Err("grid sizes differ".into());
    }
    let mut m = 0.0_f64;
    for i in 0..x.len() {
        m = m.max((x.kappa[i] - y.kappa[i]).abs());
        match (x.tau[i], y.tau[i]) {
            (Some(p), Some(q)) => m = m.max((p - q).abs()),
            (None, None) => {}
            _ => return Err(format!("torsion presence differs at {i}")),
        }
    }
    Ok(m)
}

fn invariances() -> Outcome {
    let t = tol();
    let motion = RigidMotion::from_axis_angle(Vec3::new(1.0, -2.0, 0.5), 0.7, Vec3::new(3.0, -1.0, 2.0));
    let mut rigid = 0.0_f64;
    let mut reparam = 0.0_f64;
    for name in ["helix11", "sphere", "inflection3d"] {
        let spec = curve(name);
        let n = prepare(spec.clone(), None).map_err(|e| e.to_string())?.len();
        let a = run_frame(spec.clone(), Some(n), &t).map_err(|e| e.to_string())?;
        let b = run_frame(spec.transformed(&motion), Some(n), &t).map_err(|e| e.to_string())?;
        rigid = rigid.max(max_gap(&a, &b)?);
        let c = run_frame(spec.rescaled(2.0).ok_or("not analytic")?, Some(n), &t).map_err(|e| e.to_string())?;
        reparam = reparam.max(max_gap(&a, &c)?);
    }

    let spec = curve("inflection3d");
    let c = prepare(spec, None).map_err(|e| e.to_string())?;
    let a = frame_curve(c.clone(), &t, None).map_err(|e| e.to_string())?;
    let late = a.analysis.zeros[0].zero.right(c.len()).unwrap() + c.len() / 4;
    let b = frame_curve(c, &t, Some(late)).map_err(|e| e.to_string())?;
    let (x, y) = (a.beta().map_err(|e| e.to_string())?, b.beta().map_err(|e| e.to_string())?);
    let sigma = x.n[0].dot(y.n[0]).signum();
    let mut flip = 0.0_f64;
    for i in 0..x.len() {
        flip = flip.max((x.n[i] * sigma - y.n[i]).norm()).max((x.b[i] * sigma - y.b[i]).norm());
    }
    ensure(rigid <= 1e-8, format!("rigid motion {rigid:.2e}"))?;
    ensure(reparam <= 1e-8, format!("reparametrization {reparam:.2e}"))?;
    ensure(flip <= 1e-6, format!("base change is not a global sign: {flip:.2e}"))?;
    Ok(format!("rigid {rigid:.2e}, reparametrization {reparam:.2e}, base change sign {sigma:+} (residual {flip:.2e})"))
}

fn spherical() -> Outcome {
    let nd = frame("sphere").development;
    let n = nd.len() as f64;
    let (mx, my) = (nd.k1.iter().sum::<f64>() / n, nd.k2.iter().sum::<f64>() / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..nd.len() {
        let (dx, dy) = (nd.k1[i] - mx, nd.k2[i] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let normal = (-phi.sin(), phi.cos());
    let dev = (0..nd.len())
        .map(|i| ((nd.k1[i] - mx) * normal.0 + (nd.k2[i] - my) * normal.1).abs())
        .fold(0.0, f64::max);
    let dist = (mx * normal.0 + my * normal.1).abs();
    ensure(dev <= 1e-6, format!("line deviation {dev:.2e}"))?;
    ensure(dist >= 0.1, format!("line distance from origin {dist}"))?;
    Ok(format!("line deviation {dev:.2e}, distance from origin {dist:.6}"))
}

fn main() -> ExitCode {
    let checks: [Check; 9] = [
        ("planar agreement", planar_agreement),
        ("consistency with Frenet", frenet_consistency),
        ("helix values", helix_values),
        ("zero classification", classification),
        ("C1 caveat", c1_caveat),
        ("recovered frame equations", frame_equations),
        ("round trips", round_trips),
        ("invariances", invariances),
        ("spherical development", spherical),
    ];
    let mut failed = 0;
    for (k, (name, f)) in checks.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {} {name}: PASS ({msg})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({msg})", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
