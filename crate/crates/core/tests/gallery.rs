use framecast::bishop::BishopError;
use framecast::gallery::{gallery, ExpectedVerdict, Payload};
use framecast::lift::{lift, Verdict};
use framecast::pipeline::run_frame;
use framecast::{Error, Tolerances};

fn verdict_kind(v: &Verdict<f64>) -> ExpectedVerdict {
    match v {
        Verdict::Liftable => ExpectedVerdict::Liftable,
        Verdict::NotLiftable { .. } => ExpectedVerdict::NotLiftable,
        Verdict::Unsupported { .. } => ExpectedVerdict::Unsupported,
    }
}

#[test]
fn every_entry_meets_its_expectation() {
    let tol = Tolerances::default();
    for e in gallery::<f64>() {
        let exp = &e.expected;
        match e.payload {
            Payload::Development(nd) => {
                let (analysis, l) = lift(&nd, None, &tol);
                assert_eq!(verdict_kind(&l.verdict), exp.verdict, "{}", e.name);
                if let Some(th) = exp.theta_limit {
                    let z = &analysis.zeros[0];
                    assert!((z.theta_plus.unwrap() - th).abs() <= 1e-3, "{}", e.name);
                    assert!((z.theta_minus.unwrap() - th).abs() <= 1e-3, "{}", e.name);
                }
                if let Some(j) = exp.jump {
                    assert!((analysis.zeros[0].mismatch.unwrap() - j).abs() <= 1e-3, "{}", e.name);
                }
                if let Some(c1) = exp.c1 {
                    assert_eq!(l.c1_flags, [c1], "{}", e.name);
                }
            }
            Payload::Curve(spec) => match run_frame(spec, None, &tol) {
                Err(Error::Bishop(BishopError::NoBasePoint)) => {
                    assert_eq!(exp.verdict, ExpectedVerdict::NoBasePoint, "{}", e.name)
                }
                Err(err) => panic!("{}: {err}", e.name),
                Ok(run) => {
                    assert_eq!(verdict_kind(&run.lift.verdict), exp.verdict, "{}", e.name);
                    if let Some(p) = exp.planar {
                        assert_eq!(run.planar.is_some(), p, "{}", e.name);
                    }
                    if let Some(j) = exp.jump {
                        let Verdict::NotLiftable { mismatch: Some(m), .. } = run.lift.verdict else {
                            panic!("{}: no mismatch", e.name)
                        };
                        assert!((m - j).abs() <= 1e-3, "{}", e.name);
                    }
                    if let Some(c1) = exp.c1 {
                        assert!(run.lift.c1_flags.iter().all(|&f| f == c1), "{}", e.name);
                    }
                    if let Ok(beta) = &run.beta {
                        if let Some(k) = exp.kappa {
                            assert!(beta.kappa.iter().all(|v| (v - k).abs() <= 1e-6), "{}", e.name);
                        }
                        if let Some(t) = exp.tau {
                            assert!(beta.tau.iter().flatten().all(|v| (v - t).abs() <= 1e-5), "{}", e.name);
                        }
                    }
                }
            },
        }
    }
}

#[test]
fn fig3b_is_rejected_for_lack_of_a_limit() {
    let Payload::Development(nd) = framecast::gallery::find::<f64>("fig3b").unwrap().payload else {
        unreachable!()
    };
    let (_, l) = lift(&nd, None, &Tolerances::default());
    let Verdict::NotLiftable { reason, .. } = l.verdict else { panic!("{:?}", l.verdict) };
    assert_eq!(reason.describe(), "theta_plus absent");
}

#[test]
fn circle_orientation_sets_the_sign_of_planar_curvature() {
    let tol = Tolerances::default();
    for (name, sign) in [("circle", 1.0), ("circle_cw", -1.0)] {
        let Payload::Curve(spec) = framecast::gallery::find::<f64>(name).unwrap().payload else { unreachable!() };
        let run = run_frame(spec, Some(1001), &tol).unwrap();
        let (_, good) = run.planar.as_ref().unwrap();
        assert!(good.iter().all(|g| (g.kappa_signed - sign).abs() < 1e-9), "{name}");
    }
}
