//! End-to-end checks of the shipped gallery scenes.
//!
//! Each test pins one promise the toolchain makes about the gallery: the
//! classifications and curvature values of every scene, the discrepancy
//! notes for frames and angles that fail their checks, the geometric
//! identities behind the classifications, agreement with the
//! finite-difference oracle, and byte-identical reruns.

use gluelocus::classify::{classify_surface_with_tol, SurfaceShape};
use gluelocus::developables::{DevelopableSurface, RulingKind, SurfaceError};
use gluelocus::frames::{FrameInvariants, FramedCurve};
use gluelocus::glue::{GlueScene, SurfaceSlot};
use gluelocus::jets::Jet;
use gluelocus::oracle::{fd_derivative, lambda_direct, striction_search, FdConfig};
use gluelocus_cli::config::SceneConfig;
use gluelocus_cli::report::{Report, SurfaceReport};
use gluelocus_cli::scene::{build_frames, run_scene, Overrides, RunOutcome};
use std::path::Path;
use std::sync::Arc;

const ROOT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn gallery(n: usize) -> SceneConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../gallery")
        .join(format!("example{n}.json"));
    SceneConfig::load(&path).expect("gallery config loads")
}

fn run(n: usize) -> (RunOutcome, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_scene(&gallery(n), Overrides::default(), dir.path())
        .unwrap_or_else(|err| panic!("gallery scene {n} runs: {err:#}"));
    (outcome, dir)
}

fn grid(interval: (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    let step = (interval.1 - interval.0) / (n - 1) as f64;
    (0..n).map(move |i| interval.0 + step * i as f64)
}

fn surface_named<'a>(report: &'a Report, name: &str) -> &'a SurfaceReport {
    report
        .surfaces
        .iter()
        .find(|s| s.name == name)
        .unwrap_or_else(|| panic!("report carries {name}"))
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[test]
fn helix_scene_transported_curvatures_are_those_of_a_cylinder() {
    let config = gallery(1);
    let (frames, notes) = build_frames(&config).unwrap();
    assert!(notes.is_empty(), "extraction needs no fallback: {notes:?}");
    for t in grid((-1.2, 1.2), 20) {
        let fi = frames[1].invariants(t, 0).unwrap();
        assert!((fi.kappa1.value() + ROOT_HALF).abs() <= 1e-9, "kappa21({t})");
        assert!(fi.kappa2.value().abs() <= 1e-9, "kappa22({t})");
        assert!((fi.kappa3.value() - ROOT_HALF).abs() <= 1e-9, "kappa23({t})");
    }
    let s_nu2 = DevelopableSurface::build(frames[1].clone(), RulingKind::Nu, 201).unwrap();
    for t in grid((-1.2, 1.2), 201) {
        assert!(s_nu2.beta(t).unwrap().abs() <= 1e-9, "beta_nu2({t})");
    }
    let (outcome, _dir) = run(1);
    let nu2 = surface_named(&outcome.report, "S_nu2");
    assert_eq!(nu2.shape.as_deref(), Some("cylinder"));
}

#[test]
fn cylinder_cone_scene_shapes_and_frame_fallback_note() {
    let (outcome, _dir) = run(2);
    let report = &outcome.report;
    assert!(
        report
            .notes
            .iter()
            .any(|n| n.contains("rejected") && n.contains("unit normal")),
        "the non-unit supplied normal must be flagged: {:?}",
        report.notes
    );
    let nu1 = surface_named(report, "S_nu1");
    assert_eq!(nu1.shape.as_deref(), Some("cylinder"));
    assert!(nu1.beta_max.unwrap() <= 1e-9);
    let nu2 = surface_named(report, "S_nu2");
    assert_eq!(nu2.shape.as_deref(), Some("cone"));
    let expected = 1.0 / (2.0 * 2.0f64.sqrt());
    assert!((nu2.beta_max.unwrap() - expected).abs() <= 1e-9);
    assert!(nu2.rho_max.unwrap() <= 1e-9);

    // The cone's turning scalar is that constant pointwise, not only at
    // the sweep maximum.
    let (frames, _) = build_frames(&gallery(2)).unwrap();
    let s_nu2 = DevelopableSurface::build(frames[1].clone(), RulingKind::Nu, 201).unwrap();
    for t in grid((-3.0, 3.0), 41) {
        assert!((s_nu2.beta(t).unwrap().abs() - expected).abs() <= 1e-9);
    }
}

#[test]
fn sphere_plane_scene_right_angle_correspondence() {
    let config = gallery(3);
    let (frames, _) = build_frames(&config).unwrap();
    for t in grid((0.25, 2.9), 20) {
        let f1 = frames[0].invariants(t, 0).unwrap();
        assert!((f1.kappa1.value() - 1.0).abs() <= 1e-9, "kappa11({t})");
        assert!(f1.kappa2.value().abs() <= 1e-9, "kappa12({t})");
        assert!(f1.kappa3.value().abs() <= 1e-9, "kappa13({t})");
        let f2 = frames[1].invariants(t, 0).unwrap();
        assert!(f2.kappa1.value().abs() <= 1e-9, "kappa21({t})");
        assert!((f2.kappa2.value() - 1.0).abs() <= 1e-9, "kappa22({t})");
        assert!(f2.kappa3.value().abs() <= 1e-9, "kappa23({t})");
    }
    let (outcome, _dir) = run(3);
    let report = &outcome.report;
    assert_eq!(surface_named(report, "S_nu1").shape.as_deref(), Some("cylinder"));
    let theta = report.theta.as_ref().unwrap();
    assert!(theta.constant);
    assert_eq!(theta.special_half_pi_multiple, Some(-1));
    assert_eq!(theta.special_pairs_match, Some(true));
    // At an odd multiple of a right angle the second frame's ν-surface is
    // identified with the first frame's b-surface, and vice versa.
    assert_eq!(
        surface_named(report, "S_nu2").status,
        surface_named(report, "S_b1").status
    );
    assert_eq!(
        surface_named(report, "S_b2").shape,
        surface_named(report, "S_nu1").shape
    );
    // The signed angle comes out as -π/2 where a positive right angle is
    // documented; the report must say so.
    assert!(report
        .notes
        .iter()
        .any(|n| n.contains("documented rotation angle")));
}

#[test]
fn tilted_band_scene_cone_with_apex_at_the_origin() {
    let (outcome, _dir) = run(4);
    let report = &outcome.report;
    let nu2 = surface_named(report, "S_nu2");
    assert_eq!(nu2.shape.as_deref(), Some("cone"));
    let expected = 1.0 / (2.0 * 2.0f64.sqrt());
    assert!((nu2.beta_max.unwrap() - expected).abs() <= 1e-9);
    assert!(nu2.rho_max.unwrap() <= 1e-9);
    let apex = nu2.apex.unwrap();
    for c in apex {
        assert!(c.abs() <= 1e-9, "apex at the origin, got {apex:?}");
    }
    let residuals = report.residuals.as_ref().unwrap();
    assert!(residuals.invariant_transport.max <= 1e-9);
    assert!(residuals.rotation.max <= 1e-9);
    let theta = report.theta.as_ref().unwrap();
    assert!(theta.constant);
    assert!((theta.start - 3.0 * std::f64::consts::FRAC_PI_4).abs() <= 1e-9);
    assert!(report
        .notes
        .iter()
        .any(|n| n.contains("documented rotation angle")));
}

#[test]
fn cusp_scene_cuspidal_edge_at_the_speed_zero() {
    let (frames, _) = build_frames(&gallery(5)).unwrap();
    let fi = frames[1].invariants(0.0, 1).unwrap();
    assert!(fi.l.value().abs() <= 1e-9, "speed vanishes at 0");
    assert!((fi.l.derivative_value(1) - 2.0).abs() <= 1e-9, "l'(0) = 2");
    let expected_k21 = -3.0 / (2.0 * 2.0f64.sqrt());
    assert!((fi.kappa1.value() - expected_k21).abs() <= 1e-9, "kappa21(0)");
    let (outcome, _dir) = run(5);
    assert!(!outcome.unresolved);
    let nu2 = surface_named(&outcome.report, "S_nu2");
    assert_eq!(nu2.points.len(), 1);
    assert_eq!(nu2.points[0].t, 0.0);
    assert_eq!(nu2.points[0].label, "cuspidal edge");
}

#[test]
fn quartic_scene_swallowtail_at_the_speed_zero() {
    let (frames, _) = build_frames(&gallery(6)).unwrap();
    let fi = frames[1].invariants(0.0, 2).unwrap();
    assert!(fi.l.value().abs() <= 1e-9);
    assert!(fi.l.derivative_value(1).abs() <= 1e-9, "l'(0) = 0");
    assert!((fi.l.derivative_value(2) - 24.0).abs() <= 1e-9, "l''(0) = 24");
    // The second speed derivative again, differenced instead of read off
    // the jet.
    let fc2 = frames[1].clone();
    let fd = fd_derivative(
        |t| fc2.invariants(t, 0).unwrap().l.value(),
        0.0,
        2,
        FdConfig::for_order(2),
    );
    assert!((fd - 24.0).abs() <= 1e-5, "differenced l''(0), got {fd}");
    // Transporting the first frame's curvature through the angle and
    // multiplying by l'' reproduces the printed swallowtail coefficient.
    let scene = GlueScene::new(frames[0].clone(), frames[1].clone(), 201).unwrap();
    let theta = scene.theta(0.0).unwrap();
    let f1 = frames[0].invariants(0.0, 0).unwrap();
    let combined = (f1.kappa1.value() * theta.cos() + f1.kappa2.value() * theta.sin())
        * fi.l.derivative_value(2);
    assert!((combined + 24.0).abs() <= 1e-6, "coefficient, got {combined}");
    let (outcome, _dir) = run(6);
    assert!(!outcome.unresolved);
    let nu2 = surface_named(&outcome.report, "S_nu2");
    assert_eq!(nu2.points[0].label, "swallowtail");
}

#[test]
fn geometric_identities_hold_on_every_gallery_scene() {
    for n in 1..=6 {
        let config = gallery(n);
        let (frames, _) = build_frames(&config).unwrap();
        let interval = (config.interval[0], config.interval[1]);
        for fc in &frames {
            frame_checks(fc, interval);
        }
        let scene = GlueScene::new(frames[0].clone(), frames[1].clone(), 201).unwrap();
        let classification = scene.classify().unwrap();
        assert!(classification.rotation_residual_max <= 1e-9, "scene {n}");
        assert!(classification.invariant_residual_max <= 1e-9, "scene {n}");
        if let Some(gap) = classification.expanded_beta_residual_max {
            assert!(gap <= 1e-8, "scene {n} expanded beta");
        }
        if let Some(gap) = classification.expanded_rho_residual_max {
            assert!(gap <= 1e-8, "scene {n} expanded rho");
        }
        for slot in SurfaceSlot::ALL {
            match scene.surface(slot) {
                Ok(surface) => slot_checks(&surface, interval, n),
                Err(SurfaceError::AssumptionViolated { .. }) => {}
                Err(other) => panic!("scene {n} {}: {other}", slot.as_str()),
            }
        }
    }
}

fn frame_checks(fc: &Arc<FramedCurve>, interval: (f64, f64)) {
    for t in grid(interval, 201) {
        let f = fc.frame_jets(t, 1).unwrap();
        let fi = fc.invariants(t, 0).unwrap();
        for (name, dev) in [
            ("unit e", (f.e.dot(&f.e).value() - 1.0).abs()),
            ("unit nu", (f.nu.dot(&f.nu).value() - 1.0).abs()),
            ("unit b", (f.b.dot(&f.b).value() - 1.0).abs()),
            ("e.nu", f.e.dot(&f.nu).value().abs()),
        ] {
            assert!(dev <= 1e-10, "{name} at {t}: {dev}");
        }
        // Reconstruct each derivative from the invariants it defines.
        let (k1, k2, k3, l) = (
            fi.kappa1.value(),
            fi.kappa2.value(),
            fi.kappa3.value(),
            fi.l.value(),
        );
        let e = f.e.value();
        let nu = f.nu.value();
        let b = f.b.value();
        for i in 0..3 {
            let pairs = [
                (f.e.derivative().value()[i], k1 * nu[i] + k2 * b[i]),
                (f.nu.derivative().value()[i], -k1 * e[i] + k3 * b[i]),
                (f.b.derivative().value()[i], -k2 * e[i] - k3 * nu[i]),
                (f.gamma.derivative().value()[i], l * e[i]),
            ];
            for (got, want) in pairs {
                assert!((got - want).abs() <= 1e-9, "reconstruction at {t}");
            }
        }
    }
}

fn slot_checks(surface: &DevelopableSurface, interval: (f64, f64), n: usize) {
    for t in grid(interval, 201).step_by(8) {
        for a in [-0.6, 0.3] {
            let sample = match surface.evaluate(t, a) {
                Ok(sample) => sample,
                Err(SurfaceError::SingularPoint { .. }) => continue,
                Err(other) => panic!("scene {n}: {other}"),
            };
            let (h, h_prime) = surface.envelope_residual(t, sample.point).unwrap();
            assert!(h.abs() <= 1e-9, "envelope h at {t}");
            assert!(h_prime.abs() <= 1e-9, "envelope h' at {t}");
            match surface.gaussian_curvature(t, a) {
                Ok(k) => assert!(k.abs() <= 1e-8, "flatness at ({t}, {a}): {k}"),
                Err(SurfaceError::SingularPoint { .. }) => {}
                Err(other) => panic!("scene {n}: {other}"),
            }
        }
        match surface.striction_jets(t) {
            Ok((s, sigma)) => {
                let s0 = s.value();
                assert!(surface.lambda(t, s0).unwrap().abs() <= 1e-9);
                let below = surface.lambda(t, s0 - 0.25).unwrap();
                let above = surface.lambda(t, s0 + 0.25).unwrap();
                assert!(
                    below * above < 0.0,
                    "identifier changes sign across the ruling at {t}"
                );
                let drift = cross3(sigma.derivative().value(), surface.delta_jet(t).unwrap().value());
                for c in drift {
                    assert!(c.abs() <= 1e-8, "striction tangent along the ruling at {t}");
                }
            }
            Err(SurfaceError::CylindricalAt { .. }) => {}
            Err(other) => panic!("scene {n}: {other}"),
        }
    }
}

#[test]
fn finite_difference_oracle_agrees_on_every_gallery_scene() {
    let mut checked = 0usize;
    for n in 1..=6 {
        let config = gallery(n);
        let (frames, _) = build_frames(&config).unwrap();
        let (t0, t1) = (config.interval[0], config.interval[1]);
        let probes = [0.15, 0.38, 0.61, 0.85].map(|f| t0 + f * (t1 - t0));
        for fc in &frames {
            for &t in &probes {
                let jets = fc.invariants(t, 3).unwrap();
                for k in 0..4 {
                    for order in 1..=3 {
                        let fc = fc.clone();
                        let fd = fd_derivative(
                            move |x| pick(&fc.invariants(x, 0).unwrap(), k).value(),
                            t,
                            order,
                            FdConfig::for_order(order),
                        );
                        agree(pick(&jets, k).derivative_value(order), fd, t);
                        checked += 1;
                    }
                }
            }
            for kind in [RulingKind::Nu, RulingKind::B] {
                let surface = match DevelopableSurface::build(fc.clone(), kind, 201) {
                    Ok(surface) => surface,
                    Err(SurfaceError::AssumptionViolated { .. }) => continue,
                    Err(other) => panic!("scene {n}: {other}"),
                };
                let class = classify_surface_with_tol(&surface, 201, None).unwrap();
                if class.shape == SurfaceShape::Cylinder {
                    // β and ρ are identically zero here; differencing their
                    // rounding noise proves nothing.
                    continue;
                }
                for &t in &probes {
                    for order in 1..=3 {
                        let fd = fd_derivative(
                            |x| surface.beta(x).unwrap(),
                            t,
                            order,
                            FdConfig::for_order(order),
                        );
                        agree(surface.beta_jet(t).unwrap().derivative_value(order), fd, t);
                        checked += 1;
                    }
                    for order in 1..=2 {
                        let fd = fd_derivative(
                            |x| surface.rho(x).unwrap(),
                            t,
                            order,
                            FdConfig::for_order(order),
                        );
                        agree(surface.rho_jet(t).unwrap().derivative_value(order), fd, t);
                        checked += 1;
                    }
                    let s = surface.striction(t).unwrap().s;
                    let direct = lambda_direct(&surface, t, s, FdConfig::default()).unwrap();
                    assert!(direct.abs() <= 1e-6, "identifier on the locus at {t}");
                    let found = striction_search(&surface, t, FdConfig::default()).unwrap();
                    assert!(
                        (found - s).abs() <= 1e-6 * (1.0 + s.abs()),
                        "searched offset at {t}: {found} vs {s}"
                    );
                    checked += 2;
                }
            }
        }
    }
    assert!(checked > 400, "the audit must actually cover the gallery: {checked}");
}

fn pick(fi: &FrameInvariants, k: usize) -> &Jet {
    match k {
        0 => &fi.kappa1,
        1 => &fi.kappa2,
        2 => &fi.kappa3,
        _ => &fi.l,
    }
}

fn agree(jet: f64, fd: f64, t: f64) {
    if fd.abs() > 1e-7 {
        assert!(
            ((jet - fd) / fd).abs() <= 1e-5,
            "jet {jet} vs differenced {fd} at {t}"
        );
    } else {
        assert!(
            (jet - fd).abs() <= 1e-7,
            "jet {jet} vs differenced {fd} at {t}"
        );
    }
}

#[test]
fn gallery_runs_are_byte_identical() {
    for n in 1..=6 {
        let (first, dir_a) = run(n);
        let (second, dir_b) = run(n);
        assert_eq!(first.written.len(), second.written.len());
        assert!(!first.written.is_empty(), "scene {n} writes artifacts");
        for (a, b) in first.written.iter().zip(&second.written) {
            let rel = a.strip_prefix(dir_a.path()).unwrap();
            assert_eq!(rel, b.strip_prefix(dir_b.path()).unwrap());
            let bytes_a = std::fs::read(a).unwrap();
            let bytes_b = std::fs::read(b).unwrap();
            assert!(
                bytes_a == bytes_b,
                "scene {n} artifact {} differs between runs",
                rel.display()
            );
        }
    }
}
