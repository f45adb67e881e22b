//! The six glued-frame scenes shared by the integration suites.
//!
//! Each pairs two framed curves along one space curve: circular cylinders
//! along a helix, a cylinder against a half cone, a sphere band against a
//! plane band, two tilted bands with explicitly supplied frames, and two
//! sheets through a cusp respectively a degree-four curve singularity.

use gluelocus::curvelang::{parse_expr, parse_map, Arity};
use gluelocus::frames::{FramedCurve, SingularParam};
use gluelocus::glue::GlueScene;
use std::sync::Arc;

pub const SAMPLES: usize = 201;

pub fn from_surface(src: &str, interval: (f64, f64), sites: &[SingularParam]) -> Arc<FramedCurve> {
    Arc::new(
        FramedCurve::from_surface(parse_map(src, Arity::Surface).unwrap(), 1, interval, sites)
            .unwrap(),
    )
}

fn explicit(gamma: &str, e: &str, nu: &str, l: &str, interval: (f64, f64)) -> Arc<FramedCurve> {
    Arc::new(
        FramedCurve::explicit(
            parse_map(gamma, Arity::Curve).unwrap(),
            parse_map(e, Arity::Curve).unwrap(),
            parse_map(nu, Arity::Curve).unwrap(),
            parse_expr(l, Arity::Curve).unwrap(),
            interval,
            &[],
        )
        .unwrap(),
    )
}

fn site(t0: f64, multiplicity: usize) -> [SingularParam; 1] {
    [SingularParam { t0, multiplicity }]
}

/// Bands of two circular cylinders meeting along a helix. The rotation
/// angle varies and its principal value wraps inside the interval.
pub fn helix_cylinders() -> GlueScene {
    let interval = (-1.2, 1.2);
    let fc1 = from_surface("[cos(u), sin(u) + v, u]", interval, &[]);
    let fc2 = from_surface("[cos(u), sin(u), u + v]", interval, &[]);
    GlueScene::new(fc1, fc2, SAMPLES).unwrap()
}

/// A vertical cylinder band and a half-cone band through the same circle.
pub fn cylinder_cone() -> GlueScene {
    let interval = (-3.0, 3.0);
    let fc1 = from_surface("[cos(u), sin(u), v + 1]", interval, &[]);
    let fc2 = from_surface("[(v + 1)*cos(u), (v + 1)*sin(u), v + 1]", interval, &[]);
    GlueScene::new(fc1, fc2, SAMPLES).unwrap()
}

/// A band of the unit sphere and a plane band along the equator; the
/// frames sit at a constant right angle.
pub fn sphere_plane() -> GlueScene {
    let interval = (0.25, 2.9);
    let fc1 = from_surface(
        "[sin(v + pi/2)*cos(u), sin(v + pi/2)*sin(u), cos(v + pi/2)]",
        interval,
        &[],
    );
    let fc2 = from_surface("[cos(u), v + sin(u), 0]", interval, &[]);
    GlueScene::new(fc1, fc2, SAMPLES).unwrap()
}

/// Two explicitly framed bands along a horizontal circle at height √2/2,
/// a constant 3π/4 apart; both frames come straight from formulas instead
/// of surface extraction.
pub fn tilted_bands() -> GlueScene {
    let interval = (0.25, 2.9);
    let gamma = "[sqrt2/2*cos(u), sqrt2/2*sin(u), sqrt2/2]";
    let e = "[-sin(u), cos(u), 0]";
    let fc1 = explicit(gamma, e, "[0, 0, 1]", "sqrt2/2", interval);
    let fc2 = explicit(
        gamma,
        e,
        "[cos(u)/sqrt2, sin(u)/sqrt2, -1/sqrt2]",
        "sqrt2/2",
        interval,
    );
    GlueScene::new(fc1, fc2, SAMPLES).unwrap()
}

/// A plane sheet and a space sheet glued along the cusp (u², u³, 0).
pub fn cusp_sheets() -> GlueScene {
    let interval = (-0.8, 0.8);
    let fc1 = from_surface("[u^2, u^3 + v, 0]", interval, &site(0.0, 1));
    let fc2 = from_surface("[u^2 + v, u^3 + 1.5*u*v + v, v]", interval, &site(0.0, 1));
    GlueScene::new(fc1, fc2, SAMPLES).unwrap()
}

/// Two sheets along (0, 4u³, 3u⁴), whose velocity vanishes to second order.
pub fn quartic_sheets() -> GlueScene {
    let interval = (-0.8, 0.8);
    let fc1 = from_surface("[0, 4*u^3 + v, 3*u^4]", interval, &site(0.0, 2));
    let fc2 = from_surface(
        "[v, 4*u^3 + 2*u*v + v^2, 3*u^4 + u^2*v - v^2]",
        interval,
        &site(0.0, 2),
    );
    GlueScene::new(fc1, fc2, SAMPLES).unwrap()
}

pub fn all() -> Vec<(&'static str, GlueScene)> {
    vec![
        ("helix_cylinders", helix_cylinders()),
        ("cylinder_cone", cylinder_cone()),
        ("sphere_plane", sphere_plane()),
        ("tilted_bands", tilted_bands()),
        ("cusp_sheets", cusp_sheets()),
        ("quartic_sheets", quartic_sheets()),
    ]
}
