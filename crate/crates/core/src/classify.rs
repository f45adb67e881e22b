//! Shape of a developable over its interval and the local form of its
//! singular points.
//!
//! Two decision routes are deliberately kept separate. At a point of the
//! striction locus the pair `(ρ, ρ')` decides between cuspidal edge and
//! swallowtail. At a point where the speed `l` vanishes — the curve itself
//! stops — the same decision is reachable from `l'`, `l''` and the frame
//! curvatures alone, without ever forming the striction locus. Where both
//! routes apply they must agree, and the tests hold them to that.

use crate::developables::{DevelopableSurface, RulingKind, SurfaceError, ZERO_TOL};
use crate::frames::{FrameError, FramedCurve};

/// Global shape of one developable over the sampled interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceShape {
    /// The ruling never turns (`β ≡ 0`); no striction locus exists.
    Cylinder,
    /// The ruling turns but every ruling passes through one fixed point
    /// (`β ≢ 0`, `ρ ≡ 0`); the striction image degenerates to the apex.
    Cone,
    /// Neither degeneracy holds on the whole interval.
    Generic,
}

/// Shape verdict together with the sampled maxima that justify it.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceClass {
    pub shape: SurfaceShape,
    pub beta_max: f64,
    pub rho_max: f64,
}

/// Local normal form at one singular surface point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularPointLabel {
    CuspidalEdge,
    Swallowtail,
    /// The classified cases are exhausted (`ρ = ρ' = 0` there).
    Degenerate,
    /// The speed-degenerate tests are inconclusive at this point.
    Unresolved,
}

impl SingularPointLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SingularPointLabel::CuspidalEdge => "cuspidal edge",
            SingularPointLabel::Swallowtail => "swallowtail",
            SingularPointLabel::Degenerate => "degenerate",
            SingularPointLabel::Unresolved => "unresolved",
        }
    }
}

/// Label with the diagnostics that produced it. `eta_lambda` and
/// `eta_eta_lambda` come from the direct route (η applied to the affine
/// identifier), so they stay meaningful even when `β = 0` kills the
/// closed forms.
#[derive(Debug, Clone, Copy)]
pub struct SingularityLabel {
    pub label: SingularPointLabel,
    pub rho: f64,
    pub rho_prime: f64,
    pub eta_lambda: f64,
    pub eta_eta_lambda: f64,
}

/// Outcome of the front test at one parameter.
#[derive(Debug, Clone, Copy)]
pub struct FrontCheck {
    /// Rank-two test of the combined point-and-unit-normal map, sampled at
    /// several points of the ruling.
    pub is_front: bool,
    /// Sufficient condition at the same parameter: the curvature pair of
    /// this ruling is nonzero and the ruling actually turns (`β ≠ 0`).
    /// Implies `is_front`; the converse can fail, e.g. on cylinders.
    pub hypothesis_met: bool,
    /// Smallest Gram determinant seen by the rank test.
    pub gram_min: f64,
}

/// Ruling offsets at which the rank test samples the Gram determinant.
const FRONT_OFFSETS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Decide cylinder / cone / generic by sweeping `β` and `ρ` over the
/// interval. "Identically zero" means below `ZERO_TOL` scaled by the
/// largest invariant magnitude seen on the sweep.
pub fn classify_surface(
    surface: &DevelopableSurface,
    samples: usize,
) -> Result<SurfaceClass, SurfaceError> {
    classify_surface_with_tol(surface, samples, None)
}

/// [`classify_surface`] with the zero threshold replaced by an explicit
/// absolute tolerance instead of the scaled default.
pub fn classify_surface_with_tol(
    surface: &DevelopableSurface,
    samples: usize,
    tol_override: Option<f64>,
) -> Result<SurfaceClass, SurfaceError> {
    assert!(samples >= 2);
    let (t0, t1) = surface.interval();
    let step = (t1 - t0) / (samples - 1) as f64;
    let mut beta_max = 0.0f64;
    let mut rho_max = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..samples {
        let data = surface.data(t0 + step * i as f64)?;
        beta_max = beta_max.max(data.beta.value().abs());
        rho_max = rho_max.max(data.rho.value().abs());
        scale = scale.max(data.magnitude());
    }
    let tol = tol_override.unwrap_or(ZERO_TOL * (1.0 + scale));
    let shape = if beta_max <= tol {
        SurfaceShape::Cylinder
    } else if rho_max <= tol {
        SurfaceShape::Cone
    } else {
        SurfaceShape::Generic
    };
    Ok(SurfaceClass {
        shape,
        beta_max,
        rho_max,
    })
}

/// Classify the singular point on the striction locus at parameter `t`:
/// cuspidal edge when `ρ ≠ 0`, swallowtail when `ρ = 0 ≠ ρ'`, degenerate
/// otherwise. Fails on cylindrical surfaces, which have no striction locus.
pub fn classify_singularity(
    surface: &DevelopableSurface,
    t: f64,
) -> Result<SingularityLabel, SurfaceError> {
    let s = surface.striction(t)?.s;
    let data = surface.data(t)?;
    let rho = data.rho.value();
    let rho_prime = data.rho.derivative_value(1);
    let tol = ZERO_TOL * (1.0 + data.magnitude());
    let label = if rho.abs() > tol {
        SingularPointLabel::CuspidalEdge
    } else if rho_prime.abs() > tol {
        SingularPointLabel::Swallowtail
    } else {
        SingularPointLabel::Degenerate
    };
    Ok(SingularityLabel {
        label,
        rho,
        rho_prime,
        eta_lambda: surface.eta_lambda_at(t, s)?,
        eta_eta_lambda: surface.eta_eta_lambda_at(t, s)?,
    })
}

/// Classify the point `(t, 0)` — on the curve itself — when the speed `l`
/// vanishes there. The test reads `l'`, `l''` and the curvatures only, so
/// it also covers cylindrical surfaces:
///
/// * cuspidal edge  iff `l'·κ ≠ 0`,
/// * swallowtail    iff `l' = 0` and `κ·l'' ≠ 0`, or `κ = 0` and
///   `l'·(cross) ≠ 0`,
///
/// where `κ` is the co-ruling curvature of this surface (`κ₁` for ν-ruled,
/// `κ₂` for b-ruled) and `cross` is `κ₂κ₃ + 3κ₁'` resp. `κ₁κ₃ - 3κ₂'`.
/// Anything else is reported unresolved.
pub fn classify_singularity_l0(
    surface: &DevelopableSurface,
    t: f64,
) -> Result<SingularityLabel, SurfaceError> {
    let data = surface.data(t)?;
    let tol = ZERO_TOL * (1.0 + data.magnitude());
    let l = data.l.value();
    let lp = data.l.derivative_value(1);
    let lpp = data.l.derivative_value(2);
    let ka = data.ka.value();
    let kap = data.ka.derivative_value(1);
    let k3 = data.kappa3.value();
    let cross = match surface.kind() {
        RulingKind::Nu => data.kappa2.value() * k3 + 3.0 * kap,
        RulingKind::B => data.kappa1.value() * k3 - 3.0 * kap,
    };
    if l.abs() > tol {
        return Err(SurfaceError::SpeedNonzero { t, l });
    }
    let label = if (lp * ka).abs() > tol {
        SingularPointLabel::CuspidalEdge
    } else if lp.abs() <= tol && (ka * lpp).abs() > tol {
        SingularPointLabel::Swallowtail
    } else if ka.abs() <= tol && (lp * cross).abs() > tol {
        SingularPointLabel::Swallowtail
    } else {
        SingularPointLabel::Unresolved
    };
    Ok(SingularityLabel {
        label,
        rho: data.rho.value(),
        rho_prime: data.rho.derivative_value(1),
        eta_lambda: surface.eta_lambda_at(t, 0.0)?,
        eta_eta_lambda: surface.eta_eta_lambda_at(t, 0.0)?,
    })
}

/// Front test at parameter `t` for the chosen ruling, phrased directly on
/// the framed curve so it stays callable where the ruling hypothesis fails
/// and no surface can be built.
///
/// The direct route embeds the surface together with its unit normal as a
/// map into six dimensions and checks rank two through Gram determinants
/// along the ruling; the hypothesis route tests the curvature pair and the
/// turning speed `β`. The rank test runs whenever the pair admits it, so a
/// flat verdict is still returned when the sufficient condition fails.
pub fn front_check(
    fc: &FramedCurve,
    kind: RulingKind,
    t: f64,
) -> Result<FrontCheck, FrameError> {
    let f = fc.frame_jets(t, 3)?;
    let e_prime = f.e.derivative();
    let nu_prime = f.nu.derivative();
    let e = f.e.truncated(2);
    let nu = f.nu.truncated(2);
    let b = f.b.truncated(2);
    let kappa1 = e_prime.dot(&nu);
    let kappa2 = e_prime.dot(&b);
    let kappa3 = nu_prime.dot(&b);
    let (ka, n) = match kind {
        RulingKind::Nu => (kappa1.clone(), f.nu.clone()),
        RulingKind::B => (kappa2.clone(), f.b.clone()),
    };
    let q2 = ka.mul(&ka).add(&kappa3.mul(&kappa3));
    let scale = [
        kappa1.value(),
        kappa2.value(),
        kappa3.value(),
        kappa1.derivative_value(1),
        kappa2.derivative_value(1),
        kappa3.derivative_value(1),
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = ZERO_TOL * (1.0 + scale);
    let (k1, k2, k3) = (kappa1.value(), kappa2.value(), kappa3.value());
    let (k1p, k2p, k3p) = (
        kappa1.derivative_value(1),
        kappa2.derivative_value(1),
        kappa3.derivative_value(1),
    );
    let beta = match kind {
        RulingKind::Nu => k1 * k1 * k2 + k2 * k3 * k3 + k1p * k3 - k1 * k3p,
        RulingKind::B => k1 * k2 * k2 + k1 * k3 * k3 + k2 * k3p - k2p * k3,
    };
    let pair_met = q2.value() > tol * tol;
    let hypothesis_met = pair_met && beta.abs() > tol;
    if !pair_met {
        return Ok(FrontCheck {
            is_front: false,
            hypothesis_met,
            gram_min: 0.0,
        });
    }

    let q = q2.try_sqrt().expect("positive by the check above");
    let delta = match kind {
        RulingKind::Nu => e.scale_jet(&kappa3).add(&b.scale_jet(&ka)),
        RulingKind::B => e.scale_jet(&kappa3).sub(&nu.scale_jet(&ka)),
    }
    .try_div_jet(&q)
    .expect("q nonzero");

    let gamma_t = f.gamma.derivative().value();
    let delta_t = delta.derivative().value();
    let n_t = n.derivative().value();
    let d = delta.value();
    let mut gram_min = f64::INFINITY;
    for &a in &FRONT_OFFSETS {
        let lt = [
            gamma_t[0] + a * delta_t[0],
            gamma_t[1] + a * delta_t[1],
            gamma_t[2] + a * delta_t[2],
            n_t[0],
            n_t[1],
            n_t[2],
        ];
        let la = [d[0], d[1], d[2], 0.0, 0.0, 0.0];
        let g11: f64 = lt.iter().map(|x| x * x).sum();
        let g12: f64 = lt.iter().zip(&la).map(|(x, y)| x * y).sum();
        let g22: f64 = la.iter().map(|x| x * x).sum();
        gram_min = gram_min.min(g11 * g22 - g12 * g12);
    }
    Ok(FrontCheck {
        is_front: gram_min > tol * tol,
        hypothesis_met,
        gram_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvelang::{parse_map, Arity};
    use crate::frames::SingularParam;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn fc(src: &str, orientation: i8, interval: (f64, f64)) -> Arc<FramedCurve> {
        fc_sites(src, orientation, interval, &[])
    }

    fn fc_sites(
        src: &str,
        orientation: i8,
        interval: (f64, f64),
        sites: &[SingularParam],
    ) -> Arc<FramedCurve> {
        Arc::new(
            FramedCurve::from_surface(
                parse_map(src, Arity::Surface).unwrap(),
                orientation,
                interval,
                sites,
            )
            .unwrap(),
        )
    }

    fn cusp_fc() -> Arc<FramedCurve> {
        fc_sites(
            "[u^2 + v, u^3 + 1.5*u*v + v, v]",
            1,
            (-0.8, 0.8),
            &[SingularParam {
                t0: 0.0,
                multiplicity: 1,
            }],
        )
    }

    fn quartic_fc() -> Arc<FramedCurve> {
        fc_sites(
            "[v, 4*u^3 + 2*u*v + v^2, 3*u^4 + u^2*v - v^2]",
            1,
            (-0.8, 0.8),
            &[SingularParam {
                t0: 0.0,
                multiplicity: 2,
            }],
        )
    }

    #[test]
    fn helix_strip_is_a_cylinder() {
        let s = DevelopableSurface::build(
            fc("[cos(u), sin(u), u + v]", 1, (0.0, 6.0)),
            RulingKind::Nu,
            64,
        )
        .unwrap();
        let class = classify_surface(&s, 64).unwrap();
        assert_eq!(class.shape, SurfaceShape::Cylinder);
        assert!(class.beta_max < 1e-12);
    }

    #[test]
    fn half_cone_is_a_cone() {
        let s = DevelopableSurface::build(
            fc("[(v + 1)*cos(u), (v + 1)*sin(u), v + 1]", 1, (-3.0, 3.0)),
            RulingKind::Nu,
            64,
        )
        .unwrap();
        let class = classify_surface(&s, 64).unwrap();
        assert_eq!(class.shape, SurfaceShape::Cone);
        assert_relative_eq!(class.beta_max, 1.0 / (2.0 * 2f64.sqrt()), epsilon = 1e-12);
        assert!(class.rho_max < 1e-12);
    }

    #[test]
    fn cusp_point_is_an_edge_by_the_speed_route() {
        let s = DevelopableSurface::build(cusp_fc(), RulingKind::Nu, 201).unwrap();
        assert_eq!(
            classify_surface(&s, 201).unwrap().shape,
            SurfaceShape::Cylinder
        );
        // No striction locus, so the ρ-route is out of reach here…
        assert!(matches!(
            classify_singularity(&s, 0.0),
            Err(SurfaceError::CylindricalAt { .. })
        ));
        // …but the speed route still labels the cusp.
        let lab = classify_singularity_l0(&s, 0.0).unwrap();
        assert_eq!(lab.label, SingularPointLabel::CuspidalEdge);
        assert_relative_eq!(lab.eta_lambda, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn cusp_point_labels_agree_across_routes_on_the_other_ruling() {
        let s = DevelopableSurface::build(cusp_fc(), RulingKind::B, 201).unwrap();
        assert_eq!(
            classify_surface(&s, 201).unwrap().shape,
            SurfaceShape::Generic
        );
        // The striction locus passes through the cusp (s(0) = 0), so both
        // routes see the same point and must produce the same label.
        assert!(s.striction(0.0).unwrap().s.abs() < 1e-12);
        let via_rho = classify_singularity(&s, 0.0).unwrap();
        let via_speed = classify_singularity_l0(&s, 0.0).unwrap();
        assert_eq!(via_rho.label, SingularPointLabel::CuspidalEdge);
        assert_eq!(via_speed.label, SingularPointLabel::CuspidalEdge);
        assert_relative_eq!(via_rho.rho, -81.0 / 16.0, epsilon = 1e-10);
    }

    #[test]
    fn quartic_point_is_a_swallowtail_by_both_routes() {
        let s = DevelopableSurface::build(quartic_fc(), RulingKind::Nu, 201).unwrap();
        assert_eq!(
            classify_surface(&s, 201).unwrap().shape,
            SurfaceShape::Generic
        );
        let via_rho = classify_singularity(&s, 0.0).unwrap();
        assert_eq!(via_rho.label, SingularPointLabel::Swallowtail);
        assert!(via_rho.rho.abs() < 1e-10);
        assert_relative_eq!(via_rho.rho_prime, -48.0, epsilon = 1e-9);
        assert_relative_eq!(via_rho.eta_eta_lambda, 24.0, epsilon = 1e-9);
        let via_speed = classify_singularity_l0(&s, 0.0).unwrap();
        assert_eq!(via_speed.label, SingularPointLabel::Swallowtail);
    }

    #[test]
    fn speed_route_rejects_nonvanishing_speed() {
        let s = DevelopableSurface::build(cusp_fc(), RulingKind::B, 201).unwrap();
        assert!(matches!(
            classify_singularity_l0(&s, 0.4),
            Err(SurfaceError::SpeedNonzero { .. })
        ));
    }

    #[test]
    fn front_test_runs_even_where_the_sufficient_condition_fails() {
        let disk = fc("[(1 - v)*cos(u), (1 - v)*sin(u), 0]", 1, (0.25, 2.9));
        // ν-ruling: curvature pair identically zero, no surface, no front.
        let nu = front_check(&disk, RulingKind::Nu, 1.0).unwrap();
        assert!(!nu.hypothesis_met && !nu.is_front);
        assert!(matches!(
            DevelopableSurface::build(disk.clone(), RulingKind::Nu, 16),
            Err(SurfaceError::AssumptionViolated { .. })
        ));
        // b-ruling: the pair is fine but the ruling never turns, so the
        // sufficient condition fails — yet the rank test still certifies
        // a front.
        let b = front_check(&disk, RulingKind::B, 1.0).unwrap();
        assert!(!b.hypothesis_met && b.is_front);
        assert!(b.gram_min > 0.5);

        // Along a curve with a genuine singular point: the cylindrical
        // ν-ruling again passes the rank test without the hypothesis,
        // while the turning b-ruling satisfies both.
        for &t in &[-0.5, 0.0, 0.4] {
            let nu = front_check(cusp_fc().as_ref(), RulingKind::Nu, t).unwrap();
            assert!(!nu.hypothesis_met && nu.is_front);
            let b = front_check(cusp_fc().as_ref(), RulingKind::B, t).unwrap();
            assert!(b.hypothesis_met && b.is_front);
        }
    }
}
