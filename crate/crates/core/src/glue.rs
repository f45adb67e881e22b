//! Two orthonormal frames glued along a shared curve with a shared tangent,
//! related pointwise by a rotation about the tangent line.
//!
//! The rotation angle θ(t) is recovered from the frames as
//! `atan2(ν₂·b₁, ν₂·ν₁)` and lifted to a continuous branch over the
//! interval, so derivatives of θ are meaningful even where the principal
//! value wraps. Everything the second frame does can then be predicted from
//! the first frame and θ alone: the invariants transform as
//!
//! ```text
//! κ₂₁ = κ₁₁ cosθ + κ₁₂ sinθ,   κ₂₂ = -κ₁₁ sinθ + κ₁₂ cosθ,
//! κ₂₃ = κ₁₃ + θ',
//! ```
//!
//! and the ruling scalars β, ρ of the second frame's ν-ruled surface admit
//! expanded forms in first-frame data. Both predictions are kept as
//! independent routes next to the direct extraction from the second frame,
//! and the residual functions here measure their disagreement.

use crate::classify::{
    classify_singularity_l0, classify_surface_with_tol, SingularityLabel, SurfaceClass,
    SurfaceShape,
};
use crate::developables::{DevelopableSurface, RulingKind, SurfaceError};
use crate::frames::{FrameError, FrameInvariants, FramedCurve};
use crate::jets::{Jet, JetError};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

/// Agreement tolerance for the shared curve and tangent of the two frames.
const GLUE_TOL: f64 = 1e-10;

/// Tolerance for recognising a constant angle at a multiple of π/2.
const ANGLE_TOL: f64 = 1e-9;

/// Agreement tolerance between the expanded first-frame route to β, ρ and
/// the surface built directly from the second frame.
const EXPANDED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum GlueError {
    #[error("frames do not glue at t = {t}: {what} deviates by {deviation:e}")]
    Mismatch {
        t: f64,
        what: &'static str,
        deviation: f64,
    },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// The four developables a glued pair of frames spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSlot {
    Nu1,
    B1,
    Nu2,
    B2,
}

impl SurfaceSlot {
    pub const ALL: [SurfaceSlot; 4] = [
        SurfaceSlot::Nu1,
        SurfaceSlot::B1,
        SurfaceSlot::Nu2,
        SurfaceSlot::B2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceSlot::Nu1 => "S_nu1",
            SurfaceSlot::B1 => "S_b1",
            SurfaceSlot::Nu2 => "S_nu2",
            SurfaceSlot::B2 => "S_b2",
        }
    }

    pub fn ruling_kind(self) -> RulingKind {
        match self {
            SurfaceSlot::Nu1 | SurfaceSlot::Nu2 => RulingKind::Nu,
            SurfaceSlot::B1 | SurfaceSlot::B2 => RulingKind::B,
        }
    }

    /// Which of the two frames carries this surface.
    pub fn frame_index(self) -> usize {
        match self {
            SurfaceSlot::Nu1 | SurfaceSlot::B1 => 0,
            SurfaceSlot::Nu2 | SurfaceSlot::B2 => 1,
        }
    }
}

/// Per-slot verdict: either the ruling hypothesis failed everywhere checks
/// ran, or the surface was built and classified.
#[derive(Debug, Clone)]
pub enum SlotOutcome {
    Absent {
        reason: String,
    },
    Built {
        class: SurfaceClass,
        /// Apex of the cone, present exactly when the shape is conical;
        /// per-point labels are suppressed in that case.
        apex: Option<[f64; 3]>,
        /// Labels at the declared singular parameters, via the speed route.
        labels: Vec<(f64, SingularityLabel)>,
    },
}

#[derive(Debug, Clone)]
pub struct SlotVerdict {
    pub slot: SurfaceSlot,
    pub outcome: SlotOutcome,
}

#[derive(Debug, Clone)]
pub struct GlueClassification {
    pub slots: Vec<SlotVerdict>,
    /// Sweep maximum of the frame-rotation residual.
    pub rotation_residual_max: f64,
    /// Sweep maximum of the invariant-transport residual.
    pub invariant_residual_max: f64,
    /// Sweep maxima of the expanded-route disagreement for β and ρ of the
    /// second frame's ν-ruled surface; `None` when that surface is absent.
    pub expanded_beta_residual_max: Option<f64>,
    pub expanded_rho_residual_max: Option<f64>,
}

impl GlueClassification {
    pub fn slot(&self, slot: SurfaceSlot) -> &SlotOutcome {
        &self
            .slots
            .iter()
            .find(|v| v.slot == slot)
            .expect("all four slots are always present")
            .outcome
    }
}

/// A constant rotation angle sitting at a multiple of π/2, with the
/// resulting surface identifications checked.
#[derive(Debug, Clone, Copy)]
pub struct SpecialAngle {
    pub theta: f64,
    pub half_pi_multiple: i64,
    /// Whether the identified slots classified identically: for odd
    /// multiples ν₂↔b₁ and b₂↔ν₁, for even multiples ν₂↔ν₁ and b₂↔b₁.
    pub pairs_match: bool,
}

/// Two framed curves glued along the same curve and tangent.
#[derive(Debug, Clone)]
pub struct GlueScene {
    fc1: Arc<FramedCurve>,
    fc2: Arc<FramedCurve>,
    interval: (f64, f64),
    samples: usize,
    step: f64,
    /// Continuously lifted θ at the grid points.
    lifted: Vec<f64>,
}

impl GlueScene {
    /// Glue two frames, verifying on a sweep of `samples` parameters that
    /// they share curve and tangent, then lift θ continuously.
    pub fn new(
        fc1: Arc<FramedCurve>,
        fc2: Arc<FramedCurve>,
        samples: usize,
    ) -> Result<Self, GlueError> {
        assert!(samples >= 2);
        let interval = fc1.interval();
        let other = fc2.interval();
        let gap = (interval.0 - other.0).abs() + (interval.1 - other.1).abs();
        if gap > 0.0 {
            return Err(GlueError::Mismatch {
                t: interval.0,
                what: "parameter interval",
                deviation: gap,
            });
        }
        let step = (interval.1 - interval.0) / (samples - 1) as f64;
        let mut scene = GlueScene {
            fc1,
            fc2,
            interval,
            samples,
            step,
            lifted: Vec::with_capacity(samples),
        };
        let mut previous = 0.0;
        for i in 0..samples {
            let t = interval.0 + step * i as f64;
            scene.check_shared(t)?;
            let raw = scene.principal_theta(t)?;
            let lifted = if i == 0 {
                raw
            } else {
                raw + 2.0 * PI * ((previous - raw) / (2.0 * PI)).round()
            };
            scene.lifted.push(lifted);
            previous = lifted;
        }
        Ok(scene)
    }

    pub fn frames(&self) -> (&Arc<FramedCurve>, &Arc<FramedCurve>) {
        (&self.fc1, &self.fc2)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    fn check_shared(&self, t: f64) -> Result<(), GlueError> {
        let g1 = self.fc1.gamma_jet(t, 1)?.value();
        let g2 = self.fc2.gamma_jet(t, 1)?.value();
        let curve_gap = (0..3).fold(0.0f64, |m, i| m.max((g1[i] - g2[i]).abs()));
        if curve_gap > GLUE_TOL {
            return Err(GlueError::Mismatch {
                t,
                what: "curve",
                deviation: curve_gap,
            });
        }
        let e1 = self.fc1.e_jet(t, 1)?.value();
        let e2 = self.fc2.e_jet(t, 1)?.value();
        let tangent_gap = (0..3).fold(0.0f64, |m, i| m.max((e1[i] - e2[i]).abs()));
        if tangent_gap > GLUE_TOL {
            return Err(GlueError::Mismatch {
                t,
                what: "tangent",
                deviation: tangent_gap,
            });
        }
        Ok(())
    }

    /// `(sinθ, cosθ)` as jets: `ν₂·b₁` and `ν₂·ν₁`.
    fn angle_pair(&self, t: f64, order: usize) -> Result<(Jet, Jet), GlueError> {
        let nu2 = self.fc2.nu_jet(t, order)?;
        let f1 = self.fc1.frame_jets(t, order)?;
        Ok((nu2.dot(&f1.b), nu2.dot(&f1.nu)))
    }

    fn principal_theta(&self, t: f64) -> Result<f64, GlueError> {
        let (s, c) = self.angle_pair(t, 1)?;
        Ok(s.value().atan2(c.value()))
    }

    /// Index of the grid point nearest to `t`.
    fn grid_index(&self, t: f64) -> usize {
        let i = ((t - self.interval.0) / self.step).round();
        (i.max(0.0) as usize).min(self.samples - 1)
    }

    /// Signed rotation angle, on the branch chosen by the continuous lift.
    pub fn theta(&self, t: f64) -> Result<f64, GlueError> {
        let raw = self.principal_theta(t)?;
        let anchor = self.lifted[self.grid_index(t)];
        Ok(raw + 2.0 * PI * ((anchor - raw) / (2.0 * PI)).round())
    }

    /// Jet of θ at `t` on the lifted branch.
    pub fn theta_jet(&self, t: f64, order: usize) -> Result<Jet, GlueError> {
        let (s, c) = self.angle_pair(t, order)?;
        let principal = Jet::atan2_pair(&s, &c)?;
        let anchor = self.lifted[self.grid_index(t)];
        let shift = 2.0 * PI * ((anchor - principal.value()) / (2.0 * PI)).round();
        let mut coeffs = principal.coeffs().to_vec();
        coeffs[0] += shift;
        Ok(Jet::from_coeffs(t, coeffs))
    }

    /// Second-frame invariants predicted from the first frame and θ.
    pub fn rotated_invariants(&self, t: f64, order: usize) -> Result<FrameInvariants, GlueError> {
        let fi = self.fc1.invariants(t, order + 1)?;
        let theta = self.theta_jet(t, order + 1)?;
        let (sin, cos) = theta.sin_cos();
        let s = sin.truncated(order);
        let c = cos.truncated(order);
        let tp = theta.derivative();
        let k11 = fi.kappa1.truncated(order);
        let k12 = fi.kappa2.truncated(order);
        let k13 = fi.kappa3.truncated(order);
        Ok(FrameInvariants {
            kappa1: k11.mul(&c).add(&k12.mul(&s)),
            kappa2: k12.mul(&c).sub(&k11.mul(&s)),
            kappa3: k13.add(&tp),
            l: fi.l.truncated(order),
        })
    }

    /// Largest disagreement between the rotated first-frame invariants and
    /// the invariants extracted from the second frame directly.
    pub fn invariant_residual(&self, t: f64) -> Result<f64, GlueError> {
        let predicted = self.rotated_invariants(t, 1)?;
        let direct = self.fc2.invariants(t, 1)?;
        Ok([
            (predicted.kappa1.value() - direct.kappa1.value()).abs(),
            (predicted.kappa2.value() - direct.kappa2.value()).abs(),
            (predicted.kappa3.value() - direct.kappa3.value()).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    }

    /// Largest component residual of the frame rotation
    /// `ν₂ = cosθ·ν₁ + sinθ·b₁`, `b₂ = cosθ·b₁ - sinθ·ν₁`.
    pub fn rotation_residual(&self, t: f64) -> Result<f64, GlueError> {
        let f1 = self.fc1.frame_jets(t, 1)?;
        let f2 = self.fc2.frame_jets(t, 1)?;
        let theta = self.theta(t)?;
        let (s, c) = theta.sin_cos();
        let nu1 = f1.nu.value();
        let b1 = f1.b.value();
        let nu2 = f2.nu.value();
        let b2 = f2.b.value();
        let mut worst = 0.0f64;
        for i in 0..3 {
            worst = worst.max((nu2[i] - (c * nu1[i] + s * b1[i])).abs());
            worst = worst.max((b2[i] - (c * b1[i] - s * nu1[i])).abs());
        }
        Ok(worst)
    }

    /// β and ρ of the second frame's ν-ruled surface in their expanded
    /// first-frame forms:
    ///
    /// ```text
    /// β  = κ₂₂κ₂₁² + (κ₁₃+θ')[κ₂₂(κ₁₃+2θ') + κ₁₁'cosθ + κ₁₂'sinθ]
    ///      - κ₂₁(κ₁₃'+θ''),
    /// ρ  = l[βκ₂₂(κ₁₃+θ') + 2β(θ'κ₂₂ + κ₁₁'cosθ + κ₁₂'sinθ) - β'κ₂₁]
    ///      + l'βκ₂₁,
    /// ```
    ///
    /// with κ₂₁, κ₂₂ the rotated combinations of κ₁₁, κ₁₂. Nothing here
    /// touches the second frame, so the result can be held against the
    /// surface built from it.
    pub fn expanded_shape_scalars(&self, t: f64) -> Result<(Jet, Jet), GlueError> {
        let fi = self.fc1.invariants(t, 6)?;
        let theta = self.theta_jet(t, 6)?;
        let o = 5;
        let (sin, cos) = theta.sin_cos();
        let s = sin.truncated(o);
        let c = cos.truncated(o);
        let tp = theta.derivative();
        let k11 = fi.kappa1.truncated(o);
        let k12 = fi.kappa2.truncated(o);
        let k13 = fi.kappa3.truncated(o);
        let k11p = fi.kappa1.derivative();
        let k12p = fi.kappa2.derivative();
        let k21 = k11.mul(&c).add(&k12.mul(&s));
        let k22 = k12.mul(&c).sub(&k11.mul(&s));
        let k23 = k13.add(&tp);
        let mix = k11p.mul(&c).add(&k12p.mul(&s));

        let bo = 4;
        let k23p = k23.derivative();
        let beta = k22
            .truncated(bo)
            .mul(&k21.truncated(bo))
            .mul(&k21.truncated(bo))
            .add(&k23.truncated(bo).mul(
                &k22.truncated(bo)
                    .mul(&k13.truncated(bo).add(&tp.truncated(bo).scale(2.0)))
                    .add(&mix.truncated(bo)),
            ))
            .sub(&k21.truncated(bo).mul(&k23p));

        let ro = 3;
        let beta_p = beta.derivative();
        let beta_r = beta.truncated(ro);
        let l = fi.l.truncated(ro);
        let lp = fi.l.derivative().truncated(ro);
        let bracket = beta_r
            .mul(&k22.truncated(ro))
            .mul(&k23.truncated(ro))
            .add(
                &beta_r.scale(2.0).mul(
                    &tp.truncated(ro)
                        .mul(&k22.truncated(ro))
                        .add(&mix.truncated(ro)),
                ),
            )
            .sub(&beta_p.mul(&k21.truncated(ro)));
        let rho = l.mul(&bracket).add(&lp.mul(&beta_r).mul(&k21.truncated(ro)));
        Ok((beta, rho))
    }

    fn frame_for(&self, slot: SurfaceSlot) -> &Arc<FramedCurve> {
        if slot.frame_index() == 0 {
            &self.fc1
        } else {
            &self.fc2
        }
    }

    /// Build the developable in one slot, if its ruling hypothesis holds.
    pub fn surface(&self, slot: SurfaceSlot) -> Result<DevelopableSurface, SurfaceError> {
        DevelopableSurface::build(self.frame_for(slot).clone(), slot.ruling_kind(), self.samples)
    }

    /// Classify all four slots. A violated ruling hypothesis marks the slot
    /// absent rather than failing the scene; cones report their apex and
    /// suppress per-point labels, every other built shape labels the
    /// declared singular parameters through the speed route.
    ///
    /// The sweep also holds the rotation, invariant-transport and expanded
    /// β/ρ routes against the direct extraction; an expanded-route
    /// disagreement beyond tolerance fails the classification outright.
    pub fn classify(&self) -> Result<GlueClassification, GlueError> {
        self.classify_with_tol(None)
    }

    /// [`GlueScene::classify`] with an explicit absolute tolerance for the
    /// "identically zero" shape decisions.
    pub fn classify_with_tol(
        &self,
        tol_override: Option<f64>,
    ) -> Result<GlueClassification, GlueError> {
        let mut slots = Vec::with_capacity(4);
        for slot in SurfaceSlot::ALL {
            let surface = match self.surface(slot) {
                Ok(surface) => surface,
                Err(err @ SurfaceError::AssumptionViolated { .. }) => {
                    slots.push(SlotVerdict {
                        slot,
                        outcome: SlotOutcome::Absent {
                            reason: err.to_string(),
                        },
                    });
                    continue;
                }
                Err(other) => return Err(other.into()),
            };
            let class = classify_surface_with_tol(&surface, self.samples, tol_override)?;
            let apex = if class.shape == SurfaceShape::Cone {
                Some(self.cone_apex(&surface)?)
            } else {
                None
            };
            let labels = if class.shape == SurfaceShape::Cone {
                Vec::new()
            } else {
                let mut labels = Vec::new();
                for site in self.frame_for(slot).singular_params() {
                    labels.push((site.t0, classify_singularity_l0(&surface, site.t0)?));
                }
                labels
            };
            slots.push(SlotVerdict {
                slot,
                outcome: SlotOutcome::Built {
                    class,
                    apex,
                    labels,
                },
            });
        }

        let mut rotation_residual_max = 0.0f64;
        let mut invariant_residual_max = 0.0f64;
        for i in 0..self.samples {
            let t = self.interval.0 + self.step * i as f64;
            rotation_residual_max = rotation_residual_max.max(self.rotation_residual(t)?);
            invariant_residual_max = invariant_residual_max.max(self.invariant_residual(t)?);
        }

        let (expanded_beta_residual_max, expanded_rho_residual_max) =
            match self.surface(SurfaceSlot::Nu2) {
                Ok(nu2) => {
                    let mut beta_gap = 0.0f64;
                    let mut rho_gap = 0.0f64;
                    let mut worst_t = self.interval.0;
                    let mut scale = 0.0f64;
                    for i in 0..self.samples {
                        let t = self.interval.0 + self.step * i as f64;
                        let (beta, rho) = self.expanded_shape_scalars(t)?;
                        let beta_direct = nu2.beta(t)?;
                        let rho_direct = nu2.rho(t)?;
                        let gap = (beta.value() - beta_direct)
                            .abs()
                            .max((rho.value() - rho_direct).abs());
                        if gap > beta_gap.max(rho_gap) {
                            worst_t = t;
                        }
                        beta_gap = beta_gap.max((beta.value() - beta_direct).abs());
                        rho_gap = rho_gap.max((rho.value() - rho_direct).abs());
                        scale = scale.max(beta_direct.abs()).max(rho_direct.abs());
                    }
                    let tol = EXPANDED_TOL * (1.0 + scale);
                    if beta_gap.max(rho_gap) > tol {
                        return Err(GlueError::Mismatch {
                            t: worst_t,
                            what: "expanded ruling scalars",
                            deviation: beta_gap.max(rho_gap),
                        });
                    }
                    (Some(beta_gap), Some(rho_gap))
                }
                Err(SurfaceError::AssumptionViolated { .. }) => (None, None),
                Err(other) => return Err(other.into()),
            };

        Ok(GlueClassification {
            slots,
            rotation_residual_max,
            invariant_residual_max,
            expanded_beta_residual_max,
            expanded_rho_residual_max,
        })
    }

    /// Striction image of a conical surface: the first defined striction
    /// point of the sweep. Constancy over the sweep is a checked property,
    /// not assumed here.
    fn cone_apex(&self, surface: &DevelopableSurface) -> Result<[f64; 3], GlueError> {
        let step = (self.interval.1 - self.interval.0) / (self.samples - 1) as f64;
        for i in 0..self.samples {
            let t = self.interval.0 + step * i as f64;
            match surface.striction(t) {
                Ok(point) => return Ok(point.sigma),
                Err(SurfaceError::CylindricalAt { .. }) => continue,
                Err(other) => return Err(other.into()),
            }
        }
        unreachable!("a cone has β ≠ 0 somewhere on the sweep")
    }

    /// Detect a constant θ at a multiple of π/2 and, if present, check the
    /// resulting surface identifications against `classification`: odd
    /// multiples swap the ν- and b-surfaces across the frames, even
    /// multiples identify them directly.
    pub fn special_angle(
        &self,
        classification: &GlueClassification,
    ) -> Result<Option<SpecialAngle>, GlueError> {
        let mean = self.lifted.iter().sum::<f64>() / self.lifted.len() as f64;
        let spread = self
            .lifted
            .iter()
            .fold(0.0f64, |m, v| m.max((v - mean).abs()));
        let tol = ANGLE_TOL * (1.0 + mean.abs());
        if spread > tol {
            return Ok(None);
        }
        let multiple = (mean / (PI / 2.0)).round();
        if (mean - multiple * PI / 2.0).abs() > tol {
            return Ok(None);
        }
        let k = multiple as i64;
        let pairs = if k.rem_euclid(2) != 0 {
            [
                (SurfaceSlot::Nu2, SurfaceSlot::B1),
                (SurfaceSlot::B2, SurfaceSlot::Nu1),
            ]
        } else {
            [
                (SurfaceSlot::Nu2, SurfaceSlot::Nu1),
                (SurfaceSlot::B2, SurfaceSlot::B1),
            ]
        };
        let pairs_match = pairs.iter().all(|(a, b)| {
            outcomes_equivalent(classification.slot(*a), classification.slot(*b))
        });
        Ok(Some(SpecialAngle {
            theta: mean,
            half_pi_multiple: k,
            pairs_match,
        }))
    }
}

/// Residual of the quarter-turn identity at `t`: rotating a frame by π/2
/// about the tangent swaps the roles of its two rulings, so the b-ruling
/// direction must equal the ν-ruling construction applied to the rotated
/// frame. The rotated side goes through the transport formulas with
/// θ = π/2 rather than through the algebraic simplification, which keeps
/// the two routes independent. Errors when the b-ruling pair vanishes.
pub fn quarter_turn_ruling_residual(fc: &FramedCurve, t: f64) -> Result<f64, GlueError> {
    use crate::developables::ZERO_TOL;
    let f = fc.frame_jets(t, 1)?;
    let fi = fc.invariants(t, 1)?;
    let (k1, k2, k3) = (fi.kappa1.value(), fi.kappa2.value(), fi.kappa3.value());
    let scale = k1.abs().max(k2.abs()).max(k3.abs());
    let tol = ZERO_TOL * (1.0 + scale);
    if k2 * k2 + k3 * k3 <= tol * tol {
        return Err(SurfaceError::AssumptionViolated {
            t,
            pair: RulingKind::B.pair_name(),
        }
        .into());
    }
    let e = f.e.value();
    let nu = f.nu.value();
    let b = f.b.value();

    let q = (k2 * k2 + k3 * k3).sqrt();
    let direct: [f64; 3] = std::array::from_fn(|i| (k3 * e[i] - k2 * nu[i]) / q);

    let (s, c) = (PI / 2.0).sin_cos();
    let k1_rot = k1 * c + k2 * s;
    let k3_rot = k3; // θ is constant, so κ₃ is untouched
    let b_rot: [f64; 3] = std::array::from_fn(|i| c * b[i] - s * nu[i]);
    let q_rot = (k1_rot * k1_rot + k3_rot * k3_rot).sqrt();
    let rotated: [f64; 3] = std::array::from_fn(|i| (k3_rot * e[i] + k1_rot * b_rot[i]) / q_rot);

    Ok((0..3).fold(0.0f64, |m, i| m.max((direct[i] - rotated[i]).abs())))
}

/// Same classification in both slots: absent matches absent, built matches
/// built with equal shape and equal point labels.
fn outcomes_equivalent(a: &SlotOutcome, b: &SlotOutcome) -> bool {
    match (a, b) {
        (SlotOutcome::Absent { .. }, SlotOutcome::Absent { .. }) => true,
        (
            SlotOutcome::Built {
                class: ca,
                labels: la,
                ..
            },
            SlotOutcome::Built {
                class: cb,
                labels: lb,
                ..
            },
        ) => {
            ca.shape == cb.shape
                && la.len() == lb.len()
                && la.iter().zip(lb).all(|((ta, a), (tb, b))| {
                    (ta - tb).abs() < 1e-9 && a.label == b.label
                })
        }
        _ => false,
    }
}
