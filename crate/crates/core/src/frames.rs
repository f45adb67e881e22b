//! Orthonormal moving frames `{e, ν, b}` along a curve `γ̃`.
//!
//! A frame is either extracted from a surface along its `v = 0` locus —
//! `e` from the normalized velocity, `ν` from the unit surface normal,
//! `b = e × ν` — or supplied as explicit curve maps which are validated
//! against the orthonormality and tangency conditions.
//!
//! The curve may have isolated parameters where the velocity vanishes.
//! Each such parameter is declared up front with the vanishing order `m` of
//! `γ̃'`; there the frame is recovered by deflation, dividing the velocity
//! jet by `(t - t0)^m` before normalizing. Away from the declared sites the
//! frame is kept continuous across them by a parity rule: crossing a site of
//! odd multiplicity flips the sign of the raw normalized vector, so the
//! evaluator multiplies by the accumulated parity, anchored at `+1` on the
//! rightmost component of the interval. The same rule, with its own
//! automatically detected vanishing order, applies to the surface normal.

use crate::curvelang::{Arity, Expr, LangError, ParametricMap, Var};
use crate::jets::{Jet, JetError, VecJet, MAX_ORDER};
use thiserror::Error;

/// Points are treated as one parameter value when closer than this.
const SITE_EPS: f64 = 1e-12;
/// Sample count for construction-time validation sweeps.
const VALIDATION_SAMPLES: usize = 64;
/// Tolerance for the explicit-frame validation sweep.
const VALIDATION_TOL: f64 = 1e-8;

/// A declared parameter where the curve velocity vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularParam {
    pub t0: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Error)]
pub enum FrameError {
    #[error("expected a map of arity {expected:?}")]
    WrongArity { expected: Arity },
    #[error("surface normal degenerates at t = {t}")]
    DegenerateNormal { t: f64 },
    #[error(
        "velocity at t0 = {t0} vanishes to order {actual:?}, not the declared multiplicity {declared}"
    )]
    WrongMultiplicity {
        t0: f64,
        declared: usize,
        actual: Option<usize>,
    },
    #[error("supplied frame violates '{invariant}' at t = {t} (deviation {deviation:.3e})")]
    FrameInvalid {
        t: f64,
        invariant: &'static str,
        deviation: f64,
    },
    #[error("curve point t = {t} is singular; quantity undefined there")]
    SingularCurvePoint { t: f64 },
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone)]
struct SingularSite {
    t0: f64,
    curve_multiplicity: usize,
    /// Vanishing order of `f_u × f_v` at the site; zero for explicit frames.
    normal_multiplicity: usize,
}

#[derive(Debug, Clone)]
enum FrameSource {
    Surface {
        map: ParametricMap,
        /// Symbolic `∂f/∂v`, evaluated along the `v = 0` locus.
        d_v: ParametricMap,
        orientation: f64,
    },
    Explicit {
        gamma: ParametricMap,
        e: ParametricMap,
        nu: ParametricMap,
        l: Expr,
    },
}

/// The frame, curve and signed speed at one parameter, all as jets of a
/// common order.
#[derive(Debug, Clone)]
pub struct FrameJets {
    pub gamma: VecJet,
    pub e: VecJet,
    pub nu: VecJet,
    pub b: VecJet,
    pub l: Jet,
}

/// The structure functions of the frame: `e' = κ₁ν + κ₂b`,
/// `ν' = -κ₁e + κ₃b`, `b' = -κ₂e - κ₃ν`, and `γ̃' = l·e`.
#[derive(Debug, Clone)]
pub struct FrameInvariants {
    pub kappa1: Jet,
    pub kappa2: Jet,
    pub kappa3: Jet,
    pub l: Jet,
}

/// Normal curvature, geodesic curvature and geodesic torsion of `γ̃` with
/// respect to `ν`, defined away from singular curve points.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicInvariants {
    pub kappa_n: f64,
    pub kappa_g: f64,
    pub tau_g: f64,
}

/// A curve with an orthonormal frame attached, evaluable as jets at any
/// parameter of its interval.
#[derive(Debug, Clone)]
pub struct FramedCurve {
    interval: (f64, f64),
    sites: Vec<SingularSite>,
    source: FrameSource,
}

impl FramedCurve {
    /// Extract the frame of a surface along its `v = 0` locus.
    ///
    /// `orientation` (`±1`) chooses the side of the unit normal. Parameters
    /// where the locus velocity vanishes must be declared in
    /// `singular_params` together with the vanishing order of `γ̃'`.
    pub fn from_surface(
        map: ParametricMap,
        orientation: i8,
        interval: (f64, f64),
        singular_params: &[SingularParam],
    ) -> Result<Self, FrameError> {
        if map.arity != Arity::Surface {
            return Err(FrameError::WrongArity {
                expected: Arity::Surface,
            });
        }
        let d_v = map.partial(Var::V);
        let source = FrameSource::Surface {
            map,
            d_v,
            orientation: orientation.signum() as f64,
        };
        Self::assemble(source, interval, singular_params)
    }

    /// Wrap explicitly supplied frame data `γ̃, e, ν, l`.
    ///
    /// The data is validated on a sweep of the interval: `e` and `ν` must be
    /// unit and orthogonal and `γ̃' = l·e` must hold, each within `1e-8`.
    pub fn explicit(
        gamma: ParametricMap,
        e: ParametricMap,
        nu: ParametricMap,
        l: Expr,
        interval: (f64, f64),
        singular_params: &[SingularParam],
    ) -> Result<Self, FrameError> {
        for map in [&gamma, &e, &nu] {
            if map.arity != Arity::Curve {
                return Err(FrameError::WrongArity {
                    expected: Arity::Curve,
                });
            }
        }
        let source = FrameSource::Explicit { gamma, e, nu, l };
        let fc = Self::assemble(source, interval, singular_params)?;
        fc.validate_explicit()?;
        Ok(fc)
    }

    fn assemble(
        source: FrameSource,
        interval: (f64, f64),
        singular_params: &[SingularParam],
    ) -> Result<Self, FrameError> {
        assert!(
            interval.0 < interval.1,
            "parameter interval must be nondegenerate"
        );
        let mut fc = FramedCurve {
            interval,
            sites: Vec::new(),
            source,
        };
        let mut sites = Vec::new();
        for param in singular_params {
            sites.push(fc.probe_site(param)?);
        }
        sites.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        fc.sites = sites;
        fc.validate_sweep()?;
        Ok(fc)
    }

    /// Check the declared multiplicity and measure the normal's vanishing
    /// order at one singular parameter.
    fn probe_site(&self, param: &SingularParam) -> Result<SingularSite, FrameError> {
        let velocity = self.gamma_jet(param.t0, MAX_ORDER - 1)?.derivative();
        let actual = velocity.vanishing_order();
        if actual != Some(param.multiplicity) {
            return Err(FrameError::WrongMultiplicity {
                t0: param.t0,
                declared: param.multiplicity,
                actual,
            });
        }
        let normal_multiplicity = match &self.source {
            FrameSource::Surface { .. } => {
                let cross = self.raw_normal_jet(param.t0, MAX_ORDER - 1)?;
                cross
                    .vanishing_order()
                    .ok_or(FrameError::DegenerateNormal { t: param.t0 })?
            }
            FrameSource::Explicit { .. } => 0,
        };
        Ok(SingularSite {
            t0: param.t0,
            curve_multiplicity: param.multiplicity,
            normal_multiplicity,
        })
    }

    /// Evaluate the frame on a sweep of the interval so that degenerate
    /// geometry surfaces as a construction error rather than later.
    fn validate_sweep(&self) -> Result<(), FrameError> {
        for t in sweep(self.interval) {
            self.frame_jets(t, 1)?;
        }
        Ok(())
    }

    fn validate_explicit(&self) -> Result<(), FrameError> {
        for t in sweep(self.interval) {
            let f = self.frame_jets(t, 1)?;
            let checks: [(&'static str, f64); 4] = [
                ("unit tangent e", (f.e.dot(&f.e).value() - 1.0).abs()),
                ("unit normal nu", (f.nu.dot(&f.nu).value() - 1.0).abs()),
                ("orthogonality e·nu", f.e.dot(&f.nu).value().abs()),
                ("tangency gamma' = l e", {
                    let velocity = VecJet::new(
                        Jet::constant(f.gamma.x.derivative_value(1), t, 0),
                        Jet::constant(f.gamma.y.derivative_value(1), t, 0),
                        Jet::constant(f.gamma.z.derivative_value(1), t, 0),
                    );
                    let le = f.e.truncated(0).scale_jet(&f.l.truncated(0));
                    let diff = velocity.sub(&le);
                    diff.value().iter().fold(0.0f64, |m, c| m.max(c.abs()))
                }),
            ];
            for (invariant, deviation) in checks {
                if deviation > VALIDATION_TOL {
                    return Err(FrameError::FrameInvalid {
                        t,
                        invariant,
                        deviation,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn singular_params(&self) -> Vec<SingularParam> {
        self.sites
            .iter()
            .map(|s| SingularParam {
                t0: s.t0,
                multiplicity: s.curve_multiplicity,
            })
            .collect()
    }

    fn site_at(&self, t: f64) -> Option<&SingularSite> {
        self.sites.iter().find(|s| (s.t0 - t).abs() <= SITE_EPS)
    }

    /// Accumulated parity of the curve multiplicities of all sites above `t`.
    fn curve_sign(&self, t: f64) -> f64 {
        let flips: usize = self
            .sites
            .iter()
            .filter(|s| s.t0 > t + SITE_EPS)
            .map(|s| s.curve_multiplicity)
            .sum();
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn normal_sign(&self, t: f64) -> f64 {
        let flips: usize = self
            .sites
            .iter()
            .filter(|s| s.t0 > t + SITE_EPS)
            .map(|s| s.normal_multiplicity)
            .sum();
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Jet of `γ̃` at `t`.
    pub fn gamma_jet(&self, t: f64, order: usize) -> Result<VecJet, FrameError> {
        let map = match &self.source {
            FrameSource::Surface { map, .. } => map,
            FrameSource::Explicit { gamma, .. } => gamma,
        };
        Ok(map.eval_jet(t, 0.0, order, Var::U)?)
    }

    /// Unnormalized surface normal `f_u × f_v` along the locus.
    fn raw_normal_jet(&self, t: f64, order: usize) -> Result<VecJet, FrameError> {
        let FrameSource::Surface { d_v, .. } = &self.source else {
            unreachable!("raw normal only exists for surface-extracted frames");
        };
        let f_u = self.gamma_jet(t, order + 1)?.derivative();
        let f_v = d_v.eval_jet(t, 0.0, order, Var::U)?;
        Ok(f_u.cross(&f_v))
    }

    /// Unit tangent jet, continuous across declared singular sites.
    pub fn e_jet(&self, t: f64, order: usize) -> Result<VecJet, FrameError> {
        match &self.source {
            FrameSource::Explicit { e, .. } => Ok(e.eval_jet(t, 0.0, order, Var::U)?),
            FrameSource::Surface { .. } => {
                let e = match self.site_at(t) {
                    Some(site) => {
                        let m = site.curve_multiplicity;
                        let velocity = self.gamma_jet(t, order + 1 + m)?.derivative();
                        velocity.deflate(m)?.normalize()?
                    }
                    None => self
                        .gamma_jet(t, order + 1)?
                        .derivative()
                        .normalize()
                        .map_err(|_| FrameError::SingularCurvePoint { t })?,
                };
                Ok(e.scale(self.curve_sign(t)))
            }
        }
    }

    /// Unit normal jet, continuous across declared singular sites.
    pub fn nu_jet(&self, t: f64, order: usize) -> Result<VecJet, FrameError> {
        match &self.source {
            FrameSource::Explicit { nu, .. } => Ok(nu.eval_jet(t, 0.0, order, Var::U)?),
            FrameSource::Surface { orientation, .. } => {
                let nu = match self.site_at(t) {
                    Some(site) => {
                        let m = site.normal_multiplicity;
                        let cross = self.raw_normal_jet(t, order + m)?;
                        cross.deflate(m)?.normalize()?
                    }
                    None => self
                        .raw_normal_jet(t, order)?
                        .normalize()
                        .map_err(|_| FrameError::DegenerateNormal { t })?,
                };
                Ok(nu.scale(self.normal_sign(t) * orientation))
            }
        }
    }

    /// The whole frame with `b = e × ν` and the signed speed `l = γ̃'·e`.
    pub fn frame_jets(&self, t: f64, order: usize) -> Result<FrameJets, FrameError> {
        let gamma = self.gamma_jet(t, order + 1)?;
        let e = self.e_jet(t, order)?;
        let nu = self.nu_jet(t, order)?;
        let b = e.cross(&nu);
        let l = match &self.source {
            FrameSource::Surface { .. } => gamma.derivative().dot(&e),
            FrameSource::Explicit { l, .. } => {
                let u = Jet::variable(t, order);
                let v = Jet::constant(0.0, t, order);
                l.eval_jet(&u, &v)?
            }
        };
        Ok(FrameJets {
            gamma: gamma.truncated(order),
            e,
            nu,
            b,
            l,
        })
    }

    /// Structure functions `κ₁ = e'·ν`, `κ₂ = e'·b`, `κ₃ = ν'·b` and `l`, as
    /// jets of the requested order.
    pub fn invariants(&self, t: f64, order: usize) -> Result<FrameInvariants, FrameError> {
        let f = self.frame_jets(t, order + 1)?;
        let e_prime = f.e.derivative();
        let nu_prime = f.nu.derivative();
        let nu = f.nu.truncated(order);
        let b = f.b.truncated(order);
        Ok(FrameInvariants {
            kappa1: e_prime.dot(&nu),
            kappa2: e_prime.dot(&b),
            kappa3: nu_prime.dot(&b),
            l: f.l.truncated(order),
        })
    }

    /// Normal curvature, geodesic curvature and geodesic torsion at a
    /// regular curve point.
    pub fn geodesic_invariants(&self, t: f64) -> Result<GeodesicInvariants, FrameError> {
        let gamma = self.gamma_jet(t, 3)?;
        let nu = self.nu_jet(t, 2)?;
        let velocity = gamma.derivative();
        let speed_sq = velocity.dot(&velocity).value();
        if speed_sq <= SITE_EPS * SITE_EPS {
            return Err(FrameError::SingularCurvePoint { t });
        }
        let speed = speed_sq.sqrt();
        let accel = velocity.derivative();
        let velocity = velocity.truncated(1);
        let nu_prime = nu.derivative();
        let nu_short = nu.truncated(1);
        let kappa_n = accel.dot(&nu_short).value() / speed_sq;
        let kappa_g =
            crate::jets::det3(&velocity, &accel, &nu_short).value() / (speed_sq * speed);
        let tau_g =
            crate::jets::det3(&velocity.truncated(0), &nu.truncated(0), &nu_prime.truncated(0))
                .value()
                / speed_sq;
        Ok(GeodesicInvariants {
            kappa_n,
            kappa_g,
            tau_g,
        })
    }
}

fn sweep(interval: (f64, f64)) -> impl Iterator<Item = f64> {
    let (a, b) = interval;
    let step = (b - a) / (VALIDATION_SAMPLES - 1) as f64;
    (0..VALIDATION_SAMPLES).map(move |i| a + step * i as f64)
}
