//! The two ruled developable surfaces spanned by a framed curve.
//!
//! With frame invariants `κ₁, κ₂, κ₃` and signed speed `l`, the ν-ruled
//! surface sweeps the unit direction `δ = (κ₃e + κ₁b)/√(κ₃² + κ₁²)` and the
//! b-ruled surface sweeps `δ = (κ₃e - κ₂ν)/√(κ₃² + κ₂²)`; each requires its
//! curvature pair not to vanish. The scalar `β` with `δ' = β·w` measures how
//! fast the ruling turns (`β ≡ 0`: cylinder), the striction parameter `s(t)`
//! locates the singular locus, and `ρ` with its derivative decides what the
//! singularity is. The identifier `λ(t, a)` vanishes exactly on singular
//! surface points, and the kernel field `η = ∂_t - (lκ₃/√(κ₃² + κ_*²))∂_a`
//! pushes λ into the degeneracy diagnostics `ηλ` and `ηηλ`.

use crate::frames::{FrameError, FramedCurve};
use crate::jets::{det3, Jet, VecJet};
use std::sync::Arc;
use thiserror::Error;

/// Zero threshold for pointwise degeneracy decisions, scaled by
/// `1 + local magnitude` of the quantities entering the test.
pub const ZERO_TOL: f64 = 1e-9;

/// Internal jet order: enough for `ρ'` and the second η-derivative of λ.
const EVAL_ORDER: usize = 6;

#[derive(Debug, Clone, Error)]
pub enum SurfaceError {
    #[error("ruling undefined at t = {t}: the pair ({pair}) vanishes")]
    AssumptionViolated { t: f64, pair: &'static str },
    #[error("surface is cylindrical at t = {t} (β ≈ 0), striction undefined")]
    CylindricalAt { t: f64 },
    #[error("surface point (t, a) = ({t}, {a}) is singular")]
    SingularPoint { t: f64, a: f64 },
    #[error("speed l = {l} does not vanish at t = {t}; the degenerate-speed tests do not apply")]
    SpeedNonzero { t: f64, l: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Which of the two developables attached to the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RulingKind {
    /// Ruled by `(κ₃e + κ₁b)/√(κ₃² + κ₁²)`; tangent planes orthogonal to ν.
    Nu,
    /// Ruled by `(κ₃e - κ₂ν)/√(κ₃² + κ₂²)`; tangent planes orthogonal to b.
    B,
}

impl RulingKind {
    pub fn pair_name(self) -> &'static str {
        match self {
            RulingKind::Nu => "κ₁, κ₃",
            RulingKind::B => "κ₂, κ₃",
        }
    }
}

/// A point of the surface together with its unit normal and the singularity
/// identifier λ; the point is singular exactly when λ = 0.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub t: f64,
    pub a: f64,
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub lambda: f64,
}

/// Striction point on one ruling: the parameter `s(t)` along the ruling and
/// the space point `σ̂(t) = γ̃(t) + s(t)δ(t)`.
#[derive(Debug, Clone, Copy)]
pub struct StrictionPoint {
    pub s: f64,
    pub sigma: [f64; 3],
}

/// All jets needed at one parameter, derived from a single frame evaluation.
pub(crate) struct RulingData {
    pub e: VecJet,
    pub nu: VecJet,
    pub b: VecJet,
    pub gamma: VecJet,
    pub l: Jet,
    pub kappa1: Jet,
    pub kappa2: Jet,
    pub kappa3: Jet,
    /// Kind-selected co-ruling curvature: κ₁ for ν-ruled, κ₂ for b-ruled.
    pub ka: Jet,
    /// `√(κ₃² + κ_a²)`.
    pub q: Jet,
    pub q2: Jet,
    pub delta: VecJet,
    pub beta: Jet,
    pub rho: Jet,
}

impl RulingData {
    /// Scale for zero tests against quantities built from the invariants.
    pub fn magnitude(&self) -> f64 {
        [
            self.kappa1.value(),
            self.kappa2.value(),
            self.kappa3.value(),
            self.kappa1.derivative_value(1),
            self.kappa2.derivative_value(1),
            self.kappa3.derivative_value(1),
            self.l.value(),
            self.l.derivative_value(1),
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// One of the two developables, evaluable anywhere on the frame's interval.
#[derive(Debug, Clone)]
pub struct DevelopableSurface {
    kind: RulingKind,
    fc: Arc<FramedCurve>,
}

impl DevelopableSurface {
    /// Attach the surface to a framed curve, checking the ruling hypothesis
    /// (curvature pair nonzero) on a sweep of `samples` parameters.
    pub fn build(
        fc: Arc<FramedCurve>,
        kind: RulingKind,
        samples: usize,
    ) -> Result<Self, SurfaceError> {
        assert!(samples >= 2);
        let surface = DevelopableSurface { kind, fc };
        let (t0, t1) = surface.fc.interval();
        let step = (t1 - t0) / (samples - 1) as f64;
        for i in 0..samples {
            let t = t0 + step * i as f64;
            surface.data(t)?;
        }
        Ok(surface)
    }

    pub fn kind(&self) -> RulingKind {
        self.kind
    }

    pub fn framed_curve(&self) -> &Arc<FramedCurve> {
        &self.fc
    }

    pub fn interval(&self) -> (f64, f64) {
        self.fc.interval()
    }

    /// Evaluate every derived jet at `t`. Fails when the curvature pair of
    /// this ruling vanishes there.
    pub(crate) fn data(&self, t: f64) -> Result<RulingData, SurfaceError> {
        let frame = self.fc.frame_jets(t, EVAL_ORDER + 1)?;
        let e_prime = frame.e.derivative();
        let nu_prime = frame.nu.derivative();
        let e = frame.e.truncated(EVAL_ORDER);
        let nu = frame.nu.truncated(EVAL_ORDER);
        let b = frame.b.truncated(EVAL_ORDER);
        let kappa1 = e_prime.dot(&nu);
        let kappa2 = e_prime.dot(&b);
        let kappa3 = nu_prime.dot(&b);
        let l = frame.l.truncated(EVAL_ORDER);

        let ka = match self.kind {
            RulingKind::Nu => kappa1.clone(),
            RulingKind::B => kappa2.clone(),
        };
        let q2 = ka.mul(&ka).add(&kappa3.mul(&kappa3));
        let scale = [kappa1.value(), kappa2.value(), kappa3.value()]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = ZERO_TOL * (1.0 + scale);
        if q2.value() <= tol * tol {
            return Err(SurfaceError::AssumptionViolated {
                t,
                pair: self.kind.pair_name(),
            });
        }
        let q = q2.try_sqrt().map_err(|_| SurfaceError::AssumptionViolated {
            t,
            pair: self.kind.pair_name(),
        })?;

        let delta = match self.kind {
            RulingKind::Nu => e.scale_jet(&kappa3).add(&b.scale_jet(&ka)),
            RulingKind::B => e.scale_jet(&kappa3).sub(&nu.scale_jet(&ka)),
        }
        .try_div_jet(&q)
        .expect("q has nonzero constant term");

        // β and ρ mix a quantity with its derivative, so the orders step
        // down; truncate everything to the common order as we go.
        let bo = EVAL_ORDER - 1;
        let k1 = kappa1.truncated(bo);
        let k2 = kappa2.truncated(bo);
        let k3 = kappa3.truncated(bo);
        let k1p = kappa1.derivative();
        let k2p = kappa2.derivative();
        let k3p = kappa3.derivative();
        let beta = match self.kind {
            RulingKind::Nu => k1
                .mul(&k1)
                .mul(&k2)
                .add(&k2.mul(&k3).mul(&k3))
                .add(&k1p.mul(&k3))
                .sub(&k1.mul(&k3p)),
            RulingKind::B => k1
                .mul(&k2)
                .mul(&k2)
                .add(&k1.mul(&k3).mul(&k3))
                .add(&k2.mul(&k3p))
                .sub(&k2p.mul(&k3)),
        };

        let ro = EVAL_ORDER - 2;
        let beta_prime = beta.derivative();
        let beta_r = beta.truncated(ro);
        let l_r = l.truncated(ro);
        let l_prime = l.derivative().truncated(ro);
        let k1_r = k1.truncated(ro);
        let k2_r = k2.truncated(ro);
        let k3_r = k3.truncated(ro);
        let k1p_r = k1p.truncated(ro);
        let k2p_r = k2p.truncated(ro);
        let rho = match self.kind {
            RulingKind::Nu => {
                let inner = beta_r
                    .mul(&k2_r.mul(&k3_r).add(&k1p_r.scale(2.0)))
                    .sub(&beta_prime.mul(&k1_r));
                l_r.mul(&inner).add(&l_prime.mul(&k1_r).mul(&beta_r))
            }
            RulingKind::B => {
                let inner = beta_r
                    .mul(&k1_r.mul(&k3_r).sub(&k2p_r.scale(2.0)))
                    .add(&beta_prime.mul(&k2_r));
                l_r.mul(&inner).sub(&l_prime.mul(&k2_r).mul(&beta_r))
            }
        };

        Ok(RulingData {
            e,
            nu,
            b,
            gamma: frame.gamma,
            l,
            kappa1,
            kappa2,
            kappa3,
            ka,
            q,
            q2,
            delta,
            beta,
            rho,
        })
    }

    /// Unit ruling direction as a jet.
    pub fn delta_jet(&self, t: f64) -> Result<VecJet, SurfaceError> {
        Ok(self.data(t)?.delta)
    }

    /// Turning speed of the ruling: `δ' = β·w` with `|w| = 1/(κ₃² + κ_*²)`.
    pub fn beta_jet(&self, t: f64) -> Result<Jet, SurfaceError> {
        Ok(self.data(t)?.beta)
    }

    pub fn beta(&self, t: f64) -> Result<f64, SurfaceError> {
        Ok(self.data(t)?.beta.value())
    }

    pub fn rho_jet(&self, t: f64) -> Result<Jet, SurfaceError> {
        Ok(self.data(t)?.rho)
    }

    pub fn rho(&self, t: f64) -> Result<f64, SurfaceError> {
        Ok(self.data(t)?.rho.value())
    }

    /// `ρ'`, read off the jet of ρ rather than differenced.
    pub fn rho_prime(&self, t: f64) -> Result<f64, SurfaceError> {
        Ok(self.data(t)?.rho.derivative_value(1))
    }

    /// Surface point, normal and singularity identifier at `(t, a)`.
    pub fn evaluate(&self, t: f64, a: f64) -> Result<SurfaceSample, SurfaceError> {
        let data = self.data(t)?;
        let gamma = data.gamma.value();
        let delta = data.delta.value();
        let normal_jet = self.normal_vec(&data);
        let normal = normal_jet.value();
        let lambda = self.lambda_with(&data, a);
        let point = [
            gamma[0] + a * delta[0],
            gamma[1] + a * delta[1],
            gamma[2] + a * delta[2],
        ];
        Ok(SurfaceSample {
            t,
            a,
            point,
            normal,
            lambda,
        })
    }

    fn normal_vec(&self, data: &RulingData) -> VecJet {
        match self.kind {
            RulingKind::Nu => data.nu.clone(),
            RulingKind::B => data.b.clone(),
        }
    }

    /// λ(t, a) as `A(t) + a·B(t)`; both coefficients as jets.
    pub(crate) fn lambda_affine(&self, data: &RulingData) -> (Jet, Jet) {
        let a_coeff = data
            .l
            .mul(&data.ka)
            .try_div(&data.q)
            .expect("q nonzero")
            .neg();
        let b_raw = data
            .beta
            .try_div(&data.q2.truncated(data.beta.order()))
            .expect("q² nonzero");
        let b_coeff = match self.kind {
            RulingKind::Nu => b_raw,
            RulingKind::B => b_raw.neg(),
        };
        (a_coeff, b_coeff)
    }

    fn lambda_with(&self, data: &RulingData, a: f64) -> f64 {
        let (c0, c1) = self.lambda_affine(data);
        c0.value() + a * c1.value()
    }

    /// Singularity identifier: zero exactly at singular surface points.
    pub fn lambda(&self, t: f64, a: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        Ok(self.lambda_with(&data, a))
    }

    /// Striction parameter and point; fails where `β ≈ 0` (cylindrical).
    pub fn striction(&self, t: f64) -> Result<StrictionPoint, SurfaceError> {
        let (s, sigma) = self.striction_jets(t)?;
        Ok(StrictionPoint {
            s: s.value(),
            sigma: sigma.value(),
        })
    }

    /// Jets of `s(t)` and `σ̂(t) = γ̃ + s·δ`.
    pub fn striction_jets(&self, t: f64) -> Result<(Jet, VecJet), SurfaceError> {
        let data = self.data(t)?;
        if data.beta.value().abs() <= ZERO_TOL * (1.0 + data.magnitude()) {
            return Err(SurfaceError::CylindricalAt { t });
        }
        let o = data.beta.order();
        let numer = data.l.truncated(o).mul(&data.ka.truncated(o)).mul(&data.q.truncated(o));
        let signed = match self.kind {
            RulingKind::Nu => numer,
            RulingKind::B => numer.neg(),
        };
        let s = signed.try_div(&data.beta).expect("β nonzero checked above");
        let sigma = data
            .gamma
            .truncated(o)
            .add(&data.delta.truncated(o).scale_jet(&s));
        Ok((s, sigma))
    }

    /// Tangency residual of the plane family: `h = n·(x - γ̃)` and `h'` for a
    /// fixed space point `x`. Both vanish iff `x` lies on the envelope.
    pub fn envelope_residual(&self, t: f64, x: [f64; 3]) -> Result<(f64, f64), SurfaceError> {
        let data = self.data(t)?;
        let diff = VecJet::constant(x, t, EVAL_ORDER).sub(&data.gamma.truncated(EVAL_ORDER));
        let h = self.normal_vec(&data).dot(&diff);
        Ok((h.value(), h.derivative_value(1)))
    }

    /// Gaussian curvature from the fundamental forms; identically zero in
    /// exact arithmetic, exposed to make that checkable. Fails at singular
    /// points, where the first form degenerates.
    pub fn gaussian_curvature(&self, t: f64, a: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let o = EVAL_ORDER - 2;
        let gamma_t = data.gamma.derivative().truncated(o);
        let delta_t = data.delta.derivative().truncated(o);
        let s_t = gamma_t.add(&delta_t.scale(a));
        let s_a = data.delta.truncated(o);
        let s_tt = data
            .gamma
            .derivative()
            .derivative()
            .truncated(o)
            .add(&data.delta.derivative().derivative().truncated(o).scale(a));
        let s_ta = delta_t.clone();
        let n = self.normal_vec(&data).truncated(o);

        let e1 = s_t.dot(&s_t).value();
        let f1 = s_t.dot(&s_a).value();
        let g1 = s_a.dot(&s_a).value();
        let denom = e1 * g1 - f1 * f1;
        let scale = 1.0 + e1.abs().max(g1.abs());
        if denom.abs() <= (ZERO_TOL * scale).powi(2).max(1e-18 * scale) {
            return Err(SurfaceError::SingularPoint { t, a });
        }
        let l2 = s_tt.dot(&n).value();
        let m2 = s_ta.dot(&n).value();
        // N = S_aa·n = 0 for a ruled patch.
        Ok((l2 * 0.0 - m2 * m2) / denom)
    }

    /// Direction `(1, w)` of the kernel field `η = ∂_t + w∂_a`,
    /// `w = -lκ₃/√(κ₃² + κ_*²)`.
    pub fn eta_direction(&self, t: f64) -> Result<(f64, f64), SurfaceError> {
        let data = self.data(t)?;
        let w = -(data.l.value() * data.kappa3.value()) / data.q.value();
        Ok((1.0, w))
    }

    /// Closed form of `ηλ` on the singular locus `a = s(t)`:
    /// `∓ρ/(β√(κ₃² + κ_*²))`, the sign depending on the ruling.
    pub fn eta_lambda(&self, t: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let value = data.rho.value() / (data.beta.value() * data.q.value());
        Ok(match self.kind {
            RulingKind::Nu => -value,
            RulingKind::B => value,
        })
    }

    /// Closed form of `ηηλ` where `ρ = 0` on the singular locus:
    /// `∓ρ'/(β√(κ₃² + κ_*²))`.
    pub fn eta_eta_lambda(&self, t: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let value = data.rho.derivative_value(1) / (data.beta.value() * data.q.value());
        Ok(match self.kind {
            RulingKind::Nu => -value,
            RulingKind::B => value,
        })
    }

    /// `ηλ(t, a)` by direct application of η to the affine identifier —
    /// an audit route independent of the ρ-based closed form.
    pub fn eta_lambda_at(&self, t: f64, a: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let (c0, c1) = self.lambda_affine(&data);
        let w = -(data.l.value() * data.kappa3.value()) / data.q.value();
        Ok(c0.derivative_value(1) + a * c1.derivative_value(1) + w * c1.value())
    }

    /// `ηηλ(t, a)` by applying η twice to the affine identifier.
    pub fn eta_eta_lambda_at(&self, t: f64, a: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let (c0, c1) = self.lambda_affine(&data);
        let w_jet = data
            .l
            .mul(&data.kappa3)
            .try_div(&data.q)
            .expect("q nonzero")
            .neg();
        // ηλ(t, a) = C(t) + a·D(t) with C = A' + wB, D = B'.
        let o = c0.order() - 1;
        let c_jet = c0.derivative().truncated(o).add(
            &w_jet
                .truncated(o)
                .mul(&c1.truncated(o)),
        );
        let d_jet = c1.derivative();
        Ok(c_jet.derivative_value(1)
            + a * d_jet.derivative_value(1)
            + w_jet.value() * d_jet.value())
    }

    /// Residual of the turning identity `δ' - β·w`; zero in exact
    /// arithmetic.
    pub fn ruling_turn_residual(&self, t: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let o = data.delta.order() - 1;
        let q3 = data.q.mul(&data.q).mul(&data.q).truncated(o);
        let w = match self.kind {
            RulingKind::Nu => data
                .e
                .truncated(o)
                .scale_jet(&data.kappa1.truncated(o))
                .neg()
                .add(&data.b.truncated(o).scale_jet(&data.kappa3.truncated(o))),
            RulingKind::B => data
                .e
                .truncated(o)
                .scale_jet(&data.kappa2.truncated(o))
                .add(&data.nu.truncated(o).scale_jet(&data.kappa3.truncated(o))),
        }
        .try_div_jet(&q3)
        .expect("q³ nonzero");
        let residual = data
            .delta
            .derivative()
            .truncated(o)
            .sub(&w.scale_jet(&data.beta.truncated(o)));
        Ok(residual
            .value()
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs())))
    }

    /// Consistency of λ with the parametric definition
    /// `det(S_t, S_a, n)`, evaluated through jets.
    pub fn lambda_det_residual(&self, t: f64, a: f64) -> Result<f64, SurfaceError> {
        let data = self.data(t)?;
        let o = data.delta.order() - 1;
        let s_t = data
            .gamma
            .derivative()
            .truncated(o)
            .add(&data.delta.derivative().truncated(o).scale(a));
        let s_a = data.delta.truncated(o);
        let n = self.normal_vec(&data).truncated(o);
        let det = det3(&s_t, &s_a, &n).value();
        Ok((det - self.lambda_with(&data, a)).abs())
    }
}
