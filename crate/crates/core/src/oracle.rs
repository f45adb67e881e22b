//! Finite-difference cross-checks for the jet pipeline.
//!
//! Everything here differentiates plain `f64` functions by sampling, never
//! by jet arithmetic, so agreement between the two routes is evidence and
//! disagreement is a bug. Central stencils of second or fourth order are
//! available, optionally sharpened by one step of Richardson extrapolation.

use crate::developables::{DevelopableSurface, SurfaceError, ZERO_TOL};
use std::io::{self, Write};

/// Central difference stencil order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Error `O(h²)`.
    Central2,
    /// Error `O(h⁴)`.
    Central4,
}

/// Step and stencil controlling one finite-difference estimate.
#[derive(Debug, Clone, Copy)]
pub struct FdConfig {
    pub step: f64,
    pub scheme: Scheme,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: 1e-5,
            scheme: Scheme::Central4,
            richardson: false,
        }
    }
}

impl FdConfig {
    /// Step tuned per derivative order: higher orders divide by higher
    /// powers of `h`, so the step must grow to keep rounding noise at bay.
    pub fn for_order(order: usize) -> FdConfig {
        let step = match order {
            1 => 1e-5,
            2 => 5e-4,
            _ => 5e-3,
        };
        FdConfig {
            step,
            ..FdConfig::default()
        }
    }
}

/// `order`-th derivative of `f` at `t` by central differences. Supports
/// orders one through three; panics on anything else.
pub fn fd_derivative(f: impl Fn(f64) -> f64, t: f64, order: usize, cfg: FdConfig) -> f64 {
    assert!(
        (1..=3).contains(&order),
        "finite differences implemented for orders 1-3, got {order}"
    );
    let estimate = |h: f64| -> f64 {
        match (cfg.scheme, order) {
            (Scheme::Central2, 1) => (f(t + h) - f(t - h)) / (2.0 * h),
            (Scheme::Central2, 2) => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
            (Scheme::Central2, _) => {
                (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h))
                    / (2.0 * h * h * h)
            }
            (Scheme::Central4, 1) => {
                (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
            }
            (Scheme::Central4, 2) => {
                (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h)
                    - f(t - 2.0 * h))
                    / (12.0 * h * h)
            }
            (Scheme::Central4, _) => {
                (-f(t + 3.0 * h) + 8.0 * f(t + 2.0 * h) - 13.0 * f(t + h) + 13.0 * f(t - h)
                    - 8.0 * f(t - 2.0 * h)
                    + f(t - 3.0 * h))
                    / (8.0 * h * h * h)
            }
        }
    };
    if cfg.richardson {
        let p = match cfg.scheme {
            Scheme::Central2 => 2,
            Scheme::Central4 => 4,
        };
        let factor = (2.0f64).powi(p);
        (factor * estimate(cfg.step / 2.0) - estimate(cfg.step)) / (factor - 1.0)
    } else {
        estimate(cfg.step)
    }
}

/// Signed singularity identifier at `(t, a)` computed the blunt way:
/// finite-difference partials of the surface point in both parameters,
/// then the determinant against the unit normal. The jet route must
/// reproduce this to stencil accuracy.
pub fn lambda_direct(
    surface: &DevelopableSurface,
    t: f64,
    a: f64,
    cfg: FdConfig,
) -> Result<f64, SurfaceError> {
    let point = |tt: f64, aa: f64, i: usize| -> f64 {
        surface
            .evaluate(tt, aa)
            .expect("surface evaluable near the probe point")
            .point[i]
    };
    let s_t: [f64; 3] = std::array::from_fn(|i| fd_derivative(|tt| point(tt, a, i), t, 1, cfg));
    let s_a: [f64; 3] = std::array::from_fn(|i| fd_derivative(|aa| point(t, aa, i), a, 1, cfg));
    let n = surface.evaluate(t, a)?.normal;
    Ok(det3(s_t, s_a, n))
}

/// Striction offset at `t` found without any jet derivative:
/// `s = -(c'·δ') / (δ'·δ')` with both derivatives taken by finite
/// differences of the curve and ruling values. Fails where the ruling
/// direction is stationary, i.e. on cylindrical stretches.
pub fn striction_search(
    surface: &DevelopableSurface,
    t: f64,
    cfg: FdConfig,
) -> Result<f64, SurfaceError> {
    let curve = |tt: f64, i: usize| -> f64 {
        surface
            .evaluate(tt, 0.0)
            .expect("curve evaluable near the probe point")
            .point[i]
    };
    let ruling = |tt: f64, i: usize| -> f64 {
        surface
            .delta_jet(tt)
            .expect("ruling evaluable near the probe point")
            .value()[i]
    };
    let c_p: [f64; 3] = std::array::from_fn(|i| fd_derivative(|tt| curve(tt, i), t, 1, cfg));
    let d_p: [f64; 3] = std::array::from_fn(|i| fd_derivative(|tt| ruling(tt, i), t, 1, cfg));
    let dd: f64 = d_p.iter().map(|x| x * x).sum();
    if dd.sqrt() <= ZERO_TOL * (1.0 + c_p.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
        return Err(SurfaceError::CylindricalAt { t });
    }
    let cd: f64 = c_p.iter().zip(&d_p).map(|(c, d)| c * d).sum();
    Ok(-cd / dd)
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// One jet-versus-oracle comparison, ready for the CSV audit trail.
#[derive(Debug, Clone)]
pub struct ComparisonRecord {
    pub fixture: String,
    pub quantity: String,
    pub t: f64,
    pub jet_value: f64,
    pub oracle_value: f64,
    pub rel_err: f64,
}

impl ComparisonRecord {
    /// Relative error against the oracle, falling back to absolute error
    /// where the oracle value sits below `1e-7`.
    pub fn new(
        fixture: impl Into<String>,
        quantity: impl Into<String>,
        t: f64,
        jet_value: f64,
        oracle_value: f64,
    ) -> Self {
        let gap = (jet_value - oracle_value).abs();
        let rel_err = if oracle_value.abs() > 1e-7 {
            gap / oracle_value.abs()
        } else {
            gap
        };
        ComparisonRecord {
            fixture: fixture.into(),
            quantity: quantity.into(),
            t,
            jet_value,
            oracle_value,
            rel_err,
        }
    }
}

/// Write comparison records as CSV with a fixed header and 17 significant
/// digits, so repeated runs produce identical bytes.
pub fn write_comparison_csv<W: Write>(records: &[ComparisonRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "fixture,quantity,t,jet_value,oracle_value,rel_err")?;
    for r in records {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.fixture, r.quantity, r.t, r.jet_value, r.oracle_value, r.rel_err
        )?;
    }
    Ok(())
}
