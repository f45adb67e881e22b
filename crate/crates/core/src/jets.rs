//! Truncated Taylor jets: a scalar quantity together with its first `K`
//! derivatives at a base point, stored as Taylor coefficients
//! `c_k = f^(k)(t0) / k!`.
//!
//! All differentiation in this crate happens by evaluating expressions over
//! jets; no symbolic or finite-difference step is involved on the main path.
//! Division by `(t - t0)^m` ("deflation") is what lets frames survive
//! parameter values where the curve's velocity vanishes.

use thiserror::Error;

/// Default truncation order used by the higher-level modules.
pub const DEFAULT_ORDER: usize = 6;
/// Largest truncation order the evaluators accept.
pub const MAX_ORDER: usize = 12;
/// A coefficient below this magnitude counts as zero when deflating.
pub const DEFLATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum JetError {
    #[error("division by a jet with zero constant term at t0 = {base_point}")]
    DivisionByZero { base_point: f64 },
    #[error("{op} applied outside its domain (constant term {value}) at t0 = {base_point}")]
    Domain {
        op: &'static str,
        value: f64,
        base_point: f64,
    },
    #[error("coefficient {index} has magnitude {magnitude:e}, too large to deflate")]
    NotDeflatable { index: usize, magnitude: f64 },
}

/// Truncated Taylor expansion of a scalar function at `base_point`.
///
/// `coeffs[k]` is the k-th Taylor coefficient, so `coeffs.len() == order + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base_point: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet of the constant function `value`.
    pub fn constant(value: f64, base_point: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { base_point, coeffs }
    }

    /// Jet of the identity `t ↦ t` expanded at `base_point`.
    pub fn variable(base_point: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = base_point;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { base_point, coeffs }
    }

    /// Jet with explicitly given Taylor coefficients.
    pub fn from_coeffs(base_point: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least a constant term");
        Jet { base_point, coeffs }
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Value of the function at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the base point (`k! * coeffs[k]`).
    pub fn derivative_value(&self, k: usize) -> f64 {
        let mut factorial = 1.0;
        for i in 2..=k {
            factorial *= i as f64;
        }
        factorial * self.coeff(k)
    }

    fn check_compatible(&self, other: &Jet) {
        assert_eq!(
            self.coeffs.len(),
            other.coeffs.len(),
            "jet order mismatch ({} vs {})",
            self.order(),
            other.order()
        );
        assert!(
            self.base_point == other.base_point,
            "jet base point mismatch ({} vs {})",
            self.base_point,
            other.base_point
        );
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Jet {
            base_point: self.base_point,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Jet {
            base_point: self.base_point,
            coeffs,
        }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|c| factor * c).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.coeffs[j] * other.coeffs[k - j];
            }
            coeffs[k] = acc;
        }
        Jet {
            base_point: self.base_point,
            coeffs,
        }
    }

    /// Quotient series; the divisor must have a nonzero constant term.
    pub fn try_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(other);
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(JetError::DivisionByZero {
                base_point: self.base_point,
            });
        }
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 0..k {
                acc -= coeffs[j] * other.coeffs[k - j];
            }
            coeffs[k] = acc / b0;
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, exponent: u32) -> Jet {
        let mut acc = Jet::constant(1.0, self.base_point, self.order());
        for _ in 0..exponent {
            acc = acc.mul(self);
        }
        acc
    }

    /// Sine and cosine of the jet, computed jointly by the standard
    /// coefficient recurrence for `s' = a'·c`, `c' = -a'·s`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..n {
            let mut sk = 0.0;
            let mut ck = 0.0;
            for j in 1..=k {
                let ja = j as f64 * self.coeffs[j];
                sk += ja * c[k - j];
                ck -= ja * s[k - j];
            }
            s[k] = sk / k as f64;
            c[k] = ck / k as f64;
        }
        (
            Jet {
                base_point: self.base_point,
                coeffs: s,
            },
            Jet {
                base_point: self.base_point,
                coeffs: c,
            },
        )
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// Square-root series; the constant term must be strictly positive.
    pub fn try_sqrt(&self) -> Result<Jet, JetError> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(JetError::Domain {
                op: "sqrt",
                value: a0,
                base_point: self.base_point,
            });
        }
        let n = self.coeffs.len();
        let mut r = vec![0.0; n];
        r[0] = a0.sqrt();
        for k in 1..n {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs: r,
        })
    }

    /// Jet of the derivative; drops one order.
    pub fn derivative(&self) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let coeffs = (1..self.coeffs.len())
            .map(|k| k as f64 * self.coeffs[k])
            .collect();
        Jet {
            base_point: self.base_point,
            coeffs,
        }
    }

    /// Truncate to a lower order.
    pub fn truncated(&self, order: usize) -> Jet {
        assert!(order <= self.order());
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Angle jet of the pair `(s, c)`, anchored at the principal value
    /// `atan2(s(t0), c(t0))` and continued by integrating
    /// `θ' = (s'c - c's) / (s² + c²)`.
    ///
    /// The result has the common order of `s` and `c`; the pair may not both
    /// vanish at the base point.
    pub fn atan2_pair(s: &Jet, c: &Jet) -> Result<Jet, JetError> {
        s.check_compatible(c);
        let (s0, c0) = (s.coeffs[0], c.coeffs[0]);
        if s0 == 0.0 && c0 == 0.0 {
            return Err(JetError::Domain {
                op: "atan2",
                value: 0.0,
                base_point: s.base_point,
            });
        }
        let order = s.order();
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = s0.atan2(c0);
        if order >= 1 {
            let st = s.truncated(order - 1);
            let ct = c.truncated(order - 1);
            let numer = s.derivative().mul(&ct).sub(&c.derivative().mul(&st));
            let denom = st.mul(&st).add(&ct.mul(&ct));
            let rate = numer.try_div(&denom)?;
            for k in 1..=order {
                coeffs[k] = rate.coeffs[k - 1] / k as f64;
            }
        }
        Ok(Jet {
            base_point: s.base_point,
            coeffs,
        })
    }
}

impl std::ops::Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet::add(self, rhs)
    }
}

impl std::ops::Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet::sub(self, rhs)
    }
}

impl std::ops::Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::mul(self, rhs)
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::neg(self)
    }
}

/// Three scalar jets sharing a base point and order: the Taylor expansion of
/// a curve in R³.
#[derive(Debug, Clone, PartialEq)]
pub struct VecJet {
    pub x: Jet,
    pub y: Jet,
    pub z: Jet,
}

impl VecJet {
    pub fn new(x: Jet, y: Jet, z: Jet) -> Self {
        x.check_compatible(&y);
        x.check_compatible(&z);
        VecJet { x, y, z }
    }

    pub fn constant(value: [f64; 3], base_point: f64, order: usize) -> Self {
        VecJet {
            x: Jet::constant(value[0], base_point, order),
            y: Jet::constant(value[1], base_point, order),
            z: Jet::constant(value[2], base_point, order),
        }
    }

    pub fn base_point(&self) -> f64 {
        self.x.base_point()
    }

    pub fn order(&self) -> usize {
        self.x.order()
    }

    pub fn value(&self) -> [f64; 3] {
        [self.x.value(), self.y.value(), self.z.value()]
    }

    /// The k-th Taylor coefficient as a vector.
    pub fn coeff_vec(&self, k: usize) -> [f64; 3] {
        [self.x.coeff(k), self.y.coeff(k), self.z.coeff(k)]
    }

    pub fn add(&self, other: &VecJet) -> VecJet {
        VecJet {
            x: self.x.add(&other.x),
            y: self.y.add(&other.y),
            z: self.z.add(&other.z),
        }
    }

    pub fn sub(&self, other: &VecJet) -> VecJet {
        VecJet {
            x: self.x.sub(&other.x),
            y: self.y.sub(&other.y),
            z: self.z.sub(&other.z),
        }
    }

    pub fn neg(&self) -> VecJet {
        VecJet {
            x: self.x.neg(),
            y: self.y.neg(),
            z: self.z.neg(),
        }
    }

    pub fn scale(&self, factor: f64) -> VecJet {
        VecJet {
            x: self.x.scale(factor),
            y: self.y.scale(factor),
            z: self.z.scale(factor),
        }
    }

    /// Componentwise product with a scalar jet.
    pub fn scale_jet(&self, factor: &Jet) -> VecJet {
        VecJet {
            x: self.x.mul(factor),
            y: self.y.mul(factor),
            z: self.z.mul(factor),
        }
    }

    pub fn try_div_jet(&self, divisor: &Jet) -> Result<VecJet, JetError> {
        Ok(VecJet {
            x: self.x.try_div(divisor)?,
            y: self.y.try_div(divisor)?,
            z: self.z.try_div(divisor)?,
        })
    }

    pub fn dot(&self, other: &VecJet) -> Jet {
        self.x
            .mul(&other.x)
            .add(&self.y.mul(&other.y))
            .add(&self.z.mul(&other.z))
    }

    pub fn cross(&self, other: &VecJet) -> VecJet {
        VecJet {
            x: self.y.mul(&other.z).sub(&self.z.mul(&other.y)),
            y: self.z.mul(&other.x).sub(&self.x.mul(&other.z)),
            z: self.x.mul(&other.y).sub(&self.y.mul(&other.x)),
        }
    }

    /// Euclidean norm as a jet; fails when the vector vanishes at the base
    /// point.
    pub fn norm(&self) -> Result<Jet, JetError> {
        self.dot(self).try_sqrt()
    }

    pub fn normalize(&self) -> Result<VecJet, JetError> {
        let n = self.norm()?;
        self.try_div_jet(&n)
    }

    pub fn derivative(&self) -> VecJet {
        VecJet {
            x: self.x.derivative(),
            y: self.y.derivative(),
            z: self.z.derivative(),
        }
    }

    pub fn truncated(&self, order: usize) -> VecJet {
        VecJet {
            x: self.x.truncated(order),
            y: self.y.truncated(order),
            z: self.z.truncated(order),
        }
    }

    /// Divide by `(t - t0)^m`: drop the first `m` coefficient vectors, which
    /// must all be zero within [`DEFLATE_TOL`]. The order drops by `m`.
    pub fn deflate(&self, multiplicity: usize) -> Result<VecJet, JetError> {
        assert!(
            multiplicity <= self.order(),
            "deflation multiplicity {} exceeds jet order {}",
            multiplicity,
            self.order()
        );
        for k in 0..multiplicity {
            for component in [&self.x, &self.y, &self.z] {
                let magnitude = component.coeff(k).abs();
                if magnitude > DEFLATE_TOL {
                    return Err(JetError::NotDeflatable {
                        index: k,
                        magnitude,
                    });
                }
            }
        }
        let strip = |jet: &Jet| Jet {
            base_point: jet.base_point,
            coeffs: jet.coeffs[multiplicity..].to_vec(),
        };
        Ok(VecJet {
            x: strip(&self.x),
            y: strip(&self.y),
            z: strip(&self.z),
        })
    }

    /// Multiply by `(t - t0)^m`: prepend `m` zero coefficients, raising the
    /// order by `m`. Inverse of [`VecJet::deflate`].
    pub fn lift(&self, multiplicity: usize) -> VecJet {
        let pad = |jet: &Jet| {
            let mut coeffs = vec![0.0; multiplicity];
            coeffs.extend_from_slice(&jet.coeffs);
            Jet {
                base_point: jet.base_point,
                coeffs,
            }
        };
        VecJet {
            x: pad(&self.x),
            y: pad(&self.y),
            z: pad(&self.z),
        }
    }

    /// Index of the first nonzero coefficient vector, or `None` when every
    /// coefficient is below the deflation tolerance.
    pub fn vanishing_order(&self) -> Option<usize> {
        (0..=self.order()).find(|&k| {
            self.coeff_vec(k)
                .iter()
                .any(|component| component.abs() > DEFLATE_TOL)
        })
    }
}

/// Scalar triple product `a · (b × c)` as a jet.
pub fn det3(a: &VecJet, b: &VecJet, c: &VecJet) -> Jet {
    a.dot(&b.cross(c))
}
