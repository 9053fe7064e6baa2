//! The rotation model of an ellipsoidal satellite on a Keplerian orbit.
//!
//! State `(theta, phi, f)`: rotation angle, its time derivative and the true
//! anomaly. With `q = 1 + e cos f` and `u = 2(theta - f)`,
//!
//! ```text
//! theta' = phi
//! phi'   = -(omega^2 / 2 r^3) sin u = -kappa q^3 sin u
//! f'     = q^2 / (1 - e^2)^{3/2}     =  K q^2
//! ```
//!
//! where `r = (1 - e^2)/q`, `kappa = omega^2 / (2 (1-e^2)^3)` and
//! `K = (1-e^2)^{-3/2}`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::interval::{IMat, IVec, Interval, ParseError};

/// Arithmetic shared by rigorous (`Interval`) and plain (`f64`) evaluation.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
{
    fn from_f64(x: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

impl Scalar for Interval {
    fn from_f64(x: f64) -> Self {
        Interval::point(x)
    }
    fn sin(self) -> Self {
        Interval::sin(self)
    }
    fn cos(self) -> Self {
        Interval::cos(self)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("unknown parameter '{0}' (expected e or omega2)")]
    Unknown(String),
    #[error("eccentricity must satisfy 0 <= e < 1, got {0}")]
    Eccentricity(String),
    #[error("omega2 must satisfy 0 <= omega2 <= 1, got {0}")]
    Omega2(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Eccentricity and the oblateness parameter, kept as the decimal strings
/// they were given in and as outward-rounded enclosures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub e: String,
    pub omega2: String,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            e: "0.1".into(),
            omega2: "0.79".into(),
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e={},omega2={}", self.e, self.omega2)
    }
}

impl ModelParams {
    pub fn new(e: &str, omega2: &str) -> Result<Self, ParamError> {
        let p = ModelParams {
            e: e.trim().to_string(),
            omega2: omega2.trim().to_string(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Parse `e=0.1,omega2=0.79`; missing keys keep their defaults.
    pub fn parse_overrides(spec: &str) -> Result<Self, ParamError> {
        let mut p = ModelParams::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| ParamError::Unknown(item.to_string()))?;
            match k.trim() {
                "e" => p.e = v.trim().to_string(),
                "omega2" | "w2" => p.omega2 = v.trim().to_string(),
                other => return Err(ParamError::Unknown(other.to_string())),
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let e: Interval = self.e.parse()?;
        let w: Interval = self.omega2.parse()?;
        if !(e.lo() >= 0.0 && e.hi() < 1.0) {
            return Err(ParamError::Eccentricity(self.e.clone()));
        }
        if !(w.lo() >= 0.0 && w.hi() <= 1.0) {
            return Err(ParamError::Omega2(self.omega2.clone()));
        }
        Ok(())
    }

    pub fn e_interval(&self) -> Interval {
        self.e.parse().expect("validated")
    }

    pub fn omega2_interval(&self) -> Interval {
        self.omega2.parse().expect("validated")
    }

    /// Rigorous field constants.
    pub fn coefficients(&self) -> Coefficients<Interval> {
        let e = self.e_interval();
        let w = self.omega2_interval();
        let one_m = Interval::ONE - e.sqr();
        let k = one_m
            .powi(3)
            .sqrt()
            .expect("1 - e^2 > 0")
            .recip()
            .expect("1 - e^2 > 0");
        let kappa = w
            .checked_div(one_m.powi(3) * 2.0)
            .expect("1 - e^2 > 0");
        Coefficients {
            e,
            kappa,
            k,
            sign: 1.0,
        }
    }

    /// Plain floating-point constants for non-rigorous work.
    pub fn coefficients_f64(&self) -> Coefficients<f64> {
        let c = self.coefficients();
        Coefficients {
            e: c.e.mid(),
            kappa: c.kappa.mid(),
            k: c.k.mid(),
            sign: 1.0,
        }
    }
}

/// Constants of the vector field; `sign = -1` gives the time-reversed field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    pub e: T,
    pub kappa: T,
    pub k: T,
    pub sign: f64,
}

impl<T: Scalar> Coefficients<T> {
    pub fn reversed(&self) -> Self {
        Coefficients {
            sign: -self.sign,
            ..*self
        }
    }
}

/// `r = (1 - e^2) / (1 + e cos f)`.
pub fn radius(f: Interval, params: &ModelParams) -> Interval {
    let e = params.e_interval();
    let q = Interval::ONE + e * f.cos();
    (Interval::ONE - e.sqr())
        .checked_div(q)
        .expect("e < 1 keeps 1 + e cos f positive")
}

/// Right-hand side of the three-dimensional system.
pub fn field<T: Scalar>(s: [T; 3], co: &Coefficients<T>) -> [T; 3] {
    let [theta, phi, f] = s;
    let q = T::from_f64(1.0) + co.e * f.cos();
    let q2 = q * q;
    let u = (theta - f) * 2.0;
    [
        phi * co.sign,
        -(co.kappa * q2 * q * u.sin()) * co.sign,
        co.k * q2 * co.sign,
    ]
}

pub fn vector_field(s: &IVec<3>, params: &ModelParams) -> IVec<3> {
    IVec(field(s.0, &params.coefficients()))
}

/// Jacobian of [`field`]; rows are `theta', phi', f'`.
pub fn jacobian<T: Scalar>(s: [T; 3], co: &Coefficients<T>) -> [[T; 3]; 3] {
    let [theta, _, f] = s;
    let zero = T::from_f64(0.0);
    let (sf, cf) = (f.sin(), f.cos());
    let q = T::from_f64(1.0) + co.e * cf;
    let q2 = q * q;
    let q3 = q2 * q;
    let u = (theta - f) * 2.0;
    let (su, cu) = (u.sin(), u.cos());
    let d_phi_theta = -(co.kappa * q3 * cu) * 2.0;
    let d_phi_f = co.kappa * (co.e * q2 * sf * su * 3.0 + q3 * cu * 2.0);
    let d_f_f = -(co.e * co.k * q * sf) * 2.0;
    let s = co.sign;
    [
        [zero, T::from_f64(s), zero],
        [d_phi_theta * s, zero, d_phi_f * s],
        [zero, zero, d_f_f * s],
    ]
}

/// Field together with the variational right-hand side `J(s) V`.
pub fn variational_field(
    s: &IVec<3>,
    v: &IMat<3>,
    params: &ModelParams,
) -> (IVec<3>, IMat<3>) {
    let co = params.coefficients();
    let j = IMat(jacobian(s.0, &co));
    (IVec(field(s.0, &co)), j.matmul(v))
}

/// Reversing symmetry on the section, `(theta, phi) -> (pi - theta, phi)`.
pub fn apply_r(p: &IVec<2>) -> IVec<2> {
    IVec([Interval::pi() - p[0], p[1]])
}

pub fn apply_r_point(p: [f64; 2]) -> [f64; 2] {
    [std::f64::consts::PI - p[0], p[1]]
}
