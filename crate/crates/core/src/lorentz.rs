//! Linear algebra of Minkowski 3-space with signature (-, +, +).
//!
//! The first coordinate is the timelike axis. Every quantity here is a pure
//! function of its arguments.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Default relative tolerance for causal classification.
pub const CAUSAL_TOL: f64 = 1e-9;

/// A vector of Minkowski 3-space; `x1` is the timelike coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MVec3 {
    pub const ZERO: MVec3 = MVec3::new(0.0, 0.0, 0.0);
    pub const E1: MVec3 = MVec3::new(1.0, 0.0, 0.0);
    pub const E2: MVec3 = MVec3::new(0.0, 1.0, 0.0);
    pub const E3: MVec3 = MVec3::new(0.0, 0.0, 1.0);
    pub const NAN: MVec3 = MVec3::new(f64::NAN, f64::NAN, f64::NAN);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MVec3 { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Squared Euclidean magnitude, used as the scale for tolerances.
    pub fn euclid_sq(self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn euclid_norm(self) -> f64 {
        self.euclid_sq().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    pub fn dot(self, other: MVec3) -> f64 {
        mdot(self, other)
    }

    pub fn cross(self, other: MVec3) -> MVec3 {
        lcross(self, other)
    }

    pub fn norm(self) -> f64 {
        mnorm(self)
    }

    /// Unit vector along `self` under the Minkowski norm.
    pub fn normalized(self) -> Option<MVec3> {
        let n = mnorm(self);
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn causal(self) -> CausalCharacter {
        causal_character(self, CAUSAL_TOL)
    }
}

impl fmt::Display for MVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

impl Add for MVec3 {
    type Output = MVec3;
    fn add(self, o: MVec3) -> MVec3 {
        MVec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for MVec3 {
    type Output = MVec3;
    fn sub(self, o: MVec3) -> MVec3 {
        MVec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl AddAssign for MVec3 {
    fn add_assign(&mut self, o: MVec3) {
        *self = *self + o;
    }
}

impl SubAssign for MVec3 {
    fn sub_assign(&mut self, o: MVec3) {
        *self = *self - o;
    }
}

impl Neg for MVec3 {
    type Output = MVec3;
    fn neg(self) -> MVec3 {
        MVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for MVec3 {
    type Output = MVec3;
    fn mul(self, k: f64) -> MVec3 {
        MVec3::new(self.x1 * k, self.x2 * k, self.x3 * k)
    }
}

impl Mul<MVec3> for f64 {
    type Output = MVec3;
    fn mul(self, v: MVec3) -> MVec3 {
        v * self
    }
}

impl Div<f64> for MVec3 {
    type Output = MVec3;
    fn div(self, k: f64) -> MVec3 {
        MVec3::new(self.x1 / k, self.x2 / k, self.x3 / k)
    }
}

/// Lorentzian inner product `-x1 y1 + x2 y2 + x3 y3`.
pub fn mdot(x: MVec3, y: MVec3) -> f64 {
    -x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3
}

/// Norm `sqrt(|<v, v>|)`; zero for null vectors.
pub fn mnorm(v: MVec3) -> f64 {
    mdot(v, v).abs().sqrt()
}

/// Lorentz vector product, component formula
/// `(x2 y3 - x3 y2, x1 y3 - x3 y1, -(x1 y2 - x2 y1))`.
pub fn lcross(x: MVec3, y: MVec3) -> MVec3 {
    MVec3::new(
        x.x2 * y.x3 - x.x3 * y.x2,
        x.x1 * y.x3 - x.x3 * y.x1,
        -(x.x1 * y.x2 - x.x2 * y.x1),
    )
}

/// Mixed product `<a, b x c>`.
pub fn mixed(a: MVec3, b: MVec3, c: MVec3) -> f64 {
    mdot(a, lcross(b, c))
}

/// The three Lorentzian causal characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Null,
}

impl CausalCharacter {
    /// Sign of `<v, v>` for a unit vector of this character.
    pub fn signature(self) -> f64 {
        match self {
            CausalCharacter::Timelike => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalCharacter::Spacelike => "spacelike",
            CausalCharacter::Timelike => "timelike",
            CausalCharacter::Null => "null",
        };
        f.write_str(s)
    }
}

/// Classifies `v`; the null band is `|<v,v>| <= tol * |v|_E^2`.
///
/// The zero vector is spacelike by convention.
pub fn causal_character(v: MVec3, tol: f64) -> CausalCharacter {
    let q = mdot(v, v);
    let scale = v.euclid_sq();
    if scale == 0.0 {
        return CausalCharacter::Spacelike;
    }
    let threshold = tol * scale;
    if q.abs() <= threshold {
        CausalCharacter::Null
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

/// Future-pointing means a positive timelike coordinate.
pub fn is_future_pointing(v: MVec3) -> bool {
    v.x1 > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleKind {
    /// Two co-oriented timelike vectors.
    Hyperbolic,
    /// Two spacelike vectors spanning a timelike plane.
    Central,
    /// Two spacelike vectors spanning a spacelike plane.
    Spacelike,
    /// One spacelike and one timelike vector.
    LorentzianTimelike,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzAngle {
    pub kind: AngleKind,
    /// Always non-negative.
    pub theta: f64,
    /// Sign of `<x, y>`; the angle itself is computed from `|<x, y>|`
    /// where the defining identity would otherwise force a negative angle.
    pub product_sign: f64,
}

/// Angle between two non-null vectors, dispatched on their causal characters.
pub fn lorentz_angle(x: MVec3, y: MVec3) -> Result<LorentzAngle> {
    lorentz_angle_with_tol(x, y, CAUSAL_TOL)
}

pub fn lorentz_angle_with_tol(x: MVec3, y: MVec3, tol: f64) -> Result<LorentzAngle> {
    use CausalCharacter::*;
    if x.euclid_sq() == 0.0 || y.euclid_sq() == 0.0 {
        return Err(Error::NullInput);
    }
    let cx = causal_character(x, tol);
    let cy = causal_character(y, tol);
    if cx == Null || cy == Null {
        return Err(Error::NullInput);
    }
    let p = mdot(x, y);
    let nn = mnorm(x) * mnorm(y);
    let product_sign = if p < 0.0 { -1.0 } else { 1.0 };
    let (kind, theta) = match (cx, cy) {
        (Timelike, Timelike) => {
            if is_future_pointing(x) != is_future_pointing(y) {
                return Err(Error::MixedOrientation);
            }
            (AngleKind::Hyperbolic, (-p / nn).max(1.0).acosh())
        }
        (Spacelike, Spacelike) => {
            // Gram determinant of the span: positive for a spacelike plane,
            // negative for a timelike one.
            let gram = mdot(x, x) * mdot(y, y) - p * p;
            if gram.abs() <= tol * x.euclid_sq() * y.euclid_sq() {
                return Err(Error::DegenerateSpan);
            }
            if gram < 0.0 {
                (AngleKind::Central, (p.abs() / nn).max(1.0).acosh())
            } else {
                (AngleKind::Spacelike, (p / nn).clamp(-1.0, 1.0).acos())
            }
        }
        _ => (AngleKind::LorentzianTimelike, (p.abs() / nn).asinh()),
    };
    Ok(LorentzAngle {
        kind,
        theta,
        product_sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mdot_basis() {
        assert_eq!(mdot(MVec3::E1, MVec3::E1), -1.0);
        assert_eq!(mdot(MVec3::E2, MVec3::E2), 1.0);
        let n = MVec3::new(1.0, 1.0, 0.0);
        assert_eq!(mdot(n, n), 0.0);
    }

    #[test]
    fn causal_examples() {
        assert_eq!(causal_character(MVec3::E1, 1e-9), CausalCharacter::Timelike);
        assert_eq!(
            causal_character(MVec3::ZERO, 1e-9),
            CausalCharacter::Spacelike
        );
        assert_eq!(
            causal_character(MVec3::new(1.0, 1.0, 0.0), 1e-9),
            CausalCharacter::Null
        );
        // near the light cone the band is relative to the Euclidean size
        let v = MVec3::new(1e6, 1e6 + 1e-4, 0.0);
        assert_eq!(causal_character(v, 1e-9), CausalCharacter::Null);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(mnorm(MVec3::E1), 1.0);
        assert_relative_eq!(mnorm(MVec3::new(3.0, 4.0, 0.0)), 7f64.sqrt());
        assert_eq!(mnorm(MVec3::new(1.0, 1.0, 0.0)), 0.0);
    }

    #[test]
    fn cross_examples() {
        assert_eq!(lcross(MVec3::E2, MVec3::E3), MVec3::E1);
        let x = MVec3::new(0.3, -1.2, 2.5);
        assert_eq!(lcross(x, x), MVec3::ZERO);
        assert_eq!(lcross(MVec3::E3, MVec3::E1), -MVec3::E2);
        assert_eq!(lcross(MVec3::E1, MVec3::E2), -MVec3::E3);
    }

    #[test]
    fn mixed_examples() {
        assert_eq!(mixed(MVec3::E1, MVec3::E2, MVec3::E3), -1.0);
        let a = MVec3::new(1.0, 2.0, 3.0);
        let c = MVec3::new(-0.5, 0.25, 4.0);
        assert_eq!(mixed(a, a, c), 0.0);
    }

    #[test]
    fn angle_examples() {
        let h = lorentz_angle(MVec3::E1, MVec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(h.kind, AngleKind::Hyperbolic);
        assert_eq!(h.theta, 0.0);

        let sp = lorentz_angle(MVec3::E2, MVec3::E3).unwrap();
        assert_eq!(sp.kind, AngleKind::Spacelike);
        assert_relative_eq!(sp.theta, std::f64::consts::FRAC_PI_2);

        let c = lorentz_angle(MVec3::E2, MVec3::new(1.0, 2f64.sqrt(), 0.0)).unwrap();
        assert_eq!(c.kind, AngleKind::Central);
        assert_relative_eq!(c.theta, 2f64.sqrt().acosh(), epsilon = 1e-12);
        assert_relative_eq!(c.theta, 0.881373587019543, epsilon = 1e-12);

        let lt = lorentz_angle(MVec3::E2, MVec3::new(2.0, -1.0, 0.0)).unwrap();
        assert_eq!(lt.kind, AngleKind::LorentzianTimelike);
        assert_eq!(lt.product_sign, -1.0);
        assert_relative_eq!(lt.theta, (1.0 / 3f64.sqrt()).asinh(), epsilon = 1e-12);
    }

    #[test]
    fn angle_errors() {
        let n = MVec3::new(1.0, 0.0, 1.0);
        assert_eq!(lorentz_angle(n, MVec3::E2), Err(Error::NullInput));
        assert_eq!(lorentz_angle(MVec3::ZERO, MVec3::E2), Err(Error::NullInput));
        assert_eq!(
            lorentz_angle(MVec3::E1, -MVec3::E1),
            Err(Error::MixedOrientation)
        );
        // e2 and e2 + (e1 + e3) span the plane containing the null vector e1 + e3
        let y = MVec3::new(1.0, 1.0, 1.0);
        assert_eq!(lorentz_angle(MVec3::E2, y), Err(Error::DegenerateSpan));
    }
}
