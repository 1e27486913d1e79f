//! Real 2x2 unit-determinant matrix algebra, holonomy representations
//! from Fricke trace coordinates, and trace-to-length conversion.

use core::fmt;

use libm::{acosh, fabs, sqrt};

use crate::ALG_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum Sl2Error {
    /// The quadratic for the third trace has no real root.
    NoHyperbolicStructure,
    /// Trace coordinates fail the Fricke relation or the > 2 range check.
    InvalidTriple { residual: f64 },
    /// |trace| <= 2: elliptic or parabolic class, no closed geodesic.
    NotHyperbolic { trace: f64 },
    /// Lower-left entry is zero; the axis passes through infinity.
    AxisThroughInfinity,
}

impl fmt::Display for Sl2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sl2Error::NoHyperbolicStructure => {
                write!(f, "no hyperbolic structure: negative discriminant")
            }
            Sl2Error::InvalidTriple { residual } => {
                write!(f, "invalid Fricke triple (residual {residual:e})")
            }
            Sl2Error::NotHyperbolic { trace } => {
                write!(f, "trace {trace} is not hyperbolic (|t| <= 2)")
            }
            Sl2Error::AxisThroughInfinity => write!(f, "axis passes through infinity (c = 0)"),
        }
    }
}

/// A real 2x2 matrix, normally of unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub const IDENTITY: Mat2 = Mat2 {
    a: 1.0,
    b: 0.0,
    c: 0.0,
    d: 1.0,
};

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Adjugate inverse; valid for det = 1.
    pub fn inverse(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Conjugate g self g^-1.
    pub fn conjugate_by(&self, g: &Mat2) -> Mat2 {
        g.mul(self).mul(&g.inverse())
    }

    /// Image of w under the Mobius action (aw + b)/(cw + d).
    pub fn mobius(&self, w: f64) -> f64 {
        (self.a * w + self.b) / (self.c * w + self.d)
    }
}

/// Fricke trace coordinates (tr s, tr t, tr st) of a cusped hyperbolic
/// structure on the punctured torus. All three exceed 2 and satisfy
/// x^2 + y^2 + z^2 = xyz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrickeTriple {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Fricke relation residual x^2 + y^2 + z^2 - xyz. The triple is
/// acceptable iff |residual| <= ALG_TOL and min(x, y, z) > 2.
pub fn validate_triple(x: f64, y: f64, z: f64) -> f64 {
    x * x + y * y + z * z - x * y * z
}

// Coordinates in (2, 2 + ALG_TOL] are numerically parabolic and rejected.
fn range_ok(v: f64) -> bool {
    v > 2.0 + ALG_TOL
}

impl FrickeTriple {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, Sl2Error> {
        let residual = validate_triple(x, y, z);
        if fabs(residual) > ALG_TOL || !range_ok(x) || !range_ok(y) || !range_ok(z) {
            return Err(Sl2Error::InvalidTriple { residual });
        }
        Ok(FrickeTriple { x, y, z })
    }

    /// The modular torus, traces (3, 3, 3).
    pub fn modular() -> Self {
        FrickeTriple {
            x: 3.0,
            y: 3.0,
            z: 3.0,
        }
    }
}

/// Both roots of z^2 - xyz + x^2 + y^2 = 0, ordered z_minus <= z_plus.
pub fn complete_triple(x: f64, y: f64) -> Result<(f64, f64), Sl2Error> {
    let disc = x * x * y * y - 4.0 * (x * x + y * y);
    if disc < 0.0 {
        return Err(Sl2Error::NoHyperbolicStructure);
    }
    let s = sqrt(disc);
    Ok(((x * y - s) / 2.0, (x * y + s) / 2.0))
}

/// Holonomy images of the two standard generators.
#[derive(Debug, Clone, Copy)]
pub struct Representation {
    pub a: Mat2,
    pub b: Mat2,
    pub triple: FrickeTriple,
}

/// Build matrices (A, B) with tr A = x, tr B = y, tr AB = z.
///
/// A is fixed as [[x, 1], [-1, 0]]; B = [[p, 0], [z - xp, 1/p]] with
/// p + 1/p = y. The Fricke relation then forces tr [A, B] = -2. All
/// post-conditions are re-checked numerically rather than trusted.
pub fn build_representation(triple: FrickeTriple) -> Result<Representation, Sl2Error> {
    let FrickeTriple { x, y, z } = triple;
    let a = Mat2::new(x, 1.0, -1.0, 0.0);
    let p = (y + sqrt(y * y - 4.0)) / 2.0;
    let b = Mat2::new(p, 0.0, z - x * p, 1.0 / p);

    let rep = Representation { a, b, triple };
    let residual = check_representation(&rep);
    if fabs(residual) > ALG_TOL {
        return Err(Sl2Error::InvalidTriple { residual });
    }
    Ok(rep)
}

/// Largest deviation among the representation post-conditions: generator
/// traces, determinants, and commutator trace -2.
pub fn check_representation(rep: &Representation) -> f64 {
    let ab = rep.a.mul(&rep.b);
    let comm = ab.mul(&rep.a.inverse()).mul(&rep.b.inverse());
    let mut worst = fabs(rep.a.trace() - rep.triple.x);
    for v in [
        fabs(rep.b.trace() - rep.triple.y),
        fabs(ab.trace() - rep.triple.z),
        fabs(rep.a.det() - 1.0),
        fabs(rep.b.det() - 1.0),
        fabs(comm.trace() + 2.0),
    ] {
        if v > worst {
            worst = v;
        }
    }
    worst
}

/// Translation length 2 arccosh(|t| / 2) of a hyperbolic class.
pub fn hyperbolic_length(t: f64) -> Result<f64, Sl2Error> {
    let at = fabs(t);
    if at <= 2.0 {
        return Err(Sl2Error::NotHyperbolic { trace: t });
    }
    Ok(2.0 * acosh(at / 2.0))
}

/// The two real fixed points of a hyperbolic Mobius map, ordered p < q.
/// Roots of c w^2 + (d - a) w - b = 0.
pub fn fixed_points(m: &Mat2) -> Result<(f64, f64), Sl2Error> {
    let t = m.trace();
    if fabs(t) <= 2.0 {
        return Err(Sl2Error::NotHyperbolic { trace: t });
    }
    if m.c == 0.0 {
        return Err(Sl2Error::AxisThroughInfinity);
    }
    let disc = t * t - 4.0;
    let s = sqrt(disc);
    let r1 = (m.a - m.d + s) / (2.0 * m.c);
    let r2 = (m.a - m.d - s) / (2.0 * m.c);
    Ok(if r1 < r2 { (r1, r2) } else { (r2, r1) })
}
