//! The shortest-multicurve valuation on first homology, its unit ball,
//! and the counting constant the ball's area predicts.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{fabs, log, log1p};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::counting::Convention;
use crate::farey::{self, FareyError, TreeNode};
use crate::sl2::{hyperbolic_length, FrickeTriple};
use crate::words::{HomologyClass, Slope};
use crate::{gcd_i64, ALG_TOL};

/// Cross products this close to zero are treated as collinear by the
/// hull: well above f64 rounding noise on O(1) coordinates, far below
/// any resolvable geometry.
const HULL_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormError {
    /// Fewer than 3 points, or all collinear.
    Degenerate,
    /// Gauge evaluation on a ball without vertices.
    EmptyBall,
}

impl fmt::Display for NormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormError::Degenerate => write!(f, "degenerate point set (collinear or too small)"),
            NormError::EmptyBall => write!(f, "empty ball approximation"),
        }
    }
}

/// Multiplicity and primitive length behind a valuation value: the class
/// is `multiplicity` times a primitive of geodesic length
/// `primitive_length`. None for the trivial class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuationParts {
    pub multiplicity: u64,
    pub primitive_length: f64,
}

/// Decompose h = g * primitive and measure the primitive geodesic.
pub fn valuation_parts(triple: FrickeTriple, h: HomologyClass) -> Option<ValuationParts> {
    if h.is_zero() {
        return None;
    }
    let g = gcd_i64(h.m, h.n);
    let slope = Slope::canonical(h.m / g as i64, h.n / g as i64);
    let trace = farey::slope_trace(triple, slope);
    Some(ValuationParts {
        multiplicity: g,
        primitive_length: hyperbolic_length(trace).expect("simple trace is hyperbolic"),
    })
}

/// Length of the shortest multicurve representing h: zero for the
/// trivial class, otherwise g times the primitive geodesic length where
/// g = gcd(|m|, |n|). Integer homogeneity holds by construction.
pub fn valuation(triple: FrickeTriple, h: HomologyClass) -> f64 {
    match valuation_parts(triple, h) {
        None => 0.0,
        Some(p) => p.multiplicity as f64 * p.primitive_length,
    }
}

/// Polygonal inner approximation of the unit ball, counterclockwise,
/// with its shoelace area.
#[derive(Debug, Clone, PartialEq)]
pub struct BallApprox {
    pub vertices: Vec<[f64; 2]>,
    pub area: f64,
    pub depth: u32,
}

impl BallApprox {
    /// Check convexity (up to collinearity noise at deep samples),
    /// central symmetry, and that the origin lies strictly inside.
    /// Returns the worst symmetry mismatch on success.
    pub fn validate(&self) -> Result<f64, NormError> {
        let v = &self.vertices;
        let k = v.len();
        if k < 3 {
            return Err(NormError::Degenerate);
        }
        for i in 0..k {
            let p = v[i];
            let q = v[(i + 1) % k];
            let r = v[(i + 2) % k];
            let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
            if cross < -HULL_EPS {
                return Err(NormError::Degenerate);
            }
            // origin strictly inside: on the inner side of every edge
            let inside = (q[0] - p[0]) * (-p[1]) - (q[1] - p[1]) * (-p[0]);
            if inside <= 0.0 {
                return Err(NormError::Degenerate);
            }
        }
        let mut worst = 0.0f64;
        for p in v {
            let neg = [-p[0], -p[1]];
            let gap = v
                .iter()
                .map(|q| fabs(q[0] - neg[0]) + fabs(q[1] - neg[1]))
                .fold(f64::INFINITY, f64::min);
            if gap > worst {
                worst = gap;
            }
        }
        if worst > ALG_TOL {
            return Err(NormError::Degenerate);
        }
        Ok(worst)
    }
}

/// Boundary samples (m, n) / l(m, n) and their negatives, over both
/// quadrant trees to the given Farey generation depth plus the axes.
pub fn ball_boundary_points(triple: FrickeTriple, depth: u32) -> Vec<[f64; 2]> {
    let mut points = Vec::new();
    let mut push = |m: i64, n: i64, trace: f64| {
        let len = hyperbolic_length(trace).expect("simple trace is hyperbolic");
        let p = [m as f64 / len, n as f64 / len];
        points.push(p);
        points.push([-p[0], -p[1]]);
    };
    push(1, 0, triple.x);
    push(0, 1, triple.y);
    for seed in farey::quadrant_seeds(triple) {
        let _ = farey::walk::<f64, core::convert::Infallible, _>(seed, &mut |node: &TreeNode<
            f64,
        >| {
            let (m, n) = node.mediant_pair();
            push(m, n, node.t_med);
            Ok(node.depth < depth)
        });
    }
    points
}

fn cross(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull in counterclockwise order, with shoelace area. Points on
/// (or within HULL_EPS of) the boundary are kept as vertices: deep
/// boundary samples of a strictly convex curve can sit closer to the
/// chord of their neighbors than f64 resolves, and dropping them would
/// misreport genuine boundary contact as interiority.
pub fn hull_area(points: &[[f64; 2]]) -> Result<BallApprox, NormError> {
    if points.len() < 3 {
        return Err(NormError::Degenerate);
    }
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();

    // Andrew's monotone chain; only points strictly inside are popped
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) < -HULL_EPS
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) < -HULL_EPS
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    let mut hull = lower;
    hull.extend(upper);

    if hull.len() < 3 {
        return Err(NormError::Degenerate);
    }
    let mut area2 = 0.0;
    for i in 0..hull.len() {
        let p = hull[i];
        let q = hull[(i + 1) % hull.len()];
        area2 += p[0] * q[1] - p[1] * q[0];
    }
    if area2 < 1e-12 {
        // fully collinear input survives the chain; reject it here
        return Err(NormError::Degenerate);
    }
    Ok(BallApprox {
        vertices: hull,
        area: area2 / 2.0,
        depth: 0,
    })
}

/// Sample the ball boundary to `depth` and take the convex hull.
pub fn unit_ball(triple: FrickeTriple, depth: u32) -> Result<BallApprox, NormError> {
    let mut ball = hull_area(&ball_boundary_points(triple, depth))?;
    ball.depth = depth;
    Ok(ball)
}

/// Counting constant predicted by the ball area: primitive lattice
/// points have density 1/zeta(2), and the unoriented count takes one
/// point per +-h pair.
pub fn predict_c(ball: &BallApprox, convention: Convention) -> f64 {
    let zeta2 = PI * PI / 6.0;
    match convention {
        Convention::Unoriented => ball.area / (2.0 * zeta2),
        Convention::Oriented => ball.area / zeta2,
    }
}

/// Gauge function of the hull polygon: the smallest lambda > 0 with
/// v / lambda on the hull boundary. An upper bound on the true norm
/// (the hull is an inner approximation), positively homogeneous.
pub fn norm_eval_real(ball: &BallApprox, v: [f64; 2]) -> Result<f64, NormError> {
    let k = ball.vertices.len();
    if k < 3 {
        return Err(NormError::EmptyBall);
    }
    if v == [0.0, 0.0] {
        return Ok(0.0);
    }
    let mut gauge = 0.0f64;
    for i in 0..k {
        let p = ball.vertices[i];
        let q = ball.vertices[(i + 1) % k];
        // outward normal of the CCW edge p -> q
        let n = [q[1] - p[1], p[0] - q[0]];
        let h = n[0] * p[0] + n[1] * p[1];
        let g = (n[0] * v[0] + n[1] * v[1]) / h;
        if g > gauge {
            gauge = g;
        }
    }
    Ok(gauge)
}

/// Floor integer square root by Newton's method.
fn isqrt(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::from(0);
    }
    let mut x: BigInt = BigInt::from(1) << (n.bits() / 2 + 1) as usize;
    loop {
        let y: BigInt = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// 2 * lambda * 2^p rounded down, where lambda = (t + sqrt(t^2 - 4)) / 2
/// is the translation eigenvalue: geodesic length = 2 ln lambda.
fn scaled_eigen(t: &BigInt, p: usize) -> BigInt {
    let disc: BigInt = (t * t - 4) << (2 * p);
    (t << p) + isqrt(&disc)
}

/// ln of a positive big integer, accurate to a few ulps of the result.
fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return log(ToPrimitive::to_f64(n).expect("positive and in range"));
    }
    let shift = (bits - 53) as usize;
    let top = ToPrimitive::to_f64(&(n >> shift)).expect("53-bit value");
    log(top) + shift as f64 * core::f64::consts::LN_2
}

/// Triangle defect l(h) + l(g) - l(h + g) of the valuation on an exact
/// integer seed triple, with full relative accuracy even when the
/// defect sits far below the f64 resolution of the lengths themselves.
/// Deep Farey-neighbor pairs have defects of order 1 / (trace * trace),
/// e.g. ~1e-25 already at coordinates around 15, where the plain f64
/// difference of valuations rounds to zero. Lengths are 2 ln lambda for
/// the eigenvalue lambda, so the defect is the log of a ratio of
/// products of eigenvalues; those are carried as 192-fractional-bit
/// integers and the final log of a near-unity ratio goes through log1p.
pub fn triangle_margin_exact(
    x: i64,
    y: i64,
    z: i64,
    h: HomologyClass,
    g: HomologyClass,
) -> Result<f64, FareyError> {
    const P: usize = 192;
    // margin / 2 = ln(num / den); each class contributes eigen^mult on
    // its side and the (2 * 2^P) scale factor on the opposite side
    let scale: BigInt = BigInt::from(1) << (P + 1);
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for (class, positive) in [(h, true), (g, true), (h.add(&g), false)] {
        if class.is_zero() {
            continue;
        }
        let mult = gcd_i64(class.m, class.n);
        let slope = Slope::canonical(class.m / mult as i64, class.n / mult as i64);
        let t = farey::slope_trace_exact(x, y, z, slope)?;
        let eigen = scaled_eigen(&t, P);
        let (side, other) = if positive {
            (&mut num, &mut den)
        } else {
            (&mut den, &mut num)
        };
        for _ in 0..mult {
            *side *= &eigen;
            *other *= &scale;
        }
    }
    if num == den {
        return Ok(0.0);
    }
    let margin = if (num.bits() as i64 - den.bits() as i64).abs() <= 2 {
        // near-unity ratio: extract (num - den) / den exactly first
        let q: BigInt = ((&num - &den) << 256usize) / &den;
        log1p(ToPrimitive::to_f64(&q).expect("bounded by 2^259") / libm::exp2(256.0))
    } else {
        ln_big(&num) - ln_big(&den)
    };
    Ok(2.0 * margin)
}
