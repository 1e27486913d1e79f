//! Numerical check that simple closed geodesics stay below Euclidean
//! height 1/2 once the cusp parabolic is normalized to z -> z + 1: the
//! height-1/2 horocycle has length 2, and no simple geodesic lift may
//! reach it.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use libm::{fabs, round, sqrt};

use crate::sl2::{fixed_points, Mat2, Representation, Sl2Error, IDENTITY};
use crate::words::{evaluate, oz_word, Gen, Letter, Slope, Word};
use crate::{gcd_i64, ALG_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum CuspError {
    /// Commutator trace is not -2; the puncture is not a cusp.
    NotParabolic { trace: f64 },
    /// A lift axis passed through infinity, which would enter the cusp
    /// region. A theorem violation if it ever fires on a valid input.
    AxisThroughInfinity { slope: Slope },
}

impl fmt::Display for CuspError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuspError::NotParabolic { trace } => {
                write!(f, "commutator trace {trace} is not parabolic")
            }
            CuspError::AxisThroughInfinity { slope } => {
                write!(f, "lift of slope {slope} has vertical axis")
            }
        }
    }
}

/// A representation conjugated so the cusp parabolic is +-[[1,1],[0,1]].
#[derive(Debug, Clone)]
pub struct NormalizedRep {
    pub rep: Representation,
    pub conjugator: Mat2,
    /// The normalized commutator image.
    pub commutator: Mat2,
}

/// Height certificate for one slope: the largest semicircle apex over
/// all examined lifts.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    pub slope: Slope,
    pub max_height: f64,
    pub lifts_examined: usize,
}

/// Conjugate the representation so that rho([A, B]) becomes z -> z + 1
/// up to sign. Traces are conjugation-invariant, so the spectrum is
/// unchanged.
pub fn normalize_cusp(rep: &Representation) -> Result<NormalizedRep, CuspError> {
    let ab = rep.a.mul(&rep.b);
    let comm = ab.mul(&rep.a.inverse()).mul(&rep.b.inverse());
    if fabs(comm.trace() + 2.0) > ALG_TOL {
        return Err(CuspError::NotParabolic {
            trace: comm.trace(),
        });
    }
    // work with the trace +2 lift
    let p = comm.neg();
    let g1 = if fabs(p.c) > 1e-14 {
        // send the parabolic fixed point (a - d) / 2c to infinity
        let fp = (p.a - p.d) / (2.0 * p.c);
        Mat2::new(0.0, -1.0, 1.0, -fp)
    } else {
        IDENTITY
    };
    let tri = p.conjugate_by(&g1);
    let tau = tri.b / tri.a; // tri.a = +-1; keep the sign consistent
    let k = 1.0 / sqrt(fabs(tau));
    let scale = Mat2::new(k, 0.0, 0.0, 1.0 / k);
    let conjugator = scale.mul(&g1);

    let normalized = Representation {
        a: rep.a.conjugate_by(&conjugator),
        b: rep.b.conjugate_by(&conjugator),
        triple: rep.triple,
    };
    let ncomm = comm.conjugate_by(&conjugator);
    debug_assert!(fabs(ncomm.c) < ALG_TOL && (fabs(ncomm.b) - 1.0).abs() < 1e-6);
    Ok(NormalizedRep {
        rep: normalized,
        conjugator,
        commutator: ncomm,
    })
}

/// Apex height |p - q| / 2 of the axis semicircle of a hyperbolic
/// element in the normalized frame.
pub fn lift_height(m: &Mat2) -> Result<f64, Sl2Error> {
    let (p, q) = fixed_points(m)?;
    Ok((q - p) / 2.0)
}

fn round_key(m: &Mat2) -> [i64; 4] {
    [m.a, m.b, m.c, m.d].map(|v| round(v * 1e7) as i64)
}

/// All reduced conjugator words of length <= depth, as matrices in the
/// normalized frame.
fn conjugator_matrices(rep: &Representation, depth: u32) -> Vec<Mat2> {
    let letters = [
        Letter::new(Gen::S, false),
        Letter::new(Gen::S, true),
        Letter::new(Gen::T, false),
        Letter::new(Gen::T, true),
    ];
    let images = [
        rep.a,
        rep.a.inverse(),
        rep.b,
        rep.b.inverse(),
    ];
    let mut out = alloc::vec![IDENTITY];
    // frontier of (last letter index, matrix)
    let mut frontier: Vec<(usize, Mat2)> = Vec::new();
    for (i, m) in images.iter().enumerate() {
        frontier.push((i, *m));
        out.push(*m);
    }
    for _ in 1..depth {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for (last, m) in &frontier {
            for (i, img) in images.iter().enumerate() {
                if letters[i].cancels(&letters[*last]) {
                    continue;
                }
                let prod = m.mul(img);
                out.push(prod);
                next.push((i, prod));
            }
        }
        frontier = next;
    }
    out
}

/// Max lift height per canonical slope with |m| + |n| <= word_bound,
/// over all cyclic permutations of the slope word conjugated by every
/// reduced word of length <= conj_depth (deduplicated by matrix).
pub fn verify_cusp_avoidance(
    normalized: &NormalizedRep,
    word_bound: u64,
    conj_depth: u32,
) -> Result<Vec<LiftReport>, CuspError> {
    let rep = &normalized.rep;
    let conjugators = conjugator_matrices(rep, conj_depth);
    let mut reports = Vec::new();
    let bound = word_bound as i64;
    for m in -bound..=bound {
        for n in 0..=bound {
            let canonical = n > 0 || (n == 0 && m > 0);
            if !canonical || m.abs() + n > bound || gcd_i64(m, n) != 1 {
                continue;
            }
            let slope = Slope::canonical(m, n);
            let word = oz_word(m, n).expect("coprime by filter");
            let report = slope_report(rep, slope, &word, &conjugators)?;
            reports.push(report);
        }
    }
    Ok(reports)
}

fn slope_report(
    rep: &Representation,
    slope: Slope,
    word: &Word,
    conjugators: &[Mat2],
) -> Result<LiftReport, CuspError> {
    let mut seen: BTreeSet<[i64; 4]> = BTreeSet::new();
    let mut max_height = 0.0f64;
    for k in 0..word.len() {
        let base = evaluate(rep, &word.rotation(k));
        for g in conjugators {
            let lift = base.conjugate_by(g);
            if !seen.insert(round_key(&lift)) {
                continue;
            }
            let h = lift_height(&lift)
                .map_err(|_| CuspError::AxisThroughInfinity { slope })?;
            if h > max_height {
                max_height = h;
            }
        }
    }
    Ok(LiftReport {
        slope,
        max_height,
        lifts_examined: seen.len(),
    })
}
