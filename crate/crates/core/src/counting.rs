//! Counting functions for the quadratic growth of the simple spectrum,
//! with exact number-theoretic oracles for the primitive-pair count.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::farey::{self, FareyError, TraceValue, TreeNode};
use crate::sl2::FrickeTriple;
use crate::gcd_u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountError {
    /// Quadratic fitting needs at least three points.
    TooFewPoints { got: usize },
}

impl fmt::Display for CountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountError::TooFewPoints { got } => {
                write!(f, "need at least 3 series points, got {got}")
            }
        }
    }
}

/// Whether a count series tallies slopes (unoriented) or signed classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Unoriented,
    Oriented,
}

/// A monotone series of (cutoff, count) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    pub entries: Vec<(f64, u64)>,
    pub convention: Convention,
}

impl CountSeries {
    pub fn new(entries: Vec<(f64, u64)>, convention: Convention) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        CountSeries {
            entries,
            convention,
        }
    }
}

/// Number of unoriented simple closed geodesics of length <= l_max.
pub fn count_simple_geodesics(triple: FrickeTriple, l_max: f64) -> Result<u64, FareyError> {
    Ok(farey::enumerate_spectrum(triple, l_max)?.len() as u64)
}

/// |{(m, n) : m, n >= 1, gcd(m, n) = 1, m + n <= L}| by the direct gcd
/// double loop. Axis classes are excluded; they contribute O(1).
pub fn primitive_pairs_count(l: u64) -> u64 {
    let mut count = 0;
    for m in 1..l {
        for n in 1..=(l - m) {
            if gcd_u64(m, n) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// Euler totients phi(1..=n) by sieve.
pub fn totient_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            // p prime
            let mut k = p;
            while k <= n {
                phi[k] -= phi[k] / p as u64;
                k += p;
            }
        }
    }
    phi
}

/// The same count via the totient identity sum phi(s), s = 2..=L; the
/// independent oracle for `primitive_pairs_count`.
pub fn primitive_pairs_count_totient(l: u64) -> u64 {
    if l < 2 {
        return 0;
    }
    totient_sieve(l)[2..=l as usize].iter().sum()
}

/// Leading-order prediction L^2 / (2 zeta(2)) = 3 L^2 / pi^2.
pub fn asymptotic_prediction(l: f64) -> f64 {
    3.0 * l * l / (PI * PI)
}

/// Endpoint estimate of the quadratic coefficient c = N(L_max)/L_max^2,
/// with the full N/L^2 sequence returned for convergence inspection.
pub fn fit_quadratic_coefficient(series: &CountSeries) -> Result<(f64, Vec<f64>), CountError> {
    if series.entries.len() < 3 {
        return Err(CountError::TooFewPoints {
            got: series.entries.len(),
        });
    }
    let diagnostics: Vec<f64> = series
        .entries
        .iter()
        .map(|&(l, n)| n as f64 / (l * l))
        .collect();
    Ok((*diagnostics.last().unwrap(), diagnostics))
}

/// Min and max of geodesic length / word length over canonical slopes
/// with |m| + |n| <= w_max, axes included. Uses the trace tree bounded
/// by word-length shells, so it stays cheap at w_max in the hundreds.
pub fn word_geodesic_ratio_report(triple: FrickeTriple, w_max: u64) -> (f64, f64) {
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let mut record = |trace: f64, word_len: u64| {
        let len = crate::sl2::hyperbolic_length(trace).expect("simple trace is hyperbolic");
        let r = len / word_len as f64;
        if r < min_ratio {
            min_ratio = r;
        }
        if r > max_ratio {
            max_ratio = r;
        }
    };
    record(triple.x, 1);
    record(triple.y, 1);
    for seed in farey::quadrant_seeds(triple) {
        let _ = farey::walk::<f64, core::convert::Infallible, _>(seed, &mut |node: &TreeNode<
            f64,
        >| {
            let (m, n) = node.mediant_pair();
            let wl = m.unsigned_abs() + n.unsigned_abs();
            if wl > w_max {
                return Ok(false);
            }
            record(node.t_med.to_f64(), wl);
            Ok(true)
        });
    }
    (min_ratio, max_ratio)
}
