//! Simple closed geodesics on the hyperbolic once-punctured torus.
//!
//! The crate enumerates the simple geodesic length spectrum through the
//! Farey trace tree, realizes the shortest-multicurve norm on first
//! homology together with its unit ball, and verifies that simple
//! geodesics stay out of the embedded length-2 cusp region.
//!
//! Everything here is pure computation over immutable values; IO and the
//! command-line surface live in the companion `ptorus-cli` crate. The
//! crate is `no_std` (with `alloc`) so the algorithmic core stays free of
//! platform dependencies.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod counting;
pub mod cusp;
pub mod farey;
pub mod norm;
pub mod sl2;
pub mod words;

/// Tolerance for algebraic identities in floating mode (trace relations,
/// determinants, residuals). Doubles keep ~6 digits of headroom at
/// desk-scale trace magnitudes.
pub const ALG_TOL: f64 = 1e-9;

/// Tolerance for identities that are exact up to a couple of rounding
/// steps (inverse round trips, positive homogeneity).
pub const EXACT_TOL: f64 = 1e-12;

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// gcd of absolute values; gcd(0, 0) = 0.
pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}
