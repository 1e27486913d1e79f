//! Enumeration of simple closed geodesics through the Stern-Brocot slope
//! tree with the trace recursion t_child = t_a * t_b - t_opposite.
//!
//! Two trees cover the canonical slopes: the (A, B) tree for m, n >= 0
//! and the (A, B^-1) tree for mixed signs, plus the two axis classes.
//! Traces are carried either as f64 or as arbitrary-precision integers.

use alloc::vec::Vec;
use core::fmt;

use libm::cosh;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::sl2::{hyperbolic_length, FrickeTriple};
use crate::words::Slope;

#[derive(Debug, Clone, PartialEq)]
pub enum FareyError {
    /// Determinant of the slope pair is not +-1.
    NotNeighbors { det: i64 },
    /// Integer seed fails the exact Fricke relation or the > 2 range.
    InvalidTriple,
    /// Pruning soundness condition t_mediant > max(t_left, t_right)
    /// failed at an expanded node; internal error, never expected on a
    /// valid hyperbolic triple.
    MonotonicityViolation { slope: Slope },
}

impl fmt::Display for FareyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FareyError::NotNeighbors { det } => {
                write!(f, "slopes are not Farey neighbors (det {det})")
            }
            FareyError::InvalidTriple => write!(f, "invalid integer Fricke triple"),
            FareyError::MonotonicityViolation { slope } => write!(
                f,
                "internal error: trace monotonicity violated at slope {slope}"
            ),
        }
    }
}

/// Trace numbers the tree can carry: doubles or exact integers.
pub trait TraceValue: Clone + PartialOrd {
    /// t_a * t_b - t_opp, the Vieta/Fricke child trace.
    fn child(a: &Self, b: &Self, opp: &Self) -> Self;
    fn to_f64(&self) -> f64;
}

impl TraceValue for f64 {
    fn child(a: &Self, b: &Self, opp: &Self) -> Self {
        a * b - opp
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl TraceValue for BigInt {
    fn child(a: &Self, b: &Self, opp: &Self) -> Self {
        a * b - opp
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
}

/// t_a * t_b - t_opp as a free function (the tree edge map).
pub fn child_trace<T: TraceValue>(t_a: &T, t_b: &T, t_opp: &T) -> T {
    T::child(t_a, t_b, t_opp)
}

/// Farey mediant with the neighbor precondition checked.
pub fn mediant(a: Slope, b: Slope) -> Result<Slope, FareyError> {
    let det = a.m() * b.n() - a.n() * b.m();
    if det.abs() != 1 {
        return Err(FareyError::NotNeighbors { det });
    }
    Ok(Slope::canonical(a.m() + b.m(), a.n() + b.n()))
}

/// Traces (x, y, xy - z) of the second-quadrant seed (A, B^-1, AB^-1).
/// The returned triple satisfies the Fricke relation whenever the input
/// does.
pub fn quadrant2_seed(triple: FrickeTriple) -> (f64, f64, f64) {
    (triple.x, triple.y, triple.x * triple.y - triple.z)
}

/// An interior node of one quadrant tree: a Farey-neighbor pair with its
/// traces and the mediant trace.
#[derive(Debug, Clone)]
pub struct TreeNode<T> {
    pub left: (i64, i64),
    pub right: (i64, i64),
    pub t_left: T,
    pub t_right: T,
    pub t_med: T,
    pub depth: u32,
}

impl<T: TraceValue> TreeNode<T> {
    pub fn mediant_pair(&self) -> (i64, i64) {
        (self.left.0 + self.right.0, self.left.1 + self.right.1)
    }

    pub fn mediant_slope(&self) -> Slope {
        let (m, n) = self.mediant_pair();
        Slope::canonical(m, n)
    }

    /// The two child nodes (left, mediant) and (mediant, right); the
    /// discarded endpoint becomes the new opposite trace.
    pub fn children(&self) -> (TreeNode<T>, TreeNode<T>) {
        let med = self.mediant_pair();
        let l = TreeNode {
            left: self.left,
            right: med,
            t_left: self.t_left.clone(),
            t_right: self.t_med.clone(),
            t_med: T::child(&self.t_left, &self.t_med, &self.t_right),
            depth: self.depth + 1,
        };
        let r = TreeNode {
            left: med,
            right: self.right,
            t_left: self.t_med.clone(),
            t_right: self.t_right.clone(),
            t_med: T::child(&self.t_med, &self.t_right, &self.t_left),
            depth: self.depth + 1,
        };
        (l, r)
    }
}

/// The two quadrant roots for a floating triple. Axis classes (1, 0) and
/// (0, 1) are not part of either tree and are handled separately.
pub fn quadrant_seeds(triple: FrickeTriple) -> [TreeNode<f64>; 2] {
    let q2 = quadrant2_seed(triple);
    [
        TreeNode {
            left: (1, 0),
            right: (0, 1),
            t_left: triple.x,
            t_right: triple.y,
            t_med: triple.z,
            depth: 0,
        },
        TreeNode {
            left: (1, 0),
            right: (0, -1),
            t_left: q2.0,
            t_right: q2.1,
            t_med: q2.2,
            depth: 0,
        },
    ]
}

/// Exact-integer quadrant roots; the seed must satisfy the Fricke
/// relation exactly with all coordinates > 2.
pub fn quadrant_seeds_exact(x: i64, y: i64, z: i64) -> Result<[TreeNode<BigInt>; 2], FareyError> {
    if x <= 2 || y <= 2 || z <= 2 || x * x + y * y + z * z != x * y * z {
        return Err(FareyError::InvalidTriple);
    }
    Ok([
        TreeNode {
            left: (1, 0),
            right: (0, 1),
            t_left: x.into(),
            t_right: y.into(),
            t_med: z.into(),
            depth: 0,
        },
        TreeNode {
            left: (1, 0),
            right: (0, -1),
            t_left: x.into(),
            t_right: y.into(),
            t_med: (x * y - z).into(),
            depth: 0,
        },
    ])
}

/// Depth-first walk over one quadrant tree. `visit` sees every node and
/// returns whether to descend into its children. Memory is O(depth).
pub fn walk<T, E, F>(seed: TreeNode<T>, visit: &mut F) -> Result<(), E>
where
    T: TraceValue,
    F: FnMut(&TreeNode<T>) -> Result<bool, E>,
{
    let mut stack = alloc::vec![seed];
    while let Some(node) = stack.pop() {
        if visit(&node)? {
            let (l, r) = node.children();
            stack.push(r);
            stack.push(l);
        }
    }
    Ok(())
}

/// One record of the simple length spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry<T> {
    pub slope: Slope,
    pub trace: T,
    pub length: f64,
}

/// Geodesics of length <= l_max have |trace| <= 2 cosh(l_max / 2).
pub fn trace_cutoff(l_max: f64) -> f64 {
    2.0 * cosh(l_max / 2.0)
}

/// Collect the spectrum entries of one subtree, pruning where the
/// mediant trace exceeds the cutoff. The runtime monotonicity guard
/// (t_mediant > max endpoint trace) is asserted at every expanded node.
pub fn collect_subtree<T: TraceValue>(
    seed: TreeNode<T>,
    cutoff: f64,
    out: &mut Vec<SpectrumEntry<T>>,
) -> Result<(), FareyError> {
    walk(seed, &mut |node: &TreeNode<T>| {
        if node.t_med.to_f64() > cutoff {
            return Ok(false);
        }
        // seeds may tie their endpoints (e.g. the (3,3,3) root); strict
        // growth is required only once the recursion has been applied
        if node.depth > 0 && (node.t_med <= node.t_left || node.t_med <= node.t_right) {
            return Err(FareyError::MonotonicityViolation {
                slope: node.mediant_slope(),
            });
        }
        let t = node.t_med.to_f64();
        out.push(SpectrumEntry {
            slope: node.mediant_slope(),
            trace: node.t_med.clone(),
            // cutoff keeps t well above 2 for valid triples
            length: hyperbolic_length(t).expect("mediant trace must be hyperbolic"),
        });
        Ok(true)
    })
}

/// Sort by (length, m, n); deterministic tie-breaking for diffable output.
pub fn sort_entries<T: TraceValue>(entries: &mut [SpectrumEntry<T>]) {
    entries.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then(a.slope.m().cmp(&b.slope.m()))
            .then(a.slope.n().cmp(&b.slope.n()))
    });
}

fn axis_entries<T: TraceValue>(x: T, y: T, cutoff: f64, out: &mut Vec<SpectrumEntry<T>>) {
    for (slope, t) in [(Slope::canonical(1, 0), x), (Slope::canonical(0, 1), y)] {
        let tf = t.to_f64();
        if tf <= cutoff {
            out.push(SpectrumEntry {
                slope,
                trace: t,
                length: hyperbolic_length(tf).expect("axis trace must be hyperbolic"),
            });
        }
    }
}

/// The full simple length spectrum up to length l_max: one entry per
/// canonical slope (unoriented geodesic), sorted by (length, m, n).
pub fn enumerate_spectrum(
    triple: FrickeTriple,
    l_max: f64,
) -> Result<Vec<SpectrumEntry<f64>>, FareyError> {
    let cutoff = trace_cutoff(l_max);
    let mut out = Vec::new();
    axis_entries(triple.x, triple.y, cutoff, &mut out);
    for seed in quadrant_seeds(triple) {
        collect_subtree(seed, cutoff, &mut out)?;
    }
    sort_entries(&mut out);
    Ok(out)
}

/// Exact spectrum for an integer seed triple (3 x a Markoff triple).
pub fn enumerate_spectrum_exact(
    x: i64,
    y: i64,
    z: i64,
    l_max: f64,
) -> Result<Vec<SpectrumEntry<BigInt>>, FareyError> {
    let seeds = quadrant_seeds_exact(x, y, z)?;
    let cutoff = trace_cutoff(l_max);
    let mut out = Vec::new();
    axis_entries(BigInt::from(x), BigInt::from(y), cutoff, &mut out);
    for seed in seeds {
        collect_subtree(seed, cutoff, &mut out)?;
    }
    sort_entries(&mut out);
    Ok(out)
}

/// The modular-torus spectrum with exact integer traces; every trace is
/// three times a Markoff number.
pub fn exact_markoff_spectrum(l_max: f64) -> Vec<SpectrumEntry<BigInt>> {
    enumerate_spectrum_exact(3, 3, 3, l_max).expect("(3,3,3) is a valid integer triple")
}

fn slope_trace_in<T: TraceValue>(seeds: [TreeNode<T>; 2], slope: Slope) -> T {
    let (m, n) = (slope.m(), slope.n());
    let [q1, q2] = seeds;
    if (m, n) == (1, 0) {
        return q1.t_left;
    }
    if (m, n) == (0, 1) {
        return q1.t_right;
    }
    // pick the quadrant tree containing the slope; tree 2 carries raw
    // pairs (p, q) with p > 0 > q representing canonical (-p, -q)
    let (target, mut node) = if m > 0 { ((m, n), q1) } else { ((-m, -n), q2) };
    loop {
        let med = node.mediant_pair();
        if med == target {
            return node.t_med;
        }
        // target = a * left + b * right with a, b >= 1; descend toward
        // the heavier side
        let det = node.left.0 * node.right.1 - node.left.1 * node.right.0;
        let a = (target.0 * node.right.1 - target.1 * node.right.0) / det;
        let b = (node.left.0 * target.1 - node.left.1 * target.0) / det;
        let (l, r) = node.children();
        node = if a > b { l } else { r };
    }
}

/// Trace of the simple class with the given slope, by descending the
/// Stern-Brocot path. O(|m| + |n|) steps.
pub fn slope_trace(triple: FrickeTriple, slope: Slope) -> f64 {
    slope_trace_in(quadrant_seeds(triple), slope)
}

/// Exact-integer slope trace for an integer seed triple.
pub fn slope_trace_exact(x: i64, y: i64, z: i64, slope: Slope) -> Result<BigInt, FareyError> {
    Ok(slope_trace_in(quadrant_seeds_exact(x, y, z)?, slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::complete_triple;
    use crate::words::{evaluate, modular_trace, oz_word};
    use crate::{gcd_i64, ALG_TOL};

    fn slope(m: i64, n: i64) -> Slope {
        Slope::new(m, n).unwrap()
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(slope(1, 0), slope(0, 1)).unwrap(), slope(1, 1));
        assert_eq!(mediant(slope(1, 1), slope(1, 2)).unwrap(), slope(2, 3));
        assert_eq!(
            mediant(slope(1, 0), slope(1, 2)),
            Err(FareyError::NotNeighbors { det: 2 })
        );
    }

    #[test]
    fn child_trace_examples() {
        assert_eq!(child_trace(&3.0, &3.0, &3.0), 6.0);
        assert_eq!(child_trace(&6.0, &3.0, &3.0), 15.0);
        // Vieta flip is an involution: child of (a, b, a*b - c) is c
        let (a, b, c) = (7.0, 5.0, 4.0);
        assert_eq!(child_trace(&a, &b, &child_trace(&a, &b, &c)), c);
    }

    #[test]
    fn quadrant2_examples() {
        let t = FrickeTriple::modular();
        assert_eq!(quadrant2_seed(t), (3.0, 3.0, 6.0));
        let t2 = FrickeTriple::new(3.0, 3.0, 6.0).unwrap();
        assert_eq!(quadrant2_seed(t2), (3.0, 3.0, 3.0));
    }

    #[test]
    fn quadrant2_residual_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = rng.gen_range(2.2..8.0);
            let y = rng.gen_range(2.2..8.0);
            let Ok((_, z)) = complete_triple(x, y) else {
                continue;
            };
            let t = FrickeTriple::new(x, y, z).unwrap();
            let (a, b, c) = quadrant2_seed(t);
            assert!(crate::sl2::validate_triple(a, b, c).abs() < 1e-6 * (a * b * c));
        }
    }

    #[test]
    fn modular_spectrum_small() {
        let t = FrickeTriple::modular();
        let sp = enumerate_spectrum(t, 2.0).unwrap();
        assert_eq!(sp.len(), 3);
        let slopes: Vec<_> = sp.iter().map(|e| e.slope).collect();
        assert!(slopes.contains(&slope(1, 0)));
        assert!(slopes.contains(&slope(0, 1)));
        assert!(slopes.contains(&slope(1, 1)));
        for e in &sp {
            assert_eq!(e.trace, 3.0);
            assert!((e.length - 1.9248473002384139).abs() < 1e-12);
        }

        assert!(enumerate_spectrum(t, 1.0).unwrap().is_empty());

        // length 3.6 admits the three trace-6 classes as well
        let sp = enumerate_spectrum(t, 3.6).unwrap();
        assert_eq!(sp.len(), 6);
        let six: Vec<_> = sp.iter().filter(|e| e.trace == 6.0).map(|e| e.slope).collect();
        assert_eq!(six.len(), 3);
        assert!(six.contains(&slope(2, 1)));
        assert!(six.contains(&slope(1, 2)));
        assert!(six.contains(&slope(-1, 1)));
    }

    // Exhaustive word-evaluation count: slopes with geodesic length
    // <= l_max, scanned by word-length shells |m| + |n| = s. Shell
    // minima are not monotone in s, so one empty shell proves nothing;
    // stop only after several consecutive shells lie entirely above
    // l_max (length grows linearly in word length with bounded wobble,
    // so a short run of exhausted shells certifies the tail).
    fn brute_force_count(t: FrickeTriple, l_max: f64) -> usize {
        let rep = crate::sl2::build_representation(t).unwrap();
        let mut count = 0usize;
        let mut exhausted = 0u32;
        let mut shell = 1i64;
        while exhausted < 4 {
            let mut shell_min = f64::INFINITY;
            for m in -shell..=shell {
                let n = shell - m.abs();
                let canonical = n > 0 || (n == 0 && m > 0);
                if !canonical || gcd_i64(m, n) != 1 {
                    continue;
                }
                let tr = evaluate(&rep, &oz_word(m, n).unwrap()).trace().abs();
                let len = hyperbolic_length(tr).unwrap();
                if len < shell_min {
                    shell_min = len;
                }
                if len <= l_max {
                    count += 1;
                }
            }
            if shell_min > l_max {
                exhausted += 1;
            } else {
                exhausted = 0;
            }
            shell += 1;
        }
        count
    }

    #[test]
    fn completeness_cross_check() {
        for (x, y) in [(3.0, 3.0), (3.0, 4.0)] {
            let (_, z) = complete_triple(x, y).unwrap();
            let t = FrickeTriple::new(x, y, z).unwrap();
            for l_max in [2.0, 3.6, 5.0, 7.0] {
                let tree = enumerate_spectrum(t, l_max).unwrap().len();
                assert_eq!(tree, brute_force_count(t, l_max), "({x},{y}) at L={l_max}");
            }
        }
    }

    #[test]
    fn exact_markoff_small() {
        let sp = exact_markoff_spectrum(4.0);
        let traces: Vec<i64> = sp
            .iter()
            .map(|e| ToPrimitive::to_i64(&e.trace).unwrap())
            .collect();
        assert_eq!(traces, alloc::vec![3, 3, 3, 6, 6, 6]);

        // traces / 3 are Markoff numbers; every trace divisible by 3
        let sp = exact_markoff_spectrum(10.0);
        let mut markoff: Vec<i64> = sp
            .iter()
            .map(|e| {
                let t = ToPrimitive::to_i64(&e.trace).unwrap();
                assert_eq!(t % 3, 0);
                t / 3
            })
            .collect();
        markoff.sort();
        markoff.dedup();
        for w in &markoff {
            // verify by the independent integer matrix oracle below
            assert!([1, 2, 5, 13, 29, 34, 89, 169, 194, 233, 433, 610].contains(w));
        }
    }

    #[test]
    fn exact_matches_integer_oracle() {
        // spectrum traces equal the big-integer matrix product traces
        let sp = exact_markoff_spectrum(12.0);
        for e in &sp {
            let oracle = modular_trace(e.slope.m(), e.slope.n(), 4096).unwrap();
            assert_eq!(e.trace, oracle, "slope {}", e.slope);
        }
    }

    #[test]
    fn float_tree_matches_word_oracle() {
        let (_, z34) = complete_triple(3.0, 4.0).unwrap();
        for t in [
            FrickeTriple::modular(),
            FrickeTriple::new(3.0, 3.0, 6.0).unwrap(),
            FrickeTriple::new(3.0, 4.0, z34).unwrap(),
        ] {
            let rep = crate::sl2::build_representation(t).unwrap();
            for m in -12i64..=12 {
                for n in 0i64..=12 {
                    let canonical = n > 0 || (n == 0 && m > 0);
                    if !canonical || m.abs() + n > 12 || gcd_i64(m, n) != 1 {
                        continue;
                    }
                    let sl = Slope::new(m, n).unwrap();
                    let tree = slope_trace(t, sl);
                    let word = evaluate(&rep, &oz_word(m, n).unwrap()).trace().abs();
                    assert!(
                        (tree.abs() - word).abs() <= ALG_TOL * word.max(1.0),
                        "slope {sl}: tree {tree} vs word {word}"
                    );
                }
            }
        }
    }

    #[test]
    fn determinism_across_runs() {
        let t = FrickeTriple::modular();
        let a = enumerate_spectrum(t, 8.0).unwrap();
        let b = enumerate_spectrum(t, 8.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subtree_split_agrees_with_whole() {
        // splitting a seed into children plus its own mediant is the
        // work-splitting contract used by the CLI --parallel path
        let t = FrickeTriple::modular();
        let cutoff = trace_cutoff(9.0);
        let mut whole = Vec::new();
        let [s1, _] = quadrant_seeds(t);
        collect_subtree(s1.clone(), cutoff, &mut whole).unwrap();

        let mut split = Vec::new();
        split.push(SpectrumEntry {
            slope: s1.mediant_slope(),
            trace: s1.t_med,
            length: hyperbolic_length(s1.t_med).unwrap(),
        });
        let [s1, _] = quadrant_seeds(t);
        let (l, r) = s1.children();
        collect_subtree(l, cutoff, &mut split).unwrap();
        collect_subtree(r, cutoff, &mut split).unwrap();
        sort_entries(&mut whole);
        sort_entries(&mut split);
        assert_eq!(whole, split);
    }
}
