//! Free-group word algebra on two generators and the explicit
//! parametrization of primitive conjugacy classes by coprime pairs.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::gcd_i64;
use crate::sl2::{Mat2, Representation, IDENTITY};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    /// The exponent pair is not coprime; no primitive class.
    NotCoprime { m: i64, n: i64 },
    /// Exact-integer matrix entries exceeded the configured bit bound.
    Overflow { bits: u64 },
    /// String form did not match the "s t s^-1" grammar.
    Parse,
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::NotCoprime { m, n } => write!(f, "({m}, {n}) is not coprime"),
            WordError::Overflow { bits } => {
                write!(f, "exact matrix entry exceeded {bits} bits")
            }
            WordError::Parse => write!(f, "unparseable word"),
        }
    }
}

/// One of the two free generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    S,
    T,
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: Gen, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub(crate) fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A reduced word over {s, s^-1, t, t^-1}, stored as a flat letter
/// sequence. Construction through `from_letters` freely reduces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Freely reduce a letter sequence.
    pub fn from_letters(seq: impl IntoIterator<Item = Letter>) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in seq {
            if letters.last().is_some_and(|last| last.cancels(&l)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// Rotate by k positions: letters[k..] ++ letters[..k], freely reduced.
    pub fn rotation(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return Word::empty();
        }
        let k = k % self.letters.len();
        Word::from_letters(
            self.letters[k..]
                .iter()
                .chain(self.letters[..k].iter())
                .copied(),
        )
    }

    /// Exponent sums (m, n) of s and t.
    pub fn abelianize(&self) -> HomologyClass {
        let mut m = 0i64;
        let mut n = 0i64;
        for l in &self.letters {
            let e = if l.inverse { -1 } else { 1 };
            match l.gen {
                Gen::S => m += e,
                Gen::T => n += e,
            }
        }
        HomologyClass { m, n }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(first), Some(last)) => self.letters.len() == 1 || !first.cancels(last),
            _ => true,
        }
    }

    pub fn parse(s: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (base, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let gen = match base {
                "s" => Gen::S,
                "t" => Gen::T,
                _ => return Err(WordError::Parse),
            };
            letters.push(Letter::new(gen, inv));
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(match l.gen {
                Gen::S => "s",
                Gen::T => "t",
            })?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Strip inverse first/last letter pairs; the result is conjugate to the
/// input and cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> Word {
    let mut letters = w.letters.clone();
    while letters.len() >= 2 && letters[0].cancels(letters.last().unwrap()) {
        letters.pop();
        letters.remove(0);
    }
    Word { letters }
}

/// An arbitrary integer homology class (exponent-sum pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HomologyClass {
    pub m: i64,
    pub n: i64,
}

impl HomologyClass {
    pub fn new(m: i64, n: i64) -> Self {
        HomologyClass { m, n }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0 && self.n == 0
    }

    pub fn scale(&self, k: i64) -> Self {
        HomologyClass {
            m: self.m * k,
            n: self.n * k,
        }
    }

    pub fn add(&self, other: &HomologyClass) -> Self {
        HomologyClass {
            m: self.m + other.m,
            n: self.n + other.n,
        }
    }

    pub fn neg(&self) -> Self {
        HomologyClass {
            m: -self.m,
            n: -self.n,
        }
    }
}

/// A primitive homology class in canonical sign: n > 0, or n = 0 and
/// m > 0. Slopes label unoriented simple closed geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    m: i64,
    n: i64,
}

impl Slope {
    /// Canonicalize the sign of a coprime pair.
    pub fn new(m: i64, n: i64) -> Result<Self, WordError> {
        if gcd_i64(m, n) != 1 {
            return Err(WordError::NotCoprime { m, n });
        }
        Ok(Self::canonical(m, n))
    }

    /// Caller guarantees coprimality (e.g. Farey mediants).
    pub(crate) fn canonical(m: i64, n: i64) -> Self {
        if n > 0 || (n == 0 && m > 0) {
            Slope { m, n }
        } else {
            Slope { m: -m, n: -n }
        }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// |m| + |n|, the reduced word length of the class.
    pub fn word_length(&self) -> u64 {
        self.m.unsigned_abs() + self.n.unsigned_abs()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// f_{m,n}(k) for positive coprime (m, n): periodic with period m + n,
/// value 1 on residues 1..m and 2 on residues m+1..m+n.
pub fn oz_letter(m: u64, n: u64, k: i64) -> u8 {
    let period = (m + n) as i64;
    let r = (k - 1).rem_euclid(period) as u64; // residue - 1 in 0..m+n
    if r < m {
        1
    } else {
        2
    }
}

/// The cyclically reduced primitive word W_{m,n} with abelianization
/// (m, n): the product of x_{f_{m,n}(1 + i m)} over i = 0..m+n, with
/// generators inverted per the sign of m and n.
pub fn oz_word(m: i64, n: i64) -> Result<Word, WordError> {
    if gcd_i64(m, n) != 1 {
        return Err(WordError::NotCoprime { m, n });
    }
    let (am, an) = (m.unsigned_abs(), n.unsigned_abs());
    let s_letter = Letter::new(Gen::S, m < 0);
    let t_letter = Letter::new(Gen::T, n < 0);
    let total = (am + an) as i64;
    let mut letters = Vec::with_capacity((am + an) as usize);
    for i in 0..total {
        let idx = 1 + i * am as i64;
        letters.push(if oz_letter(am, an, idx) == 1 {
            s_letter
        } else {
            t_letter
        });
    }
    Ok(Word { letters })
}

/// Letter-by-letter product of holonomy images.
pub fn evaluate(rep: &Representation, w: &Word) -> Mat2 {
    let a_inv = rep.a.inverse();
    let b_inv = rep.b.inverse();
    let mut acc = IDENTITY;
    for l in w.letters() {
        let m = match (l.gen, l.inverse) {
            (Gen::S, false) => &rep.a,
            (Gen::S, true) => &a_inv,
            (Gen::T, false) => &rep.b,
            (Gen::T, true) => &b_inv,
        };
        acc = acc.mul(m);
    }
    acc
}

/// Exact-integer 2x2 matrix for the big-integer oracle path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2Big {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2Big {
    pub fn identity() -> Self {
        Mat2Big {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2Big {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn inverse(&self) -> Mat2Big {
        Mat2Big {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn mul(&self, rhs: &Mat2Big) -> Mat2Big {
        Mat2Big {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    fn max_bits(&self) -> u64 {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|v| v.bits())
            .max()
            .unwrap()
    }

    pub fn to_string_entries(&self) -> String {
        use alloc::format;
        format!("[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Integer holonomy of the modular torus: A = [[1,1],[1,2]],
/// B = [[1,-1],[-1,2]]. Traces (3, 3, 3), commutator trace -2; the
/// debug assertion re-verifies rather than assumes.
pub fn modular_witness() -> (Mat2Big, Mat2Big) {
    let a = Mat2Big::from_i64(1, 1, 1, 2);
    let b = Mat2Big::from_i64(1, -1, -1, 2);
    debug_assert!({
        let ab = a.mul(&b);
        let comm = ab.mul(&a.inverse()).mul(&b.inverse());
        a.det().is_one()
            && b.det().is_one()
            && a.trace() == 3.into()
            && b.trace() == 3.into()
            && ab.trace() == 3.into()
            && comm.trace() == (-2).into()
    });
    (a, b)
}

/// Exact evaluation with a bit bound on entry size. The bound is
/// reported, never silently truncated.
pub fn evaluate_exact(
    gen_s: &Mat2Big,
    gen_t: &Mat2Big,
    w: &Word,
    max_bits: u64,
) -> Result<Mat2Big, WordError> {
    let s_inv = gen_s.inverse();
    let t_inv = gen_t.inverse();
    let mut acc = Mat2Big::identity();
    for l in w.letters() {
        let m = match (l.gen, l.inverse) {
            (Gen::S, false) => gen_s,
            (Gen::S, true) => &s_inv,
            (Gen::T, false) => gen_t,
            (Gen::T, true) => &t_inv,
        };
        acc = acc.mul(m);
        if acc.max_bits() > max_bits {
            return Err(WordError::Overflow { bits: max_bits });
        }
    }
    Ok(acc)
}

/// Abs trace of the image of W_{m,n} under the exact modular holonomy.
pub fn modular_trace(m: i64, n: i64, max_bits: u64) -> Result<BigInt, WordError> {
    let (a, b) = modular_witness();
    let w = oz_word(m, n)?;
    Ok(evaluate_exact(&a, &b, &w, max_bits)?.trace().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{build_representation, complete_triple, FrickeTriple};

    fn s() -> Letter {
        Letter::new(Gen::S, false)
    }
    fn t() -> Letter {
        Letter::new(Gen::T, false)
    }

    #[test]
    fn oz_letter_examples() {
        assert_eq!(oz_letter(1, 1, 1), 1);
        assert_eq!(oz_letter(1, 1, 2), 2);
        assert_eq!(oz_letter(2, 1, 5), 1); // 5 = 2 mod 3
        assert_eq!(oz_letter(1, 2, 3), 2);
    }

    #[test]
    fn oz_word_examples() {
        assert_eq!(oz_word(1, 1).unwrap(), Word::from_letters([s(), t()]));
        assert_eq!(oz_word(2, 1).unwrap(), Word::from_letters([s(), t(), s()]));
        assert_eq!(
            oz_word(-1, 1).unwrap(),
            Word::from_letters([s().inverted(), t()])
        );
        assert_eq!(oz_word(1, 0).unwrap(), Word::from_letters([s()]));
        assert_eq!(oz_word(0, 1).unwrap(), Word::from_letters([t()]));
        assert!(matches!(oz_word(2, 4), Err(WordError::NotCoprime { .. })));
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(
            Word::from_letters([s(), t(), s()]).abelianize(),
            HomologyClass::new(2, 1)
        );
        assert_eq!(Word::empty().abelianize(), HomologyClass::new(0, 0));
    }

    #[test]
    fn oz_word_properties_to_50() {
        // word length, cyclic reduction, abelianization for every coprime
        // pair with |m| + |n| <= 50
        for m in -50i64..=50 {
            for n in -50i64..=50 {
                if (m, n) == (0, 0) || m.abs() + n.abs() > 50 || gcd_i64(m, n) != 1 {
                    continue;
                }
                let w = oz_word(m, n).unwrap();
                assert_eq!(w.len() as i64, m.abs() + n.abs());
                assert!(w.is_cyclically_reduced());
                assert_eq!(cyclic_reduce(&w), w);
                assert_eq!(w.abelianize(), HomologyClass::new(m, n));
            }
        }
    }

    #[test]
    fn cyclic_reduce_examples() {
        let w = Word::from_letters([s(), t(), s().inverted()]);
        assert_eq!(cyclic_reduce(&w), Word::from_letters([t()]));
        assert_eq!(cyclic_reduce(&Word::empty()), Word::empty());
    }

    #[test]
    fn evaluate_examples() {
        let rep = build_representation(FrickeTriple::modular()).unwrap();
        let id = evaluate(&rep, &Word::empty());
        assert_eq!(id.trace(), 2.0);
        let z = evaluate(&rep, &oz_word(1, 1).unwrap()).trace();
        assert!((z - 3.0).abs() < 1e-9);
        // 3 x Markoff number 5
        assert_eq!(modular_trace(3, 1, 512).unwrap(), 15.into());
    }

    #[test]
    fn distinct_slopes_distinct_traces() {
        // On a generic triple, distinct canonical slopes give distinct
        // traces, |m| + |n| <= 20, pairwise gap > 1e-6.
        let (_, z) = complete_triple(3.0, 3.5).unwrap();
        let rep = build_representation(FrickeTriple::new(3.0, 3.5, z).unwrap()).unwrap();
        let mut traces: Vec<f64> = Vec::new();
        for m in -20i64..=20 {
            for n in 0i64..=20 {
                let canonical = n > 0 || (n == 0 && m > 0);
                if !canonical || m.abs() + n > 20 || gcd_i64(m, n) != 1 {
                    continue;
                }
                traces.push(evaluate(&rep, &oz_word(m, n).unwrap()).trace().abs());
            }
        }
        traces.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in traces.windows(2) {
            assert!(pair[1] - pair[0] > 1e-6);
        }
    }

    #[test]
    fn exact_overflow_reported() {
        let (a, b) = modular_witness();
        let w = oz_word(40, 1).unwrap();
        assert!(matches!(
            evaluate_exact(&a, &b, &w, 16),
            Err(WordError::Overflow { bits: 16 })
        ));
    }

    #[test]
    fn word_display_round_trip() {
        let w = oz_word(-2, 3).unwrap();
        assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
        assert_eq!(
            Word::from_letters([s(), t(), s().inverted()]).to_string(),
            "s t s^-1"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn letters() -> impl Strategy<Value = Vec<Letter>> {
            prop::collection::vec(
                (any::<bool>(), any::<bool>())
                    .prop_map(|(g, i)| Letter::new(if g { Gen::S } else { Gen::T }, i)),
                0..40,
            )
        }

        proptest! {
            #[test]
            fn reduction_is_idempotent(seq in letters()) {
                let w = Word::from_letters(seq);
                prop_assert_eq!(Word::from_letters(w.letters().iter().copied()), w);
            }

            #[test]
            fn inverse_cancels(seq in letters()) {
                let w = Word::from_letters(seq);
                prop_assert!(w.concat(&w.inverse()).is_empty());
                prop_assert!(w.inverse().concat(&w).is_empty());
            }

            #[test]
            fn display_parse_round_trip(seq in letters()) {
                let w = Word::from_letters(seq);
                prop_assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
            }

            #[test]
            fn abelianization_additive(a in letters(), b in letters()) {
                let (wa, wb) = (Word::from_letters(a), Word::from_letters(b));
                let sum = wa.abelianize().add(&wb.abelianize());
                prop_assert_eq!(wa.concat(&wb).abelianize(), sum);
            }

            #[test]
            fn rotation_preserves_trace(seq in letters(), k in 0usize..40) {
                // rotations are conjugations; the holonomy trace is
                // a class function
                let w = Word::from_letters(seq);
                let rep = build_representation(FrickeTriple::modular()).unwrap();
                let before = evaluate(&rep, &w).trace();
                let after = evaluate(&rep, &w.rotation(k)).trace();
                prop_assert!((before - after).abs() < 1e-6 * before.abs().max(1.0));
            }
        }
    }
}
