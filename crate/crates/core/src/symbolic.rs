//! Words, substitutions, abelianization and incidence matrices.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SadicError};
use crate::matrix::{IntMatrix, IntVector};

/// A letter of the alphabet `{1, ..., d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(u8);

impl Letter {
    pub fn new(value: usize, d: usize) -> Result<Self> {
        if value == 0 || value > d || value > u8::MAX as usize {
            return Err(SadicError::LetterOutOfRange { letter: value, d });
        }
        Ok(Letter(value as u8))
    }

    /// Letter from a zero-based index.
    pub fn from_index(i: usize) -> Self {
        Letter(i as u8 + 1)
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Finite word; may be empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Parses a digit string such as `"1232"`, checking letters against `d`.
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        s.chars()
            .map(|c| {
                let v = c
                    .to_digit(10)
                    .ok_or_else(|| SadicError::Parse(format!("bad letter {c:?}")))?;
                Letter::new(v as usize, d)
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().map(|l| l.value()).max().unwrap_or(0)
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = SadicError;

    /// Parses with the largest supported alphabet (letters 1..=9).
    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s, 9)
    }
}

/// Letter counts `(|w|_1, ..., |w|_d)` as machine integers.
pub fn letter_counts(w: &[Letter], d: usize) -> Vec<i64> {
    let mut c = vec![0i64; d];
    for l in w {
        c[l.index()] += 1;
    }
    c
}

pub fn abelianize(w: &Word, d: usize) -> IntVector {
    IntVector::from_i64(&letter_counts(w.letters(), d))
}

/// A non-erasing substitution over `{1, ..., d}`, `d = images.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    images: Vec<Word>,
}

impl Substitution {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let d = images.len();
        if d == 0 {
            return Err(SadicError::Empty("substitution with no letters"));
        }
        for (i, w) in images.iter().enumerate() {
            if w.is_empty() {
                return Err(SadicError::ErasingImage(i + 1));
            }
            if w.max_letter() > d {
                return Err(SadicError::LetterOutOfRange { letter: w.max_letter(), d });
            }
        }
        Ok(Substitution { images })
    }

    /// Builds from digit strings, e.g. `["1", "21", "31"]`.
    pub fn from_strs(images: &[&str]) -> Result<Self> {
        let d = images.len();
        Self::new(images.iter().map(|s| Word::parse(s, d)).collect::<Result<_>>()?)
    }

    pub fn identity(d: usize) -> Self {
        Substitution {
            images: (0..d).map(|i| Word(vec![Letter::from_index(i)])).collect(),
        }
    }

    /// Letter permutation `i -> perm[i]` (zero-based indices).
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in perm {
            if p >= d || seen[p] {
                return Err(SadicError::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(Substitution {
            images: perm.iter().map(|&p| Word(vec![Letter::from_index(p)])).collect(),
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, l: Letter) -> &Word {
        &self.images[l.index()]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Word {
        let total: usize = w.letters().iter().map(|l| self.image(*l).len()).sum();
        let mut out = Vec::with_capacity(total);
        for l in w.letters() {
            out.extend_from_slice(self.image(*l).letters());
        }
        Word(out)
    }

    pub fn incidence(&self) -> IntMatrix {
        let d = self.alphabet_size();
        let mut m = IntMatrix::zeros(d);
        for (j, w) in self.images.iter().enumerate() {
            for (i, c) in letter_counts(w.letters(), d).into_iter().enumerate() {
                m.set(i, j, BigInt::from(c));
            }
        }
        m
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(SadicError::AlphabetMismatch {
                left: self.alphabet_size(),
                right: other.alphabet_size(),
            });
        }
        Ok(Substitution {
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        })
    }

    pub fn is_unimodular(&self) -> bool {
        self.incidence().is_unimodular()
    }

    /// Text format: one `i:word` line per letter.
    pub fn to_text(&self) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}:{}\n", i + 1, w))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| SadicError::Parse(format!("expected `i:word`, got {line:?}")))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| SadicError::Parse(format!("bad letter in {line:?}")))?;
            entries.push((k, v.trim().to_string()));
        }
        let d = entries.len();
        entries.sort_by_key(|e| e.0);
        if entries.iter().enumerate().any(|(i, e)| e.0 != i + 1) {
            return Err(SadicError::Parse("letters must be exactly 1..=d".into()));
        }
        Self::new(
            entries
                .iter()
                .map(|(_, w)| Word::parse(w, d))
                .collect::<Result<_>>()?,
        )
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}->{}", i + 1, w))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// True iff the monic cubic characteristic polynomial of `m` has no rational root.
///
/// Rational roots of a monic integer polynomial are integers dividing the
/// constant term; with `d = 3` the absence of such a root is equivalent to
/// irreducibility over the rationals.
pub fn is_irreducible_charpoly(m: &IntMatrix) -> Result<bool> {
    if m.dim() != 3 {
        return Err(SadicError::UnsupportedDimension { expected: 3, got: m.dim() });
    }
    let c = m.charpoly();
    let eval = |x: &BigInt| -> BigInt { ((x + &c[2]) * x + &c[1]) * x + &c[0] };
    if c[0].is_zero() {
        return Ok(false);
    }
    for r in integer_root_candidates(&c[0]) {
        if eval(&r).is_zero() || eval(&-r).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Positive divisors of `n` (by trial division up to `sqrt(n)`).
fn integer_root_candidates(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut k = BigInt::one();
    while &k * &k <= n {
        if n.is_multiple_of(&k) {
            out.push(k.clone());
            out.push(&n / &k);
        }
        k += 1;
    }
    out
}

/// Maximal balance `max | |u|_j - |v|_j |` over equal-length pairs in `factors`.
pub fn balance_constant<'a, I>(factors: I, d: usize) -> i64
where
    I: IntoIterator<Item = &'a Word>,
{
    let mut ranges: std::collections::HashMap<usize, Vec<(i64, i64)>> = Default::default();
    for w in factors {
        let counts = letter_counts(w.letters(), d);
        let entry = ranges
            .entry(w.len())
            .or_insert_with(|| vec![(i64::MAX, i64::MIN); d]);
        for (r, c) in entry.iter_mut().zip(counts) {
            r.0 = r.0.min(c);
            r.1 = r.1.max(c);
        }
    }
    ranges
        .values()
        .flat_map(|r| r.iter().map(|(lo, hi)| hi - lo))
        .max()
        .unwrap_or(0)
}

/// Balance constant of all factors of lengths `1..=max_len` of a single word,
/// computed with sliding windows instead of materializing the factor set.
pub fn word_balance(word: &[Letter], d: usize, max_len: usize) -> i64 {
    let n = word.len();
    let mut best = 0i64;
    // prefix counts per letter
    let mut pref = vec![vec![0i32; n + 1]; d];
    for (k, l) in word.iter().enumerate() {
        for (j, p) in pref.iter_mut().enumerate() {
            p[k + 1] = p[k] + i32::from(l.index() == j);
        }
    }
    for len in 1..=max_len.min(n) {
        for p in &pref {
            let (mut lo, mut hi) = (i32::MAX, i32::MIN);
            for start in 0..=n - len {
                let c = p[start + len] - p[start];
                lo = lo.min(c);
                hi = hi.max(c);
            }
            best = best.max(i64::from(hi - lo));
        }
    }
    best
}

/// All distinct factors of lengths `1..=max_len` of the given words.
pub fn factors_of<'a, I>(words: I, max_len: usize) -> HashSet<Word>
where
    I: IntoIterator<Item = &'a Word>,
{
    let mut out = HashSet::new();
    for w in words {
        let l = w.letters();
        for len in 1..=max_len.min(l.len()) {
            for start in 0..=l.len() - len {
                out.insert(Word(l[start..start + len].to_vec()));
            }
        }
    }
    out
}

/// Length of each image as machine integers, saturating at `u64::MAX`.
pub fn image_lengths(m: &IntMatrix) -> Vec<u64> {
    let d = m.dim();
    (0..d)
        .map(|j| {
            let s: BigInt = (0..d).map(|i| m.get(i, j).clone()).sum();
            s.to_u64().unwrap_or(u64::MAX)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{ar, brun};

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(ar(2).apply(&w("13")), w("1232"));
        assert_eq!(ar(1).apply(&Word::empty()), Word::empty());
        assert_eq!(brun(1).apply(&w("2")), w("23"));
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(abelianize(&w("1213"), 3), IntVector::from_i64(&[2, 1, 1]));
        assert_eq!(abelianize(&Word::empty(), 3), IntVector::from_i64(&[0, 0, 0]));
    }

    #[test]
    fn incidence_examples() {
        let rows = |m: IntMatrix| m.to_i64_rows().unwrap();
        assert_eq!(rows(brun(3).incidence()), vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 1]]);
        assert_eq!(Substitution::identity(3).incidence(), IntMatrix::identity(3));
        assert_eq!(rows(ar(1).incidence()), vec![vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn compose_examples() {
        let c = ar(1).compose(&ar(2)).unwrap();
        assert_eq!(c.image(Letter::from_index(0)), &w("121"));
        assert_eq!(c.images(), &[w("121"), w("21"), w("3121")]);
        assert_eq!(
            c.incidence().to_i64_rows().unwrap(),
            vec![vec![2, 1, 2], vec![1, 1, 1], vec![0, 0, 1]]
        );
        assert_eq!(ar(3).compose(&Substitution::identity(3)).unwrap(), ar(3));
        assert!(ar(1).compose(&Substitution::identity(2)).is_err());
    }

    #[test]
    fn erasing_and_out_of_range_rejected() {
        assert!(matches!(
            Substitution::new(vec![w("1"), Word::empty(), w("3")]),
            Err(SadicError::ErasingImage(2))
        ));
        assert!(Substitution::from_strs(&["1", "4", "3"]).is_err());
        assert!(Word::parse("104", 3).is_err());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!is_irreducible_charpoly(&IntMatrix::identity(3)).unwrap());
        let prod = ar(1).compose(&ar(2).compose(&ar(3)).unwrap()).unwrap();
        assert!(is_irreducible_charpoly(&prod.incidence()).unwrap());
        let block = IntMatrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert!(!is_irreducible_charpoly(&block).unwrap());
        assert!(is_irreducible_charpoly(&IntMatrix::identity(2)).is_err());
    }

    #[test]
    fn balance_examples() {
        let periodic: Word = w(&"123".repeat(3));
        let f = factors_of([&periodic], 9);
        assert_eq!(balance_constant(&f, 3), 1);
        assert_eq!(balance_constant([&w("112"), &w("211")], 3), 0);
        assert_eq!(word_balance(periodic.letters(), 3, 9), 1);
    }

    #[test]
    fn word_balance_matches_factor_set() {
        let word = ar(1)
            .compose(&ar(2))
            .unwrap()
            .compose(&ar(3))
            .unwrap();
        let mut x = w("1");
        for _ in 0..4 {
            x = word.apply(&x);
        }
        for max_len in [1, 3, 7, 20] {
            let f = factors_of([&x], max_len);
            assert_eq!(balance_constant(&f, 3), word_balance(x.letters(), 3, max_len));
        }
    }

    #[test]
    fn text_format_roundtrip() {
        let s = brun(3);
        assert_eq!(s.to_text(), "1:3\n2:1\n3:23\n");
        assert_eq!(Substitution::from_text(&s.to_text()).unwrap(), s);
        assert!(Substitution::from_text("1:1\n3:2\n").is_err());
    }
}
