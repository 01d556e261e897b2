//! Directive sequences of substitutions, limit-word prefixes and finite
//! witnesses for primitivity, recurrence, irreducibility and balance.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::cf::{self, SimplexPoint};
use crate::error::{Result, SadicError};
use crate::matrix::IntMatrix;
use crate::symbolic::{self, Letter, Substitution, Word};

/// Lookahead used when choosing the letter chain of a limit word.
pub const CHAIN_LOOKAHEAD: usize = 64;

const TOKENS: [&str; 9] = ["a1", "a2", "a3", "b1", "b2", "b3", "s1", "s2", "s3"];

fn token_table() -> &'static [Arc<Substitution>; 9] {
    static TABLE: OnceLock<[Arc<Substitution>; 9]> = OnceLock::new();
    TABLE.get_or_init(|| {
        [
            cf::ar(1),
            cf::ar(2),
            cf::ar(3),
            cf::brun(1),
            cf::brun(2),
            cf::brun(3),
            cf::brun_sigma(1),
            cf::brun_sigma(2),
            cf::brun_sigma(3),
        ]
        .map(Arc::new)
    })
}

/// Substitution named by a token such as `a2` or `b3`.
pub fn token_substitution(tok: &str) -> Result<Arc<Substitution>> {
    TOKENS
        .iter()
        .position(|t| *t == tok)
        .map(|k| token_table()[k].clone())
        .ok_or_else(|| SadicError::Parse(format!("unknown substitution token {tok:?}")))
}

fn token_of(s: &Substitution) -> Option<&'static str> {
    token_table().iter().position(|t| **t == *s).map(|k| TOKENS[k])
}

#[derive(Clone, Debug)]
enum Generator {
    /// Finite prefix followed by a periodic tail; an empty tail means the
    /// sequence is finite.
    List { prefix: Vec<Arc<Substitution>>, period: Vec<Arc<Substitution>> },
    Brun(SimplexPoint),
    Ar([f64; 3]),
    /// Tail `(σ_{k+n})_n` of another sequence.
    Shift { base: Arc<DirectiveSequence>, k: usize },
}

#[derive(Debug, Default)]
struct ExpansionCache {
    terms: Vec<Arc<Substitution>>,
    brun_state: Option<SimplexPoint>,
    ar_state: Option<[f64; 3]>,
    finished: bool,
}

/// A sequence `(σ_n)` of substitutions over a common alphabet.
///
/// Expansion-driven sequences are evaluated lazily and memoized behind a
/// read-write lock, so concurrent readers see the same terms.
#[derive(Debug)]
pub struct DirectiveSequence {
    gen: Generator,
    d: usize,
    cache: RwLock<ExpansionCache>,
}

impl Clone for DirectiveSequence {
    fn clone(&self) -> Self {
        Self::from_generator(self.gen.clone(), self.d)
    }
}

impl DirectiveSequence {
    fn from_generator(gen: Generator, d: usize) -> Self {
        let mut cache = ExpansionCache::default();
        match gen {
            Generator::Brun(p) => cache.brun_state = Some(p),
            Generator::Ar(v) => cache.ar_state = Some(v),
            Generator::List { .. } | Generator::Shift { .. } => {}
        }
        DirectiveSequence { gen, d, cache: RwLock::new(cache) }
    }

    fn from_lists(prefix: Vec<Substitution>, period: Vec<Substitution>) -> Result<Self> {
        let d = prefix
            .first()
            .or(period.first())
            .map(Substitution::alphabet_size)
            .ok_or(SadicError::Empty("directive sequence"))?;
        for s in prefix.iter().chain(&period) {
            if s.alphabet_size() != d {
                return Err(SadicError::AlphabetMismatch { left: d, right: s.alphabet_size() });
            }
        }
        let wrap = |v: Vec<Substitution>| v.into_iter().map(Arc::new).collect();
        Ok(Self::from_generator(Generator::List { prefix: wrap(prefix), period: wrap(period) }, d))
    }

    pub fn finite(terms: Vec<Substitution>) -> Result<Self> {
        Self::from_lists(terms, Vec::new())
    }

    pub fn periodic(period: Vec<Substitution>) -> Result<Self> {
        Self::from_lists(Vec::new(), period)
    }

    pub fn eventually_periodic(prefix: Vec<Substitution>, period: Vec<Substitution>) -> Result<Self> {
        Self::from_lists(prefix, period)
    }

    /// Brun substitutions along the (floating point) Brun orbit of `p`.
    pub fn brun(p: SimplexPoint) -> Result<Self> {
        if !p.in_simplex(0.0) || p.x2 <= 0.0 {
            return Err(SadicError::InvalidArgument(format!("({}, {}) is not a valid Brun point", p.x1, p.x2)));
        }
        Ok(Self::from_generator(Generator::Brun(p), 3))
    }

    /// Arnoux-Rauzy substitutions along the AR algorithm orbit of `v`.
    pub fn ar(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(SadicError::InvalidArgument("AR vector must be positive".into()));
        }
        Ok(Self::from_generator(Generator::Ar(v), 3))
    }

    /// Periodic sequence from tokens, e.g. `"a1 a2 a3"`.
    pub fn periodic_tokens(tokens: &str) -> Result<Self> {
        Self::parse(&format!("periodic: {tokens}"))
    }

    /// Parses a sequence spec.
    ///
    /// * `a1 b2 ...` finite list of tokens (`a`: Arnoux-Rauzy, `b`: Brun, `s`: alternative Brun)
    /// * `b3 b1 periodic: a1 a2 a3` prefix followed by a periodic tail
    /// * `brun:x1,x2` and `ar:v1,v2,v3` expansion-driven sequences
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let nums = |s: &str, k: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| SadicError::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != k {
                return Err(SadicError::Parse(format!("expected {k} coordinates in {s:?}")));
            }
            Ok(v)
        };
        if let Some(rest) = spec.strip_prefix("brun:") {
            let v = nums(rest, 2)?;
            return Self::brun(SimplexPoint::new(v[0], v[1]));
        }
        if let Some(rest) = spec.strip_prefix("ar:") {
            let v = nums(rest, 3)?;
            return Self::ar([v[0], v[1], v[2]]);
        }
        let (head, tail) = match spec.find("periodic:") {
            Some(pos) => (&spec[..pos], Some(&spec[pos + "periodic:".len()..])),
            None => (spec, None),
        };
        let toks = |s: &str| -> Result<Vec<Substitution>> {
            s.split_whitespace().map(|t| token_substitution(t).map(|a| (*a).clone())).collect()
        };
        let prefix = toks(head)?;
        let period = match tail {
            Some(t) => {
                let p = toks(t)?;
                if p.is_empty() {
                    return Err(SadicError::Parse("empty periodic tail".into()));
                }
                p
            }
            None => Vec::new(),
        };
        Self::from_lists(prefix, period)
    }

    /// Serializes back to the spec syntax, if every term has a token.
    pub fn to_spec(&self) -> Option<String> {
        match &self.gen {
            Generator::Brun(p) => Some(format!("brun:{},{}", p.x1, p.x2)),
            Generator::Ar(v) => Some(format!("ar:{},{},{}", v[0], v[1], v[2])),
            Generator::Shift { .. } => None,
            Generator::List { prefix, period } => {
                let join = |v: &[Arc<Substitution>]| -> Option<String> {
                    Some(v.iter().map(|s| token_of(s)).collect::<Option<Vec<_>>>()?.join(" "))
                };
                let head = join(prefix)?;
                if period.is_empty() {
                    return Some(head);
                }
                let tail = join(period)?;
                Some(if head.is_empty() { format!("periodic: {tail}") } else { format!("{head} periodic: {tail}") })
            }
        }
    }

    /// The shifted sequence `(σ_{k+n})_{n>=0}`.
    pub fn shift(&self, k: usize) -> DirectiveSequence {
        if let Generator::List { prefix, period } = &self.gen {
            let (prefix, period) = if k <= prefix.len() {
                (prefix[k..].to_vec(), period.clone())
            } else if period.is_empty() {
                (Vec::new(), Vec::new())
            } else {
                let r = (k - prefix.len()) % period.len();
                let mut p = period[r..].to_vec();
                p.extend_from_slice(&period[..r]);
                (Vec::new(), p)
            };
            return Self::from_generator(Generator::List { prefix, period }, self.d);
        }
        Self::from_generator(Generator::Shift { base: Arc::new(self.clone()), k }, self.d)
    }

    pub fn alphabet_size(&self) -> usize {
        self.d
    }

    /// Number of terms if the sequence is finite (expansion-driven sequences
    /// report `None` until their expansion has stopped).
    pub fn known_len(&self) -> Option<usize> {
        match &self.gen {
            Generator::List { prefix, period } if period.is_empty() => Some(prefix.len()),
            Generator::List { .. } => None,
            Generator::Shift { base, k } => base.known_len().map(|l| l.saturating_sub(*k)),
            _ => {
                let c = self.cache.read().unwrap();
                c.finished.then_some(c.terms.len())
            }
        }
    }

    /// True if term `n` exists.
    pub fn has(&self, n: usize) -> bool {
        self.get(n).is_ok()
    }

    /// The substitution `σ_n`.
    pub fn get(&self, n: usize) -> Result<Arc<Substitution>> {
        match &self.gen {
            Generator::List { prefix, period } => {
                if n < prefix.len() {
                    Ok(prefix[n].clone())
                } else if period.is_empty() {
                    Err(SadicError::SequenceExhausted(n))
                } else {
                    Ok(period[(n - prefix.len()) % period.len()].clone())
                }
            }
            Generator::Shift { base, k } => base.get(n + k),
            _ => {
                {
                    let c = self.cache.read().unwrap();
                    if n < c.terms.len() {
                        return Ok(c.terms[n].clone());
                    }
                    if c.finished {
                        return Err(SadicError::SequenceExhausted(n));
                    }
                }
                let mut c = self.cache.write().unwrap();
                while c.terms.len() <= n && !c.finished {
                    self.extend(&mut c);
                }
                c.terms.get(n).cloned().ok_or(SadicError::SequenceExhausted(n))
            }
        }
    }

    fn extend(&self, c: &mut ExpansionCache) {
        let table = token_table();
        let target = (c.terms.len() * 2).max(64);
        while c.terms.len() < target && !c.finished {
            let next = if let Some(p) = c.brun_state {
                cf::brun_step(p).ok().map(|(b, q)| {
                    c.brun_state = Some(q);
                    table[2 + b as usize].clone()
                })
            } else if let Some(v) = c.ar_state {
                cf::ar_step(&v).map(|(l, w)| {
                    c.ar_state = Some(w);
                    table[l.index()].clone()
                })
            } else {
                None
            };
            match next {
                Some(s) => c.terms.push(s),
                None => c.finished = true,
            }
        }
    }

    /// Terms `σ_k, ..., σ_{ℓ-1}`.
    pub fn window(&self, k: usize, l: usize) -> Result<Vec<Arc<Substitution>>> {
        (k..l).map(|n| self.get(n)).collect()
    }

    /// `M_{[k,ℓ)} = M_k ... M_{ℓ-1}`; the identity when `k = ℓ`.
    pub fn product_matrix(&self, k: usize, l: usize) -> Result<IntMatrix> {
        if k > l {
            return Err(SadicError::InvalidArgument(format!("window [{k},{l}) is reversed")));
        }
        let mut m = IntMatrix::identity(self.d);
        for n in k..l {
            m = &m * &self.get(n)?.incidence();
        }
        Ok(m)
    }

    /// `M_{[0,n)}` for every `n` in `0..=len`.
    pub fn prefix_products(&self, len: usize) -> Result<Vec<IntMatrix>> {
        let mut out = Vec::with_capacity(len + 1);
        out.push(IntMatrix::identity(self.d));
        for n in 0..len {
            let next = out[n].clone();
            out.push(&next * &self.get(n)?.incidence());
        }
        Ok(out)
    }

    /// The composed substitution `σ_{[k,ℓ)}`.
    pub fn product_substitution(&self, k: usize, l: usize) -> Result<Substitution> {
        let mut s = Substitution::identity(self.d);
        for n in k..l {
            s = s.compose(&*self.get(n)?)?;
        }
        Ok(s)
    }

    /// Smallest `ℓ <= l_max` with `M_{[k,ℓ)}` strictly positive.
    pub fn is_primitive_window(&self, k: usize, l_max: usize) -> Option<usize> {
        let mut m = IntMatrix::identity(self.d);
        for l in k + 1..=l_max {
            let s = self.get(l - 1).ok()?;
            m = &m * &s.incidence();
            if m.is_positive() {
                return Some(l);
            }
            // a positive matrix stays positive; a zero row never fills in
            // only if the pattern stops changing, which we do not try to detect
        }
        None
    }

    fn first_letter_map(&self, n: usize) -> Result<Vec<usize>> {
        let s = self.get(n)?;
        Ok(s.images().iter().map(|w| w.first().unwrap().index()).collect())
    }

    /// Letter chain `i_0, ..., i_len` with `σ_n(i_{n+1})` starting with `i_n`.
    ///
    /// Each choice is the smallest letter that still admits a backward chain of
    /// `CHAIN_LOOKAHEAD` further steps (or as many as the sequence provides).
    pub fn letter_chain(&self, len: usize) -> Result<Vec<Letter>> {
        let d = self.d;
        // f[n] for n in 0 .. len + lookahead, truncated at the end of a finite sequence
        let mut maps = Vec::new();
        for n in 0..len + CHAIN_LOOKAHEAD {
            match self.first_letter_map(n) {
                Ok(m) => maps.push(m),
                Err(SadicError::SequenceExhausted(_)) => break,
                Err(e) => return Err(e),
            }
        }
        if maps.len() < len {
            return Err(SadicError::SequenceExhausted(maps.len()));
        }
        // letters at level n reachable from level n + w through the maps
        let reachable = |n: usize, w: usize| -> Vec<bool> {
            let end = (n + w).min(maps.len());
            let mut set = vec![true; d];
            for m in (n..end).rev() {
                let mut next = vec![false; d];
                for (j, &ok) in set.iter().enumerate() {
                    if ok {
                        next[maps[m][j]] = true;
                    }
                }
                set = next;
            }
            set
        };
        let mut chain = Vec::with_capacity(len + 1);
        let start = reachable(0, CHAIN_LOOKAHEAD).iter().position(|&b| b).unwrap();
        chain.push(start);
        for n in 0..len {
            let prev = chain[n];
            let mut choice = None;
            for w in (0..=CHAIN_LOOKAHEAD).rev() {
                let r = reachable(n + 1, w);
                if let Some(j) = (0..d).find(|&j| r[j] && maps[n][j] == prev) {
                    choice = Some(j);
                    break;
                }
            }
            chain.push(choice.ok_or_else(|| {
                SadicError::Numeric(format!("no letter at level {} maps onto {}", n + 1, prev + 1))
            })?);
        }
        Ok(chain.into_iter().map(Letter::from_index).collect())
    }

    /// Prefix `σ_{[0,N)}(i_N)` of a limit word, for the smallest `N <= depth`
    /// whose image has length at least `min_len`.
    pub fn limit_word_prefix(&self, depth: usize, min_len: usize) -> Result<Word> {
        let chain = self.letter_chain(depth)?;
        // lengths |σ_{[0,N)}(j)| as the row vector 1ᵗ M_{[0,N)}
        let mut lens = vec![1u128; self.d];
        let mut level = None;
        for n in 0..=depth {
            if lens[chain[n].index()] >= min_len as u128 {
                level = Some(n);
                break;
            }
            if n == depth {
                break;
            }
            let s = self.get(n)?;
            lens = s
                .images()
                .iter()
                .map(|w| w.letters().iter().fold(0u128, |acc, l| acc.saturating_add(lens[l.index()])))
                .collect();
        }
        let n = level.ok_or(SadicError::PrefixUnreachable { min_len, depth })?;
        self.expand_letter(0, n, chain[n])
    }

    /// `σ_{[k,ℓ)}(i)` computed by applying the terms from the inside out.
    pub fn expand_letter(&self, k: usize, l: usize, i: Letter) -> Result<Word> {
        let mut w = Word::from_letters(vec![i]);
        for n in (k..l).rev() {
            w = self.get(n)?.apply(&w);
        }
        Ok(w)
    }

    /// Factors of length `<= max_len` of `σ_{[m,depth)}(i)` over all letters `i`.
    pub fn language_factors(&self, m: usize, max_len: usize, depth: usize) -> Result<HashSet<Word>> {
        if depth < m {
            return Err(SadicError::InvalidArgument("depth must be at least m".into()));
        }
        let images: Vec<Word> = (0..self.d)
            .map(|i| self.expand_letter(m, depth, Letter::from_index(i)))
            .collect::<Result<_>>()?;
        Ok(symbolic::factors_of(&images, max_len))
    }

    /// Smallest `n` in `[1, search_max]` with `σ_{n+j} = σ_j` for `j < ℓ`.
    pub fn find_recurrence_window(&self, l: usize, search_max: usize) -> Option<usize> {
        let head = self.window(0, l).ok()?;
        (1..=search_max).find(|&n| match self.window(n, n + l) {
            Ok(w) => w.iter().zip(&head).all(|(a, b)| a == b),
            Err(_) => false,
        })
    }

    /// Finite witnesses for the primitivity, recurrence, irreducibility and
    /// balance hypotheses; never a claim that the infinite properties hold.
    pub fn price_report(&self, depth: usize, l_list: &[usize], factor_len: usize) -> Result<PriceReport> {
        let primitivity_window = self.is_primitive_window(0, depth);
        let mut recurrence_witnesses = Vec::new();
        for &l in l_list {
            if l == 0 || l > depth {
                continue;
            }
            if let Some(n) = self.find_recurrence_window(l, depth - l) {
                recurrence_witnesses.push((l, n));
            }
        }
        let mut irreducibility_checks = Vec::new();
        for &l in l_list {
            if l == 0 || !self.has(l - 1) {
                continue;
            }
            let m = self.product_matrix(0, l)?;
            if let Ok(b) = symbolic::is_irreducible_charpoly(&m) {
                irreducibility_checks.push((0, l, b));
            }
        }
        let mut balance_lower_bounds = Vec::new();
        for &(l, n) in &recurrence_witnesses {
            let level = n + l;
            if level <= depth {
                let f = self.language_factors(level, factor_len, depth)?;
                balance_lower_bounds.push((level, symbolic::balance_constant(&f, self.d)));
            }
        }
        // (P) and (R) jointly: a positive block B = M_{[ℓ-h, ℓ)} at the end of a
        // recurring window is repeated at the end of its recurrence.
        let mut joint = None;
        'outer: for &(l, n) in &recurrence_witnesses {
            let mut b = IntMatrix::identity(self.d);
            for h in 1..=l {
                b = &self.get(l - h)?.incidence() * &b;
                if b.is_positive() {
                    joint = Some(JointWitness { l, n, h });
                    break 'outer;
                }
            }
        }
        Ok(PriceReport {
            primitivity_window,
            recurrence_witnesses,
            irreducibility_checks,
            balance_lower_bounds,
            joint,
        })
    }

    /// Serializable description.
    pub fn describe(&self) -> String {
        self.to_spec().unwrap_or_else(|| "<custom>".into())
    }
}

impl fmt::Display for DirectiveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// A recurrence witness `(ℓ, n)` whose last `h` terms have a positive product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointWitness {
    pub l: usize,
    pub n: usize,
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    pub primitivity_window: Option<usize>,
    pub recurrence_witnesses: Vec<(usize, usize)>,
    pub irreducibility_checks: Vec<(usize, usize, bool)>,
    pub balance_lower_bounds: Vec<(usize, i64)>,
    pub joint: Option<JointWitness>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> DirectiveSequence {
        DirectiveSequence::periodic_tokens("a1 a2 a3").unwrap()
    }

    #[test]
    fn product_examples() {
        let s = tri();
        assert_eq!(s.product_matrix(4, 4).unwrap(), IntMatrix::identity(3));
        assert_eq!(
            s.product_matrix(0, 2).unwrap().to_i64_rows().unwrap(),
            vec![vec![2, 1, 2], vec![1, 1, 1], vec![0, 0, 1]]
        );
        assert!(s.product_matrix(0, 7).unwrap().is_unimodular());
    }

    #[test]
    fn primitivity_examples() {
        // β3β2(1) = "3", so the two-term product is not positive
        let s = DirectiveSequence::periodic_tokens("b3 b2").unwrap();
        let [_, m2, m3] = cf::brun_matrices();
        assert!(!(&m3 * &m2).is_positive());
        assert!((&(&m3 * &m2) * &(&m3 * &m2)).is_positive());
        assert_eq!(s.is_primitive_window(0, 10), Some(4));
        let b1 = DirectiveSequence::periodic_tokens("b1").unwrap();
        assert_eq!(b1.is_primitive_window(0, 40), None);
        assert_eq!(tri().is_primitive_window(0, 10), Some(3));
    }

    #[test]
    fn limit_word_examples() {
        let a1 = DirectiveSequence::periodic_tokens("a1").unwrap();
        assert_eq!(a1.letter_chain(5).unwrap()[5].value(), 1);
        assert!(matches!(a1.limit_word_prefix(10, 2), Err(SadicError::PrefixUnreachable { .. })));
        assert_eq!(a1.limit_word_prefix(10, 1).unwrap().to_string(), "1");
        let w = tri().limit_word_prefix(20, 3).unwrap();
        assert!(w.to_string().starts_with("121"));
        let long = tri().limit_word_prefix(30, 1000).unwrap();
        assert!(w.is_prefix_of(&long));
    }

    #[test]
    fn language_examples() {
        let s = tri();
        let f = s.language_factors(0, 2, 6).unwrap();
        assert!(f.contains(&Word::parse("12", 3).unwrap()));
        assert!(!f.contains(&Word::parse("22", 3).unwrap()));
        let single = s.language_factors(4, 1, 4).unwrap();
        assert_eq!(single.len(), 3);
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(tri().find_recurrence_window(3, 10), Some(3));
        let s = DirectiveSequence::parse("b1 b2 b1 b1 b2 b3").unwrap();
        assert_eq!(s.find_recurrence_window(2, 4), Some(3));
        let s = DirectiveSequence::parse("b1 b2 b3 b3").unwrap();
        assert_eq!(s.find_recurrence_window(2, 2), None);
    }

    #[test]
    fn price_examples() {
        let r = tri().price_report(12, &[3], 6).unwrap();
        assert_eq!(r.primitivity_window, Some(3));
        assert_eq!(r.recurrence_witnesses, vec![(3, 3)]);
        assert_eq!(r.irreducibility_checks, vec![(0, 3, true)]);
        assert!(r.joint.is_some());
        let b1 = DirectiveSequence::periodic_tokens("b1").unwrap();
        assert_eq!(b1.price_report(10, &[1], 3).unwrap().primitivity_window, None);
        let r = tri().price_report(3, &[3], 3).unwrap();
        assert!(r.recurrence_witnesses.is_empty());
    }

    #[test]
    fn spec_roundtrip() {
        for spec in ["a1 a2", "periodic: a1 a2 a3", "b3 b1 periodic: b2 b1", "brun:0.2,0.3"] {
            assert_eq!(DirectiveSequence::parse(spec).unwrap().to_spec().unwrap(), spec);
        }
        assert!(DirectiveSequence::parse("a4").is_err());
        assert!(DirectiveSequence::parse("periodic:").is_err());
    }

    #[test]
    fn shift_matches_terms() {
        let s = DirectiveSequence::parse("b3 b1 periodic: a1 a2 a3").unwrap();
        for k in 0..7 {
            let t = s.shift(k);
            for n in 0..10 {
                assert_eq!(t.get(n).unwrap(), s.get(n + k).unwrap());
            }
        }
        let b = DirectiveSequence::parse("brun:0.2,0.3").unwrap();
        assert_eq!(b.shift(5).get(3).unwrap(), b.get(8).unwrap());
        assert_eq!(b.shift(5).to_spec(), None);
    }

    #[test]
    fn expansion_driven_terms() {
        let s = DirectiveSequence::parse("brun:0.2,0.3").unwrap();
        let digits = cf::brun_expand(SimplexPoint::new(0.2, 0.3), 50).digits;
        for (n, d) in digits.iter().enumerate() {
            assert_eq!(*s.get(n).unwrap(), cf::brun(*d as usize));
        }
        let a = DirectiveSequence::ar([5.0, 2.0, 1.0]).unwrap();
        assert_eq!(*a.get(0).unwrap(), cf::ar(1));
        let a = DirectiveSequence::ar([1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(a.get(0), Err(SadicError::SequenceExhausted(0))));
    }
}
