//! Toral translations on `1⊥ / Λ`, the domain exchange on Rauzy subtiles,
//! natural-coding checks, discrepancy and recurrence statistics.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Result, SadicError};
use crate::fractal::{cloud_from_word, LabeledCloud, SubtileIndex};
use crate::geometry::{self, RealVector};
use crate::grid::P3;
use crate::symbolic::{Letter, Word};

/// A point of `1⊥` reduced modulo `Λ = 1⊥ ∩ Z^d` with basis `e_j − e_d`:
/// the first `d − 1` coordinates lie in `[0, 1)`, the last one makes the sum 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub coords: RealVector,
}

impl TorusPoint {
    pub fn zero(d: usize) -> Self {
        TorusPoint { coords: vec![0.0; d] }
    }

    /// Reduces a point of `1⊥` (the last coordinate is recomputed).
    pub fn reduce(x: &[f64]) -> Self {
        let d = x.len();
        let mut coords = vec![0.0; d];
        let mut s = 0.0;
        for k in 0..d.saturating_sub(1) {
            let mut a = x[k].rem_euclid(1.0);
            if a >= 1.0 {
                a = 0.0;
            }
            coords[k] = a;
            s += a;
        }
        if d > 0 {
            coords[d - 1] = -s;
        }
        TorusPoint { coords }
    }

    /// Distance on the torus in the coordinates `x_1, …, x_{d−1}`.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        let d = self.coords.len();
        (0..d.saturating_sub(1))
            .map(|k| {
                let t = (self.coords[k] - other.coords[k]).rem_euclid(1.0);
                t.min(1.0 - t)
            })
            .fold(0.0, f64::max)
    }
}

pub fn torus_translate(t: &[f64], x: &TorusPoint) -> Result<TorusPoint> {
    if t.len() != x.coords.len() {
        return Err(SadicError::AlphabetMismatch { left: t.len(), right: x.coords.len() });
    }
    let s: f64 = t.iter().sum();
    if s.abs() > 1e-9 {
        return Err(SadicError::InvalidArgument(format!("translation not in 1⊥ (sum {s:e})")));
    }
    Ok(TorusPoint::reduce(&geometry::add(&x.coords, t)))
}

/// The domain exchange `x ↦ x + π_{u,1} e_i` for `x ∈ R(i)`, with
/// membership decided by ε-closeness to the subtile clouds.
pub struct DomainExchange {
    index: SubtileIndex,
    shifts: [P3; 3],
}

impl DomainExchange {
    pub fn new(cloud: &LabeledCloud, u: &[f64], eps: f64) -> Result<Self> {
        let one = geometry::ones(3);
        let mut shifts = [[0.0; 3]; 3];
        for (i, s) in shifts.iter_mut().enumerate() {
            let p = geometry::project(u, &one, &geometry::unit(3, i))?;
            *s = [p[0], p[1], p[2]];
        }
        Ok(DomainExchange { index: SubtileIndex::new(cloud, eps), shifts })
    }

    pub fn labels_at(&self, x: &P3) -> Vec<usize> {
        (0..3).filter(|&i| self.index.contains(i, x, &[0.0; 3])).collect()
    }

    /// `None` when no label or several labels match.
    pub fn step(&self, x: &P3) -> Option<(Letter, P3)> {
        match self.labels_at(x).as_slice() {
            [i] => {
                let s = self.shifts[*i];
                Some((Letter::from_index(*i), [x[0] + s[0], x[1] + s[1], x[2] + s[2]]))
            }
            _ => None,
        }
    }
}

pub fn domain_exchange_step(cloud: &LabeledCloud, u: &[f64], x: &P3, eps: f64) -> Result<Option<(Letter, P3)>> {
    Ok(DomainExchange::new(cloud, u, eps)?.step(x))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingReport {
    pub matched: usize,
    pub ambiguous: usize,
    pub mismatched: usize,
    /// Part of `ambiguous` where no subtile matched at all.
    pub uncovered: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

impl CodingReport {
    pub fn unambiguous_fraction(&self) -> f64 {
        if self.n == 0 {
            1.0
        } else {
            (self.matched + self.mismatched) as f64 / self.n as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodingConfig {
    pub depth: usize,
    pub horizon: usize,
    pub epsilon: f64,
    /// Translation letter `j` (1-based); the orbit is `n π_{u,1} e_j`.
    pub letter: usize,
    /// Length of the limit-word segment that builds the subtile clouds.
    pub cloud_len: usize,
}

impl Default for CodingConfig {
    fn default() -> Self {
        CodingConfig { depth: 80, horizon: 2000, epsilon: 0.02, letter: 3, cloud_len: 100_000 }
    }
}

/// Codes the orbit of 0 under translation by `π_{u,1} e_j` on `1⊥/Λ` by
/// ε-membership in the subtiles (reduced mod Λ) and compares with the limit
/// word. The subtile clouds are built from word positions `N..N+cloud_len`
/// only, so no orbit point is decoded by its own cloud point.
pub fn natural_coding_check(seq: &DirectiveSequence, u: &[f64], cfg: &CodingConfig) -> Result<CodingReport> {
    if seq.alphabet_size() != 3 {
        return Err(SadicError::UnsupportedDimension { expected: 3, got: seq.alphabet_size() });
    }
    if cfg.letter == 0 || cfg.letter > 3 {
        return Err(SadicError::LetterOutOfRange { letter: cfg.letter, d: 3 });
    }
    let n = cfg.horizon;
    if n == 0 {
        return Ok(CodingReport::default());
    }
    let word = seq.limit_word_prefix(cfg.depth, n + cfg.cloud_len)?;
    let one = geometry::ones(3);
    let cloud = cloud_from_word(&word, n..n + cfg.cloud_len, u, &one, cfg.depth)?;
    let idx = SubtileIndex::new(&cloud, cfg.epsilon);
    let reach = idx.radius.iter().cloned().fold(0.0, f64::max) + cfg.epsilon;
    let t = geometry::project(u, &one, &geometry::unit(3, cfg.letter - 1))?;
    // lattice offsets λ = a(e1 − e3) + b(e2 − e3) that can bring a reduced
    // point (x1, x2 ∈ [0,1)) into reach of the clouds
    let span = reach.ceil() as i64 + 2;
    let mut lattice = Vec::new();
    for a in -span..=span {
        for b in -span..=span {
            lattice.push([a as f64, b as f64, -(a + b) as f64]);
        }
    }
    let letters = word.letters();
    let mut report = CodingReport { n, ..Default::default() };
    let mut x = TorusPoint::zero(3);
    for k in 0..n {
        let p: P3 = [x.coords[0], x.coords[1], x.coords[2]];
        let mut labels = [false; 3];
        for lam in &lattice {
            // p + λ ∈ R(i)  <=>  p ∈ R(i) − λ
            let q = [p[0] + lam[0], p[1] + lam[1], p[2] + lam[2]];
            if geometry::norm_inf(&q) > reach {
                continue;
            }
            for (i, hit) in labels.iter_mut().enumerate() {
                if !*hit && idx.contains(i, &q, &[0.0; 3]) {
                    *hit = true;
                }
            }
        }
        let found: Vec<usize> = (0..3).filter(|&i| labels[i]).collect();
        match found.as_slice() {
            [] => {
                report.ambiguous += 1;
                report.uncovered += 1;
            }
            [i] if *i == letters[k].index() => report.matched += 1,
            [_] => report.mismatched += 1,
            _ => report.ambiguous += 1,
        }
        x = torus_translate(&t, &x)?;
    }
    Ok(report)
}

/// Per letter: `max_{n <= N} |#_i word[0..n) − n freq_i|`.
pub fn bounded_remainder_stats(word: &Word, freq: &[f64], n: usize) -> Result<Vec<f64>> {
    if word.len() < n {
        return Err(SadicError::InvalidArgument(format!("word of length {} shorter than horizon {n}", word.len())));
    }
    let d = freq.len();
    if word.max_letter() > d {
        return Err(SadicError::LetterOutOfRange { letter: word.max_letter(), d });
    }
    let mut counts = vec![0u64; d];
    let mut out = vec![0.0f64; d];
    for (k, l) in word.letters()[..n].iter().enumerate() {
        counts[l.index()] += 1;
        let m = (k + 1) as f64;
        for i in 0..d {
            out[i] = out[i].max((counts[i] as f64 - m * freq[i]).abs());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceEntry {
    pub n: usize,
    pub r: usize,
    /// The estimate exceeds half the word length, or some factor occurs once.
    pub insufficient: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub entries: Vec<RecurrenceEntry>,
    pub max_ratio: f64,
}

/// Empirical recurrence function: the smallest `k` such that every factor
/// of length `k` of `word` contains every factor of length `n` of `word`.
pub fn recurrence_estimate(word: &Word, n_max: usize) -> RecurrenceReport {
    let letters = word.letters();
    let len = letters.len();
    let mut entries = Vec::new();
    let mut prev = 0;
    for n in 1..=n_max.min(len) {
        // (last occurrence, worst constraint, occurrences)
        let mut seen: HashMap<&[Letter], (usize, usize, usize)> = HashMap::new();
        for p in 0..=len - n {
            let e = seen.entry(&letters[p..p + n]).or_insert((p, p + n, 0));
            if e.2 > 0 {
                e.1 = e.1.max(p - e.0 - 1 + n);
            }
            e.0 = p;
            e.2 += 1;
        }
        let mut r = 0;
        let mut single = false;
        for (last, worst, occ) in seen.values() {
            r = r.max(*worst).max(len - last);
            single |= *occ < 2;
        }
        // monotone by definition; the finite-prefix estimate can dip
        r = r.max(prev);
        prev = r;
        entries.push(RecurrenceEntry { n, r, insufficient: single || 2 * r > len });
    }
    let max_ratio = entries.iter().map(|e| e.r as f64 / e.n as f64).fold(0.0, f64::max);
    RecurrenceReport { entries, max_ratio }
}

/// Cloud points of an orbit segment starting at 0; used to check the
/// telescoping identity of the domain exchange.
pub fn exchange_orbit(ex: &DomainExchange, steps: usize) -> Vec<Option<Letter>> {
    let mut x = [0.0; 3];
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        match ex.step(&x) {
            Some((l, y)) => {
                out.push(Some(l));
                x = y;
            }
            None => {
                out.push(None);
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::rauzy_cloud;
    use crate::geometry::right_eigenvector_approx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_group_laws() {
        let x = TorusPoint::reduce(&[0.3, 0.4, -0.7]);
        assert_eq!(torus_translate(&[0.0; 3], &x).unwrap(), x);
        let y = torus_translate(&[-1.0, 0.0, 1.0], &x).unwrap();
        assert!(y.distance(&x) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = [0.123, -0.456, 0.333];
        for _ in 0..100 {
            let a: f64 = rng.gen_range(-3.0..3.0);
            let b: f64 = rng.gen_range(-3.0..3.0);
            let x = TorusPoint::reduce(&[a, b, -a - b]);
            let back = torus_translate(&[-0.123, 0.456, -0.333], &torus_translate(&t, &x).unwrap()).unwrap();
            assert!(back.distance(&x) < 1e-9);
            assert!(x.coords[0] >= 0.0 && x.coords[0] < 1.0 && x.coords[1] >= 0.0 && x.coords[1] < 1.0);
        }
        assert!(torus_translate(&[1.0, 0.0, 0.0], &x).is_err());
    }

    #[test]
    fn exchange_telescopes_on_orbit_of_zero() {
        let seq = DirectiveSequence::parse("periodic: a1 a2 a3").unwrap();
        let u = right_eigenvector_approx(&seq, 60).unwrap().u;
        let cloud = rauzy_cloud(&seq, 60, 5000, &u, &geometry::ones(3)).unwrap();
        let ex = DomainExchange::new(&cloud, &u, 1e-9).unwrap();
        let word = seq.limit_word_prefix(60, 5000).unwrap();
        let orbit = exchange_orbit(&ex, 2000);
        assert_eq!(orbit.len(), 2000);
        for (k, l) in orbit.iter().enumerate() {
            assert_eq!(*l, Some(word.letters()[k]), "step {k}");
        }
        // ε = 0 off the cloud: absent
        assert!(domain_exchange_step(&cloud, &u, &[0.123456, 0.0, -0.123456], 0.0).unwrap().is_none());
    }

    #[test]
    fn coding_zero_horizon() {
        let seq = DirectiveSequence::parse("periodic: a1 a2 a3").unwrap();
        let u = right_eigenvector_approx(&seq, 60).unwrap().u;
        let cfg = CodingConfig { horizon: 0, ..Default::default() };
        assert_eq!(natural_coding_check(&seq, &u, &cfg).unwrap(), CodingReport::default());
    }

    #[test]
    fn discrepancy_of_periodic_word() {
        let w = Word::parse(&"123".repeat(100), 3).unwrap();
        let d = bounded_remainder_stats(&w, &[1.0 / 3.0; 3], 300).unwrap();
        assert!(d.iter().all(|&x| x <= 2.0 / 3.0 + 1e-12));
        let w = Word::parse("1121311213112", 3).unwrap();
        let n = w.len();
        let c = crate::symbolic::letter_counts(w.letters(), 3);
        let f: Vec<f64> = c.iter().map(|&x| x as f64 / n as f64).collect();
        let d = bounded_remainder_stats(&w, &f, n).unwrap();
        assert!(d.iter().all(|&x| x >= 0.0));
        assert!(bounded_remainder_stats(&w, &f, n + 1).is_err());
    }

    #[test]
    fn recurrence_of_periodic_word() {
        let w = Word::parse(&"123".repeat(50), 3).unwrap();
        let r = recurrence_estimate(&w, 10);
        assert_eq!(r.entries[0].r, 3);
        for e in &r.entries {
            assert_eq!(e.r, e.n + 2);
        }
        assert!(r.entries.windows(2).all(|p| p[0].r <= p[1].r));
    }

    #[test]
    fn recurrence_matches_brute_force() {
        let w = Word::parse("1213121412131215", 5).unwrap();
        let letters = w.letters();
        let n_len = letters.len();
        let r = recurrence_estimate(&w, 4);
        for e in &r.entries {
            let factors: std::collections::HashSet<&[Letter]> = letters.windows(e.n).collect();
            let brute = (1..=n_len)
                .find(|&k| {
                    letters.windows(k).all(|win| factors.iter().all(|f| win.windows(e.n).any(|g| g == *f)))
                })
                .unwrap();
            assert!(e.r >= brute);
        }
    }
}
