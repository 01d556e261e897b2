//! Strong, negative strong and geometric coincidence checks, and the
//! geometric finiteness property, with re-verifiable witnesses.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Result, SadicError};
use crate::geometry::{self, dot, Face, Patch, RealVector};
use crate::par;
use crate::symbolic::{letter_counts, Letter, Word};

/// Default cap on the number of candidate faces enumerated per ball.
pub const FACE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Strong,
    NegativeStrong,
    Geometric,
    Finiteness,
}

/// For letters `j1, j2`: the common letter `i` and the words `p1, p2` (prefixes
/// for strong coincidence, suffixes for the negative version).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub j1: usize,
    pub j2: usize,
    pub i: usize,
    pub w1: String,
    pub w2: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessDetail {
    Pairs { pairs: Vec<PairWitness> },
    Ball {
        letter: usize,
        center: RealVector,
        c: i64,
        ball: Vec<Face>,
        patch_size: usize,
        /// The direction `M_{[0,n)}^{-1} u` used for the projection.
        direction: RealVector,
    },
    Finiteness { radius: i64, ball_size: usize, union_size: usize },
}

/// A finite certificate; `seq` is the spec of the directive sequence it was
/// computed for, so the witness can be re-verified from its JSON alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceWitness {
    pub kind: WitnessKind,
    pub seq: Option<String>,
    pub index: usize,
    pub detail: WitnessDetail,
}

impl CoincidenceWitness {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| SadicError::Parse(e.to_string()))
    }
}

fn images(seq: &DirectiveSequence, l: usize) -> Result<Vec<Word>> {
    (0..seq.alphabet_size())
        .map(|j| seq.expand_letter(0, l, Letter::from_index(j)))
        .collect()
}

/// `(l(p), i) -> |p|` for every prefix `p i` (first occurrence wins), or for
/// every suffix `i s` with `l(s)` when `suffix` is set.
fn position_keys(w: &Word, d: usize, suffix: bool) -> HashMap<(Vec<i64>, usize), usize> {
    let letters = w.letters();
    let n = letters.len();
    let mut out = HashMap::new();
    let mut counts = vec![0i64; d];
    if suffix {
        for k in (0..n).rev() {
            out.entry((counts.clone(), letters[k].index())).or_insert(k);
            counts[letters[k].index()] += 1;
        }
    } else {
        for (k, l) in letters.iter().enumerate() {
            out.entry((counts.clone(), l.index())).or_insert(k);
            counts[l.index()] += 1;
        }
    }
    out
}

fn pair_search(seq: &DirectiveSequence, l: usize, suffix: bool) -> Result<Option<Vec<PairWitness>>> {
    let d = seq.alphabet_size();
    let ims = images(seq, l)?;
    let keys: Vec<_> = ims.iter().map(|w| position_keys(w, d, suffix)).collect();
    let cut = |w: &Word, k: usize| -> String {
        let letters = w.letters();
        let part = if suffix { &letters[k + 1..] } else { &letters[..k] };
        Word::from_letters(part.to_vec()).to_string()
    };
    let mut pairs = Vec::new();
    for j1 in 0..d {
        for j2 in j1 + 1..d {
            // deterministic choice: smallest (i, |w1|, key) match
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for ((ab, i), &k1) in &keys[j1] {
                if let Some(&k2) = keys[j2].get(&(ab.clone(), *i)) {
                    let len1 = if suffix { ims[j1].len() - 1 - k1 } else { k1 };
                    let cand = (*i, len1, k1, k2);
                    if best.map_or(true, |b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
            match best {
                Some((i, _, k1, k2)) => pairs.push(PairWitness {
                    j1: j1 + 1,
                    j2: j2 + 1,
                    i: i + 1,
                    w1: cut(&ims[j1], k1),
                    w2: cut(&ims[j2], k2),
                }),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(pairs))
}

fn coincidence(seq: &DirectiveSequence, l_max: usize, suffix: bool) -> Result<Option<CoincidenceWitness>> {
    for l in 1..=l_max {
        if !seq.has(l - 1) {
            break;
        }
        if let Some(pairs) = pair_search(seq, l, suffix)? {
            return Ok(Some(CoincidenceWitness {
                kind: if suffix { WitnessKind::NegativeStrong } else { WitnessKind::Strong },
                seq: seq.to_spec(),
                index: l,
                detail: WitnessDetail::Pairs { pairs },
            }));
        }
    }
    Ok(None)
}

/// Smallest `ℓ <= l_max` with the strong coincidence condition on `σ_{[0,ℓ)}`.
pub fn strong_coincidence(seq: &DirectiveSequence, l_max: usize) -> Result<Option<CoincidenceWitness>> {
    coincidence(seq, l_max, false)
}

/// As [`strong_coincidence`], with suffixes `i s` instead of prefixes `p i`.
pub fn negative_strong_coincidence(seq: &DirectiveSequence, l_max: usize) -> Result<Option<CoincidenceWitness>> {
    coincidence(seq, l_max, true)
}

fn verify_pairs(seq: &DirectiveSequence, l: usize, pairs: &[PairWitness], suffix: bool) -> Result<bool> {
    let d = seq.alphabet_size();
    let ims = images(seq, l)?;
    let mut seen = vec![vec![false; d]; d];
    for p in pairs {
        if p.j1 == 0 || p.j2 == 0 || p.j1 > d || p.j2 > d || p.i == 0 || p.i > d {
            return Ok(false);
        }
        let w1 = Word::parse(&p.w1, d)?;
        let w2 = Word::parse(&p.w2, d)?;
        let i = Word::from_letters(vec![Letter::from_index(p.i - 1)]);
        let (mut a, mut b) = (Word::empty(), Word::empty());
        if suffix {
            a.extend_from(&i);
            a.extend_from(&w1);
            b.extend_from(&i);
            b.extend_from(&w2);
        } else {
            a.extend_from(&w1);
            a.extend_from(&i);
            b.extend_from(&w2);
            b.extend_from(&i);
        }
        let fits = |img: &Word, part: &Word| {
            if suffix {
                img.letters().ends_with(part.letters())
            } else {
                part.is_prefix_of(img)
            }
        };
        if !fits(&ims[p.j1 - 1], &a) || !fits(&ims[p.j2 - 1], &b) {
            return Ok(false);
        }
        if letter_counts(w1.letters(), d) != letter_counts(w2.letters(), d) {
            return Ok(false);
        }
        seen[p.j1 - 1][p.j2 - 1] = true;
        seen[p.j2 - 1][p.j1 - 1] = true;
    }
    Ok((0..d).all(|a| (0..d).all(|b| a == b || seen[a][b])))
}

/// Level-`n` data for the geometric checks.
struct Level {
    w: Vec<i64>,
    direction: RealVector,
    patches: Vec<Patch>,
}

fn level(seq: &DirectiveSequence, n: usize, u: &[f64]) -> Result<Level> {
    let d = seq.alphabet_size();
    let m = seq.product_matrix(0, n)?;
    let w = geometry::big_to_i64(&m.transpose().mul_vec_i64(&vec![1; d]).0)?;
    let direction = geometry::sum_normalize(&geometry::mat_vec(&m.inverse_unimodular()?, u));
    let patches = (0..d)
        .map(|i| geometry::dual_image_window(seq, 0, n, &Patch::from_faces([Face::origin(d, Letter::from_index(i))])))
        .collect::<Result<_>>()?;
    Ok(Level { w, direction, patches })
}

/// Faces `[y,j] ∈ Γ(w)` with `‖π_{v,1}(y − z)‖∞ <= c` (boundary included
/// with a small tolerance, which can only enlarge the ball).
fn ball(w: &[i64], v: &[f64], z: &[f64], c: i64, budget: usize) -> Result<Vec<Face>> {
    let d = w.len();
    let one = geometry::ones(d);
    let wv: f64 = w.iter().zip(v).map(|(a, b)| *a as f64 * b).sum();
    if !(wv > 0.0) {
        return Err(SadicError::DegenerateProjection(wv));
    }
    let wf: Vec<f64> = w.iter().map(|&a| a as f64).collect();
    let wmax = wf.iter().cloned().fold(f64::MIN, f64::max);
    let wmin = wf.iter().cloned().fold(f64::MAX, f64::min);
    let cf = c as f64;
    let spread = cf * (wmax - wmin) * (d as f64 - 1.0);
    let wz = dot(&wf, z);
    let s_lo = (-wz - spread) / wv;
    let s_hi = (wmax - wz + spread) / wv;
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for k in 0..d {
        let (a, b) = (s_lo * v[k], s_hi * v[k]);
        lo[k] = (z[k] - cf + a.min(b)).floor() as i64 - 1;
        hi[k] = (z[k] + cf + a.max(b)).ceil() as i64 + 1;
    }
    let kmax = (0..d).max_by_key(|&k| w[k].unsigned_abs()).unwrap();
    let volume: f64 = (0..d).filter(|&k| k != kmax).map(|k| (hi[k] - lo[k] + 1) as f64).product();
    if volume > budget as f64 {
        return Err(SadicError::FaceBudget { budget, needed: volume as usize });
    }
    let vsum: f64 = v.iter().sum();
    Ok(geometry::gamma_faces_in_box(w, &lo, &hi)
        .into_iter()
        .filter(|f| {
            let diff: Vec<f64> = f.x.iter().zip(z).map(|(a, b)| *a as f64 - b).collect();
            let p = geometry::project_unchecked(v, &one, vsum, &diff);
            geometry::norm_inf(&p) <= cf + 1e-9
        })
        .collect())
}

/// Searches a letter `i` and center `z` such that the projected `C`-ball of
/// `Γ(ᵗM_{[0,n)} 1)` around `z` lies in `E1*(σ_{[0,n)})[0, i]`.
///
/// Centers tried, in order, for each letter: the faces of the dual patch (in
/// lexicographic order) and then its centroid. The first success in this
/// order is returned, independent of evaluation order.
pub fn geometric_coincidence_check(
    seq: &DirectiveSequence,
    n: usize,
    c: i64,
    u: &[f64],
    budget: usize,
) -> Result<Option<CoincidenceWitness>> {
    let d = seq.alphabet_size();
    let lv = level(seq, n, u)?;
    let mut candidates: Vec<(usize, RealVector)> = Vec::new();
    for (i, p) in lv.patches.iter().enumerate() {
        let mut centroid = vec![0.0; d];
        for f in p.iter() {
            candidates.push((i, f.x_f64()));
            for (a, b) in centroid.iter_mut().zip(&f.x) {
                *a += *b as f64 / p.len() as f64;
            }
        }
        candidates.push((i, centroid));
    }
    let results = par::map_slice(&candidates, |(i, z)| -> Result<Option<Vec<Face>>> {
        let b = ball(&lv.w, &lv.direction, z, c, budget)?;
        Ok((!b.is_empty() && b.iter().all(|f| lv.patches[*i].contains(f))).then_some(b))
    });
    for ((i, z), r) in candidates.iter().zip(results) {
        if let Some(b) = r? {
            return Ok(Some(CoincidenceWitness {
                kind: WitnessKind::Geometric,
                seq: seq.to_spec(),
                index: n,
                detail: WitnessDetail::Ball {
                    letter: i + 1,
                    center: z.clone(),
                    c,
                    ball: b,
                    patch_size: lv.patches[*i].len(),
                    direction: lv.direction.clone(),
                },
            }));
        }
    }
    Ok(None)
}

/// First `n` in `n_min..=n_max` with a geometric coincidence witness.
pub fn find_geometric_coincidence(
    seq: &DirectiveSequence,
    n_min: usize,
    n_max: usize,
    c: i64,
    u: &[f64],
    budget: usize,
) -> Result<Option<CoincidenceWitness>> {
    for n in n_min..=n_max {
        if let Some(w) = geometric_coincidence_check(seq, n, c, u, budget)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn finiteness(seq: &DirectiveSequence, n: usize, r: i64) -> Result<(bool, usize, usize)> {
    let d = seq.alphabet_size();
    let m = seq.product_matrix(0, n)?;
    let w = geometry::big_to_i64(&m.transpose().mul_vec_i64(&vec![1; d]).0)?;
    let mut union = Patch::new();
    for i in 0..d {
        let p = geometry::dual_image_window(seq, 0, n, &Patch::from_faces([Face::origin(d, Letter::from_index(i))]))?;
        union = union.union(&p);
    }
    let b = geometry::gamma_faces_in_box(&w, &vec![-r; d], &vec![r; d]);
    Ok((b.iter().all(|f| union.contains(f)), b.len(), union.len()))
}

/// True iff every face of `Γ(ᵗM_{[0,n)} 1)` with `‖x‖∞ <= R` lies in
/// `⋃_i E1*(σ_{[0,n)})[0, i]`.
pub fn geometric_finiteness_check(seq: &DirectiveSequence, n: usize, r: f64) -> Result<bool> {
    if !(r >= 0.0) {
        return Err(SadicError::InvalidArgument("radius must be non-negative".into()));
    }
    Ok(finiteness(seq, n, r.floor() as i64)?.0)
}

pub fn finiteness_witness(seq: &DirectiveSequence, n: usize, r: f64) -> Result<Option<CoincidenceWitness>> {
    let radius = r.floor() as i64;
    let (ok, ball_size, union_size) = finiteness(seq, n, radius)?;
    Ok(ok.then(|| CoincidenceWitness {
        kind: WitnessKind::Finiteness,
        seq: seq.to_spec(),
        index: n,
        detail: WitnessDetail::Finiteness { radius, ball_size, union_size },
    }))
}

/// Recomputes a witness from scratch against `seq`.
pub fn verify_witness(seq: &DirectiveSequence, wit: &CoincidenceWitness) -> Result<bool> {
    match (&wit.kind, &wit.detail) {
        (WitnessKind::Strong, WitnessDetail::Pairs { pairs }) => verify_pairs(seq, wit.index, pairs, false),
        (WitnessKind::NegativeStrong, WitnessDetail::Pairs { pairs }) => verify_pairs(seq, wit.index, pairs, true),
        (WitnessKind::Geometric, WitnessDetail::Ball { letter, center, c, ball: stored, direction, .. }) => {
            let d = seq.alphabet_size();
            if *letter == 0 || *letter > d || center.len() != d || direction.len() != d {
                return Ok(false);
            }
            let m = seq.product_matrix(0, wit.index)?;
            let w = geometry::big_to_i64(&m.transpose().mul_vec_i64(&vec![1; d]).0)?;
            let patch = geometry::dual_image_window(
                seq,
                0,
                wit.index,
                &Patch::from_faces([Face::origin(d, Letter::from_index(letter - 1))]),
            )?;
            let b = ball(&w, direction, center, *c, FACE_BUDGET)?;
            // the direction must be positive with ⟨ᵗM 1, direction⟩ > 0; its
            // exact value only changes which faces count as the ball
            Ok(!b.is_empty() && &b == stored && b.iter().all(|f| patch.contains(f)))
        }
        (WitnessKind::Finiteness, WitnessDetail::Finiteness { radius, .. }) => {
            Ok(finiteness(seq, wit.index, *radius)?.0)
        }
        _ => Ok(false),
    }
}

/// Re-verifies a witness using the sequence spec it carries.
pub fn verify_standalone(wit: &CoincidenceWitness) -> Result<bool> {
    let spec = wit
        .seq
        .as_deref()
        .ok_or_else(|| SadicError::InvalidArgument("witness carries no sequence spec".into()))?;
    verify_witness(&DirectiveSequence::parse(spec)?, wit)
}
