//! Rauzy fractals as labeled point clouds, Hausdorff distances, covering
//! histograms for the translate collection and Rauzy boxes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Result, SadicError};
use crate::geometry::{self, dot, norm_inf, Patch, RealVector};
use crate::grid::{GridIndex, P3};
use crate::par;
use crate::symbolic::{Letter, Word};

/// Projection frame of a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudFrame {
    pub u: RealVector,
    pub w: RealVector,
    pub depth: usize,
}

/// Points of `w⊥` labeled by letters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledCloud {
    pub points: Vec<P3>,
    pub labels: Vec<Letter>,
    pub frame: CloudFrame,
}

fn check_dim(v: &[f64]) -> Result<()> {
    if v.len() != 3 {
        return Err(SadicError::UnsupportedDimension { expected: 3, got: v.len() });
    }
    Ok(())
}

impl LabeledCloud {
    pub fn empty(frame: CloudFrame) -> Self {
        LabeledCloud { points: Vec::new(), labels: Vec::new(), frame }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: P3, l: Letter) {
        self.points.push(p);
        self.labels.push(l);
    }

    /// Largest maximum-norm of a point.
    pub fn radius(&self) -> f64 {
        self.points.iter().map(|p| norm_inf(p)).fold(0.0, f64::max)
    }

    /// Largest Euclidean norm of a point.
    pub fn radius_l2(&self) -> f64 {
        self.points.iter().map(|p| dot(p, p).sqrt()).fold(0.0, f64::max)
    }

    /// CSV rows `p1,p2,p3,label`.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 64);
        for (p, l) in self.points.iter().zip(&self.labels) {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e},{}", p[0], p[1], p[2], l);
        }
        s
    }

    pub fn from_csv(text: &str, frame: CloudFrame) -> Result<Self> {
        let mut c = LabeledCloud::empty(frame);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(SadicError::Parse(format!("expected 4 fields in {line:?}")));
            }
            let num = |t: &str| t.trim().parse::<f64>().map_err(|e| SadicError::Parse(format!("{t:?}: {e}")));
            let l: usize = f[3].trim().parse().map_err(|_| SadicError::Parse(format!("bad label in {line:?}")))?;
            c.push([num(f[0])?, num(f[1])?, num(f[2])?], Letter::new(l, 3)?);
        }
        Ok(c)
    }
}

/// Cloud of `(π_{u,w} l(p), a)` over the prefixes `p a` of `word` with
/// `|p|` in `range`.
pub fn cloud_from_word(word: &Word, range: Range<usize>, u: &[f64], w: &[f64], depth: usize) -> Result<LabeledCloud> {
    check_dim(u)?;
    check_dim(w)?;
    geometry::project(u, w, u)?;
    let wu = dot(w, u);
    let letters = word.letters();
    let end = range.end.min(letters.len());
    let mut counts = [0i64; 3];
    for l in &letters[..range.start.min(end)] {
        counts[l.index()] += 1;
    }
    let mut cloud = LabeledCloud::empty(CloudFrame { u: u.to_vec(), w: w.to_vec(), depth });
    cloud.points.reserve(end.saturating_sub(range.start));
    for l in &letters[range.start.min(end)..end] {
        let x = [counts[0] as f64, counts[1] as f64, counts[2] as f64];
        let t = dot(w, &x) / wu;
        cloud.push([x[0] - t * u[0], x[1] - t * u[1], x[2] - t * u[2]], *l);
        counts[l.index()] += 1;
    }
    Ok(cloud)
}

/// Rauzy fractal cloud from a limit-word prefix of length at least `min_len`.
pub fn rauzy_cloud(seq: &DirectiveSequence, depth: usize, min_len: usize, u: &[f64], w: &[f64]) -> Result<LabeledCloud> {
    if seq.alphabet_size() != 3 {
        return Err(SadicError::UnsupportedDimension { expected: 3, got: seq.alphabet_size() });
    }
    let word = seq.limit_word_prefix(depth, min_len)?;
    cloud_from_word(&word, 0..word.len(), u, w, depth)
}

pub fn subtile(cloud: &LabeledCloud, i: Letter) -> LabeledCloud {
    let mut out = LabeledCloud::empty(cloud.frame.clone());
    for (p, l) in cloud.points.iter().zip(&cloud.labels) {
        if *l == i {
            out.push(*p, *l);
        }
    }
    out
}

/// Points of each subtile, indexed by letter.
pub fn subtile_points(cloud: &LabeledCloud) -> [Vec<P3>; 3] {
    let mut out: [Vec<P3>; 3] = Default::default();
    for (p, l) in cloud.points.iter().zip(&cloud.labels) {
        out[l.index()].push(*p);
    }
    out
}

/// Directed Hausdorff distance `sup_{a} inf_{b} ‖a − b‖∞`.
pub fn directed_hausdorff(a: &[P3], b: &GridIndex) -> f64 {
    par::map_slice(a, |p| b.nearest(p).unwrap_or(f64::INFINITY))
        .into_iter()
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance in the maximum norm; labels are ignored.
pub fn hausdorff(a: &LabeledCloud, b: &LabeledCloud) -> Result<f64> {
    hausdorff_points(&a.points, &b.points)
}

pub fn hausdorff_points(a: &[P3], b: &[P3]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(SadicError::Empty("Hausdorff distance of an empty cloud"));
    }
    let ia = GridIndex::auto(a.to_vec());
    let ib = GridIndex::auto(b.to_vec());
    Ok(directed_hausdorff(a, &ib).max(directed_hausdorff(b, &ia)))
}

/// Reconstruction of the level-0 subtile `R(i)` from the set equation with
/// `k = 0`, using the level-`ℓ` subtile clouds of the shifted sequence.
pub fn set_equation_cloud(
    seq: &DirectiveSequence,
    l: usize,
    i: Letter,
    depth: usize,
    min_len: usize,
    u: &[f64],
) -> Result<LabeledCloud> {
    let one = geometry::ones(3);
    let m = seq.product_matrix(0, l)?;
    let frame = geometry::LevelFrame::new(&m, u, &one)?;
    let shifted = seq.shift(l);
    let inner = rauzy_cloud(&shifted, depth, min_len, &frame.u, &frame.w)?;
    let parts = subtile_points(&inner);
    let pieces = geometry::set_equation_decompose(seq, 0, l, &crate::geometry::Face::origin(3, i), u, &one)?;
    let rows = m.to_f64_rows();
    let apply = |p: &P3| -> P3 {
        [dot(&rows[0], p), dot(&rows[1], p), dot(&rows[2], p)]
    };
    let mut out = LabeledCloud::empty(CloudFrame { u: u.to_vec(), w: one.clone(), depth });
    for piece in pieces {
        for p in &parts[piece.face.i.index()] {
            let q = apply(p);
            out.push([q[0] + piece.offset[0], q[1] + piece.offset[1], q[2] + piece.offset[2]], i);
        }
    }
    Ok(out)
}

/// Histogram of covering multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverHistogram {
    pub counts: BTreeMap<usize, usize>,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
}

impl CoverHistogram {
    pub fn fraction(&self, m: usize) -> f64 {
        *self.counts.get(&m).unwrap_or(&0) as f64 / self.samples.max(1) as f64
    }

    pub fn mode(&self) -> Option<usize> {
        self.counts.iter().max_by_key(|(m, c)| (**c, std::cmp::Reverse(**m))).map(|(m, _)| *m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("histogram serializes")
    }
}

/// Orthonormal basis of `1⊥` used for sampling and rendering.
pub fn plane_basis() -> (P3, P3) {
    let a = 1.0 / 2f64.sqrt();
    let b = 1.0 / 6f64.sqrt();
    ([a, -a, 0.0], [b, b, -2.0 * b])
}

/// Sampling disc inside the footprint of a translate patch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingDisc {
    pub center: P3,
    pub radius: f64,
}

/// Largest disc around the translate centroid such that every lattice
/// translate able to reach a sample (within the cloud radius plus `ε`) is
/// part of the patch with all letters.
pub fn sampling_disc(translates: &Patch, cloud_radius_l2: f64, eps: f64) -> Result<SamplingDisc> {
    if translates.is_empty() {
        return Err(SadicError::Empty("translate patch"));
    }
    let mut full: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for f in translates.iter() {
        if f.x.len() != 3 || f.x.iter().sum::<i64>() != 0 {
            return Err(SadicError::InvalidArgument("translates must be faces of Γ(1)".into()));
        }
        *full.entry(f.x.clone()).or_default() += 1;
    }
    let n = full.len() as f64;
    let mut center = [0.0; 3];
    for x in full.keys() {
        for a in 0..3 {
            center[a] += x[a] as f64 / n;
        }
    }
    let extent = full.keys().flat_map(|x| x.iter().map(|c| c.abs())).max().unwrap() + 2;
    let mut nearest_missing = f64::INFINITY;
    for a in -extent..=extent {
        for b in -extent..=extent {
            let x = vec![a, b, -a - b];
            if full.get(&x).copied().unwrap_or(0) < 3 {
                let dv = [x[0] as f64 - center[0], x[1] as f64 - center[1], x[2] as f64 - center[2]];
                nearest_missing = nearest_missing.min(dot(&dv, &dv).sqrt());
            }
        }
    }
    let radius = nearest_missing - cloud_radius_l2 - eps * 3f64.sqrt();
    if radius <= 0.0 {
        return Err(SadicError::RegionTooSmall(format!(
            "nearest missing translate at {nearest_missing:.3}, cloud radius {cloud_radius_l2:.3}"
        )));
    }
    Ok(SamplingDisc { center, radius })
}

/// Uniform samples from a disc of `1⊥`.
pub fn sample_disc(disc: &SamplingDisc, n: usize, seed: u64) -> Vec<P3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (e1, e2) = plane_basis();
    (0..n)
        .map(|_| {
            let r = disc.radius * rng.gen::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.gen::<f64>();
            let (a, b) = (r * t.cos(), r * t.sin());
            [
                disc.center[0] + a * e1[0] + b * e2[0],
                disc.center[1] + a * e1[1] + b * e2[1],
                disc.center[2] + a * e1[2] + b * e2[2],
            ]
        })
        .collect()
}

/// Per-letter indexes of a cloud for ε-membership queries.
pub struct SubtileIndex {
    pub eps: f64,
    pub index: Vec<GridIndex>,
    pub radius: Vec<f64>,
}

impl SubtileIndex {
    pub fn new(cloud: &LabeledCloud, eps: f64) -> Self {
        let parts = subtile_points(cloud);
        let cell = if eps > 0.0 { eps } else { 0.01 };
        let radius = parts.iter().map(|p| p.iter().map(|q| norm_inf(q)).fold(0.0, f64::max)).collect();
        let index = parts.into_iter().map(|p| GridIndex::new(p, cell)).collect();
        SubtileIndex { eps, index, radius }
    }

    /// Letters whose subtile translated by `x` ε-contains `p`.
    pub fn contains(&self, i: usize, p: &P3, x: &[f64; 3]) -> bool {
        let q = [p[0] - x[0], p[1] - x[1], p[2] - x[2]];
        norm_inf(&q) <= self.radius[i] + self.eps && self.index[i].any_within(&q, self.eps)
    }
}

/// Multiplicity histogram of the collection `{x + R(i) : [x,i] ∈ translates}`
/// sampled uniformly in the inscribed sampling disc.
pub fn covering_histogram(
    cloud: &LabeledCloud,
    translates: &Patch,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<CoverHistogram> {
    if cloud.is_empty() {
        return Err(SadicError::Empty("cloud"));
    }
    let disc = sampling_disc(translates, cloud.radius_l2(), eps)?;
    let pts = sample_disc(&disc, samples, seed);
    let idx = SubtileIndex::new(cloud, eps);
    let tiles: Vec<([f64; 3], usize)> = translates
        .iter()
        .map(|f| ([f.x[0] as f64, f.x[1] as f64, f.x[2] as f64], f.i.index()))
        .collect();
    let mult = par::map_slice(&pts, |p| tiles.iter().filter(|(x, i)| idx.contains(*i, p, x)).count());
    Ok(histogram(mult, eps, samples, seed))
}

fn histogram(mult: Vec<usize>, eps: f64, samples: usize, seed: u64) -> CoverHistogram {
    let mut counts = BTreeMap::new();
    for m in mult {
        *counts.entry(m).or_insert(0) += 1;
    }
    CoverHistogram { counts, epsilon: eps, samples, seed }
}

/// Translates `[x, i]` of `Γ(1)` with `‖x‖∞ <= radius`.
pub fn lattice_translates(radius: i64) -> Patch {
    geometry::hyperplane_patch(&geometry::ones(3), radius)
}

/// Rauzy box points `t (e_i − π e_i) − y` for cloud points `(y, i)` and
/// `t = 0, 1/slices, ..., (slices−1)/slices`.
pub fn rauzy_box_cloud(cloud: &LabeledCloud, slices: usize) -> Result<LabeledCloud> {
    let u = &cloud.frame.u;
    let w = &cloud.frame.w;
    let dirs: Vec<RealVector> = (0..3)
        .map(|i| {
            let e = geometry::unit(3, i);
            geometry::project(u, w, &e).map(|pe| geometry::sub(&e, &pe))
        })
        .collect::<Result<_>>()?;
    let mut out = LabeledCloud::empty(cloud.frame.clone());
    out.points.reserve(cloud.len() * slices);
    for s in 0..slices {
        let t = s as f64 / slices as f64;
        for (y, l) in cloud.points.iter().zip(&cloud.labels) {
            let v = &dirs[l.index()];
            out.push([t * v[0] - y[0], t * v[1] - y[1], t * v[2] - y[2]], *l);
        }
    }
    Ok(out)
}

/// Multiplicity histogram of the box collection `{z + box(i) : z ∈ Z³}` at
/// uniform samples of the unit cube, for a cloud in the frame `w = 1`.
///
/// `s` lies in `z + box(i)` iff `t = Σ(s − z) ∈ [0,1)` and
/// `−π_{u,1}(s − z)` is ε-close to `R(i)`.
pub fn box_covering_histogram(cloud: &LabeledCloud, eps: f64, samples: usize, seed: u64) -> Result<CoverHistogram> {
    if cloud.is_empty() {
        return Err(SadicError::Empty("cloud"));
    }
    let u = geometry::sum_normalize(&cloud.frame.u);
    let su = 1.0;
    let one = geometry::ones(3);
    let idx = SubtileIndex::new(cloud, eps);
    let reach = (cloud.radius() + eps + norm_inf(&u) / su + 1.0).ceil() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<P3> = (0..samples).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
    let mult = par::map_slice(&pts, |s| {
        let mut m = 0;
        for a in -reach..=reach {
            for b in -reach..=reach {
                // t = Σs − Σz must lie in [0, 1): Σz = floor(Σs)
                let c = (s[0] + s[1] + s[2]).floor() as i64 - a - b;
                let d = [s[0] - a as f64, s[1] - b as f64, s[2] - c as f64];
                let t = (d[0] + d[1] + d[2]) / su;
                if !(0.0..1.0).contains(&t) {
                    continue;
                }
                let y = geometry::project_unchecked(&u, &one, su, &d);
                let q = [-y[0], -y[1], -y[2]];
                for i in 0..3 {
                    if idx.contains(i, &q, &[0.0; 3]) {
                        m += 1;
                    }
                }
            }
        }
        m
    });
    Ok(histogram(mult, eps, samples, seed))
}
