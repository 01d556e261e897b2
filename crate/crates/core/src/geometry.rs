//! Eigenvector approximations, projections, discrete hyperplanes, the dual
//! substitution `E1*` and the set equation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Result, SadicError};
use crate::matrix::IntMatrix;
use crate::symbolic::{letter_counts, Letter, Substitution};

pub type RealVector = Vec<f64>;

const PROJ_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> RealVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> RealVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> RealVector {
    a.iter().map(|x| x * s).collect()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sum_normalize(a: &[f64]) -> RealVector {
    let s: f64 = a.iter().sum();
    scale(a, 1.0 / s)
}

pub fn ones(d: usize) -> RealVector {
    vec![1.0; d]
}

pub fn unit(d: usize, i: usize) -> RealVector {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

/// `M v` in floating point.
pub fn mat_vec(m: &IntMatrix, v: &[f64]) -> RealVector {
    let rows = m.to_f64_rows();
    rows.iter().map(|r| dot(r, v)).collect()
}

/// `ᵗM v` in floating point.
pub fn mat_t_vec(m: &IntMatrix, v: &[f64]) -> RealVector {
    mat_vec(&m.transpose(), v)
}

/// Angle between two nonzero vectors.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt());
    c.clamp(-1.0, 1.0).acos()
}

/// Projection along `u` onto `w⊥`: `x − (⟨w,x⟩/⟨w,u⟩) u`.
pub fn project(u: &[f64], w: &[f64], x: &[f64]) -> Result<RealVector> {
    let wu = dot(w, u);
    if wu.abs() <= PROJ_TOL * norm_inf(w) * norm_inf(u) || wu == 0.0 {
        return Err(SadicError::DegenerateProjection(wu));
    }
    Ok(project_unchecked(u, w, wu, x))
}

/// Projection with a precomputed, nonzero `⟨w,u⟩`.
#[inline]
pub fn project_unchecked(u: &[f64], w: &[f64], wu: f64, x: &[f64]) -> RealVector {
    let t = dot(w, x) / wu;
    x.iter().zip(u).map(|(a, b)| a - t * b).collect()
}

/// Finite-depth approximation of the generalized right eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenApprox {
    pub u: RealVector,
    pub depth: usize,
    /// True if `M_{[0,n)}` has a strictly positive column.
    pub positive_column: bool,
    /// Max angle between the normalized columns; a convergence diagnostic.
    pub spread: f64,
}

/// Sum-normalized average of the sum-normalized columns of `M_{[0,n)}`,
/// computed in floating point with per-step renormalization.
pub fn right_eigenvector_approx(seq: &DirectiveSequence, n: usize) -> Result<EigenApprox> {
    let d = seq.alphabet_size();
    let mut cols: Vec<RealVector> = (0..d).map(|j| unit(d, j)).collect();
    for k in (0..n).rev() {
        let m = seq.get(k)?.incidence();
        for c in cols.iter_mut() {
            *c = sum_normalize(&mat_vec(&m, c));
        }
    }
    let positive_column = cols.iter().any(|c| c.iter().all(|x| *x > 0.0));
    let mut avg = vec![0.0; d];
    for c in &cols {
        for (a, x) in avg.iter_mut().zip(c) {
            *a += x;
        }
    }
    let u = sum_normalize(&avg);
    let mut spread: f64 = 0.0;
    for a in &cols {
        for b in &cols {
            spread = spread.max(angle(a, b));
        }
    }
    Ok(EigenApprox { u, depth: n, positive_column, spread })
}

/// Sum-normalized `ᵗ(M_{[0,n)}) 1`.
pub fn recurrent_left_vector_approx(seq: &DirectiveSequence, n: usize) -> Result<RealVector> {
    let d = seq.alphabet_size();
    let mut v = sum_normalize(&ones(d));
    for k in 0..n {
        let m = seq.get(k)?.incidence();
        v = sum_normalize(&mat_t_vec(&m, &v));
    }
    Ok(v)
}

/// Relative residual of `u` as an eigenvector of `m`: returns
/// `(λ, ‖M u − λ u‖∞ / (λ ‖u‖∞))` with `λ = Σ(Mu) / Σu`.
pub fn eigen_residual(m: &IntMatrix, u: &[f64]) -> (f64, f64) {
    let mu = mat_vec(m, u);
    let lambda = mu.iter().sum::<f64>() / u.iter().sum::<f64>();
    let r = norm_inf(&sub(&mu, &scale(u, lambda)));
    (lambda, r / (lambda.abs() * norm_inf(u)))
}

/// A face `[x, i]` of a discrete hyperplane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub x: Vec<i64>,
    pub i: Letter,
}

impl Face {
    pub fn new(x: Vec<i64>, i: Letter) -> Self {
        Face { x, i }
    }

    pub fn origin(d: usize, i: Letter) -> Self {
        Face { x: vec![0; d], i }
    }

    pub fn x_f64(&self) -> RealVector {
        self.x.iter().map(|&c| c as f64).collect()
    }
}

/// Finite set of faces in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub faces: BTreeSet<Face>,
}

impl Patch {
    pub fn new() -> Self {
        Patch::default()
    }

    pub fn from_faces<I: IntoIterator<Item = Face>>(faces: I) -> Self {
        Patch { faces: faces.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.faces.contains(f)
    }

    pub fn insert(&mut self, f: Face) -> bool {
        self.faces.insert(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter()
    }

    pub fn union(&self, other: &Patch) -> Patch {
        Patch { faces: self.faces.union(&other.faces).cloned().collect() }
    }

    pub fn is_subset(&self, other: &Patch) -> bool {
        self.faces.is_subset(&other.faces)
    }

    /// CSV rows `x1,...,xd,i`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for f in &self.faces {
            for c in &f.x {
                let _ = write!(s, "{c},");
            }
            let _ = writeln!(s, "{}", f.i);
        }
        s
    }

    pub fn from_csv(text: &str, d: usize) -> Result<Self> {
        let mut p = Patch::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != d + 1 {
                return Err(SadicError::Parse(format!("expected {} fields in {line:?}", d + 1)));
            }
            let nums: Vec<i64> = parts
                .iter()
                .map(|t| t.parse::<i64>().map_err(|e| SadicError::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<_>>()?;
            let i = Letter::new(nums[d] as usize, d)?;
            p.insert(Face::new(nums[..d].to_vec(), i));
        }
        Ok(p)
    }
}

impl FromIterator<Face> for Patch {
    fn from_iter<I: IntoIterator<Item = Face>>(iter: I) -> Self {
        Patch::from_faces(iter)
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Membership `0 <= ⟨w,x⟩ < w_i`, decided exactly (every finite float is a
/// dyadic rational); a float fast path handles points far from the boundary.
pub fn in_gamma(w: &[f64], f: &Face) -> bool {
    let s: f64 = w.iter().zip(&f.x).map(|(a, &b)| a * b as f64).sum();
    let wi = w[f.i.index()];
    let margin = 1e-9 * (1.0 + norm_inf(w) * f.x.iter().map(|c| c.unsigned_abs() as f64).sum::<f64>());
    if s > margin && s < wi - margin {
        return true;
    }
    if s < -margin || s > wi + margin {
        return false;
    }
    let s: BigRational = w.iter().zip(&f.x).map(|(a, &b)| rational(*a) * BigRational::from_integer(b.into())).sum();
    s >= BigRational::zero() && s < rational(wi)
}

/// Exact membership for integer `w`.
pub fn in_gamma_int(w: &[i64], f: &Face) -> bool {
    let s: i128 = w.iter().zip(&f.x).map(|(&a, &b)| a as i128 * b as i128).sum();
    s >= 0 && s < w[f.i.index()] as i128
}

/// Faces of `Γ(w)` with `‖x‖∞ <= radius`.
pub fn hyperplane_patch(w: &[f64], radius: i64) -> Patch {
    let d = w.len();
    let mut out = Patch::new();
    let mut x = vec![-radius; d];
    loop {
        for i in 0..d {
            let f = Face::new(x.clone(), Letter::from_index(i));
            if in_gamma(w, &f) {
                out.insert(f);
            }
        }
        if !odometer(&mut x, -radius, radius) {
            break;
        }
    }
    out
}

/// Faces of the integer discrete plane `Γ(w)` whose coordinates lie in the
/// given per-coordinate ranges.
/// The coordinate with the largest `|w_k|` is solved for instead of enumerated.
pub fn gamma_faces_in_box(w: &[i64], lo: &[i64], hi: &[i64]) -> Vec<Face> {
    let d = w.len();
    let k = (0..d).max_by_key(|&k| w[k].unsigned_abs()).unwrap();
    let wk = w[k] as i128;
    let mut out = Vec::new();
    if wk == 0 {
        return out;
    }
    let free: Vec<usize> = (0..d).filter(|&j| j != k).collect();
    let mut x = vec![0i64; d];
    for &j in &free {
        x[j] = lo[j];
    }
    if free.iter().any(|&j| lo[j] > hi[j]) {
        return out;
    }
    loop {
        let partial: i128 = free.iter().map(|&j| w[j] as i128 * x[j] as i128).sum();
        for i in 0..d {
            // 0 <= partial + wk t < w_i
            let wi = w[i] as i128;
            if wi <= 0 {
                continue;
            }
            let (a, b) = (-partial, wi - partial); // wk t in [a, b)
            let (tmin, tmax) = if wk > 0 {
                (div_ceil(a, wk), div_ceil(b, wk) - 1)
            } else {
                (div_floor(b, wk) + 1, div_floor(a, wk))
            };
            let tmin = tmin.max(lo[k] as i128);
            let tmax = tmax.min(hi[k] as i128);
            let mut t = tmin;
            while t <= tmax {
                x[k] = t as i64;
                out.push(Face::new(x.clone(), Letter::from_index(i)));
                t += 1;
            }
        }
        // advance the free coordinates
        let mut carry = true;
        for &j in &free {
            if x[j] < hi[j] {
                x[j] += 1;
                carry = false;
                break;
            }
            x[j] = lo[j];
        }
        if carry {
            break;
        }
    }
    out
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

fn odometer(x: &mut [i64], lo: i64, hi: i64) -> bool {
    for c in x.iter_mut() {
        if *c < hi {
            *c += 1;
            return true;
        }
        *c = lo;
    }
    false
}

/// Precomputed data for applying `E1*(σ)`: the inverse incidence matrix and,
/// for each letter `i`, the pairs `(j, l(p))` with `p i` a prefix of `σ(j)`.
#[derive(Clone, Debug)]
pub struct DualMap {
    d: usize,
    inv: Vec<Vec<i64>>,
    pieces: Vec<Vec<(usize, Vec<i64>)>>,
}

impl DualMap {
    pub fn new(sigma: &Substitution) -> Result<Self> {
        let d = sigma.alphabet_size();
        let m = sigma.incidence();
        let inv = m.inverse_unimodular()?.to_i64_rows()?;
        let mut pieces = vec![Vec::new(); d];
        for (j, w) in sigma.images().iter().enumerate() {
            let letters = w.letters();
            for (k, l) in letters.iter().enumerate() {
                pieces[l.index()].push((j, letter_counts(&letters[..k], d)));
            }
        }
        Ok(DualMap { d, inv, pieces })
    }

    pub fn apply_face(&self, f: &Face, out: &mut Patch) -> Result<()> {
        for (j, lp) in &self.pieces[f.i.index()] {
            let mut v = vec![0i64; self.d];
            for (vk, (a, b)) in v.iter_mut().zip(f.x.iter().zip(lp)) {
                *vk = a.checked_add(*b).ok_or(SadicError::Overflow)?;
            }
            let mut y = vec![0i64; self.d];
            for (r, yr) in self.inv.iter().zip(y.iter_mut()) {
                let mut acc: i64 = 0;
                for (a, b) in r.iter().zip(&v) {
                    acc = a
                        .checked_mul(*b)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(SadicError::Overflow)?;
                }
                *yr = acc;
            }
            out.insert(Face::new(y, Letter::from_index(*j)));
        }
        Ok(())
    }

    pub fn apply_patch(&self, p: &Patch) -> Result<Patch> {
        let mut out = Patch::new();
        for f in p.iter() {
            self.apply_face(f, &mut out)?;
        }
        Ok(out)
    }

    /// Sum of image sizes, to compare against the union size.
    pub fn image_count(&self, p: &Patch) -> usize {
        p.iter().map(|f| self.pieces[f.i.index()].len()).sum()
    }
}

/// `E1*(σ)[x, i]`.
pub fn dual_image(sigma: &Substitution, f: &Face) -> Result<Patch> {
    let mut out = Patch::new();
    DualMap::new(sigma)?.apply_face(f, &mut out)?;
    Ok(out)
}

/// `E1*(σ)` applied to every face of `p`.
pub fn dual_image_patch(sigma: &Substitution, p: &Patch) -> Result<Patch> {
    DualMap::new(sigma)?.apply_patch(p)
}

/// `E1*(σ_{[k,ℓ)}) p`, applied term by term (`E1*(σ_k)` first).
pub fn dual_image_window(seq: &DirectiveSequence, k: usize, l: usize, p: &Patch) -> Result<Patch> {
    let mut cur = p.clone();
    for n in k..l {
        cur = DualMap::new(&*seq.get(n)?)?.apply_patch(&cur)?;
    }
    Ok(cur)
}

/// Frame of the level-`n` Rauzy fractal: projection along `M_{[0,n)}^{-1} u`
/// onto `(ᵗM_{[0,n)} w)⊥`.
#[derive(Clone, Debug)]
pub struct LevelFrame {
    pub u: RealVector,
    pub w: RealVector,
    wu: f64,
}

impl LevelFrame {
    pub fn new(m: &IntMatrix, u: &[f64], w: &[f64]) -> Result<Self> {
        let inv = m.inverse_unimodular()?;
        let un = mat_vec(&inv, u);
        let wn = mat_t_vec(m, w);
        let wu = dot(&wn, &un);
        project(&un, &wn, &un)?;
        Ok(LevelFrame { u: un, w: wn, wu })
    }

    pub fn project(&self, x: &[f64]) -> RealVector {
        project_unchecked(&self.u, &self.w, self.wu, x)
    }
}

/// One piece `M_{[k,ℓ)} π^{(ℓ)} y + M_{[k,ℓ)} R^{(ℓ)}(j)` of the set equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetEquationPiece {
    pub offset: RealVector,
    pub face: Face,
}

/// Decomposes `π^{(k)} x + R^{(k)}(i)` for `f = [x, i]` into the pieces
/// indexed by `E1*(σ_{[k,ℓ)})[x, i]`.
pub fn set_equation_decompose(
    seq: &DirectiveSequence,
    k: usize,
    l: usize,
    f: &Face,
    u: &[f64],
    w: &[f64],
) -> Result<Vec<SetEquationPiece>> {
    if k >= l {
        return Err(SadicError::InvalidArgument("set equation needs k < l".into()));
    }
    let faces = dual_image_window(seq, k, l, &Patch::from_faces([f.clone()]))?;
    let frame = LevelFrame::new(&seq.product_matrix(0, l)?, u, w)?;
    let mkl = seq.product_matrix(k, l)?;
    Ok(faces
        .iter()
        .map(|g| SetEquationPiece {
            offset: mat_vec(&mkl, &frame.project(&g.x_f64())),
            face: g.clone(),
        })
        .collect())
}

/// Narrows an exact vector to `i64`.
pub fn big_to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(SadicError::Overflow)).collect()
}
