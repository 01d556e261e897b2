//! Brun and Arnoux-Rauzy continued fraction algorithms and their substitutions.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SadicError};
use crate::matrix::IntMatrix;
use crate::symbolic::{Letter, Substitution};

const TOL: f64 = 1e-12;

fn table(images: [&str; 3]) -> Substitution {
    Substitution::from_strs(&images).expect("static table is valid")
}

/// Arnoux-Rauzy substitution `α_i`: `i -> i`, `j -> j i`.
pub fn ar(i: usize) -> Substitution {
    match i {
        1 => table(["1", "21", "31"]),
        2 => table(["12", "2", "32"]),
        3 => table(["13", "23", "3"]),
        _ => panic!("AR index must be 1, 2 or 3"),
    }
}

/// Brun substitution `β_i`.
pub fn brun(i: usize) -> Substitution {
    match i {
        1 => table(["1", "23", "3"]),
        2 => table(["1", "3", "23"]),
        3 => table(["3", "1", "23"]),
        _ => panic!("Brun index must be 1, 2 or 3"),
    }
}

/// The alternative Brun substitutions `σ_i^Br`.
pub fn brun_sigma(i: usize) -> Substitution {
    match i {
        1 => table(["1", "2", "32"]),
        2 => table(["1", "3", "23"]),
        3 => table(["2", "3", "13"]),
        _ => panic!("Brun sigma index must be 1, 2 or 3"),
    }
}

pub fn ar_substitutions() -> [Substitution; 3] {
    [ar(1), ar(2), ar(3)]
}

pub fn brun_substitutions() -> [Substitution; 3] {
    [brun(1), brun(2), brun(3)]
}

pub fn brun_sigma_substitutions() -> [Substitution; 3] {
    [brun_sigma(1), brun_sigma(2), brun_sigma(3)]
}

/// The three Brun matrices as printed, independent of the substitution tables.
pub fn brun_matrices() -> [IntMatrix; 3] {
    let m = |r: [[i64; 3]; 3]| IntMatrix::from_rows(&r.map(|x| x.to_vec())).unwrap();
    [
        m([[1, 0, 0], [0, 1, 0], [0, 1, 1]]),
        m([[1, 0, 0], [0, 0, 1], [0, 1, 1]]),
        m([[0, 1, 0], [0, 0, 1], [1, 0, 1]]),
    ]
}

/// A point of `Δ₂ = {0 <= x1 <= x2 <= 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub x1: f64,
    pub x2: f64,
}

impl SimplexPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        SimplexPoint { x1, x2 }
    }

    pub fn in_simplex(&self, tol: f64) -> bool {
        self.x1 >= -tol && self.x1 <= self.x2 + tol && self.x2 <= 1.0 + tol
    }

    /// Letter frequencies `(x1, x2, 1) / (1 + x1 + x2)`.
    pub fn frequency(&self) -> [f64; 3] {
        let s = 1.0 + self.x1 + self.x2;
        [self.x1 / s, self.x2 / s, 1.0 / s]
    }
}

/// Branch index of the Brun map; boundary points take the smallest index.
pub fn brun_branch(x1: f64, x2: f64) -> u8 {
    if x2 <= 0.5 {
        1
    } else if x2 <= 1.0 - x1 {
        2
    } else {
        3
    }
}

/// One step of the Brun map.
pub fn brun_step(p: SimplexPoint) -> Result<(u8, SimplexPoint)> {
    let SimplexPoint { x1, x2 } = p;
    if !p.in_simplex(TOL) {
        return Err(SadicError::InvalidArgument(format!("({x1}, {x2}) is not in the simplex")));
    }
    if x2 == 0.0 {
        return Err(SadicError::Numeric("x2 = 0".into()));
    }
    let b = brun_branch(x1, x2);
    let q = match b {
        1 => SimplexPoint::new(x1 / (1.0 - x2), x2 / (1.0 - x2)),
        2 => SimplexPoint::new(x1 / x2, (1.0 - x2) / x2),
        _ => SimplexPoint::new((1.0 - x2) / x2, x1 / x2),
    };
    if !q.in_simplex(TOL) {
        return Err(SadicError::Numeric(format!(
            "iterate ({}, {}) left the simplex",
            q.x1, q.x2
        )));
    }
    Ok((b, q))
}

/// Branch digits of a Brun orbit; `stopped` records why it ended early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrunExpansion {
    pub digits: Vec<u8>,
    pub stopped: Option<String>,
}

impl BrunExpansion {
    pub fn digit_string(&self) -> String {
        self.digits.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

pub fn brun_expand(p: SimplexPoint, n: usize) -> BrunExpansion {
    let mut digits = Vec::with_capacity(n);
    let mut x = p;
    for _ in 0..n {
        match brun_step(x) {
            Ok((b, y)) => {
                digits.push(b);
                x = y;
            }
            Err(e) => return BrunExpansion { digits, stopped: Some(e.to_string()) },
        }
    }
    BrunExpansion { digits, stopped: None }
}

/// Exact rational Brun step.
pub fn brun_step_exact(x1: &BigRational, x2: &BigRational) -> Result<(u8, BigRational, BigRational)> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if *x1 < zero || x1 > x2 || *x2 > one {
        return Err(SadicError::InvalidArgument("point is not in the simplex".into()));
    }
    if x2.is_zero() {
        return Err(SadicError::Numeric("x2 = 0".into()));
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    Ok(if *x2 <= half {
        let s = &one - x2;
        (1, x1 / &s, x2 / &s)
    } else if *x2 <= &one - x1 {
        (2, x1 / x2, (&one - x2) / x2)
    } else {
        (3, (&one - x2) / x2, x1 / x2)
    })
}

pub fn brun_expand_exact(x1: &BigRational, x2: &BigRational, n: usize) -> BrunExpansion {
    let (mut a, mut b) = (x1.clone(), x2.clone());
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        match brun_step_exact(&a, &b) {
            Ok((d, p, q)) => {
                digits.push(d);
                a = p;
                b = q;
            }
            Err(e) => return BrunExpansion { digits, stopped: Some(e.to_string()) },
        }
    }
    BrunExpansion { digits, stopped: None }
}

/// Checks `β_{i0}...β_{in} = σ2 σ_{i0} ... σ_{i(n-1)} π` as substitutions,
/// with `π` the transposition (23), the identity or (12) for `i_n = 1, 2, 3`.
pub fn relate_brun(indices: &[usize]) -> bool {
    let Some(&last) = indices.last() else {
        return false;
    };
    if indices.iter().any(|&i| !(1..=3).contains(&i)) {
        return false;
    }
    let lhs = indices
        .iter()
        .fold(Substitution::identity(3), |acc, &i| acc.compose(&brun(i)).unwrap());
    let pi = match last {
        1 => Substitution::permutation(&[0, 2, 1]),
        2 => Ok(Substitution::identity(3)),
        _ => Substitution::permutation(&[1, 0, 2]),
    }
    .unwrap();
    let rhs = indices[..indices.len() - 1]
        .iter()
        .fold(brun_sigma(2), |acc, &i| acc.compose(&brun_sigma(i)).unwrap())
        .compose(&pi)
        .unwrap();
    lhs == rhs
}

/// Fully subtractive Arnoux-Rauzy step: if `v_i` exceeds the sum of the
/// others, returns `i` and `v` with `v_i` replaced by the difference, so that
/// `M_{α_i} v' = v`.
pub fn ar_step(v: &[f64; 3]) -> Option<(Letter, [f64; 3])> {
    let total: f64 = v.iter().sum();
    (0..3).find(|&i| v[i] > total - v[i]).map(|i| {
        let mut w = *v;
        w[i] = 2.0 * v[i] - total;
        (Letter::from_index(i), w)
    })
}

/// Integer version of [`ar_step`].
pub fn ar_step_int(v: &[i64; 3]) -> Option<(Letter, [i64; 3])> {
    let total: i64 = v.iter().sum();
    (0..3).find(|&i| v[i] > total - v[i]).map(|i| {
        let mut w = *v;
        w[i] = 2 * v[i] - total;
        (Letter::from_index(i), w)
    })
}

/// AR digits of `v` until no coordinate dominates or `n` digits are produced.
pub fn ar_expand(v: &[f64; 3], n: usize) -> Vec<u8> {
    let mut out = Vec::new();
    let mut x = *v;
    while out.len() < n {
        match ar_step(&x) {
            Some((l, y)) => {
                out.push(l.value() as u8);
                x = y;
            }
            None => break,
        }
    }
    out
}

/// Invariant density of the Brun map on `Δ₂`, `12 / (π² x2 (1 + x1))`.
pub fn invariant_density(p: SimplexPoint) -> Result<f64> {
    if p.x2 <= 0.0 {
        return Err(SadicError::InvalidArgument("density is singular at x2 = 0".into()));
    }
    Ok(12.0 / (PI * PI * p.x2 * (1.0 + p.x1)))
}

/// Draws from the invariant density.
///
/// The `x2` marginal `(12/π²) ln(1+x2)/x2` is sampled by rejection against the
/// uniform proposal on `[0,1]` (acceptance `ln(1+x2)/x2 <= 1`), then `x1` is
/// drawn from its conditional `∝ 1/(1+x1)` on `[0,x2]` by inversion.
pub fn sample_invariant(n: usize, seed: u64) -> Vec<SimplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_invariant_with(&mut rng, n)
}

pub fn sample_invariant_with<R: Rng>(rng: &mut R, n: usize) -> Vec<SimplexPoint> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x2: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let accept = x2.ln_1p() / x2;
        if rng.gen::<f64>() < accept {
            let x1 = (1.0 + x2).powf(rng.gen::<f64>()) - 1.0;
            out.push(SimplexPoint::new(x1.min(x2), x2));
        }
    }
    out
}

/// Integral of the invariant density over `Δ₂` by composite Simpson rule,
/// after substituting `x1 = s x2` which removes the singularity.
pub fn density_quadrature(n: usize) -> f64 {
    let n = n + n % 2;
    let w = |k: usize| match k {
        0 => 1.0,
        k if k == n => 1.0,
        k if k % 2 == 1 => 4.0,
        _ => 2.0,
    };
    let h = 1.0 / n as f64;
    let mut total = 0.0;
    for a in 0..=n {
        for b in 0..=n {
            let (s, x2) = (a as f64 * h, b as f64 * h);
            total += w(a) * w(b) * 12.0 / (PI * PI * (1.0 + s * x2));
        }
    }
    total * h * h / 9.0
}

/// Probability mass of the invariant measure on the box
/// `[a1,b1] x [a2,b2]` intersected with `Δ₂`, by numeric integration.
pub fn invariant_mass(a1: f64, b1: f64, a2: f64, b2: f64, n: usize) -> f64 {
    // integrate over x2 the exact inner integral in x1
    let inner = |x2: f64| {
        let lo = a1.max(0.0);
        let hi = b1.min(x2);
        if hi <= lo || x2 <= 0.0 {
            0.0
        } else {
            12.0 / (PI * PI) * ((1.0 + hi).ln() - (1.0 + lo).ln()) / x2
        }
    };
    let lo = a2.max(0.0);
    let hi = b2.min(1.0);
    if hi <= lo {
        return 0.0;
    }
    // midpoint rule; the integrand is bounded and piecewise smooth
    let h = (hi - lo) / n as f64;
    (0..n).map(|k| inner(lo + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables() {
        assert_eq!(brun(2).image(Letter::from_index(2)).to_string(), "23");
        assert_eq!(ar(3).image(Letter::from_index(0)).to_string(), "13");
        assert_eq!(brun_sigma(3).image(Letter::from_index(2)).to_string(), "13");
        for (b, m) in brun_substitutions().iter().zip(brun_matrices()) {
            assert_eq!(b.incidence(), m);
        }
    }

    #[test]
    fn brun_step_examples() {
        let close = |p: SimplexPoint, a: f64, b: f64| (p.x1 - a).abs() < 1e-14 && (p.x2 - b).abs() < 1e-14;
        let (b, p) = brun_step(SimplexPoint::new(0.2, 0.3)).unwrap();
        assert!(b == 1 && close(p, 2.0 / 7.0, 3.0 / 7.0));
        let (b, p) = brun_step(SimplexPoint::new(0.3, 0.6)).unwrap();
        assert!(b == 2 && close(p, 0.5, 2.0 / 3.0));
        let (b, p) = brun_step(SimplexPoint::new(0.5, 0.8)).unwrap();
        assert!(b == 3 && close(p, 0.25, 0.625));
        assert!(brun_step(SimplexPoint::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn expand_edge_cases() {
        let e = brun_expand(SimplexPoint::new(0.0, 0.5), 5);
        assert_eq!(e.digits[0], 1);
        assert!(brun_expand(SimplexPoint::new(0.1, 0.2), 0).digits.is_empty());
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let ex = brun_expand_exact(&r(0, 1), &r(1, 2), 10);
        // (0,1/2) -> (0,1) -> (0,0) -> stops on x2 = 0
        assert_eq!(ex.digits, vec![1, 2]);
        assert!(ex.stopped.is_some());
        assert_eq!(brun_expand(SimplexPoint::new(0.2, 0.3), 5).digit_string().len(), 5);
    }

    #[test]
    fn relate_brun_base_cases() {
        assert!(relate_brun(&[1]));
        assert!(relate_brun(&[2]));
        assert!(relate_brun(&[3]));
        assert!(relate_brun(&[3, 1, 2, 2, 3]));
        assert!(!relate_brun(&[]));
    }

    #[test]
    fn ar_step_examples() {
        assert!(ar_step(&[1.0, 1.0, 1.0]).is_none());
        let (l, v) = ar_step_int(&[5, 2, 1]).unwrap();
        assert_eq!(l.value(), 1);
        assert_eq!(v, [2, 2, 1]);
    }

    #[test]
    fn density_values() {
        let h = invariant_density(SimplexPoint::new(0.5, 0.5)).unwrap();
        assert!((h - 16.0 / (PI * PI)).abs() < 1e-12);
        assert!((density_quadrature(200) - 1.0).abs() < 1e-3);
        assert!((invariant_mass(0.0, 1.0, 0.0, 1.0, 4000) - 1.0).abs() < 1e-3);
        assert!(invariant_density(SimplexPoint::new(0.0, 0.0)).is_err());
    }
}
