//! Exact square integer matrices and vectors over arbitrary-precision integers.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SadicError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(d: usize) -> Self {
        IntVector(vec![BigInt::zero(); d])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Narrows to machine integers; fails if any entry does not fit.
    pub fn to_i64(&self) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|x| x.to_i64().ok_or(SadicError::Overflow))
            .collect()
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(SadicError::InvalidArgument("matrix rows must form a square".into()));
        }
        Ok(IntMatrix {
            dim,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(SadicError::InvalidArgument("matrix rows must form a square".into()));
        }
        Ok(IntMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> IntVector {
        IntVector((0..self.dim).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        IntVector(
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.get(i, j) * &v.0[j]).sum())
                .collect(),
        )
    }

    pub fn mul_vec_i64(&self, v: &[i64]) -> IntVector {
        IntVector(
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
                .collect(),
        )
    }

    /// Every entry strictly positive.
    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|x| x.is_positive())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative())
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let d = self.dim - 1;
        let mut m = IntMatrix::zeros(d);
        let mut r = 0;
        for i in 0..self.dim {
            if i == skip_row {
                continue;
            }
            let mut c = 0;
            for j in 0..self.dim {
                if j == skip_col {
                    continue;
                }
                m.set(r, c, self.get(i, j).clone());
                c += 1;
            }
            r += 1;
        }
        m
    }

    /// Fraction-free Gaussian elimination (Bareiss), exact.
    pub fn det(&self) -> BigInt {
        let n = self.dim;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn adjugate(&self) -> IntMatrix {
        let n = self.dim;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut adj = IntMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                let c = if (i + j) % 2 == 0 { c } else { -c };
                adj.set(j, i, c);
            }
        }
        adj
    }

    /// Integer inverse via adjugate / det; requires |det| = 1.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.det();
        if det.abs() != BigInt::one() {
            return Err(SadicError::NotUnimodular(det.to_string()));
        }
        let mut adj = self.adjugate();
        if det.is_negative() {
            for e in adj.entries.iter_mut() {
                *e = -&*e;
            }
        }
        Ok(adj)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == BigInt::one()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.to_i64().ok_or(SadicError::Overflow)).collect())
            .collect()
    }

    /// Coefficients `[c0, c1, ..., c_{d-1}]` of the monic characteristic polynomial
    /// `x^d + c_{d-1} x^{d-1} + ... + c0` (Faddeev-LeVerrier, exact).
    pub fn charpoly(&self) -> Vec<BigInt> {
        let n = self.dim;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = IntMatrix::zeros(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self * &m;
            for i in 0..n {
                let v = next.get(i, i) + &coeffs[n - k + 1];
                next.set(i, i, v);
            }
            let am = self * &next;
            coeffs[n - k] = -am.trace() / BigInt::from(k as i64);
            m = next;
        }
        coeffs.truncate(n);
        coeffs
    }

    /// Row-major CSV of decimal integers, one row per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<BigInt>()
                            .map_err(|e| SadicError::Parse(format!("matrix entry {c:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_big_rows(rows)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.dim)
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[[i64; 3]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[[0, 1, 0], [0, 0, 1], [1, 0, 1]]);
        assert_eq!(a.det(), BigInt::from(1));
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(&a * &inv, IntMatrix::identity(3));
        let singular = m(&[[1, 2, 3], [2, 4, 6], [0, 0, 1]]);
        assert!(singular.det().is_zero());
        assert!(singular.inverse_unimodular().is_err());
    }

    #[test]
    fn negative_det_inverse() {
        let a = m(&[[0, 1, 0], [1, 0, 0], [0, 0, 1]]);
        assert_eq!(a.det(), BigInt::from(-1));
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(&inv * &a, IntMatrix::identity(3));
    }

    #[test]
    fn charpoly_matches_cubic_formula() {
        let a = m(&[[2, 1, 2], [1, 1, 1], [0, 0, 1]]);
        // x^3 - tr x^2 + s2 x - det
        let cp = a.charpoly();
        let tr = a.trace();
        let s2: BigInt = (0..3)
            .map(|k| a.minor(k, k).det())
            .sum();
        assert_eq!(cp[2], -tr);
        assert_eq!(cp[1], s2);
        assert_eq!(cp[0], -a.det());
    }

    #[test]
    fn csv_roundtrip() {
        let a = m(&[[1, -2, 3], [4, 5, 6], [7, 8, 9]]);
        assert_eq!(IntMatrix::from_csv(&a.to_csv()).unwrap(), a);
    }
}
