//! Uniform grid over points in R³ for ε-membership and nearest-point queries
//! in the maximum norm.

use std::collections::HashMap;

pub type P3 = [f64; 3];

#[inline]
pub fn dist_inf(a: &P3, b: &P3) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs()).max((a[2] - b[2]).abs())
}

#[derive(Clone, Debug)]
pub struct GridIndex {
    cell: f64,
    cells: HashMap<[i64; 3], Vec<u32>>,
    points: Vec<P3>,
    lo: [i64; 3],
    hi: [i64; 3],
}

impl GridIndex {
    pub fn new(points: Vec<P3>, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let mut cells: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        for (k, p) in points.iter().enumerate() {
            let key = key(p, cell);
            for a in 0..3 {
                lo[a] = lo[a].min(key[a]);
                hi[a] = hi[a].max(key[a]);
            }
            cells.entry(key).or_default().push(k as u32);
        }
        GridIndex { cell, cells, points, lo, hi }
    }

    /// Cell size suited to nearest-point queries on `points`: about one
    /// point per occupied cell for planar data.
    pub fn auto(points: Vec<P3>) -> Self {
        let n = points.len().max(1) as f64;
        let mut ext: f64 = 0.0;
        for a in 0..3 {
            let (mn, mx) = points
                .iter()
                .fold((f64::MAX, f64::MIN), |(mn, mx), p| (mn.min(p[a]), mx.max(p[a])));
            if mx > mn {
                ext = ext.max(mx - mn);
            }
        }
        let cell = if ext > 0.0 { ext / n.sqrt() } else { 1.0 };
        Self::new(points, cell.max(1e-12))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P3] {
        &self.points
    }

    /// True if some point lies within `eps` of `p` (maximum norm).
    pub fn any_within(&self, p: &P3, eps: f64) -> bool {
        if self.points.is_empty() {
            return false;
        }
        let a = key(&[p[0] - eps, p[1] - eps, p[2] - eps], self.cell);
        let b = key(&[p[0] + eps, p[1] + eps, p[2] + eps], self.cell);
        let a = [a[0].max(self.lo[0]), a[1].max(self.lo[1]), a[2].max(self.lo[2])];
        let b = [b[0].min(self.hi[0]), b[1].min(self.hi[1]), b[2].min(self.hi[2])];
        for x in a[0]..=b[0] {
            for y in a[1]..=b[1] {
                for z in a[2]..=b[2] {
                    if let Some(ids) = self.cells.get(&[x, y, z]) {
                        if ids.iter().any(|&k| dist_inf(&self.points[k as usize], p) <= eps) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Distance to the nearest point, or `None` when empty.
    pub fn nearest(&self, p: &P3) -> Option<f64> {
        if self.points.is_empty() {
            return None;
        }
        let c = key(p, self.cell);
        // rings beyond this cannot hold points
        let max_ring = (0..3)
            .map(|a| (c[a] - self.lo[a]).abs().max((self.hi[a] - c[a]).abs()))
            .max()
            .unwrap();
        let mut best = f64::INFINITY;
        for r in 0..=max_ring {
            self.visit_ring(c, r, |k| {
                best = best.min(dist_inf(&self.points[k as usize], p));
            });
            if best <= r as f64 * self.cell {
                break;
            }
        }
        Some(best)
    }

    fn visit_ring<F: FnMut(u32)>(&self, c: [i64; 3], r: i64, mut f: F) {
        let clip = |a: usize, v: i64| v >= self.lo[a] && v <= self.hi[a];
        for dx in -r..=r {
            let x = c[0] + dx;
            if !clip(0, x) {
                continue;
            }
            for dy in -r..=r {
                let y = c[1] + dy;
                if !clip(1, y) {
                    continue;
                }
                let on_shell = dx.abs() == r || dy.abs() == r;
                let dzs: Vec<i64> = if on_shell { (-r..=r).collect() } else if r == 0 { vec![0] } else { vec![-r, r] };
                for dz in dzs {
                    let z = c[2] + dz;
                    if !clip(2, z) {
                        continue;
                    }
                    if let Some(ids) = self.cells.get(&[x, y, z]) {
                        for &k in ids {
                            f(k);
                        }
                    }
                }
            }
        }
    }
}

#[inline]
fn key(p: &P3, cell: f64) -> [i64; 3] {
    [
        (p[0] / cell).floor() as i64,
        (p[1] / cell).floor() as i64,
        (p[2] / cell).floor() as i64,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<P3> = (0..500)
            .map(|_| {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                [a, b, -a - b]
            })
            .collect();
        let idx = GridIndex::auto(pts.clone());
        let fixed = GridIndex::new(pts.clone(), 0.05);
        for _ in 0..300 {
            let q: P3 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let brute = pts.iter().map(|p| dist_inf(p, &q)).fold(f64::INFINITY, f64::min);
            assert_eq!(idx.nearest(&q).unwrap(), brute);
            assert_eq!(fixed.nearest(&q).unwrap(), brute);
            for eps in [0.01, 0.05, 0.3] {
                assert_eq!(idx.any_within(&q, eps), brute <= eps);
            }
        }
        assert!(GridIndex::new(Vec::new(), 1.0).nearest(&[0.0; 3]).is_none());
    }
}
