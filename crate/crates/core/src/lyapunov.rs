//! Lyapunov exponents of substitution cocycles by vector renormalization,
//! and the Pisot condition at 95% confidence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::cf::{self, SimplexPoint};
use crate::directive::DirectiveSequence;
use crate::error::{Result, SadicError};
use crate::matrix::IntMatrix;
use crate::par;

type M3 = [[f64; 3]; 3];

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Second exterior power in the basis `e1∧e2, e1∧e3, e2∧e3`.
pub fn wedge2(m: &IntMatrix) -> Result<IntMatrix> {
    if m.dim() != 3 {
        return Err(SadicError::UnsupportedDimension { expected: 3, got: m.dim() });
    }
    let mut out = IntMatrix::zeros(3);
    for (r, &(a, b)) in PAIRS.iter().enumerate() {
        for (c, &(x, y)) in PAIRS.iter().enumerate() {
            out.set(r, c, m.get(a, x) * m.get(b, y) - m.get(a, y) * m.get(b, x));
        }
    }
    Ok(out)
}

fn wedge2_f(m: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for (r, &(a, b)) in PAIRS.iter().enumerate() {
        for (c, &(x, y)) in PAIRS.iter().enumerate() {
            out[r][c] = m[a][x] * m[b][y] - m[a][y] * m[b][x];
        }
    }
    out
}

fn to_m3(m: &IntMatrix) -> Result<M3> {
    if m.dim() != 3 {
        return Err(SadicError::UnsupportedDimension { expected: 3, got: m.dim() });
    }
    let r = m.to_f64_rows();
    Ok([[r[0][0], r[0][1], r[0][2]], [r[1][0], r[1][1], r[1][2]], [r[2][0], r[2][1], r[2][2]]])
}

fn transpose(m: &M3) -> M3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn inverse(m: &M3) -> M3 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    inv
}

fn apply(m: &M3, v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Source of incidence-matrix sequences, one independent stream per trial.
#[derive(Clone, Debug)]
pub enum Sampler {
    /// Brun matrices along the orbit of a point drawn from the invariant density.
    BrunInvariant,
    /// Brun matrices along the orbit of a uniform point of Δ₂ (a different measure).
    BrunUniform,
    /// i.i.d. uniform choice among α1, α2, α3.
    ArIid,
    /// The terms of a fixed directive sequence (same for every trial).
    Sequence(DirectiveSequence),
    Identity,
}

impl Sampler {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "brun" | "brun-invariant" => Sampler::BrunInvariant,
            "brun-uniform" => Sampler::BrunUniform,
            "ar" | "ar-iid" => Sampler::ArIid,
            "identity" => Sampler::Identity,
            other => Sampler::Sequence(DirectiveSequence::parse(other.strip_prefix("seq:").unwrap_or(other))?),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Sampler::BrunInvariant => "brun-invariant".into(),
            Sampler::BrunUniform => "brun-uniform".into(),
            Sampler::ArIid => "ar-iid".into(),
            Sampler::Sequence(s) => format!("seq:{}", s.describe()),
            Sampler::Identity => "identity".into(),
        }
    }
}

enum Stream {
    Brun(SimplexPoint),
    Ar,
    Seq(DirectiveSequence, usize),
    Identity,
}

struct Tables {
    brun: [M3; 3],
    ar: [M3; 3],
}

fn tables() -> Result<Tables> {
    let brun = cf::brun_matrices();
    let ar = cf::ar_substitutions().map(|s| s.incidence());
    Ok(Tables {
        brun: [to_m3(&brun[0])?, to_m3(&brun[1])?, to_m3(&brun[2])?],
        ar: [to_m3(&ar[0])?, to_m3(&ar[1])?, to_m3(&ar[2])?],
    })
}

impl Stream {
    fn next(&mut self, t: &Tables, rng: &mut ChaCha8Rng) -> Result<M3> {
        match self {
            Stream::Brun(p) => {
                let (i, q) = cf::brun_step(*p)?;
                *p = q;
                Ok(t.brun[i as usize - 1])
            }
            Stream::Ar => Ok(t.ar[rng.gen_range(0..3)]),
            Stream::Seq(s, k) => {
                if !s.has(*k) {
                    return Err(SadicError::SequenceExhausted(*k));
                }
                let m = to_m3(&s.get(*k)?.incidence())?;
                *k += 1;
                Ok(m)
            }
            Stream::Identity => Ok([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    /// 95% Student-t interval across trials.
    pub ci: [f64; 2],
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let q = StudentsT::new(0.0, 1.0, n - 1.0).map(|t| t.inverse_cdf(0.975)).unwrap_or(f64::NAN);
        Estimate { mean, se, ci: [mean - q * se, mean + q * se] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub n_steps: usize,
    pub trials: usize,
    pub seed: u64,
    /// Steps run before accumulation starts.
    pub burn_in: usize,
    /// Use `M` instead of `ᵗM` in the cocycle.
    pub transpose: bool,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig { n_steps: 100_000, trials: 20, seed: 1, burn_in: 1000, transpose: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub sampler: String,
    pub theta1: Estimate,
    pub theta2: Estimate,
    pub theta3: Estimate,
    /// θ₁ + θ₂ + θ₃, with θ₃ from the inverse cocycle.
    pub theta_sum: Estimate,
    pub n_steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub transpose: bool,
    pub per_trial: Vec<[f64; 3]>,
}

impl LyapunovReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if v.iter().any(|x: &f64| x.abs() > 1e-3) {
            return v;
        }
    }
}

/// Multiplies by `m`, renormalizes in the maximum norm, returns the log growth.
fn push(m: &M3, v: &mut [f64; 3]) -> f64 {
    let w = apply(m, v);
    let n = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for (a, b) in v.iter_mut().zip(w) {
        *a = b / n;
    }
    n.ln()
}

fn trial(sampler: &Sampler, cfg: &LyapunovConfig, k: usize, t: &Tables) -> Result<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(k as u64);
    let mut stream = match sampler {
        Sampler::BrunInvariant => Stream::Brun(cf::sample_invariant_with(&mut rng, 1)[0]),
        Sampler::BrunUniform => {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            Stream::Brun(SimplexPoint::new(a.min(b), a.max(b)))
        }
        Sampler::ArIid => Stream::Ar,
        Sampler::Sequence(s) => Stream::Seq(s.clone(), 0),
        Sampler::Identity => Stream::Identity,
    };
    let mut v1 = random_unit(&mut rng);
    let mut v2 = random_unit(&mut rng);
    let mut v3 = random_unit(&mut rng);
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    for step in 0..cfg.burn_in + cfg.n_steps {
        let m = stream.next(t, &mut rng)?;
        let a = if cfg.transpose { m } else { transpose(&m) };
        let g1 = push(&a, &mut v1);
        let g2 = push(&wedge2_f(&a), &mut v2);
        let g3 = push(&inverse(&a), &mut v3);
        if step >= cfg.burn_in {
            s1 += g1;
            s2 += g2;
            s3 += g3;
        }
    }
    let n = cfg.n_steps as f64;
    let (t1, t12, t3) = (s1 / n, s2 / n, -s3 / n);
    Ok([t1, t12 - t1, t3])
}

pub fn lyapunov_estimate(sampler: &Sampler, cfg: &LyapunovConfig) -> Result<LyapunovReport> {
    if cfg.trials < 2 {
        return Err(SadicError::InvalidArgument("at least 2 trials are needed".into()));
    }
    if cfg.n_steps == 0 {
        return Err(SadicError::InvalidArgument("n_steps must be positive".into()));
    }
    let t = tables()?;
    let ids: Vec<usize> = (0..cfg.trials).collect();
    let per_trial = par::map_slice(&ids, |&k| trial(sampler, cfg, k, &t)).into_iter().collect::<Result<Vec<_>>>()?;
    let col = |j: usize| per_trial.iter().map(|r| r[j]).collect::<Vec<_>>();
    let sums: Vec<f64> = per_trial.iter().map(|r| r[0] + r[1] + r[2]).collect();
    Ok(LyapunovReport {
        sampler: sampler.name(),
        theta1: Estimate::from_samples(&col(0)),
        theta2: Estimate::from_samples(&col(1)),
        theta3: Estimate::from_samples(&col(2)),
        theta_sum: Estimate::from_samples(&sums),
        n_steps: cfg.n_steps,
        trials: cfg.trials,
        seed: cfg.seed,
        burn_in: cfg.burn_in,
        transpose: cfg.transpose,
        per_trial,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PisotVerdict {
    pub holds: bool,
    pub confidence: f64,
    pub theta1_ci: [f64; 2],
    pub theta2_ci: [f64; 2],
}

/// `θ₁ > 0 > θ₂` with both 95% intervals strictly on the right side of 0.
pub fn pisot_condition(r: &LyapunovReport) -> PisotVerdict {
    PisotVerdict {
        holds: r.theta1.ci[0] > 0.0 && r.theta2.ci[1] < 0.0,
        confidence: 0.95,
        theta1_ci: r.theta1.ci,
        theta2_ci: r.theta2.ci,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge2(&IntMatrix::identity(3)).unwrap(), IntMatrix::identity(3));
        let b1 = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 1, 1]]).unwrap();
        let want = IntMatrix::from_rows(&[vec![1, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(wedge2(&b1).unwrap(), want);
        assert!(wedge2(&IntMatrix::identity(4)).is_err());
    }

    #[test]
    fn float_inverse_and_wedge_agree_with_exact() {
        let m = &cf::brun_matrices()[2] * &cf::ar_substitutions()[0].incidence();
        let f = to_m3(&m).unwrap();
        let inv = to_m3(&m.inverse_unimodular().unwrap()).unwrap();
        let w = to_m3(&wedge2(&m).unwrap()).unwrap();
        let (fi, fw) = (inverse(&f), wedge2_f(&f));
        for i in 0..3 {
            for j in 0..3 {
                assert!((fi[i][j] - inv[i][j]).abs() < 1e-12);
                assert_eq!(fw[i][j], w[i][j]);
            }
        }
    }

    #[test]
    fn identity_cocycle() {
        let cfg = LyapunovConfig { n_steps: 100, trials: 3, ..Default::default() };
        let r = lyapunov_estimate(&Sampler::Identity, &cfg).unwrap();
        assert_eq!(r.theta1.mean, 0.0);
        assert_eq!(r.theta2.mean, 0.0);
        assert!(!pisot_condition(&r).holds);
        let cfg = LyapunovConfig { trials: 0, ..cfg };
        assert!(lyapunov_estimate(&Sampler::Identity, &cfg).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = LyapunovConfig { n_steps: 2000, trials: 4, seed: 9, ..Default::default() };
        let a = lyapunov_estimate(&Sampler::ArIid, &cfg).unwrap();
        let b = lyapunov_estimate(&Sampler::ArIid, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = lyapunov_estimate(&Sampler::ArIid, &LyapunovConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.per_trial, c.per_trial);
    }
}
