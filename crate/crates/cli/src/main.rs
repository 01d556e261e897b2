use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sadic::cf::{self, SimplexPoint};
use sadic::coincidence::{self, CoincidenceWitness, FACE_BUDGET};
use sadic::directive::PriceReport;
use sadic::dynamics::{self, torus_translate, CodingConfig, RecurrenceReport, TorusPoint};
use sadic::fractal::{self, CoverHistogram};
use sadic::geometry::{ones, project, right_eigenvector_approx, sum_normalize, unit};
use sadic::lyapunov::{self, LyapunovConfig, Sampler};
use sadic::raster::{self, RenderOptions};
use sadic::DirectiveSequence;

#[derive(Parser)]
#[command(name = "sadic", version, about = "S-adic shifts: expansions, Rauzy fractals, coincidences, Lyapunov exponents")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rasterize the Rauzy cloud of a sequence to a binary PPM.
    Render(RenderArgs),
    /// Brun or Arnoux-Rauzy expansion of a point, or invariant-measure samples.
    Expand(ExpandArgs),
    /// Search for a coincidence witness.
    Coincidence(CoincidenceArgs),
    /// Estimate Lyapunov exponents and test the Pisot condition.
    Lyapunov(LyapunovArgs),
    /// Compare the natural coding of the toral translation with the limit word.
    Code(CodeArgs),
    /// Frequencies, discrepancy, recurrence and covering statistics.
    Stats(StatsArgs),
    /// Re-validate a coincidence witness emitted by `coincidence`.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct SeqArgs {
    /// Sequence spec: `a1 a2 a3`, `b3 periodic: b1 b2`, `brun:x1,x2`, `ar:v1,v2,v3`.
    #[arg(long)]
    seq: String,
    /// Depth used to approximate the frequency vector for token sequences.
    #[arg(long, default_value_t = 60, value_parser = positive)]
    u_depth: usize,
}

#[derive(clap::Args)]
struct RenderArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 60, value_parser = positive)]
    depth: usize,
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    min_len: usize,
    #[arg(long, default_value_t = 800, value_parser = positive)]
    width: usize,
    #[arg(long, default_value_t = 800, value_parser = positive)]
    height: usize,
    /// Half-width of the view in plane coordinates (fitted when absent).
    #[arg(long)]
    extent: Option<f64>,
    /// Also draw the lattice translates with ‖x‖∞ <= R.
    #[arg(long)]
    translates: Option<i64>,
    /// Also write the cloud as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ExpandArgs {
    /// Brun point `x1,x2` with 0 <= x1 <= x2 <= 1.
    #[arg(long, conflicts_with = "ar")]
    point: Option<String>,
    /// Arnoux-Rauzy vector `v1,v2,v3`.
    #[arg(long)]
    ar: Option<String>,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Draw this many points from the Brun invariant measure and write CSV.
    #[arg(long, value_parser = positive, conflicts_with_all = ["point", "ar"])]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Strong,
    NegativeStrong,
    Geometric,
    Finiteness,
}

#[derive(clap::Args)]
struct CoincidenceArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, value_enum, default_value = "strong")]
    kind: Kind,
    /// Largest window length for the combinatorial checks.
    #[arg(long, default_value_t = 20, value_parser = positive)]
    max_l: usize,
    /// Level for the geometric checks (largest level searched for `geometric`).
    #[arg(long, default_value_t = 10, value_parser = positive)]
    n: usize,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    n_min: usize,
    /// Ball radius for the geometric coincidence check.
    #[arg(long, default_value_t = 2)]
    c: i64,
    /// Ball radius for the finiteness check.
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = FACE_BUDGET, value_parser = positive)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct LyapunovArgs {
    /// `brun`, `brun-uniform`, `ar`, `identity` or `seq:<spec>`.
    #[arg(long, default_value = "brun")]
    sampler: String,
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    steps: usize,
    #[arg(long, default_value_t = 20, value_parser = positive)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    /// Use the cocycle `M` instead of its transpose.
    #[arg(long)]
    transpose: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CodeArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 80, value_parser = positive)]
    depth: usize,
    #[arg(long, default_value_t = 2000)]
    horizon: usize,
    #[arg(long, default_value_t = 0.02, value_parser = positive_f64)]
    epsilon: f64,
    #[arg(long, default_value_t = 3)]
    letter: usize,
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    cloud_len: usize,
    /// Write the first `orbit_steps` points of the translation orbit of 0,
    /// with the letter of the limit word at each step, as CSV.
    #[arg(long)]
    orbit_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    orbit_steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct StatsArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 60, value_parser = positive)]
    depth: usize,
    #[arg(long, default_value_t = 20_000, value_parser = positive)]
    min_len: usize,
    /// Largest factor length for the recurrence estimate.
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Depth of the finite primitivity/recurrence/balance witnesses; images
    /// grow exponentially in this.
    #[arg(long, default_value_t = 12, value_parser = positive)]
    price_depth: usize,
    /// Sample covering multiplicities of the lattice translates.
    #[arg(long, value_parser = positive)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.02, value_parser = positive_f64)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    translates: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    witness: PathBuf,
    /// Verify against this sequence instead of the one stored in the witness.
    #[arg(long)]
    seq: Option<String>,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn coords(s: &str, k: usize) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != k {
        bail!("expected {k} comma-separated numbers, got {s:?}");
    }
    Ok(v)
}

/// The frequency vector of the sequence: exact for expansion-driven specs,
/// otherwise the column average of `M_{[0,n)}`.
fn frequency(args: &SeqArgs, seq: &DirectiveSequence) -> Result<Vec<f64>> {
    let spec = args.seq.trim();
    if let Some(rest) = spec.strip_prefix("brun:") {
        let v = coords(rest, 2)?;
        return Ok(SimplexPoint::new(v[0], v[1]).frequency().to_vec());
    }
    if let Some(rest) = spec.strip_prefix("ar:") {
        return Ok(sum_normalize(&coords(rest, 3)?));
    }
    let n = args.u_depth.min(seq.known_len().unwrap_or(usize::MAX));
    Ok(right_eigenvector_approx(seq, n)?.u)
}

fn load(args: &SeqArgs) -> Result<(DirectiveSequence, Vec<f64>)> {
    let seq = DirectiveSequence::parse(&args.seq)?;
    let u = frequency(args, &seq)?;
    Ok((seq, u))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

enum Status {
    Ok,
    Absent,
}

fn render(a: RenderArgs) -> Result<Status> {
    let (seq, u) = load(&a.seq)?;
    let cloud = fractal::rauzy_cloud(&seq, a.depth, a.min_len, &u, &ones(3))?;
    let opts = RenderOptions {
        width: a.width,
        height: a.height,
        extent: a.extent,
        translates: a.translates.map(fractal::lattice_translates),
    };
    let img = raster::render(&cloud, &opts)?;
    fs::write(&a.out, img.to_ppm()).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(p) = &a.csv {
        fs::write(p, cloud.to_csv()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(Status::Ok)
}

/// Digits as a string `i₁i₂…i_n`.
#[derive(Serialize)]
struct Expansion {
    digits: String,
    stopped: Option<String>,
}

fn digit_string(d: &[u8]) -> String {
    d.iter().map(|x| char::from(b'0' + x)).collect()
}

fn expand(a: ExpandArgs) -> Result<Status> {
    if let Some(n) = a.samples {
        let Some(seed) = a.seed else { bail!("--samples requires --seed") };
        let mut csv = String::from("x1,x2\n");
        for p in cf::sample_invariant(n, seed) {
            csv.push_str(&format!("{},{}\n", p.x1, p.x2));
        }
        emit(a.out.as_deref(), csv.trim_end())?;
        return Ok(Status::Ok);
    }
    if let Some(v) = &a.ar {
        let v = coords(v, 3)?;
        let digits = cf::ar_expand(&[v[0], v[1], v[2]], a.n);
        let stopped = (digits.len() < a.n).then(|| "no dominant coordinate".to_string());
        emit(a.out.as_deref(), &json(&Expansion { digits: digit_string(&digits), stopped })?)?;
        return Ok(Status::Ok);
    }
    let Some(p) = &a.point else { bail!("one of --point, --ar or --samples is required") };
    let v = coords(p, 2)?;
    let p = SimplexPoint::new(v[0], v[1]);
    if !p.in_simplex(0.0) {
        bail!("({}, {}) is not in the Brun simplex", v[0], v[1]);
    }
    let e = cf::brun_expand(p, a.n);
    emit(a.out.as_deref(), &json(&Expansion { digits: e.digit_string(), stopped: e.stopped })?)?;
    Ok(Status::Ok)
}

fn coincidence(a: CoincidenceArgs) -> Result<Status> {
    let seq = DirectiveSequence::parse(&a.seq.seq)?;
    let wit: Option<CoincidenceWitness> = match a.kind {
        Kind::Strong => coincidence::strong_coincidence(&seq, a.max_l)?,
        Kind::NegativeStrong => coincidence::negative_strong_coincidence(&seq, a.max_l)?,
        Kind::Geometric => {
            let u = frequency(&a.seq, &seq)?;
            coincidence::find_geometric_coincidence(&seq, a.n_min, a.n, a.c, &u, a.budget)?
        }
        Kind::Finiteness => coincidence::finiteness_witness(&seq, a.n, a.radius)?,
    };
    emit(a.out.as_deref(), &json(&wit)?)?;
    Ok(if wit.is_some() { Status::Ok } else { Status::Absent })
}

fn lyap(a: LyapunovArgs) -> Result<Status> {
    let sampler = Sampler::parse(&a.sampler)?;
    let cfg = LyapunovConfig {
        n_steps: a.steps,
        trials: a.trials,
        seed: a.seed,
        burn_in: a.burn_in,
        transpose: a.transpose,
    };
    let report = lyapunov::lyapunov_estimate(&sampler, &cfg)?;
    emit(a.out.as_deref(), &report.to_json())?;
    let verdict = lyapunov::pisot_condition(&report);
    eprintln!("{}", serde_json::to_string(&verdict)?);
    Ok(if verdict.holds { Status::Ok } else { Status::Absent })
}

fn code(a: CodeArgs) -> Result<Status> {
    let (seq, u) = load(&a.seq)?;
    let cfg = CodingConfig {
        depth: a.depth,
        horizon: a.horizon,
        epsilon: a.epsilon,
        letter: a.letter,
        cloud_len: a.cloud_len,
    };
    let report = dynamics::natural_coding_check(&seq, &u, &cfg)?;
    emit(a.out.as_deref(), &json(&report)?)?;
    if let Some(p) = &a.orbit_out {
        let word = seq.limit_word_prefix(a.depth, a.orbit_steps)?;
        if a.letter == 0 || a.letter > 3 {
            bail!("--letter must be 1, 2 or 3");
        }
        let t = project(&u, &ones(3), &unit(3, a.letter - 1))?;
        let mut x = TorusPoint::zero(3);
        let mut csv = String::from("n,x1,x2,x3,letter\n");
        for (k, l) in word.letters().iter().take(a.orbit_steps).enumerate() {
            let c = &x.coords;
            csv.push_str(&format!("{k},{},{},{},{l}\n", c[0], c[1], c[2]));
            x = torus_translate(&t, &x)?;
        }
        fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(if report.mismatched == 0 { Status::Ok } else { Status::Absent })
}

#[derive(Serialize)]
struct StatsReport {
    seq: String,
    length: usize,
    frequency: Vec<f64>,
    discrepancy: Vec<f64>,
    recurrence: RecurrenceReport,
    price: PriceReport,
    covering: Option<CoverHistogram>,
}

fn stats(a: StatsArgs) -> Result<Status> {
    if a.samples.is_some() && a.seed.is_none() {
        bail!("--samples requires --seed");
    }
    let (seq, u) = load(&a.seq)?;
    let word = seq.limit_word_prefix(a.depth, a.min_len)?;
    let discrepancy = dynamics::bounded_remainder_stats(&word, &u, word.len())?;
    let recurrence = dynamics::recurrence_estimate(&word, a.n_max);
    let price = seq.price_report(a.price_depth, &[1, 2, 3, 4, 6], 6)?;
    let covering = match (a.samples, a.seed) {
        (Some(n), Some(seed)) => {
            let cloud = fractal::rauzy_cloud(&seq, a.depth, a.min_len, &u, &ones(3))?;
            let t = fractal::lattice_translates(a.translates);
            Some(fractal::covering_histogram(&cloud, &t, a.epsilon, n, seed)?)
        }
        _ => None,
    };
    let report = StatsReport {
        seq: seq.describe(),
        length: word.len(),
        frequency: u,
        discrepancy,
        recurrence,
        price,
        covering,
    };
    emit(a.out.as_deref(), &json(&report)?)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct Verification {
    kind: String,
    index: usize,
    valid: bool,
}

fn verify(a: VerifyArgs) -> Result<Status> {
    let text = fs::read_to_string(&a.witness).with_context(|| format!("reading {}", a.witness.display()))?;
    let wit = CoincidenceWitness::from_json(&text)?;
    let valid = match &a.seq {
        Some(s) => coincidence::verify_witness(&DirectiveSequence::parse(s)?, &wit)?,
        None => coincidence::verify_standalone(&wit)?,
    };
    let kind = serde_json::to_value(wit.kind)?.as_str().unwrap_or_default().to_string();
    emit(None, &json(&Verification { kind, index: wit.index, valid })?)?;
    Ok(if valid { Status::Ok } else { Status::Absent })
}

fn run(cli: Cli) -> Result<Status> {
    match cli.cmd {
        Cmd::Render(a) => render(a),
        Cmd::Expand(a) => expand(a),
        Cmd::Coincidence(a) => coincidence(a),
        Cmd::Lyapunov(a) => lyap(a),
        Cmd::Code(a) => code(a),
        Cmd::Stats(a) => stats(a),
        Cmd::Verify(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Absent) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
