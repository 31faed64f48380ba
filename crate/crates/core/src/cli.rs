//! The `rlwe` command line.
//!
//! Machine output (CSV or JSON) goes to stdout or `--out`; human-readable
//! text goes to stderr. Exit codes: 0 success, 1 runtime failure, 2 usage
//! error (bad flags or inadmissible parameters).
//!
//! Frozen CSV columns:
//!
//! * `find-params`: `p,d,q,deg,log2_disc,suggested_r_for_r0`
//! * `estimate`: `m,q,k,degree,neg_floor_log2_eps,log2_bound,beta,runtime_ms`,
//!   followed by `empirical_chi2,empirical_threshold,uniform` with `--empirical`
//! * `attack`: `verdict,candidate_u,candidate_v,samples_used,elapsed_ms,guess_loop_iterations,threshold`

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::attack::{self, AttackConfig, AttackOutcome};
use crate::error::{Error, Result};
use crate::estimator::{self, EmpiricalReport, EstimateReport};
use crate::family::{self, FamilyParams};
use crate::ffield::Fq2;
use crate::numberring::{scaled_width_r0, CycloRing, FamilyRing, Ring};
use crate::oracle::{self, ErrorSpec, RlweInstance, SampleSet};
use crate::sampler::{BinomialSpec, GaussianSpec};

/// Degree-2 runs above this many cosine factors need `--long-run`.
pub const LONG_RUN_WORK: u64 = 50_000_000;

#[derive(Debug, Parser)]
#[command(name = "rlwe", version, about = "Chi-square attacks on non-dual Ring-LWE and Fourier uniformity estimates")]
pub struct Cli {
    /// Worker threads for all parallel loops (default: logical cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write machine output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AttackKind {
    TwoBin,
    Coset,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List admissible (p, d, q) triples.
    FindParams(FindParamsArgs),
    /// Write an RLWE (or uniform) sample set as JSONL.
    GenSamples(GenSamplesArgs),
    /// Run the two-bin or coset attack on a sample file.
    Attack(AttackArgs),
    /// Compute ε(m, q, k) and the Gauss-sum bound.
    Estimate(EstimateArgs),
}

#[derive(Debug, clap::Args)]
pub struct FindParamsArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub q_min: Option<u64>,
    #[arg(long)]
    pub q_max: Option<u64>,
    /// With `--q`, list d + 4kq for k = 1..=K instead of searching q.
    #[arg(long, requires = "q")]
    pub extend_k: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Target scaled width for the suggested r column.
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
}

#[derive(Debug, clap::Args)]
pub struct GenSamplesArgs {
    #[arg(long, requires = "d", conflicts_with = "m")]
    pub p: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    /// 2-power cyclotomic conductor.
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub q: u64,
    /// Gaussian width r.
    #[arg(long, group = "err")]
    pub r: Option<f64>,
    /// Scaled Gaussian width r0 = r / |disc|^(1/(2·deg)).
    #[arg(long, group = "err")]
    pub r0: Option<f64>,
    /// Coefficient-wise V_k error.
    #[arg(long, group = "err")]
    pub k: Option<u32>,
    /// Number of records (default 10q).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw a uniform decoy instead of RLWE samples.
    #[arg(long)]
    pub uniform: bool,
}

#[derive(Debug, clap::Args)]
pub struct AttackArgs {
    /// JSONL sample file.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, value_enum, default_value_t = AttackKind::Coset)]
    pub attack: AttackKind,
    /// Critical chi-square value; overrides --confidence.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Per-test confidence (default 1 − 0.01/#tests, with #tests = q² or q).
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub min_samples: usize,
    /// Rebuild the secret from the header seed and check the result.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, clap::Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub degree: u32,
    /// Allow degree-2 instances above the default work budget.
    #[arg(long)]
    pub long_run: bool,
    /// Also draw errors and test their residues for uniformity.
    #[arg(long)]
    pub empirical: bool,
    /// Gaussian scaled width for the empirical run (default: V_k errors).
    #[arg(long, requires = "empirical")]
    pub r0: Option<f64>,
    /// Empirical sample count (default 10q).
    #[arg(long, requires = "empirical")]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidFamily(_)
        | Error::InvalidParameter(_)
        | Error::NotOddPrime(_)
        | Error::NotNonresidue { .. }
        | Error::NoElementOfOrder { .. }
        | Error::Undecided(_) => 2,
        _ => 1,
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::InvalidParameter("--workers must be at least 1".into()));
        }
    }
    let workers = cli.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::FindParams(a) => cmd_find_params(cli, a),
        Command::GenSamples(a) => cmd_gen_samples(cli, a),
        Command::Attack(a) => cmd_attack(cli, a, workers),
        Command::Estimate(a) => cmd_estimate(cli, a),
    })
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn write(&self, bytes: &[u8]) -> Result<()> {
        match &self.path {
            Some(p) => {
                let io = |source| Error::Io { path: p.clone(), source };
                let mut f = BufWriter::new(File::create(p).map_err(io)?);
                f.write_all(bytes).map_err(io)?;
                f.flush().map_err(io)
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(bytes)
                    .and_then(|_| out.flush())
                    .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
            }
        }
    }
}

fn csv_bytes<R: Serialize>(rows: &[R], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))
}

fn json_bytes<T: Serialize + ?Sized>(v: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("report serializes");
    b.push(b'\n');
    b
}

#[derive(Serialize)]
struct ParamRow {
    p: u64,
    d: u64,
    q: u64,
    deg: usize,
    log2_disc: f64,
    suggested_r_for_r0: f64,
}

fn cmd_find_params(cli: &Cli, a: &FindParamsArgs) -> Result<()> {
    let rows: Vec<FamilyParams> = match (a.extend_k, a.q) {
        (Some(k), Some(q)) => family::extend_d(a.p, q, a.d, k)?,
        _ => {
            let (lo, hi) = match (a.q_min, a.q_max, a.q) {
                (Some(lo), Some(hi), _) => (lo, hi),
                (None, None, Some(q)) => (q, q),
                _ => return Err(Error::InvalidParameter("give --q-min and --q-max, or --q".into())),
            };
            family::search_q(a.p, a.d, lo, hi)?
        }
    };
    let rows: Vec<ParamRow> = rows
        .iter()
        .map(|f| ParamRow { p: f.p, d: f.d, q: f.q, deg: f.deg, log2_disc: f.log2_disc, suggested_r_for_r0: f.r_for_r0(a.r0) })
        .collect();
    let out = Output { path: cli.out.clone() };
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => out.write(&csv_bytes(&rows, &["p", "d", "q", "deg", "log2_disc", "suggested_r_for_r0"])?),
        Format::Json => out.write(&json_bytes(&rows)),
        Format::Human => {
            eprintln!("{} admissible triple(s)", rows.len());
            for r in &rows {
                eprintln!(
                    "  p={} d={} q={} deg={} log2|disc|={:.3} r(r0={})={:.3}",
                    r.p, r.d, r.q, r.deg, r.log2_disc, a.r0, r.suggested_r_for_r0
                );
            }
            Ok(())
        }
    }
}

fn gen_ring(a: &GenSamplesArgs) -> Result<Ring> {
    match (a.p, a.d, a.m) {
        (Some(p), Some(d), None) => Ok(Ring::Family(FamilyRing::new(p, d, a.q)?)),
        (None, None, Some(m)) => Ok(Ring::Cyclo(CycloRing::new(m, a.q)?)),
        _ => Err(Error::InvalidParameter("give either --p and --d, or --m".into())),
    }
}

fn cmd_gen_samples(cli: &Cli, a: &GenSamplesArgs) -> Result<()> {
    let ring = gen_ring(a)?;
    let error = match (a.r, a.r0, a.k) {
        (Some(r), None, None) => ErrorSpec::Gaussian(GaussianSpec::new(r)?),
        (None, Some(r0), None) => {
            let root = (ring.ln_disc() / (2.0 * ring.deg() as f64)).exp();
            ErrorSpec::Gaussian(GaussianSpec::new(r0 * root)?)
        }
        (None, None, Some(k)) => ErrorSpec::Binomial(BinomialSpec::new(k)?),
        (None, None, None) if a.uniform => ErrorSpec::Zero,
        _ => return Err(Error::InvalidParameter("give exactly one of --r, --r0, --k".into())),
    };
    let count = a.count.unwrap_or(10 * a.q as usize);
    let inst = RlweInstance::new(ring.clone(), error, a.seed)?;
    if !a.uniform && inst.below_fidelity_floor() {
        eprintln!("warning: some lattice sampler levels run below the fidelity floor width");
    }
    let set = if a.uniform { oracle::draw_uniform(&inst, count)? } else { oracle::draw_rlwe(&inst, count)? };
    Output { path: cli.out.clone() }.write(&set.to_bytes())?;
    if let ErrorSpec::Gaussian(g) = error {
        eprintln!("r = {:.4}, r0 = {:.4}", g.r, scaled_width_r0(g.r, &ring));
    }
    eprintln!(
        "wrote {} {} records (seed {}, secret {})",
        set.len(),
        set.header.error_kind,
        a.seed,
        &set.header.secret_hash[..16]
    );
    Ok(())
}

#[derive(Serialize)]
struct AttackReport<'a> {
    attack: &'static str,
    #[serde(flatten)]
    outcome: &'a AttackOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
}

#[derive(Clone, Debug, Serialize)]
struct Verification {
    secret_hash_ok: bool,
    reduced_secret: Fq2,
    matches_secret: bool,
}

#[derive(Serialize)]
struct AttackRow {
    verdict: String,
    candidate_u: Option<u64>,
    candidate_v: Option<u64>,
    samples_used: usize,
    elapsed_ms: u64,
    guess_loop_iterations: u64,
    threshold: f64,
}

/// Regenerates the secret from the header seed and compares `ρ(s)`.
fn verify(set: &SampleSet, outcome: &AttackOutcome) -> Result<Verification> {
    let ring = set.ring()?;
    let inst = RlweInstance::new(ring.clone(), ErrorSpec::Zero, set.header.seed)?;
    let Ring::Family(f) = &ring else {
        return Err(Error::InvalidParameter("verification needs a family ring".into()));
    };
    let reduced = f.reduce(inst.secret());
    Ok(Verification {
        secret_hash_ok: inst.secret_hash() == set.header.secret_hash,
        reduced_secret: reduced,
        matches_secret: outcome.candidate == Some(reduced),
    })
}

fn cmd_attack(cli: &Cli, a: &AttackArgs, workers: usize) -> Result<()> {
    let set = SampleSet::load(&a.samples)?;
    let q = set.header.q;
    let (mut config, tests) = match a.attack {
        AttackKind::TwoBin => (AttackConfig::two_bin_default(q, set.len()), q * q),
        AttackKind::Coset => (AttackConfig::coset_default(q), q),
    };
    if let Some(c) = a.confidence {
        config.threshold = match a.attack {
            AttackKind::TwoBin => {
                attack::critical_value(1, c)?;
                attack::two_bin_critical_value(set.len(), q, 1.0 - c)
            }
            AttackKind::Coset => attack::critical_value(q - 1, c)?,
        };
    }
    if let Some(t) = a.threshold {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("threshold must be positive, got {t}")));
        }
        config.threshold = t;
    }
    config.min_samples = a.min_samples;
    config.workers = workers;
    let outcome = match a.attack {
        AttackKind::TwoBin => attack::two_bin_attack(&set, &config)?,
        AttackKind::Coset => attack::coset_attack(&set, &config)?,
    };
    let verification = if a.verify { Some(verify(&set, &outcome)?) } else { None };
    let name = match a.attack {
        AttackKind::TwoBin => "two-bin",
        AttackKind::Coset => "coset",
    };
    let report = AttackReport { attack: name, outcome: &outcome, verification: verification.clone() };
    let out = Output { path: cli.out.clone() };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => out.write(&json_bytes(&report))?,
        Format::Csv => {
            let row = AttackRow {
                verdict: outcome.verdict.to_string(),
                candidate_u: outcome.candidate.map(|c| c.u),
                candidate_v: outcome.candidate.map(|c| c.v),
                samples_used: outcome.samples_used,
                elapsed_ms: outcome.elapsed_ms,
                guess_loop_iterations: outcome.guess_loop_iterations,
                threshold: outcome.threshold,
            };
            out.write(&csv_bytes(
                &[row],
                &["verdict", "candidate_u", "candidate_v", "samples_used", "elapsed_ms", "guess_loop_iterations", "threshold"],
            )?)?
        }
        Format::Human => {}
    }
    let max_chi2 = outcome.chi2_by_index.iter().copied().fold(f64::NAN, f64::max);
    eprintln!(
        "{name} attack on {}: {} ({} samples used, {} of {tests} guesses iterated, max χ² {:.1} vs {:.1}, {} ms)",
        path_label(&a.samples),
        match outcome.candidate {
            Some(c) => format!("GUESS {c}"),
            None => outcome.verdict.to_string(),
        },
        outcome.samples_used,
        outcome.guess_loop_iterations,
        max_chi2,
        outcome.threshold,
        outcome.elapsed_ms
    );
    if let Some(v) = verification {
        eprintln!(
            "verify: secret hash {}, ρ(s) = {}, candidate {}",
            if v.secret_hash_ok { "ok" } else { "MISMATCH" },
            v.reduced_secret,
            if v.matches_secret { "matches" } else { "does not match" }
        );
    }
    Ok(())
}

fn path_label(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    #[serde(flatten)]
    report: &'a EstimateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<&'a EmpiricalReport>,
}

#[derive(Serialize)]
struct EstimateRow {
    m: u64,
    q: u64,
    k: u32,
    degree: u32,
    neg_floor_log2_eps: i64,
    log2_bound: Option<f64>,
    beta: f64,
    runtime_ms: u64,
}

#[derive(Serialize)]
struct EstimateRowEmpirical {
    #[serde(flatten)]
    base: EstimateRow,
    empirical_chi2: f64,
    empirical_threshold: f64,
    uniform: bool,
}

fn cmd_estimate(cli: &Cli, a: &EstimateArgs) -> Result<()> {
    let report = match a.degree {
        1 => estimator::epsilon(a.m, a.q, a.k)?,
        _ => {
            let work = (a.m / 2).saturating_mul(a.q.saturating_mul(a.q) / 2);
            if work > LONG_RUN_WORK && !a.long_run {
                return Err(Error::InvalidParameter(format!(
                    "degree-2 estimate for (m={}, q={}) needs about {work} cosine factors; pass --long-run",
                    a.m, a.q
                )));
            }
            estimator::epsilon_deg2(a.m, a.q, a.k)?
        }
    };
    let empirical = if a.empirical {
        if a.degree != 1 {
            return Err(Error::InvalidParameter("--empirical needs --degree 1".into()));
        }
        let count = a.count.unwrap_or(10 * a.q as usize);
        Some(estimator::empirical_uniformity(a.m, a.q, a.k, a.r0, count, a.seed, a.confidence)?)
    } else {
        None
    };
    let out = Output { path: cli.out.clone() };
    let base = EstimateRow {
        m: report.m,
        q: report.q,
        k: report.k,
        degree: report.degree,
        neg_floor_log2_eps: report.neg_floor_log2_eps,
        log2_bound: report.log2_bound,
        beta: report.beta,
        runtime_ms: report.runtime_ms,
    };
    let header = ["m", "q", "k", "degree", "neg_floor_log2_eps", "log2_bound", "beta", "runtime_ms"];
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => match &empirical {
            None => out.write(&csv_bytes(&[base], &header)?)?,
            Some(e) => {
                let mut h = header.to_vec();
                h.extend(["empirical_chi2", "empirical_threshold", "uniform"]);
                let row = EstimateRowEmpirical { base, empirical_chi2: e.chi2, empirical_threshold: e.threshold, uniform: e.uniform };
                out.write(&csv_bytes(&[row], &h)?)?
            }
        },
        Format::Json => out.write(&json_bytes(&EstimateOutput { report: &report, empirical: empirical.as_ref() }))?,
        Format::Human => {}
    }
    eprintln!(
        "ε({}, {}, {}) degree {}: log2 ε = {:.3}, −⌊log2 ε⌋ = {}, bound {}, β = {:.5} ({} roots, {} ms)",
        report.m,
        report.q,
        report.k,
        report.degree,
        report.log2_eps,
        report.neg_floor_log2_eps,
        report.log2_bound.map(|b| format!("2^{b:.2}")).unwrap_or_else(|| "n/a (q ≥ m²)".into()),
        report.beta,
        report.per_root.len(),
        report.runtime_ms
    );
    if let Some(e) = &empirical {
        eprintln!(
            "empirical ({} {} errors, seed {}): χ² = {:.1} vs {:.1}, uniform: {}",
            e.count,
            e.error_kind,
            e.seed,
            e.chi2,
            e.threshold,
            if e.uniform { "yes" } else { "no" }
        );
    }
    Ok(())
}
