//! `haarlab`: certificates for the Haar-small set constructions.
//!
//! Exit codes: 0 when the run certifies what it was asked to (or a checked
//! report re-verifies), 2 when it is inconclusive at the depth cap, 1 for
//! usage and internal errors.

mod inputs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use haarlab_core::certifier::{
    carry_intersection_point, certify_haar1_gap_sequence, check, refute_haar1_difference_interval,
    refute_haar_countable, refute_haar_finite_x, refute_null_finite, verify_haar_n, verify_sampled_tuple, Certificate,
    Status,
};
use haarlab_core::constructions::{make_from_id, ternary};
use haarlab_core::digits::{DigitSetExpr, FamilyKind};
use haarlab_core::interval::{Interval, IntervalUnion};
use haarlab_core::numeric::{format_rational, parse_rational, rat, recip, RadixRule, Rational, Schedule};
use haarlab_core::witness::{
    build_cl_witness, build_notideal_d, build_notideal_e, build_ternary_haar2_witness, CantorWitness, WSchedule,
};
use haarlab_core::SetDescriptor;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "haarlab", version, about = "Exact certificates for translates of digit-constrained Cantor sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the full JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads for tuple checks (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that a witness Cantor set has the claimed Haar-n property.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Exhibit a common point (or a difference-set fixed point) refuting smallness.
    Refute {
        #[command(subcommand)]
        target: RefuteTarget,
    },
    /// Project a named construction and write it as JSON.
    Construct {
        /// Construction id, e.g. `ternary`, `cl(0)`, `reflect(notideal_X)`.
        #[arg(long)]
        name: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_name = "FILE")]
        emit: PathBuf,
    },
    /// Re-verify a certificate report independently of the search that made it.
    Check { file: PathBuf },
}

#[derive(Args, Clone, Copy)]
struct DepthArgs {
    /// Projection depth of the first attempt.
    #[arg(long)]
    depth: Option<usize>,
    /// Double the depth after an inconclusive attempt, up to this cap.
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// All triples of a ternary witness generation.
    TernaryHaar2 {
        #[arg(long, default_value_t = 2)]
        generation: usize,
        #[command(flatten)]
        depth: DepthArgs,
    },
    /// One sampled tuple of the blockwise witness for `C_l`.
    #[command(name = "cl-haarN")]
    ClHaarN {
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[command(flatten)]
        tuple: TupleArgs,
    },
    /// One sampled tuple of the witness `D` against the set `A`.
    #[command(name = "notideal-D")]
    NotidealD {
        #[command(flatten)]
        tuple: TupleArgs,
    },
    /// One sampled tuple of the witness `E` against the set `B`.
    #[command(name = "notideal-E")]
    NotidealE {
        #[command(flatten)]
        tuple: TupleArgs,
    },
    /// `(A - d) ∩ A = ∅` for the companion gap sequence of a set.
    Haar1Gaps {
        #[arg(long)]
        set: String,
        /// Number of gaps to certify.
        #[arg(long, default_value_t = 10)]
        terms: usize,
        #[command(flatten)]
        depth: DepthArgs,
    },
}

#[derive(Args)]
struct TupleArgs {
    /// Witness generation (default: the first one).
    #[arg(long)]
    generation: Option<usize>,
    /// Slot of the generation (default: first slot above the served level).
    #[arg(long)]
    slot: Option<u128>,
    /// Depth of the first attempt (default: one level below the slot).
    #[command(flatten)]
    depth: DepthArgs,
}

#[derive(Subcommand)]
enum RefuteTarget {
    /// Decide `A - A` by the fixed-point identity of its difference IFS.
    Haar1 {
        #[arg(long)]
        set: String,
        /// Closed interval `LO HI` of the candidate; repeat for unions.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, required = true)]
        candidate_interval: Vec<String>,
    },
    /// A common point of `A_m - x_m`, `m <= n`, by digit carrying.
    #[command(name = "haarN")]
    HaarN {
        /// `haar_family(n)`.
        #[arg(long)]
        family: String,
        /// Increasing anchors spanning less than 1/5 (default: ternary points).
        #[arg(long, value_name = "FILE")]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// A point of `⋂ (X - c_i)` for decreasing translates.
    #[command(name = "haar-finite-X")]
    HaarFiniteX {
        #[arg(long, value_name = "FILE")]
        points: Option<PathBuf>,
        /// Number of default translates when no file is given.
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// A point hit by the first `count` terms of a monotone sequence in `X ∪ -X`.
    #[command(name = "null-finite-Y")]
    NullFiniteY {
        #[arg(long, value_name = "FILE")]
        points: Option<PathBuf>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        limit: String,
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Use the increasing default sample.
        #[arg(long)]
        increasing: bool,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// A point of `⋂ (X - e)` for the null-meager set and sparse witness points.
    HaarCountable {
        /// `nullmeager` or `nullmeager(k_0,k_1,...)`.
        #[arg(long, default_value = "nullmeager")]
        set: String,
        /// Witness points (default: branch values of an extracted sub-Cantor set).
        #[arg(long, value_name = "FILE")]
        points: Option<PathBuf>,
        /// Generations of the extracted sub-Cantor set.
        #[arg(long, default_value_t = 2)]
        generations: usize,
        /// Digits the point must start with, e.g. `2` or `2,0,4`.
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<u64>,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
}

/// Runs `attempt` at `start`, doubling the depth while inconclusive and
/// below `cap`.
fn escalate(start: usize, cap: Option<usize>, attempt: impl Fn(usize) -> Result<Certificate>) -> Result<Certificate> {
    if start == 0 {
        bail!("depth must be at least 1");
    }
    let cap = cap.unwrap_or(start).max(start);
    let mut depth = start;
    loop {
        let cert = attempt(depth)?;
        if cert.status != Status::InconclusiveAtDepth || depth >= cap {
            return Ok(cert);
        }
        depth = (depth * 2).min(cap);
    }
}

fn named_set(id: &str) -> Result<DigitSetExpr> {
    Ok(make_from_id(id)?.expr)
}

fn sampled(set: &DigitSetExpr, witness: &CantorWitness, args: &TupleArgs) -> Result<Certificate> {
    let scheme = witness.block_scheme().context("witness has no blocks")?;
    let generation = args.generation.unwrap_or_else(|| scheme.first_generation());
    let slot = match args.slot {
        Some(p) => p,
        None => scheme.default_slot(generation)?,
    };
    let start = match args.depth.depth {
        Some(d) => d,
        None => witness.sampled_tuple(generation, slot)?.last_level + 1,
    };
    escalate(start, args.depth.max_depth, |d| Ok(verify_sampled_tuple(set, witness, generation, Some(slot), d)?))
}

fn verify(target: &VerifyTarget) -> Result<Certificate> {
    match target {
        VerifyTarget::TernaryHaar2 { generation, depth } => {
            let witness = build_ternary_haar2_witness();
            let set = ternary();
            escalate(depth.depth.unwrap_or(40), depth.max_depth, |d| {
                Ok(verify_haar_n(&set, &witness, 2, *generation, d)?)
            })
        }
        VerifyTarget::ClHaarN { l, tuple } => sampled(&named_set(&format!("cl({l})"))?, &build_cl_witness(*l)?, tuple),
        VerifyTarget::NotidealD { tuple } => {
            sampled(&DigitSetExpr::family(FamilyKind::A, 0), &build_notideal_d(WSchedule::constant_m0())?, tuple)
        }
        VerifyTarget::NotidealE { tuple } => {
            sampled(&DigitSetExpr::family(FamilyKind::B, 0), &build_notideal_e(WSchedule::constant_m0())?, tuple)
        }
        VerifyTarget::Haar1Gaps { set, terms, depth } => {
            let construction = make_from_id(set)?;
            let gaps = construction.companions.gaps.get(..*terms).with_context(|| {
                format!("{set} has {} companion gaps, asked for {terms}", construction.companions.gaps.len())
            })?;
            let start = match depth.depth {
                Some(d) => d,
                None => resolving_depth(&construction.expr, gaps.last().context("no gaps requested")?)?,
            };
            escalate(start, depth.max_depth, |d| Ok(certify_haar1_gap_sequence(&construction.expr, gaps, d)?))
        }
    }
}

/// Four levels past the first one whose cells are narrower than `gap`.
fn resolving_depth(set: &DigitSetExpr, gap: &Rational) -> Result<usize> {
    let system = set.system();
    (0..4096)
        .find(|&level| recip(&system.q(level)) < *gap)
        .map(|level| level + 5)
        .context("gap is below every cell width")
}

fn candidate(values: &[String]) -> Result<IntervalUnion> {
    let intervals = values
        .chunks(2)
        .map(|pair| Ok(Interval::new(parse_rational(&pair[0])?, parse_rational(&pair[1])?)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalUnion::from_intervals(intervals))
}

fn family_arity(id: &str) -> Result<usize> {
    let construction = make_from_id(id)?;
    match (construction.name.as_str(), construction.params.as_slice()) {
        ("haar_family", [n]) => Ok(usize::try_from(*n)?),
        _ => bail!("expected haar_family(n), got {id}"),
    }
}

fn refute(target: &RefuteTarget) -> Result<Certificate> {
    Ok(match target {
        RefuteTarget::Haar1 { set, candidate_interval } => {
            refute_haar1_difference_interval(&named_set(set)?, &candidate(candidate_interval)?)?
        }
        RefuteTarget::HaarN { family, points, depth } => {
            let n = family_arity(family)?;
            let anchors = inputs::points_or(points.as_deref(), || inputs::ternary_anchors(n))?;
            carry_intersection_point(n, &anchors, *depth)?
        }
        RefuteTarget::HaarFiniteX { points, count, depth } => {
            let translates = inputs::points_or(points.as_deref(), || Ok(inputs::ternary_decreasing(*count)))?;
            refute_haar_finite_x(&translates, *depth)?
        }
        RefuteTarget::NullFiniteY { points, limit, count, increasing, depth } => {
            let limit = parse_rational(limit)?;
            let sequence = inputs::points_or(points.as_deref(), || {
                let sign = if *increasing { rat(-1, 1) } else { rat(1, 1) };
                Ok(inputs::ternary_decreasing(*count).into_iter().map(|c| &limit + c * &sign).collect())
            })?;
            refute_null_finite(&sequence, &limit, *count, *depth)?
        }
        RefuteTarget::HaarCountable { set, points, generations, prefix, depth } => {
            let set = named_set(set)?;
            let RadixRule::NullMeager { schedule } = &set.system().rule else {
                bail!("haar-countable needs a nullmeager set");
            };
            let schedule: Schedule = schedule.clone();
            let points = inputs::points_or(points.as_deref(), || inputs::sparse_branch_points(schedule, *generations))?;
            refute_haar_countable(&set, &points, prefix, *depth)?
        }
    })
}

#[derive(Serialize)]
struct Projection {
    id: String,
    descriptor: SetDescriptor,
    depth: usize,
    #[serde(with = "haarlab_core::numeric::rational_str")]
    total_length: Rational,
    intervals: IntervalUnion,
}

fn construct(name: &str, depth: usize, emit: &Path, json: bool) -> Result<()> {
    let construction = make_from_id(name)?;
    if depth > construction.horizon {
        bail!("{name} projects only up to depth {}", construction.horizon);
    }
    let intervals = construction.expr.project(depth)?;
    let total_length = intervals.intervals().iter().map(|iv| &iv.hi - &iv.lo).sum();
    let projection = Projection {
        id: construction.id(),
        descriptor: SetDescriptor::from_expr(&construction.expr),
        depth,
        total_length,
        intervals,
    };
    let text = serde_json::to_string_pretty(&projection)?;
    std::fs::write(emit, &text).with_context(|| format!("writing {}", emit.display()))?;
    if json {
        println!("{text}");
    } else {
        println!(
            "{}: {} intervals at depth {depth}, total length {} -> {}",
            projection.id,
            projection.intervals.intervals().len(),
            format_rational(&projection.total_length),
            emit.display()
        );
    }
    Ok(())
}

/// The serialized name of a unit enum variant.
fn label<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn summary(cert: &Certificate) -> String {
    let mut lines =
        vec![format!("{:?} {} at depth {} ({} ms)", cert.claim.kind, label(&cert.status), cert.depth, cert.elapsed_ms)];
    if let Some(v) = cert.verdict {
        lines.push(format!("verdict: {}", label(&v)));
    }
    if !cert.children.is_empty() {
        lines.push(format!(
            "tuples: {} certified empty, {} inconclusive",
            cert.children.iter().map(|c| c.count_status(Status::CertifiedEmpty)).sum::<usize>(),
            cert.children.iter().map(|c| c.count_status(Status::InconclusiveAtDepth)).sum::<usize>()
        ));
    }
    if let Some(p) = &cert.point {
        lines.push(format!("point: {}", format_rational(&p.value)));
        for m in &p.memberships {
            lines.push(format!(
                "  {} in set {}: {}",
                format_rational(&m.value),
                m.set,
                if m.holds { "yes" } else { "no" }
            ));
        }
    }
    if let Some(r) = cert.residual.as_ref().filter(|r| !r.is_empty()) {
        lines.push(format!(
            "residual sample: {} interval(s), first [{}, {}]",
            r.len(),
            format_rational(&r[0].lo),
            format_rational(&r[0].hi)
        ));
    }
    lines.join("\n")
}

fn report(cert: &Certificate, cli: &Cli) -> Result<ExitCode> {
    let text = cert.to_json();
    if let Some(path) = &cli.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.json {
        println!("{text}");
    } else {
        println!("{}", summary(cert));
    }
    Ok(match cert.status {
        Status::InconclusiveAtDepth => ExitCode::from(2),
        Status::CertifiedEmpty | Status::PointFound => ExitCode::SUCCESS,
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting workers")?;
    }
    match &cli.command {
        Command::Verify { target } => report(&verify(target)?, cli),
        Command::Refute { target } => report(&refute(target)?, cli),
        Command::Construct { name, depth, emit } => {
            construct(name, *depth, emit, cli.json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let cert = Certificate::from_json(&text)?;
            let result = check(&cert)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&result)?);
            } else if result.ok {
                println!("check passed ({})", result.method);
            } else {
                println!("check FAILED ({})", result.method);
                for f in &result.failures {
                    println!("  {f}");
                }
            }
            Ok(if result.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
