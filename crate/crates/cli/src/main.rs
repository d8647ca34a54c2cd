use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rbslab_cli::job::{parse_cap, Command, JobSpec, UsageError};
use rbslab_cli::{run, Cache, Report, RunOptions};
use rbslab_core::homology::Coefficients;

/// Exact computations with reductive Borel-Serre categories of finite
/// local rings.
///
/// Rings: F<p>, F<q> or F<q>:<poly> (e.g. F4:t^2+t+1), Z<p^k> (e.g. Z4,
/// Z8), F<p>[t]/t^<k> (e.g. F2[t]/t^2). Coefficients: Z, F<p> or Fp:<p>.
/// Results are cached under $RBSLAB_CACHE_DIR.
#[derive(Parser, Debug)]
#[command(name = "rbslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Write the report as JSON (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Write the report as `path,value` CSV rows.
    #[arg(long, global = true)]
    csv: bool,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Override an enumeration cap, e.g. `--cap chains=1000000`.
    #[arg(long = "cap", global = true, value_name = "KEY=VALUE")]
    caps: Vec<String>,

    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Leave out timings and the cache flag, so equal jobs give
    /// byte-identical reports.
    #[arg(long, global = true)]
    payload_only: bool,
}

#[derive(Args, Debug)]
struct RingArgs {
    #[arg(long)]
    ring: String,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value = "Z")]
    coeff: String,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Reduced homology of the Tits complex.
    Tits {
        #[command(flatten)]
        r: RingArgs,
    },
    /// Homology of the nerve of RBS(R^n).
    RbsHomology {
        #[command(flatten)]
        r: RingArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Homology of the nerve of RBS(R^n) relative to its boundary.
    RbsRelative {
        #[command(flatten)]
        r: RingArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Compares H(RBS, ∂RBS; F_p) with the Borel pair of the flag poset.
    CofibreCheck {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        rank: usize,
        #[arg(long = "p")]
        p: u32,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// The functor RBS(R^(n-1)) -> RBS(R^n) and its maps on homology.
    StabMap {
        /// Target rank n.
        #[command(flatten)]
        r: RingArgs,
        #[arg(long, default_value_t = 1)]
        max_degree: usize,
    },
    /// The Steinberg module and its GL_n(R) coinvariants.
    Steinberg {
        #[command(flatten)]
        r: RingArgs,
    },
    /// GL_n(R) coinvariants of the Steinberg module.
    Coinvariants {
        #[command(flatten)]
        r: RingArgs,
    },
    /// H_1 of RBS(R^n) from the nerve and as (GL_n(R)/E)^ab.
    H1 {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Homology of a category against its twisted arrow category.
    TwistedArrow {
        /// rbs, rbs-skeleton, flags, bz2 or random:<seed>
        #[arg(long)]
        target: String,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value = "Z")]
        coeff: String,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Partition of a word into maximally snug substrings.
    Snug {
        /// Ordered alphabets, e.g. "1<2<3|4<5|6".
        #[arg(long)]
        context: String,
        #[arg(long)]
        word: String,
    },
    /// Exhaustive round trip between Δ^op and Ord±.
    OrdpmRoundtrip {
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Reduced filtered dimension sequences and their morphisms.
    Fred {
        /// Check the poset property for this total dimension.
        #[arg(long)]
        total: Option<u32>,
        /// Source sequence, e.g. "(1,1),(2)".
        #[arg(long, requires = "to")]
        from: Option<String>,
        #[arg(long, requires = "from")]
        to: Option<String>,
    },
    /// Runs the acceptance criteria.
    AcceptanceGrid {
        /// Only these criteria, e.g. `--only 2,8`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn coeff(text: &str) -> Result<String, UsageError> {
    Coefficients::from_str(text).map(|c| c.to_string()).map_err(|e| UsageError(e.to_string()))
}

fn ring_job(command: Command, r: RingArgs) -> Result<JobSpec, UsageError> {
    Ok(JobSpec {
        ring: Some(r.ring),
        rank: Some(r.rank),
        coeff: Some(coeff(&r.coeff)?),
        ..JobSpec::new(command)
    })
}

fn to_job(cli: Cli) -> Result<(JobSpec, bool, bool, bool), UsageError> {
    let mut job = match cli.command {
        Cmd::Tits { r } => ring_job(Command::Tits, r)?,
        Cmd::RbsHomology { r, max_degree } => JobSpec {
            max_degree: Some(max_degree),
            ..ring_job(Command::RbsHomology, r)?
        },
        Cmd::RbsRelative { r, max_degree } => JobSpec {
            max_degree: Some(max_degree),
            ..ring_job(Command::RbsRelative, r)?
        },
        Cmd::CofibreCheck { ring, rank, p, max_degree } => JobSpec {
            ring: Some(ring),
            rank: Some(rank),
            prime: Some(p),
            max_degree: Some(max_degree),
            ..JobSpec::new(Command::CofibreCheck)
        },
        Cmd::StabMap { r, max_degree } => JobSpec {
            max_degree: Some(max_degree),
            ..ring_job(Command::StabMap, r)?
        },
        Cmd::Steinberg { r } => ring_job(Command::Steinberg, r)?,
        Cmd::Coinvariants { r } => ring_job(Command::Coinvariants, r)?,
        Cmd::H1 { ring, rank } => JobSpec {
            ring: Some(ring),
            rank: Some(rank),
            ..JobSpec::new(Command::H1)
        },
        Cmd::TwistedArrow {
            target,
            ring,
            rank,
            coeff: c,
            max_degree,
        } => JobSpec {
            target: Some(target),
            ring,
            rank,
            coeff: Some(coeff(&c)?),
            max_degree: Some(max_degree),
            ..JobSpec::new(Command::TwistedArrow)
        },
        Cmd::Snug { context, word } => JobSpec {
            context: Some(context),
            word: Some(word),
            ..JobSpec::new(Command::Snug)
        },
        Cmd::OrdpmRoundtrip { max_size } => JobSpec {
            max_size: Some(max_size),
            ..JobSpec::new(Command::OrdpmRoundtrip)
        },
        Cmd::Fred { total, from, to } => JobSpec {
            total,
            from,
            to,
            ..JobSpec::new(Command::Fred)
        },
        Cmd::AcceptanceGrid { mut only } => {
            only.sort_unstable();
            only.dedup();
            JobSpec {
                only,
                ..JobSpec::new(Command::AcceptanceGrid)
            }
        }
    };
    for c in &cli.caps {
        let (k, v) = parse_cap(c)?;
        job.caps.insert(k, v);
    }
    job.output = cli.output;
    job.validate()?;
    Ok((job, cli.csv, cli.no_cache, cli.payload_only))
}

fn write_report(report: &Report, csv: bool, path: Option<&PathBuf>) -> io::Result<()> {
    let out: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    if csv {
        report.write_csv(&mut out).map_err(io::Error::other)?;
    } else {
        out.write_all(report.to_json().as_bytes())?;
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (job, csv, no_cache, payload_only) = match to_job(cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let opts = RunOptions {
        cache: (!no_cache).then(Cache::from_env),
    };
    let report = match run(&job, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let shown = if payload_only { report.payload_only() } else { report.clone() };
    if let Err(e) = write_report(&shown, csv, job.output.as_ref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    if let Some(err) = report.result.get("error").and_then(|e| e.as_str()) {
        eprintln!("{}: {err}", job.command());
    }
    ExitCode::from(report.status.exit_code() as u8)
}
