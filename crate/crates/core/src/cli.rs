//! Command-line front end: `embed`, `extract`, `scan` and `bench`.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or format error,
//! 3 message exceeds carrier capacity.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bench::{self, BenchReport};
use crate::carrier::{load_carrier, save_carrier, CarrierFormat, CarrierImage};
use crate::codec::{embed, extract, BitsPerByte, EmbedSpec};
use crate::error::Error;
use crate::plausibility::AcceptSet;
use crate::scanner::{collapse_maximal, scan_limited, Candidate, ScanSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "stegscan",
    version,
    about = "LSB steganography embedding and blind recovery"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide a message in the low bits of a carrier
    Embed(EmbedArgs),
    /// Read a message back with known parameters
    Extract(ExtractArgs),
    /// Search every start and length for plausible hidden text
    Scan(ScanArgs),
    /// Time the scan across worker counts or length ranges
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CarrierArgs {
    /// Carrier file (24-bit uncompressed BMP unless --raw)
    #[arg(long)]
    pub carrier: PathBuf,
    /// Treat the whole file as payload
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Low bits used per carrier byte (1 or 2)
    #[arg(long, default_value_t = 1)]
    pub bits: usize,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("message").required(true).args(["text", "message_file"])))]
pub struct EmbedArgs {
    #[command(flatten)]
    pub carrier: CarrierArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long)]
    pub text: Option<String>,
    #[arg(long)]
    pub message_file: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub carrier: CarrierArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    /// Message length in bytes
    #[arg(long)]
    pub length: usize,
    /// Write the exact message bytes here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct ScanOptions {
    #[arg(long, default_value_t = 10)]
    pub min_len: usize,
    #[arg(long, default_value_t = 25)]
    pub max_len: usize,
    #[arg(long, default_value_t = 1)]
    pub bits: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// printable | printable+ws | custom:<hex-ranges>
    #[arg(long, default_value = "printable+ws")]
    pub accept: String,
}

impl ScanOptions {
    fn to_spec(&self, workers: usize) -> Result<ScanSpec, Error> {
        let accept: AcceptSet = self.accept.parse()?;
        ScanSpec::new(self.min_len, self.max_len)?
            .with_bits(BitsPerByte::try_from(self.bits)?)
            .with_stride(self.stride)?
            .with_workers(workers)
            .map(|s| s.with_accept(accept))
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub carrier: CarrierArgs,
    #[command(flatten)]
    pub options: ScanOptions,
    /// Worker threads (defaults to hardware parallelism)
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_candidates: usize,
    /// Report only the longest candidate per start
    #[arg(long)]
    pub collapse: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["carrier", "random_bytes"])))]
pub struct BenchArgs {
    #[arg(long)]
    pub carrier: Option<PathBuf>,
    #[arg(long, requires = "carrier")]
    pub raw: bool,
    /// Benchmark on this many seeded random bytes instead of a file
    #[arg(long)]
    pub random_bytes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub options: ScanOptions,
    /// Comma-separated worker counts for a worker sweep
    #[arg(long, value_delimiter = ',')]
    pub threads: Option<Vec<usize>>,
    /// Comma-separated upper lengths for a length sweep (1 vs --max-threads workers)
    #[arg(long, value_delimiter = ',', conflicts_with = "threads")]
    pub upper: Option<Vec<usize>>,
    #[arg(long)]
    pub max_threads: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Also write every raw timing record as CSV
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn at(path: &Path, err: Error) -> Self {
        let mut f = Failure::from(err);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidParameter(_) | Error::EmptyInput => EXIT_USAGE,
            Error::CapacityExceeded { .. } => EXIT_CAPACITY,
            Error::MalformedHeader(_)
            | Error::UnsupportedFormat(_)
            | Error::OutputMismatch { .. }
            | Error::Io(_) => EXIT_IO,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::from(Error::Io(err))
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::at(path, e.into()))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failure never leaves a partial file behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::at(path, e.into()))?;
    tmp.write_all(bytes)
        .map_err(|e| Failure::at(path, e.into()))?;
    tmp.persist(path)
        .map_err(|e| Failure::at(path, e.error.into()))?;
    Ok(())
}

fn load(args: &CarrierArgs) -> Result<CarrierImage, Failure> {
    let bytes = read_file(&args.carrier)?;
    let hint = args.raw.then_some(CarrierFormat::Raw);
    load_carrier(&bytes, hint).map_err(|e| Failure::at(&args.carrier, e))
}

fn layout(args: &LayoutArgs) -> Result<EmbedSpec, Failure> {
    Ok(EmbedSpec::new(
        args.start,
        args.stride,
        BitsPerByte::try_from(args.bits)?,
    )?)
}

fn run_embed(args: &EmbedArgs) -> Result<(), Failure> {
    let message = match (&args.text, &args.message_file) {
        (Some(text), None) => text.clone().into_bytes(),
        (None, Some(path)) => read_file(path)?,
        _ => {
            return Err(Failure::usage(
                "give exactly one of --text or --message-file",
            ))
        }
    };
    let spec = layout(&args.layout)?;
    let mut carrier = load(&args.carrier)?;
    embed(&mut carrier.payload, &message, &spec)?;
    write_atomic(&args.out, &save_carrier(&carrier))
}

fn run_extract(args: &ExtractArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let spec = layout(&args.layout)?;
    let carrier = load(&args.carrier)?;
    let message = extract(&carrier.payload, &spec, args.length)?;
    match &args.out {
        Some(path) => write_atomic(path, &message),
        None => {
            stdout.write_all(&message)?;
            stdout.write_all(b"\n")?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CandidateRow<'a> {
    start_position: usize,
    length: usize,
    score: f64,
    text: std::borrow::Cow<'a, str>,
}

impl<'a> From<&'a Candidate> for CandidateRow<'a> {
    fn from(c: &'a Candidate) -> Self {
        CandidateRow {
            start_position: c.start_position,
            length: c.length,
            score: c.score,
            text: String::from_utf8_lossy(&c.text),
        }
    }
}

/// Serializes candidates as CSV (`start_position,length,score,text`) or
/// JSON lines, followed by a truncation marker when `truncated` is set.
pub fn write_candidates(
    candidates: &[Candidate],
    format: OutputFormat,
    truncated: Option<usize>,
    out: &mut dyn Write,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut *out);
            w.write_record(["start_position", "length", "score", "text"])?;
            for c in candidates {
                w.serialize(CandidateRow::from(c))?;
            }
            w.flush()?;
            drop(w);
            if let Some(limit) = truncated {
                writeln!(out, "# truncated: more than {limit} candidates")?;
            }
        }
        OutputFormat::Jsonl => {
            for c in candidates {
                serde_json::to_writer(&mut *out, &CandidateRow::from(c))?;
                out.write_all(b"\n")?;
            }
            if let Some(limit) = truncated {
                writeln!(out, "{{\"truncated\":true,\"max_candidates\":{limit}}}")?;
            }
        }
    }
    Ok(())
}

fn run_scan(
    args: &ScanArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let workers = args.threads.unwrap_or_else(bench::hardware_parallelism);
    let spec = args.options.to_spec(workers)?;
    let carrier = load(&args.carrier)?;
    let outcome = scan_limited(&carrier.payload, &spec, Some(args.max_candidates));
    let candidates = if args.collapse {
        collapse_maximal(&outcome.candidates)
    } else {
        outcome.candidates
    };
    if outcome.truncated {
        writeln!(
            stderr,
            "warning: output truncated at {} candidates (--max-candidates)",
            args.max_candidates
        )?;
    }
    write_candidates(
        &candidates,
        args.format,
        outcome.truncated.then_some(args.max_candidates),
        stdout,
    )?;
    Ok(())
}

fn run_bench(
    args: &BenchArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let payload = match (&args.carrier, args.random_bytes) {
        (Some(_), Some(_)) => {
            return Err(Failure::usage("give --carrier or --random-bytes, not both"))
        }
        (Some(path), None) => {
            load(&CarrierArgs {
                carrier: path.clone(),
                raw: args.raw,
            })?
            .payload
        }
        (None, Some(n)) => {
            let mut buf = vec![0u8; n];
            ChaCha8Rng::seed_from_u64(args.seed).fill_bytes(&mut buf);
            buf
        }
        (None, None) => return Err(Failure::usage("give --carrier or --random-bytes")),
    };
    let spec = args.options.to_spec(1)?;
    let hw = bench::hardware_parallelism();

    let (report, sweep): (BenchReport, bool) = match &args.upper {
        Some(upper) => {
            let max = args.max_threads.unwrap_or(hw);
            (
                bench::run_length_sweep(&payload, &spec, upper, max, args.repeats)?,
                true,
            )
        }
        None => {
            let counts = match &args.threads {
                Some(c) => c.clone(),
                None => std::iter::successors(Some(1usize), |n| Some(n * 2))
                    .take_while(|&n| n <= hw)
                    .collect(),
            };
            (
                bench::run_sweep(&payload, &spec, &counts, args.repeats)?,
                false,
            )
        }
    };

    if report.any_oversubscribed() {
        writeln!(
            stderr,
            "note: some worker counts exceed the {hw} hardware threads available"
        )?;
    }
    if let Some(path) = &args.records {
        let mut buf = Vec::new();
        bench::write_records_csv(&report.records, &mut buf)?;
        write_atomic(path, &buf)?;
    }
    if sweep {
        bench::write_length_sweep_csv(&report.rows, stdout)?;
    } else {
        bench::write_report_csv(&report.rows, stdout)?;
    }
    Ok(())
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    let result = match &cli.command {
        Command::Embed(a) => run_embed(a),
        Command::Extract(a) => run_extract(a, stdout),
        Command::Scan(a) => run_scan(a, stdout, stderr),
        Command::Bench(a) => run_bench(a, stdout, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
