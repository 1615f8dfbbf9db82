use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use laxord::enumerator::{enumerate_finite, enumerate_part, Backend, Cadence, Mode, ScriptStream, StreamConfig};
use laxord::interchange::build_partition;
use laxord::oracle::{check_td_orderable, verify_stream, VerifyOptions};
use laxord::slender::{enumerate_slender_thread, is_slender, slender_threads};
use laxord::{parse_dfa, Dfa, EditScript, Metric};

#[derive(Parser)]
#[command(name = "laxord", version, about = "Partition regular languages and enumerate them as streams of push-pop edit scripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the language into interchangeable parts and write one automaton per part.
    Partition {
        #[command(flatten)]
        input: Input,
        /// Directory for the part files (defaults to the input's directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Stream edit scripts enumerating one part of the language.
    Enumerate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        stream: StreamArgs,
        /// Replay the scripts against the language and check every bound.
        #[arg(long)]
        verify: bool,
        /// Write per-output work and per-stratum counts as CSV to stderr.
        #[arg(long)]
        stats: bool,
        /// Interleave all parts, prefixing each line with its part index.
        #[arg(long, conflicts_with = "part")]
        round_robin: bool,
    },
    /// Test slenderness; list the threads or enumerate one of them.
    Slender {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        threads: bool,
        /// Thread to enumerate with right-end operations.
        #[arg(long, value_name = "I")]
        enumerate: Option<usize>,
        #[arg(long, value_name = "N", default_value_t = 20)]
        max_words: usize,
    },
    /// Replay a script file and check it against the language.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        scripts: PathBuf,
        #[arg(long)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::Pp)]
        metric: MetricArg,
        /// Require each stratum of this width to be complete before the next starts.
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Decide by exhaustive search whether a small word list splits into t
    /// sequences with steps of at most d.
    CheckOrder {
        /// One word per line; an empty line or `ε` is the empty word.
        #[arg(long)]
        words: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::Pp)]
        metric: MetricArg,
    },
    /// Print `index,work,gap` for each output of a stream as CSV.
    Bench {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        stream: StreamArgs,
        /// Release scripts as soon as they are produced, showing raw producer gaps.
        #[arg(long)]
        unpaced: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Automaton in the line format (`alphabet:`, `states:`, `initial:`, `final:`, `trans:`).
    #[arg(long)]
    dfa: Option<PathBuf>,
    /// Regular expression with `+` for union, `*`, and parentheses.
    #[arg(long)]
    regex: Option<String>,
}

#[derive(Args)]
struct StreamArgs {
    #[arg(long, default_value_t = 0)]
    part: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Tightened)]
    mode: ModeArg,
    /// Stratum width ℓ (tightened mode).
    #[arg(long, requires = "dist")]
    ell: Option<usize>,
    /// Distance d used to connect strata (tightened mode).
    #[arg(long, requires = "ell")]
    dist: Option<usize>,
    #[arg(long, value_name = "N")]
    max_words: Option<u64>,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    /// Work units per output; measured on the first strata when absent.
    #[arg(long)]
    cadence: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Tightened,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Dag,
    Materialized,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Pp,
    Ppr,
    Lev,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Pp => Metric::PushPop,
            MetricArg::Ppr => Metric::PushPopRight,
            MetricArg::Lev => Metric::Levenshtein,
        }
    }
}

enum Failure {
    Domain(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn load(input: &Input) -> Result<Dfa, Failure> {
    if let Some(r) = &input.regex {
        return Dfa::from_regex(r, None).map_err(domain);
    }
    let path = input.dfa.as_ref().expect("clap requires one input");
    let text = fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))?;
    parse_dfa(&text).map(|p| p.dfa).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn stream_config(args: &StreamArgs, cadence: Cadence) -> StreamConfig {
    StreamConfig {
        mode: match args.mode {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Tightened => Mode::Tightened,
        },
        ell_d: args.ell.zip(args.dist),
        part_index: args.part,
        max_outputs: args.max_words,
        cadence: args.cadence.map_or(cadence, Cadence::Fixed),
        backend: match args.backend {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Dag => Backend::WordDag,
            BackendArg::Materialized => Backend::Materialized,
        },
        ..StreamConfig::default()
    }
}

/// Streams for every part, each with the automaton its words must satisfy.
fn part_streams(a: &Dfa, cfg: &StreamConfig) -> Result<Vec<(Dfa, ScriptStream)>, Failure> {
    let partition = build_partition(a);
    if partition.finite {
        let part = partition.parts[0].clone();
        let words = part.enumerate_by_length(part.size());
        let stream = enumerate_finite(&words, None).map_err(domain)?.with_max_outputs(cfg.max_outputs);
        return Ok(vec![(part, stream)]);
    }
    partition.parts.into_iter().map(|p| enumerate_part(&p, cfg).map(|s| (p, s)).map_err(domain)).collect()
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Partition { input, out_dir } => {
            let a = load(&input)?;
            let p = build_partition(&a);
            writeln!(out, "t={}", p.t())?;
            let (dir, stem) = match &input.dfa {
                Some(path) => (
                    path.parent().map(Path::to_path_buf).unwrap_or_default(),
                    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dfa".into()),
                ),
                None => (PathBuf::from("."), "regex".to_string()),
            };
            let dir = out_dir.unwrap_or(dir);
            for (i, part) in p.parts.iter().enumerate() {
                let path = dir.join(format!("{stem}.part{i}.dfa"));
                fs::write(&path, part.to_string()).map_err(|e| domain(format!("{}: {e}", path.display())))?;
                writeln!(out, "{}", path.display())?;
            }
        }
        Command::Enumerate { input, stream, verify, stats, round_robin } => {
            let a = load(&input)?;
            let mut cfg = stream_config(&stream, Cadence::Auto);
            cfg.record_gaps = stats;
            let mut streams = part_streams(&a, &cfg)?;
            if !round_robin {
                let count = streams.len();
                if cfg.part_index >= count {
                    return Err(domain(format!("part {} does not exist: there are {count} parts", cfg.part_index)));
                }
                streams = vec![streams.swap_remove(cfg.part_index)];
            }
            let indices: Vec<usize> = if round_robin { (0..streams.len()).collect() } else { vec![cfg.part_index] };
            let mut emitted: Vec<Vec<EditScript>> = vec![Vec::new(); streams.len()];
            let mut live: Vec<bool> = vec![true; streams.len()];
            let mut err = io::stderr();
            if stats {
                writeln!(err, "part,index,work,gap")?;
            }
            let mut release: Vec<Release> = streams.iter().map(|_| Release::default()).collect();
            let mut counts = vec![0usize; streams.len()];
            while live.iter().any(|&l| l) {
                for (j, (_, s)) in streams.iter_mut().enumerate() {
                    if !live[j] {
                        continue;
                    }
                    let Some(script) = s.next() else {
                        live[j] = false;
                        continue;
                    };
                    let script = script.map_err(domain)?;
                    if round_robin {
                        write!(out, "{} ", indices[j])?;
                    }
                    writeln!(out, "{script}")?;
                    out.flush()?;
                    if stats {
                        let (at, gap) = release[j].of(counts[j], s);
                        counts[j] += 1;
                        writeln!(err, "{},{},{at},{gap}", indices[j], counts[j])?;
                    }
                    if verify {
                        emitted[j].push(script);
                    }
                }
            }
            if stats {
                for (j, (_, s)) in streams.iter().enumerate() {
                    let st = s.stats();
                    writeln!(err, "part,stratum,words")?;
                    for (i, n) in st.strata.iter().enumerate() {
                        writeln!(err, "{},{},{n}", indices[j], i + 1)?;
                    }
                    writeln!(err, "# part {}: cadence {:?}, max gap {}, stalls {}", indices[j], st.cadence, st.max_gap, st.stalls)?;
                }
            }
            if verify {
                for (j, (part, s)) in streams.iter().enumerate() {
                    let bound = s.bound().unwrap_or(usize::MAX);
                    let ell = s.params.map(|p| p.ell);
                    let report = verify_stream(&emitted[j], &a, part, &VerifyOptions { bound, metric: Metric::PushPop, ell });
                    match &report.violation {
                        None => writeln!(err, "verified part {}: {} words, longest script {}", indices[j], report.outputs, report.max_script)?,
                        Some(v) => return Err(domain(format!("part {}: violation at output {}: {:?}", indices[j], v.index, v.kind))),
                    }
                }
            }
        }
        Command::Slender { input, threads, enumerate, max_words } => {
            let a = load(&input)?;
            let slender = is_slender(&a);
            writeln!(out, "slender={slender}")?;
            if !threads && enumerate.is_none() {
                return Ok(());
            }
            let dec = slender_threads(&a).map_err(domain)?;
            if threads {
                writeln!(out, "t={}", dec.t())?;
                writeln!(out, "finite: {}", quoted(&dec.finite_part))?;
                for (i, th) in dec.threads.iter().enumerate() {
                    writeln!(out, "thread {i}: r={:?} s={:?} tails: {}", th.r, th.s, quoted(&th.tails))?;
                }
            }
            if let Some(i) = enumerate {
                let stream = enumerate_slender_thread(&dec, i).map_err(domain)?;
                let period = stream.period.expect("thread streams are periodic");
                writeln!(out, "# prelude={} period={}", period.prelude, period.length)?;
                for s in stream.take(max_words) {
                    writeln!(out, "{}", s.map_err(domain)?)?;
                }
            }
        }
        Command::Check { input, scripts, bound, metric, ell } => {
            let a = load(&input)?;
            let text = fs::read_to_string(&scripts).map_err(|e| domain(format!("{}: {e}", scripts.display())))?;
            let parsed: Vec<EditScript> = text
                .lines()
                .enumerate()
                .map(|(i, l)| l.parse().map_err(|e| domain(format!("{}:{}: {e}", scripts.display(), i + 1))))
                .collect::<Result<_, _>>()?;
            let report = verify_stream(&parsed, &a, &a, &VerifyOptions { bound, metric: metric.into(), ell });
            match report.violation {
                None => writeln!(out, "clean outputs={} max_script={}", report.outputs, report.max_script)?,
                Some(v) => return Err(domain(format!("violation at output {}: {:?}", v.index, v.kind))),
            }
        }
        Command::CheckOrder { words, t, d, metric } => {
            let text = fs::read_to_string(&words).map_err(|e| domain(format!("{}: {e}", words.display())))?;
            let list: Vec<String> = text.lines().map(|l| if l.trim() == "ε" { String::new() } else { l.trim().to_string() }).collect();
            let ok = check_td_orderable(&list, t, d, metric.into()).map_err(domain)?;
            writeln!(out, "orderable={ok}")?;
        }
        Command::Bench { input, stream, unpaced } => {
            let a = load(&input)?;
            let mut cfg = stream_config(&stream, if unpaced { Cadence::Unpaced } else { Cadence::Auto });
            cfg.max_outputs.get_or_insert(10_000);
            cfg.record_gaps = true;
            let mut streams = part_streams(&a, &cfg)?;
            let count = streams.len();
            if cfg.part_index >= count {
                return Err(domain(format!("part {} does not exist: there are {count} parts", cfg.part_index)));
            }
            let (_, mut s) = streams.swap_remove(cfg.part_index);
            writeln!(out, "index,work,gap")?;
            let mut release = Release::default();
            let mut i = 0usize;
            while let Some(script) = s.next() {
                script.map_err(domain)?;
                let (at, gap) = release.of(i, &s);
                i += 1;
                writeln!(out, "{i},{at},{gap}")?;
            }
        }
    }
    Ok(())
}

/// Release time and gap of each output, read from the recorded gaps.
#[derive(Default)]
struct Release {
    at: u64,
}

impl Release {
    fn of(&mut self, i: usize, s: &ScriptStream) -> (u64, u64) {
        let st = s.stats();
        let gap = if i == 0 { st.startup } else { st.gaps[i - 1] };
        self.at += gap;
        (self.at, gap)
    }
}

fn quoted(words: &[String]) -> String {
    words.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(Failure::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

