//! Command-line front end.
//!
//! Settings come from an optional TOML file and are overridden by flags.
//! Every artifact starts with `#` lines echoing the resolved settings and
//! the tool version. Exit status: 0 success, 1 domain error, 2 usage error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::crc_search::{search_dso, SearchConfig, SearchResult};
use crate::dual_trellis::{DualTrellis, ZtPatterns};
use crate::encoder::{
    ConvEncoder, EncoderState, FrameLayout, ParityCheckMatrix, RailMap, Termination, ZtCodeSet,
};
use crate::error::Error;
use crate::gf2poly::{parse_hex_crc, CrcPolynomial};
use crate::sim::{run_fer, write_csv, SimConfig, StopRule};
use crate::slvd::{
    complexity_estimate, complexity_with_insertions, default_max_list, ComplexityWeights,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Failure of a subcommand, classified by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

impl From<Error> for CliError {
    /// Malformed inputs are usage errors; failures of a well-formed run are
    /// domain errors.
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDigit(_)
            | Error::EmptyLiteral
            | Error::WidthOverflow { .. }
            | Error::CrcEndpoints(_)
            | Error::CrcDegree { .. }
            | Error::UnsupportedDegree(_)
            | Error::InvalidCode(_)
            | Error::NoInstantResponse
            | Error::Layout(_)
            | Error::EmptyList
            | Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hrcc", version, about = "CRC-aided list decoding of high-rate convolutional codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search the distance-spectrum-optimal CRC for each requested degree.
    SearchCrc(Flags),
    /// Monte-Carlo frame error rate over the BI-AWGN channel.
    Simulate(Flags),
    /// Operation counts of list decoding at given mean list ranks.
    Complexity(Flags),
    /// Dual-trellis structure, termination patterns and frame layout.
    Inspect(Flags),
}

/// Flags shared by all subcommands; each overrides its config-file key.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Parity-check polynomials in octal, highest stream first, e.g. "(33,25,37,31)".
    #[arg(long)]
    pub code: Option<String>,
    /// Overall constraint length.
    #[arg(long)]
    pub v: Option<u32>,
    /// Information bits per frame.
    #[arg(long)]
    pub k: Option<usize>,
    /// Blocklength; derives K when --k is absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// CRC degree: "6", "3..6" or "3,5".
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, value_parser = parse_flag::<Termination>)]
    pub mode: Option<Termination>,
    /// CRC polynomial in hex, or "search".
    #[arg(long)]
    pub crc: Option<String>,
    /// SNR points in dB: "1,2,3" or "start:step:stop".
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub max_list: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_flag::<RailMap>)]
    pub rail_map: Option<RailMap>,
    /// Zero-terminated code searched by search-crc: all-paths or encoder-tail.
    #[arg(long, value_parser = parse_flag::<ZtCodeSet>)]
    pub zt_code: Option<ZtCodeSet>,
    /// Zero-terminated code the simulator decodes: encoder-tail or all-paths.
    #[arg(long, value_parser = parse_flag::<ZtCodeSet>)]
    pub zt_decode: Option<ZtCodeSet>,
    /// Initial collection threshold of the search.
    #[arg(long)]
    pub d_tilde: Option<u32>,
    #[arg(long)]
    pub d_tilde_max: Option<u32>,
    #[arg(long)]
    pub max_errors: Option<u64>,
    #[arg(long)]
    pub max_frames: Option<u64>,
    /// Mean list ranks: "1,2.5" or "start:step:stop".
    #[arg(long)]
    pub el: Option<String>,
    /// Measured mean insertion count, replacing the model estimate.
    #[arg(long)]
    pub ei: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    /// Also print the full branch listing (inspect).
    #[arg(long)]
    pub dump: bool,
}

fn parse_flag<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A list given as text, a single number or an array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ListSpec {
    Int(i64),
    Float(f64),
    List(Vec<f64>),
    Text(String),
}

impl ListSpec {
    fn numbers(&self) -> CliResult<Vec<f64>> {
        match self {
            ListSpec::Int(i) => Ok(vec![*i as f64]),
            ListSpec::Float(x) => Ok(vec![*x]),
            ListSpec::List(v) => Ok(v.clone()),
            ListSpec::Text(t) => parse_number_list(t),
        }
    }

    fn degrees(&self) -> CliResult<Vec<usize>> {
        match self {
            ListSpec::Text(t) => parse_degrees(t),
            other => other
                .numbers()?
                .into_iter()
                .map(|x| {
                    if x >= 1.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(usage(format!("invalid CRC degree {x}")))
                    }
                })
                .collect(),
        }
    }
}

/// `"3"`, `"3..6"` (inclusive), `"3..=6"` or `"3,5,7"`.
pub fn parse_degrees(text: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("invalid degree list {text:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let t = text.trim();
    let out: Vec<usize> = if let Some((a, b)) = t.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (num(a)?..=num(b)?).collect()
    } else {
        t.split(',').map(num).collect::<CliResult<_>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

/// `"1,2.5"` or an inclusive arithmetic range `"start:step:stop"`.
pub fn parse_number_list(text: &str) -> CliResult<Vec<f64>> {
    let bad = || usage(format!("invalid number list {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step <= 0.0 || b < a {
                return Err(bad());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + step * i as f64).collect())
        }
        [one] => one.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeSection {
    pub h: Option<String>,
    pub v: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<ListSpec>,
    pub mode: Option<Termination>,
    pub rail_map: Option<RailMap>,
    pub zt_code: Option<ZtCodeSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrcSection {
    /// Hex literal or `"search"`.
    pub poly: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub d_tilde: Option<u32>,
    pub d_tilde_step: Option<u32>,
    pub d_tilde_max: Option<u32>,
    pub max_paths: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub snr_db: Option<ListSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub max_list: Option<usize>,
    pub max_errors: Option<u64>,
    pub max_frames: Option<u64>,
    pub batch: Option<usize>,
    pub zt_decode: Option<ZtCodeSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexitySection {
    pub el: Option<ListSpec>,
    pub ei: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub log_base: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
}

/// Settings of one run, as read from a file and after flag overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeSection,
    pub frame: FrameSection,
    pub crc: CrcSection,
    pub search: SearchSection,
    pub channel: ChannelSection,
    pub sim: SimSection,
    pub complexity: ComplexitySection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| usage(format!("config: {e}")))
    }

    /// Applies every flag that was given.
    pub fn apply(&mut self, f: &Flags) {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        set(&mut self.code.h, &f.code);
        set(&mut self.code.v, &f.v);
        set(&mut self.frame.k, &f.k);
        set(&mut self.frame.n, &f.n);
        set(&mut self.frame.m, &f.m.clone().map(ListSpec::Text));
        set(&mut self.frame.mode, &f.mode);
        set(&mut self.frame.rail_map, &f.rail_map);
        set(&mut self.frame.zt_code, &f.zt_code);
        set(&mut self.crc.poly, &f.crc);
        set(&mut self.channel.snr_db, &f.snr.clone().map(ListSpec::Text));
        set(&mut self.sim.seed, &f.seed);
        set(&mut self.sim.workers, &f.workers);
        set(&mut self.sim.max_list, &f.max_list);
        set(&mut self.sim.max_errors, &f.max_errors);
        set(&mut self.sim.max_frames, &f.max_frames);
        set(&mut self.sim.zt_decode, &f.zt_decode);
        set(&mut self.search.d_tilde, &f.d_tilde);
        set(&mut self.search.d_tilde_max, &f.d_tilde_max);
        set(&mut self.complexity.el, &f.el.clone().map(ListSpec::Text));
        set(&mut self.complexity.ei, &f.ei);
        set(&mut self.complexity.c1, &f.c1);
        set(&mut self.complexity.c2, &f.c2);
        set(&mut self.output.out, &f.out);
    }

    /// File settings overridden by flags.
    pub fn resolve(f: &Flags) -> CliResult<Self> {
        let mut cfg = match &f.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.apply(f);
        Ok(cfg)
    }

    pub fn code(&self) -> CliResult<ParityCheckMatrix> {
        let h = self.code.h.as_deref().ok_or_else(|| usage("missing --code"))?;
        let v = self.code.v.ok_or_else(|| usage("missing --v"))?;
        Ok(ParityCheckMatrix::parse(h, v)?)
    }

    pub fn mode(&self) -> CliResult<Termination> {
        self.frame.mode.ok_or_else(|| usage("missing --mode"))
    }

    pub fn degrees(&self) -> CliResult<Vec<usize>> {
        self.frame
            .m
            .as_ref()
            .ok_or_else(|| usage("missing --m"))?
            .degrees()
    }

    /// Layout for degree `m` from `K`, or from `N` when `K` is absent.
    pub fn layout(&self, omega: usize, v: u32, m: usize) -> CliResult<FrameLayout> {
        let mode = self.mode()?;
        let layout = match (self.frame.k, self.frame.n) {
            (Some(k), _) => FrameLayout::new(k, m, omega, v, mode)?,
            (None, Some(n)) => FrameLayout::for_blocklength(n, m, omega, v, mode)?,
            (None, None) => return Err(usage("missing --k or --n")),
        };
        if let Some(n) = self.frame.n {
            if layout.blocklength() != n {
                return Err(usage(format!(
                    "K={} and m={m} give N={}, not {n}",
                    layout.k,
                    layout.blocklength()
                )));
            }
        }
        Ok(layout)
    }

    /// The single degree of commands that take one.
    pub fn single_degree(&self) -> CliResult<usize> {
        match self.degrees()?[..] {
            [m] => Ok(m),
            _ => Err(usage("this command takes a single CRC degree")),
        }
    }

    pub fn search_config(&self, code: ParityCheckMatrix, layout: FrameLayout) -> SearchConfig {
        let mut s = SearchConfig::new(code, layout);
        s.rail_map = self.frame.rail_map.unwrap_or_default();
        s.zt_code = self.frame.zt_code.unwrap_or_default();
        s.d_tilde = self.search.d_tilde;
        s.d_tilde_step = self.search.d_tilde_step.unwrap_or(s.d_tilde_step);
        s.d_tilde_max = self.search.d_tilde_max.unwrap_or(s.d_tilde_max);
        s.max_paths = self.search.max_paths.unwrap_or(s.max_paths);
        s
    }

    /// Fills defaults that a command depends on, so the echo is complete.
    fn fill_frame_defaults(&mut self) {
        self.frame.rail_map.get_or_insert_with(RailMap::default);
        if self.frame.mode == Some(Termination::Zt) {
            self.frame.zt_code.get_or_insert_with(ZtCodeSet::default);
        }
    }
}

/// `#`-free header lines: tool version, command, then the settings as TOML.
fn echo_lines(command: &str, cfg: &ExperimentConfig) -> CliResult<Vec<String>> {
    let mut lines = vec![format!("hrcc {VERSION} {command}")];
    let toml = cfg.to_toml()?;
    let body: Vec<&str> = toml.lines().filter(|l| !l.is_empty()).collect();
    // a section header is kept only when a key follows it
    for (i, l) in body.iter().enumerate() {
        let header = l.starts_with('[');
        if !header || body.get(i + 1).is_some_and(|n| !n.starts_with('[')) {
            lines.push((*l).to_owned());
        }
    }
    Ok(lines)
}

fn comment_block(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

/// Where an artifact goes.
struct Sink<'a> {
    file: Option<std::fs::File>,
    stdout: &'a mut dyn Write,
}

impl<'a> Sink<'a> {
    fn open(path: Option<&Path>, stdout: &'a mut dyn Write) -> CliResult<Self> {
        let file = path
            .map(|p| {
                std::fs::File::create(p)
                    .map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))
            })
            .transpose()?;
        Ok(Self { file, stdout })
    }

    fn writer(&mut self) -> &mut dyn Write {
        match &mut self.file {
            Some(f) => f,
            None => self.stdout,
        }
    }

    fn write(&mut self, text: &str) -> CliResult<()> {
        let w = self.writer();
        w.write_all(text.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Io(format!("write failed: {e}")))
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let CliError::Domain(Error::InsufficientThreshold { .. }) = e {
                let _ = writeln!(
                    stderr,
                    "hint: raise [search] d_tilde_max or start higher with --d-tilde"
                );
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::SearchCrc(f) => cmd_search(&ExperimentConfig::resolve(f)?, stdout),
        Command::Simulate(f) => cmd_simulate(&ExperimentConfig::resolve(f)?, stdout, stderr),
        Command::Complexity(f) => cmd_complexity(&ExperimentConfig::resolve(f)?, stdout),
        Command::Inspect(f) => cmd_inspect(&ExperimentConfig::resolve(f)?, f.dump, stdout),
    }
}

/// One record per requested degree, each followed by a blank line.
pub fn cmd_search(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let mut cfg = cfg.clone();
    cfg.fill_frame_defaults();
    let code = cfg.code()?;
    let layouts: Vec<FrameLayout> = cfg
        .degrees()?
        .into_iter()
        .map(|m| cfg.layout(code.omega(), code.v(), m))
        .collect::<CliResult<_>>()?;
    let mut sink = Sink::open(cfg.output.out.as_deref(), stdout)?;
    sink.write(&comment_block(&echo_lines("search-crc", &cfg)?))?;
    for layout in layouts {
        let result = search_dso(&cfg.search_config(code.clone(), layout))?;
        sink.write(&format!("{result}\n"))?;
    }
    Ok(())
}

fn resolve_crc(
    cfg: &mut ExperimentConfig,
    code: &ParityCheckMatrix,
    layout: FrameLayout,
) -> CliResult<(CrcPolynomial, Option<SearchResult>)> {
    let text = cfg.crc.poly.clone().ok_or_else(|| usage("missing --crc"))?;
    if text.trim().eq_ignore_ascii_case("search") {
        let r = search_dso(&cfg.search_config(code.clone(), layout))?;
        Ok((r.crc, Some(r)))
    } else {
        Ok((parse_hex_crc(&text, layout.m as u32)?, None))
    }
}

fn auto_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos());
    (nanos as u64) >> 1
}

/// Writes the FER table as CSV and a summary line to `stderr`.
pub fn cmd_simulate(
    cfg: &ExperimentConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let mut cfg = cfg.clone();
    cfg.fill_frame_defaults();
    let code = cfg.code()?;
    let m = cfg.single_degree()?;
    let layout = cfg.layout(code.omega(), code.v(), m)?;
    let snrs = cfg
        .channel
        .snr_db
        .as_ref()
        .ok_or_else(|| usage("missing --snr"))?
        .numbers()?;
    if snrs.is_empty() {
        return Err(usage("empty SNR list"));
    }
    let (crc, searched) = resolve_crc(&mut cfg, &code, layout)?;
    let stop_default = StopRule::default();
    let seed = *cfg.sim.seed.get_or_insert_with(auto_seed);
    if seed > i64::MAX as u64 {
        return Err(usage("seed must be below 2^63"));
    }
    let sim = SimConfig {
        crc,
        max_list: *cfg.sim.max_list.get_or_insert(default_max_list(m)),
        seed,
        workers: *cfg.sim.workers.get_or_insert(0),
        stop: StopRule {
            max_errors: *cfg.sim.max_errors.get_or_insert(stop_default.max_errors),
            max_frames: *cfg.sim.max_frames.get_or_insert(stop_default.max_frames),
        },
        batch: *cfg.sim.batch.get_or_insert(1024),
        zt_decode: if layout.mode == Termination::Zt {
            *cfg.sim.zt_decode.get_or_insert(ZtCodeSet::EncoderTail)
        } else {
            ZtCodeSet::EncoderTail
        },
    };
    let encoder = ConvEncoder::new(code, layout, cfg.frame.rail_map.unwrap_or_default())?;
    let mut comments = echo_lines("simulate", &cfg)?;
    comments.push(format!("K={} m={} N={} crc={crc}", layout.k, layout.m, layout.blocklength()));
    if let Some(r) = &searched {
        comments.push(format!("crc chosen by search: d_min={} d_tilde={}", r.d_min, r.d_tilde));
    }
    let start = Instant::now();
    let stats = run_fer::<f64>(&encoder, &sim, &snrs)?;
    let mut sink = Sink::open(cfg.output.out.as_deref(), stdout)?;
    write_csv(sink.writer(), &comments, &stats)?;
    let frames: u64 = stats.iter().map(|s| s.frames).sum();
    let resampled: u64 = stats.iter().map(|s| s.resampled).sum();
    let violations: u64 = stats.iter().map(|s| s.ml_violations).sum();
    let _ = writeln!(
        stderr,
        "frames={frames} points={} wall={:.3}s resampled={resampled} ml_violations={violations}",
        stats.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

/// One row of operation counts per degree and mean list rank.
pub fn cmd_complexity(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let mut cfg = cfg.clone();
    let defaults = ComplexityWeights::<f64>::default();
    let weights = ComplexityWeights {
        c1: *cfg.complexity.c1.get_or_insert(defaults.c1),
        c2: *cfg.complexity.c2.get_or_insert(defaults.c2),
        log_base: *cfg.complexity.log_base.get_or_insert(defaults.log_base),
    };
    let v = cfg.code.v.ok_or_else(|| usage("missing --v"))?;
    let mode = cfg.mode()?;
    let els = cfg
        .complexity
        .el
        .get_or_insert(ListSpec::Float(1.0))
        .numbers()?;
    if let Some(el) = els.iter().find(|&&el| el.is_nan() || el < 1.0) {
        return Err(usage(format!("mean list rank must be at least 1, got {el}")));
    }
    let ei = cfg.complexity.ei;
    if ei.is_some_and(|e| e.is_nan() || e < 1.0) {
        return Err(usage("mean insertion count must be at least 1"));
    }
    let mut rows = Vec::new();
    for m in cfg.degrees()? {
        let k = match (cfg.frame.k, cfg.frame.n) {
            (Some(k), _) => k,
            (None, Some(_)) => cfg.layout(cfg.code()?.omega(), v, m)?.k,
            (None, None) => return Err(usage("missing --k or --n")),
        };
        for &el in &els {
            let r = match ei {
                Some(ei) => complexity_with_insertions(k, m, v, el, ei, mode, weights),
                None => complexity_estimate(k, m, v, el, mode, weights),
            };
            rows.push(r);
        }
    }
    let mut text = comment_block(&echo_lines("complexity", &cfg)?);
    text.push_str("K,m,v,mode,EL,EI,C_SSV,C_trace,C_list,C_SLVD\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.m,
            r.v,
            r.mode,
            r.expected_list_rank,
            r.expected_insertions,
            r.c_ssv,
            r.c_trace,
            r.c_list,
            r.c_slvd
        );
    }
    Sink::open(cfg.output.out.as_deref(), stdout)?.write(&text)
}

fn bits(b: &[u8]) -> String {
    b.iter().map(|&x| char::from(b'0' + x)).collect()
}

/// Instant-response order, branch census, termination patterns and, when
/// `K`/`N` and `m` are given, the frame layout.
pub fn cmd_inspect(cfg: &ExperimentConfig, dump: bool, stdout: &mut dyn Write) -> CliResult<()> {
    let mut cfg = cfg.clone();
    let code = cfg.code()?;
    let layout = match (&cfg.frame.m, cfg.frame.k.or(cfg.frame.n), cfg.frame.mode) {
        (Some(_), Some(_), Some(_)) => {
            cfg.fill_frame_defaults();
            Some(cfg.layout(code.omega(), code.v(), cfg.single_degree()?)?)
        }
        _ => None,
    };
    let sections = layout.map_or(1, |l| l.sections());
    let trellis = DualTrellis::build(&code, sections)?;
    let patterns = ZtPatterns::compute(&code)?;
    let mut t = comment_block(&echo_lines("inspect", &cfg)?);
    let _ = writeln!(t, "code={}", code.to_octal());
    let _ = writeln!(t, "omega={}", code.omega());
    let _ = writeln!(t, "v={}", code.v());
    let _ = writeln!(t, "lambda={}", code.lambda());
    let _ = writeln!(t, "parity_stream={}", code.parity_stream());
    let rails: Vec<String> = (0..code.rails()).map(|r| code.rail_stream(r).to_string()).collect();
    let _ = writeln!(t, "rail_streams={}", rails.join(","));
    let _ = writeln!(t, "boundary_states={}", trellis.boundary_states());
    let _ = writeln!(t, "phase_states={}", trellis.width());
    let _ = writeln!(t, "sections={sections}");
    let _ = writeln!(t, "\n# phase states single double max_in_degree");
    for c in trellis.census().iter().take(code.omega()) {
        let _ = writeln!(
            t,
            "{} {} {} {} {}",
            c.phase, c.states, c.single_branch, c.double_branch, c.max_in_degree
        );
    }
    let pattern_len = |s: u32| {
        let p = patterns.get(EncoderState(s));
        (p.inputs.len(), p.outputs.len())
    };
    let (ib, ob) = pattern_len(0);
    let _ = writeln!(
        t,
        "\nzt_tail_sections={} zt_input_bits={ib} zt_output_bits={ob}",
        patterns.tail_sections()
    );
    let _ = writeln!(t, "# state inputs outputs");
    for s in 0..patterns.len() as u32 {
        let p = patterns.get(EncoderState(s));
        let _ = writeln!(t, "{s} {} {}", bits(p.inputs), bits(p.outputs));
    }
    if let Some(l) = layout {
        let _ = writeln!(t, "\nK={}", l.k);
        let _ = writeln!(t, "m={}", l.m);
        let _ = writeln!(t, "mode={}", l.mode);
        let _ = writeln!(t, "payload_bits={}", l.payload_len());
        let _ = writeln!(t, "payload_sections={}", l.payload_sections());
        let _ = writeln!(t, "tail_sections={}", l.tail_sections());
        let _ = writeln!(t, "N={}", l.blocklength());
        let _ = writeln!(t, "rate={:.3}", l.rate());
    }
    if dump {
        t.push('\n');
        t.push_str(&trellis.dump());
    }
    Sink::open(cfg.output.out.as_deref(), stdout)?.write(&t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_lists() {
        assert_eq!(parse_degrees("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_degrees("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_degrees("7, 9").unwrap(), vec![7, 9]);
        assert!(parse_degrees("0").is_err());
        assert!(parse_degrees("x").is_err());
    }

    #[test]
    fn number_lists() {
        assert_eq!(parse_number_list("1:0.5:2").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_number_list("-1,2.5").unwrap(), vec![-1.0, 2.5]);
        assert!(parse_number_list("1:0:2").is_err());
        assert!(parse_number_list("nan").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = ExperimentConfig::from_toml(
            "[code]\nh = \"(33,25,37,31)\"\nv = 4\n[frame]\nk = 80\nm = \"3..4\"\nmode = \"zt\"\n[channel]\nsnr_db = [1.0, 2.0]\n",
        )
        .unwrap();
        cfg.apply(&Flags {
            k: Some(81),
            mode: Some(Termination::Tb),
            ..Flags::default()
        });
        assert_eq!(cfg.frame.k, Some(81));
        assert_eq!(cfg.frame.mode, Some(Termination::Tb));
        assert_eq!(cfg.code.v, Some(4));
        assert_eq!(cfg.degrees().unwrap(), vec![3, 4]);
        assert_eq!(cfg.channel.snr_db.unwrap().numbers().unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let e = ExperimentConfig::from_toml("[frame]\nkk = 3\n").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.code.h = Some("(2,5,7,6)".into());
        cfg.frame.m = Some(ListSpec::Int(3));
        cfg.sim.seed = Some(7);
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::NoInstantResponse).exit_code(), EXIT_USAGE);
        let e = Error::InsufficientThreshold {
            d_tilde: 6,
            crc: "0x9".into(),
        };
        assert_eq!(CliError::from(e).exit_code(), EXIT_DOMAIN);
    }
}
