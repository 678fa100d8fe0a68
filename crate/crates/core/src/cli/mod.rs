//! Command line surface: file formats, generators, benchmarks and SVG output.
//!
//! Every command prints `key=value` lines on stdout. Exit code 0 means success,
//! 1 a parse, file or usage error, and 2 an infeasible request, a limit or an
//! invalid packing.

pub mod bench;
pub mod io;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::baselines::{ffdh, nfdh, steinberg, upper_bound_pack};
use crate::classify::Params;
use crate::gen;
use crate::model::{lower_bound, validate_packing, Instance, Packing};
use crate::rational::{format_q, parse_q, q, Q};
use crate::solver::{
    exact_oracle, moldable_estimate, solve_structured, ExhaustiveCaps, HintSpec, Mode, OracleLimits, Source,
};
use io::InputFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum Algo {
    Nfdh,
    Ffdh,
    Steinberg,
    Structured,
    Exact,
    /// Moldable jobs: the `2τ` schedule of the makespan estimate.
    Moldable,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Nfdh => "nfdh",
            Algo::Ffdh => "ffdh",
            Algo::Steinberg => "steinberg",
            Algo::Structured => "structured",
            Algo::Exact => "exact",
            Algo::Moldable => "moldable",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    Hint,
    Exhaustive,
    #[default]
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub epsilon: Q,
    pub hint: Option<HintSpec>,
    pub mode: ModeName,
    pub rotations: bool,
    /// Target height for `steinberg`.
    pub height: Option<i64>,
    pub oracle: OracleLimits,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            epsilon: q(1, 4),
            hint: None,
            mode: ModeName::Heuristic,
            rotations: false,
            height: None,
            oracle: OracleLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub packing: Packing,
    /// Extra `key=value` pairs worth reporting.
    pub notes: Vec<(String, String)>,
}

/// Runs one strip-packing algorithm. Errors are infeasibility or limit messages.
pub fn run_algo(inst: &Instance, algo: Algo, opts: &RunOptions) -> Result<RunOutput, String> {
    let plain = |packing| Ok(RunOutput { packing, notes: Vec::new() });
    match algo {
        Algo::Nfdh => plain(nfdh(inst)),
        Algo::Ffdh => plain(ffdh(inst)),
        Algo::Steinberg => {
            let h = match opts.height {
                Some(h) => h,
                None => upper_bound_pack(inst).map_err(|e| e.0.to_string())?.1,
            };
            let p = steinberg(inst, h).map_err(|e| e.to_string())?;
            Ok(RunOutput { packing: p, notes: vec![("target_height".into(), h.to_string())] })
        }
        Algo::Structured => {
            let mode = match (&opts.hint, opts.mode) {
                (Some(h), _) => Mode::Hint(h.clone()),
                (None, ModeName::Hint) => return Err("hint mode needs --hint".into()),
                (None, ModeName::Exhaustive) => Mode::Exhaustive(ExhaustiveCaps::default()),
                (None, ModeName::Heuristic) => Mode::Heuristic,
            };
            let r = solve_structured(inst, &opts.epsilon, &mode).map_err(|e| e.to_string())?;
            let source = match r.source {
                Source::Structured(p) => format!("{p:?}").to_lowercase(),
                Source::Fallback => "fallback".into(),
            };
            let mut notes = vec![("source".into(), source), ("epsilon_prime".into(), format_q(&r.epsilon))];
            if let Some(t) = r.t {
                notes.push(("t".into(), t.to_string()));
            }
            if let Some(h) = r.structured_height {
                notes.push(("structured_height".into(), h.to_string()));
            }
            notes.extend(r.notes.into_iter().map(|n| ("note".to_string(), n)));
            Ok(RunOutput { packing: r.packing, notes })
        }
        Algo::Exact => {
            let (opt, p) = exact_oracle(inst, opts.oracle, opts.rotations).map_err(|e| e.to_string())?;
            Ok(RunOutput { packing: p, notes: vec![("opt".into(), opt.to_string())] })
        }
        Algo::Moldable => Err("moldable needs a mold-v1 input".into()),
    }
}

#[derive(Parser, Debug)]
#[command(name = "strip-forge", version, about = "Strip packing with exact geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pack an instance file.
    Pack {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "nfdh")]
        algo: Algo,
        /// Accuracy, as "p/q".
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        /// hint-v1 structure for the structured solver.
        #[arg(long)]
        hint: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "heuristic")]
        mode: ModeName,
        /// Allow quarter turns (exact oracle only).
        #[arg(long)]
        rotations: bool,
        /// Target height for steinberg.
        #[arg(long)]
        height: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        scale: i64,
    },
    /// Check a packing against an instance.
    Validate {
        instance: PathBuf,
        packing: PathBuf,
        #[arg(long)]
        rotations: bool,
    },
    /// Write a generated instance.
    Gen {
        #[arg(long, value_enum)]
        profile: Profile,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Item count (tall items for the grid profile).
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 40)]
        width: i64,
        /// Largest item height.
        #[arg(long, default_value_t = 40)]
        height: i64,
        /// Grid lines (grid profile).
        #[arg(long, default_value_t = 8)]
        lines: i64,
        /// Grid pitch (grid profile).
        #[arg(long, default_value_t = 2)]
        step: i64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Known packing (grid and structured profiles).
        #[arg(long)]
        packing_out: Option<PathBuf>,
        /// Structure hint (structured profile).
        #[arg(long)]
        hint_out: Option<PathBuf>,
    },
    /// Run algorithms over a directory of instances and write a CSV.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "nfdh,ffdh,steinberg")]
        algos: Vec<Algo>,
        /// Per-run timeout in milliseconds.
        #[arg(long, default_value_t = 10_000)]
        timeout: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Leave the millis column empty.
        #[arg(long)]
        no_timing: bool,
    },
    /// Render a packing as SVG.
    Svg {
        instance: PathBuf,
        packing: PathBuf,
        #[arg(long, default_value_t = 10)]
        scale: i64,
        /// Colour items by class using this hint's parameters.
        #[arg(long)]
        hint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Uniform,
    TallHeavy,
    Grid,
    Structured,
}

struct Failure(i32, String);

impl Failure {
    fn parse(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_PARSE, msg.to_string())
    }

    fn infeasible(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_INFEASIBLE, msg.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_PARSE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Pack { input, algo, epsilon, hint, mode, rotations, height, out: dest, svg, scale } => {
            let input = io::parse_input(&read(&input)?).map_err(Failure::parse)?;
            let epsilon = parse_q(&epsilon).map_err(Failure::parse)?;
            let hint = match hint {
                Some(p) => Some(io::parse_hint(&read(&p)?).map_err(Failure::parse)?),
                None => None,
            };
            let colour = hint.as_ref().map(|h| h.params.clone());
            let opts = RunOptions { epsilon, hint, mode, rotations, height, ..RunOptions::default() };
            let (inst, result) = match input {
                InputFile::Strip(inst) => {
                    let r = run_algo(&inst, algo, &opts);
                    (inst, r)
                }
                InputFile::Mold { machines, jobs } => {
                    if algo != Algo::Moldable {
                        return Err(Failure::parse("mold-v1 inputs take --algo moldable"));
                    }
                    let est = moldable_estimate(&jobs, machines).map_err(Failure::infeasible)?;
                    let items = jobs.iter().zip(&est.allotment).filter_map(|(j, &i)| j.as_item(i)).collect();
                    let notes = vec![("tau".into(), est.tau.to_string()), ("upper".into(), est.upper.to_string())];
                    (Instance::new(machines, items), Ok(RunOutput { packing: est.schedule, notes }))
                }
            };
            let r = result.map_err(Failure::infeasible)?;
            let report = validate_packing(&inst, &r.packing, rotations);
            if !report.is_valid() {
                return Err(Failure::infeasible(format!("produced an invalid packing: {}", report.violations[0])));
            }
            let lb = lower_bound(&inst);
            let _ = writeln!(out, "algo={}", algo.name());
            let _ = writeln!(out, "height={}", r.packing.height);
            let _ = writeln!(out, "lower_bound={lb}");
            if lb > 0 {
                let h = r.packing.height;
                let _ = writeln!(out, "ratio={}.{:04}", h / lb, (h % lb) * 10_000 / lb);
            }
            for (k, v) in &r.notes {
                let _ = writeln!(out, "{k}={v}");
            }
            if let Some(p) = dest {
                write_file(&p, &io::emit_packing(&r.packing))?;
            }
            if let Some(p) = svg {
                write_file(&p, &svg::render_svg(&inst, &r.packing, scale, colour.as_ref()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Validate { instance, packing, rotations } => {
            let inst = io::parse_instance(&read(&instance)?).map_err(Failure::parse)?;
            let p = io::parse_packing(&read(&packing)?).map_err(Failure::parse)?;
            let report = validate_packing(&inst, &p, rotations);
            let _ = writeln!(out, "valid={}", report.is_valid());
            let _ = writeln!(out, "violations={}", report.violations.len());
            for v in &report.violations {
                let _ = writeln!(out, "violation={v:?}");
            }
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Gen { profile, seed, n, width, height, lines, step, out: dest, packing_out, hint_out } => {
            if width < 1 || height < 1 || lines < 1 || step < 1 {
                return Err(Failure::parse("width, height, lines and step must be positive"));
            }
            let (inst, packing, hint) = match profile {
                Profile::Uniform => (gen::uniform(seed, n, width, height), None, None),
                Profile::TallHeavy => (gen::tall_heavy(seed, n, width, height), None, None),
                Profile::Grid => {
                    let c = gen::grid_case(seed, width, lines, step, n);
                    (c.instance, Some(c.packing), None)
                }
                Profile::Structured => {
                    let c = gen::structured_case(seed);
                    let hint = HintSpec { params: c.params, boxes: c.boxes };
                    (c.instance, Some(c.packing), Some(hint))
                }
            };
            let text = io::emit_instance(&inst);
            match &dest {
                Some(p) => write_file(p, &text)?,
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            if let (Some(p), Some(pk)) = (packing_out, &packing) {
                write_file(&p, &io::emit_packing(pk))?;
            }
            if let (Some(p), Some(h)) = (hint_out, &hint) {
                write_file(&p, &io::emit_hint(h))?;
            }
            if dest.is_some() {
                let _ = writeln!(out, "items={}", inst.items.len());
                let _ = writeln!(out, "width={}", inst.strip_width);
            }
            Ok(EXIT_OK)
        }
        Command::Bench { dir, algos, timeout, csv, no_timing } => {
            let instances = bench::load_dir(&dir).map_err(Failure::parse)?;
            let rows = bench::bench(&instances, &algos, &RunOptions::default(), Duration::from_millis(timeout), bench::thread_count());
            let mut buf = Vec::new();
            bench::write_csv(&rows, &mut buf, !no_timing).map_err(Failure::parse)?;
            match csv {
                Some(p) => {
                    write_file(&p, &String::from_utf8_lossy(&buf))?;
                    let _ = writeln!(out, "rows={}", rows.len());
                    let _ = writeln!(out, "timeouts={}", rows.iter().filter(|r| r.status == bench::Status::Timeout).count());
                }
                None => {
                    let _ = out.write_all(&buf);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Svg { instance, packing, scale, hint, out: dest } => {
            let inst = io::parse_instance(&read(&instance)?).map_err(Failure::parse)?;
            let p = io::parse_packing(&read(&packing)?).map_err(Failure::parse)?;
            let params: Option<Params> = match hint {
                Some(h) => Some(io::parse_hint(&read(&h)?).map_err(Failure::parse)?.params),
                None => None,
            };
            let text = svg::render_svg(&inst, &p, scale, params.as_ref());
            match dest {
                Some(d) => write_file(&d, &text)?,
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            Ok(EXIT_OK)
        }
    }
}
