//! Command-line front end.
//!
//! Every command produces one [`ScenarioTable`] and writes it as CSV (the
//! default) or JSON, to stdout or to `--out`. Relative `--out` paths resolve
//! against `$SEQWEAK_OUT_DIR` when that is set.
//!
//! Exit codes: 0 on success, 2 for invalid arguments, 1 for physics-level
//! failures (orthogonal selections, undefined probabilities, failed paradox
//! checks) and I/O errors. Diagnostics go to stderr only.

mod format;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::erasure::{
    correct_failed_erasure, estimate_weak_value, run_coupled_protocol, sample_outcome_shots,
    Coupling, Strength,
};
use crate::scenarios::{
    named_operator, probability_rows, resch_steinberg_check, run_deterministic_path_experiment,
    sweep, Check, SweepParameter, SweepSpec,
};
use crate::table::{Quantity, Row, ScenarioTable, Source};
use crate::tsvf::{
    sequential_kraus_sets, transition_amplitudes, weak_value, GoldenRoot, PathLabel, Scheme,
    SelectionAngles,
};
use crate::{Error, Result};

pub use format::{format_number, render_csv, render_json, CSV_HEADER};

/// Environment variable naming the directory for relative `--out` paths.
pub const OUT_DIR_ENV: &str = "SEQWEAK_OUT_DIR";

const SAMPLE_CHUNK: u64 = 8192;

#[derive(Debug, Parser)]
#[command(name = "seqweak", version, about = "Strong and weak sequential measurements on pre- and post-selected qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct AngleArgs {
    /// Pre-selection angle in radians, or `golden` / `golden-`.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: AngleSpec,
    /// Post-selection angle in radians, or `golden` / `golden-`.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi: AngleSpec,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deterministic-path experiment at one golden root.
    Paradox {
        #[arg(long, value_parser = parse_root, default_value = "+", allow_hyphen_values = true)]
        root: GoldenRoot,
        /// Comma-separated normalized strengths s in [0, 1] for the weak-value readings.
        #[arg(long, value_parser = parse_strength, value_delimiter = ',', default_value = "0.01,0.1,0.5,1")]
        strength: Vec<Strength>,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep one parameter over an inclusive linear grid.
    Sweep {
        /// theta, phi, diag (theta = phi), g, or shots.
        #[arg(long, value_parser = parse_sweep_parameter)]
        param: SweepParameter,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = crate::scenarios::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "golden")]
        theta: AngleSpec,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "golden")]
        phi: AngleSpec,
        #[arg(long, value_parser = parse_scheme, default_value = "distinctPath")]
        scheme: Scheme,
        #[arg(long, value_parser = parse_path)]
        path: Option<PathLabel>,
        /// Normalized strength for shot sweeps.
        #[arg(long, value_parser = parse_strength, default_value = "1")]
        strength: Strength,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One run of the erasure circuit, optionally with sampled shots.
    Circuit {
        #[command(flatten)]
        angles: AngleArgs,
        /// A, B, C, D, ME (A+D) or MO (B+C).
        #[arg(long, value_parser = parse_coupling)]
        path: Coupling,
        /// Normalized strength s in [0, 1].
        #[arg(long, value_parser = parse_strength, conflicts_with = "g")]
        strength: Option<Strength>,
        /// Raw rotation angle g in [0, π/2].
        #[arg(long, value_parser = parse_g)]
        g: Option<Strength>,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// ABL probabilities, closed form and simulated.
    Abl {
        #[command(flatten)]
        angles: AngleArgs,
        /// sequence, modular or distinctPath; all three when absent.
        #[arg(long, value_parser = parse_scheme)]
        scheme: Option<Scheme>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Weak value of one operator.
    Weakvalue {
        #[command(flatten)]
        angles: AngleArgs,
        /// A, B, C, D, ME, MO, sigmaXZ, I, X, Y, Z, P0, P1, P+, P-.
        #[arg(long, value_parser = parse_weak_op)]
        op: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Two-meter correlation against its weak-value prediction.
    Resch {
        #[command(flatten)]
        angles: AngleArgs,
        /// First coupled observable: I, X, Y, Z, P0, P1, P+, P-.
        #[arg(long, value_parser = parse_single_op)]
        a1: String,
        #[arg(long, value_parser = parse_single_op)]
        a2: String,
        /// Comma-separated coupling angles.
        #[arg(long, value_parser = parse_positive, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
        g: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// An angle as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSpec {
    Radians(f64),
    Golden(GoldenRoot),
}

impl AngleSpec {
    fn theta(self) -> f64 {
        match self {
            AngleSpec::Radians(x) => x,
            AngleSpec::Golden(r) => SelectionAngles::golden(r).theta,
        }
    }

    fn phi(self) -> f64 {
        match self {
            AngleSpec::Radians(x) => x,
            AngleSpec::Golden(r) => SelectionAngles::golden(r).phi,
        }
    }
}

impl FromStr for AngleSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "golden" | "golden+" => Ok(AngleSpec::Golden(GoldenRoot::Positive)),
            "golden-" => Ok(AngleSpec::Golden(GoldenRoot::Negative)),
            _ => match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(AngleSpec::Radians(x)),
                _ => Err(format!("`{s}` is not an angle in radians or `golden`/`golden-`")),
            },
        }
    }
}

fn parse_angle(s: &str) -> std::result::Result<AngleSpec, String> {
    s.parse()
}

fn parse_root(s: &str) -> std::result::Result<GoldenRoot, String> {
    match s {
        "+" | "positive" | "golden" | "golden+" => Ok(GoldenRoot::Positive),
        "-" | "negative" | "golden-" => Ok(GoldenRoot::Negative),
        _ => Err(format!("root must be `+` or `-`, got `{s}`")),
    }
}

fn parse_strength(s: &str) -> std::result::Result<Strength, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    Strength::from_normalized(x).map_err(|e| e.to_string())
}

fn parse_g(s: &str) -> std::result::Result<Strength, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    Strength::from_angle(x).map_err(|e| e.to_string())
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_path(s: &str) -> std::result::Result<PathLabel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_sweep_parameter(s: &str) -> std::result::Result<SweepParameter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_coupling(s: &str) -> std::result::Result<Coupling, String> {
    match s {
        "ME" => Ok(Coupling::even()),
        "MO" => Ok(Coupling::odd()),
        _ => parse_path(s).map(Coupling::single),
    }
}

const PATH_OPS: [&str; 7] = ["A", "B", "C", "D", "ME", "MO", "sigmaXZ"];

fn parse_single_op(s: &str) -> std::result::Result<String, String> {
    named_operator(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn parse_weak_op(s: &str) -> std::result::Result<String, String> {
    if PATH_OPS.contains(&s) {
        Ok(s.to_string())
    } else {
        parse_single_op(s)
    }
}

/// A command's output before rendering.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: ScenarioTable,
    pub checks: Vec<Check>,
    pub seed: Option<u64>,
}

/// Validated command line.
#[derive(Debug)]
pub struct RunConfig {
    command: Command,
    command_line: String,
}

impl RunConfig {
    /// Parses `argv` (program name first). Usage errors come back as clap
    /// errors, ready to print.
    pub fn from_args<I, T>(argv: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
        let cli = Cli::try_parse_from(&argv)?;
        let command_line = std::iter::once("seqweak".to_string())
            .chain(argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
            .collect::<Vec<_>>()
            .join(" ");
        let cfg = RunConfig {
            command: cli.command,
            command_line,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> std::result::Result<(), clap::Error> {
        let usage = |msg: String| {
            let mut cmd = <Cli as clap::CommandFactory>::command();
            Err(cmd.error(clap::error::ErrorKind::ValueValidation, msg))
        };
        match &self.command {
            Command::Sweep { .. } => {
                if let Err(e) = self.sweep_spec().validate() {
                    return usage(e.to_string());
                }
            }
            Command::Paradox { shots: 0, .. } => return usage("--shots must be positive".into()),
            _ => {}
        }
        Ok(())
    }

    fn sweep_spec(&self) -> SweepSpec {
        match &self.command {
            Command::Sweep {
                param,
                from,
                to,
                steps,
                theta,
                phi,
                strength,
                shots,
                seed,
                ..
            } => SweepSpec {
                steps: *steps,
                theta: theta.theta(),
                phi: phi.phi(),
                strength: *strength,
                shots: *shots,
                seed: *seed,
                ..SweepSpec::new(*param, *from, *to)
            },
            _ => unreachable!("sweep_spec on a non-sweep command"),
        }
    }

    fn output(&self) -> &OutputArgs {
        match &self.command {
            Command::Paradox { output, .. }
            | Command::Sweep { output, .. }
            | Command::Circuit { output, .. }
            | Command::Abl { output, .. }
            | Command::Weakvalue { output, .. }
            | Command::Resch { output, .. } => output,
        }
    }

    pub fn format(&self) -> OutputFormat {
        self.output().format
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.output().out.as_deref()
    }

    pub fn command_line(&self) -> &str {
        &self.command_line
    }

    /// Runs the command. Physics-level failures come back as `Err`.
    pub fn execute(&self) -> Result<Report> {
        match &self.command {
            Command::Paradox {
                root,
                strength,
                shots,
                seed,
                ..
            } => {
                let r = run_deterministic_path_experiment(*root, strength, *shots, *seed)?;
                Ok(Report {
                    table: r.table,
                    checks: r.checks,
                    seed: Some(*seed),
                })
            }
            Command::Sweep { scheme, path, .. } => {
                let spec = self.sweep_spec();
                Ok(Report {
                    table: sweep(&spec, *scheme, *path)?,
                    checks: Vec::new(),
                    seed: (spec.parameter == SweepParameter::Shots).then_some(spec.seed),
                })
            }
            Command::Circuit {
                angles,
                path,
                strength,
                g,
                shots,
                seed,
                ..
            } => {
                let st = g.or(*strength).unwrap_or(Strength::STRONG);
                Ok(Report {
                    table: circuit_table(&selection(angles)?, *path, st, *shots, *seed)?,
                    checks: Vec::new(),
                    seed: (*shots > 0).then_some(*seed),
                })
            }
            Command::Abl { angles, scheme, .. } => {
                let a = selection(angles)?;
                let schemes = match scheme {
                    Some(s) => vec![*s],
                    None => vec![Scheme::Sequence, Scheme::Modular, Scheme::DistinctPath],
                };
                let mut table = ScenarioTable::new();
                for s in schemes {
                    let rows: Vec<Row> = probability_rows(&a, s, None)?
                        .into_iter()
                        .filter(|r| r.quantity == Quantity::Probability)
                        .collect();
                    if rows.is_empty() {
                        return Err(Error::VanishingDenominator(transition_amplitudes(&a).sum_sq()));
                    }
                    table.extend(rows.into_iter().collect());
                }
                table.sort_canonical();
                Ok(Report {
                    table,
                    ..Report::default()
                })
            }
            Command::Weakvalue { angles, op, .. } => {
                let a = selection(angles)?;
                let w = weak_value(&a.two_state_vector(), &weak_operator(op)?)?;
                let table = [(Quantity::WeakValueRe, w.re()), (Quantity::WeakValueIm, w.im())]
                    .into_iter()
                    .map(|(q, v)| Row::new(a.theta, a.phi, "weakValue", op.as_str(), q, v, Source::ClosedForm))
                    .collect();
                Ok(Report {
                    table,
                    ..Report::default()
                })
            }
            Command::Resch { angles, a1, a2, g, .. } => {
                let a = selection(angles)?;
                let t = resch_steinberg_check(&a, &named_operator(a1)?, &named_operator(a2)?, g)?;
                Ok(Report {
                    table: t.to_scenario_table(a1, a2),
                    ..Report::default()
                })
            }
        }
    }

    pub fn render(&self, report: &Report) -> String {
        match self.format() {
            OutputFormat::Csv => render_csv(&report.table),
            OutputFormat::Json => render_json(report, &self.command_line),
        }
    }
}

fn selection(a: &AngleArgs) -> Result<SelectionAngles> {
    SelectionAngles::new(a.theta.theta(), a.phi.phi())
}

fn weak_operator(name: &str) -> Result<crate::qcore::MatrixOp> {
    let sets = sequential_kraus_sets();
    let paths = |ps: &[PathLabel]| Coupling::from_paths(ps).operator();
    match name {
        "ME" => Ok(paths(&[PathLabel::A, PathLabel::D])),
        "MO" => Ok(paths(&[PathLabel::B, PathLabel::C])),
        "sigmaXZ" => Ok(sets.sigma_xz()),
        other => match other.parse::<PathLabel>() {
            Ok(p) => Ok(sets.path(p).clone()),
            Err(_) => named_operator(other),
        },
    }
}

/// Rows describing one run of the erasure circuit.
fn circuit_table(angles: &SelectionAngles, coupling: Coupling, st: Strength, shots: u64, seed: u64) -> Result<ScenarioTable> {
    let (t, p) = (angles.theta, angles.phi);
    let name = coupling.to_string();
    let scheme = match coupling.single_path() {
        Some(_) => Scheme::DistinctPath,
        None => Scheme::Modular,
    };
    let s = scheme.as_str();
    let tag = format!("{name};s={}", format_number(st.s()));
    let row = |label: String, q: Quantity, v: f64, src: Source| Row::new(t, p, s, label, q, v, src);
    let out = run_coupled_protocol(angles, coupling, st)?;
    let mut table = ScenarioTable::new();

    table.push(row(format!("{tag};success"), Quantity::Probability, out.success.probability, Source::Circuit));
    table.push(row(format!("{tag};fail"), Quantity::Probability, out.fail.probability, Source::Circuit));
    for (branch, b) in [("success", &out.success), ("fail", &out.fail)] {
        if let Ok(ps) = b.conditional_postselection() {
            table.push(row(format!("{tag};{branch};postselect"), Quantity::Probability, ps, Source::Circuit));
        }
    }
    if let Ok(click) = out.success.click_probability() {
        table.push(row(format!("{tag};click"), Quantity::Probability, click, Source::Circuit));
    }
    if st == Strength::STRONG {
        let closed = match (coupling.single_path(), scheme) {
            (Some(path), _) => crate::tsvf::distinct_path_probability(&transition_amplitudes(angles), path).ok(),
            (None, _) => crate::tsvf::closed_form_probabilities(angles, Scheme::Modular)
                .ok()
                .and_then(|v| v.into_iter().find(|(l, _)| *l == name).map(|(_, x)| x)),
        };
        if let Some(x) = closed {
            table.push(row(format!("{tag};click"), Quantity::Probability, x, Source::ClosedForm));
        }
    }
    if let Ok(corrected) = correct_failed_erasure(&out) {
        if let Ok(click) = corrected.success.click_probability() {
            let label = format!("{};s={};corrected;click", corrected.coupling, format_number(st.s()));
            table.push(row(label, Quantity::Probability, click, Source::Circuit));
        }
    }
    if st.g() > 0.0 {
        if let Ok(est) = estimate_weak_value(&out) {
            table.push(row(tag.clone(), Quantity::WeakValueRe, est.re, Source::Circuit));
            table.push(row(tag.clone(), Quantity::WeakValueIm, est.im, Source::Circuit));
        }
    }
    if let Ok(w) = weak_value(&angles.two_state_vector(), &coupling.operator()) {
        table.push(row(name.clone(), Quantity::WeakValueRe, w.re(), Source::ClosedForm));
        table.push(row(name.clone(), Quantity::WeakValueIm, w.im(), Source::ClosedForm));
    }
    if shots > 0 {
        let tally = sample_outcome_shots(&out, shots, seed, SAMPLE_CHUNK)?;
        if let Some(f) = tally.click_frequency() {
            table.push(row(format!("{tag};click"), Quantity::Probability, f, Source::Sampled));
        }
        let success = tally.accepted_successes() as f64 / shots as f64;
        table.push(row(format!("{tag};success;accepted"), Quantity::Probability, success, Source::Sampled));
    }
    table.sort_canonical();
    Ok(table)
}

fn resolve_out(path: &Path, env_dir: Option<&Path>) -> PathBuf {
    match env_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn write_output(cfg: &RunConfig, body: &str, stdout: &mut dyn Write) -> io::Result<()> {
    match cfg.out_path() {
        None => stdout.write_all(body.as_bytes()),
        Some(p) => {
            let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
            let path = resolve_out(p, env_dir.as_deref());
            if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, body)
        }
    }
}

/// Parses, runs and renders one command line against the given streams.
/// Returns the process exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let report = match cfg.execute() {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    if let Err(e) = write_output(&cfg, &cfg.render(&report), stdout) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return 1;
    }
    let failed: Vec<&Check> = report.checks.iter().filter(|c| !c.passed).collect();
    if !failed.is_empty() {
        for c in failed {
            let _ = writeln!(stderr, "check failed: {} (expected {}, observed {})", c.name, c.expected, c.observed);
        }
        return 1;
    }
    0
}

/// Entry point for the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run_with(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}
