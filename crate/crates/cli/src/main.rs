//! `zhknot`: invariants of virtual links from Gauss codes.
//!
//! Exit codes: 0 success, 1 invariance violation found by `fuzz`, 2 bad
//! input (parse errors, refused state sums), 3 internal consistency
//! violation.

mod report;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zhknot::algebra::CyclicGroup;
use zhknot::moves::{random_walk_with, MoveKind, WalkOptions};
use zhknot::quandle::{builtin_quandles, cjkls_cocycle, FiniteQuandle, TwoCocycle};
use zhknot::zh::{canonical_system, canonicalize_alexander_system, verify_alexander_system};
use zhknot::{parse_gauss_code, zh_construct, AlexanderSystem, GaussCode, Orientation, QuandleProbe};

use report::{FuzzReport, InvariantReport, SystemReport, ZhReport};

/// State sums above this many states need `--force`.
const STATE_LIMIT_LOG2: usize = 20;

#[derive(Parser)]
#[command(name = "zhknot", version, about = "Invariants of virtual links through the Zh-construction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Gauss code and print it back in normal form.
    Parse {
        #[command(flatten)]
        input: CodeInput,
        #[arg(long)]
        json: bool,
    },
    /// Compute the polynomial, AS-set, numerability and quandle invariants.
    Invariants {
        #[command(flatten)]
        input: CodeInput,
        #[command(flatten)]
        quandles: QuandleArgs,
        #[arg(long)]
        json: bool,
        /// Allow state sums with more than 2^20 states.
        #[arg(long)]
        force: bool,
    },
    /// Build Zh(D) or Zh^op(D) with its Alexander sub-numbering.
    Zh {
        #[command(flatten)]
        input: CodeInput,
        #[arg(long, value_enum, default_value = "op")]
        orientation: OrientationArg,
        #[arg(long)]
        json: bool,
    },
    /// Canonical Alexander system of a diagram, or of a system given as JSON.
    Canonicalize {
        #[command(flatten)]
        input: CodeInput,
        /// Alexander system JSON file (as printed by `zh --json`).
        #[arg(long, conflicts_with = "code")]
        system: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Random move walk, checking every invariant after every step.
    Fuzz {
        #[command(flatten)]
        input: CodeInput,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated move kinds: r, omega, r1+, r1-, r2+, r2-, r3,
        /// occ, reconnect, bad-r2.
        #[arg(long, default_value = "r")]
        kinds: String,
        /// Walk ω-moves on Zh^op(D) and check the Zh invariants instead.
        #[arg(long)]
        zh: bool,
        /// Soft cap on the number of crossings during the walk.
        #[arg(long, default_value_t = 8)]
        max_crossings: usize,
        /// Invariant fields to leave out of the comparison.
        #[arg(long, value_delimiter = ',')]
        skip: Vec<String>,
        #[command(flatten)]
        quandles: QuandleArgs,
        #[arg(long)]
        json: bool,
    },
    /// Built-in quandles.
    Quandles {
        #[command(subcommand)]
        command: QuandleCommand,
    },
}

#[derive(Subcommand)]
enum QuandleCommand {
    List {
        #[arg(long, default_value_t = 8)]
        max_size: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct CodeInput {
    /// Gauss code such as "O1+O2+U1+U2+"; read from stdin when absent or "-".
    code: Option<String>,
}

#[derive(Args)]
struct QuandleArgs {
    /// Quandle spec: dihedral:N, alexander:N:T, trivial:N (suffix +v to
    /// adjoin v) or file:PATH with one comma-separated row per line.
    #[arg(long = "quandle")]
    quandles: Vec<String>,
    /// 2-cocycle for every --quandle: cjkls, or file:PATH with rows of
    /// exponents of u.
    #[arg(long)]
    cocycle: Option<String>,
    /// Order of u for a cocycle file; infinite when absent.
    #[arg(long)]
    cocycle_order: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Standard,
    Op,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Orientation {
        match o {
            OrientationArg::Standard => Orientation::Standard,
            OrientationArg::Op => Orientation::Op,
        }
    }
}

enum Failure {
    Input(String),
    Violation(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Input(_) => 2,
            Failure::Inconsistent(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Violation(m) | Failure::Inconsistent(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_code(input: &CodeInput) -> Result<GaussCode, Failure> {
    let text = match input.code.as_deref() {
        Some(t) if t != "-" => t.to_string(),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("reading stdin: {e}")))?;
            s.trim_end_matches(['\n', '\r']).to_string()
        }
    };
    parse_gauss_code(&text).map_err(|e| {
        let mut msg = format!("cannot parse Gauss code: {e}");
        if let Some(p) = e.position() {
            msg.push_str(&format!("\n  {text}\n  {}^", " ".repeat(text[..p].chars().count())));
        }
        Failure::Input(msg)
    })
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn load_quandle(spec: &str) -> Result<FiniteQuandle, Failure> {
    match spec.strip_prefix("file:") {
        Some(path) => FiniteQuandle::from_csv(path, &read_file(path)?),
        None => spec.parse(),
    }
    .map_err(|e| Failure::Input(format!("quandle {spec}: {e}")))
}

fn load_cocycle(spec: &str, order: Option<u64>) -> Result<TwoCocycle, Failure> {
    if spec == "cjkls" {
        return Ok(cjkls_cocycle());
    }
    let path = spec.strip_prefix("file:").ok_or_else(|| Failure::Input(format!("unknown cocycle {spec}")))?;
    let rows = read_file(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    let group = order.map_or(CyclicGroup::Infinite, CyclicGroup::Finite);
    TwoCocycle::from_exponents(group, &rows).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn probes(args: &QuandleArgs) -> Result<Vec<QuandleProbe>, Failure> {
    let cocycle = args.cocycle.as_deref().map(|c| load_cocycle(c, args.cocycle_order)).transpose()?;
    if cocycle.is_some() && args.quandles.is_empty() {
        return Err(Failure::Input("--cocycle needs a --quandle".to_string()));
    }
    args.quandles
        .iter()
        .map(|spec| {
            let quandle = load_quandle(spec)?;
            if let Some(phi) = &cocycle {
                if phi.size() != quandle.size() {
                    return Err(Failure::Input(format!(
                        "cocycle has size {} but {} has size {}",
                        phi.size(),
                        quandle.name,
                        quandle.size()
                    )));
                }
            }
            Ok(QuandleProbe { quandle, cocycle: cocycle.clone() })
        })
        .collect()
}

/// Writes to stdout, ignoring a closed pipe (`zhknot ... | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: serde::Serialize>(value: &T) {
    emit(&format!("{}\n", serde_json::to_string_pretty(value).expect("reports serialize")));
}

fn cmd_parse(input: &CodeInput, json: bool) -> Outcome {
    let d = read_code(input)?;
    if json {
        print_json(&serde_json::json!({
            "code": d.to_string(),
            "components": d.num_components(),
            "crossings": d.num_crossings(),
            "writhe": d.writhe(),
            "diagram": d,
        }));
    } else {
        emit(&format!(
            "{d}\ncomponents {}, crossings {}, writhe {}\n",
            d.num_components(),
            d.num_crossings(),
            d.writhe()
        ));
    }
    Ok(())
}

fn cmd_invariants(input: &CodeInput, quandles: &QuandleArgs, json: bool, force: bool) -> Outcome {
    let d = read_code(input)?;
    let probes = probes(quandles)?;
    if d.num_crossings() > STATE_LIMIT_LOG2 && !force {
        return Err(Failure::Input(format!(
            "{} crossings means 2^{} states; pass --force to compute anyway",
            d.num_crossings(),
            d.num_crossings()
        )));
    }
    let report = InvariantReport::compute(&d, &probes).map_err(|e| Failure::Input(e.to_string()))?;
    if json {
        print_json(&report);
    } else {
        emit(&report.to_string());
    }
    match report.violations.is_empty() {
        true => Ok(()),
        false => Err(Failure::Inconsistent(format!("inconsistent report: {}", report.violations.join("; ")))),
    }
}

fn cmd_zh(input: &CodeInput, orientation: Orientation, json: bool) -> Outcome {
    let d = read_code(input)?;
    let report = ZhReport::new(&zh_construct(&d, orientation));
    if json {
        print_json(&report);
    } else {
        emit(&report.to_string());
    }
    match report.valid {
        true => Ok(()),
        false => Err(Failure::Inconsistent("Zh construction produced an invalid Alexander system".to_string())),
    }
}

fn cmd_canonicalize(input: &CodeInput, system: Option<&PathBuf>, json: bool) -> Outcome {
    let canonical = match system {
        Some(path) => {
            let text = read_file(&path.to_string_lossy())?;
            let s: AlexanderSystem = serde_json::from_str(&text)
                .or_else(|_| serde_json::from_str::<serde_json::Value>(&text).and_then(|v| serde_json::from_value(v["system"].clone())))
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            canonicalize_alexander_system(&s).map_err(|e| {
                let all = verify_alexander_system(&s).violations.iter().map(ToString::to_string).collect::<Vec<_>>();
                Failure::Input(format!("{e}\n  {}", all.join("\n  ")))
            })?
        }
        None => canonical_system(&read_code(input)?),
    };
    let report = SystemReport::new(&canonical);
    if json {
        print_json(&report);
    } else {
        emit(&report.to_string());
    }
    Ok(())
}

struct FuzzArgs<'a> {
    steps: usize,
    seed: u64,
    kinds: &'a str,
    zh: bool,
    max_crossings: usize,
    skip: &'a [String],
    json: bool,
}

fn cmd_fuzz(input: &CodeInput, quandles: &QuandleArgs, a: FuzzArgs<'_>) -> Outcome {
    let d = read_code(input)?;
    let kinds_text = if a.zh && a.kinds == "r" { "omega" } else { a.kinds };
    let kinds = MoveKind::parse_list(kinds_text).map_err(|e| Failure::Input(e.to_string()))?;
    let probes = probes(quandles)?;
    let report = if a.zh {
        let z = zh_construct(&d, Orientation::Op);
        let opts = WalkOptions { max_crossings: usize::MAX, omega: Some(z.omega) };
        let walk = random_walk_with(&z.code, a.steps, a.seed, &kinds, opts);
        FuzzReport::zh(&walk, z.omega, &probes, a.seed)
    } else {
        let opts = WalkOptions { max_crossings: a.max_crossings, omega: None };
        let walk = random_walk_with(&d, a.steps, a.seed, &kinds, opts);
        FuzzReport::plain(&walk, &probes, a.skip, a.seed)
    }
    .map_err(|e| Failure::Input(e.to_string()))?;
    if a.json {
        print_json(&report);
    } else {
        emit(&report.to_string());
    }
    match &report.failure {
        None => Ok(()),
        Some(f) => Err(Failure::Violation(format!("invariance violated at step {}: {}", f.step, f.fields.join(", ")))),
    }
}

fn cmd_quandles(max_size: u64, json: bool) -> Outcome {
    let qs = builtin_quandles(max_size);
    if json {
        let rows: Vec<serde_json::Value> = qs
            .iter()
            .map(|q| serde_json::json!({"name": q.name, "size": q.size(), "linear": q.linear().is_some()}))
            .collect();
        print_json(&rows);
    } else {
        let lines: String = qs
            .iter()
            .map(|q| format!("{:<16} size {:>2}{}\n", q.name, q.size(), if q.linear().is_some() { "  linear" } else { "" }))
            .collect();
        emit(&lines);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Parse { input, json } => cmd_parse(input, *json),
        Command::Invariants { input, quandles, json, force } => cmd_invariants(input, quandles, *json, *force),
        Command::Zh { input, orientation, json } => cmd_zh(input, (*orientation).into(), *json),
        Command::Canonicalize { input, system, json } => cmd_canonicalize(input, system.as_ref(), *json),
        Command::Fuzz { input, steps, seed, kinds, zh, max_crossings, skip, quandles, json } => cmd_fuzz(
            input,
            quandles,
            FuzzArgs { steps: *steps, seed: *seed, kinds, zh: *zh, max_crossings: *max_crossings, skip, json: *json },
        ),
        Command::Quandles { command: QuandleCommand::List { max_size, json } } => cmd_quandles(*max_size, *json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
