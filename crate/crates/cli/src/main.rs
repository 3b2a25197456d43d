//! `cqcompound` command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain or accuracy errors (and failed
//! verification checks), 2 on usage errors.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cqcompound_core::capacity::{
    constellation_lower_bound, gaussian_compound_capacity_attenuation, gaussian_compound_capacity_noise,
    gaussian_compound_capacity_phase, Constellation, ConstellationOptions, EnergyMode,
};
use cqcompound_core::kennedy::{default_offset, displacement_sweep, eps_schedule, linear_grid, significant};
use cqcompound_core::verify::{run_suite, Suite};
use cqcompound_core::{compound_capacity, CapacityResult, CompoundSet, Dmc, GaussianChannelParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Distance within which an `--eps` value is attributed to a known reading.
const EPS_READING_TOL: f64 = 5e-4;

#[derive(Parser)]
#[command(name = "cqcompound", version, about = "Compound channel capacities")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form capacity of a compound Gaussian channel.
    Gcap {
        #[command(subcommand)]
        kind: GcapKind,
    },
    /// Capacity of a finite compound DMC read from a JSON file.
    Compound(CompoundArgs),
    /// Kennedy-receiver capacities over a grid of displacements.
    KennedySweep(SweepArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Constellation lower bound for the compound thermal-noise channel.
    Constellation(ConstellationArgs),
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GcapKind {
    /// Thermal noise with unknown `σ ∈ [A, B]`.
    Noise {
        #[arg(long = "A")]
        #[serde(rename = "A")]
        a: f64,
        #[arg(long = "B")]
        #[serde(rename = "B")]
        b: f64,
        #[arg(long)]
        energy: f64,
    },
    /// Thermal noise `σ` with unknown phase.
    Phase {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        energy: f64,
    },
    /// Thermal noise `σ` with unknown attenuation in `[A, B]`.
    Atten {
        #[arg(long = "A")]
        #[serde(rename = "A")]
        a: f64,
        #[arg(long = "B")]
        #[serde(rename = "B")]
        b: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        energy: f64,
    },
}

#[derive(Args, Serialize)]
struct CompoundArgs {
    /// JSON file `{"channels": [[[row...], ...], ...]}`.
    file: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    /// Signal amplitude.
    #[arg(long, default_value_t = 200.0)]
    a: f64,
    /// Displacement offset used for the default transmissivity.
    #[arg(long, default_value_t = default_offset())]
    c: f64,
    /// Lossy transmissivity; defaults to ((a - c)/a)^2.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    bmin: f64,
    #[arg(long)]
    bmax: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the table here; stdout then carries only the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SuiteArg {
    Bounds,
    Scaling,
    Limits,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    PerPoint,
    Mean,
}

#[derive(Args, Serialize)]
struct ConstellationArgs {
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    energy: f64,
    /// Fock-space truncation.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(16..))]
    dim: u64,
    #[arg(long, default_value_t = 3)]
    rings: usize,
    #[arg(long, default_value_t = 8)]
    phases: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::PerPoint)]
    mode: ModeArg,
    /// Number of unknown phase rotations `2πk/K` forming the compound set.
    #[arg(long, default_value_t = 1)]
    phase_states: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iterations: usize,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// What a command prints, plus whether it counts as a success.
struct Output {
    json: Value,
    csv: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gcap { kind } => gcap(kind, cli.format),
        Command::Compound(args) => compound(args, cli.format),
        Command::KennedySweep(args) => kennedy_sweep(args, cli.format),
        Command::Verify(args) => verify(args, cli.format),
        Command::Constellation(args) => constellation(args, cli.format),
    };
    match result {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
                Format::Csv => out.csv,
            };
            // a closed pipe is not an error of the computation
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn config(command: &str, args: &impl Serialize, format: Format) -> Value {
    let mut v = serde_json::to_value(args).expect("serializable");
    if let Value::Object(m) = &mut v {
        m.insert("command".into(), command.into());
        m.insert("format".into(), serde_json::to_value(format).expect("serializable"));
    }
    v
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
}

fn gcap(kind: &GcapKind, format: Format) -> Result<Output, Failure> {
    let (name, capacity, formula) = match *kind {
        GcapKind::Noise { a, b, energy } => {
            ("noise", gaussian_compound_capacity_noise(a, b, energy)?, format!("g({b} + {energy}) - g({b})"))
        }
        GcapKind::Phase { sigma, energy } => {
            ("phase", gaussian_compound_capacity_phase(sigma, energy)?, format!("g({sigma} + {energy}) - g({sigma})"))
        }
        GcapKind::Atten { a, b, sigma, energy } => (
            "atten",
            gaussian_compound_capacity_attenuation(a, b, sigma, energy)?,
            format!("g({sigma} + {a}*{energy}) - g({sigma})"),
        ),
    };
    let mut params = serde_json::to_value(kind).expect("serializable");
    if let Value::Object(m) = &mut params {
        m.remove("kind");
    }
    Ok(Output {
        json: json!({
            "kind": name,
            "params": params,
            "capacity_bits": capacity,
            "formula": formula,
            "resolved_config": config("gcap", kind, format),
        }),
        csv: format!("kind,capacity_bits\n{name},{}\n", significant(capacity, 12)),
        ok: true,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    channels: Vec<Vec<Vec<f64>>>,
}

fn read_channels(path: &Path) -> Result<CompoundSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    let file: ChannelFile =
        serde_json::from_str(&text).map_err(|e| Failure(format!("malformed channel file {}: {e}", path.display())))?;
    let channels = file
        .channels
        .into_iter()
        .enumerate()
        .map(|(s, rows)| Dmc::new(rows).map_err(|e| Failure(format!("channel {s}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompoundSet::new(channels)?)
}

fn result_json(r: &CapacityResult) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn compound(args: &CompoundArgs, format: Format) -> Result<Output, Failure> {
    let set = read_channels(&args.file)?;
    let r = compound_capacity(&set, args.tol)?;
    let mut json = result_json(&r);
    json["resolved_config"] = config("compound", args, format);
    let prior = r.optimizer.as_slice().iter().map(|p| significant(*p, 12)).collect::<Vec<_>>().join(" ");
    let csv = format!(
        "value,upper_bound,gap,worst_index,optimizer\n{},{},{},{},{prior}\n",
        significant(r.value, 12),
        significant(r.upper_bound, 12),
        significant(r.gap, 12),
        r.worst_index
    );
    Ok(Output { json, csv, ok: true })
}

/// Which reading of the lossy transmissivity `eps` corresponds to.
fn eps_reading(a: f64, c: f64, eps: f64) -> Result<&'static str, Failure> {
    let squared = eps_schedule(a, c)?;
    let unsquared = squared.sqrt();
    let (d_sq, d_un) = ((eps - squared).abs(), (eps - unsquared).abs());
    Ok(if d_sq <= EPS_READING_TOL && d_sq <= d_un {
        "squared ((a-c)/a)^2"
    } else if d_un <= EPS_READING_TOL {
        "unsquared (a-c)/a"
    } else {
        "custom"
    })
}

fn kennedy_sweep(args: &SweepArgs, format: Format) -> Result<Output, Failure> {
    let eps = match args.eps {
        Some(e) => e,
        None => eps_schedule(args.a, args.c)?,
    };
    let grid = linear_grid(args.bmin, args.bmax, args.steps)?;
    let table = displacement_sweep(args.a, eps, &grid, args.tol)?;
    let best = table.best();
    let reading = eps_reading(args.a, args.c, eps)?;
    let mut resolved = config("kennedy-sweep", args, format);
    resolved["eps"] = eps.into();
    let summary = json!({
        "a": args.a,
        "eps": eps,
        "eps_reading": reading,
        "argmax_b": best.b,
        "argmax_cap_compound": best.cap_compound,
        "resolved_config": resolved,
    });
    let mut full = summary.clone();
    full["rows"] = serde_json::to_value(&table.rows).expect("serializable");
    let summary_csv = format!(
        "argmax_b,argmax_cap_compound,eps,eps_reading\n{},{},{},{reading}\n",
        significant(best.b, 12),
        significant(best.cap_compound, 12),
        significant(eps, 12)
    );
    if let Some(path) = &args.out {
        let contents = match format {
            Format::Json => serde_json::to_string_pretty(&full).expect("serializable") + "\n",
            Format::Csv => table.to_csv(),
        };
        write_file(path, &contents)?;
        return Ok(Output { json: summary, csv: summary_csv, ok: true });
    }
    if format == Format::Csv {
        eprint!("{summary_csv}");
    }
    Ok(Output { json: full, csv: table.to_csv(), ok: true })
}

fn verify(args: &VerifyArgs, format: Format) -> Result<Output, Failure> {
    let suite = match args.suite {
        SuiteArg::Bounds => Suite::Bounds,
        SuiteArg::Scaling => Suite::Scaling,
        SuiteArg::Limits => Suite::Limits,
    };
    let report = run_suite(suite, args.seed)?;
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["resolved_config"] = config("verify", args, format);
    if let Some(path) = &args.out {
        write_file(path, &(serde_json::to_string_pretty(&json).expect("serializable") + "\n"))?;
    }
    let mut csv = String::from("name,exact,relation,bound,passed\n");
    for c in &report.checks {
        let rel = serde_json::to_value(c.relation).expect("serializable");
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            c.name,
            significant(c.exact, 12),
            rel.as_str().unwrap_or_default(),
            significant(c.bound, 12),
            c.passed
        );
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("failed: {} (exact {:e}, bound {:e})", c.name, c.exact, c.bound);
    }
    Ok(Output { json, csv, ok: report.all_passed() })
}

fn constellation(args: &ConstellationArgs, format: Format) -> Result<Output, Failure> {
    if args.phase_states == 0 {
        return Err(Failure("phase-states must be at least 1".into()));
    }
    let mode = match args.mode {
        ModeArg::PerPoint => EnergyMode::PerPoint,
        ModeArg::Mean => EnergyMode::Mean,
    };
    let con = Constellation::rings(args.energy, args.rings, args.phases, mode)?;
    let states = (0..args.phase_states)
        .map(|k| GaussianChannelParams::new(args.sigma, 1.0, TAU * k as f64 / args.phase_states as f64))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = ConstellationOptions { tol: args.tol, max_iterations: args.max_iterations };
    let r = constellation_lower_bound(&states, &con, args.dim as usize, opts)?;
    let target = gaussian_compound_capacity_phase(args.sigma, args.energy)?;
    let relative_gap = if target > 0.0 { (target - r.value) / target } else { 0.0 };
    let mut json = result_json(&r);
    json["target"] = target.into();
    json["relative_gap"] = relative_gap.into();
    json["points"] = con.points().len().into();
    json["resolved_config"] = config("constellation", args, format);
    if let Some(path) = &args.out {
        write_file(path, &(serde_json::to_string_pretty(&json).expect("serializable") + "\n"))?;
    }
    let csv = format!(
        "value,upper_bound,target,relative_gap\n{},{},{},{}\n",
        significant(r.value, 12),
        significant(r.upper_bound, 12),
        significant(target, 12),
        significant(relative_gap, 12)
    );
    Ok(Output { json, csv, ok: true })
}
