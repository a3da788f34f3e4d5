//! `photongate` command-line front end.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 ok, 2 parse,
//! 3 validation, 4 check failure, 5 unsupported.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use photongate::assembly::{assemble_two_qubit, SetupConfig};
use photongate::gates::{gate, settings, GateName};
use photongate::json::{
    config_from_json, density_from_json, matrix_from_json, matrix_to_json, state_from_json,
    to_json_string, TomographyReport, VaaTranscriptJson,
};
use photongate::measure::{detection_probabilities, sample_counts, tomography_pipeline, DensityMat};
use photongate::numkernel::{dist_up_to_phase, distance, nearest_unitary, Mat4};
use photongate::protocols::{grover_run, vaa_full_run, vaa_run_with, GroverOracleId, Sign, VaaAxis, VaaMeasurement};
use photongate::synth::compile_two_qubit;
use photongate::Error;

const UNITARY_TOL: f64 = 1e-8;
const PROJECT_ABOVE: f64 = 1e-10;
const CHECK_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "photongate", version, about = "Single-photon two-qubit gate simulator and compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a 4×4 unitary (matrix JSON) into optical settings.
    Compile(CompileArgs),
    /// Print a named gate's matrix or published settings.
    Gate(GateArgs),
    /// Detection probabilities (and sampled counts) for a setup and input.
    Simulate(SimulateArgs),
    /// Five-basis tomography of a density matrix.
    Tomography(TomographyArgs),
    /// Run the Grover search for oracle k and print the detector that clicks.
    Grover(GroverArgs),
    /// One run of the mean king's problem protocol.
    Vaa(VaaArgs),
}

#[derive(Args)]
struct CompileArgs {
    /// Matrix JSON file.
    input: PathBuf,
    /// Re-assemble the settings and report the distance to the input.
    #[arg(long)]
    check: bool,
    /// Write the settings here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Matrix,
    Settings,
}

#[derive(Args)]
struct GateArgs {
    #[arg(long)]
    name: String,
    #[arg(long, value_enum, default_value = "matrix")]
    emit: Emit,
}

#[derive(Args)]
struct SimulateArgs {
    /// Setup JSON file.
    #[arg(long)]
    setup: PathBuf,
    /// Pure input state JSON file.
    #[arg(long, required_unless_present = "rho", conflicts_with = "rho")]
    state: Option<PathBuf>,
    /// Density matrix JSON file.
    #[arg(long)]
    rho: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Required when shots > 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TomographyArgs {
    #[arg(long)]
    rho: PathBuf,
    /// Shots per basis; 0 uses exact probabilities.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Required when shots > 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GroverArgs {
    /// Oracle index, 1 to 4.
    #[arg(long)]
    oracle: usize,
}

#[derive(Args)]
struct VaaArgs {
    /// Measured axis: 1, 2, 3 or sigma1..sigma3. Omit for a random choice.
    #[arg(long, requires = "outcome")]
    measurement: Option<String>,
    /// Outcome of the measurement: +1 or -1.
    #[arg(long, requires = "measurement", allow_hyphen_values = true)]
    outcome: Option<String>,
    /// Seed for the random choices; 0 when omitted.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Dimension { .. } | Error::NonFinite | Error::UnknownName(_) => 2,
            Error::NoSettings(_) => 5,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn require_seed(shots: u64, seed: Option<u64>) -> Result<u64, Failure> {
    match (shots, seed) {
        (0, s) => Ok(s.unwrap_or(0)),
        (_, Some(s)) => Ok(s),
        (_, None) => Err(Failure::new(2, "--seed is required when --shots is positive")),
    }
}

fn compile(args: &CompileArgs) -> Outcome {
    let input: Mat4 = matrix_from_json(&read(&args.input)?)?;
    let defect = input.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: defect }.into());
    }
    let target = if defect > PROJECT_ABOVE { nearest_unitary(&input)? } else { input };
    let cfg = compile_two_qubit(&target)?;
    let text = to_json_string(&cfg);
    match &args.output {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    if args.check {
        let rebuilt = assemble_two_qubit(&cfg);
        let exact = distance(&rebuilt, &input);
        eprintln!("dist_up_to_phase {:.3e}", dist_up_to_phase(&rebuilt, &input));
        eprintln!("distance {exact:.3e}");
        if exact.is_nan() || exact >= CHECK_TOL {
            return Err(Failure::new(4, format!("check failed: distance {exact:.3e} >= {CHECK_TOL:e}")));
        }
    }
    Ok(())
}

fn gate_cmd(args: &GateArgs) -> Outcome {
    let name: GateName = args.name.parse()?;
    let text = match args.emit {
        Emit::Matrix => matrix_to_json(&gate(name)),
        Emit::Settings => to_json_string(&settings(name)?),
    };
    println!("{text}");
    Ok(())
}

/// Values keyed by detector, in (Rv, Rh, Lv, Lh) order.
#[derive(Serialize)]
#[allow(non_snake_case)]
struct PerDetector<T> {
    Rv: T,
    Rh: T,
    Lv: T,
    Lh: T,
}

impl<T: Copy> From<[T; 4]> for PerDetector<T> {
    fn from(v: [T; 4]) -> Self {
        PerDetector { Rv: v[0], Rh: v[1], Lv: v[2], Lh: v[3] }
    }
}

#[derive(Serialize)]
struct SimulateReport {
    probabilities: PerDetector<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<PerDetector<u64>>,
    shots: u64,
    seed: u64,
}

fn simulate(args: &SimulateArgs) -> Outcome {
    let seed = require_seed(args.shots, args.seed)?;
    let setup: SetupConfig = config_from_json(&read(&args.setup)?)?;
    let rho = match (&args.state, &args.rho) {
        (Some(path), _) => DensityMat::from_state(&state_from_json(&read(path)?)?),
        (None, Some(path)) => density_from_json(&read(path)?)?,
        (None, None) => return Err(Failure::new(2, "one of --state or --rho is required")),
    };
    let probs = detection_probabilities(&rho, &assemble_two_qubit(&setup))?;
    let counts = match args.shots {
        0 => None,
        n => Some(sample_counts(&probs, n, seed)?.counts.into()),
    };
    let report = SimulateReport { probabilities: probs.into(), counts, shots: args.shots, seed };
    println!("{}", to_json_string(&report));
    Ok(())
}

fn tomography(args: &TomographyArgs) -> Outcome {
    let seed = require_seed(args.shots, args.seed)?;
    let rho = density_from_json(&read(&args.rho)?)?;
    let result = tomography_pipeline(&rho, args.shots, seed)?;
    println!("{}", to_json_string(&TomographyReport::new(&result, args.shots, seed)));
    Ok(())
}

fn grover(args: &GroverArgs) -> Outcome {
    println!("{}", grover_run(GroverOracleId::new(args.oracle)?));
    Ok(())
}

fn vaa(args: &VaaArgs) -> Outcome {
    let transcript = match (&args.measurement, &args.outcome) {
        (Some(axis), Some(outcome)) => {
            let m = VaaMeasurement { axis: axis.parse::<VaaAxis>()?, outcome: outcome.parse::<Sign>()? };
            vaa_run_with(m, args.seed)?
        }
        _ => vaa_full_run(args.seed)?,
    };
    println!("{}", to_json_string(&VaaTranscriptJson::from(&transcript)));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(a) => compile(a),
        Command::Gate(a) => gate_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Tomography(a) => tomography(a),
        Command::Grover(a) => grover(a),
        Command::Vaa(a) => vaa(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
