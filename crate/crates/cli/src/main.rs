mod commands;
mod run_config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bitsig", version, about = "Multi-scale dissimilarity signatures from measurement bitstrings")]
struct Cli {
    /// Machine-readable JSON on stdout, including errors.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and write its amplitude dump.
    State(StateArgs),
    /// Measure a dumped state and write a bitstring file.
    Sample(SampleArgs),
    /// Dissimilarity profiles of bitstring files.
    Dissim(DissimArgs),
    /// Measure a dumped state in the Z and random bases and write its signature.
    Signature(SignatureArgs),
    /// Dissimilarity of model eigenstates across a parameter grid.
    #[command(subcommand)]
    Scan(ScanModel),
    /// (D^z, D^r) coordinates of signatures or preset families.
    Map(MapArgs),
    /// Compare a candidate signature against a target.
    Certify(CertifyArgs),
}

#[derive(Args, Serialize)]
pub struct StateArgs {
    #[command(subcommand)]
    pub family: Family,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Serialize, Clone)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum Family {
    /// cos(θ/2)|0..0> + sin(θ/2)|1..1>
    Cat {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long)]
        theta: f64,
    },
    /// Equal superposition of all strings with `weight` ones.
    Dicke {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long)]
        weight: usize,
    },
    /// |+>^N
    Uniform {
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    /// Output of a pseudo-random {√X, √Y, T} + CZ circuit.
    RandomCircuit {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 19)]
        cycles: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Ground state of the transverse-field Ising ring.
    TfimGround {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        j: f64,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
    },
    /// Ground state of the 16-site Shastry-Sutherland cluster (S^z = 0).
    SsGround(SsArgs),
    /// First excited state of the 16-site Shastry-Sutherland cluster (S^z = 0).
    SsExcited(SsArgs),
}

#[derive(Args, Serialize, Clone)]
pub struct SsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub j2: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub j1: f64,
    /// Bond list file; the bundled 16-site cluster when absent.
    #[arg(long)]
    pub bonds: Option<PathBuf>,
    /// Number of computed levels.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Z,
    Random,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "lowercase")]
pub enum AngleArg {
    /// cos θ, φ, λ uniform.
    Sphere,
    /// θ, φ, λ uniform.
    Parameter,
}

#[derive(Args, Serialize)]
pub struct SampleArgs {
    /// State dump written by `bitsig state`.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_enum, default_value_t = BasisArg::Z)]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 8192)]
    pub shots: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = AngleArg::Sphere)]
    pub angles: AngleArg,
    /// Draw a separate rotation for every qubit instead of one per shot.
    #[arg(long)]
    pub independent_rotations: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
pub struct CoarseGrainArgs {
    /// Filter width Λ.
    #[arg(long, default_value_t = 2)]
    pub lambda: usize,
    /// Number of scale pairs; ⌊log_Λ L⌋ when absent.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Include D_0 in the total.
    #[arg(long)]
    pub include_k0: bool,
    /// Fail instead of truncating arrays that do not fill whole blocks.
    #[arg(long)]
    pub no_truncation: bool,
}

#[derive(Args, Serialize)]
pub struct DissimArgs {
    /// Bitstring files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub cg: CoarseGrainArgs,
    /// Profile CSV; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also assemble the profiles into a signature (needs two bases).
    #[arg(long)]
    pub signature: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SignatureArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value_t = 8192)]
    pub shots: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub label: Option<String>,
    #[command(flatten)]
    pub cg: CoarseGrainArgs,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
pub struct ScanCommon {
    #[arg(long, default_value_t = 8192)]
    pub shots: usize,
    #[arg(long)]
    pub seed: u64,
    /// Bases to profile, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "z")]
    pub bases: Vec<BasisArg>,
    #[command(flatten)]
    pub cg: CoarseGrainArgs,
    /// Scan CSV; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write the computed energies as CSV.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum ScanModel {
    /// Transverse-field Ising ring over the field h.
    Tfim {
        #[arg(long, default_value_t = 0.05)]
        hmin: f64,
        #[arg(long, default_value_t = 1.0)]
        hmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        j: f64,
        #[command(flatten)]
        common: ScanCommon,
    },
    /// Shastry-Sutherland cluster over J2.
    Ss {
        #[arg(long, default_value_t = 0.0)]
        j2min: f64,
        #[arg(long, default_value_t = 1.0)]
        j2max: f64,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        j1: f64,
        #[arg(long)]
        bonds: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[command(flatten)]
        common: ScanCommon,
    },
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Product, cat, Dicke, uniform, chaotic, Shastry-Sutherland and TFIM states on 16 qubits.
    PaperFamilies,
}

#[derive(Args, Serialize)]
pub struct MapArgs {
    /// Signature files to place on the map.
    pub signatures: Vec<PathBuf>,
    /// Compute signatures for a built-in family list instead.
    #[arg(long, value_enum, conflicts_with = "signatures")]
    pub preset: Option<Preset>,
    #[arg(long, default_value_t = 8192)]
    pub shots: usize,
    /// Measurement seed; required with --preset.
    #[arg(long, required_if_eq("preset", "paper-families"))]
    pub seed: Option<u64>,
    /// Seed of the chaotic circuit in the preset list.
    #[arg(long, default_value_t = 7)]
    pub circuit_seed: u64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub candidate: PathBuf,
    #[arg(long, default_value_t = bitsig::certify::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::State(a) => commands::state(a, cli.json),
        Command::Sample(a) => commands::sample(a, cli.json),
        Command::Dissim(a) => commands::dissim(a, cli.json),
        Command::Signature(a) => commands::signature(a, cli.json),
        Command::Scan(a) => commands::scan(a, cli.json),
        Command::Map(a) => commands::map(a, cli.json),
        Command::Certify(a) => commands::certify(a, cli.json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code: u8 = if e.is_io_or_format() { 2 } else { 1 };
            if cli.json {
                let kind = if code == 2 { "io_or_format" } else { "domain" };
                let body = serde_json::json!({ "error": { "kind": kind, "message": e.to_string() }, "exit_code": code });
                println!("{body}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
