//! Command-line front end for orbitlab.

mod error;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitlab::concentration::{
    nonconcentration_witness, profile_exact, profile_heuristic, set_distance,
};
use orbitlab::folner::{
    accumulate_invariant, asymptotic_invariance_series, folner_search, spectral_gap,
    FolnerOptions, PieceSource, SeriesOptions, SeriesStrategy, SpectralMethod, SpectralOptions,
};
use orbitlab::generators::{
    expander_graphing, odometer_graphing, product_graphing, rotation_graphing,
    DEFAULT_EXPANDER_SEED, PRODUCT_CAP,
};
use orbitlab::oracle::{brute_concentration, brute_dense_spectrum, brute_min_boundary_ratio};
use orbitlab::Graphing;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{emit_csv, emit_json, read_graphing};

#[derive(Parser)]
#[command(name = "orbitlab", version, about = "Concentration, spectral gaps and Følner sets of finite graphings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV companion here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graphing from a named family.
    Generate(GenerateArgs),
    /// Concentration profile c(δ, δ′) and non-concentration witnesses.
    Concentrate(ConcentrateArgs),
    /// Small-boundary set search or greedy accumulation.
    Folner(FolnerArgs),
    /// Spectral gap of the lazy walk.
    Spectrum(SpectrumArgs),
    /// Defect series along graphings of increasing resolution.
    Series(SeriesArgs),
    /// Brute-force references (unstable; meant for test harnesses).
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run a config-driven sweep.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Rotation,
    Odometer,
    Expander,
    Product,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[arg(long, default_value_t = DEFAULT_EXPANDER_SEED)]
    seed: u64,
    /// Two graphing files whose product is taken (`--family product`).
    #[arg(long, num_args = 2)]
    factors: Vec<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ConcentrateArgs {
    graphing: PathBuf,
    /// Grid points `delta:delta_prime`, comma separated.
    #[arg(long, default_value = "0.2:0.2,0.2:0.3,0.2:0.5,0.3:0.2,0.3:0.3,0.3:0.5,0.5:0.2,0.5:0.3,0.5:0.5")]
    grid: String,
    /// Exact enumeration (at most 20 atoms).
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 8)]
    effort: usize,
    /// Also search for a pair at distance at least this.
    #[arg(long)]
    witness_target: Option<usize>,
    /// Mass of each witness set.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FolnerStrategy {
    Search,
    Accumulate,
}

#[derive(Args)]
struct FolnerArgs {
    graphing: PathBuf,
    #[arg(long, value_enum, default_value = "search")]
    strategy: FolnerStrategy,
    #[arg(long, default_value_t = 0.5)]
    mass_cap: f64,
    #[arg(long, default_value_t = 32)]
    effort: usize,
    #[arg(long, default_value_t = 4)]
    scales: usize,
    /// Ratio threshold at scale 1; scale k uses threshold/√k.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    target_mass: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Iterative,
}

#[derive(Args)]
struct SpectrumArgs {
    graphing: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1500)]
    max_iter: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    LevelSet,
    Accumulate,
    Arcs,
}

#[derive(Args)]
struct SeriesArgs {
    /// Graphing files in order of increasing resolution.
    #[arg(required = true)]
    graphings: Vec<PathBuf>,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0.25)]
    target_mass: f64,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 32)]
    effort: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Minimum boundary ratio over a mass window by enumeration.
    Boundary {
        graphing: PathBuf,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// c(δ, δ′) by enumeration.
    Concentration {
        graphing: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        delta_prime: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full lazy-walk spectrum by Jacobi rotations.
    Spectrum {
        graphing: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_grid(s: &str) -> CliResult<Vec<(f64, f64)>> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("grid point {p:?} is not delta:delta_prime")))?;
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad number {t:?} in grid")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn generate(a: GenerateArgs) -> CliResult<()> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this family")))
    };
    let g = match a.family {
        FamilyArg::Rotation => rotation_graphing(need(a.n, "n")?, a.step)?,
        FamilyArg::Odometer => odometer_graphing(
            a.levels
                .ok_or_else(|| CliError::Usage("--levels is required for odometers".into()))?,
        )?,
        FamilyArg::Expander => expander_graphing(need(a.n, "n")?, a.degree, a.seed)?,
        FamilyArg::Product => {
            let [l, r] = a.factors.as_slice() else {
                return Err(CliError::Usage("--factors takes two graphing files".into()));
            };
            product_graphing(&read_graphing(l)?, &read_graphing(r)?, PRODUCT_CAP)?
        }
    };
    emit_json(&g, a.output.out.as_deref())?;
    emit_csv(
        a.output.csv.as_deref(),
        &["x", "y"],
        g.edges().map(|(x, y)| vec![x.to_string(), y.to_string()]),
    )
}

fn concentrate(a: ConcentrateArgs) -> CliResult<()> {
    let g = read_graphing(&a.graphing)?;
    let grid = parse_grid(&a.grid)?;
    let profile = if a.exact {
        profile_exact(&g, &grid)?
    } else {
        profile_heuristic(&g, &grid, a.effort)?
    };
    let witness = match a.witness_target {
        Some(t) => {
            let pair = nonconcentration_witness(&g, a.delta, t)?;
            let distance = match &pair {
                Some((x, y)) => Some(set_distance(&g, x, y)?),
                None => None,
            };
            Some(json!({ "target": t, "delta": a.delta, "pair": pair, "distance": distance }))
        }
        None => None,
    };
    let mut value = serde_json::to_value(&profile).map_err(orbitlab::Error::from)?;
    if let Some(w) = witness {
        value["witness_search"] = w;
    }
    emit_json(&value, a.output.out.as_deref())?;
    emit_csv(
        a.output.csv.as_deref(),
        &["delta", "delta_prime", "c_lower", "c_upper"],
        profile.samples.iter().map(|s| {
            vec![
                s.delta.to_string(),
                s.delta_prime.to_string(),
                s.c_lower.to_string(),
                s.c_upper.to_string(),
            ]
        }),
    )
}

fn folner(a: FolnerArgs) -> CliResult<()> {
    let g = read_graphing(&a.graphing)?;
    let opts = FolnerOptions {
        effort: a.effort,
        scales: a.scales,
        seed: a.seed,
        threshold: a.threshold,
        ..FolnerOptions::default()
    };
    match a.strategy {
        FolnerStrategy::Search => {
            let cert = folner_search(&g, a.mass_cap, &opts)?;
            emit_json(&cert, a.output.out.as_deref())?;
            emit_csv(
                a.output.csv.as_deref(),
                &["scale", "mass", "ratio"],
                cert.scales
                    .iter()
                    .map(|s| vec![s.index.to_string(), s.mass.to_string(), s.ratio.to_string()]),
            )
        }
        FolnerStrategy::Accumulate => {
            let res = accumulate_invariant(&g, a.epsilon, a.target_mass, &PieceSource::Search(opts))?;
            emit_json(&res, a.output.out.as_deref())?;
            emit_csv(
                a.output.csv.as_deref(),
                &["step", "piece_mass", "merged_mass", "merged_boundary", "equality_holds"],
                res.steps.iter().enumerate().map(|(i, s)| {
                    vec![
                        (i + 1).to_string(),
                        s.piece_mass.to_string(),
                        s.merged_mass.to_string(),
                        s.merged_boundary.to_string(),
                        s.equality_holds.to_string(),
                    ]
                }),
            )
        }
    }
}

fn spectrum(a: SpectrumArgs) -> CliResult<()> {
    let g = read_graphing(&a.graphing)?;
    let method = a.method.map(|m| match m {
        MethodArg::Exact => SpectralMethod::Exact,
        MethodArg::Iterative => SpectralMethod::Iterative,
    });
    let rep = spectral_gap(
        &g,
        SpectralOptions {
            method,
            tol: a.tol,
            max_iter: a.max_iter,
        },
    )?;
    emit_json(&rep, a.output.out.as_deref())?;
    emit_csv(
        a.output.csv.as_deref(),
        &["index", "eigenvalue"],
        rep.eigenvalue_estimates
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), v.to_string()]),
    )
}

fn series(a: SeriesArgs) -> CliResult<()> {
    let family: Vec<Graphing> = a
        .graphings
        .iter()
        .map(|p| read_graphing(p))
        .collect::<CliResult<_>>()?;
    let strategy = match a.strategy {
        StrategyArg::LevelSet => SeriesStrategy::LevelSet,
        StrategyArg::Accumulate => SeriesStrategy::Accumulate,
        StrategyArg::Arcs => SeriesStrategy::Arcs,
    };
    let opts = SeriesOptions {
        target_mass: a.target_mass,
        epsilon: a.epsilon,
        search: FolnerOptions {
            effort: a.effort,
            seed: a.seed,
            ..FolnerOptions::default()
        },
    };
    let entries: Vec<_> = family
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut e = asymptotic_invariance_series(std::slice::from_ref(g), strategy, &opts)
                .pop()
                .expect("one entry per member");
            e.index = i;
            e
        })
        .collect();
    emit_json(&entries, a.output.out.as_deref())?;
    emit_csv(
        a.output.csv.as_deref(),
        &["index", "atoms", "mass", "max_defect", "error"],
        entries.iter().map(|e| {
            vec![
                e.index.to_string(),
                e.atom_count.to_string(),
                e.mass.map(|m| m.to_string()).unwrap_or_default(),
                e.report.as_ref().map(|r| r.max_defect.to_string()).unwrap_or_default(),
                e.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

fn oracle(cmd: OracleCommand) -> CliResult<()> {
    match cmd {
        OracleCommand::Boundary { graphing, lo, hi, out } => {
            let g = read_graphing(&graphing)?;
            let best = brute_min_boundary_ratio(&g, lo, hi)?;
            let value = match best {
                Some((set, ratio)) => json!({ "set": set, "ratio": ratio }),
                None => json!({ "set": null, "ratio": null }),
            };
            emit_json(&value, out.as_deref())
        }
        OracleCommand::Concentration {
            graphing,
            delta,
            delta_prime,
            out,
        } => {
            let g = read_graphing(&graphing)?;
            let (c, pair) = brute_concentration(&g, delta, delta_prime)?;
            emit_json(&json!({ "c": c, "witness": pair }), out.as_deref())
        }
        OracleCommand::Spectrum { graphing, out } => {
            let g = read_graphing(&graphing)?;
            emit_json(&brute_dense_spectrum(&g)?, out.as_deref())
        }
    }
}

fn run(a: RunArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| CliError::io(&a.config, e))?;
    let (mut config, mut raw) = experiment::parse_config(&text)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
        raw["seed"] = json!(seed);
    }
    let output = a.output.unwrap_or_else(|| config.output.clone());
    let manifest = experiment::run_experiment(&config, &raw, &output)?;
    emit_json(&manifest, None)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set thread count: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Concentrate(a) => concentrate(a),
        Command::Folner(a) => folner(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Series(a) => series(a),
        Command::Oracle(c) => oracle(c),
        Command::Run(a) => run(a),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
