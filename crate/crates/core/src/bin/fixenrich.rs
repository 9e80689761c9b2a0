//! Command-line front end over `fixenrich::harness`.
//!
//! Exit codes: 0 success, 1 scheme-level failure (diverged, refuted, budget
//! exhausted), 2 configuration error, 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fixenrich::harness::{
    bench_compare, parse_real_list, parse_x0, read_family, run_experiment, write_family,
    BenchConfig, BenchScheme, ExperimentConfig, Overrides, Scheme,
};
use fixenrich::{ConditionKind, Error, Mapping, NormKind, Result};

#[derive(Parser)]
#[command(name = "fixenrich", version, about = "Enriched nonexpansive mappings: certify and iterate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment (or bench) config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (file for `gen`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_norm)]
    norm: Option<NormKind>,
    /// Absolute residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct MappingArg {
    /// Mapping JSON file, used when no --config is given.
    #[arg(long)]
    mapping: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sampled check of an enrichment condition.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mapping: MappingArg,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<ConditionKind>,
    },
    /// Krasnoselskij solve with lambda = 1/(b+1).
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mapping: MappingArg,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Starting point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Check the modified condition before iterating.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        store_iterates: bool,
    },
    /// Plain Picard or Krasnoselskij iteration.
    Iterate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mapping: MappingArg,
        /// `picard` or `krasnoselskij`.
        #[arg(long, default_value = "picard")]
        scheme: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long)]
        store_iterates: bool,
    },
    /// Least enrichment constant of an affine mapping.
    MinB {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mapping: MappingArg,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<ConditionKind>,
    },
    /// Run schemes over a generated (or stored) affine family, writing bench.csv.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Family JSON written by `gen`; generated from the config otherwise.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        /// Singular values, comma separated.
        #[arg(long)]
        spectrum: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        /// e.g. `picard,krasnoselskij:0.5,solve_modified:3`
        #[arg(long)]
        schemes: Option<String>,
    },
    /// Generate a seeded affine family as JSON.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        spectrum: Option<String>,
        #[arg(long)]
        count: Option<usize>,
    },
}

fn parse_norm(s: &str) -> std::result::Result<NormKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<ConditionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

// A closed stdout (e.g. piping into `head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn load_mapping(path: &Path) -> Result<Mapping> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    fixenrich::mappings::parse_mapping_str(&text).map_err(|e| Error::Config {
        field: "mapping".into(),
        message: e.to_string(),
    })
}

fn experiment(common: &Common, mapping: &MappingArg, scheme: Scheme, o: Overrides) -> Result<ExitCode> {
    let mut config = match (&common.config, &mapping.mapping) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(path)) => {
            let mut c = ExperimentConfig::new(load_mapping(path)?, scheme);
            c.output_dir = PathBuf::from("runs").join(scheme.as_str());
            c
        }
        (None, None) => {
            return Err(Error::Config {
                field: "mapping".into(),
                message: "pass --config or --mapping".into(),
            })
        }
    };
    config.scheme = scheme;
    config.apply(&Overrides {
        out: common.out.clone(),
        seed: common.seed,
        norm: common.norm,
        tol: common.tol,
        max_iter: common.max_iter,
        ..o
    });
    let summary = run_experiment(&config)?;
    emit(&serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(if summary.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench_config(
    common: &Common,
    dim: Option<usize>,
    spectrum: Option<&str>,
    count: Option<usize>,
) -> Result<BenchConfig> {
    let mut config = match &common.config {
        Some(path) => BenchConfig::load(path)?,
        None => BenchConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(norm) = common.norm {
        config.norm = norm;
    }
    if let Some(tol) = common.tol {
        config.stop.eps_abs = tol;
    }
    if let Some(max_iter) = common.max_iter {
        config.stop.max_iter = max_iter;
    }
    if let Some(dim) = dim {
        config.dim = dim;
    }
    if let Some(s) = spectrum {
        config.singular_values = parse_real_list(s, "spectrum")?;
    }
    if let Some(count) = count {
        config.count = count;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { common, mapping, b, kind } => experiment(
            &common,
            &mapping,
            Scheme::Verify,
            Overrides { b, kind, ..Default::default() },
        ),
        Command::Solve { common, mapping, b, x0, verify, store_iterates } => {
            let x0 = x0.as_deref().map(parse_x0).transpose()?;
            experiment(
                &common,
                &mapping,
                Scheme::SolveModified,
                Overrides { b, x0, verify, store_iterates, ..Default::default() },
            )
        }
        Command::Iterate { common, mapping, scheme, lambda, x0, store_iterates } => {
            let scheme = match scheme.parse()? {
                s @ (Scheme::Picard | Scheme::Krasnoselskij) => s,
                other => {
                    return Err(Error::Config {
                        field: "scheme".into(),
                        message: format!("iterate runs picard or krasnoselskij, not {other}"),
                    })
                }
            };
            let x0 = x0.as_deref().map(parse_x0).transpose()?;
            experiment(
                &common,
                &mapping,
                scheme,
                Overrides { lambda, x0, store_iterates, ..Default::default() },
            )
        }
        Command::MinB { common, mapping, kind } => experiment(
            &common,
            &mapping,
            Scheme::MinB,
            Overrides { kind, ..Default::default() },
        ),
        Command::Bench { common, family, dim, spectrum, count, schemes } => {
            let mut config = bench_config(&common, dim, spectrum.as_deref(), count)?;
            if let Some(list) = schemes {
                config.schemes = list
                    .split(',')
                    .map(|s| s.trim().parse::<BenchScheme>())
                    .collect::<Result<_>>()?;
            }
            let mappings = match family {
                Some(path) => read_family(&path)?,
                None => config.family()?,
            };
            let table = bench_compare(&mappings, &config.schemes, &config.stop, config.norm)?;
            let dir = common.out.unwrap_or_else(|| PathBuf::from("runs/bench"));
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
            let path = dir.join("bench.csv");
            let csv = table.to_csv();
            std::fs::write(&path, &csv).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            emit(&csv);
            let failed = table.rows.iter().any(|r| r.status != "converged");
            Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Gen { common, dim, spectrum, count } => {
            let config = bench_config(&common, dim, spectrum.as_deref(), count)?;
            let family = config.family()?;
            match &common.out {
                Some(path) => write_family(path, &family)?,
                None => emit(&serde_json::to_string_pretty(&family).expect("mappings serialize")),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fixenrich: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
