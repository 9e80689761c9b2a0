//! Config-driven experiment runner, seeded affine families and benchmark
//! tables. Each run writes a self-describing directory:
//!
//! ```text
//! <output_dir>/
//!   config.json    canonical echo of the config
//!   trace.csv      iter,residual,ratio
//!   iterates.csv   only with store_iterates
//!   result.json    solve_modified only
//!   summary.json
//! ```

mod config;
mod family;
mod run;

pub use config::{parse_real_list, parse_x0, ExperimentConfig, Overrides, Scheme};
pub use family::{
    bench_compare, generate_affine_family, BenchConfig, read_family, write_family, BenchRow, BenchScheme,
    BenchTable,
};
pub use run::{run_experiment, RunSummary};
