//! One declarative run through the harness, written to a run directory.
//!
//! `cargo run --example experiment -- [output_dir]`

use fixenrich::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"{
    "mapping": {"kind": "affine", "matrix": [[-2]], "offset": [100]},
    "scheme": "solve_modified",
    "b": 3,
    "x0": [0],
    "verify": true,
    "seed": 7,
    "store_iterates": true
}"#;

fn main() -> fixenrich::Result<()> {
    let mut config = ExperimentConfig::from_json_str(CONFIG)?;
    config.output_dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("fixenrich-experiment"));
    let summary = run_experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    print!(
        "{}",
        std::fs::read_to_string(config.output_dir.join("trace.csv")).unwrap()
    );
    Ok(())
}
