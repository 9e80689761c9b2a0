use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Scheme};
use crate::enrichment::{min_b_affine, verify_condition, EnrichmentReport};
use crate::error::{Error, Result};
use crate::iteration::{
    empirical_ratio, krasnoselskij, krasnoselskij_recorded, picard, picard_recorded,
    solve_modified, solve_modified_recorded, IterationTrace, Verification,
};
use crate::spaces::Vector;

/// Outcome of one [`run_experiment`] call, also written as `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config_digest: String,
    pub scheme: Scheme,
    /// `converged`, `max_iter_reached`, `diverged` for iteration schemes;
    /// `passed` or `refuted` for `verify`; `found` or `empty` for `min_b`;
    /// `error` when the scheme itself failed.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Vector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(rename = "residual_T", skip_serializing_if = "Option::is_none")]
    pub residual_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<EnrichmentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_b: Option<f64>,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub artifacts: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunSummary {
    /// False for divergence, exhausted budgets, refuted conditions and
    /// scheme errors.
    pub fn succeeded(&self) -> bool {
        matches!(self.status.as_str(), "converged" | "passed" | "found" | "empty")
    }
}

fn write(path: &Path, contents: &str, artifacts: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    artifacts.push(path.to_path_buf());
    Ok(())
}

const EMPTY_TRACE: &str = "iter,residual,ratio\n";

/// Validates `config`, runs its scheme and writes `config.json`,
/// `trace.csv`, `summary.json` (plus `iterates.csv` when requested and
/// `result.json` for `solve_modified`) into `config.output_dir`.
///
/// Numerical failures of the scheme end up in the summary's `status` and
/// `error` fields; only configuration and I/O problems are returned as `Err`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let config = config.canonicalize();
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut artifacts = Vec::new();
    write(
        &dir.join("config.json"),
        &config.to_canonical_json_pretty(),
        &mut artifacts,
    )?;

    let started = Instant::now();
    let mut summary = RunSummary {
        config_digest: config.digest(),
        scheme: config.scheme,
        status: String::new(),
        fixed_point: None,
        lambda: None,
        residual_t: None,
        empirical_ratio: None,
        report: None,
        min_b: None,
        iterations: 0,
        wall_time_s: 0.0,
        artifacts: Vec::new(),
        error: None,
    };

    let outcome = dispatch(&config, &mut summary, &mut artifacts);
    let trace = match outcome {
        Ok(trace) => trace,
        Err(e) if e.exit_code() == 1 => {
            summary.status = "error".into();
            summary.error = Some(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    summary.wall_time_s = started.elapsed().as_secs_f64();

    match &trace {
        Some(tr) => {
            write(&dir.join("trace.csv"), &tr.to_csv(), &mut artifacts)?;
            if config.store_iterates {
                if let Some(csv) = tr.iterates_csv() {
                    write(&dir.join("iterates.csv"), &csv, &mut artifacts)?;
                }
            }
        }
        None => write(&dir.join("trace.csv"), EMPTY_TRACE, &mut artifacts)?,
    }

    let summary_path = dir.join("summary.json");
    artifacts.push(summary_path.clone());
    summary.artifacts = artifacts;
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_path, text).map_err(|e| Error::io(&summary_path, e))?;
    Ok(summary)
}

fn record_trace(summary: &mut RunSummary, trace: &IterationTrace) {
    summary.status = trace.status.as_str().into();
    summary.iterations = trace.iterations;
    summary.fixed_point = Some(trace.final_iterate.clone());
    summary.empirical_ratio = empirical_ratio(trace).ok();
}

fn dispatch(
    config: &ExperimentConfig,
    summary: &mut RunSummary,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Option<IterationTrace>> {
    let t = &config.mapping;
    let norm = config.norm;
    let record = config.store_iterates;
    match config.scheme {
        Scheme::Picard => {
            let x0 = config.x0.as_ref().expect("validated");
            let tr = if record {
                picard_recorded(t, x0, &config.stop, norm)?
            } else {
                picard(t, x0, &config.stop, norm)?
            };
            record_trace(summary, &tr);
            Ok(Some(tr))
        }
        Scheme::Krasnoselskij => {
            let x0 = config.x0.as_ref().expect("validated");
            let lambda = config.lambda.expect("validated");
            let tr = if record {
                krasnoselskij_recorded(t, lambda, x0, &config.stop, norm)?
            } else {
                krasnoselskij(t, lambda, x0, &config.stop, norm)?
            };
            record_trace(summary, &tr);
            summary.lambda = Some(lambda);
            Ok(Some(tr))
        }
        Scheme::SolveModified => {
            let x0 = config.x0.as_ref().expect("validated");
            let b = config.b.expect("validated");
            let verification = Verification {
                sampler: config.sampler.clone(),
                slack: config.slack,
            };
            let verify = config.verify.then_some(&verification);
            let result = if record {
                solve_modified_recorded(t, b, x0, &config.stop, norm, verify)?
            } else {
                solve_modified(t, b, x0, &config.stop, norm, verify)?
            };
            record_trace(summary, &result.trace);
            summary.lambda = Some(result.lambda);
            summary.residual_t = Some(result.residual_t);
            summary.report = result.condition_verified.clone();
            let path = config.output_dir.join("result.json");
            let text = serde_json::to_string_pretty(&result).expect("result serializes");
            write(&path, &text, artifacts)?;
            Ok(Some(result.trace))
        }
        Scheme::Verify => {
            let b = config.b.expect("validated");
            let report = verify_condition(t, b, config.kind, norm, &config.sampler, config.slack)?;
            summary.status = if report.passed { "passed" } else { "refuted" }.into();
            summary.iterations = 0;
            summary.report = Some(report);
            Ok(None)
        }
        Scheme::MinB => {
            let (a, _) = t.as_affine().expect("validated");
            let found = min_b_affine(&a, config.kind, norm)?;
            summary.status = if found.is_some() { "found" } else { "empty" }.into();
            summary.min_b = found;
            Ok(None)
        }
    }
}
