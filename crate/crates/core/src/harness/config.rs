use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enrichment::{ConditionKind, PairSampler, DEFAULT_SLACK};
use crate::error::{Error, Result};
use crate::iteration::StopRule;
use crate::mappings::Mapping;
use crate::spaces::{NormKind, Vector, DEFAULT_MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Picard,
    Krasnoselskij,
    SolveModified,
    Verify,
    MinB,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Picard => "picard",
            Scheme::Krasnoselskij => "krasnoselskij",
            Scheme::SolveModified => "solve_modified",
            Scheme::Verify => "verify",
            Scheme::MinB => "min_b",
        }
    }

    pub fn iterates(self) -> bool {
        matches!(
            self,
            Scheme::Picard | Scheme::Krasnoselskij | Scheme::SolveModified
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(Scheme::Picard),
            "krasnoselskij" => Ok(Scheme::Krasnoselskij),
            "solve_modified" => Ok(Scheme::SolveModified),
            "verify" => Ok(Scheme::Verify),
            "min_b" => Ok(Scheme::MinB),
            other => Err(Error::config("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

/// Declarative description of one run.
///
/// `seed`, when set, overrides `sampler.seed`. `kind` selects the condition
/// for the `verify` and `min_b` schemes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mapping: Mapping,
    #[serde(default)]
    pub norm: NormKind,
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vector>,
    #[serde(default)]
    pub kind: ConditionKind,
    #[serde(default)]
    pub verify: bool,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub sampler: PairSampler,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub store_iterates: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

impl ExperimentConfig {
    pub fn new(mapping: Mapping, scheme: Scheme) -> Self {
        ExperimentConfig {
            mapping,
            norm: NormKind::default(),
            scheme,
            b: None,
            lambda: None,
            x0: None,
            kind: ConditionKind::default(),
            verify: false,
            stop: StopRule::default(),
            sampler: PairSampler::default(),
            slack: DEFAULT_SLACK,
            output_dir: default_output_dir(),
            store_iterates: false,
            seed: None,
            max_dim: DEFAULT_MAX_DIM,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Folds `seed` into the sampler so the echoed document fully
    /// describes the run.
    pub fn canonicalize(&self) -> ExperimentConfig {
        let mut c = self.clone();
        if let Some(seed) = c.seed {
            c.sampler.seed = seed;
        }
        c
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&self.canonicalize()).expect("config serializes")
    }

    pub fn to_canonical_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.canonicalize()).expect("config serializes")
    }

    /// Hex SHA-256 of the compact canonical document.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        self.mapping
            .validate()
            .map_err(|e| Error::config("mapping", e.to_string()))?;
        let dim = self.mapping.dimension();
        if dim > self.max_dim {
            return Err(Error::config(
                "mapping",
                format!("dimension {dim} exceeds max_dim {}", self.max_dim),
            ));
        }
        self.stop.validate()?;
        self.sampler.validate()?;
        if !(self.slack.is_finite() && self.slack >= 0.0) {
            return Err(Error::config("slack", "must be finite and >= 0"));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::config("output_dir", "must not be empty"));
        }

        if self.scheme.iterates() {
            let x0 = self
                .x0
                .as_ref()
                .ok_or_else(|| Error::config("x0", format!("required by scheme {}", self.scheme)))?;
            if x0.dim() != dim {
                return Err(Error::config(
                    "x0",
                    format!("has dimension {} but the mapping acts on R^{dim}", x0.dim()),
                ));
            }
        }

        match self.scheme {
            Scheme::SolveModified => match self.b {
                Some(b) if b.is_finite() && b > 0.0 => {}
                Some(b) => {
                    return Err(Error::config(
                        "b",
                        format!("solve_modified requires b > 0, got {b}"),
                    ))
                }
                None => return Err(Error::config("b", "required by scheme solve_modified")),
            },
            Scheme::Krasnoselskij => match self.lambda {
                Some(l) if l > 0.0 && l < 1.0 => {}
                Some(l) => {
                    return Err(Error::config(
                        "lambda",
                        format!("krasnoselskij requires 0 < lambda < 1, got {l}"),
                    ))
                }
                None => return Err(Error::config("lambda", "required by scheme krasnoselskij")),
            },
            Scheme::Verify => match self.b {
                Some(b) if b.is_finite() && b >= 0.0 => {}
                Some(b) => {
                    return Err(Error::config("b", format!("verify requires b >= 0, got {b}")))
                }
                None => return Err(Error::config("b", "required by scheme verify")),
            },
            Scheme::MinB => {
                if self.mapping.as_affine().is_none() {
                    return Err(Error::config(
                        "mapping",
                        "min_b needs an affine-representable mapping",
                    ));
                }
            }
            Scheme::Picard => {}
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = Some(seed);
        }
        if let Some(norm) = o.norm {
            self.norm = norm;
        }
        if let Some(tol) = o.tol {
            self.stop.eps_abs = tol;
        }
        if let Some(max_iter) = o.max_iter {
            self.stop.max_iter = max_iter;
        }
        if let Some(b) = o.b {
            self.b = Some(b);
        }
        if let Some(lambda) = o.lambda {
            self.lambda = Some(lambda);
        }
        if let Some(x0) = &o.x0 {
            self.x0 = Some(x0.clone());
        }
        if let Some(kind) = o.kind {
            self.kind = kind;
        }
        self.verify |= o.verify;
        self.store_iterates |= o.store_iterates;
    }
}

/// Command-line overrides layered on top of a config document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub norm: Option<NormKind>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub b: Option<f64>,
    pub lambda: Option<f64>,
    pub x0: Option<Vector>,
    pub kind: Option<ConditionKind>,
    pub verify: bool,
    pub store_iterates: bool,
}

/// Parses a comma-separated list of reals such as `"1.5,-2,0"`.
pub fn parse_real_list(text: &str, field: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(field, format!("`{s}` is not a number")))
        })
        .collect()
}

pub fn parse_x0(text: &str) -> Result<Vector> {
    Vector::new(parse_real_list(text, "x0")?).map_err(|e| Error::config("x0", e.to_string()))
}
