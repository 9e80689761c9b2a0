use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::{empirical_ratio, krasnoselskij, picard, solve_modified, IterationTrace, StopRule};
use crate::mappings::Mapping;
use crate::spaces::{Matrix, NormKind, Vector};

/// Affine maps `x ↦ U·diag(σ)·Vᵀ·x + c` with the prescribed singular values,
/// random orthogonal `U`, `V` and offsets uniform in `[-10, 10]^dim`.
///
/// `singular_values` holds either `dim` entries or a single entry that is
/// repeated.
pub fn generate_affine_family(
    seed: u64,
    dim: usize,
    singular_values: &[f64],
    count: usize,
) -> Result<Vec<Mapping>> {
    if dim == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "dim",
            value: 0.0,
            expected: "dim >= 1",
        });
    }
    let spectrum: Vec<f64> = match singular_values.len() {
        1 => vec![singular_values[0]; dim],
        n if n == dim => singular_values.to_vec(),
        n => {
            return Err(Error::ParameterOutOfRange {
                name: "singular_values",
                value: n as f64,
                expected: "one value or exactly dim values",
            })
        }
    };
    if let Some(&bad) = spectrum.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::ParameterOutOfRange {
            name: "singular_values",
            value: bad,
            expected: "finite and >= 0",
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = random_orthogonal(dim, &mut rng);
            let v = random_orthogonal(dim, &mut rng);
            let a = Matrix::from_fn(dim, |i, j| {
                (0..dim).map(|k| u.get(i, k) * spectrum[k] * v.get(j, k)).sum()
            });
            let c = Vector::new((0..dim).map(|_| rng.random_range(-10.0..=10.0)).collect())?;
            Mapping::affine(a, c)
        })
        .collect()
}

/// Orthonormal columns from a Gaussian matrix by modified Gram-Schmidt with
/// one re-orthogonalisation pass.
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            let (done, rest) = cols.split_at_mut(j);
            let col = &mut rest[0];
            for _pass in 0..2 {
                for prev in done.iter() {
                    let dot: f64 = col.iter().zip(prev).map(|(c, p)| c * p).sum();
                    col.iter_mut().zip(prev).for_each(|(c, p)| *c -= dot * p);
                }
            }
            let len = col.iter().map(|c| c * c).sum::<f64>().sqrt();
            if len < 1e-8 {
                ok = false;
                break;
            }
            col.iter_mut().for_each(|c| *c /= len);
        }
        if ok {
            return Matrix::from_fn(dim, |i, j| cols[j][i]);
        }
    }
}

pub fn write_family(path: &Path, family: &[Mapping]) -> Result<()> {
    let text = serde_json::to_string_pretty(family).expect("mappings serialize");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_family(path: &Path) -> Result<Vec<Mapping>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::config("family", e.to_string()))
}

/// Benchmark description: a seeded family plus the schemes to run on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub dim: usize,
    pub singular_values: Vec<f64>,
    pub count: usize,
    pub schemes: Vec<BenchScheme>,
    pub stop: StopRule,
    pub norm: NormKind,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 42,
            dim: 2,
            singular_values: vec![0.5],
            count: 10,
            schemes: vec![BenchScheme::Picard],
            stop: StopRule::default(),
            norm: NormKind::L2,
        }
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn family(&self) -> Result<Vec<Mapping>> {
        generate_affine_family(self.seed, self.dim, &self.singular_values, self.count)
            .map_err(|e| Error::config("singular_values", e.to_string()))
    }
}

/// One column of a benchmark table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum BenchScheme {
    Picard,
    Krasnoselskij { lambda: f64 },
    SolveModified { b: f64 },
}

impl fmt::Display for BenchScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchScheme::Picard => f.write_str("picard"),
            BenchScheme::Krasnoselskij { lambda } => write!(f, "krasnoselskij:{lambda}"),
            BenchScheme::SolveModified { b } => write!(f, "solve_modified:{b}"),
        }
    }
}

impl FromStr for BenchScheme {
    type Err = Error;

    /// `picard`, `krasnoselskij:<lambda>` or `solve_modified:<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let number = |field: &str| -> Result<f64> {
            arg.ok_or_else(|| Error::config(field, format!("`{s}` needs a parameter")))?
                .parse()
                .map_err(|_| Error::config(field, format!("bad parameter in `{s}`")))
        };
        match name {
            "picard" => Ok(BenchScheme::Picard),
            "krasnoselskij" => Ok(BenchScheme::Krasnoselskij {
                lambda: number("lambda")?,
            }),
            "solve_modified" | "solve" => Ok(BenchScheme::SolveModified { b: number("b")? }),
            _ => Err(Error::config("schemes", format!("unknown bench scheme `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub mapping: usize,
    pub scheme: BenchScheme,
    pub status: String,
    pub iterations: usize,
    pub empirical_ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mapping,scheme,status,iterations,empirical_ratio,error\n");
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{},", r.mapping, r.scheme, r.status, r.iterations);
            if let Some(q) = r.empirical_ratio {
                let _ = write!(out, "{q:?}");
            }
            out.push(',');
            if let Some(e) = &r.error {
                out.push_str(&e.replace([',', '\n'], ";"));
            }
            out.push('\n');
        }
        out
    }

    pub fn all(&self, status: &str) -> bool {
        self.rows.iter().all(|r| r.status == status)
    }
}

fn run_cell(t: &Mapping, scheme: BenchScheme, stop: &StopRule, norm: NormKind) -> Result<IterationTrace> {
    let x0 = Vector::filled(t.dimension(), 1.0);
    match scheme {
        BenchScheme::Picard => picard(t, &x0, stop, norm),
        BenchScheme::Krasnoselskij { lambda } => krasnoselskij(t, lambda, &x0, stop, norm),
        BenchScheme::SolveModified { b } => {
            solve_modified(t, b, &x0, stop, norm, None).map(|r| r.trace)
        }
    }
}

/// Runs every scheme on every mapping from the all-ones start. A failing
/// cell records its error and the table continues.
pub fn bench_compare(
    family: &[Mapping],
    schemes: &[BenchScheme],
    stop: &StopRule,
    norm: NormKind,
) -> Result<BenchTable> {
    if family.is_empty() {
        return Err(Error::InsufficientData("empty mapping family".into()));
    }
    let mut rows = Vec::with_capacity(family.len() * schemes.len());
    for (i, t) in family.iter().enumerate() {
        for &scheme in schemes {
            let row = match run_cell(t, scheme, stop, norm) {
                Ok(tr) => BenchRow {
                    mapping: i,
                    scheme,
                    status: tr.status.as_str().into(),
                    iterations: tr.iterations,
                    empirical_ratio: empirical_ratio(&tr).ok(),
                    error: None,
                },
                Err(e) => BenchRow {
                    mapping: i,
                    scheme,
                    status: "error".into(),
                    iterations: 0,
                    empirical_ratio: None,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    Ok(BenchTable { rows })
}
