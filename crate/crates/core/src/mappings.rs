//! Self-maps of R^d built from a small closed algebra.
//!
//! Every mapping can be evaluated exactly, most can be reduced to an affine
//! normal form `x ↦ Ax + c`, and all of them round-trip through a JSON
//! document tagged by `kind`:
//!
//! ```json
//! {"kind": "affine", "matrix": [[-2.0]], "offset": [100.0]}
//! {"kind": "lincomb", "alpha": 0.75, "beta": 0.25, "base": {"kind": "identity", "dim": 1}}
//! ```

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::spaces::{Matrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub enum Mapping {
    /// `x ↦ Ax + c`.
    Affine { matrix: Matrix, offset: Vector },
    /// Counter-clockwise planar rotation by `theta` radians.
    Rotation { theta: f64 },
    /// Componentwise clamp onto the box `[lo, hi]`.
    BoxProjection { lo: Vector, hi: Vector },
    /// `x ↦ alpha·x + beta·base(x)`.
    LinComb {
        alpha: f64,
        beta: f64,
        base: Box<Mapping>,
    },
    /// Stages applied left to right: `[f, g]` evaluates `g(f(x))`.
    Composition { stages: Vec<Mapping> },
    Identity { dim: usize },
}

impl Mapping {
    pub fn affine(matrix: Matrix, offset: Vector) -> Result<Self> {
        Self::checked(Mapping::Affine { matrix, offset })
    }

    /// One-dimensional `x ↦ slope·x + intercept`.
    pub fn scalar_affine(slope: f64, intercept: f64) -> Result<Self> {
        Self::affine(
            Matrix::from_rows(vec![vec![slope]])?,
            Vector::new(vec![intercept])?,
        )
    }

    /// Linear map `x ↦ Ax`.
    pub fn linear(matrix: Matrix) -> Self {
        let offset = Vector::zeros(matrix.dim());
        Mapping::Affine { matrix, offset }
    }

    pub fn rotation(theta: f64) -> Result<Self> {
        Self::checked(Mapping::Rotation { theta })
    }

    pub fn box_projection(lo: Vector, hi: Vector) -> Result<Self> {
        Self::checked(Mapping::BoxProjection { lo, hi })
    }

    pub fn lincomb(alpha: f64, beta: f64, base: Mapping) -> Result<Self> {
        Self::checked(Mapping::LinComb {
            alpha,
            beta,
            base: Box::new(base),
        })
    }

    pub fn composition(stages: Vec<Mapping>) -> Result<Self> {
        Self::checked(Mapping::Composition { stages })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::checked(Mapping::Identity { dim })
    }

    fn checked(m: Mapping) -> Result<Self> {
        m.validate()?;
        Ok(m)
    }

    /// Checks the structural invariants: finite parameters, `lo <= hi`,
    /// consistent dimensions. Errors carry a JSON-style path.
    pub fn validate(&self) -> Result<()> {
        self.validate_at("$")
    }

    fn validate_at(&self, path: &str) -> Result<()> {
        match self {
            Mapping::Affine { matrix, offset } => {
                if matrix.dim() != offset.dim() {
                    return Err(Error::invariant(
                        &format!("{path}.offset"),
                        format!(
                            "offset has dimension {} but matrix is {}x{}",
                            offset.dim(),
                            matrix.dim(),
                            matrix.dim()
                        ),
                    ));
                }
            }
            Mapping::Rotation { theta } => {
                if !theta.is_finite() {
                    return Err(Error::invariant(&format!("{path}.theta"), "must be finite"));
                }
            }
            Mapping::BoxProjection { lo, hi } => {
                if lo.dim() != hi.dim() {
                    return Err(Error::invariant(
                        &format!("{path}.hi"),
                        format!("lo has dimension {} but hi has {}", lo.dim(), hi.dim()),
                    ));
                }
                if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
                    return Err(Error::invariant(
                        &format!("{path}.lo[{i}]"),
                        format!("lo = {} exceeds hi = {}", lo[i], hi[i]),
                    ));
                }
            }
            Mapping::LinComb { alpha, beta, base } => {
                if !alpha.is_finite() {
                    return Err(Error::invariant(&format!("{path}.alpha"), "must be finite"));
                }
                if !beta.is_finite() {
                    return Err(Error::invariant(&format!("{path}.beta"), "must be finite"));
                }
                base.validate_at(&format!("{path}.base"))?;
            }
            Mapping::Composition { stages } => {
                let Some(first) = stages.first() else {
                    return Err(Error::invariant(
                        &format!("{path}.stages"),
                        "composition needs at least one stage",
                    ));
                };
                let dim = first.dimension();
                for (i, stage) in stages.iter().enumerate() {
                    let here = format!("{path}.stages[{i}]");
                    stage.validate_at(&here)?;
                    if stage.dimension() != dim {
                        return Err(Error::invariant(
                            &here,
                            format!("stage dimension {} differs from {dim}", stage.dimension()),
                        ));
                    }
                }
            }
            Mapping::Identity { dim } => {
                if *dim == 0 {
                    return Err(Error::invariant(&format!("{path}.dim"), "must be >= 1"));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            Mapping::Affine { matrix, .. } => matrix.dim(),
            Mapping::Rotation { .. } => 2,
            Mapping::BoxProjection { lo, .. } => lo.dim(),
            Mapping::LinComb { base, .. } => base.dimension(),
            Mapping::Composition { stages } => stages.first().map_or(0, Mapping::dimension),
            Mapping::Identity { dim } => *dim,
        }
    }

    /// Evaluates the mapping at `x`.
    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dimension())?;
        self.eval_unchecked(x).ensure_finite("mapping evaluation overflowed")
    }

    fn eval_unchecked(&self, x: &Vector) -> Vector {
        match self {
            Mapping::Affine { matrix, offset } => &matrix.mul_vec(x) + offset,
            Mapping::Rotation { theta } => {
                let (s, c) = theta.sin_cos();
                Vector::from_raw(vec![c * x[0] - s * x[1], s * x[0] + c * x[1]])
            }
            Mapping::BoxProjection { lo, hi } => Vector::from_raw(
                (0..x.dim()).map(|i| x[i].clamp(lo[i], hi[i])).collect(),
            ),
            Mapping::LinComb { alpha, beta, base } => {
                let tx = base.eval_unchecked(x);
                x.lincomb(*alpha, *beta, &tx)
            }
            Mapping::Composition { stages } => stages
                .iter()
                .fold(x.clone(), |acc, stage| stage.eval_unchecked(&acc)),
            Mapping::Identity { .. } => x.clone(),
        }
    }

    /// Exact affine normal form `(A, c)` with `T(x) = Ax + c`, when one exists.
    pub fn as_affine(&self) -> Option<(Matrix, Vector)> {
        match self {
            Mapping::Affine { matrix, offset } => Some((matrix.clone(), offset.clone())),
            Mapping::Rotation { theta } => {
                let (s, c) = theta.sin_cos();
                let m = Matrix::from_fn(2, |i, j| match (i, j) {
                    (0, 0) | (1, 1) => c,
                    (0, 1) => -s,
                    _ => s,
                });
                Some((m, Vector::zeros(2)))
            }
            Mapping::BoxProjection { .. } => None,
            Mapping::LinComb { alpha, beta, base } => {
                let (a, c) = base.as_affine()?;
                Some((a.shifted(*alpha, *beta), c.scale(*beta)))
            }
            Mapping::Composition { stages } => {
                let d = self.dimension();
                stages
                    .iter()
                    .try_fold((Matrix::identity(d), Vector::zeros(d)), |(a, c), stage| {
                        let (a2, c2) = stage.as_affine()?;
                        // x ↦ A2(Ax + c) + c2
                        Some((a2.matmul(&a), &a2.mul_vec(&c) + &c2))
                    })
            }
            Mapping::Identity { dim } => Some((Matrix::identity(*dim), Vector::zeros(*dim))),
        }
    }

    /// Serializes to the tagged JSON document form.
    pub fn to_json(&self) -> Value {
        match self {
            Mapping::Affine { matrix, offset } => json!({
                "kind": "affine",
                "matrix": matrix.rows(),
                "offset": offset.as_slice(),
            }),
            Mapping::Rotation { theta } => json!({"kind": "rotation", "theta": theta}),
            Mapping::BoxProjection { lo, hi } => json!({
                "kind": "box_projection",
                "lo": lo.as_slice(),
                "hi": hi.as_slice(),
            }),
            Mapping::LinComb { alpha, beta, base } => json!({
                "kind": "lincomb",
                "alpha": alpha,
                "beta": beta,
                "base": base.to_json(),
            }),
            Mapping::Composition { stages } => json!({
                "kind": "composition",
                "stages": stages.iter().map(Mapping::to_json).collect::<Vec<_>>(),
            }),
            Mapping::Identity { dim } => json!({"kind": "identity", "dim": dim}),
        }
    }
}

impl Serialize for Mapping {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mapping {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = Value::deserialize(deserializer)?;
        parse_mapping(&doc).map_err(D::Error::custom)
    }
}

/// Parses a mapping document. Unknown tags, missing or extra fields are
/// schema errors; numeric invariants (`lo <= hi`, dimensions) are invariant
/// violations. Both report the path of the offending node.
pub fn parse_mapping(doc: &Value) -> Result<Mapping> {
    let mapping = parse_at(doc, "$")?;
    mapping.validate()?;
    Ok(mapping)
}

/// Parses a mapping from JSON text.
pub fn parse_mapping_str(text: &str) -> Result<Mapping> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
    parse_mapping(&doc)
}

fn parse_at(doc: &Value, path: &str) -> Result<Mapping> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::schema(path, "expected an object"))?;
    let kind = obj
        .get("kind")
        .ok_or_else(|| Error::schema(path, "missing field `kind`"))?
        .as_str()
        .ok_or_else(|| Error::schema(&format!("{path}.kind"), "expected a string"))?;

    let allowed: &[&str] = match kind {
        "affine" => &["matrix", "offset"],
        "rotation" => &["theta"],
        "box_projection" => &["lo", "hi"],
        "lincomb" => &["alpha", "beta", "base"],
        "composition" => &["stages"],
        "identity" => &["dim"],
        other => {
            return Err(Error::schema(
                &format!("{path}.kind"),
                format!("unknown mapping kind `{other}`"),
            ))
        }
    };
    if let Some(extra) = obj
        .keys()
        .find(|k| *k != "kind" && !allowed.contains(&k.as_str()))
    {
        return Err(Error::schema(
            path,
            format!("unexpected field `{extra}` for kind `{kind}`"),
        ));
    }

    let mapping = match kind {
        "affine" => Mapping::Affine {
            matrix: matrix_field(obj, "matrix", path)?,
            offset: vector_field(obj, "offset", path)?,
        },
        "rotation" => Mapping::Rotation {
            theta: number_field(obj, "theta", path)?,
        },
        "box_projection" => Mapping::BoxProjection {
            lo: vector_field(obj, "lo", path)?,
            hi: vector_field(obj, "hi", path)?,
        },
        "lincomb" => Mapping::LinComb {
            alpha: number_field(obj, "alpha", path)?,
            beta: number_field(obj, "beta", path)?,
            base: Box::new(parse_at(
                field(obj, "base", path)?,
                &format!("{path}.base"),
            )?),
        },
        "composition" => {
            let here = format!("{path}.stages");
            let items = field(obj, "stages", path)?
                .as_array()
                .ok_or_else(|| Error::schema(&here, "expected an array"))?;
            let stages = items
                .iter()
                .enumerate()
                .map(|(i, s)| parse_at(s, &format!("{here}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Mapping::Composition { stages }
        }
        "identity" => {
            let here = format!("{path}.dim");
            let dim = field(obj, "dim", path)?
                .as_u64()
                .ok_or_else(|| Error::schema(&here, "expected a non-negative integer"))?;
            Mapping::Identity { dim: dim as usize }
        }
        _ => unreachable!("kind checked above"),
    };
    Ok(mapping)
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::schema(path, format!("missing field `{name}`")))
}

fn number_field(obj: &Map<String, Value>, name: &str, path: &str) -> Result<f64> {
    field(obj, name, path)?
        .as_f64()
        .ok_or_else(|| Error::schema(&format!("{path}.{name}"), "expected a number"))
}

fn numbers(value: &Value, path: &str) -> Result<Vec<f64>> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| Error::schema(&format!("{path}[{i}]"), "expected a number"))
        })
        .collect()
}

fn vector_field(obj: &Map<String, Value>, name: &str, path: &str) -> Result<Vector> {
    let here = format!("{path}.{name}");
    let xs = numbers(field(obj, name, path)?, &here)?;
    Vector::new(xs).map_err(|e| Error::invariant(&here, e.to_string()))
}

fn matrix_field(obj: &Map<String, Value>, name: &str, path: &str) -> Result<Matrix> {
    let here = format!("{path}.{name}");
    let rows = field(obj, name, path)?
        .as_array()
        .ok_or_else(|| Error::schema(&here, "expected an array of rows"))?
        .iter()
        .enumerate()
        .map(|(i, row)| numbers(row, &format!("{here}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows).map_err(|e| Error::invariant(&here, e.to_string()))
}
