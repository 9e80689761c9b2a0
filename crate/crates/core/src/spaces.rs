//! Finite-dimensional real vectors, dense square matrices, the three vector
//! norms and the operator norms they induce.

use std::fmt;
use std::ops::{Add, Index, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the working dimension accepted by the experiment harness.
pub const DEFAULT_MAX_DIM: usize = 64;

/// Rayleigh-quotient tolerance for the l2 operator norm power iteration.
pub const POWER_ITERATION_TOL: f64 = 1e-12;

/// Iteration budget for the l2 operator norm power iteration.
pub const POWER_ITERATION_BUDGET: usize = 10_000;

/// A point of R^d. Always non-empty with finite components when built through
/// [`Vector::new`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ParameterOutOfRange {
                name: "dimension",
                value: 0.0,
                expected: "d >= 1",
            });
        }
        if let Some(bad) = components.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFiniteResult(format!("vector component {bad}")));
        }
        Ok(Vector(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Vector(vec![value; dim])
    }

    /// Unit basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    // Unchecked constructor for arithmetic results. Callers that hand values
    // back to users go through `ensure_finite`.
    pub(crate) fn from_raw(components: Vec<f64>) -> Self {
        Vector(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub(crate) fn ensure_finite(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFiniteResult(what.to_string()))
        }
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|c| alpha * c).collect())
    }

    /// `alpha * self + beta * other`, evaluated componentwise.
    pub fn lincomb(&self, alpha: f64, beta: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        norm(self, kind)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// The vector norm in use. `L2` is the Euclidean (inner product) norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    #[default]
    L2,
    Linf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::Linf];

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::Linf),
            other => Err(Error::config("norm", format!("unknown norm `{other}`"))),
        }
    }
}

pub fn norm(v: &Vector, kind: NormKind) -> f64 {
    let xs = v.as_slice();
    match kind {
        NormKind::L1 => xs.iter().map(|c| c.abs()).sum(),
        NormKind::Linf => xs.iter().fold(0.0, |m, c| m.max(c.abs())),
        NormKind::L2 => {
            // Scale by the largest magnitude so squares cannot overflow.
            let scale = xs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let sum: f64 = xs.iter().map(|c| (c / scale) * (c / scale)).sum();
            scale * sum.sqrt()
        }
    }
}

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "dimension",
                value: 0.0,
                expected: "d >= 1",
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        if let Some(bad) = data.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFiniteResult(format!("matrix entry {bad}")));
        }
        Ok(Matrix { dim, data })
    }

    pub(crate) fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0.0)
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.dim, v.dim());
        Vector::from_raw(
            self.data
                .chunks(self.dim)
                .map(|row| row.iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        })
    }

    pub fn scale(&self, alpha: f64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|c| alpha * c).collect(),
        }
    }

    /// `alpha * I + beta * self`.
    pub fn shifted(&self, alpha: f64, beta: f64) -> Matrix {
        Self::from_fn(self.dim, |i, j| {
            let id = if i == j { alpha } else { 0.0 };
            id + beta * self.get(i, j)
        })
    }

    pub fn operator_norm(&self, kind: NormKind) -> Result<f64> {
        operator_norm(self, kind)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.rows()
    }
}

/// Induced operator norm: max column sum (l1), largest singular value (l2),
/// max row sum (linf).
pub fn operator_norm(m: &Matrix, kind: NormKind) -> Result<f64> {
    let d = m.dim();
    match kind {
        NormKind::L1 => Ok((0..d)
            .map(|j| (0..d).map(|i| m.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)),
        NormKind::Linf => Ok((0..d)
            .map(|i| (0..d).map(|j| m.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)),
        NormKind::L2 => spectral_norm(m),
    }
}

fn spectral_norm(m: &Matrix) -> Result<f64> {
    if m.is_zero() {
        return Ok(0.0);
    }
    let d = m.dim();
    let gram = m.transpose().matmul(m);

    // The all-ones start can be orthogonal to the dominant eigenvector of
    // MᵀM; a second run from the heaviest column's basis vector covers that.
    let ones = Vector::filled(d, 1.0 / (d as f64).sqrt());
    let heaviest = (0..d)
        .map(|j| {
            let col: f64 = (0..d).map(|i| m.get(i, j) * m.get(i, j)).sum();
            (j, col)
        })
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
        .0;

    let first = rayleigh_power(&gram, ones)?;
    let second = rayleigh_power(&gram, Vector::basis(d, heaviest))?;
    Ok(first.max(second).sqrt())
}

/// Largest eigenvalue of `b(A + Aᵀ) + AᵀA`, so that `‖bI + A‖₂² = b² + μ`.
///
/// Iterating on `(bI + A)ᵀ(bI + A)` directly stalls for large `b`, where its
/// spectrum clusters around `b²`.
pub(crate) fn shifted_gram_max(a: &Matrix, b: f64) -> Result<f64> {
    let d = a.dim();
    symmetric_max_eigenvalue(&Matrix::from_fn(d, |i, j| {
        let ata: f64 = (0..d).map(|k| a.get(k, i) * a.get(k, j)).sum();
        b * (a.get(i, j) + a.get(j, i)) + ata
    }))
}

/// Largest eigenvalue of a symmetric matrix, by power iteration after a
/// Gershgorin shift that makes it positive semidefinite.
pub(crate) fn symmetric_max_eigenvalue(h: &Matrix) -> Result<f64> {
    let d = h.dim();
    let shift = operator_norm(h, NormKind::Linf)?;
    if shift == 0.0 {
        return Ok(0.0);
    }
    let psd = h.shifted(shift, 1.0);
    let top = (0..d)
        .map(|i| (i, psd.get(i, i)))
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
        .0;
    let first = rayleigh_power(&psd, Vector::filled(d, 1.0 / (d as f64).sqrt()))?;
    let second = rayleigh_power(&psd, Vector::basis(d, top))?;
    Ok(first.max(second) - shift)
}

/// Power iteration on a symmetric positive semidefinite matrix, returning the
/// converged Rayleigh quotient.
fn rayleigh_power(gram: &Matrix, start: Vector) -> Result<f64> {
    let mut v = start;
    let mut previous = f64::NAN;
    for _ in 0..POWER_ITERATION_BUDGET {
        let w = gram.mul_vec(&v);
        let quotient = v.dot(&w);
        let len = norm(&w, NormKind::L2);
        if len == 0.0 {
            return Ok(0.0);
        }
        if (quotient - previous).abs() <= POWER_ITERATION_TOL * quotient.abs() {
            return Ok(quotient.max(0.0));
        }
        previous = quotient;
        v = w.scale(1.0 / len);
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITERATION_BUDGET,
    })
}
