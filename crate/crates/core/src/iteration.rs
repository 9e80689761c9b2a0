//! Picard and Krasnoselskij iteration, the modified-enriched solver and
//! convergence diagnostics.
//!
//! For a b-modified enriched nonexpansive `T` with `b > 0`, the averaged map
//! `T_λ` with `λ = 1/(b+1)` is a Banach contraction with factor `λ`, so
//! Krasnoselskij iteration (Picard iteration of `T_λ`) converges
//! geometrically to the unique fixed point of `T` from any start.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};

use crate::enrichment::{averaged, verify_condition, ConditionKind, EnrichmentReport, PairSampler};
use crate::error::{Error, Result};
use crate::mappings::Mapping;
use crate::spaces::{norm, NormKind, Vector};

/// Residual growth must persist this many consecutive steps to count as
/// divergence.
pub const DIVERGENCE_WINDOW: usize = 20;

/// No growth-based divergence verdict before this iteration.
pub const DIVERGENCE_WARMUP: usize = 50;

/// Termination test `‖x_{n+1} − x_n‖ <= eps_abs + eps_rel·‖x_{n+1}‖`, with an
/// iteration budget and a divergence guard on `‖x_n‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopRule {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub norm_cap: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            eps_abs: 1e-9,
            eps_rel: 0.0,
            max_iter: 10_000,
            norm_cap: 1e12,
        }
    }
}

impl StopRule {
    pub fn with_tol(eps_abs: f64) -> Self {
        StopRule {
            eps_abs,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_abs.is_finite() && self.eps_abs > 0.0) {
            return Err(Error::config("stop.eps_abs", "must be finite and > 0"));
        }
        if !(self.eps_rel.is_finite() && self.eps_rel >= 0.0) {
            return Err(Error::config("stop.eps_rel", "must be finite and >= 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::config("stop.max_iter", "must be at least 1"));
        }
        if !(self.norm_cap.is_finite() && self.norm_cap > 0.0) {
            return Err(Error::config("stop.norm_cap", "must be finite and > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterReached,
    Diverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIterReached => "max_iter_reached",
            Status::Diverged => "diverged",
        }
    }
}

/// History of one iteration run. Entry `n` of `residuals` is
/// `‖x_{n+1} − x_n‖`; entry `n` of `ratios` is `residuals[n]/residuals[n-1]`
/// (undefined for the first step and after a zero residual).
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub residuals: Vec<f64>,
    pub ratios: Vec<Option<f64>>,
    pub status: Status,
    /// Last finite iterate.
    pub final_iterate: Vector,
    pub iterations: usize,
    pub norm_kind: NormKind,
    /// `x_0, x_1, …` when recording was requested.
    pub iterates: Option<Vec<Vector>>,
}

impl IterationTrace {
    pub fn last_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }

    /// CSV with columns `iter,residual,ratio`; undefined ratios are empty.
    /// Floats use the shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,residual,ratio\n");
        for (i, (r, q)) in self.residuals.iter().zip(&self.ratios).enumerate() {
            let _ = write!(out, "{},{:?},", i + 1, r);
            if let Some(q) = q {
                let _ = write!(out, "{q:?}");
            }
            out.push('\n');
        }
        out
    }

    /// CSV of recorded iterates, `iter,x0,x1,…`, or `None` when not recorded.
    pub fn iterates_csv(&self) -> Option<String> {
        let iterates = self.iterates.as_ref()?;
        let d = self.final_iterate.dim();
        let mut out = String::from("iter");
        for j in 0..d {
            let _ = write!(out, ",x{j}");
        }
        out.push('\n');
        for (n, x) in iterates.iter().enumerate() {
            let _ = write!(out, "{n}");
            for c in x.as_slice() {
                let _ = write!(out, ",{c:?}");
            }
            out.push('\n');
        }
        Some(out)
    }
}

/// Picard iteration `x_{n+1} = T(x_n)`.
pub fn picard(t: &Mapping, x0: &Vector, stop: &StopRule, norm_kind: NormKind) -> Result<IterationTrace> {
    run(t, x0, stop, norm_kind, false)
}

/// [`picard`], keeping every iterate.
pub fn picard_recorded(
    t: &Mapping,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
) -> Result<IterationTrace> {
    run(t, x0, stop, norm_kind, true)
}

fn check_lambda_open(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "lambda",
            value: lambda,
            expected: "0 < lambda < 1",
        })
    }
}

/// Krasnoselskij iteration `x_{n+1} = (1−λ)x_n + λT(x_n)`, run as Picard
/// iteration of [`averaged`]`(T, λ)`.
pub fn krasnoselskij(
    t: &Mapping,
    lambda: f64,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
) -> Result<IterationTrace> {
    check_lambda_open(lambda)?;
    picard(&averaged(t, lambda)?, x0, stop, norm_kind)
}

/// [`krasnoselskij`], keeping every iterate.
pub fn krasnoselskij_recorded(
    t: &Mapping,
    lambda: f64,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
) -> Result<IterationTrace> {
    check_lambda_open(lambda)?;
    picard_recorded(&averaged(t, lambda)?, x0, stop, norm_kind)
}

fn run(
    t: &Mapping,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
    record: bool,
) -> Result<IterationTrace> {
    stop.validate()?;
    x0.check_dim(t.dimension())?;

    let mut x = x0.clone();
    let mut residuals = Vec::new();
    let mut ratios = Vec::new();
    let mut iterates = record.then(|| vec![x0.clone()]);
    let mut increases = 0usize;
    let mut status = Status::MaxIterReached;

    for n in 1..=stop.max_iter {
        let next = match t.evaluate(&x) {
            Ok(next) => next,
            Err(Error::NonFiniteResult(_)) => {
                status = Status::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        let residual = norm(&(&next - &x), norm_kind);
        let ratio = match residuals.last() {
            Some(&prev) if prev > 0.0 => Some(residual / prev),
            _ => None,
        };
        increases = match residuals.last() {
            Some(&prev) if residual > prev => increases + 1,
            _ => 0,
        };
        residuals.push(residual);
        ratios.push(ratio);
        x = next;
        if let Some(xs) = iterates.as_mut() {
            xs.push(x.clone());
        }

        let size = norm(&x, norm_kind);
        if residual <= stop.eps_abs + stop.eps_rel * size {
            status = Status::Converged;
            break;
        }
        if size > stop.norm_cap || (n > DIVERGENCE_WARMUP && increases >= DIVERGENCE_WINDOW) {
            status = Status::Diverged;
            break;
        }
    }

    Ok(IterationTrace {
        iterations: residuals.len(),
        residuals,
        ratios,
        status,
        final_iterate: x,
        norm_kind,
        iterates,
    })
}

/// Sampling settings for the optional condition check in [`solve_modified`].
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub sampler: PairSampler,
    pub slack: f64,
}

impl Default for Verification {
    fn default() -> Self {
        Verification {
            sampler: PairSampler::default(),
            slack: crate::enrichment::DEFAULT_SLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub fixed_point: Vector,
    pub lambda: f64,
    pub trace: IterationTrace,
    /// `‖T(x*) − x*‖`, recomputed from `fixed_point`.
    pub residual_t: f64,
    pub condition_verified: Option<EnrichmentReport>,
}

impl SolveResult {
    fn new(
        t: &Mapping,
        lambda: f64,
        trace: IterationTrace,
        norm_kind: NormKind,
        condition_verified: Option<EnrichmentReport>,
    ) -> Self {
        let fixed_point = trace.final_iterate.clone();
        let residual_t = t
            .evaluate(&fixed_point)
            .map(|tx| norm(&(&tx - &fixed_point), norm_kind))
            .unwrap_or(f64::INFINITY);
        SolveResult {
            fixed_point,
            lambda,
            trace,
            residual_t,
            condition_verified,
        }
    }

    pub fn status(&self) -> Status {
        self.trace.status
    }
}

impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            fixed_point: &'a Vector,
            lambda: f64,
            status: Status,
            iterations: usize,
            #[serde(rename = "residual_T")]
            residual_t: f64,
            condition: &'a Option<EnrichmentReport>,
        }
        Doc {
            fixed_point: &self.fixed_point,
            lambda: self.lambda,
            status: self.trace.status,
            iterations: self.trace.iterations,
            residual_t: self.residual_t,
            condition: &self.condition_verified,
        }
        .serialize(serializer)
    }
}

/// Fixed point of a b-modified enriched nonexpansive mapping, `b > 0`, by
/// Krasnoselskij iteration with `λ = 1/(b+1)`.
///
/// With `verify`, the modified condition is checked by sampling first. A
/// failed check is attached to the result and iteration still runs; the
/// trace status then reports what actually happened.
pub fn solve_modified(
    t: &Mapping,
    b: f64,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
    verify: Option<&Verification>,
) -> Result<SolveResult> {
    solve_modified_inner(t, b, x0, stop, norm_kind, verify, false)
}

/// [`solve_modified`], keeping every iterate.
pub fn solve_modified_recorded(
    t: &Mapping,
    b: f64,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
    verify: Option<&Verification>,
) -> Result<SolveResult> {
    solve_modified_inner(t, b, x0, stop, norm_kind, verify, true)
}

fn solve_modified_inner(
    t: &Mapping,
    b: f64,
    x0: &Vector,
    stop: &StopRule,
    norm_kind: NormKind,
    verify: Option<&Verification>,
    record: bool,
) -> Result<SolveResult> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "b",
            value: b,
            expected: "0 < b < inf",
        });
    }
    let lambda = 1.0 / (b + 1.0);
    let report = verify
        .map(|v| verify_condition(t, b, ConditionKind::Modified, norm_kind, &v.sampler, v.slack))
        .transpose()?;
    let trace = run(&averaged(t, lambda)?, x0, stop, norm_kind, record)?;
    Ok(SolveResult::new(t, lambda, trace, norm_kind, report))
}

/// Multi-start Krasnoselskij runs for the merely nonexpansive (`b = 0`)
/// regime, where no convergence or uniqueness guarantee is available.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiStartReport {
    pub lambda: f64,
    pub traces: Vec<IterationTrace>,
    pub all_converged: bool,
    /// Largest distance between the limit of the first converged run and
    /// any other converged limit. Zero when fewer than two runs converged.
    pub spread: f64,
}

impl MultiStartReport {
    /// True when every run converged and all limits agree within `tol`.
    pub fn agrees(&self, tol: f64) -> bool {
        self.all_converged && self.spread <= tol
    }
}

pub fn solve_nonexpansive(
    t: &Mapping,
    lambda: f64,
    starts: &[Vector],
    stop: &StopRule,
    norm_kind: NormKind,
) -> Result<MultiStartReport> {
    if starts.is_empty() {
        return Err(Error::InsufficientData("no starting points".into()));
    }
    let traces = starts
        .iter()
        .map(|x0| krasnoselskij(t, lambda, x0, stop, norm_kind))
        .collect::<Result<Vec<_>>>()?;
    let limits: Vec<&Vector> = traces
        .iter()
        .filter(|tr| tr.status == Status::Converged)
        .map(|tr| &tr.final_iterate)
        .collect();
    let spread = limits
        .first()
        .map(|first| {
            limits
                .iter()
                .map(|x| norm(&(*x - *first), norm_kind))
                .fold(0.0, f64::max)
        })
        .unwrap_or(0.0);
    Ok(MultiStartReport {
        lambda,
        all_converged: limits.len() == traces.len(),
        traces,
        spread,
    })
}

/// Least `n` with `λⁿ·d1/(1−λ) <= eps`: the Banach a-priori bound on the
/// number of contraction steps needed for an `eps`-accurate iterate, where
/// `d1 = ‖x_1 − x_0‖`.
pub fn apriori_iterations(lambda: f64, d1: f64, eps: f64) -> Result<u64> {
    check_lambda_open(lambda)?;
    if !(d1.is_finite() && d1 >= 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "d1",
            value: d1,
            expected: "d1 >= 0",
        });
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "eps",
            value: eps,
            expected: "eps > 0",
        });
    }
    if d1 == 0.0 {
        return Ok(0);
    }
    let bound = |n: u64| lambda.powi(n as i32) * d1 / (1.0 - lambda) <= eps;
    let estimate = ((eps * (1.0 - lambda) / d1).ln() / lambda.ln()).ceil();
    let mut n = if estimate.is_finite() && estimate > 0.0 {
        estimate as u64
    } else {
        0
    };
    // The logarithms can land one off at exact boundaries.
    while n > 0 && bound(n - 1) {
        n -= 1;
    }
    while !bound(n) {
        n += 1;
    }
    Ok(n)
}

/// `(‖T(x) − x‖ <= tol, ‖T(x) − x‖)`.
pub fn check_fixed_point(t: &Mapping, x: &Vector, tol: f64, norm_kind: NormKind) -> Result<(bool, f64)> {
    let residual = norm(&(&t.evaluate(x)? - x), norm_kind);
    Ok((residual <= tol, residual))
}

/// Geometric mean of the last (up to 10) step ratios whose residuals both
/// sit above rounding level, `100·ε·max(1, ‖final‖)`.
pub fn empirical_ratio(trace: &IterationTrace) -> Result<f64> {
    let scale = norm(&trace.final_iterate, trace.norm_kind).max(1.0);
    let floor = 100.0 * f64::EPSILON * scale;
    let usable = trace.residuals.iter().filter(|&&r| r > floor).count();
    if usable < 3 {
        return Err(Error::InsufficientData(format!(
            "{usable} residuals above rounding level, need 3"
        )));
    }
    let logs: Vec<f64> = trace
        .residuals
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    let tail = &logs[logs.len().saturating_sub(10)..];
    if tail.is_empty() {
        return Err(Error::InsufficientData("no consecutive usable residuals".into()));
    }
    Ok((tail.iter().sum::<f64>() / tail.len() as f64).exp())
}
