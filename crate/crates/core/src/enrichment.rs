//! Enrichment conditions and the transforms that reduce them to plain
//! nonexpansiveness.
//!
//! For a constant `b >= 0` a mapping `T` is
//!
//! * *b-enriched nonexpansive* when `‖b(x−y) + Tx − Ty‖ <= (b+1)‖x−y‖`,
//! * *b-modified enriched nonexpansive* when `‖b(x−y) + Tx − Ty‖ <= ‖x−y‖`,
//!
//! for all `x, y`. Dividing the first by `b+1` shows it says exactly that
//! `S = (b·I + T)/(b+1)` is nonexpansive ([`enriched_reduction`]); the
//! second says `S = b·I + T` is nonexpansive ([`modified_shift`]). For
//! affine maps both conditions reduce to operator norm inequalities on
//! `bI + A`, which [`min_b_affine`] solves exactly.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mappings::Mapping;
use crate::spaces::{
    norm, operator_norm, shifted_gram_max, symmetric_max_eigenvalue, Matrix, NormKind, Vector,
};

/// Upper limit of the bracketing search in [`min_b_affine`].
pub const B_CAP: f64 = 1e6;

/// Width of the final bisection bracket in [`min_b_affine`].
pub const MIN_B_TOL: f64 = 1e-8;

/// Default relative slack of [`verify_condition`].
pub const DEFAULT_SLACK: f64 = 1e-9;

// Relative tolerance of the reduced norm inequality, absorbs rounding in the
// l2 power iteration.
const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    /// Right-hand side `(b+1)‖x−y‖`.
    Enriched,
    /// Right-hand side `‖x−y‖`.
    #[default]
    Modified,
}

impl ConditionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionKind::Enriched => "enriched",
            ConditionKind::Modified => "modified",
        }
    }

    /// Factor multiplying `‖x−y‖` on the right-hand side.
    pub fn rhs_factor(self, b: f64) -> f64 {
        match self {
            ConditionKind::Enriched => b + 1.0,
            ConditionKind::Modified => 1.0,
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enriched" => Ok(ConditionKind::Enriched),
            "modified" => Ok(ConditionKind::Modified),
            other => Err(Error::config("kind", format!("unknown condition `{other}`"))),
        }
    }
}

/// Deterministic source of test pairs `(x, y)`, `x != y`.
///
/// `x` is uniform in the box `[-R, R]^d`. Far pairs draw `y` the same way;
/// the last `near_pair_fraction` share of pairs places `y` at l2 distance in
/// `[1e-4·R, 1e-3·R]` from `x` along a random direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PairSampler {
    pub seed: u64,
    pub count: usize,
    pub box_radius: f64,
    pub near_pair_fraction: f64,
}

impl Default for PairSampler {
    fn default() -> Self {
        PairSampler {
            seed: 42,
            count: 10_000,
            box_radius: 100.0,
            near_pair_fraction: 0.2,
        }
    }
}

impl PairSampler {
    pub fn new(seed: u64, count: usize) -> Self {
        PairSampler {
            seed,
            count,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::config("sampler.count", "must be at least 1"));
        }
        if !(self.box_radius.is_finite() && self.box_radius > 0.0) {
            return Err(Error::config("sampler.box_radius", "must be finite and > 0"));
        }
        if !(0.0..=1.0).contains(&self.near_pair_fraction) {
            return Err(Error::config(
                "sampler.near_pair_fraction",
                "must lie in [0, 1]",
            ));
        }
        Ok(())
    }

    pub fn near_count(&self) -> usize {
        (self.count as f64 * self.near_pair_fraction).round() as usize
    }

    /// Draws the pair set for dimension `dim`.
    pub fn pairs(&self, dim: usize) -> Result<Vec<(Vector, Vector)>> {
        self.validate()?;
        let r = self.box_radius;
        let min_gap = 1e-14 * r;
        let far = self.count - self.near_count();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let uniform = |rng: &mut ChaCha8Rng| {
            Vector::from_raw((0..dim).map(|_| rng.random_range(-r..=r)).collect())
        };

        let mut out = Vec::with_capacity(self.count);
        while out.len() < far {
            let x = uniform(&mut rng);
            let y = uniform(&mut rng);
            if norm(&(&x - &y), NormKind::Linf) >= min_gap {
                out.push((x, y));
            }
        }
        while out.len() < self.count {
            let x = uniform(&mut rng);
            let dir = Vector::from_raw((0..dim).map(|_| rng.sample(StandardNormal)).collect());
            let len = norm(&dir, NormKind::L2);
            if len == 0.0 {
                continue;
            }
            let dist = 1e-3 * r * rng.random_range(0.1..=1.0);
            let y = &x + &dir.scale(dist / len);
            if norm(&(&x - &y), NormKind::Linf) >= min_gap {
                out.push((x, y));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vector,
    pub y: Vector,
}

/// Verdict of a sampled enrichment check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentReport {
    pub kind: ConditionKind,
    pub b: f64,
    pub pairs_tested: usize,
    /// Largest `‖b(x−y)+Tx−Ty‖ / rhs` over the tested pairs.
    pub max_ratio: f64,
    pub witness: Witness,
    pub passed: bool,
    pub slack: f64,
}

fn check_b(b: f64) -> Result<()> {
    if b.is_finite() && b >= 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "b",
            value: b,
            expected: "0 <= b < inf",
        })
    }
}

/// `T_λ = (1−λ)·I + λ·T`.
pub fn averaged(t: &Mapping, lambda: f64) -> Result<Mapping> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "lambda",
            value: lambda,
            expected: "0 < lambda <= 1",
        });
    }
    Mapping::lincomb(1.0 - lambda, lambda, t.clone())
}

/// `S = (b·I + T)/(b+1)`, built as `averaged(T, 1/(b+1))` so the two
/// constructions agree as values.
pub fn enriched_reduction(t: &Mapping, b: f64) -> Result<Mapping> {
    check_b(b)?;
    averaged(t, 1.0 / (b + 1.0))
}

/// `S = b·I + T`. Fixed points of `S` satisfy `Tx = (1−b)x`, see
/// [`shift_relation_residual`].
pub fn modified_shift(t: &Mapping, b: f64) -> Result<Mapping> {
    check_b(b)?;
    Mapping::lincomb(b, 1.0, t.clone())
}

/// `‖Tx − (1−b)x‖`: zero exactly when `x` is a fixed point of
/// `modified_shift(T, b)`.
pub fn shift_relation_residual(t: &Mapping, b: f64, x: &Vector, kind: NormKind) -> Result<f64> {
    check_b(b)?;
    let tx = t.evaluate(x)?;
    Ok(norm(&tx.lincomb(1.0, -(1.0 - b), x), kind))
}

/// Ratio of the two sides of the condition for one pair.
pub fn condition_ratio(
    t: &Mapping,
    b: f64,
    kind: ConditionKind,
    norm_kind: NormKind,
    x: &Vector,
    y: &Vector,
) -> Result<f64> {
    let diff = x - y;
    let image_diff = &t.evaluate(x)? - &t.evaluate(y)?;
    let lhs = norm(&diff.lincomb(b, 1.0, &image_diff), norm_kind);
    let rhs = kind.rhs_factor(b) * norm(&diff, norm_kind);
    Ok(lhs / rhs)
}

/// Sampled check of the enrichment condition. A failed report is a proof
/// that `T` violates the condition; a pass is evidence only.
pub fn verify_condition(
    t: &Mapping,
    b: f64,
    kind: ConditionKind,
    norm_kind: NormKind,
    sampler: &PairSampler,
    slack: f64,
) -> Result<EnrichmentReport> {
    let pairs = sampler.pairs(t.dimension())?;
    verify_pairs(t, b, kind, norm_kind, &pairs, slack)
}

/// Same as [`verify_condition`] over an explicit pair set. Ties in the
/// maximum keep the lowest pair index.
pub fn verify_pairs(
    t: &Mapping,
    b: f64,
    kind: ConditionKind,
    norm_kind: NormKind,
    pairs: &[(Vector, Vector)],
    slack: f64,
) -> Result<EnrichmentReport> {
    check_b(b)?;
    if !(slack.is_finite() && slack >= 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "slack",
            value: slack,
            expected: "slack >= 0",
        });
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no pairs to verify".into()));
    }

    let mut best = (0, f64::NEG_INFINITY);
    for (i, (x, y)) in pairs.iter().enumerate() {
        let ratio = condition_ratio(t, b, kind, norm_kind, x, y)?;
        if ratio.is_nan() {
            return Err(Error::NonFiniteResult(format!("ratio at pair {i}")));
        }
        if ratio > best.1 {
            best = (i, ratio);
        }
    }
    let (x, y) = pairs[best.0].clone();
    Ok(EnrichmentReport {
        kind,
        b,
        pairs_tested: pairs.len(),
        max_ratio: best.1,
        witness: Witness { x, y },
        passed: best.1 <= 1.0 + slack,
        slack,
    })
}

/// `‖bI + A‖ − rhs(b)`; the reduced condition holds where this is `<= 0`.
pub fn affine_excess(a: &Matrix, b: f64, kind: ConditionKind, norm_kind: NormKind) -> Result<f64> {
    if norm_kind != NormKind::L2 {
        return Ok(operator_norm(&a.shifted(b, 1.0), norm_kind)? - kind.rhs_factor(b));
    }
    // ‖bI + A‖₂ = sqrt(b² + μ); the enriched difference is rewritten to
    // avoid cancelling two numbers of size b.
    let mu = shifted_gram_max(a, b)?;
    let lhs = (b * b + mu).max(0.0).sqrt();
    Ok(match kind {
        ConditionKind::Modified => lhs - 1.0,
        ConditionKind::Enriched => (mu - 2.0 * b - 1.0) / (lhs + b + 1.0),
    })
}

fn affine_feasible(a: &Matrix, b: f64, kind: ConditionKind, norm_kind: NormKind) -> Result<bool> {
    Ok(affine_excess(a, b, kind, norm_kind)? <= FEASIBILITY_TOL * kind.rhs_factor(b))
}

/// `lim_{b→∞} ‖bI + A‖ − b`: the largest eigenvalue of `(A + Aᵀ)/2` for l2,
/// the largest diagonal entry plus off-diagonal column (l1) or row (linf)
/// magnitudes otherwise.
fn log_norm(a: &Matrix, norm_kind: NormKind) -> Result<f64> {
    let d = a.dim();
    let off = |i: usize, j: usize| if i == j { a.get(i, i) } else { a.get(i, j).abs() };
    Ok(match norm_kind {
        NormKind::L2 => symmetric_max_eigenvalue(&Matrix::from_fn(d, |i, j| {
            0.5 * (a.get(i, j) + a.get(j, i))
        }))?,
        NormKind::L1 => (0..d)
            .map(|j| (0..d).map(|i| off(i, j)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
        NormKind::Linf => (0..d)
            .map(|i| (0..d).map(|j| off(i, j)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Least `b >= 0` for which `x ↦ Ax + c` satisfies the condition, to within
/// [`MIN_B_TOL`] (the returned value is always on the feasible side).
///
/// `g(b) = ‖bI + A‖ − rhs(b)` is convex, so the feasible set is an interval.
/// For the enriched condition `g` is also bounded above, hence
/// non-increasing towards `log_norm(A) − 1`. A positive limit means no `b`
/// qualifies (`None`); otherwise a doubling bracket finds the interval and
/// failing to reach it by [`B_CAP`] is `SearchBudgetExceeded`. For the modified
/// condition the interval lies inside `[0, ‖A‖ + 1]`, so the minimum of `g`
/// decides emptiness and `None` means no `b` qualifies.
pub fn min_b_affine(a: &Matrix, kind: ConditionKind, norm_kind: NormKind) -> Result<Option<f64>> {
    let feasible = |b: f64| affine_feasible(a, b, kind, norm_kind);
    if feasible(0.0)? {
        return Ok(Some(0.0));
    }

    let hi = match kind {
        ConditionKind::Enriched => {
            let limit = log_norm(a, norm_kind)? - 1.0;
            if limit > FEASIBILITY_TOL * operator_norm(a, norm_kind)?.max(1.0) {
                return Ok(None);
            }
            let mut hi = 1.0;
            loop {
                if feasible(hi)? {
                    break hi;
                }
                if hi >= B_CAP {
                    return Err(Error::SearchBudgetExceeded { cap: B_CAP });
                }
                hi = (hi * 2.0).min(B_CAP);
            }
        }
        ConditionKind::Modified => {
            let upper = operator_norm(a, norm_kind)? + 1.0;
            let best = golden_section_min(
                |b| affine_excess(a, b, kind, norm_kind),
                0.0,
                upper,
                1e-10,
            )?;
            if !feasible(best)? {
                return Ok(None);
            }
            best
        }
    };

    // 0 is infeasible and hi feasible; the feasible set is an interval.
    let mut lo = 0.0;
    let mut hi = hi;
    while hi - lo > MIN_B_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn golden_section_min(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (lo + hi))
}
