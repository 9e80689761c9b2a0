//! Sampled checks of the enriched and modified conditions.
//!
//! `x ↦ 100 − 2x` expands distances by 2, yet with b = 3 it satisfies the
//! modified condition with equality.

use fixenrich::enrichment::{enriched_reduction, verify_condition, ConditionKind, PairSampler};
use fixenrich::{Mapping, Matrix, NormKind};

fn main() -> fixenrich::Result<()> {
    let t = Mapping::scalar_affine(-2.0, 100.0)?;
    let sampler = PairSampler::default();

    for (b, kind) in [
        (0.0, ConditionKind::Modified),
        (3.0, ConditionKind::Modified),
        (0.5, ConditionKind::Enriched),
    ] {
        let r = verify_condition(&t, b, kind, NormKind::L2, &sampler, 1e-9)?;
        println!(
            "{kind:<8} b={b:<4} passed={:<5} max_ratio={:.12}",
            r.passed, r.max_ratio
        );
    }

    // The enriched condition at b is nonexpansiveness of S = (bx + Tx)/(b+1).
    let s = enriched_reduction(&t, 0.5)?;
    let r = verify_condition(&s, 0.0, ConditionKind::Modified, NormKind::L2, &sampler, 1e-9)?;
    println!("S at b=0.5 nonexpansive: {} (max ratio {:.12})", r.passed, r.max_ratio);

    // x ↦ (1−b)x for a few b.
    for b in [0.5, 1.0, 2.0] {
        let tb = Mapping::linear(Matrix::identity(3).scale(1.0 - b));
        let r = verify_condition(&tb, b, ConditionKind::Modified, NormKind::L2, &sampler, 1e-9)?;
        println!("(1-b)x, b={b}: {}", serde_json::to_string(&r).unwrap());
    }
    Ok(())
}
