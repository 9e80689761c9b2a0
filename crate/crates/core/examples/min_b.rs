//! Least enrichment constant of affine maps in each norm.

use fixenrich::enrichment::{min_b_affine, ConditionKind};
use fixenrich::harness::generate_affine_family;
use fixenrich::{Error, Matrix, NormKind};

fn main() -> fixenrich::Result<()> {
    let mut cases = vec![
        ("[[-2]]".to_string(), Matrix::from_rows(vec![vec![-2.0]])?),
        ("2I".to_string(), Matrix::identity(2).scale(2.0)),
        (
            "[[1,100],[-100,1]]".to_string(),
            Matrix::from_rows(vec![vec![1.0, 100.0], vec![-100.0, 1.0]])?,
        ),
    ];
    for (i, t) in generate_affine_family(9, 3, &[1.8, 0.9, 0.3], 2)?.into_iter().enumerate() {
        cases.push((format!("random 3x3 #{i}"), t.as_affine().expect("affine").0));
    }

    for (name, a) in &cases {
        for kind in [ConditionKind::Enriched, ConditionKind::Modified] {
            let row: Vec<String> = NormKind::ALL
                .iter()
                .map(|&n| match min_b_affine(a, kind, n) {
                    Ok(Some(b)) => format!("{n}={b:.8}"),
                    Ok(None) => format!("{n}=none"),
                    Err(Error::SearchBudgetExceeded { .. }) => format!("{n}=beyond cap"),
                    Err(e) => format!("{n}=error({e})"),
                })
                .collect();
            println!("{name:<20} {kind:<8} {}", row.join("  "));
        }
    }
    Ok(())
}
