//! Picard against averaged iteration on seeded affine families.

use fixenrich::harness::{bench_compare, generate_affine_family, BenchScheme};
use fixenrich::{Mapping, Matrix, NormKind, StopRule};

fn main() -> fixenrich::Result<()> {
    let stop = StopRule::default();
    let schemes = [
        BenchScheme::Picard,
        BenchScheme::Krasnoselskij { lambda: 1.0 / 3.0 },
        BenchScheme::SolveModified { b: 1.0 },
    ];

    for spectrum in [vec![0.5], vec![0.9, 0.2, 0.1], vec![2.0]] {
        let family = generate_affine_family(42, 3, &spectrum, 5)?;
        let table = bench_compare(&family, &schemes, &stop, NormKind::L2)?;
        println!("spectrum {spectrum:?}");
        print!("{}", table.to_csv());
    }

    // A = −2I: Picard diverges, T_λ with λ = 1/3 has norm exactly 0.
    let family: Vec<Mapping> = generate_affine_family(42, 2, &[2.0], 3)?
        .into_iter()
        .map(|t| Mapping::affine(Matrix::identity(2).scale(-2.0), t.as_affine().unwrap().1))
        .collect::<fixenrich::Result<_>>()?;
    let table = bench_compare(&family, &schemes[..2], &stop, NormKind::L2)?;
    println!("A = -2I");
    print!("{}", table.to_csv());
    Ok(())
}
