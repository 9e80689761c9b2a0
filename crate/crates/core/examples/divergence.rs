//! What plain iteration does where the theory gives no guarantee.

use fixenrich::iteration::{empirical_ratio, krasnoselskij, picard, solve_nonexpansive};
use fixenrich::{Mapping, NormKind, StopRule, Vector};

fn main() -> fixenrich::Result<()> {
    let stop = StopRule::default();

    // Picard on an expansive map doubles the residual every step.
    let t = Mapping::scalar_affine(-2.0, 100.0)?;
    let tr = picard(&t, &Vector::zeros(1), &stop, NormKind::L2)?;
    println!("picard on 100-2x: {} after {} steps", tr.status.as_str(), tr.iterations);

    // A quarter turn is an isometry: Picard circles, averaging converges.
    let r = Mapping::rotation(std::f64::consts::FRAC_PI_2)?;
    let x0 = Vector::new(vec![1.0, 0.0])?;
    let tr = picard(&r, &x0, &StopRule { max_iter: 200, ..stop.clone() }, NormKind::L2)?;
    println!("picard on R(pi/2): {} after {} steps", tr.status.as_str(), tr.iterations);
    let tr = krasnoselskij(&r, 0.5, &x0, &stop, NormKind::L2)?;
    println!(
        "krasnoselskij on R(pi/2): {} at {:?}, ratio {:.6}",
        tr.status.as_str(),
        tr.final_iterate.as_slice(),
        empirical_ratio(&tr)?
    );

    // Nonexpansive with a whole segment of fixed points: starts disagree.
    let clamp = Mapping::box_projection(Vector::new(vec![0.0, 0.0])?, Vector::new(vec![1.0, 0.0])?)?;
    let starts = [
        Vector::new(vec![-3.0, 4.0])?,
        Vector::new(vec![0.4, 9.0])?,
        Vector::new(vec![7.0, -1.0])?,
    ];
    let report = solve_nonexpansive(&clamp, 0.5, &starts, &stop, NormKind::L2)?;
    println!(
        "box projection: all converged={} spread={:.3} unique-looking={}",
        report.all_converged,
        report.spread,
        report.agrees(1e-6)
    );
    Ok(())
}
