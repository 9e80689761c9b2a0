//! Fixed point of `x ↦ 100 − 2x` by Krasnoselskij iteration with
//! λ = 1/(b+1), b = 3, from several starting points.

use fixenrich::iteration::{
    apriori_iterations, check_fixed_point, empirical_ratio, solve_modified, Verification,
};
use fixenrich::{Mapping, NormKind, StopRule, Vector};

fn main() -> fixenrich::Result<()> {
    let t = Mapping::scalar_affine(-2.0, 100.0)?;
    let stop = StopRule::with_tol(1e-9);
    let verify = Verification::default();

    for x0 in [0.0, -1e6, 12345.678] {
        let x0 = Vector::new(vec![x0])?;
        let r = solve_modified(&t, 3.0, &x0, &stop, NormKind::L2, Some(&verify))?;
        let d1 = r.trace.residuals[0];
        println!(
            "x0={:<10} x*={:.12} iterations={} a-priori={} ratio={:.8} ‖Tx*-x*‖={:.2e} condition={}",
            x0[0],
            r.fixed_point[0],
            r.trace.iterations,
            apriori_iterations(r.lambda, d1, 1e-9)?,
            empirical_ratio(&r.trace)?,
            r.residual_t,
            r.condition_verified.as_ref().is_some_and(|c| c.passed),
        );
    }

    let (ok, res) = check_fixed_point(&t, &Vector::new(vec![100.0 / 3.0])?, 1e-9, NormKind::L2)?;
    println!("100/3 is fixed: {ok} (residual {res:e})");
    Ok(())
}
