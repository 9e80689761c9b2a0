//! Vector norms and the operator norms they induce.

use fixenrich::{norm, operator_norm, Matrix, NormKind, Vector};

fn main() -> fixenrich::Result<()> {
    let v = Vector::new(vec![1.0, -2.0])?;
    for kind in NormKind::ALL {
        println!("‖(1,-2)‖_{kind} = {}", norm(&v, kind));
    }

    // (I + R)/2 for the quarter turn R.
    let m = Matrix::from_rows(vec![vec![0.5, -0.5], vec![0.5, 0.5]])?;
    for kind in NormKind::ALL {
        println!("‖(I+R)/2‖_{kind} = {:.10}", operator_norm(&m, kind)?);
    }
    Ok(())
}
