//! Building mappings in code and from JSON, evaluating them, and reading
//! back their affine normal form.

use fixenrich::mappings::parse_mapping_str;
use fixenrich::{Mapping, Vector};

fn main() -> fixenrich::Result<()> {
    let t = Mapping::scalar_affine(-2.0, 100.0)?;
    let x = Vector::new(vec![10.0])?;
    println!("T(10) = {:?}", t.evaluate(&x)?.as_slice());

    let tt = Mapping::composition(vec![t.clone(), t.clone()])?;
    println!("T(T(10)) = {:?}", tt.evaluate(&x)?.as_slice());

    let doc = r#"{
        "kind": "lincomb", "alpha": 0.75, "beta": 0.25,
        "base": {"kind": "affine", "matrix": [[-2]], "offset": [100]}
    }"#;
    let avg = parse_mapping_str(doc)?;
    let (a, c) = avg.as_affine().expect("affine");
    println!("0.75x + 0.25T(x) = {}x + {}", a.get(0, 0), c[0]);

    let clamp = Mapping::box_projection(Vector::filled(2, -1.0), Vector::filled(2, 1.0))?;
    let spin = Mapping::composition(vec![Mapping::rotation(0.3)?, clamp])?;
    println!("affine form of a clamped rotation: {:?}", spin.as_affine().map(|_| ()));
    println!("{}", spin.to_json());
    Ok(())
}
