//! Cyclic matrix roots and root-of-unity splitting: the 3x3 shift matrix A
//! with A^3 = (xyz) * Id yields the factorization
//! (t Id - A)(t Id - zeta A)(t Id - zeta^2 A) = (t^3 - xyz) * Id over Q(zeta_3).
//!
//! Run with: cargo run --example roots_of_unity_split

use ulrich::matfac::{cyclic_root, root_to_constant_mf, split_t_power};
use ulrich::poly::{parse_poly, VarSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = VarSpec::standard(&["x", "y", "z"])?;
    let forms = vec![
        parse_poly("x", &vars, 1)?,
        parse_poly("y", &vars, 1)?,
        parse_poly("z", &vars, 1)?,
    ];
    let root = cyclic_root(&forms)?;
    println!("cyclic shift root A:\n{:?}", root.matrix());
    println!("A^3 = ({}) * Id  [verified: {}]", root.target(), root.verified());

    let constant = root_to_constant_mf(&root)?;
    println!(
        "\nconstant expansion: {} copies of A factor {}",
        constant.length(),
        constant.target()
    );

    let mf = split_t_power(&root, "t")?;
    println!(
        "\nsplit over Q(zeta_{}): {} factors of size {}",
        mf.factor(0).field_order(),
        mf.length(),
        mf.size()
    );
    for (i, f) in mf.factors().iter().enumerate() {
        println!("beta_{}:\n{:?}", i + 1, f);
    }
    println!("product = ({}) * Id  [verified: {}]", mf.target(), mf.verified());
    Ok(())
}
