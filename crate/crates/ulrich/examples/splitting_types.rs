//! Pushforward splitting types on the projective line: for a finite degree-d
//! self-map, the pushforward of O(m) splits as a sum of line bundles whose
//! degrees are read off an exact section-count staircase. The twist m = d - 1
//! is the one with trivial type.
//!
//! Run with: cargo run --example splitting_types

use std::sync::Arc;
use ulrich::plane::splitting_type_p1;
use ulrich::poly::{parse_poly, MultiPoly, VarSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = VarSpec::standard(&["x", "y"])?;
    for d in 2..=5u32 {
        let f0 = MultiPoly::var(Arc::clone(&vars), 1, 0).pow(d);
        let f1 = MultiPoly::var(Arc::clone(&vars), 1, 1).pow(d);
        println!("degree-{} coordinate power map:", d);
        for m in -3..=(d as i64 + 1) {
            let st = splitting_type_p1(&f0, &f1, m)?;
            let marker = if st.is_trivial() { "  <- trivial" } else { "" };
            println!("  f_* O({:>2}) = {}{}", m, st, marker);
        }
    }

    // Any finite pair of the same degree gives the same types.
    let g0 = parse_poly("x^3 + 2*x*y^2 - y^3", &vars, 1)?;
    let g1 = parse_poly("x^2*y + y^3", &vars, 1)?;
    let st = splitting_type_p1(&g0, &g1, 2)?;
    println!("\ngeneric degree-3 pair at m = 2: {}", st);
    Ok(())
}
