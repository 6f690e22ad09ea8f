//! Veronese rewriting and the covering pipeline for Fermat branch curves
//! x^(2s) - y^(2s) - z^(2s): the rewrite produces the three-square quadric
//! z1^2 - z2^2 - z3^2 with z1 = x^s, and the pipeline finds a size-2
//! factorization of t^2 - g' through the trace-zero square root over Q(i).
//!
//! Run with: cargo run --example fermat_cover_pipeline

use ulrich::poly::{parse_poly, VarSpec};
use ulrich::veronese::build_cover_mf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = VarSpec::standard(&["x", "y", "z"])?;
    for s in [2u32, 3] {
        let g = parse_poly(&format!("x^{0} - y^{0} - z^{0}", 2 * s), &vars, 1)?;
        let pipe = build_cover_mf(2, s, 2, &g)?;
        println!("branch degree {}: g' = {}", 2 * s, pipe.rewrite.gprime);
        println!(
            "  products s = {}, rewrite-route size d^s = {}, achieved size = {} ({})",
            pipe.s, pipe.reference_size, pipe.achieved_size, pipe.route
        );
        println!(
            "  factorization target {} over Q(zeta_{}), verified: {}",
            pipe.mf.target(),
            pipe.mf.factor(0).field_order(),
            pipe.mf.verified()
        );
        for (i, f) in pipe.mf.factors().iter().enumerate() {
            println!("  factor {}:\n{:?}", i + 1, f);
        }
        println!();
    }
    Ok(())
}
