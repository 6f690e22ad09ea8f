//! Randomized exact decomposition F = F1 G1 + F2 G2 with the geometry
//! certificates that the covering pipelines rely on: smoothness of the
//! divisor curve and transversality against the residual product.
//!
//! Run with: cargo run --example decompose_and_check

use ulrich::plane::{carlini_decompose, is_smooth_plane_curve, is_transversal};
use ulrich::poly::{parse_poly, VarSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = VarSpec::standard(&["x", "y", "z"])?;

    let conic = parse_poly("y^2 + x*z", &vars, 1)?;
    let dec = carlini_decompose(&conic, 1, 1, 42, 32)?;
    println!("conic: ({}) * ({}) + ({}) * ({})", dec.f1, dec.g1, dec.f2, dec.g2);
    println!("  identity verified: {}", dec.verify());

    let smooth = is_smooth_plane_curve(&dec.f1, 42, 16)?;
    println!("  divisor smooth: {} (shear ({}, {}))", smooth.smooth, smooth.shear.a, smooth.shear.b);

    let residual = dec.f2.mul(&dec.g2)?;
    let trans = is_transversal(&dec.f1, &residual, 42, 16)?;
    println!(
        "  transversal to residual: {} (eliminant degree {} = Bezout count)",
        trans.transversal, trans.resultant_degree
    );

    // Smoothness certificates on their own.
    for (label, text) in [
        ("smooth cubic", "y^2*z + x*(x-z)*(x-2*z)"),
        ("nodal cubic", "y^2*z - x^2*(x + z)"),
        ("three lines", "x*y*z"),
    ] {
        let f = parse_poly(text, &vars, 1)?;
        let cert = is_smooth_plane_curve(&f, 7, 16)?;
        println!("{}: smooth = {} (eliminant gcd degree {})", label, cert.smooth, cert.gcd_degree);
    }
    Ok(())
}
