//! Even- and odd-parity certification pipelines for cyclic coverings of the
//! plane: randomized exact decomposition of the branch form, smoothness and
//! transversality certificates, and the resulting rank bounds.
//!
//! Run with: cargo run --example plane_cover_certificates

use ulrich::plane::{even_parity_pipeline, odd_parity_pipeline, CoverDescriptor};
use ulrich::poly::{parse_poly, VarSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = VarSpec::standard(&["x", "y", "z"])?;

    // Even branch degree: the double cover over the conic.
    let conic = parse_poly("y^2 + x*z", &vars, 1)?;
    let cov = CoverDescriptor::new(2, 2, 1, conic)?;
    let cert = even_parity_pipeline(&cov, 33, 16)?;
    println!("even pipeline (d = 2, k = 1): success = {}", cert.success);
    if let Some(dec) = &cert.decomposition {
        println!("  F1 = {}, F2 = {}", dec.f1, dec.f2);
    }
    println!(
        "  rank = {}, splitting type on the line: {}",
        cert.rank_bound.as_ref().map(|r| r.to_string()).unwrap_or_default(),
        cert.splitting.as_ref().map(|s| s.to_string()).unwrap_or_default()
    );
    for line in &cert.trace {
        println!("  trace: {}", line);
    }

    // Odd branch degree: the degree-3 cover branched over a Legendre cubic.
    let cubic = parse_poly("y^2*z + x*(x-z)*(x-2*z)", &vars, 1)?;
    let cov = CoverDescriptor::new(2, 3, 1, cubic)?;
    let cert = odd_parity_pipeline(&cov, 21, 16)?;
    println!("\nodd pipeline (d = 3, k = 1): success = {}", cert.success);
    println!(
        "  smallest prime p = {:?}, rank bound d * m_p = {}",
        cert.p,
        cert.rank_bound.as_ref().map(|r| r.to_string()).unwrap_or_default()
    );
    if let Some(rec) = &cert.recursion {
        println!(
            "  recursion m_p = {} (worked variant); statement variant m_p = {}",
            rec.m,
            cert.recursion_statement.as_ref().map(|t| t.m.to_string()).unwrap_or_default()
        );
    }
    for line in &cert.trace {
        println!("  trace: {}", line);
    }
    Ok(())
}
