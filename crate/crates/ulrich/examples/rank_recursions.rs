//! Integer rank bookkeeping: the m/m' and N/N' recursions along the
//! (p-1)/2 prime chain (both variants, with the divergences and the two
//! spots where the written values differ from the recurrence), the
//! pushforward modification ledger, and the consolidated rank report.
//!
//! Run with: cargo run --example rank_recursions

use ulrich::ranks::{
    m_sequence, modification_ledger, n_sequence, rank_report, MVariant,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [2u64, 3, 5, 7, 11] {
        match m_sequence(p, MVariant::Proof) {
            Ok(t) => {
                let s = m_sequence(p, MVariant::Statement)?;
                println!(
                    "p = {:>2}: m = {} (worked) / {} (statement), m' = {}",
                    p, t.m, s.m, t.m_prime
                );
                for note in &t.notes {
                    println!("        note: {}", note);
                }
                if let Some(d) = t.divergence {
                    println!("        variants diverge at p = {}", d);
                }
            }
            Err(e) => println!("p = {:>2}: {}", p, e),
        }
        if let Ok(n) = n_sequence(p) {
            println!("        N = {}", n.n);
        }
    }
    // A prime whose chain breaks.
    println!("p = 13: {}", m_sequence(13, MVariant::Proof).unwrap_err());

    println!("\nmodification ledger, d = 4, r = 1:");
    let ledger = modification_ledger(4, 1)?;
    println!("  start: {}", ledger.start);
    for s in &ledger.steps {
        println!("  step {}: kernel {} -> twisted {}", s.index, s.kernel, s.twisted);
    }
    println!("  final: {}", ledger.final_pushforward);

    println!("\nconsolidated reports:");
    for (d, k) in [(2u32, 1u32), (3, 1), (4, 1), (3, 3)] {
        let r = rank_report(d, k, None)?;
        println!(
            "  d = {}, k = {} ({}): rank bound {}",
            d,
            k,
            if r.even { "even" } else { "odd" },
            r.rank_bound().map(|b| b.to_string()).unwrap_or_default()
        );
    }
    Ok(())
}
