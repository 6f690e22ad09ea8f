//! Integer bookkeeping for the rank estimates: the m/m' and N/N' recursions
//! along the (p-1)/2 prime chain, the pushforward modification ledger, and
//! consolidated rank reports.
//!
//! The m-recursion is implemented in two variants because the statement uses
//! the unprimed previous value while the worked computation uses the primed
//! one; traces expose both and mark where they diverge, together with the two
//! places where the written numbers differ from the recurrence itself.

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::veronese::{veronese_rewrite, VeroneseChart};
use num::BigInt;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

pub fn smallest_prime_factor(n: u64) -> u64 {
    assert!(n >= 2);
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return i;
        }
        i += 1;
    }
    n
}

/// The descending prime chain p -> (p-1)/2 -> ... -> {2, 3}, or the point
/// where it breaks.
fn prime_chain(p: u64) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{} is not prime", p)));
    }
    let mut chain = vec![p];
    let mut cur = p;
    while cur > 3 {
        let q = (cur - 1) / 2;
        if !is_prime(q) {
            return Err(Error::ChainBreak { p, at: q });
        }
        chain.push(q);
        cur = q;
    }
    Ok(chain)
}

/// Which previous value the m-recursion squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MVariant {
    /// m_p = (p-1) * (m'_q)^2, as in the worked computation.
    Proof,
    /// m_p = (p-1) * (m_q)^2, as in the statement.
    Statement,
}

/// Values at one chain prime, under both variants, plus any number the source
/// text wrote that differs from the recurrence.
#[derive(Clone, Debug)]
pub struct RecursionStep {
    pub p: u64,
    pub m_proof: BigInt,
    pub m_prime_proof: BigInt,
    pub m_statement: BigInt,
    pub m_prime_statement: BigInt,
    pub written_m: Option<BigInt>,
    pub written_m_prime: Option<BigInt>,
}

#[derive(Clone, Debug)]
pub struct RecursionTrace {
    pub p: u64,
    pub variant: MVariant,
    /// Chain primes in ascending order, base first.
    pub steps: Vec<RecursionStep>,
    /// Final value under the requested variant.
    pub m: BigInt,
    pub m_prime: BigInt,
    /// First chain prime where the two variants disagree.
    pub divergence: Option<u64>,
    pub notes: Vec<String>,
}

impl RecursionTrace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "variant": match self.variant { MVariant::Proof => "proof", MVariant::Statement => "statement" },
            "m": self.m.to_string(),
            "m_prime": self.m_prime.to_string(),
            "divergence": self.divergence,
            "notes": self.notes,
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "p": s.p,
                "m_proof": s.m_proof.to_string(),
                "m_prime_proof": s.m_prime_proof.to_string(),
                "m_statement": s.m_statement.to_string(),
                "m_prime_statement": s.m_prime_statement.to_string(),
                "written_m": s.written_m.as_ref().map(|v| v.to_string()),
                "written_m_prime": s.written_m_prime.as_ref().map(|v| v.to_string()),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Matrix-size recursion m along the prime chain. Base values m_2 = 1,
/// m'_2 = 2, and the pinned m_3 = 2 with m'_3 = 3 * m_3^2 = 12. Above that,
/// m_p = (p-1) * (previous)^2 with the variant choosing primed or unprimed,
/// and m'_p = p * m_p^2.
pub fn m_sequence(p: u64, variant: MVariant) -> Result<RecursionTrace> {
    let chain = prime_chain(p)?;
    let mut steps: Vec<RecursionStep> = Vec::new();
    let mut notes = Vec::new();
    for &q in chain.iter().rev() {
        let step = match q {
            2 => RecursionStep {
                p: 2,
                m_proof: BigInt::from(1),
                m_prime_proof: BigInt::from(2),
                m_statement: BigInt::from(1),
                m_prime_statement: BigInt::from(2),
                written_m: None,
                written_m_prime: None,
            },
            3 => RecursionStep {
                p: 3,
                m_proof: BigInt::from(2),
                m_prime_proof: BigInt::from(12),
                m_statement: BigInt::from(2),
                m_prime_statement: BigInt::from(12),
                written_m: None,
                written_m_prime: None,
            },
            _ => {
                let prev = steps.last().expect("chain ascends from a base");
                let f = BigInt::from(q - 1);
                let m_proof = &f * &prev.m_prime_proof * &prev.m_prime_proof;
                let m_statement = &f * &prev.m_statement * &prev.m_statement;
                let m_prime_proof = BigInt::from(q) * &m_proof * &m_proof;
                let m_prime_statement = BigInt::from(q) * &m_statement * &m_statement;
                let written_m = (q == 7).then(|| BigInt::from(72));
                let written_m_prime = (q == 5).then(|| BigInt::from(80));
                if q == 7 && written_m.as_ref() != Some(&m_proof) {
                    notes.push(format!(
                        "at p = 7 the written value is 72 = 6*12, the recurrence gives {}",
                        m_proof
                    ));
                }
                if q == 5 {
                    notes.push(format!(
                        "at p = 5 the written m' is 5*16 = 80, the recurrence gives {}",
                        m_prime_proof
                    ));
                }
                RecursionStep {
                    p: q,
                    m_proof,
                    m_prime_proof,
                    m_statement,
                    m_prime_statement,
                    written_m,
                    written_m_prime,
                }
            }
        };
        steps.push(step);
    }
    let divergence = steps
        .iter()
        .find(|s| s.m_proof != s.m_statement || s.m_prime_proof != s.m_prime_statement)
        .map(|s| s.p);
    let last = steps.last().unwrap();
    let (m, m_prime) = match variant {
        MVariant::Proof => (last.m_proof.clone(), last.m_prime_proof.clone()),
        MVariant::Statement => (last.m_statement.clone(), last.m_prime_statement.clone()),
    };
    Ok(RecursionTrace {
        p,
        variant,
        steps,
        m,
        m_prime,
        divergence,
        notes,
    })
}

/// Count recursion N along the same chain: N_2 = 2 with N'_2 = 4, the pinned
/// N_3 = N'_2 + 1 = 5, and N_p = 1 + 4 N'_q = 1 + 8 N_q with N' = 2 N above.
#[derive(Clone, Debug)]
pub struct CountStep {
    pub p: u64,
    pub n: BigInt,
    pub n_prime: BigInt,
}

#[derive(Clone, Debug)]
pub struct CountTrace {
    pub p: u64,
    pub steps: Vec<CountStep>,
    pub n: BigInt,
}

impl CountTrace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "n": self.n.to_string(),
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "p": s.p, "n": s.n.to_string(), "n_prime": s.n_prime.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn n_sequence(p: u64) -> Result<CountTrace> {
    let chain = prime_chain(p)?;
    let mut steps: Vec<CountStep> = Vec::new();
    for &q in chain.iter().rev() {
        let step = match q {
            2 => CountStep {
                p: 2,
                n: BigInt::from(2),
                n_prime: BigInt::from(4),
            },
            3 => CountStep {
                p: 3,
                n: BigInt::from(5),
                n_prime: BigInt::from(10),
            },
            _ => {
                let prev = steps.last().unwrap();
                let n = BigInt::from(1) + BigInt::from(4) * &prev.n_prime;
                let n_prime = BigInt::from(2) * &n;
                CountStep { p: q, n, n_prime }
            }
        };
        steps.push(step);
    }
    let n = steps.last().unwrap().n.clone();
    Ok(CountTrace { p, steps, n })
}

// ---------------------------------------------------------------------------
// Line-bundle ledgers and the modification replay
// ---------------------------------------------------------------------------

/// Formal sum of symbols L^j with non-negative multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineBundleLedger {
    summands: BTreeMap<i64, u64>,
}

impl LineBundleLedger {
    pub fn new() -> LineBundleLedger {
        LineBundleLedger {
            summands: BTreeMap::new(),
        }
    }

    pub fn with(mut self, twist: i64, mult: u64) -> LineBundleLedger {
        self.add(twist, mult);
        self
    }

    pub fn add(&mut self, twist: i64, mult: u64) {
        if mult > 0 {
            *self.summands.entry(twist).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, twist: i64) -> u64 {
        *self.summands.get(&twist).unwrap_or(&0)
    }

    pub fn rank(&self) -> u64 {
        self.summands.values().sum()
    }

    pub fn summands(&self) -> impl Iterator<Item = (&i64, &u64)> {
        self.summands.iter()
    }

    /// Shift every twist by +1 (tensoring with L).
    pub fn twist_up(&self) -> LineBundleLedger {
        let summands = self.summands.iter().map(|(&j, &m)| (j + 1, m)).collect();
        LineBundleLedger { summands }
    }

    /// Rendering over the base with L = O(k).
    pub fn render_base(&self, k: u32) -> String {
        let mut parts = Vec::new();
        for (&j, &m) in self.summands.iter().rev() {
            let body = if j == 0 {
                "O".to_string()
            } else {
                format!("O({})", j * k as i64)
            };
            parts.push(if m == 1 {
                body
            } else {
                format!("{}^{}", body, m)
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self
            .summands
            .iter()
            .rev()
            .map(|(&j, &m)| serde_json::json!({"twist": j, "mult": m}))
            .collect::<Vec<_>>())
    }
}

impl Default for LineBundleLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for LineBundleLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&j, &m) in self.summands.iter().rev() {
            let body = if j == 0 {
                "O".to_string()
            } else {
                format!("L^{}", j)
            };
            parts.push(if m == 1 {
                body
            } else {
                format!("{}^{}", body, m)
            });
        }
        write!(
            f,
            "{}",
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        )
    }
}

/// One modification step: the kernel pushforward and its L-twist.
#[derive(Clone, Debug)]
pub struct ModificationStep {
    pub index: u32,
    pub kernel: LineBundleLedger,
    pub twisted: LineBundleLedger,
}

/// Full replay of the modification construction for a degree-d covering and a
/// rank-r relatively trivial input on the divisor.
#[derive(Clone, Debug)]
pub struct ModificationLedger {
    pub d: u32,
    pub r: u32,
    pub start: LineBundleLedger,
    pub steps: Vec<ModificationStep>,
    pub final_pushforward: LineBundleLedger,
}

impl ModificationLedger {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "r": self.r,
            "start": self.start.to_json(),
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "i": s.index,
                "kernel": s.kernel.to_json(),
                "twisted": s.twisted.to_json(),
            })).collect::<Vec<_>>(),
            "final": self.final_pushforward.to_json(),
        })
    }
}

/// Replay the kernel-of-evaluation steps on pushforward ledgers:
/// start from (O + L^-1 + ... + L^(1-d))^(d r); step i sends the trivial part
/// O^((i+1) d r) onto the divisor sheaf, leaving (L^-1)^((i+2) d r) +
/// (L^-2 + ... + L^(i+1-d))^(d r), and twists by L before the next step.
/// The final ledger collapses to (L^-1)^(d^2 r), i.e. a trivial pushforward
/// of rank d^2 r after the last twist.
pub fn modification_ledger(d: u32, r: u32) -> Result<ModificationLedger> {
    if d < 2 {
        return Err(Error::Invalid("covering degree must be >= 2".into()));
    }
    if r < 1 {
        return Err(Error::Invalid("rank must be >= 1".into()));
    }
    let dr = d as u64 * r as u64;
    let total = d as u64 * dr;
    let mut start = LineBundleLedger::new();
    for j in 0..d as i64 {
        start.add(-j, dr);
    }
    debug_assert_eq!(start.rank(), total);
    let mut current = start.clone();
    let mut steps = Vec::new();
    for i in 0..=(d as i64) - 2 {
        // Kernel of the map onto the divisor sheaf: every trivial summand
        // drops to L^-1; the rest is untouched.
        let trivial = current.multiplicity(0);
        let mut kernel = LineBundleLedger::new();
        kernel.add(-1, trivial);
        for (&j, &m) in current.summands() {
            if j != 0 {
                kernel.add(j, m);
            }
        }
        // The closed-form step ledger: (L^-1)^((i+2) d r) + (L^-2 + ... + L^(i+1-d))^(d r).
        let mut formula = LineBundleLedger::new();
        formula.add(-1, (i as u64 + 2) * dr);
        let mut j = -2;
        while j >= -(d as i64) + i + 1 {
            formula.add(j, dr);
            j -= 1;
        }
        if kernel != formula {
            return Err(Error::Invalid(format!(
                "step {} ledger {} does not match the closed form {}",
                i, kernel, formula
            )));
        }
        if kernel.rank() != total {
            return Err(Error::Invalid(format!(
                "step {} ledger rank {} != d^2 r = {}",
                i,
                kernel.rank(),
                total
            )));
        }
        let twisted = kernel.twist_up();
        current = twisted.clone();
        steps.push(ModificationStep {
            index: i as u32,
            kernel,
            twisted,
        });
    }
    let final_pushforward = current;
    let expected = LineBundleLedger::new().with(0, total);
    if final_pushforward != expected {
        return Err(Error::Invalid(format!(
            "final pushforward {} is not O^{}",
            final_pushforward, total
        )));
    }
    Ok(ModificationLedger {
        d,
        r,
        start,
        steps,
        final_pushforward,
    })
}

/// Rank bound r * d^(n-1) for the inductive construction over P^n.
pub fn pn_rank_bound(n: u32, d: u32, r: u32) -> Result<BigInt> {
    if n < 2 || d < 2 || r < 1 {
        return Err(Error::Invalid("need n >= 2, d >= 2, r >= 1".into()));
    }
    Ok(BigInt::from(r) * BigInt::from(d).pow(n - 1))
}

// ---------------------------------------------------------------------------
// Consolidated report
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct VeroneseEstimate {
    pub s: usize,
    /// d^s, the factorization size for t^d - g'.
    pub size: BigInt,
    /// d^(s-1), the rank of each cokernel sheaf.
    pub coker_rank: BigInt,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub d: u32,
    pub k: u32,
    pub dk: u64,
    pub even: bool,
    /// Smallest prime of d*k in the odd case.
    pub p: Option<u64>,
    pub rank_even: Option<u64>,
    pub m_proof: Option<RecursionTrace>,
    pub m_statement: Option<RecursionTrace>,
    pub chain_error: Option<String>,
    pub veronese: Option<VeroneseEstimate>,
    pub ledger: Option<ModificationLedger>,
}

impl RankReport {
    /// Headline rank bound: d for the even route, d * m_p (worked variant)
    /// for the odd route.
    pub fn rank_bound(&self) -> Option<BigInt> {
        if self.even {
            return Some(BigInt::from(self.d));
        }
        self.m_proof
            .as_ref()
            .map(|t| BigInt::from(self.d) * &t.m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "k": self.k,
            "dk": self.dk,
            "parity": if self.even { "even" } else { "odd" },
            "p": self.p,
            "rank_bound": self.rank_bound().map(|b| b.to_string()),
            "m_proof": self.m_proof.as_ref().map(|t| t.to_json()),
            "m_statement": self.m_statement.as_ref().map(|t| t.to_json()),
            "chain_error": self.chain_error,
            "veronese": self.veronese.as_ref().map(|v| serde_json::json!({
                "s": v.s,
                "size": v.size.to_string(),
                "coker_rank": v.coker_rank.to_string(),
            })),
            "ledger": self.ledger.as_ref().map(|l| l.to_json()),
        })
    }
}

/// Consolidated rank report for a degree-d covering with branch degree d*k.
/// When a ternary branch form is supplied, the Veronese-route size estimate
/// d^s is included, with s read off from the rewrite presentation.
pub fn rank_report(d: u32, k: u32, branch: Option<&MultiPoly>) -> Result<RankReport> {
    if d < 2 || k < 1 {
        return Err(Error::Invalid("need d >= 2, k >= 1".into()));
    }
    let dk = d as u64 * k as u64;
    let even = dk % 2 == 0;
    let mut report = RankReport {
        d,
        k,
        dk,
        even,
        p: None,
        rank_even: even.then_some(d as u64),
        m_proof: None,
        m_statement: None,
        chain_error: None,
        veronese: None,
        ledger: None,
    };
    if even {
        report.ledger = Some(modification_ledger(d, 1)?);
    } else {
        let p = smallest_prime_factor(dk);
        report.p = Some(p);
        match m_sequence(p, MVariant::Proof) {
            Ok(tr) => {
                // Ledger for the odd route uses r = m_p when it stays small.
                if let Ok(r_small) = u32::try_from(&tr.m) {
                    if r_small <= 1 << 16 {
                        report.ledger = Some(modification_ledger(d, r_small)?);
                    }
                }
                report.m_proof = Some(tr);
                report.m_statement = Some(m_sequence(p, MVariant::Statement)?);
            }
            Err(e) => report.chain_error = Some(e.to_string()),
        }
    }
    if let Some(g) = branch {
        let deg = g.weighted_degree()?;
        if deg != dk {
            return Err(Error::Degree(format!(
                "branch degree {} is not d*k = {}",
                deg, dk
            )));
        }
        if g.vars().len() == 3 {
            let chart = VeroneseChart::new(2, k, Arc::clone(g.vars()))?;
            let cert = veronese_rewrite(g, &chart)?;
            let s = cert.gprime.num_terms();
            report.veronese = Some(VeroneseEstimate {
                s,
                size: BigInt::from(d).pow(s as u32),
                coker_rank: BigInt::from(d).pow(s.saturating_sub(1) as u32),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_values_match_worked_computation() {
        assert_eq!(m_sequence(2, MVariant::Proof).unwrap().m, BigInt::from(1));
        assert_eq!(m_sequence(3, MVariant::Proof).unwrap().m, BigInt::from(2));
        let p5 = m_sequence(5, MVariant::Proof).unwrap();
        assert_eq!(p5.m, BigInt::from(16));
        // Statement variant squares the unprimed value: 4 * 1^2 = 4.
        let p5s = m_sequence(5, MVariant::Statement).unwrap();
        assert_eq!(p5s.m, BigInt::from(4));
        assert_eq!(p5.divergence, Some(5));
    }

    #[test]
    fn p7_flags_written_discrepancy() {
        let t = m_sequence(7, MVariant::Proof).unwrap();
        // 6 * 12^2 = 864 by the recurrence; the text writes 6 * 12 = 72.
        assert_eq!(t.m, BigInt::from(864));
        let step7 = t.steps.iter().find(|s| s.p == 7).unwrap();
        assert_eq!(step7.written_m, Some(BigInt::from(72)));
        assert!(t.notes.iter().any(|n| n.contains("72")));
        // Statement variant: 6 * 2^2 = 24.
        assert_eq!(m_sequence(7, MVariant::Statement).unwrap().m, BigInt::from(24));
    }

    #[test]
    fn n_values() {
        assert_eq!(n_sequence(2).unwrap().n, BigInt::from(2));
        assert_eq!(n_sequence(3).unwrap().n, BigInt::from(5));
        assert_eq!(n_sequence(5).unwrap().n, BigInt::from(17));
        assert_eq!(n_sequence(7).unwrap().n, BigInt::from(41));
    }

    #[test]
    fn n_congruence_mod_eight() {
        for p in [5u64, 7, 11, 23] {
            if let Ok(t) = n_sequence(p) {
                let r: BigInt = &t.n % 8;
                assert_eq!(r, BigInt::from(1), "N_{} = {} is not 1 mod 8", p, t.n);
            }
        }
    }

    #[test]
    fn chain_break_reported() {
        match m_sequence(13, MVariant::Proof) {
            Err(Error::ChainBreak { p, at }) => {
                assert_eq!(p, 13);
                assert_eq!(at, 6);
            }
            other => panic!("expected chain break, got {:?}", other),
        }
        assert!(n_sequence(17).is_err());
        // 11 -> 5 -> 2 works.
        assert!(m_sequence(11, MVariant::Proof).is_ok());
    }

    #[test]
    fn ledger_small_cases() {
        let l = modification_ledger(2, 1).unwrap();
        assert_eq!(l.final_pushforward.rank(), 4);
        assert_eq!(l.final_pushforward.multiplicity(0), 4);
        let l = modification_ledger(3, 2).unwrap();
        assert_eq!(l.final_pushforward.rank(), 18);
        assert!(modification_ledger(2, 0).is_err());
    }

    #[test]
    fn ledger_exhaustive_range() {
        for d in 2..=8u32 {
            for r in 1..=4u32 {
                let l = modification_ledger(d, r).unwrap();
                let total = d as u64 * d as u64 * r as u64;
                assert_eq!(l.start.rank(), total);
                for s in &l.steps {
                    assert_eq!(s.kernel.rank(), total);
                    assert_eq!(s.twisted.rank(), total);
                    assert_eq!(
                        s.kernel.multiplicity(-1),
                        (s.index as u64 + 2) * d as u64 * r as u64
                    );
                }
                assert_eq!(l.final_pushforward.multiplicity(0), total);
            }
        }
    }

    #[test]
    fn rank_bounds() {
        assert_eq!(pn_rank_bound(2, 3, 2).unwrap(), BigInt::from(6));
        assert_eq!(pn_rank_bound(3, 2, 2).unwrap(), BigInt::from(8));
        assert!(pn_rank_bound(1, 2, 1).is_err());
    }

    #[test]
    fn rank_report_routes() {
        let odd = rank_report(3, 1, None).unwrap();
        assert!(!odd.even);
        assert_eq!(odd.p, Some(3));
        assert_eq!(odd.rank_bound().unwrap(), BigInt::from(6));
        let even = rank_report(2, 3, None).unwrap();
        assert!(even.even);
        assert_eq!(even.rank_bound().unwrap(), BigInt::from(2));
        let even4 = rank_report(4, 1, None).unwrap();
        assert_eq!(even4.rank_bound().unwrap(), BigInt::from(4));
    }
}
