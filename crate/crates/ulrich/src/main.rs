//! Thin command-line front end over the library pipelines.
//!
//! Exit codes: 0 success/verified, 1 input error, 2 mathematical failure,
//! 3 budget exhausted. Identical command + seed produces identical bytes.

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;
use std::sync::Arc;
use ulrich::cohomology::{certify_ulrich, check_pushforward_trivial, CokerPresentation};
use ulrich::error::Error;
use ulrich::matfac::{
    cyclic_root, herzog_sum_mf, quadric_root, split_t_power, verify_mf, MatrixFactorization,
};
use ulrich::plane::{
    carlini_decompose, even_parity_pipeline, odd_parity_pipeline, splitting_type_p1,
    CoverDescriptor,
};
use ulrich::poly::{parse_poly, MultiPoly, VarSpec};
use ulrich::ranks::{m_sequence, modification_ledger, n_sequence, rank_report, MVariant};
use ulrich::report::{parse_json, CertificateFile};
use ulrich::veronese::build_cover_mf;

#[derive(Parser)]
#[command(
    name = "ulrich",
    about = "Exact matrix factorizations and Ulrich-bundle certificates for cyclic coverings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for randomized stages (falls back to ULRICH_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Emit machine-readable JSON instead of a text summary.
    #[arg(long)]
    json: bool,
    /// Also write the JSON payload to this file.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Factor t^d - g into matrices via the requested construction.
    Factorize {
        /// Polynomial of the shape t^d - g (t must not occur in g).
        #[arg(long)]
        poly: String,
        /// Number of factors d.
        #[arg(long)]
        d: u32,
        /// Construction: auto, cyclic, clifford or tensor.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Comma-separated variable order (default: t first, rest sorted).
        #[arg(long)]
        vars: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check the product identity of a stored factorization.
    Verify {
        /// Path to a factorization JSON file.
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Full covering certificate: rewrite, factorization, cohomology, ranks.
    Pipeline {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        /// Branch form of degree d*k in n+1 variables.
        #[arg(long)]
        branch: String,
        #[arg(long)]
        vars: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Splitting type of the pushforward of O(m) along (f0 : f1) on the line.
    Splitting {
        #[arg(long)]
        f0: String,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        m: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized exact decomposition F = F1 G1 + F2 G2.
    Decompose {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        d1: u32,
        #[arg(long)]
        d2: u32,
        #[arg(long, default_value_t = 32)]
        budget: u32,
        /// Coefficient sampling range as "lo,hi".
        #[arg(long, default_value = "-9,9")]
        coeff_range: String,
        #[command(flatten)]
        common: Common,
    },
    /// Rank recursions and the consolidated report for a covering.
    Ranks {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        /// Optional ternary branch form for the rewrite-route estimate.
        #[arg(long)]
        branch: Option<String>,
        /// Also print the m/N recursions at this prime.
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Pushforward modification ledger for degree d and input rank r.
    Ledger {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Even/odd parity pipeline certificate for a plane covering.
    Certify {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        branch: String,
        #[arg(long, default_value_t = 32)]
        budget: u32,
        #[arg(long)]
        vars: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted { .. } => 3,
        Error::Verification { .. } | Error::CommonComponent | Error::ChainBreak { .. } => 2,
        _ => 1,
    }
}

fn seed_of(c: &Common) -> u64 {
    c.seed.unwrap_or_else(|| {
        std::env::var("ULRICH_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    })
}

/// Variable spec from an explicit comma list, or inferred from the expression
/// text: `t` first when present, the rest sorted by name. Weights are 1.
fn vars_for(text: &str, explicit: &Option<String>) -> Result<Arc<VarSpec>, Error> {
    if let Some(list) = explicit {
        let names: Vec<&str> = list.split(',').map(|s| s.trim()).collect();
        return VarSpec::standard(&names);
    }
    let mut names = std::collections::BTreeSet::new();
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            cur.push(ch);
        } else {
            if !cur.is_empty()
                && cur.chars().next().unwrap().is_ascii_alphabetic()
                && cur != "zeta"
            {
                names.insert(cur.clone());
            }
            cur.clear();
        }
    }
    let mut ordered: Vec<String> = Vec::new();
    if names.contains("t") {
        ordered.push("t".to_string());
    }
    for n in &names {
        if n != "t" {
            ordered.push(n.clone());
        }
    }
    if ordered.is_empty() {
        return Err(Error::Invalid("no variables in expression".into()));
    }
    let refs: Vec<&str> = ordered.iter().map(|s| s.as_str()).collect();
    VarSpec::standard(&refs)
}

fn emit(common: &Common, payload: &serde_json::Value, text: String) -> Result<(), Error> {
    if common.json {
        println!("{}", serde_json::to_string_pretty(payload).unwrap());
    } else {
        println!("{}", text);
    }
    if let Some(path) = &common.out {
        let mut body = serde_json::to_string_pretty(payload).unwrap();
        body.push('\n');
        std::fs::write(path, body).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Factorize {
            poly,
            d,
            method,
            vars,
            common,
        } => cmd_factorize(&poly, d, &method, &vars, &common),
        Command::Verify { file, common } => cmd_verify(&file, &common),
        Command::Pipeline {
            n,
            k,
            d,
            branch,
            vars,
            common,
        } => cmd_pipeline(n, k, d, &branch, &vars, &common),
        Command::Splitting { f0, f1, m, common } => cmd_splitting(&f0, &f1, m, &common),
        Command::Decompose {
            poly,
            d1,
            d2,
            budget,
            common,
        } => cmd_decompose(&poly, d1, d2, budget, &common),
        Command::Ranks {
            d,
            k,
            branch,
            p,
            common,
        } => cmd_ranks(d, k, &branch, p, &common),
        Command::Ledger { d, r, common } => cmd_ledger(d, r, &common),
        Command::Certify {
            d,
            k,
            branch,
            budget,
            vars,
            common,
        } => cmd_certify(d, k, &branch, budget, &vars, &common),
    }
}

/// Split f = t^d - g, with t the first declared variable.
fn split_cover_shape(f: &MultiPoly, d: u32) -> Result<MultiPoly, Error> {
    let vars = f.vars();
    let mut texp = vec![0u32; vars.len()];
    texp[0] = d;
    let lead = f.coeff(&texp);
    if !lead.is_one() {
        return Err(Error::Verification {
            row: 0,
            col: 0,
            detail: format!(
                "polynomial is not of the shape {}^{} - g",
                vars.names()[0],
                d
            ),
        });
    }
    let tpow = MultiPoly::var(Arc::clone(vars), f.field_order(), 0).pow(d);
    let g = tpow.sub(f)?;
    if g.involves(&vars.names()[0]) {
        return Err(Error::Verification {
            row: 0,
            col: 0,
            detail: format!("`{}` occurs in the residual part", vars.names()[0]),
        });
    }
    Ok(g)
}

fn cmd_factorize(
    poly: &str,
    d: u32,
    method: &str,
    vars: &Option<String>,
    common: &Common,
) -> Result<u8, Error> {
    if d == 0 {
        return Err(Error::Invalid("d must be positive".into()));
    }
    let vs = vars_for(poly, vars)?;
    let f = parse_poly(poly, &vs, 1)?;
    let g = split_cover_shape(&f, d)?;
    if g.is_zero() {
        return Err(Error::Verification {
            row: 0,
            col: 0,
            detail: "residual part g is zero".into(),
        });
    }
    let gdeg = g.weighted_degree()?;
    if gdeg % d as u64 != 0 {
        return Err(Error::Verification {
            row: 0,
            col: 0,
            detail: format!("deg g = {} is not a multiple of d = {}", gdeg, d),
        });
    }
    let products = monomial_products(&g, d)?;
    let t_name = f.vars().names()[0].clone();
    let mf = match method {
        "cyclic" => {
            if products.len() != 1 {
                return Err(Error::Invalid(
                    "cyclic method needs a single-monomial residual".into(),
                ));
            }
            let root = cyclic_root(&products[0])?;
            split_t_power(&root, &t_name)?
        }
        "clifford" => {
            if d != 2 {
                return Err(Error::Invalid("clifford method is the d = 2 path".into()));
            }
            clifford_cover(&f, &products)?
        }
        "tensor" => {
            if d < 2 {
                return Err(Error::Invalid("tensor method needs d >= 2".into()));
            }
            let mut root = cyclic_root(&products[0])?;
            for p in &products[1..] {
                root = ulrich::matfac::zeta_tensor_combine(&root, &cyclic_root(p)?)?;
            }
            split_t_power(&root, &t_name)?
        }
        "auto" => {
            if d == 2 {
                let pairs: Vec<(MultiPoly, MultiPoly)> = products
                    .iter()
                    .map(|p| (p[0].clone(), p[1].clone()))
                    .collect();
                match quadric_root(&pairs) {
                    Some(root) => split_t_power(&root, &t_name)?,
                    None => clifford_cover(&f, &products)?,
                }
            } else if products.len() == 1 {
                let root = cyclic_root(&products[0])?;
                split_t_power(&root, &t_name)?
            } else {
                let mut root = cyclic_root(&products[0])?;
                for p in &products[1..] {
                    root = ulrich::matfac::zeta_tensor_combine(&root, &cyclic_root(p)?)?;
                }
                split_t_power(&root, &t_name)?
            }
        }
        other => return Err(Error::Invalid(format!("unknown method `{}`", other))),
    };
    let payload = mf.to_json();
    emit(
        common,
        &payload,
        format!(
            "verified factorization: size {}, length {}, target {}",
            mf.size(),
            mf.length(),
            mf.target()
        ),
    )?;
    Ok(0)
}

/// Monomials of g as products of d equal-degree pieces (the greedy split of
/// each exponent vector), coefficient on the first piece.
fn monomial_products(g: &MultiPoly, d: u32) -> Result<Vec<Vec<MultiPoly>>, Error> {
    let vars = Arc::clone(g.vars());
    let field_d = g.field_order();
    let deg = g.weighted_degree()?;
    let k = (deg / d as u64) as u32;
    let mut out = Vec::new();
    for (exp, coeff) in g.sorted_terms() {
        let mut rem = exp.clone();
        let mut forms = Vec::new();
        for _ in 0..d {
            let mut part = vec![0u32; rem.len()];
            let mut need = k;
            for i in 0..rem.len() {
                let take = rem[i].min(need);
                part[i] = take;
                rem[i] -= take;
                need -= take;
                if need == 0 {
                    break;
                }
            }
            forms.push(MultiPoly::monomial(
                Arc::clone(&vars),
                field_d,
                part,
                ulrich::field::FieldElement::one(field_d),
            ));
        }
        forms[0] = forms[0].scale(coeff);
        out.push(forms);
    }
    Ok(out)
}

fn clifford_cover(
    f: &MultiPoly,
    products: &[Vec<MultiPoly>],
) -> Result<MatrixFactorization, Error> {
    // t^2 - g as the summand (t, t) plus the negated products of g.
    let t = MultiPoly::var(Arc::clone(f.vars()), f.field_order(), 0);
    let mut summands = vec![vec![t.clone(), t]];
    for p in products {
        let mut forms = p.clone();
        forms[0] = forms[0].neg();
        summands.push(forms);
    }
    Ok(herzog_sum_mf(&summands, 2)?.mf)
}

fn cmd_verify(file: &str, common: &Common) -> Result<u8, Error> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Json(e.to_string()))?;
    let value = parse_json(&text)?;
    let mf = MatrixFactorization::from_json(&value)?;
    let report = verify_mf(&mf)?;
    if report.ok {
        emit(
            common,
            &serde_json::json!({"verified": true, "size": mf.size(), "length": mf.length()}),
            format!(
                "verified: product of {} factors equals target * Id ({} x {})",
                mf.length(),
                mf.size(),
                mf.size()
            ),
        )?;
        Ok(0)
    } else {
        let m = report.first_mismatch.unwrap();
        emit(
            common,
            &serde_json::json!({
                "verified": false,
                "row": m.row,
                "col": m.col,
                "expected": m.expected,
                "found": m.found,
            }),
            format!(
                "verification FAILED at entry ({}, {}): expected {}, found {}",
                m.row, m.col, m.expected, m.found
            ),
        )?;
        Ok(2)
    }
}

fn cmd_pipeline(
    n: u32,
    k: u32,
    d: u32,
    branch: &str,
    vars: &Option<String>,
    common: &Common,
) -> Result<u8, Error> {
    let seed = seed_of(common);
    let vs = vars_for(branch, vars)?;
    let g = parse_poly(branch, &vs, 1)?;
    if !g.is_homogeneous() || g.is_zero() {
        return Err(Error::NotHomogeneous);
    }
    let pipe = build_cover_mf(n, k, d, &g)?;
    let mut cert = CertificateFile::new(
        "pipeline",
        serde_json::json!({"n": n, "k": k, "d": d, "branch": branch}),
        seed,
    );
    cert.check(
        "rewrite-substitution",
        true,
        "g' pulls back to g exactly".to_string(),
    );
    cert.check(
        "factorization",
        pipe.mf.verified(),
        format!(
            "size {} over Q(zeta_{})",
            pipe.mf.size(),
            pipe.mf.factor(0).field_order()
        ),
    );
    // Cohomological certification of each split factor.
    let dim_x = (pipe.mf.factor(0).vars().len() - 2) as u32;
    let mut coker_reports = Vec::new();
    for i in 0..pipe.mf.length() {
        let pres = CokerPresentation::from_mf_factor(&pipe.mf, i, dim_x)?;
        let ucert = certify_ulrich(&pres, dim_x, None)?;
        let push = check_pushforward_trivial(&pres)?;
        cert.check(
            format!("factor-{}-vanishing", i),
            ucert.d2,
            format!("D2 over window [{}, {}]", ucert.window.0, ucert.window.1),
        );
        cert.check(
            format!("factor-{}-pushforward", i),
            push.trivial,
            format!("trivial of rank {}", push.rank),
        );
        cert.check(
            format!("factor-{}-euler", i),
            ucert.table.euler_consistent(),
            "alternating sums match the sheaf Euler characteristic",
        );
        coker_reports.push(ucert.to_json());
    }
    let ranks = rank_report(d, k, Some(&g))?;
    cert.result = serde_json::json!({
        "cover": pipe.report_json(n, k, d),
        "factorization": pipe.mf.to_json(),
        "cohomology": coker_reports,
        "ranks": ranks.to_json(),
    });
    let ok = cert.all_passed();
    let text = format!(
        "covering certificate: size {} factorization of t^{} - g' (s = {}, route {});\nall checks passed: {}",
        pipe.achieved_size, d, pipe.s, pipe.route, ok
    );
    let payload = cert.to_json();
    emit(common, &payload, text)?;
    Ok(if ok { 0 } else { 2 })
}

fn cmd_splitting(f0: &str, f1: &str, m: i64, common: &Common) -> Result<u8, Error> {
    let vs = vars_for(&format!("{} {}", f0, f1), &None)?;
    let p0 = parse_poly(f0, &vs, 1)?;
    let p1 = parse_poly(f1, &vs, 1)?;
    let st = splitting_type_p1(&p0, &p1, m)?;
    emit(
        common,
        &serde_json::json!({
            "m": m,
            "parts": st.parts(),
            "trivial": st.is_trivial(),
        }),
        format!("pushforward of O({}) splits as {}", m, st),
    )?;
    Ok(0)
}

fn cmd_decompose(
    poly: &str,
    d1: u32,
    d2: u32,
    budget: u32,
    common: &Common,
) -> Result<u8, Error> {
    let seed = seed_of(common);
    let vs = vars_for(poly, &None)?;
    let f = parse_poly(poly, &vs, 1)?;
    let dec = carlini_decompose(&f, d1, d2, seed, budget)?;
    let mut cert = CertificateFile::new(
        "decompose",
        serde_json::json!({"poly": poly, "d1": d1, "d2": d2, "budget": budget}),
        seed,
    );
    cert.check("identity", dec.verify(), "F = F1 G1 + F2 G2 exactly");
    cert.result = dec.to_json();
    let text = format!(
        "decomposed after {} attempts:\n  F1 = {}\n  G1 = {}\n  F2 = {}\n  G2 = {}",
        dec.attempts, dec.f1, dec.g1, dec.f2, dec.g2
    );
    let payload = cert.to_json();
    emit(common, &payload, text)?;
    Ok(0)
}

fn cmd_ranks(
    d: u32,
    k: u32,
    branch: &Option<String>,
    p: Option<u64>,
    common: &Common,
) -> Result<u8, Error> {
    let parsed;
    let branch_poly = match branch {
        Some(text) => {
            let vs = vars_for(text, &None)?;
            parsed = parse_poly(text, &vs, 1)?;
            Some(&parsed)
        }
        None => None,
    };
    let report = rank_report(d, k, branch_poly)?;
    let mut payload = report.to_json();
    if let Some(prime) = p {
        payload["m_at_p"] = m_sequence(prime, MVariant::Proof)?.to_json();
        payload["m_at_p_statement"] = m_sequence(prime, MVariant::Statement)?.to_json();
        payload["n_at_p"] = n_sequence(prime)?.to_json();
    }
    let text = format!(
        "d = {}, k = {}, branch degree {} ({}): rank bound {}",
        d,
        k,
        report.dk,
        if report.even { "even" } else { "odd" },
        report
            .rank_bound()
            .map(|b| b.to_string())
            .unwrap_or_else(|| "unavailable (chain break)".into())
    );
    emit(common, &payload, text)?;
    Ok(0)
}

fn cmd_ledger(d: u32, r: u32, common: &Common) -> Result<u8, Error> {
    let ledger = modification_ledger(d, r)?;
    let mut lines = vec![format!("start: {}", ledger.start)];
    for s in &ledger.steps {
        lines.push(format!(
            "step {}: kernel {} -> twisted {}",
            s.index, s.kernel, s.twisted
        ));
    }
    lines.push(format!("final pushforward: {}", ledger.final_pushforward));
    emit(common, &ledger.to_json(), lines.join("\n"))?;
    Ok(0)
}

fn cmd_certify(
    d: u32,
    k: u32,
    branch: &str,
    budget: u32,
    vars: &Option<String>,
    common: &Common,
) -> Result<u8, Error> {
    let seed = seed_of(common);
    let vs = vars_for(branch, vars)?;
    let g = parse_poly(branch, &vs, 1)?;
    let cov = CoverDescriptor::new(2, d, k, g)?;
    let dk = d as u64 * k as u64;
    let result = if dk % 2 == 0 {
        even_parity_pipeline(&cov, seed, budget)?
    } else {
        odd_parity_pipeline(&cov, seed, budget)?
    };
    let mut cert = CertificateFile::new(
        "certify",
        serde_json::json!({"d": d, "k": k, "branch": branch, "budget": budget}),
        seed,
    );
    cert.check(
        "pipeline",
        result.success,
        format!("{} parity run, {} attempts", result.pipeline, result.attempts),
    );
    cert.result = result.to_json();
    let text = format!(
        "{} pipeline: success = {}, rank bound = {}\ntrace:\n  {}",
        result.pipeline,
        result.success,
        result
            .rank_bound
            .as_ref()
            .map(|r| r.to_string())
            .unwrap_or_else(|| "-".into()),
        result.trace.join("\n  ")
    );
    let success = result.success;
    let payload = cert.to_json();
    emit(common, &payload, text)?;
    Ok(if success { 0 } else { 3 })
}
