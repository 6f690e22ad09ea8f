//! Sparse multivariate polynomials over Q(zeta_D) with weighted gradings.
//!
//! Monomials are exponent vectors against an ordered, weighted variable
//! specification. The canonical term order is graded lexicographic: compare
//! weighted degree first, then the exponent vector lexicographically in the
//! declared variable order. All arithmetic is exact.

use crate::error::{Error, Result};
use crate::field::{cyclotomic_degree, FieldElement, Rat};
use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};
use rand::Rng;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Ordered variable names with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSpec {
    names: Vec<String>,
    weights: Vec<u32>,
}

impl VarSpec {
    pub fn new(names: &[&str], weights: &[u32]) -> Result<Arc<VarSpec>> {
        if names.len() != weights.len() {
            return Err(Error::Invalid("names/weights length mismatch".into()));
        }
        if names.is_empty() {
            return Err(Error::Invalid("empty variable list".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate variable `{}`", n)));
            }
            if n.is_empty() || !n.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::Invalid(format!("bad variable name `{}`", n)));
            }
            if *n == "zeta" {
                return Err(Error::Invalid("`zeta` is reserved".into()));
            }
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::Invalid("weights must be >= 1".into()));
        }
        Ok(Arc::new(VarSpec {
            names: names.iter().map(|s| s.to_string()).collect(),
            weights: weights.to_vec(),
        }))
    }

    /// All weights one.
    pub fn standard(names: &[&str]) -> Result<Arc<VarSpec>> {
        let w = vec![1u32; names.len()];
        VarSpec::new(names, &w)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Weighted degree of an exponent vector.
    pub fn weighted_degree(&self, exps: &[u32]) -> u64 {
        exps.iter()
            .zip(&self.weights)
            .map(|(&e, &w)| e as u64 * w as u64)
            .sum()
    }
}

/// Graded-lex comparison of exponent vectors under a spec (larger = later in
/// descending canonical order -> we sort with reverse of this).
pub fn graded_lex_cmp(spec: &VarSpec, a: &[u32], b: &[u32]) -> Ordering {
    let da = spec.weighted_degree(a);
    let db = spec.weighted_degree(b);
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// A sparse polynomial: exponent vector -> nonzero coefficient.
#[derive(Clone)]
pub struct MultiPoly {
    vars: Arc<VarSpec>,
    field_d: u32,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        *self.vars == *other.vars && self.field_d == other.field_d && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(vars: Arc<VarSpec>, field_d: u32) -> Self {
        MultiPoly {
            vars,
            field_d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Arc<VarSpec>, field_d: u32, value: FieldElement) -> Self {
        let value = value.promote(field_d);
        let mut p = MultiPoly::zero(vars, field_d);
        if !value.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], value);
        }
        p
    }

    pub fn one(vars: Arc<VarSpec>, field_d: u32) -> Self {
        let e = FieldElement::one(field_d);
        MultiPoly::constant(vars, field_d, e)
    }

    pub fn var(vars: Arc<VarSpec>, field_d: u32, index: usize) -> Self {
        assert!(index < vars.len());
        let mut exps = vec![0u32; vars.len()];
        exps[index] = 1;
        MultiPoly::monomial(vars, field_d, exps, FieldElement::one(field_d))
    }

    pub fn monomial(
        vars: Arc<VarSpec>,
        field_d: u32,
        exps: Vec<u32>,
        coeff: FieldElement,
    ) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let coeff = coeff.promote(field_d);
        let mut p = MultiPoly::zero(vars, field_d);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarSpec> {
        &self.vars
    }

    pub fn field_order(&self) -> u32 {
        self.field_d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldElement {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(self.field_d))
    }

    /// Terms in descending graded-lex order (the canonical presentation).
    pub fn sorted_terms(&self) -> Vec<(&Vec<u32>, &FieldElement)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|(a, _), (b, _)| graded_lex_cmp(&self.vars, b, a));
        t
    }

    /// Leading term under graded-lex, None for the zero polynomial.
    pub fn leading_term(&self) -> Option<(&Vec<u32>, &FieldElement)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| graded_lex_cmp(&self.vars, a, b))
    }

    /// Promote the coefficient field to Q(zeta_to); current order must divide `to`.
    pub fn promote_field(&self, to: u32) -> MultiPoly {
        if to == self.field_d {
            return self.clone();
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.clone(), c.promote(to));
        }
        MultiPoly {
            vars: Arc::clone(&self.vars),
            field_d: to,
            terms,
        }
    }

    fn unified(&self, other: &Self) -> Result<(MultiPoly, MultiPoly)> {
        if *self.vars != *other.vars {
            return Err(Error::VarSpecMismatch);
        }
        let d = num::integer::lcm(self.field_d, other.field_d);
        Ok((self.promote_field(d), other.promote_field(d)))
    }

    fn insert_term(&mut self, exps: Vec<u32>, coeff: FieldElement) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                let s = c.add(&coeff);
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(exps, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<MultiPoly> {
        let (mut a, b) = self.unified(other)?;
        for (e, c) in b.terms {
            a.insert_term(e, c);
        }
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<MultiPoly> {
        let (a, b) = self.unified(other)?;
        let mut out = MultiPoly::zero(Arc::clone(&a.vars), a.field_d);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_term(exps, ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElement) -> MultiPoly {
        let d = num::integer::lcm(self.field_d, c.field_order());
        let c = c.promote(d);
        let mut out = MultiPoly::zero(Arc::clone(&self.vars), d);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a.promote(d).mul(&c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(Arc::clone(&self.vars), self.field_d);
        for _ in 0..e {
            acc = acc.mul(self).expect("same spec");
        }
        acc
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| self.vars.weighted_degree(e));
        match degrees.next() {
            None => true,
            Some(d0) => degrees.all(|d| d == d0),
        }
    }

    /// Weighted degree of a nonzero homogeneous polynomial.
    pub fn weighted_degree(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(self
            .vars
            .weighted_degree(self.terms.keys().next().unwrap()))
    }

    /// Largest weighted degree over the terms (0 for the zero polynomial).
    pub fn max_weighted_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(|e| self.vars.weighted_degree(e))
            .max()
            .unwrap_or(0)
    }

    /// Formal partial derivative with respect to the named variable.
    pub fn partial_derivative(&self, var: &str) -> Result<MultiPoly> {
        let i = self
            .vars
            .index_of(var)
            .ok_or_else(|| Error::UndeclaredVariable(var.to_string()))?;
        let mut out = MultiPoly::zero(Arc::clone(&self.vars), self.field_d);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            let factor = FieldElement::from_int(self.field_d, e[i] as i64);
            out.insert_term(e2, c.mul(&factor));
        }
        Ok(out)
    }

    /// Ring-homomorphic substitution: variable i is replaced by `images[i]`.
    /// All images must share one variable spec.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.vars.len() {
            return Err(Error::Invalid(format!(
                "expected {} substitution images, got {}",
                self.vars.len(),
                images.len()
            )));
        }
        let tvars = Arc::clone(images[0].vars());
        let mut d = self.field_d;
        for im in images {
            if **im.vars() != *tvars {
                return Err(Error::VarSpecMismatch);
            }
            d = num::integer::lcm(d, im.field_order());
        }
        let mut out = MultiPoly::zero(Arc::clone(&tvars), d);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(Arc::clone(&tvars), d, c.promote(d));
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&images[i].pow(exp))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Re-express over a larger variable spec; every current variable must
    /// appear (by name) in the target.
    pub fn embed(&self, target: &Arc<VarSpec>) -> Result<MultiPoly> {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| {
                target
                    .index_of(n)
                    .ok_or_else(|| Error::UndeclaredVariable(n.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = MultiPoly::zero(Arc::clone(target), self.field_d);
        for (e, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &exp) in e.iter().enumerate() {
                exps[map[i]] = exp;
            }
            out.terms.insert(exps, c.clone());
        }
        Ok(out)
    }

    /// Exact division: returns q with self = q * g, or an error when the
    /// division is not exact. Division is performed against the graded-lex
    /// leading term of `g`.
    pub fn exact_div(&self, g: &Self) -> Result<MultiPoly> {
        let (mut rem, g) = self.unified(g)?;
        if g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (lt_e, lt_c) = {
            let (e, c) = g.leading_term().unwrap();
            (e.clone(), c.clone())
        };
        let mut quot = MultiPoly::zero(Arc::clone(&rem.vars), rem.field_d);
        while !rem.is_zero() {
            let (re, rc) = {
                let (e, c) = rem.leading_term().unwrap();
                (e.clone(), c.clone())
            };
            if re.iter().zip(&lt_e).any(|(a, b)| a < b) {
                return Err(Error::Degree("non-exact polynomial division".into()));
            }
            let qe: Vec<u32> = re.iter().zip(&lt_e).map(|(a, b)| a - b).collect();
            let qc = rc.div(&lt_c);
            let qterm = MultiPoly::monomial(Arc::clone(&rem.vars), rem.field_d, qe, qc);
            rem = rem.sub(&qterm.mul(&g)?)?;
            quot = quot.add(&qterm)?;
        }
        Ok(quot)
    }

    /// Exact evaluation at a point (one value per variable).
    pub fn evaluate(&self, values: &[FieldElement]) -> FieldElement {
        assert_eq!(values.len(), self.vars.len(), "evaluation point arity");
        let d = values
            .iter()
            .map(|v| v.field_order())
            .fold(self.field_d, num::integer::lcm);
        let mut acc = FieldElement::zero(d);
        for (e, c) in &self.terms {
            let mut term = c.promote(d);
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&values[i].promote(d).pow(exp as u64));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Support check: does the named variable occur in any term?
    pub fn involves(&self, var: &str) -> bool {
        match self.vars.index_of(var) {
            None => false,
            Some(i) => self.terms.keys().any(|e| e[i] > 0),
        }
    }
}

/// All exponent vectors of the given total degree in `nvars` variables,
/// in descending lexicographic order (so x^k comes first).
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if nvars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            rec(nvars - 1, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(nvars, degree, &mut Vec::new(), &mut out);
    out
}

/// Uniformly random homogeneous polynomial of the given weighted degree with
/// integer coefficients in [lo, hi].
pub fn random_homogeneous<R: Rng>(
    vars: &Arc<VarSpec>,
    field_d: u32,
    degree: u32,
    rng: &mut R,
    lo: i64,
    hi: i64,
) -> MultiPoly {
    let mut p = MultiPoly::zero(Arc::clone(vars), field_d);
    if vars.weights().iter().any(|&w| w != 1) {
        // Weighted sampling: enumerate all exponent vectors of weighted degree.
        for e in monomials_of_weighted_degree(vars, degree as u64) {
            let c = rng.gen_range(lo..=hi);
            p.insert_term(e, FieldElement::from_int(field_d, c));
        }
        return p;
    }
    for e in monomials_of_degree(vars.len(), degree) {
        let c = rng.gen_range(lo..=hi);
        p.insert_term(e, FieldElement::from_int(field_d, c));
    }
    p
}

/// Exponent vectors of a given weighted degree.
pub fn monomials_of_weighted_degree(vars: &Arc<VarSpec>, degree: u64) -> Vec<Vec<u32>> {
    fn rec(
        weights: &[u32],
        degree: u64,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if weights.is_empty() {
            if degree == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let w = weights[0] as u64;
        let max = degree / w;
        for e in (0..=max).rev() {
            prefix.push(e as u32);
            rec(&weights[1..], degree - e * w, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars.weights(), degree, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(Rat),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' | '·' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = chars[start..i].iter().collect();
                let mut den = String::from("1");
                if i < chars.len() && chars[i] == '/' {
                    i += 1;
                    let dstart = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(Error::Parse("missing denominator after `/`".into()));
                    }
                    den = chars[dstart..i].iter().collect();
                }
                let n = BigInt::from_str(&num).map_err(|e| Error::Parse(e.to_string()))?;
                let d = BigInt::from_str(&den).map_err(|e| Error::Parse(e.to_string()))?;
                if d.is_zero() {
                    return Err(Error::Parse("zero denominator".into()));
                }
                out.push(Token::Number(Rat::new(n, d)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::Parse(format!("unexpected character `{}`", c))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a Arc<VarSpec>,
    field_d: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Token::Number(r)) => {
                    if !r.is_integer() || r.is_negative() {
                        return Err(Error::Parse("exponent must be a non-negative integer".into()));
                    }
                    let e: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("expected integer exponent after `^`".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.next() {
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing `)`".into())),
                }
            }
            Some(Token::Number(r)) => Ok(MultiPoly::constant(
                Arc::clone(self.vars),
                self.field_d,
                FieldElement::from_rat(self.field_d, r),
            )),
            Some(Token::Ident(name)) => {
                if name == "zeta" {
                    if self.field_d <= 1 {
                        return Err(Error::ZetaUnavailable);
                    }
                    return Ok(MultiPoly::constant(
                        Arc::clone(self.vars),
                        self.field_d,
                        FieldElement::zeta(self.field_d),
                    ));
                }
                match self.vars.index_of(&name) {
                    Some(i) => Ok(MultiPoly::var(Arc::clone(self.vars), self.field_d, i)),
                    None => Err(Error::UndeclaredVariable(name)),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

/// Parse a +/-/*/^ expression over the declared variables. `zeta` denotes the
/// primitive root of unity when `field_d > 1`.
pub fn parse_poly(text: &str, vars: &Arc<VarSpec>, field_d: u32) -> Result<MultiPoly> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
        field_d,
    };
    let poly = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(poly)
}

// ---------------------------------------------------------------------------
// Rendering and JSON
// ---------------------------------------------------------------------------

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms() {
            let mono = render_monomial(&self.vars, e);
            let (sign, body) = render_coeff(c, &mono);
            if first {
                if sign < 0 {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
                first = false;
            } else if sign < 0 {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn render_monomial(vars: &VarSpec, exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars.names()[i].clone()),
            _ => parts.push(format!("{}^{}", vars.names()[i], e)),
        }
    }
    parts.join("*")
}

/// Returns (sign, rendered-term) where sign applies to the whole term.
fn render_coeff(c: &FieldElement, mono: &str) -> (i32, String) {
    if let Some(r) = c.as_rational() {
        let sign = if r.is_negative() { -1 } else { 1 };
        let mag = r.abs();
        if mono.is_empty() {
            return (sign, format!("{}", mag));
        }
        if mag.is_one() {
            return (sign, mono.to_string());
        }
        return (sign, format!("{}*{}", mag, mono));
    }
    // Composite cyclotomic coefficient: keep it parenthesized.
    if mono.is_empty() {
        (1, format!("({})", c))
    } else {
        (1, format!("({})*{}", c, mono))
    }
}

impl MultiPoly {
    /// JSON presentation:
    /// `{"vars": [...], "weights": [...], "D": d, "terms": [{"exp": [...], "coeff": [[num, den], ...]}]}`
    /// with numerators/denominators as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let coeff: Vec<serde_json::Value> = c
                    .coords()
                    .iter()
                    .map(|r| {
                        serde_json::json!([r.numer().to_string(), r.denom().to_string()])
                    })
                    .collect();
                serde_json::json!({ "exp": e, "coeff": coeff })
            })
            .collect();
        serde_json::json!({
            "vars": self.vars.names(),
            "weights": self.vars.weights(),
            "D": self.field_d,
            "terms": terms,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<MultiPoly> {
        let names: Vec<String> = as_string_array(v.get("vars"), "vars")?;
        let weights: Vec<u32> = as_u32_array(v.get("weights"), "weights")?;
        let d = v
            .get("D")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Json("missing D".into()))? as u32;
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let vars = VarSpec::new(&name_refs, &weights)?;
        let mut poly = MultiPoly::zero(vars, d);
        let terms = v
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Json("missing terms".into()))?;
        for t in terms {
            let exp: Vec<u32> = as_u32_array(t.get("exp"), "exp")?;
            if exp.len() != poly.vars.len() {
                return Err(Error::Json("exponent vector length".into()));
            }
            let coords_json = t
                .get("coeff")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Json("missing coeff".into()))?;
            if coords_json.len() != cyclotomic_degree(d) {
                return Err(Error::Json("coefficient vector length".into()));
            }
            let mut coords = Vec::new();
            for pair in coords_json {
                let arr = pair
                    .as_array()
                    .ok_or_else(|| Error::Json("coeff entry must be [num, den]".into()))?;
                if arr.len() != 2 {
                    return Err(Error::Json("coeff entry must be [num, den]".into()));
                }
                coords.push(Rat::new(json_bigint(&arr[0])?, json_bigint(&arr[1])?));
            }
            poly.insert_term(exp, FieldElement::from_coords(d, coords));
        }
        Ok(poly)
    }
}

fn json_bigint(v: &serde_json::Value) -> Result<BigInt> {
    if let Some(s) = v.as_str() {
        return BigInt::from_str(s).map_err(|e| Error::Json(e.to_string()));
    }
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    Err(Error::Json("expected integer or decimal string".into()))
}

fn as_string_array(v: Option<&serde_json::Value>, what: &str) -> Result<Vec<String>> {
    v.and_then(|x| x.as_array())
        .ok_or_else(|| Error::Json(format!("missing {}", what)))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(|s| s.to_string())
                .ok_or_else(|| Error::Json(format!("bad {} entry", what)))
        })
        .collect()
}

fn as_u32_array(v: Option<&serde_json::Value>, what: &str) -> Result<Vec<u32>> {
    v.and_then(|x| x.as_array())
        .ok_or_else(|| Error::Json(format!("missing {}", what)))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|n| n as u32)
                .ok_or_else(|| Error::Json(format!("bad {} entry", what)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat_int;

    fn txyz() -> Arc<VarSpec> {
        VarSpec::standard(&["t", "x", "y", "z"]).unwrap()
    }

    #[test]
    fn parse_cubic_two_terms() {
        let p = parse_poly("t^3 - x*y*z", &txyz(), 1).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.weighted_degree().unwrap(), 3);
    }

    #[test]
    fn parse_legendre_form_expands() {
        // lambda = 2 member of the y^2 z + x(x-z)(x-lambda z) family.
        let vars = VarSpec::standard(&["x", "y", "z"]).unwrap();
        let p = parse_poly("y^2*z + x*(x-z)*(x-2*z)", &vars, 1).unwrap();
        // x^3 - 3x^2 z + 2x z^2 + y^2 z
        assert_eq!(p.num_terms(), 4);
        assert!(p.is_homogeneous());
        assert_eq!(p.weighted_degree().unwrap(), 3);
        let q = parse_poly("x^3 - 3*x^2*z + 2*x*z^2 + y^2*z", &vars, 1).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn undeclared_variable_rejected() {
        let err = parse_poly("x + q", &txyz(), 1).unwrap_err();
        assert_eq!(err, Error::UndeclaredVariable("q".into()));
    }

    #[test]
    fn zeta_requires_extension() {
        assert_eq!(
            parse_poly("x + zeta", &txyz(), 1).unwrap_err(),
            Error::ZetaUnavailable
        );
        let p = parse_poly("zeta^2 + zeta + 1", &txyz(), 3).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let vars = VarSpec::standard(&["x", "y"]).unwrap();
        let a = parse_poly("(x+y)*(x-y)", &vars, 1).unwrap();
        let b = parse_poly("x^2 - y^2", &vars, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_multiplication_empties_terms() {
        let vars = VarSpec::standard(&["x", "y"]).unwrap();
        let x = MultiPoly::var(Arc::clone(&vars), 1, 0);
        let z = MultiPoly::zero(Arc::clone(&vars), 1);
        assert!(x.mul(&z).unwrap().is_zero());
        assert_eq!(x.mul(&z).unwrap().num_terms(), 0);
    }

    #[test]
    fn weighted_degrees() {
        // weight(t) = k = 2, g of degree d*k = 6, t^d - g with d = 3.
        let vars = VarSpec::new(&["t", "x", "y", "z"], &[2, 1, 1, 1]).unwrap();
        let p = parse_poly("t^3 - x^6 + y^3*z^3", &vars, 1).unwrap();
        assert!(p.is_homogeneous());
        assert_eq!(p.weighted_degree().unwrap(), 6);
    }

    #[test]
    fn derivative_leibniz_instance() {
        let vars = VarSpec::standard(&["x", "y", "z"]).unwrap();
        let p = parse_poly("y^2*z", &vars, 1).unwrap();
        let dy = p.partial_derivative("y").unwrap();
        assert_eq!(dy, parse_poly("2*y*z", &vars, 1).unwrap());
    }

    #[test]
    fn substitution_is_homomorphic() {
        let zvars = VarSpec::standard(&["u", "v"]).unwrap();
        let xvars = VarSpec::standard(&["x", "y"]).unwrap();
        let p = parse_poly("u^2 - u*v", &zvars, 1).unwrap();
        let ix = parse_poly("x + y", &xvars, 1).unwrap();
        let iy = parse_poly("x - y", &xvars, 1).unwrap();
        let s = p.substitute(&[ix.clone(), iy.clone()]).unwrap();
        let direct = ix.mul(&ix).unwrap().sub(&ix.mul(&iy).unwrap()).unwrap();
        assert_eq!(s, direct);
    }

    #[test]
    fn render_parse_round_trip() {
        let vars = VarSpec::standard(&["x", "y", "z"]).unwrap();
        let p = parse_poly("3*x^2 - 1/2*y*z + z^2 - 7", &vars, 1).unwrap();
        let back = parse_poly(&p.to_string(), &vars, 1).unwrap();
        assert_eq!(p, back);
        // With cyclotomic coefficients.
        let q = parse_poly("(1 + zeta)*x - zeta^2*y", &vars, 3).unwrap();
        let back = parse_poly(&q.to_string(), &vars, 3).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn json_round_trip() {
        let vars = VarSpec::new(&["t", "x"], &[3, 1]).unwrap();
        let p = parse_poly("t - x^3", &vars, 4).unwrap();
        let j = p.to_json();
        let back = MultiPoly::from_json(&j).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn monomial_basis_counts() {
        assert_eq!(monomials_of_degree(3, 1).len(), 3);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(4, 2).len(), 10);
        // Graded-lex order: pure power of the first variable first.
        assert_eq!(monomials_of_degree(3, 2)[0], vec![2, 0, 0]);
        assert_eq!(monomials_of_degree(3, 2)[5], vec![0, 0, 2]);
    }

    #[test]
    fn exact_division() {
        let vars = VarSpec::standard(&["x", "y"]).unwrap();
        let a = parse_poly("x^2 - y^2", &vars, 1).unwrap();
        let b = parse_poly("x - y", &vars, 1).unwrap();
        let q = a.exact_div(&b).unwrap();
        assert_eq!(q, parse_poly("x + y", &vars, 1).unwrap());
        let bad = parse_poly("x + 2*y", &vars, 1).unwrap();
        assert!(a.exact_div(&bad).is_err());
    }

    #[test]
    fn scale_and_field_promotion() {
        let vars = VarSpec::standard(&["x"]).unwrap();
        let x = MultiPoly::var(Arc::clone(&vars), 1, 0);
        let zx = x.scale(&FieldElement::zeta(3));
        assert_eq!(zx.field_order(), 3);
        let sum = zx
            .add(&x.scale(&FieldElement::zeta(3).pow(2)))
            .unwrap()
            .add(&x.promote_field(3))
            .unwrap();
        assert!(sum.is_zero());
        let _ = rat_int(0);
    }
}
