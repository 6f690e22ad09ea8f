//! Matrix factorizations and matrix d-th roots of homogeneous polynomials.
//!
//! A factorization of f is an ordered tuple of square polynomial matrices
//! whose product is f times the identity; a root is a single matrix M with
//! M^d = g * Id. Constructors here only return objects whose defining identity
//! has been checked symbolically, entry by entry.

use crate::error::{Error, Result};
use crate::field::{rational_sqrt, FieldElement, Rat};
use crate::matrix::PolyMatrix;
use crate::poly::{MultiPoly, VarSpec};
use std::sync::Arc;

/// Ordered factors with product equal to `target * Id`.
#[derive(Clone, Debug)]
pub struct MatrixFactorization {
    factors: Vec<PolyMatrix>,
    target: MultiPoly,
    verified: bool,
    construction: String,
}

/// A single matrix M with M^exponent = target * Id.
#[derive(Clone, Debug)]
pub struct MatrixRoot {
    matrix: PolyMatrix,
    exponent: u32,
    target: MultiPoly,
    verified: bool,
    construction: String,
}

/// Outcome of an identity check, with the first offending entry when it fails.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub ok: bool,
    pub first_mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

impl MatrixFactorization {
    /// Build and verify. The factors must be square, of one size, over one spec.
    pub fn new(
        factors: Vec<PolyMatrix>,
        target: MultiPoly,
        construction: impl Into<String>,
    ) -> Result<MatrixFactorization> {
        let mut mf = MatrixFactorization {
            factors,
            target,
            verified: false,
            construction: construction.into(),
        };
        let report = verify_mf(&mf)?;
        if !report.ok {
            let m = report.first_mismatch.unwrap();
            return Err(Error::Verification {
                row: m.row,
                col: m.col,
                detail: format!("expected {}, found {}", m.expected, m.found),
            });
        }
        mf.verified = true;
        Ok(mf)
    }

    /// Build without checking (deserialization and constructions whose
    /// identity was already established).
    pub fn new_unchecked(
        factors: Vec<PolyMatrix>,
        target: MultiPoly,
        verified: bool,
        construction: impl Into<String>,
    ) -> MatrixFactorization {
        MatrixFactorization {
            factors,
            target,
            verified,
            construction: construction.into(),
        }
    }

    pub fn size(&self) -> usize {
        self.factors[0].rows()
    }

    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[PolyMatrix] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &PolyMatrix {
        &self.factors[i]
    }

    pub fn target(&self) -> &MultiPoly {
        &self.target
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn construction(&self) -> &str {
        &self.construction
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "size": self.size(),
            "length": self.length(),
            "target": self.target.to_json(),
            "factors": self.factors.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            "verified": self.verified,
            "construction": self.construction,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<MatrixFactorization> {
        let target = MultiPoly::from_json(
            v.get("target").ok_or_else(|| Error::Json("missing target".into()))?,
        )?;
        let factors_json = v
            .get("factors")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Json("missing factors".into()))?;
        if factors_json.is_empty() {
            return Err(Error::Json("empty factor list".into()));
        }
        let factors: Vec<PolyMatrix> = factors_json
            .iter()
            .map(PolyMatrix::from_json)
            .collect::<Result<_>>()?;
        let verified = v.get("verified").and_then(|x| x.as_bool()).unwrap_or(false);
        let construction = v
            .get("construction")
            .and_then(|x| x.as_str())
            .unwrap_or("")
            .to_string();
        Ok(MatrixFactorization {
            factors,
            target,
            verified,
            construction,
        })
    }
}

impl MatrixRoot {
    pub fn new(
        matrix: PolyMatrix,
        exponent: u32,
        target: MultiPoly,
        construction: impl Into<String>,
    ) -> Result<MatrixRoot> {
        let mut root = MatrixRoot {
            matrix,
            exponent,
            target,
            verified: false,
            construction: construction.into(),
        };
        let report = root.verify()?;
        if !report.ok {
            let m = report.first_mismatch.unwrap();
            return Err(Error::Verification {
                row: m.row,
                col: m.col,
                detail: format!("expected {}, found {}", m.expected, m.found),
            });
        }
        root.verified = true;
        Ok(root)
    }

    /// Check M^d = target * Id entry by entry.
    pub fn verify(&self) -> Result<VerifyReport> {
        if !self.matrix.is_square() {
            return Err(Error::ShapeMismatch("root matrix must be square".into()));
        }
        let power = self.matrix.pow(self.exponent)?;
        compare_to_scalar(&power, &self.target)
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn target(&self) -> &MultiPoly {
        &self.target
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn construction(&self) -> &str {
        &self.construction
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "size": self.size(),
            "exponent": self.exponent,
            "target": self.target.to_json(),
            "matrix": self.matrix.to_json(),
            "verified": self.verified,
            "construction": self.construction,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<MatrixRoot> {
        let target = MultiPoly::from_json(
            v.get("target").ok_or_else(|| Error::Json("missing target".into()))?,
        )?;
        let matrix = PolyMatrix::from_json(
            v.get("matrix").ok_or_else(|| Error::Json("missing matrix".into()))?,
        )?;
        let exponent = v
            .get("exponent")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Json("missing exponent".into()))? as u32;
        let verified = v.get("verified").and_then(|x| x.as_bool()).unwrap_or(false);
        let construction = v
            .get("construction")
            .and_then(|x| x.as_str())
            .unwrap_or("")
            .to_string();
        Ok(MatrixRoot {
            matrix,
            exponent,
            target,
            verified,
            construction,
        })
    }
}

/// Entrywise comparison of `m` against `scalar * Id`.
fn compare_to_scalar(m: &PolyMatrix, scalar: &MultiPoly) -> Result<VerifyReport> {
    let scalar = scalar.embed(m.vars())?;
    let d = num::integer::lcm(m.field_order(), scalar.field_order());
    let scalar = scalar.promote_field(d);
    let zero = MultiPoly::zero(Arc::clone(m.vars()), d);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let expected = if i == j { &scalar } else { &zero };
            let found = m.at(i, j).promote_field(d);
            if &found != expected {
                return Ok(VerifyReport {
                    ok: false,
                    first_mismatch: Some(Mismatch {
                        row: i,
                        col: j,
                        expected: expected.to_string(),
                        found: found.to_string(),
                    }),
                });
            }
        }
    }
    Ok(VerifyReport {
        ok: true,
        first_mismatch: None,
    })
}

/// Check the ordered product of the factors against `target * Id`.
pub fn verify_mf(mf: &MatrixFactorization) -> Result<VerifyReport> {
    if mf.factors.is_empty() {
        return Err(Error::ShapeMismatch("no factors".into()));
    }
    let m = mf.factors[0].rows();
    for f in &mf.factors {
        if !f.is_square() || f.rows() != m {
            return Err(Error::ShapeMismatch(
                "factors must be square and of one common size".into(),
            ));
        }
    }
    let mut product = mf.factors[0].clone();
    for f in &mf.factors[1..] {
        product = product.mul(f)?;
    }
    compare_to_scalar(&product, &mf.target)
}

/// Size-1 factorization of a product of forms: one 1x1 factor per form.
pub fn mf_from_linear_product(forms: &[MultiPoly]) -> Result<MatrixFactorization> {
    if forms.is_empty() {
        return Err(Error::Invalid("empty form list".into()));
    }
    common_form_degree(forms)?;
    let mut target = forms[0].clone();
    for f in &forms[1..] {
        target = target.mul(f)?;
    }
    let factors: Vec<PolyMatrix> = forms
        .iter()
        .map(|f| PolyMatrix::from_rows(vec![vec![f.clone()]]))
        .collect::<Result<_>>()?;
    MatrixFactorization::new(factors, target, format!("product[{} forms]", forms.len()))
}

fn common_form_degree(forms: &[MultiPoly]) -> Result<u64> {
    let d0 = forms[0].weighted_degree().map_err(|_| {
        Error::Degree("forms must be nonzero and homogeneous".into())
    })?;
    for f in forms {
        let d = f
            .weighted_degree()
            .map_err(|_| Error::Degree("forms must be nonzero and homogeneous".into()))?;
        if d != d0 {
            return Err(Error::Degree("forms must share one degree".into()));
        }
    }
    Ok(d0)
}

/// Cyclic-shift matrix root: places form_j on the shift positions so that
/// M^d = (prod forms) * Id with d = number of forms.
pub fn cyclic_root(forms: &[MultiPoly]) -> Result<MatrixRoot> {
    let d = forms.len();
    if d < 2 {
        return Err(Error::Invalid("cyclic root needs at least 2 forms".into()));
    }
    common_form_degree(forms)?;
    let field_d = forms
        .iter()
        .map(|f| f.field_order())
        .fold(1, num::integer::lcm);
    let vars = Arc::clone(forms[0].vars());
    let mut m = PolyMatrix::zero(Arc::clone(&vars), field_d, d, d);
    for (j, f) in forms.iter().enumerate() {
        // form_(j+1) sits at row j, column (j - 1) mod d
        m.set(j, (j + d - 1) % d, f.clone());
    }
    let mut target = forms[0].clone();
    for f in &forms[1..] {
        target = target.mul(f)?;
    }
    MatrixRoot::new(m, d as u32, target, format!("cyclic_root[d={}]", d))
}

/// Expand a verified root into the constant factorization (M, M, ..., M).
pub fn root_to_constant_mf(root: &MatrixRoot) -> Result<MatrixFactorization> {
    if !root.verified() {
        return Err(Error::Invalid("root is not verified".into()));
    }
    // M^d = target * Id is the verified identity, which is literally the
    // product check for (M, ..., M); no recomputation needed.
    Ok(MatrixFactorization::new_unchecked(
        vec![root.matrix.clone(); root.exponent as usize],
        root.target.clone(),
        true,
        format!("constant[{}]", root.construction),
    ))
}

/// Split t^d - g into commuting linear-in-t factors using a d-th root of g:
/// factor_j = t * Id - zeta^(j-1) * M over Q(zeta_d).
pub fn split_t_power(root: &MatrixRoot, t_name: &str) -> Result<MatrixFactorization> {
    if !root.verified() {
        return Err(Error::Invalid("root is not verified".into()));
    }
    if root.target.involves(t_name) {
        return Err(Error::Invalid(format!(
            "`{}` occurs in the root target",
            t_name
        )));
    }
    let d = root.exponent;
    let field_d = num::integer::lcm(root.matrix.field_order(), d);
    let (vars, m): (Arc<VarSpec>, PolyMatrix) = match root.matrix.vars().index_of(t_name) {
        Some(_) => (Arc::clone(root.matrix.vars()), root.matrix.clone()),
        None => {
            // Extend the spec with t in front. t gets the common entry degree
            // as its weight so that t * Id - zeta^j M stays homogeneous.
            let old = root.matrix.vars();
            let weight = uniform_entry_degree(&root.matrix).unwrap_or(1).max(1);
            let mut names: Vec<&str> = vec![t_name];
            names.extend(old.names().iter().map(|s| s.as_str()));
            let mut weights: Vec<u32> = vec![weight as u32];
            weights.extend_from_slice(old.weights());
            let vars = VarSpec::new(&names, &weights)?;
            (Arc::clone(&vars), root.matrix.embed(&vars)?)
        }
    };
    let m = m.promote_field(field_d);
    let t_idx = vars.index_of(t_name).unwrap();
    let t_poly = MultiPoly::var(Arc::clone(&vars), field_d, t_idx);
    let t_scalar = PolyMatrix::scalar(&t_poly, m.rows());
    let zeta = FieldElement::zeta(field_d).pow((field_d / d) as u64);
    let mut factors = Vec::with_capacity(d as usize);
    for j in 0..d {
        factors.push(t_scalar.sub(&m.scale_coeff(&zeta.pow(j as u64)))?);
    }
    let target = t_poly
        .pow(d)
        .sub(&root.target.embed(&vars)?.promote_field(field_d))?;
    MatrixFactorization::new(
        factors,
        target,
        format!("split_t_power[zeta_{}; {}]", d, root.construction),
    )
}

fn uniform_entry_degree(m: &PolyMatrix) -> Option<u64> {
    let mut deg = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let e = m.at(i, j);
            if e.is_zero() {
                continue;
            }
            let d = e.weighted_degree().ok()?;
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 == d => {}
                _ => return None,
            }
        }
    }
    deg
}

/// Block-cyclic companion root of a verified factorization: a (d*m)-sized
/// matrix C with C^d = target * Id. Row block r carries factor r+1 at block
/// column (r+1) mod d, so every diagonal block of C^d is a cyclic rotation
/// of the factor product.
pub fn companion_root(mf: &MatrixFactorization) -> Result<MatrixRoot> {
    if !mf.verified() {
        return Err(Error::Invalid("factorization is not verified".into()));
    }
    let d = mf.length();
    let m = mf.size();
    let field_d = mf.factors[0].field_order();
    let vars = Arc::clone(mf.factors[0].vars());
    let mut c = PolyMatrix::zero(Arc::clone(&vars), field_d, d * m, d * m);
    for (r, alpha) in mf.factors.iter().enumerate() {
        let bc = (r + 1) % d;
        for i in 0..m {
            for j in 0..m {
                c.set(r * m + i, bc * m + j, alpha.at(i, j).clone());
            }
        }
    }
    MatrixRoot::new(
        c,
        d as u32,
        mf.target.clone(),
        format!("companion[{}]", mf.construction),
    )
}

/// Cyclic rotation of the factor list, re-verified against the same target.
pub fn rotate_mf(mf: &MatrixFactorization, k: usize) -> Result<MatrixFactorization> {
    if !mf.verified() {
        return Err(Error::Invalid("factorization is not verified".into()));
    }
    let d = mf.length();
    let k = k % d;
    let mut factors = Vec::with_capacity(d);
    factors.extend_from_slice(&mf.factors[k..]);
    factors.extend_from_slice(&mf.factors[..k]);
    MatrixFactorization::new(
        factors,
        mf.target.clone(),
        format!("rotate[{}; {}]", k, mf.construction),
    )
}

/// Combine two verified length-2 factorizations of g and h into a length-2
/// factorization of g + h of size 2 m m'. Both inputs must verify in reversed
/// order too; this is checked, not assumed.
pub fn clifford_combine_two_factor(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
) -> Result<MatrixFactorization> {
    if a.length() != 2 || b.length() != 2 {
        return Err(Error::Invalid("clifford combine needs length-2 inputs".into()));
    }
    if !a.verified() || !b.verified() {
        return Err(Error::Invalid("inputs must be verified".into()));
    }
    for (name, mf) in [("first", a), ("second", b)] {
        let rev = MatrixFactorization::new_unchecked(
            vec![mf.factors[1].clone(), mf.factors[0].clone()],
            mf.target.clone(),
            false,
            "reversed",
        );
        let rep = verify_mf(&rev)?;
        if !rep.ok {
            return Err(Error::Invalid(format!(
                "{} input does not verify in reversed order",
                name
            )));
        }
    }
    let m = a.size();
    let mp = b.size();
    let id_m = PolyMatrix::identity(
        Arc::clone(a.factors[0].vars()),
        a.factors[0].field_order(),
        m,
    );
    let id_mp = PolyMatrix::identity(
        Arc::clone(b.factors[0].vars()),
        b.factors[0].field_order(),
        mp,
    );
    let a1 = a.factors[0].kronecker(&id_mp)?;
    let a2 = a.factors[1].kronecker(&id_mp)?;
    let b1 = id_m.kronecker(&b.factors[0])?;
    let b2 = id_m.kronecker(&b.factors[1])?;
    let n = m * mp;
    let beta1 = block_2x2(&a1, &b1, &b2.neg(), &a2, n)?;
    let beta2 = block_2x2(&a2, &b1.neg(), &b2, &a1, n)?;
    let target = a.target.add(&b.target)?;
    let out = MatrixFactorization::new(
        vec![beta1.clone(), beta2.clone()],
        target.clone(),
        format!("clifford[{} ; {}]", a.construction, b.construction),
    )?;
    // The reversed order must also hold so the output can be combined again.
    let rev = MatrixFactorization::new(vec![beta2, beta1], target, "reversed")?;
    debug_assert!(rev.verified());
    Ok(out)
}

fn block_2x2(
    tl: &PolyMatrix,
    tr: &PolyMatrix,
    bl: &PolyMatrix,
    br: &PolyMatrix,
    n: usize,
) -> Result<PolyMatrix> {
    let vars = Arc::clone(tl.vars());
    let d = [tl, tr, bl, br]
        .iter()
        .map(|m| m.field_order())
        .fold(1, num::integer::lcm);
    let mut out = PolyMatrix::zero(vars, d, 2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, tl.at(i, j).clone());
            out.set(i, n + j, tr.at(i, j).clone());
            out.set(n + i, j, bl.at(i, j).clone());
            out.set(n + i, n + j, br.at(i, j).clone());
        }
    }
    Ok(out)
}

/// Combine two verified d-th roots of g and h into a d-th root of g + h of
/// size d m m', using the zeta-commuting pair X = M ⊗ Id ⊗ D, Y = Id ⊗ N ⊗ S
/// over Q(zeta_d). The relation X Y = zeta Y X is asserted before summing.
pub fn zeta_tensor_combine(a: &MatrixRoot, b: &MatrixRoot) -> Result<MatrixRoot> {
    if a.exponent != b.exponent {
        return Err(Error::Invalid("roots must share one exponent".into()));
    }
    if a.exponent < 2 {
        return Err(Error::Invalid("combine needs exponent >= 2".into()));
    }
    if !a.verified() || !b.verified() {
        return Err(Error::Invalid("inputs must be verified".into()));
    }
    let d = a.exponent;
    let field_d = [a.matrix.field_order(), b.matrix.field_order(), d]
        .into_iter()
        .fold(1, num::integer::lcm);
    let vars = Arc::clone(a.matrix.vars());
    let zeta = FieldElement::zeta(field_d).pow((field_d / d) as u64);
    // D = diag(1, zeta, ..., zeta^(d-1)); S the d-cycle shift S e_j = e_(j+1).
    let mut dm = PolyMatrix::zero(Arc::clone(&vars), field_d, d as usize, d as usize);
    let mut s = PolyMatrix::zero(Arc::clone(&vars), field_d, d as usize, d as usize);
    for j in 0..d as usize {
        dm.set(
            j,
            j,
            MultiPoly::constant(Arc::clone(&vars), field_d, zeta.pow(j as u64)),
        );
        s.set(
            (j + 1) % d as usize,
            j,
            MultiPoly::one(Arc::clone(&vars), field_d),
        );
    }
    let id_m = PolyMatrix::identity(Arc::clone(&vars), field_d, a.size());
    let id_mp = PolyMatrix::identity(Arc::clone(&vars), field_d, b.size());
    let x = a
        .matrix
        .promote_field(field_d)
        .kronecker(&id_mp)?
        .kronecker(&dm)?;
    let y = id_m
        .kronecker(&b.matrix.promote_field(field_d))?
        .kronecker(&s)?;
    // zeta-commutation X Y = zeta Y X, checked entrywise.
    let xy = x.mul(&y)?;
    let yx_scaled = y.mul(&x)?.scale_coeff(&zeta);
    if xy != yx_scaled {
        return Err(Error::Invalid(
            "zeta-commutation X Y = zeta Y X failed".into(),
        ));
    }
    let p = x.add(&y)?;
    let target = a.target.add(&b.target)?;
    MatrixRoot::new(
        p,
        d,
        target,
        format!("zeta_tensor[{} ; {}]", a.construction, b.construction),
    )
}

/// Result of the sum-of-products pipeline with its size bookkeeping.
#[derive(Clone, Debug)]
pub struct SumPipelineResult {
    pub mf: MatrixFactorization,
    /// d^(s-1), the size the combination lemma asserts.
    pub reference_size: u64,
    pub route: String,
}

/// Factorization of a sum of s products of d forms.
///
/// For d = 2 the iterated two-factor combine realizes size 2^(s-1) exactly.
/// For d >= 3 the cyclic-root/tensor pipeline yields size d^(2s-1); the
/// d^(s-1) reference value is reported alongside the achieved size.
pub fn herzog_sum_mf(summands: &[Vec<MultiPoly>], d: u32) -> Result<SumPipelineResult> {
    if summands.is_empty() {
        return Err(Error::Invalid("no summands".into()));
    }
    if d == 0 {
        return Err(Error::Invalid("d must be positive".into()));
    }
    let mut per_summand_degree = None;
    for s in summands {
        if s.len() != d as usize {
            return Err(Error::Degree(format!(
                "every summand must supply exactly {} forms",
                d
            )));
        }
        let deg = common_form_degree(s)?;
        match per_summand_degree {
            None => per_summand_degree = Some(deg),
            Some(d0) if d0 == deg => {}
            _ => return Err(Error::Degree("inconsistent degrees across summands".into())),
        }
    }
    let s = summands.len();
    let reference_size = (d as u64).pow(s.saturating_sub(1) as u32);
    if s == 1 {
        let mf = mf_from_linear_product(&summands[0])?;
        return Ok(SumPipelineResult {
            mf,
            reference_size,
            route: "single-product".into(),
        });
    }
    if d == 1 {
        // Length-1 factorization: the 1x1 matrix holding the sum itself.
        let mut target = summands[0][0].clone();
        for t in &summands[1..] {
            target = target.add(&t[0])?;
        }
        let mf = MatrixFactorization::new(
            vec![PolyMatrix::from_rows(vec![vec![target.clone()]])?],
            target,
            "sum[d=1]",
        )?;
        return Ok(SumPipelineResult {
            mf,
            reference_size,
            route: "scalar-sum".into(),
        });
    }
    if d == 2 {
        let mut acc = mf_from_linear_product(&summands[0])?;
        for t in &summands[1..] {
            let next = mf_from_linear_product(t)?;
            acc = clifford_combine_two_factor(&acc, &next)?;
        }
        return Ok(SumPipelineResult {
            mf: acc,
            reference_size,
            route: "two-factor-combine".into(),
        });
    }
    let mut acc = cyclic_root(&summands[0])?;
    for t in &summands[1..] {
        let next = cyclic_root(t)?;
        acc = zeta_tensor_combine(&acc, &next)?;
    }
    let mf = root_to_constant_mf(&acc)?;
    Ok(SumPipelineResult {
        mf,
        reference_size,
        route: "cyclic-tensor".into(),
    })
}

// ---------------------------------------------------------------------------
// Small square roots of quadrics (d = 2 special forms)
// ---------------------------------------------------------------------------

/// Whether u is a scalar multiple of v; returns the ratio when it is.
fn scalar_multiple_of(u: &MultiPoly, v: &MultiPoly) -> Option<FieldElement> {
    if u.is_zero() || v.is_zero() || u.num_terms() != v.num_terms() {
        return None;
    }
    let mut ratio: Option<FieldElement> = None;
    for (e, cv) in v.terms() {
        let cu = u.coeff(e);
        if cu.is_zero() {
            return None;
        }
        let d = num::integer::lcm(cu.field_order(), cv.field_order());
        let r = cu.promote(d).div(&cv.promote(d));
        match &ratio {
            None => ratio = Some(r),
            Some(r0) => {
                let d2 = num::integer::lcm(r0.field_order(), r.field_order());
                if r0.promote(d2) != r.promote(d2) {
                    return None;
                }
            }
        }
    }
    ratio
}

enum ProductKind {
    /// coeff * base^2
    Square { coeff: Rat, base: MultiPoly },
    General(MultiPoly, MultiPoly),
}

fn classify(u: &MultiPoly, v: &MultiPoly) -> ProductKind {
    if let Some(r) = scalar_multiple_of(u, v) {
        if let Some(c) = r.as_rational() {
            return ProductKind::Square {
                coeff: c,
                base: v.clone(),
            };
        }
    }
    ProductKind::General(u.clone(), v.clone())
}

/// sqrt of a signed rational inside Q or Q(i): gamma = delta^2 -> (delta, false),
/// gamma = -delta^2 -> (delta, true) where true marks an extra factor of i.
fn signed_sqrt(gamma: &Rat) -> Option<(Rat, bool)> {
    if let Some(d) = rational_sqrt(gamma) {
        return Some((d, false));
    }
    if let Some(d) = rational_sqrt(&-gamma) {
        return Some((d, true));
    }
    None
}

/// Scale a form by delta, optionally by i (promoting into Q(zeta_4)).
fn scaled_form(base: &MultiPoly, delta: &Rat, with_i: bool) -> MultiPoly {
    let field_d = if with_i {
        num::integer::lcm(base.field_order(), 4)
    } else {
        base.field_order()
    };
    let mut c = FieldElement::from_rat(field_d, delta.clone());
    if with_i {
        let i = FieldElement::zeta(field_d).pow((field_d / 4) as u64);
        c = c.mul(&i);
    }
    base.scale(&c)
}

/// Merge coeff1 * w1^2 + coeff2 * w2^2 into a single product (u, v), when the
/// ratio -coeff2/coeff1 or coeff2/coeff1 is a rational square (the latter
/// introduces i).
fn merge_two_squares(c1: &Rat, w1: &MultiPoly, c2: &Rat, w2: &MultiPoly) -> Option<(MultiPoly, MultiPoly)> {
    let ratio = c2 / c1;
    if let Some(mu) = rational_sqrt(&-&ratio) {
        // c1 (w1 - mu w2)(w1 + mu w2)
        let u = w1
            .sub(&w2.scale(&FieldElement::from_rat(w2.field_order(), mu.clone())))
            .ok()?
            .scale(&FieldElement::from_rat(w1.field_order(), c1.clone()));
        let v = w1
            .add(&w2.scale(&FieldElement::from_rat(w2.field_order(), mu)))
            .ok()?;
        return Some((u, v));
    }
    if let Some(mu) = rational_sqrt(&ratio) {
        // c1 (w1 + i mu w2)(w1 - i mu w2) over Q(zeta_4)
        let imu = scaled_form(w2, &mu, true);
        let u = w1.promote_field(imu.field_order()).add(&imu).ok()?
            .scale(&FieldElement::from_rat(4, c1.clone()));
        let v = w1.promote_field(imu.field_order()).sub(&imu).ok()?;
        return Some((u, v));
    }
    None
}

/// Try to realize a square root of a quadric given as a sum of products of two
/// forms, of size at most 2. Handles a single product, a "square plus one
/// product" trace-zero pattern, and up to three squares whose coefficient
/// ratios cooperate (allowing a factor i). Returns None when no small pattern
/// applies.
pub fn quadric_root(products: &[(MultiPoly, MultiPoly)]) -> Option<MatrixRoot> {
    if products.is_empty() || products.len() > 3 {
        return None;
    }
    let kinds: Vec<ProductKind> = products.iter().map(|(u, v)| classify(u, v)).collect();
    let squares: Vec<(&Rat, &MultiPoly)> = kinds
        .iter()
        .filter_map(|k| match k {
            ProductKind::Square { coeff, base } => Some((coeff, base)),
            _ => None,
        })
        .collect();
    let generals: Vec<(&MultiPoly, &MultiPoly)> = kinds
        .iter()
        .filter_map(|k| match k {
            ProductKind::General(u, v) => Some((u, v)),
            _ => None,
        })
        .collect();

    let target = {
        let mut acc: Option<MultiPoly> = None;
        for (u, v) in products {
            let p = u.mul(v).ok()?;
            acc = Some(match acc {
                None => p,
                Some(a) => a.add(&p).ok()?,
            });
        }
        acc.unwrap()
    };

    // Single product: size 1 root when it is a plain square, else a 2-cycle.
    if products.len() == 1 {
        if let ProductKind::Square { coeff, base } = &kinds[0] {
            if let Some((delta, with_i)) = signed_sqrt(coeff) {
                let a = scaled_form(base, &delta, with_i);
                let m = PolyMatrix::from_rows(vec![vec![a]]).ok()?;
                return MatrixRoot::new(m, 2, target, "square_root[scalar]").ok();
            }
        }
        let (u, v) = &products[0];
        return cyclic_root(&[u.clone(), v.clone()]).ok().map(|r| r);
    }

    // Pick a pivot square with coefficient +-delta^2, pack the rest into a
    // single product (u, v), and use [[a, u], [v, -a]] with a^2 + u v = target.
    for (pi, k) in kinds.iter().enumerate() {
        let (coeff, base) = match k {
            ProductKind::Square { coeff, base } => (coeff, base),
            _ => continue,
        };
        let (delta, with_i) = match signed_sqrt(coeff) {
            Some(x) => x,
            None => continue,
        };
        // Remaining products besides the pivot.
        let rest: Vec<usize> = (0..kinds.len()).filter(|&i| i != pi).collect();
        let packed: Option<(MultiPoly, MultiPoly)> = match rest.len() {
            1 => match &kinds[rest[0]] {
                ProductKind::General(u, v) => Some((u.clone(), v.clone())),
                ProductKind::Square { coeff, base } => {
                    // c w^2 = (c w) * w
                    let u = base.scale(&FieldElement::from_rat(base.field_order(), coeff.clone()));
                    Some((u, base.clone()))
                }
            },
            2 => {
                match (&kinds[rest[0]], &kinds[rest[1]]) {
                    (
                        ProductKind::Square { coeff: c1, base: w1 },
                        ProductKind::Square { coeff: c2, base: w2 },
                    ) => merge_two_squares(c1, w1, c2, w2),
                    _ => None,
                }
            }
            _ => None,
        };
        if let Some((u, v)) = packed {
            let a = scaled_form(base, &delta, with_i);
            let field_d = [a.field_order(), u.field_order(), v.field_order()]
                .into_iter()
                .fold(1, num::integer::lcm);
            let a = a.promote_field(field_d);
            let m = PolyMatrix::from_rows(vec![
                vec![a.clone(), u.promote_field(field_d)],
                vec![v.promote_field(field_d), a.neg()],
            ])
            .ok()?;
            if let Ok(root) = MatrixRoot::new(m, 2, target.clone(), "square_root[trace_zero]") {
                return Some(root);
            }
        }
    }

    // No usable pivot: two squares may still merge into one product.
    if generals.is_empty() && squares.len() == 2 {
        let (c1, w1) = squares[0];
        let (c2, w2) = squares[1];
        if let Some((u, v)) = merge_two_squares(c1, w1, c2, w2) {
            return cyclic_root(&[u, v]).ok();
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn vars3() -> Arc<VarSpec> {
        VarSpec::standard(&["x", "y", "z"]).unwrap()
    }

    fn p(vars: &Arc<VarSpec>, s: &str) -> MultiPoly {
        parse_poly(s, vars, 1).unwrap()
    }

    #[test]
    fn conic_pair_verifies() {
        // (t Id + A)(t Id - A) = (t^2 - y^2 - x z) Id for A = [[y, x], [z, -y]].
        let vars = VarSpec::standard(&["t", "x", "y", "z"]).unwrap();
        let q = |s: &str| parse_poly(s, &vars, 1).unwrap();
        let a1 = PolyMatrix::from_rows(vec![
            vec![q("t + y"), q("x")],
            vec![q("z"), q("t - y")],
        ])
        .unwrap();
        let a2 = PolyMatrix::from_rows(vec![
            vec![q("t - y"), q("-x")],
            vec![q("-z"), q("t + y")],
        ])
        .unwrap();
        let mf = MatrixFactorization::new(vec![a1, a2], q("t^2 - y^2 - x*z"), "manual").unwrap();
        assert!(mf.verified());
        assert_eq!(mf.size(), 2);
    }

    #[test]
    fn perturbed_entry_is_located() {
        let vars = VarSpec::standard(&["t", "x", "y", "z"]).unwrap();
        let q = |s: &str| parse_poly(s, &vars, 1).unwrap();
        // Perturb x -> x + y in the top-right entry.
        let a1 = PolyMatrix::from_rows(vec![
            vec![q("t + y"), q("x + y")],
            vec![q("z"), q("t - y")],
        ])
        .unwrap();
        let a2 = PolyMatrix::from_rows(vec![
            vec![q("t - y"), q("-x")],
            vec![q("-z"), q("t + y")],
        ])
        .unwrap();
        let mf = MatrixFactorization::new_unchecked(
            vec![a1, a2],
            q("t^2 - y^2 - x*z"),
            false,
            "tampered",
        );
        let rep = verify_mf(&mf).unwrap();
        assert!(!rep.ok);
        let m = rep.first_mismatch.unwrap();
        assert_eq!((m.row, m.col), (0, 0));
    }

    #[test]
    fn product_of_three_variables() {
        let vars = vars3();
        let mf = mf_from_linear_product(&[
            p(&vars, "x"),
            p(&vars, "y"),
            p(&vars, "z"),
        ])
        .unwrap();
        assert_eq!(mf.size(), 1);
        assert_eq!(mf.length(), 3);
        assert_eq!(mf.target(), &p(&vars, "x*y*z"));
        let single = mf_from_linear_product(&[p(&vars, "x")]).unwrap();
        assert_eq!(single.length(), 1);
        let signed = mf_from_linear_product(&[p(&vars, "x"), p(&vars, "-y")]).unwrap();
        assert_eq!(signed.target(), &p(&vars, "-x*y"));
    }

    #[test]
    fn cyclic_root_of_xyz() {
        let vars = vars3();
        let root = cyclic_root(&[p(&vars, "x"), p(&vars, "y"), p(&vars, "z")]).unwrap();
        assert_eq!(root.size(), 3);
        // First row holds x in the last column.
        assert_eq!(root.matrix().at(0, 2), &p(&vars, "x"));
        assert_eq!(root.matrix().at(1, 0), &p(&vars, "y"));
        assert_eq!(root.matrix().at(2, 1), &p(&vars, "z"));
        assert!(root.verified());
        // 2-cycle
        let r2 = cyclic_root(&[p(&vars, "x"), p(&vars, "y")]).unwrap();
        assert_eq!(r2.matrix().at(0, 1), &p(&vars, "x"));
        assert_eq!(r2.matrix().at(1, 0), &p(&vars, "y"));
        // 4-cycle over 4 variables
        let vars4 = VarSpec::standard(&["x", "y", "z", "w"]).unwrap();
        let q = |s: &str| parse_poly(s, &vars4, 1).unwrap();
        let r4 = cyclic_root(&[q("x"), q("y"), q("z"), q("w")]).unwrap();
        assert_eq!(r4.size(), 4);
        assert_eq!(r4.target(), &q("x*y*z*w"));
        // d < 2 rejected
        assert!(cyclic_root(&[p(&vars, "x")]).is_err());
    }

    #[test]
    fn split_cube_over_zeta3() {
        let vars = vars3();
        let root = cyclic_root(&[p(&vars, "x"), p(&vars, "y"), p(&vars, "z")]).unwrap();
        let mf = split_t_power(&root, "t").unwrap();
        assert_eq!(mf.length(), 3);
        assert_eq!(mf.size(), 3);
        let tvars = Arc::clone(mf.target().vars());
        assert_eq!(
            mf.target(),
            &parse_poly("t^3 - x*y*z", &tvars, 3).unwrap()
        );
        assert!(mf.verified());
        // t occurring in g is rejected.
        let tv = VarSpec::standard(&["t", "u"]).unwrap();
        let bad = cyclic_root(&[
            parse_poly("t", &tv, 1).unwrap(),
            parse_poly("u", &tv, 1).unwrap(),
        ])
        .unwrap();
        assert!(split_t_power(&bad, "t").is_err());
    }

    #[test]
    fn companion_of_scalar_pair_is_two_cycle() {
        let vars = vars3();
        let mf = mf_from_linear_product(&[p(&vars, "x"), p(&vars, "y")]).unwrap();
        let c = companion_root(&mf).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(c.matrix().at(0, 1), &p(&vars, "x"));
        assert_eq!(c.matrix().at(1, 0), &p(&vars, "y"));
    }

    #[test]
    fn clifford_combine_sizes() {
        let vars4 = VarSpec::standard(&["x1", "x2", "y1", "y2"]).unwrap();
        let q = |s: &str| parse_poly(s, &vars4, 1).unwrap();
        let a = mf_from_linear_product(&[q("x1"), q("x2")]).unwrap();
        let b = mf_from_linear_product(&[q("y1"), q("y2")]).unwrap();
        let c = clifford_combine_two_factor(&a, &b).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(c.target(), &q("x1*x2 + y1*y2"));
    }

    #[test]
    fn herzog_two_factor_sizes() {
        let vars = VarSpec::standard(&["x1", "x2", "y1", "y2", "z1", "z2"]).unwrap();
        let q = |s: &str| parse_poly(s, &vars, 1).unwrap();
        let summands = vec![
            vec![q("x1"), q("x2")],
            vec![q("y1"), q("y2")],
            vec![q("z1"), q("z2")],
        ];
        let res = herzog_sum_mf(&summands, 2).unwrap();
        assert_eq!(res.mf.size(), 4);
        assert_eq!(res.reference_size, 4);
        assert_eq!(res.mf.target(), &q("x1*x2 + y1*y2 + z1*z2"));
    }

    #[test]
    fn herzog_cubic_route() {
        let vars = VarSpec::standard(&["x1", "x2", "x3", "y1", "y2", "y3"]).unwrap();
        let q = |s: &str| parse_poly(s, &vars, 1).unwrap();
        let res = herzog_sum_mf(
            &[
                vec![q("x1"), q("x2"), q("x3")],
                vec![q("y1"), q("y2"), q("y3")],
            ],
            3,
        )
        .unwrap();
        assert_eq!(res.mf.size(), 27);
        assert_eq!(res.reference_size, 3);
        assert!(res.mf.verified());
        // d=3, s=1 keeps size 1.
        let res1 = herzog_sum_mf(&[vec![q("x1"), q("x2"), q("x3")]], 3).unwrap();
        assert_eq!(res1.mf.size(), 1);
    }

    #[test]
    fn quadric_root_patterns() {
        let vars = vars3();
        // y^2 + x z: square pivot plus one general product.
        let products = vec![
            (p(&vars, "y"), p(&vars, "y")),
            (p(&vars, "x"), p(&vars, "z")),
        ];
        let root = quadric_root(&products).unwrap();
        assert_eq!(root.size(), 2);
        assert_eq!(root.target(), &p(&vars, "y^2 + x*z"));
        // x^2 - y^2 - z^2: three squares, needs i.
        let fermat = vec![
            (p(&vars, "x"), p(&vars, "x")),
            (p(&vars, "-y"), p(&vars, "y")),
            (p(&vars, "-z"), p(&vars, "z")),
        ];
        let root = quadric_root(&fermat).unwrap();
        assert_eq!(root.size(), 2);
        assert_eq!(root.matrix().field_order() % 4, 0);
        // 2x^2 - 2y^2 merges to one product over Q.
        let pair = vec![
            (p(&vars, "2*x"), p(&vars, "x")),
            (p(&vars, "-2*y"), p(&vars, "y")),
        ];
        let root = quadric_root(&pair).unwrap();
        assert_eq!(root.size(), 2);
        assert_eq!(root.target(), &p(&vars, "2*x^2 - 2*y^2"));
        // Generic two products: no small pattern.
        let generic = vec![
            (p(&vars, "x"), p(&vars, "y")),
            (p(&vars, "z"), p(&vars, "x + y")),
        ];
        assert!(quadric_root(&generic).is_none());
    }

    #[test]
    fn rotation_preserves_target() {
        let vars = vars3();
        let root = cyclic_root(&[p(&vars, "x"), p(&vars, "y"), p(&vars, "z")]).unwrap();
        let mf = split_t_power(&root, "t").unwrap();
        for k in 0..3 {
            let rot = rotate_mf(&mf, k).unwrap();
            assert!(rot.verified());
            assert_eq!(rot.target(), mf.target());
        }
    }

    #[test]
    fn json_round_trip_mf() {
        let vars = vars3();
        let root = cyclic_root(&[p(&vars, "x"), p(&vars, "y"), p(&vars, "z")]).unwrap();
        let mf = split_t_power(&root, "t").unwrap();
        let j = mf.to_json();
        let back = MatrixFactorization::from_json(&j).unwrap();
        assert_eq!(back.size(), 3);
        assert!(verify_mf(&back).unwrap().ok);
    }
}
