//! Matrices with polynomial entries.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::{MultiPoly, VarSpec};
use std::sync::Arc;

/// A rows x cols grid of polynomials over one shared variable spec.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
    /// Expected weighted degree of every nonzero entry, when declared.
    degree_profile: Option<u64>,
}

impl PolyMatrix {
    pub fn from_rows(rows: Vec<Vec<MultiPoly>>) -> Result<PolyMatrix> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(Error::ShapeMismatch("empty matrix".into()));
        }
        let c = rows[0].len();
        let vars = Arc::clone(rows[0][0].vars());
        let mut d = 1u32;
        let mut entries = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            for e in row {
                if **e.vars() != *vars {
                    return Err(Error::VarSpecMismatch);
                }
                d = num::integer::lcm(d, e.field_order());
            }
        }
        for row in rows {
            for e in row {
                entries.push(e.promote_field(d));
            }
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            entries,
            degree_profile: None,
        })
    }

    /// Declare and check a uniform degree profile for the nonzero entries.
    pub fn with_degree_profile(mut self, degree: u64) -> Result<PolyMatrix> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.at(i, j);
                if e.is_zero() {
                    continue;
                }
                if !e.is_homogeneous() || e.weighted_degree()? != degree {
                    return Err(Error::NonLinearEntry {
                        row: i,
                        col: j,
                        found: e.to_string(),
                    });
                }
            }
        }
        self.degree_profile = Some(degree);
        Ok(self)
    }

    pub fn zero(vars: Arc<VarSpec>, field_d: u32, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix {
            rows,
            cols,
            entries: vec![MultiPoly::zero(vars, field_d); rows * cols],
            degree_profile: None,
        }
    }

    pub fn identity(vars: Arc<VarSpec>, field_d: u32, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(Arc::clone(&vars), field_d, n, n);
        for i in 0..n {
            m.set(i, i, MultiPoly::one(Arc::clone(&vars), field_d));
        }
        m
    }

    /// p * Id_n.
    pub fn scalar(p: &MultiPoly, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(Arc::clone(p.vars()), p.field_order(), n, n);
        for i in 0..n {
            m.set(i, i, p.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn degree_profile(&self) -> Option<u64> {
        self.degree_profile
    }

    pub fn at(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: MultiPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn vars(&self) -> &Arc<VarSpec> {
        self.entries[0].vars()
    }

    pub fn field_order(&self) -> u32 {
        self.entries
            .iter()
            .map(|e| e.field_order())
            .fold(1, num::integer::lcm)
    }

    pub fn promote_field(&self, to: u32) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.promote_field(to)).collect(),
            degree_profile: self.degree_profile,
        }
    }

    /// Re-express every entry over a larger variable spec.
    pub fn embed(&self, target: &Arc<VarSpec>) -> Result<PolyMatrix> {
        let entries: Vec<MultiPoly> = self
            .entries
            .iter()
            .map(|e| e.embed(target))
            .collect::<Result<_>>()?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            degree_profile: self.degree_profile,
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix addition".into()));
        }
        let entries: Vec<MultiPoly> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            degree_profile: None,
        })
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
            degree_profile: self.degree_profile,
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch("matrix multiplication".into()));
        }
        let d = num::integer::lcm(self.field_order(), other.field_order());
        let vars = Arc::clone(self.vars());
        let mut out = PolyMatrix::zero(vars, d, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b)?;
                    let cur = out.at(i, j).add(&prod)?;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn scale_poly(&self, p: &MultiPoly) -> Result<PolyMatrix> {
        let entries: Vec<MultiPoly> = self
            .entries
            .iter()
            .map(|e| e.mul(p))
            .collect::<Result<_>>()?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            degree_profile: None,
        })
    }

    pub fn scale_coeff(&self, c: &FieldElement) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
            degree_profile: self.degree_profile,
        }
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zero(
            Arc::clone(self.vars()),
            self.field_order(),
            self.cols,
            self.rows,
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    /// Kronecker product (self tensor other).
    pub fn kronecker(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        let d = num::integer::lcm(self.field_order(), other.field_order());
        let vars = Arc::clone(self.vars());
        let mut out = PolyMatrix::zero(
            vars,
            d,
            self.rows * other.rows,
            self.cols * other.cols,
        );
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.at(ia, ja);
                if a.is_zero() {
                    continue;
                }
                for ib in 0..other.rows {
                    for jb in 0..other.cols {
                        let b = other.at(ib, jb);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(ia * other.rows + ib, ja * other.cols + jb, a.mul(b)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix power for square matrices.
    pub fn pow(&self, e: u32) -> Result<PolyMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("power of non-square matrix".into()));
        }
        let mut acc = PolyMatrix::identity(Arc::clone(self.vars()), self.field_order(), self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Location of the first entry violating "nonzero entries have weighted
    /// degree exactly `deg`", if any.
    pub fn first_non_degree_entry(&self, deg: u64) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.at(i, j);
                if e.is_zero() {
                    continue;
                }
                if !e.is_homogeneous() || e.weighted_degree().ok() != Some(deg) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<MultiPoly> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let vars = Arc::clone(self.vars());
        let d = self.field_order();
        let mut m: Vec<Vec<MultiPoly>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).promote_field(d)).collect())
            .collect();
        let mut sign = 1i32;
        let mut prev = MultiPoly::one(Arc::clone(&vars), d);
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(MultiPoly::zero(vars, d)),
                }
            }
            if k + 1 == n {
                break;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k]
                        .mul(&m[i][j])?
                        .sub(&m[i][k].mul(&m[k][j])?)?;
                    m[i][j] = num.exact_div(&prev)?;
                }
            }
            for i in k + 1..n {
                m[i][k] = MultiPoly::zero(Arc::clone(&vars), d);
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if sign < 0 { det.neg() } else { det })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PolyMatrix> {
        let rows = v
            .get("rows")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Json("missing rows".into()))? as usize;
        let cols = v
            .get("cols")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Json("missing cols".into()))? as usize;
        let entries_json = v
            .get("entries")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Json("missing entries".into()))?;
        if entries_json.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::Json("entry count mismatch".into()));
        }
        let polys: Vec<MultiPoly> = entries_json
            .iter()
            .map(MultiPoly::from_json)
            .collect::<Result<_>>()?;
        let grid: Vec<Vec<MultiPoly>> = polys
            .chunks(cols)
            .map(|c| c.to_vec())
            .collect();
        PolyMatrix::from_rows(grid)
    }
}

impl std::fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
