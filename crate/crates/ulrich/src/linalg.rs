//! Exact linear algebra over Q(zeta_D): rank and linear solves.

use crate::field::FieldElement;

/// Dense scalar matrix over one cyclotomic field.
#[derive(Clone, Debug)]
pub struct FieldMat {
    rows: usize,
    cols: usize,
    field_d: u32,
    data: Vec<FieldElement>,
}

impl FieldMat {
    pub fn zero(field_d: u32, rows: usize, cols: usize) -> FieldMat {
        FieldMat {
            rows,
            cols,
            field_d,
            data: vec![FieldElement::zero(field_d); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> FieldElement>(
        field_d: u32,
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> FieldMat {
        let mut m = FieldMat::zero(field_d, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j).promote(field_d));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    /// Exact rank by fraction-free elimination with full pivoting.
    ///
    /// Rows are first scaled to integral coordinates; the Bareiss recurrence
    /// then keeps intermediate entries as (cyclotomic-integer) minors, so the
    /// division by the previous pivot cancels exactly.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<FieldElement>> = (0..self.rows)
            .map(|i| {
                let mut row: Vec<FieldElement> =
                    (0..self.cols).map(|j| self.at(i, j).clone()).collect();
                let mut l = num::BigInt::from(1);
                for e in &row {
                    l = num::integer::lcm(l, e.denominator_lcm());
                }
                let scale = FieldElement::from_rat(
                    self.field_d,
                    crate::field::Rat::from(l),
                );
                for e in row.iter_mut() {
                    *e = e.mul(&scale);
                }
                row
            })
            .collect();
        let mut rank = 0;
        let mut prev = FieldElement::one(self.field_d);
        let steps = self.rows.min(self.cols);
        for k in 0..steps {
            // Full pivot search in the trailing submatrix.
            let mut pivot = None;
            'outer: for i in k..self.rows {
                for j in k..self.cols {
                    if !m[i][j].is_zero() {
                        pivot = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => break,
            };
            m.swap(k, pi);
            if pj != k {
                for row in m.iter_mut() {
                    row.swap(k, pj);
                }
            }
            rank += 1;
            let pivot_val = m[k][k].clone();
            for i in k + 1..self.rows {
                for j in k + 1..self.cols {
                    let num = pivot_val
                        .mul(&m[i][j])
                        .sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num.div(&prev);
                }
                m[i][k] = FieldElement::zero(self.field_d);
            }
            prev = pivot_val;
        }
        rank
    }

    /// One exact solution of `self * x = rhs` (free variables set to zero),
    /// or None when the system is inconsistent.
    pub fn solve(&self, rhs: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(rhs.len(), self.rows);
        let mut a: Vec<Vec<FieldElement>> = (0..self.rows)
            .map(|i| {
                let mut row: Vec<FieldElement> =
                    (0..self.cols).map(|j| self.at(i, j).clone()).collect();
                row.push(rhs[i].promote(self.field_d));
                row
            })
            .collect();
        let n = self.cols;
        let mut pivot_col_of_row = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let pivot = (r..self.rows).find(|&i| !a[i][c].is_zero());
            let pi = match pivot {
                Some(p) => p,
                None => continue,
            };
            a.swap(r, pi);
            let inv = a[r][c].inv();
            for j in c..=n {
                a[r][j] = a[r][j].mul(&inv);
            }
            for i in 0..self.rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in c..=n {
                        let adj = f.mul(&a[r][j]);
                        a[i][j] = a[i][j].sub(&adj);
                    }
                }
            }
            pivot_col_of_row.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        // Inconsistency: a zero row with nonzero rhs.
        for i in r..self.rows {
            if !a[i][n].is_zero() {
                return None;
            }
        }
        let mut x = vec![FieldElement::zero(self.field_d); n];
        for (row, &c) in pivot_col_of_row.iter().enumerate() {
            x[c] = a[row][n].clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat_int, FieldElement};

    fn fe(v: i64) -> FieldElement {
        FieldElement::from_rat(1, rat_int(v))
    }

    #[test]
    fn rank_of_small_matrices() {
        let m = FieldMat::from_fn(1, 3, 3, |i, j| fe([[1, 2, 3], [2, 4, 6], [0, 1, 1]][i][j]));
        assert_eq!(m.rank(), 2);
        let id = FieldMat::from_fn(1, 4, 4, |i, j| fe((i == j) as i64));
        assert_eq!(id.rank(), 4);
        let z = FieldMat::zero(1, 5, 2);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn rank_over_cyclotomic() {
        // (1, zeta; zeta^2, 1) over Q(zeta_3) is singular iff zeta^3 = 1.
        let z = FieldElement::zeta(3);
        let m = FieldMat::from_fn(3, 2, 2, |i, j| match (i, j) {
            (0, 0) => FieldElement::one(3),
            (0, 1) => z.clone(),
            (1, 0) => z.pow(2),
            (1, 1) => FieldElement::one(3),
            _ => unreachable!(),
        });
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_underdetermined() {
        // x + y = 3 has the echelon solution x = 3, y = 0.
        let m = FieldMat::from_fn(1, 1, 2, |_, _| fe(1));
        let x = m.solve(&[fe(3)]).unwrap();
        assert_eq!(x[0], fe(3));
        assert_eq!(x[1], fe(0));
        // Inconsistent system.
        let m2 = FieldMat::from_fn(1, 2, 1, |i, _| fe([1, 2][i]));
        assert!(m2.solve(&[fe(1), fe(3)]).is_none());
    }
}
