//! Explicit small factorizations kept as regression instances.

use crate::error::Result;
use crate::matfac::{MatrixFactorization, MatrixRoot};
use crate::matrix::PolyMatrix;
use crate::poly::{parse_poly, VarSpec};

/// The 2x2 square root of the smooth conic: A = [[y, x], [z, -y]] with
/// A^2 = (y^2 + x z) * Id.
pub fn conic_quadric_root() -> Result<MatrixRoot> {
    let vars = VarSpec::standard(&["x", "y", "z"])?;
    let p = |s: &str| parse_poly(s, &vars, 1);
    let a = PolyMatrix::from_rows(vec![
        vec![p("y")?, p("x")?],
        vec![p("z")?, p("-y")?],
    ])?;
    MatrixRoot::new(a, 2, p("y^2 + x*z")?, "conic_quadric_root")
}

/// Three 3x3 matrices whose ordered product is F * Id for the Legendre cubic
/// F = y^2 z + x (x - z)(x - lambda z), evaluated at an integer lambda.
pub fn legendre_cubic_mf(lambda: i64) -> Result<MatrixFactorization> {
    let vars = VarSpec::standard(&["x", "y", "z"])?;
    let p = |s: String| parse_poly(&s, &vars, 1);
    let q = |s: &str| parse_poly(s, &vars, 1);
    let a1 = PolyMatrix::from_rows(vec![
        vec![q("-y")?, q("0")?, q("x")?],
        vec![q("1/2*(x - z)")?, q("-1/2*y")?, q("0")?],
        vec![q("0")?, p(format!("x - {}*z", lambda))?, q("z")?],
    ])?;
    let a2 = PolyMatrix::from_rows(vec![
        vec![q("-y")?, q("0")?, q("2*x")?],
        vec![q("x - z")?, q("-2*z")?, q("0")?],
        vec![q("0")?, p(format!("x - {}*z", lambda))?, q("y")?],
    ])?;
    let a3 = PolyMatrix::from_rows(vec![
        vec![q("z")?, q("0")?, q("x")?],
        vec![q("x - z")?, q("y")?, q("0")?],
        vec![q("0")?, p(format!("x - {}*z", lambda))?, q("y")?],
    ])?;
    let target = p(format!("y^2*z + x*(x - z)*(x - {}*z)", lambda))?;
    MatrixFactorization::new(
        vec![a1, a2, a3],
        target,
        format!("legendre_cubic_mf[lambda={}]", lambda),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conic_root_verifies() {
        let root = conic_quadric_root().unwrap();
        assert!(root.verified());
        assert_eq!(root.size(), 2);
    }

    #[test]
    fn legendre_family_verifies() {
        for lambda in [2i64, 3, 5] {
            let mf = legendre_cubic_mf(lambda).unwrap();
            assert!(mf.verified(), "lambda = {}", lambda);
            assert_eq!(mf.size(), 3);
            assert_eq!(mf.length(), 3);
        }
    }
}
