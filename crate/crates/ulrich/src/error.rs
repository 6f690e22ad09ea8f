//! Crate-wide error type.

use std::fmt;

/// Errors surfaced by the algebra, geometry and pipeline layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Syntax error while parsing a polynomial expression.
    Parse(String),
    /// A variable occurs in an expression but not in the declared spec.
    UndeclaredVariable(String),
    /// `zeta` used while the coefficient field is plain Q.
    ZetaUnavailable,
    /// Two operands disagree on their variable specification.
    VarSpecMismatch,
    /// Incompatible cyclotomic orders that cannot be unified.
    FieldMismatch(u32, u32),
    /// Matrix shapes do not line up.
    ShapeMismatch(String),
    /// Degree bookkeeping violated (details in message).
    Degree(String),
    /// Weighted degree requested for a non-homogeneous or zero polynomial.
    NotHomogeneous,
    /// Operation undefined on the zero polynomial.
    ZeroPolynomial,
    /// A product identity failed; carries the location of the first bad entry.
    Verification {
        row: usize,
        col: usize,
        detail: String,
    },
    /// A matrix entry violates a required degree profile.
    NonLinearEntry { row: usize, col: usize, found: String },
    /// Randomized search gave up.
    BudgetExhausted { attempts: u32, what: String },
    /// Two curves share a positive-dimensional component.
    CommonComponent,
    /// The (p-1)/2 prime chain breaks before reaching the base cases.
    ChainBreak { p: u64, at: u64 },
    /// A self-map of the line is not finite (the forms share a root).
    NotFinite,
    /// Anything else the caller got wrong.
    Invalid(String),
    /// Malformed JSON input.
    Json(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(m) => write!(f, "parse error: {}", m),
            Error::UndeclaredVariable(v) => write!(f, "undeclared variable `{}`", v),
            Error::ZetaUnavailable => {
                write!(f, "`zeta` requires a cyclotomic extension (D > 1)")
            }
            Error::VarSpecMismatch => write!(f, "operands use different variable specs"),
            Error::FieldMismatch(a, b) => {
                write!(f, "incompatible coefficient fields Q(zeta_{}) and Q(zeta_{})", a, b)
            }
            Error::ShapeMismatch(m) => write!(f, "shape mismatch: {}", m),
            Error::Degree(m) => write!(f, "degree error: {}", m),
            Error::NotHomogeneous => write!(f, "polynomial is not homogeneous (or is zero)"),
            Error::ZeroPolynomial => write!(f, "operation undefined on the zero polynomial"),
            Error::Verification { row, col, detail } => {
                write!(f, "verification failed at entry ({}, {}): {}", row, col, detail)
            }
            Error::NonLinearEntry { row, col, found } => {
                write!(f, "entry ({}, {}) is not linear: {}", row, col, found)
            }
            Error::BudgetExhausted { attempts, what } => {
                write!(f, "budget exhausted after {} attempts: {}", attempts, what)
            }
            Error::CommonComponent => write!(f, "curves share a common component"),
            Error::ChainBreak { p, at } => {
                write!(f, "prime chain from {} breaks at {} ((p-1)/2 not prime)", p, at)
            }
            Error::NotFinite => write!(f, "map is not finite: the forms share a root"),
            Error::Invalid(m) => write!(f, "invalid input: {}", m),
            Error::Json(m) => write!(f, "bad JSON: {}", m),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
