//! Exact matrix factorizations of homogeneous polynomials and cohomological
//! certificates for Ulrich bundles on cyclic coverings of projective space.
//!
//! The crate is organized around a small exact-arithmetic stack:
//!
//! - [`field`]: rationals and cyclotomic extensions Q(zeta_D);
//! - [`poly`]: sparse weighted-homogeneous multivariate polynomials + parser;
//! - [`matrix`], [`linalg`]: polynomial matrices and exact scalar linear algebra;
//! - [`matfac`]: matrix factorizations, matrix d-th roots, and the
//!   constructions that combine them (cyclic shifts, root-of-unity splitting,
//!   companion blocks, two-factor and zeta-tensor combines);
//! - [`veronese`]: rewriting a degree d*k form as a degree-d form in Veronese
//!   coordinates and the covering factorization pipeline;
//! - [`cohomology`]: exact sheaf-cohomology tables for cokernels of linear
//!   matrices on projective space and the Ulrich vanishing certificates;
//! - [`plane`]: instance-level plane geometry (decompositions, smoothness and
//!   transversality by resultants, splitting types on the line, and the
//!   even/odd covering pipelines);
//! - [`ranks`]: integer rank recursions and the pushforward modification
//!   ledger;
//! - [`report`]: reproducible certificate files for the CLI.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cohomology;
pub mod error;
pub mod field;
pub mod instances;
pub mod linalg;
pub mod matfac;
pub mod matrix;
pub mod plane;
pub mod poly;
pub mod ranks;
pub mod report;
pub mod veronese;

pub use error::{Error, Result};
