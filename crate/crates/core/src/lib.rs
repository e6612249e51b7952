//! Exact computation of the low-degree cohomology of finite-dimensional
//! vertex algebras.
//!
//! A vertex algebra here is a finite-dimensional space `V` with a vacuum
//! vector, a derivation `D` and a `z`-product `a ⊙_z b ∈ V((z))`. The crate
//! checks the vertex-algebra and module axioms in formal variables, builds
//! the cochain spaces `C¹`, `C²`, computes `H⁰`, `H¹`, `H²` by Gaussian
//! elimination over `ℚ`, and realizes second cohomology classes as
//! square-zero extensions and first-order deformations.
//!
//! All arithmetic is exact. Structures whose derivation is nilpotent give
//! Laurent polynomials and exact verdicts; other structures are expanded to
//! a truncation order and every verdict says so.

pub mod cochain;
pub mod cohomology;
pub mod construct;
pub mod document;
pub mod fixtures;
pub mod formal;
pub mod harrison;
pub mod linalg;
pub mod scalars;
pub mod valg;

mod vector;

pub use cochain::{OneCochain, TwoCochain};
pub use cohomology::CohomologyReport;
pub use construct::{FirstOrderDeformation, SquareZeroExtension};
pub use document::AlgebraDocument;
pub use formal::{VecSeries1, VecSeries2, Window};
pub use linalg::QMatrix;
pub use scalars::{DualScalar, Rational, Scalar};
pub use valg::{FiniteVertexAlgebra, ModuleStructure, Settings};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("window {0} contains no valid coefficient")]
    EmptyWindow(Window),
    #[error("series at pair ({a}, {b}) is not a translation-generated cochain: coefficient of z^{exponent} disagrees")]
    Extraction { a: usize, b: usize, exponent: i64 },
    #[error("coboundary space is not contained in the cocycle space ({0})")]
    Containment(String),
    #[error("section rejected: {0}")]
    Section(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
