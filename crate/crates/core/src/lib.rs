//! Exact construction and verification of split octonions, compositions of
//! quadratic forms, cubic norm structures and the Albert algebras H(𝓜, Γ).

pub mod albert;
pub mod composition;
pub mod cubic;
pub mod error;
pub mod harness;
pub mod json;
pub mod linalg;
pub mod poly;
pub mod quadspace;
pub mod report;
pub mod scalars;

pub use error::{Error, Result};
pub use linalg::{LinearMap, Matrix, Vector};
pub use composition::{AlgebraKind, BilinearMap, CompositionAlgebra, CompositionOfForms, TripleMap};
pub use quadspace::QuadraticSpace;
pub use report::{Check, Report, Status};
pub use scalars::{Ring, Scalar};
