//! Symbolic calculus of pseudomeromorphic currents on coordinate charts,
//! with a numerical pairing oracle for cross-checking identities.

pub mod calculus;
pub mod current;
pub mod error;
pub mod form;
pub mod geometry;
pub mod monomial;
pub mod oracle;
pub mod poly;
pub mod random;
pub mod render;
pub mod scalar;

pub use calculus::HoloVectorField;
pub use current::{Current, ElementaryTerm, PvFactor, RawTerm, ResFactor, TermKey};
pub use error::{CalcError, OracleError, Result};
pub use form::{Basis, SmoothForm};
pub use geometry::{CoordinateVariety, LaurentForm, SepVerdict};
pub use monomial::{Monomial, VarContext, MAX_DIM};
pub use poly::{PolyCoeff, PolyKey};
pub use render::{render, Style};
pub use scalar::GaussRat;
