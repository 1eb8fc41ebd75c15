//! Exact computations in `sgl(C((z))^n)`, the Lie algebra of first-order
//! differential operators `gamma + f d/dz` on `C((z))^n` with scalar symbol,
//! and in its central extensions.
//!
//! * [`laurent`]: rationals, Laurent polynomials, Laurent matrices.
//! * [`diffop`]: operators, the bracket, the `L_r` / `E_ij^s` basis.
//! * [`grassmann`]: action matrices on `Z x Z` and the determinant trace cocycle.
//! * [`cocycles`]: closed-form cocycles and identity checks against the trace oracle.
//! * [`krichever`]: Krichever points of split bundles on the projective line.
//!
//! Everything is exact; there is no floating point anywhere in the crate.

pub mod cocycles;
pub mod diffop;
pub mod error;
pub mod grassmann;
pub mod krichever;
pub mod laurent;
pub mod sampling;

pub use cocycles::CocycleKind;
pub use diffop::{BasisTerm, DiffOp, FirstOrderOp, OperatorExpr};
pub use error::{Error, Result};
pub use grassmann::{trace_cocycle, Window, WindowMatrix};
pub use laurent::{LaurentPoly, MatLaurent, Rational};
