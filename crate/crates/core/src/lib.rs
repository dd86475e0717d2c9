//! Fractional-order Pascal difference operator `P̂ = P·Δ^(τ)`.
//!
//! * [`coeffs`]: generalized binomials and the elementary triangles.
//! * [`operator`]: lazy lower-triangular operators, `P̂`, `P̂^{-1}`, truncation.
//! * [`exact`]: exact truncations: big integers for integer orders, rationals otherwise.
//! * [`transform`]: the `P̂`-transform, its inverse and the Schauder basis.
//! * [`spaces`]: `ℓp(P̂)` norms, parallelogram and inclusion checks.
//! * [`duals`]: α/β/γ-dual condition statistics.
//! * [`cli`]: the `frakpascal` command-line front end.

pub mod cli;
pub mod coeffs;
pub mod duals;
mod error;
pub mod exact;
pub mod operator;
pub mod spaces;
pub mod transform;

pub use coeffs::{CoeffTable, FracOrder};
pub use duals::{ConditionReport, DualReport, Statistic, VerdictHint};
pub use error::{CoeffError, DualError, SpaceError, TransformError};
pub use operator::{DenseTriangle, TriangularOperator};
pub use spaces::{PExponent, TruncatedNorm};
pub use transform::{BasisVector, FiniteSequence, PhatTransform};
