//! Exact feasibility engine for joint distributions of finite observables.
//!
//! Given finitely-valued observables and some of their moments, the engine
//! decides whether a joint distribution exists (exact rational LP with a
//! witness or a Farkas certificate), builds the deterministic factoring
//! hidden variable from a witness, evaluates the classical hidden-variable
//! inequalities with exact slack, and checks Gaussian correlation matrices.

pub mod algebraic;
pub mod error;
pub mod gaussian;
pub mod ghz;
pub mod hidden_variable;
pub mod inequality;
pub mod lp;
pub mod probability;
pub mod scalar;

pub use algebraic::{Interval, Real};
pub use error::{Error, Result};
pub use scalar::{fmt_q, parse_q, q, qi, Scalar, Q};
