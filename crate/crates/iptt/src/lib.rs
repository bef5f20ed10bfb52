//! Finite-dimensional toolkit for unitarily invariant norm inequalities of
//! inner product type integral transformers `X -> sum_t mu_t A_t X B_t`.

pub mod error;
pub mod harness;
pub mod herglotz;
pub mod ineq;
pub mod linalg;
pub mod norms;
pub mod tol;
pub mod transformer;

pub use error::Error;
pub use herglotz::HerglotzFn;
pub use ineq::{IneqId, IneqInstance, MarginResult};
pub use linalg::CMatrix;
pub use norms::UINorm;
pub use transformer::{IptiTransformer, OperatorField};

pub type Result<T> = std::result::Result<T, Error>;
