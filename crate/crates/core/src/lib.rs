//! Exact and numerical machinery for classical modular forms:
//!
//! - [`qseries`]: truncated q-expansions over exact rationals;
//! - [`forms`]: constructors for `E_k`, `Delta`, eta quotients, the level-2
//!   forms, the Serre derivative, and coefficient-growth checks;
//! - [`spaces`]: exact bases of the small cusp-form spaces and decomposition;
//! - [`lseries`]: the shifted Dirichlet series `L_{f,m}(s)` with dominating
//!   tail bounds, plus its exact closed form for `Delta`;
//! - [`adjoint`]: Fourier coefficients of the Petersson adjoint of the Serre
//!   derivative, numerically and on an exact path;
//! - [`petersson`]: Petersson inner products by Gauss-Legendre quadrature
//!   over fundamental-domain translates;
//! - [`verify`]: the end-to-end identity checks wired into the CLI.

pub mod adjoint;
pub mod arith;
pub mod error;
pub mod forms;
pub mod hp;
mod intseries;
pub mod lseries;
pub mod petersson;
pub mod qseries;
pub mod quad;
pub mod rational;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use qseries::QExpansion;
pub use rational::Rational;
