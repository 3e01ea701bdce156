//! Green's functions, closed-form solutions and fractional moments of the
//! space-time fractional reaction-diffusion equation
//! `₀D_t^β N = η ₋∞D_x^α N + φ(x, t)`.

pub mod cli;
pub mod error;
pub mod hfox;
pub mod moments;
pub mod oracle;
pub mod quad;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
