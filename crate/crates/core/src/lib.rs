//! Block-iteration framework for iterative parallel-in-time methods applied to
//! the Dahlquist test equation `u' = λu`.
//!
//! Every method (Parareal, two-level time multigrid and its variants, PFASST,
//! SDC-based Jacobi and Gauss-Seidel sweeps) is written as a *primary block
//! iteration*
//!
//! ```text
//! u[n+1]^(k+1) = B10 u[n+1]^k + B01 u[n]^(k+1) + B00 u[n]^k
//! ```
//!
//! acting on block variables of `M` complex values. From the operator norms of
//! the three blocks, [`bounds`] derives closed-form, iteration-dependent error
//! bounds obtained with generating functions.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod discretization;
pub mod error;
pub mod iterations;
pub mod linalg;
pub mod operators;

pub use num_complex::Complex64;

pub use crate::error::{Error, Result};
