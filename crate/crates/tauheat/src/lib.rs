//! Heat-kernel coefficients of the 1-D Schrodinger operator L = d^2/dx^2 + u(x)
//! computed from a KdV tau-function.
//!
//! The potential is u = 2 (log tau)''. The library carries tau-functions as
//! exact exponential-polynomial sums, realizes the elementary Schur polynomials
//! as time-derivative operators, builds the kernel coefficients W_n(x,y) of the
//! product of reduced wave functions, and sums them into the Hadamard
//! coefficients H_n(x,y). Everything symbolic is exact rational; numbers appear
//! only at evaluation time, at a caller-chosen decimal precision.
//!
//! Three independent routes to the same quantities keep each other honest:
//!
//! * the closed W_n-sum for H_n together with its diagonal specialization,
//! * the defining recursion (x-y) dH_n/dx + n H_n = L H_{n-1} integrated by
//!   adaptive Gauss-Legendre quadrature (the `oracle` module),
//! * a pseudo-differential calculus computing the KdV flows [(L^(j/2))_+, L]
//!   directly in a differential polynomial ring (the `psdo` module).
//!
//! The crate is `no_std` (it allocates, but performs no IO); the companion
//! `tauheat-cli` crate carries file formats and the command-line front end.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod expr;
pub mod gegenbauer;
pub mod hadamard;
pub mod oracle;
pub mod psdo;
pub mod q;
pub mod real;
pub mod sato;
pub mod schur;
pub mod tol;

pub use error::Error;
pub use expr::phase::LinearPhase;
pub use expr::ratexp::RatExpExpression;
pub use expr::tau::{EvalPoint, ExpPoly, ExpPolyTerm, TauFunction, TimeRule};
pub use q::Rat;
pub use real::{Real, RealCtx};

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
