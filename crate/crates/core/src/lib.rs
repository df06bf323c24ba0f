//! Weighted moments of the Riemann zeta function on the critical line and
//! the special functions behind their exact formulas: the auto-correlation
//! function `A` with its analytic continuation, Ramanujan's function `B`,
//! the weight-one Eisenstein series `S₀`, and the period function `ψ`.
//!
//! Every identity is evaluated through at least two independent numerical
//! routes; the [`verify`] module packages those comparisons as suites.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod autocorr;
pub mod eisenstein;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod verify;
pub mod zeta_line;

pub use error::{Error, Result};
pub use numerics::{ComplexValue, QuadSpec};
