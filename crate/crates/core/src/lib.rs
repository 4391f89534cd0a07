//! Particle transport with power-law trapping in one dimension, solved two ways:
//!
//! * the Laplace-domain transport equation by analytical discrete ordinates
//!   ([`transport`]), brought back to the time domain by a double-exponential
//!   Bromwich quadrature ([`ilt`]);
//! * the time-fractional diffusion equation that the transport problem reduces
//!   to on long time scales, in Mainardi-function quadrature form ([`fde`]).
//!
//! [`harness`] ties both solvers together for profile generation, comparison and
//! validation; the `trapdiff` binary is its command-line front end.

pub mod error;
pub mod fde;
pub mod harness;
pub mod ilt;
pub mod specfun;
pub mod transport;
pub mod waiting;

pub use error::{Error, Result};
pub use num_complex::Complex64;
