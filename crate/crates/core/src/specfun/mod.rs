//! Special functions and quadrature shared by the transport and diffusion solvers.

mod expint;
pub mod gamma;
mod gauss_legendre;
mod mainardi;
pub mod quad;

pub use expint::gen_exp_integral_scaled;
pub use gamma::{gamma, recip_gamma};
pub use gauss_legendre::{gauss_legendre, QuadratureSet};
pub use mainardi::{mainardi, mainardi_half, mainardi_series, stable_density_g, CANCELLATION_LIMIT};
