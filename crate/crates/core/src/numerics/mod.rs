//! Deterministic numerical kernel: quadrature, normal distribution
//! functions, seeded random numbers and small optimizers.

pub mod gauss_legendre;
pub mod normal;
pub mod optimize;
pub mod quadrature;
pub mod rng;

pub use normal::{bivariate_normal_cdf, std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use quadrature::Quadrature;
pub use rng::{RngPosition, SeededRng};
