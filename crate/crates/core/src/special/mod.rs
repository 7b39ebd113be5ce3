//! Special functions and quadrature primitives.

mod interference;
mod quadrature;
mod shadowing;

pub use interference::{closed_access_factor_h, gauss_2f1, interference_factor_g};
pub use quadrature::{
    integrate, integrate_semi_infinite, try_integrate, try_integrate_semi_infinite_scaled,
    QuadratureSpec,
};
pub use shadowing::{expect_over_shadow, gauss_hermite, lognormal_frac_moment, ShadowRule};
