//! Gauss hypergeometric function on the negative real axis and the two
//! interference integrals built on it.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate, QuadratureSpec};
use crate::error::{domain, Result};

/// `2F1(a, b; c; x)` for `c > b > 0` and `x <= 0`, evaluated from Euler's
/// integral representation.
///
/// The integral is split at `z = 1/2`; the halves are mapped with
/// `z = s^(1/b)` and `1 - z = t^(1/(c-b))` so neither endpoint power
/// singularity reaches the adaptive rule.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(b > 0.0 && c > b) {
        return Err(domain(format!("2F1 requires c > b > 0, got b={b}, c={c}")));
    }
    if !(x <= 0.0) {
        return Err(domain(format!("2F1 requires x <= 0, got {x}")));
    }
    if !a.is_finite() {
        return Err(domain(format!("2F1 requires finite a, got {a}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let d = c - b;
    let kernel = |z: f64| (1.0 - x * z).powf(-a);

    let head = integrate(
        |s| {
            let z = s.powf(1.0 / b);
            (1.0 - z).powf(d - 1.0) * kernel(z) / b
        },
        0.0,
        0.5f64.powf(b),
        spec,
    )?;
    let tail = integrate(
        |t| {
            let z = 1.0 - t.powf(1.0 / d);
            z.powf(b - 1.0) * kernel(z) / d
        },
        0.0,
        0.5f64.powf(d),
        spec,
    )?;
    let log_norm = ln_gamma(c) - ln_gamma(b) - ln_gamma(d);
    Ok(log_norm.exp() * (head + tail))
}

fn check_alpha_tau(alpha: f64, tau: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(domain(format!("path-loss exponent must exceed 2, got {alpha}")));
    }
    if !(tau >= 0.0) {
        return Err(domain(format!("SIR threshold must be non-negative, got {tau}")));
    }
    Ok(())
}

/// Open-access interference factor `G(alpha, tau) = 2 * int_1^inf u / (1 + u^alpha / tau) du`.
pub fn interference_factor_g(alpha: f64, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_alpha_tau(alpha, tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let b = 1.0 - 2.0 / alpha;
    let f = gauss_2f1(1.0, b, 1.0 + b, -tau, spec)?;
    Ok(2.0 * tau / (alpha - 2.0) * f)
}

/// Closed-access interference factor `H(alpha, tau) = tau^(2/alpha) * 2 pi csc(2 pi / alpha) / alpha`.
pub fn closed_access_factor_h(alpha: f64, tau: f64) -> Result<f64> {
    check_alpha_tau(alpha, tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let delta = 2.0 / alpha;
    Ok(tau.powf(delta) * 2.0 * PI / (alpha * (PI * delta).sin()))
}
