//! Log-normal shadowing: fractional moments and Gauss–Hermite deconditioning.

use std::f64::consts::{LN_10, PI};

use crate::error::{domain, Result};

use super::quadrature::QuadratureSpec;

/// Natural-log scale of one dB.
const DB_TO_NEPER: f64 = LN_10 / 10.0;

/// `E[V^exponent]` for `10 log10 V ~ Normal(mu_db, eta_db^2)`.
pub fn lognormal_frac_moment(mu_db: f64, eta_db: f64, exponent: f64) -> Result<f64> {
    if !(eta_db >= 0.0) {
        return Err(domain(format!("shadowing deviation must be non-negative, got {eta_db}")));
    }
    let a = exponent * DB_TO_NEPER;
    Ok((a * mu_db + 0.5 * a * a * eta_db * eta_db).exp())
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for weight `exp(-x^2)`.
///
/// Newton iteration on the orthonormal Hermite recurrence; nodes come out in
/// descending order and the weights sum to `sqrt(pi)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature rule over a log-normal shadowing gain: pairs of (gain, probability weight).
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRule {
    pub points: Vec<(f64, f64)>,
}

impl ShadowRule {
    pub fn new(mu_db: f64, eta_db: f64, nodes: usize) -> Result<Self> {
        if !(eta_db >= 0.0) {
            return Err(domain(format!("shadowing deviation must be non-negative, got {eta_db}")));
        }
        if eta_db == 0.0 {
            return Ok(Self {
                points: vec![(10f64.powf(mu_db / 10.0), 1.0)],
            });
        }
        if nodes < 2 {
            return Err(domain("Gauss-Hermite rule needs at least 2 nodes"));
        }
        let (x, w) = gauss_hermite(nodes);
        let norm = PI.sqrt();
        let points = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let db = mu_db + std::f64::consts::SQRT_2 * eta_db * xi;
                (10f64.powf(db / 10.0), wi / norm)
            })
            .collect();
        Ok(Self { points })
    }
}

/// `E[g(V)]` with `10 log10 V ~ Normal(mu_db, eta_db^2)`; exact point
/// evaluation `g(10^(mu_db/10))` when `eta_db == 0`.
pub fn expect_over_shadow<F>(mut g: F, mu_db: f64, eta_db: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let rule = ShadowRule::new(mu_db, eta_db, spec.hermite_nodes)?;
    let mut acc = 0.0;
    for &(v, weight) in &rule.points {
        acc += weight * g(v)?;
    }
    Ok(acc)
}
