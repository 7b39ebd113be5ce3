//! Shared fixtures and an independent quadrature oracle (tanh-sinh), kept
//! separate from the library's adaptive Gauss-Kronrod routines.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use clustered_hetnet::{ClusterModel, NetworkConfig, TierParams};

/// Tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let level = |h: f64| -> f64 {
        let n = (4.5 / h).ceil() as i64;
        let mut sum = 0.0;
        for i in -n..=n {
            let t = i as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            let w = FRAC_PI_2 * t.cosh() / s.cosh().powi(2);
            if w.is_nan() || w <= 0.0 || w.is_infinite() {
                continue;
            }
            // distance to the nearer endpoint, without cancellation
            let gap = 2.0 / ((2.0 * s.abs()).exp() + 1.0);
            let x = if s < 0.0 { a + half * gap } else { b - half * gap };
            if x <= a || x >= b {
                continue;
            }
            let v = f(x);
            if v.is_finite() {
                sum += w * v;
            }
        }
        sum * h * half
    };
    let mut h = 0.5;
    let mut prev = level(h);
    for _ in 0..10 {
        h *= 0.5;
        let next = level(h);
        if (next - prev).abs() <= 1e-14 * next.abs().max(1e-300) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Integral over `[a, inf)` through `x = a + scale * t / (1 - t)`.
pub fn tanh_sinh_inf<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64) -> f64 {
    tanh_sinh(
        |t| {
            let one_minus = 1.0 - t;
            f(a + scale * t / one_minus) * scale / (one_minus * one_minus)
        },
        0.0,
        1.0,
    )
}

/// `2 int_1^inf u / (1 + u^alpha / tau) du`.
pub fn g_oracle(alpha: f64, tau: f64) -> f64 {
    // u = 1/s keeps the slowly decaying tail on a finite interval
    2.0 * tanh_sinh(|s| s.powf(alpha - 3.0) / (s.powf(alpha) + 1.0 / tau), 0.0, 1.0)
}

/// `2 int_0^inf u / (1 + u^alpha / tau) du`.
pub fn h_oracle(alpha: f64, tau: f64) -> f64 {
    2.0 * tanh_sinh(|u| u / (1.0 + u.powf(alpha) / tau), 0.0, 1.0) + g_oracle(alpha, tau)
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Tier-1 density: one BS per 500 m disc.
pub fn lam1() -> f64 {
    1.0 / (PI * 500.0 * 500.0)
}

/// Two tiers: a 1000 W macro tier and a 1 W tier with equal open and closed
/// densities 100 times the macro density; users cluster around tier-2 BSs.
pub fn two_tier(cluster: ClusterModel, eta_db: f64) -> NetworkConfig {
    let l = lam1();
    NetworkConfig {
        alpha: 4.0,
        noise_power: 0.0,
        tiers: vec![
            TierParams::new(1000.0, l, 0.0).with_shadowing(0.0, eta_db),
            TierParams::new(1.0, 100.0 * l, 100.0 * l).with_shadowing(0.0, eta_db),
        ],
        cluster_tier: 2,
        cluster,
        mean_users_per_cluster: 1.0,
        ppp_user_density: 0.0,
    }
}

pub fn thomas(sigma: f64) -> ClusterModel {
    ClusterModel::Thomas { sigma }
}

pub fn matern(radius: f64) -> ClusterModel {
    ClusterModel::Matern { radius }
}

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
pub fn ks_distance<C: Fn(f64) -> f64>(mut sample: Vec<f64>, cdf: C) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}
