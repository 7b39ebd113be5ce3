//! Network configuration, the displacement-theorem density transform, and the
//! distance distributions every analytic formula is assembled from.
//!
//! Tiers are indexed `1..=K` as in the usual K-tier notation. Index `0` is the
//! singleton tier holding the typical user's own cluster-center BS; it has no
//! density of its own and transmits at the power of the clustered tier.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, invalid, Result};
use crate::special::{integrate, integrate_semi_infinite, lognormal_frac_moment, QuadratureSpec};

/// One class of base stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    /// Transmit power, watts.
    pub power: f64,
    /// Open-access BS density, per m^2.
    pub lambda_open: f64,
    /// Closed-access BS density, per m^2.
    pub lambda_closed: f64,
    pub shadow_mu_db: f64,
    pub shadow_eta_db: f64,
}

impl TierParams {
    pub fn new(power: f64, lambda_open: f64, lambda_closed: f64) -> Self {
        Self {
            power,
            lambda_open,
            lambda_closed,
            shadow_mu_db: 0.0,
            shadow_eta_db: 0.0,
        }
    }

    pub fn with_shadowing(mut self, mu_db: f64, eta_db: f64) -> Self {
        self.shadow_mu_db = mu_db;
        self.shadow_eta_db = eta_db;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(invalid(format!("tier power must be positive, got {}", self.power)));
        }
        if !(self.lambda_open >= 0.0 && self.lambda_open.is_finite()) {
            return Err(invalid(format!("open density must be non-negative, got {}", self.lambda_open)));
        }
        if !(self.lambda_closed >= 0.0 && self.lambda_closed.is_finite()) {
            return Err(invalid(format!(
                "closed density must be non-negative, got {}",
                self.lambda_closed
            )));
        }
        if !self.shadow_mu_db.is_finite() {
            return Err(invalid("shadowing mean must be finite"));
        }
        if !(self.shadow_eta_db >= 0.0 && self.shadow_eta_db.is_finite()) {
            return Err(invalid(format!(
                "shadowing deviation must be non-negative, got {}",
                self.shadow_eta_db
            )));
        }
        Ok(())
    }
}

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied radial offset distribution, given as a consistent pdf/ccdf pair.
#[derive(Clone)]
pub struct GeneralRadial {
    pdf: RadialFn,
    ccdf: RadialFn,
    support_max: f64,
    median: f64,
}

impl fmt::Debug for GeneralRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralRadial")
            .field("support_max", &self.support_max)
            .field("median", &self.median)
            .finish_non_exhaustive()
    }
}

impl GeneralRadial {
    /// Builds the model and checks that the pair is a normalized pdf with its
    /// matching tail function. `support_max` may be `f64::INFINITY`.
    pub fn new<P, C>(pdf: P, ccdf: C, support_max: f64) -> Result<Self>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        const TOL: f64 = 1e-6;
        if !(support_max > 0.0) {
            return Err(invalid("radial support must be positive"));
        }
        if (ccdf(0.0) - 1.0).abs() > TOL {
            return Err(invalid("radial ccdf must equal 1 at the origin"));
        }
        let median = bisect_ccdf(&ccdf, 0.5, support_max)
            .ok_or_else(|| invalid("radial ccdf never falls to one half"))?;
        let spec = QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            ..QuadratureSpec::default()
        };
        let tail_mass = |from: f64| -> Result<f64> {
            if support_max.is_finite() {
                integrate(&pdf, from, support_max, &spec)
            } else {
                crate::special::try_integrate_semi_infinite_scaled(|y| Ok(pdf(y)), from, median, &spec)
            }
        };
        let mass = tail_mass(0.0)?;
        if (mass - 1.0).abs() > TOL {
            return Err(invalid(format!("radial pdf integrates to {mass}, not 1")));
        }
        let far = if support_max.is_finite() { support_max } else { median * 1e4 };
        if ccdf(far).abs() > TOL {
            return Err(invalid("radial ccdf must vanish at the end of the support"));
        }
        let grid_end = if support_max.is_finite() { support_max } else { 4.0 * median };
        for step in 1..8 {
            let y = grid_end * step as f64 / 8.0;
            let tail = tail_mass(y)?;
            if (tail - ccdf(y)).abs() > TOL {
                return Err(invalid(format!("radial ccdf disagrees with the pdf tail at y = {y}")));
            }
        }
        Ok(Self {
            pdf: Arc::new(pdf),
            ccdf: Arc::new(ccdf),
            support_max,
            median,
        })
    }

    pub fn pdf(&self, y: f64) -> f64 {
        if y < 0.0 || y > self.support_max {
            0.0
        } else {
            (self.pdf)(y)
        }
    }

    pub fn ccdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            1.0
        } else if y >= self.support_max {
            0.0
        } else {
            (self.ccdf)(y)
        }
    }

    pub fn support_max(&self) -> f64 {
        self.support_max
    }

    /// Offset `y` with `ccdf(y) = level`, by bisection.
    pub fn inverse_ccdf(&self, level: f64) -> f64 {
        bisect_ccdf(&*self.ccdf, level, self.support_max).unwrap_or(self.support_max)
    }

    pub fn median(&self) -> f64 {
        self.median
    }
}

/// Smallest `y` with `ccdf(y) <= level`, by bracketing and bisection.
fn bisect_ccdf<C: Fn(f64) -> f64 + ?Sized>(ccdf: &C, level: f64, support_max: f64) -> Option<f64> {
    let mut lo = 0.0;
    let mut hi = if support_max.is_finite() { support_max } else { 1.0 };
    if !support_max.is_finite() {
        let mut tries = 0;
        while ccdf(hi) > level {
            lo = hi;
            hi *= 2.0;
            tries += 1;
            if tries > 2000 {
                return None;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ccdf(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Distribution of the typical user's offset from its cluster center, through
/// its radial marginal `Y0`.
#[derive(Debug, Clone)]
pub enum ClusterModel {
    /// Isotropic Gaussian offsets with per-coordinate deviation `sigma` (m).
    Thomas { sigma: f64 },
    /// Uniform offsets in a disc of `radius` (m).
    Matern { radius: f64 },
    General(GeneralRadial),
}

impl ClusterModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Thomas { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(invalid(format!("Thomas sigma must be positive, got {sigma}")))
            }
            Self::Matern { radius } if !(radius > 0.0 && radius.is_finite()) => {
                Err(invalid(format!("Matern radius must be positive, got {radius}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Thomas { .. } => "thomas",
            Self::Matern { .. } => "matern",
            Self::General(_) => "general",
        }
    }

    pub fn pdf(&self, y: f64) -> f64 {
        cluster_dist_pdf(self, y)
    }

    pub fn ccdf(&self, y: f64) -> f64 {
        cluster_dist_ccdf(self, y)
    }

    /// Largest possible offset; infinite for unbounded models.
    pub fn support_max(&self) -> f64 {
        match self {
            Self::Thomas { .. } => f64::INFINITY,
            Self::Matern { radius } => *radius,
            Self::General(g) => g.support_max(),
        }
    }

    /// Characteristic length of the offset distribution.
    pub fn scale(&self) -> f64 {
        match self {
            Self::Thomas { sigma } => *sigma,
            Self::Matern { radius } => *radius,
            Self::General(g) => g.median(),
        }
    }

    /// The same model with every length multiplied by `zeta`.
    ///
    /// General models are rescaled through `f_Z(z) = f_Y(z / zeta) / zeta`.
    pub fn scaled(&self, zeta: f64) -> Result<Self> {
        if !(zeta > 0.0) {
            return Err(domain(format!("scale factor must be positive, got {zeta}")));
        }
        Ok(match self {
            Self::Thomas { sigma } => Self::Thomas { sigma: sigma * zeta },
            Self::Matern { radius } => Self::Matern { radius: radius * zeta },
            Self::General(g) => {
                let (pdf, ccdf) = (g.pdf.clone(), g.ccdf.clone());
                Self::General(GeneralRadial {
                    pdf: Arc::new(move |z| pdf(z / zeta) / zeta),
                    ccdf: Arc::new(move |z| ccdf(z / zeta)),
                    support_max: g.support_max * zeta,
                    median: g.median * zeta,
                })
            }
        })
    }
}

/// Radial pdf of the distance from the typical user to its cluster center.
pub fn cluster_dist_pdf(model: &ClusterModel, y0: f64) -> f64 {
    if y0 < 0.0 {
        return 0.0;
    }
    match model {
        ClusterModel::Thomas { sigma } => {
            let s2 = sigma * sigma;
            y0 / s2 * (-y0 * y0 / (2.0 * s2)).exp()
        }
        ClusterModel::Matern { radius } => {
            if y0 <= *radius {
                2.0 * y0 / (radius * radius)
            } else {
                0.0
            }
        }
        ClusterModel::General(g) => g.pdf(y0),
    }
}

/// Radial ccdf companion of [`cluster_dist_pdf`].
pub fn cluster_dist_ccdf(model: &ClusterModel, y0: f64) -> f64 {
    if y0 <= 0.0 {
        return 1.0;
    }
    match model {
        ClusterModel::Thomas { sigma } => (-y0 * y0 / (2.0 * sigma * sigma)).exp(),
        ClusterModel::Matern { radius } => {
            if y0 >= *radius {
                0.0
            } else {
                (radius * radius - y0 * y0) / (radius * radius)
            }
        }
        ClusterModel::General(g) => g.ccdf(y0),
    }
}

/// Full network description for a typical user of the clustered tier.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub alpha: f64,
    /// Thermal noise power, watts.
    pub noise_power: f64,
    /// Tiers `1..=K`, stored at indices `0..K`.
    pub tiers: Vec<TierParams>,
    /// 1-based index of the tier whose BSs are cluster centers.
    pub cluster_tier: usize,
    pub cluster: ClusterModel,
    pub mean_users_per_cluster: f64,
    /// Density of users placed independently of the BSs, per m^2.
    pub ppp_user_density: f64,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must exceed 2, got {}", self.alpha)));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(invalid("noise power must be non-negative"));
        }
        if self.tiers.is_empty() {
            return Err(invalid("at least one tier is required"));
        }
        for (idx, tier) in self.tiers.iter().enumerate() {
            tier.validate()
                .map_err(|e| invalid(format!("tier {}: {e}", idx + 1)))?;
        }
        if self.cluster_tier == 0 || self.cluster_tier > self.tiers.len() {
            return Err(invalid(format!(
                "cluster_tier must be in 1..={}, got {}",
                self.tiers.len(),
                self.cluster_tier
            )));
        }
        self.cluster.validate()?;
        if !(self.mean_users_per_cluster >= 0.0) {
            return Err(invalid("mean users per cluster must be non-negative"));
        }
        if !(self.ppp_user_density >= 0.0) {
            return Err(invalid("PPP user density must be non-negative"));
        }
        Ok(())
    }

    /// Number of real tiers `K`.
    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    /// Parameters of tier `k` in `1..=K`; tier 0 maps to the clustered tier.
    pub fn tier(&self, k: usize) -> &TierParams {
        if k == 0 {
            &self.tiers[self.cluster_tier - 1]
        } else {
            &self.tiers[k - 1]
        }
    }

    /// Transmit power of tier `k`, with `P_0 = P_i`.
    pub fn power(&self, k: usize) -> f64 {
        self.tier(k).power
    }

    /// Shadowing parameters (mu, eta) of the cluster-center link.
    pub fn center_shadowing(&self) -> (f64, f64) {
        let t = self.tier(0);
        (t.shadow_mu_db, t.shadow_eta_db)
    }

    /// Whether every link is free of random shadowing.
    pub fn is_unshadowed(&self) -> bool {
        self.tiers.iter().all(|t| t.shadow_eta_db == 0.0)
    }
}

/// Noise power giving `snr_db` at the macro cell edge: `N0 = P_1 d^-alpha / SNR`,
/// with `d = 1 / sqrt(pi lambda_1)` the mean cell radius of tier 1.
pub fn noise_from_cell_edge_snr(cfg: &NetworkConfig, snr_db: f64) -> Result<f64> {
    let macro_tier = cfg.tier(1);
    let density = macro_tier.lambda_open + macro_tier.lambda_closed;
    if !(density > 0.0) {
        return Err(invalid("cell-edge noise reference needs a tier-1 density"));
    }
    let edge = 1.0 / (PI * density).sqrt();
    Ok(macro_tier.power * edge.powf(-cfg.alpha) / 10f64.powf(snr_db / 10.0))
}

/// Shadowing-equivalent densities and pairwise power ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveNetwork {
    pub alpha: f64,
    eff_lambda_open: Vec<f64>,
    eff_lambda_closed: Vec<f64>,
    /// Powers indexed `0..=K`.
    powers: Vec<f64>,
}

impl EffectiveNetwork {
    pub fn num_tiers(&self) -> usize {
        self.eff_lambda_open.len()
    }

    /// Equivalent open density of tier `k` in `1..=K`.
    pub fn eff_open(&self, k: usize) -> f64 {
        self.eff_lambda_open[k - 1]
    }

    /// Equivalent closed density of tier `k` in `1..=K`.
    pub fn eff_closed(&self, k: usize) -> f64 {
        self.eff_lambda_closed[k - 1]
    }

    /// `(P_k / P_j)^(1/alpha)` for `j, k` in `0..=K`.
    pub fn power_ratio(&self, j: usize, k: usize) -> f64 {
        if j == k {
            return 1.0;
        }
        (self.powers[k] / self.powers[j]).powf(1.0 / self.alpha)
    }
}

/// Applies the displacement theorem tier by tier: `lambda_bar = lambda * E[V^(2/alpha)]`.
pub fn effective_network(cfg: &NetworkConfig) -> Result<EffectiveNetwork> {
    cfg.validate()?;
    let delta = 2.0 / cfg.alpha;
    let mut open = Vec::with_capacity(cfg.tiers.len());
    let mut closed = Vec::with_capacity(cfg.tiers.len());
    for t in &cfg.tiers {
        let m = lognormal_frac_moment(t.shadow_mu_db, t.shadow_eta_db, delta)?;
        open.push(t.lambda_open * m);
        closed.push(t.lambda_closed * m);
    }
    let powers = (0..=cfg.tiers.len()).map(|k| cfg.power(k)).collect();
    Ok(EffectiveNetwork {
        alpha: cfg.alpha,
        eff_lambda_open: open,
        eff_lambda_closed: closed,
        powers,
    })
}

/// Pdf of the distance to the nearest equivalent BS of open tier `k`.
pub fn nearest_dist_pdf(k: usize, r: f64, net: &EffectiveNetwork) -> Result<f64> {
    let lam = nearest_density(k, net)?;
    if r < 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * PI * lam * r * (-PI * lam * r * r).exp())
}

/// Ccdf of the distance to the nearest equivalent BS of open tier `k`.
pub fn nearest_dist_ccdf(k: usize, r: f64, net: &EffectiveNetwork) -> Result<f64> {
    let lam = nearest_density(k, net)?;
    if r <= 0.0 {
        return Ok(1.0);
    }
    Ok((-PI * lam * r * r).exp())
}

fn nearest_density(k: usize, net: &EffectiveNetwork) -> Result<f64> {
    if k == 0 {
        return Err(domain(
            "tier 0 is the cluster center; its distance follows the cluster model",
        ));
    }
    if k > net.num_tiers() {
        return Err(domain(format!("tier {k} does not exist")));
    }
    Ok(net.eff_open(k))
}

/// Total mass of the cluster model's radial pdf, for normalization checks.
pub fn cluster_pdf_mass(model: &ClusterModel, spec: &QuadratureSpec) -> Result<f64> {
    let sup = model.support_max();
    if sup.is_finite() {
        integrate(|y| cluster_dist_pdf(model, y), 0.0, sup, spec)
    } else {
        let scale = model.scale();
        integrate_semi_infinite(|t| scale * cluster_dist_pdf(model, scale * t), 0.0, spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_tier() -> NetworkConfig {
        let l1 = 1.0 / (PI * 500.0 * 500.0);
        NetworkConfig {
            alpha: 4.0,
            noise_power: 0.0,
            tiers: vec![
                TierParams::new(1000.0, l1, 0.0),
                TierParams::new(1.0, 100.0 * l1, 100.0 * l1).with_shadowing(0.0, 8.0),
            ],
            cluster_tier: 2,
            cluster: ClusterModel::Thomas { sigma: 20.0 },
            mean_users_per_cluster: 10.0,
            ppp_user_density: 0.0,
        }
    }

    #[test]
    fn unshadowed_densities_pass_through() {
        let mut cfg = two_tier();
        cfg.tiers[1].shadow_eta_db = 0.0;
        let net = effective_network(&cfg).unwrap();
        assert_eq!(net.eff_open(1), cfg.tiers[0].lambda_open);
        assert_eq!(net.eff_open(2), cfg.tiers[1].lambda_open);
        assert_eq!(net.eff_closed(2), cfg.tiers[1].lambda_closed);
    }

    #[test]
    fn shadowing_inflates_density() {
        let cfg = two_tier();
        let net = effective_network(&cfg).unwrap();
        let ratio = net.eff_open(2) / cfg.tiers[1].lambda_open;
        assert!((ratio - 1.5283).abs() < 1e-4);
        assert!(net.eff_closed(2) >= cfg.tiers[1].lambda_closed);
    }

    #[test]
    fn power_ratios() {
        let net = effective_network(&two_tier()).unwrap();
        assert!((net.power_ratio(2, 1) - 10f64.powf(0.75)).abs() < 1e-12);
        assert_eq!(net.power_ratio(1, 1), 1.0);
        assert!((net.power_ratio(1, 2) * net.power_ratio(2, 1) - 1.0).abs() < 1e-14);
        // tier 0 inherits the clustered tier's power
        assert_eq!(net.power_ratio(0, 2), 1.0);
    }

    #[test]
    fn nearest_distance_values() {
        let mut cfg = two_tier();
        cfg.tiers[0].lambda_open = 1.0 / PI;
        let net = effective_network(&cfg).unwrap();
        assert_eq!(nearest_dist_pdf(1, 0.0, &net).unwrap(), 0.0);
        assert_eq!(nearest_dist_ccdf(1, 0.0, &net).unwrap(), 1.0);
        let v = nearest_dist_pdf(1, 1.0, &net).unwrap();
        assert!((v - 2.0 * (-1f64).exp()).abs() < 1e-14);
        assert!(nearest_dist_pdf(0, 1.0, &net).is_err());
        assert!(nearest_dist_ccdf(3, 1.0, &net).is_err());
    }

    #[test]
    fn cluster_distance_values() {
        let m = ClusterModel::Matern { radius: 10.0 };
        assert!((cluster_dist_pdf(&m, 10.0) - 0.2).abs() < 1e-15);
        assert_eq!(cluster_dist_ccdf(&m, 10.0), 0.0);
        assert_eq!(cluster_dist_pdf(&m, 10.5), 0.0);
        let t = ClusterModel::Thomas { sigma: 20.0 };
        let v = cluster_dist_pdf(&t, 20.0);
        assert!((v - 0.05 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.030327).abs() < 1e-6);
        let mass = cluster_pdf_mass(&t, &QuadratureSpec::default()).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn validation_messages() {
        let mut cfg = two_tier();
        cfg.alpha = 2.0;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("alpha must exceed 2"), "{err}");
        let mut cfg = two_tier();
        cfg.cluster = ClusterModel::Matern { radius: -5.0 };
        assert!(cfg.validate().is_err());
        let mut cfg = two_tier();
        cfg.cluster_tier = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = two_tier();
        cfg.tiers[0].power = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn general_radial_checks_consistency() {
        // Rayleigh with sigma = 3 supplied as a general model
        let g = GeneralRadial::new(
            |y| y / 9.0 * (-y * y / 18.0).exp(),
            |y| (-y * y / 18.0).exp(),
            f64::INFINITY,
        )
        .unwrap();
        let expected_median = 3.0 * (2.0 * 2f64.ln()).sqrt();
        assert!((g.median() - expected_median).abs() < 1e-9);
        // pdf that is not normalized
        assert!(GeneralRadial::new(|y| 2.0 * y, |y| 1.0 - y * y, 2.0).is_err());
        // mismatched ccdf
        assert!(GeneralRadial::new(|y| 2.0 * y, |y| 1.0 - y, 1.0).is_err());
        assert!(GeneralRadial::new(|y| 2.0 * y, |y| 1.0 - y * y, 1.0).is_ok());
    }

    #[test]
    fn cell_edge_noise_reference() {
        let cfg = two_tier();
        let n0 = noise_from_cell_edge_snr(&cfg, 0.0).unwrap();
        assert!((n0 - 1000.0 * 500f64.powi(-4)).abs() / n0 < 1e-12);
    }
}
