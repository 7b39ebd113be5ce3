//! Association probabilities, serving-distance laws, interference Laplace
//! transforms, coverage, bounds, the large-cluster limit and mixed users.
//!
//! Every quantity conditioned on the cluster-center shadowing gain `v0` has a
//! `*_conditional` form; [`Analyzer::coverage`] deconditions over `v0` with the
//! Gauss–Hermite rule from [`crate::special::ShadowRule`].
//!
//! Integrals over the serving distance `w` are assembled from the "joint
//! density" `A_j * f_Wj(w | v0)`, which avoids dividing by small association
//! probabilities inside integrands.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::network::{effective_network, ClusterModel, EffectiveNetwork, NetworkConfig};
use crate::special::{
    closed_access_factor_h, interference_factor_g, try_integrate, try_integrate_semi_infinite_scaled,
    QuadratureSpec, ShadowRule,
};

/// `exp(-x) = 1e-40` at this `x`; beyond it Gaussian-type envelopes are dropped.
const ENVELOPE_CUTOFF: f64 = 92.103_403_719_761_83;

/// Coverage of a typical clustered user at one SIR threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// SIR threshold, linear.
    pub tau: f64,
    /// Association probabilities for tiers `0..=K`.
    pub assoc: Vec<f64>,
    /// Coverage given association with each tier `0..=K`.
    pub per_tier_coverage: Vec<f64>,
    pub total: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Coverage of a user placed independently of the BSs; `None` without open tiers.
    pub ppp_limit: Option<f64>,
    /// Largest gap between closed-form and quadrature bounds, when closed forms apply.
    pub bounds_residual: Option<f64>,
}

/// Interference factors shared by all tiers at one threshold.
#[derive(Debug, Clone, Copy)]
struct Factors {
    tau: f64,
    g: f64,
    h: f64,
}

enum WRange {
    Finite(f64),
    SemiInfinite(f64),
}

/// Analytic engine bound to one validated network.
#[derive(Debug, Clone)]
pub struct Analyzer {
    cfg: NetworkConfig,
    net: EffectiveNetwork,
    quad: QuadratureSpec,
}

impl Analyzer {
    pub fn new(cfg: NetworkConfig, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let net = effective_network(&cfg)?;
        Ok(Self { cfg, net, quad })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn network(&self) -> &EffectiveNetwork {
        &self.net
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    fn k(&self) -> usize {
        self.net.num_tiers()
    }

    fn check_tier(&self, j: usize) -> Result<()> {
        if j > self.k() {
            return Err(domain(format!("tier {j} does not exist (K = {})", self.k())));
        }
        Ok(())
    }

    fn check_open_tier(&self, j: usize) -> Result<()> {
        if j == 0 {
            return Err(domain("tier 0 is not a Poisson tier"));
        }
        self.check_tier(j)
    }

    fn check_v0(v0: f64) -> Result<()> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(domain(format!("shadowing gain must be positive, got {v0}")));
        }
        Ok(())
    }

    fn factors(&self, tau: f64) -> Result<Factors> {
        if !(tau >= 0.0) {
            return Err(domain(format!("SIR threshold must be non-negative, got {tau}")));
        }
        if tau.is_infinite() {
            return Err(domain("SIR threshold must be finite"));
        }
        Ok(Factors {
            tau,
            g: interference_factor_g(self.cfg.alpha, tau, &self.quad)?,
            h: closed_access_factor_h(self.cfg.alpha, tau)?,
        })
    }

    fn pbar2(&self, j: usize, k: usize) -> f64 {
        let p = self.net.power_ratio(j, k);
        p * p
    }

    /// `sum_{k>=1} Pbar_jk^2 lambda_bar_k`: the nearest-BS exponent seen from tier `j`.
    fn assoc_exponent(&self, j: usize) -> f64 {
        (1..=self.k()).map(|k| self.pbar2(j, k) * self.net.eff_open(k)).sum()
    }

    /// `sum_k Pbar_jk^2 (lambda_bar_k G + lambda_bar'_k H)`: open and closed interference exponent.
    fn laplace_exponent(&self, j: usize, f: &Factors) -> f64 {
        (1..=self.k())
            .map(|k| self.pbar2(j, k) * (self.net.eff_open(k) * f.g + self.net.eff_closed(k) * f.h))
            .sum()
    }

    /// `sum_k Pbar_jk^2 (lambda_bar_k (G + 1) + lambda_bar'_k H)`.
    fn coverage_exponent(&self, j: usize, f: &Factors) -> f64 {
        self.assoc_exponent(j) + self.laplace_exponent(j, f)
    }

    /// `v0^(1/alpha)` scaling of cluster-center distances.
    fn v_root(&self, v0: f64) -> f64 {
        v0.powf(1.0 / self.cfg.alpha)
    }

    /// Equivalent density of the cluster center for Thomas clusters, `v0^(2/alpha) / (2 pi sigma^2)`.
    fn thomas_center_density(&self, sigma: f64, v0: f64) -> f64 {
        v0.powf(2.0 / self.cfg.alpha) / (2.0 * PI * sigma * sigma)
    }

    /// `A_{j|v0} f_{Wj}(w | v0)` from the cluster pdf/ccdf and the Poisson ccdfs.
    fn joint_density(&self, j: usize, w: f64, v0: f64) -> f64 {
        if w < 0.0 {
            return 0.0;
        }
        let vr = self.v_root(v0);
        let envelope = (-PI * self.assoc_exponent(j) * w * w).exp();
        if j == 0 {
            envelope * vr * self.cfg.cluster.pdf(vr * w)
        } else {
            let lam = self.net.eff_open(j);
            let center = self.cfg.cluster.ccdf(vr * self.net.power_ratio(j, 0) * w);
            2.0 * PI * lam * w * envelope * center
        }
    }

    /// Range of `w` outside of which the joint density of tier `j` is negligible or zero.
    fn w_range(&self, j: usize, v0: f64) -> WRange {
        let vr = self.v_root(v0);
        let reach = if j == 0 { vr } else { vr * self.net.power_ratio(j, 0) };
        let support = self.cfg.cluster.support_max() / reach;
        let d = self.assoc_exponent(j);
        let envelope = if d > 0.0 {
            (ENVELOPE_CUTOFF / (PI * d)).sqrt()
        } else {
            match self.cfg.cluster {
                ClusterModel::Thomas { sigma } => sigma * (2.0 * ENVELOPE_CUTOFF).sqrt() / reach,
                _ => f64::INFINITY,
            }
        };
        let upper = support.min(envelope);
        if upper.is_finite() {
            WRange::Finite(upper)
        } else {
            WRange::SemiInfinite(self.cfg.cluster.scale() / reach)
        }
    }

    fn integrate_w<F>(&self, j: usize, v0: f64, f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        match self.w_range(j, v0) {
            WRange::Finite(upper) => try_integrate(f, 0.0, upper, &self.quad),
            WRange::SemiInfinite(scale) => try_integrate_semi_infinite_scaled(f, 0.0, scale, &self.quad),
        }
    }

    fn inner_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.quad.abs_tol * 0.1,
            rel_tol: self.quad.rel_tol * 0.1,
            ..self.quad
        }
    }

    // ---------------------------------------------------------------- association

    /// Conditional association probability of tier `j` given `V0 = v0`, by
    /// direct quadrature of the nearest-distance ccdfs against the relevant density.
    pub fn assoc_prob_conditional(&self, j: usize, v0: f64) -> Result<f64> {
        self.check_tier(j)?;
        Self::check_v0(v0)?;
        if j == 0 {
            // E over Y0 of prod_k ccdf_Rk(Pbar_0k v0^(-1/alpha) Y0)
            let vr = self.v_root(v0);
            let d = self.assoc_exponent(0) / (vr * vr);
            let model = &self.cfg.cluster;
            let f = |y: f64| Ok((-PI * d * y * y).exp() * model.pdf(y));
            let sup = model.support_max();
            let cut = if d > 0.0 { (ENVELOPE_CUTOFF / (PI * d)).sqrt() } else { f64::INFINITY };
            let upper = match model {
                ClusterModel::Thomas { sigma } => cut.min(sigma * (2.0 * ENVELOPE_CUTOFF).sqrt()),
                _ => cut.min(sup),
            };
            if upper.is_finite() {
                try_integrate(f, 0.0, upper, &self.quad)
            } else {
                try_integrate_semi_infinite_scaled(f, 0.0, model.scale(), &self.quad)
            }
        } else {
            if self.net.eff_open(j) == 0.0 {
                return Ok(0.0);
            }
            self.integrate_w(j, v0, |r| Ok(self.joint_density(j, r, v0)))
        }
    }

    /// Closed-form association for Thomas clusters:
    /// `lambda_bar_j / sum_{k=0}^K Pbar_jk^2 lambda_bar_k`.
    pub fn assoc_thomas_closed(&self, j: usize, v0: f64) -> Result<f64> {
        self.check_tier(j)?;
        Self::check_v0(v0)?;
        let ClusterModel::Thomas { sigma } = self.cfg.cluster else {
            return Err(Error::ModelMismatch { expected: "Thomas" });
        };
        let lam0 = self.thomas_center_density(sigma, v0);
        let lam_j = if j == 0 { lam0 } else { self.net.eff_open(j) };
        let denom = self.pbar2(j, 0) * lam0 + self.assoc_exponent(j);
        Ok(lam_j / denom)
    }

    /// Closed-form association for Matérn clusters.
    pub fn assoc_matern_closed(&self, j: usize, v0: f64) -> Result<f64> {
        self.check_tier(j)?;
        Self::check_v0(v0)?;
        let ClusterModel::Matern { radius } = self.cfg.cluster else {
            return Err(Error::ModelMismatch { expected: "Matern" });
        };
        let z = PI * self.assoc_exponent(j);
        Ok(self.matern_term(j, radius, z, v0))
    }

    /// The two-branch Matérn integral shared by association and the closed-form bounds:
    /// tier 0 gives `E[exp(-z v0^(-2/alpha) Y0^2)]`, tier `j` gives
    /// `2 pi lambda_bar_j int exp(-z w^2) ccdf_Y0(v0^(1/alpha) Pbar_j0 w) w dw`.
    fn matern_term(&self, j: usize, radius: f64, z: f64, v0: f64) -> f64 {
        let v2 = v0.powf(2.0 / self.cfg.alpha);
        if j == 0 {
            // (v^(2/a) / (R^2 z)) (1 - exp(-z R^2 / v^(2/a)))
            one_minus_exp_over(z * radius * radius / v2)
        } else {
            let lam = self.net.eff_open(j);
            if lam == 0.0 {
                return 0.0;
            }
            let reach2 = self.pbar2(j, 0) * v2;
            let y = z * radius * radius / reach2;
            // pi lam / z * (1 - (1 - e^-y) / y), expanded for small y
            let tail = one_minus_phi(y);
            if z > 0.0 {
                PI * lam / z * tail
            } else {
                PI * lam * radius * radius / (2.0 * reach2)
            }
        }
    }

    /// Association given `V0 = v0`, using the closed form when the model has one.
    pub fn assoc_conditional(&self, j: usize, v0: f64) -> Result<f64> {
        match self.cfg.cluster {
            ClusterModel::Thomas { .. } => self.assoc_thomas_closed(j, v0),
            ClusterModel::Matern { .. } => self.assoc_matern_closed(j, v0),
            ClusterModel::General(_) => self.assoc_prob_conditional(j, v0),
        }
    }

    // ---------------------------------------------------------------- serving distance

    /// Conditional pdf of the serving distance given association with tier `j` and `V0 = v0`.
    pub fn serving_dist_pdf(&self, j: usize, w: f64, v0: f64) -> Result<f64> {
        self.check_tier(j)?;
        Self::check_v0(v0)?;
        if w < 0.0 {
            return Ok(0.0);
        }
        let assoc = self.assoc_conditional(j, v0)?;
        if assoc == 0.0 {
            return Ok(0.0);
        }
        let v2 = v0.powf(2.0 / self.cfg.alpha);
        let numerator = match self.cfg.cluster {
            ClusterModel::Thomas { sigma } => {
                let lam0 = self.thomas_center_density(sigma, v0);
                let lam_j = if j == 0 { lam0 } else { self.net.eff_open(j) };
                let total = self.pbar2(j, 0) * lam0 + self.assoc_exponent(j);
                2.0 * PI * lam_j * (-PI * total * w * w).exp() * w
            }
            ClusterModel::Matern { radius } => {
                let r2 = radius * radius;
                let envelope = (-PI * self.assoc_exponent(j) * w * w).exp();
                if j == 0 {
                    if v2 * w * w > r2 {
                        0.0
                    } else {
                        envelope * 2.0 * v2 * w / r2
                    }
                } else {
                    let reach2 = self.pbar2(j, 0) * v2;
                    let frac = ((r2 - reach2 * w * w) / r2).max(0.0);
                    2.0 * PI * self.net.eff_open(j) * envelope * frac * w
                }
            }
            ClusterModel::General(_) => self.joint_density(j, w, v0),
        };
        Ok(numerator / assoc)
    }

    /// Serving-distance pdf assembled directly from the cluster pdf/ccdf, with
    /// the association probability obtained by quadrature.
    pub fn serving_dist_pdf_general(&self, j: usize, w: f64, v0: f64) -> Result<f64> {
        self.check_tier(j)?;
        Self::check_v0(v0)?;
        let assoc = self.assoc_prob_conditional(j, v0)?;
        if assoc == 0.0 {
            return Ok(0.0);
        }
        Ok(self.joint_density(j, w, v0) / assoc)
    }

    // ---------------------------------------------------------------- Laplace transforms

    /// Laplace transform of the open-tier-`k` interference seen by a user served
    /// by tier `j` at distance `w`, evaluated at `tau w^alpha / P_j`.
    pub fn laplace_open(&self, j: usize, k: usize, w: f64, tau: f64) -> Result<f64> {
        self.check_tier(j)?;
        self.check_open_tier(k)?;
        let f = self.factors(tau)?;
        Ok((-PI * self.pbar2(j, k) * self.net.eff_open(k) * f.g * w * w).exp())
    }

    /// Laplace transform of closed-access tier `k` interference.
    pub fn laplace_closed(&self, j: usize, k: usize, w: f64, tau: f64) -> Result<f64> {
        self.check_tier(j)?;
        self.check_open_tier(k)?;
        let f = self.factors(tau)?;
        Ok((-PI * self.net.eff_closed(k) * f.h * self.pbar2(j, k) * w * w).exp())
    }

    /// Conditional Laplace transform of the interference from the cluster-center
    /// BS when the user is served by tier `j >= 1` at distance `w`.
    ///
    /// Fails when the exclusion radius lies beyond the support of the cluster model.
    pub fn laplace_center(&self, j: usize, w: f64, tau: f64, v0: f64) -> Result<f64> {
        self.check_open_tier(j)?;
        Self::check_v0(v0)?;
        if !(tau >= 0.0) {
            return Err(domain(format!("SIR threshold must be non-negative, got {tau}")));
        }
        let x = self.v_root(v0) * self.net.power_ratio(j, 0) * w;
        let empty = match &self.cfg.cluster {
            // The shifted-exponential form stays well defined after the ccdf underflows.
            ClusterModel::Thomas { .. } => false,
            ClusterModel::Matern { radius } => x >= *radius,
            ClusterModel::General(g) => x > 0.0 && g.ccdf(x) <= 0.0,
        };
        if empty {
            return Err(Error::DegenerateConditioning(format!(
                "cluster-center distance cannot exceed {x} m"
            )));
        }
        self.center_laplace_at(x, tau, &self.quad)
    }

    /// `E[1 / (1 + tau (x / Y0)^alpha) | Y0 > x]`, defined as 1 where the
    /// conditioning event is empty.
    fn center_laplace_at(&self, x: f64, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
        if tau == 0.0 || x <= 0.0 {
            return Ok(1.0);
        }
        let half_alpha = 0.5 * self.cfg.alpha;
        let alpha = self.cfg.alpha;
        let x2 = x * x;
        match &self.cfg.cluster {
            ClusterModel::Thomas { sigma } => {
                // Y0^2 - x^2 given Y0 > x is exponential with mean 2 sigma^2.
                let s2 = 2.0 * sigma * sigma;
                try_integrate_semi_infinite_scaled(
                    |s| {
                        let q = x2 / (x2 + s2 * s);
                        Ok((-s).exp() / (1.0 + tau * q.powf(half_alpha)))
                    },
                    0.0,
                    1.0,
                    spec,
                )
            }
            ClusterModel::Matern { radius } => {
                let span = radius * radius - x2;
                if span <= 0.0 {
                    return Ok(1.0);
                }
                // Y0^2 - x^2 given Y0 > x is uniform on [0, R^2 - x^2].
                try_integrate(
                    |s| {
                        let q = x2 / (x2 + span * s);
                        Ok(1.0 / (1.0 + tau * q.powf(half_alpha)))
                    },
                    0.0,
                    1.0,
                    spec,
                )
            }
            ClusterModel::General(g) => {
                let tail = g.ccdf(x);
                if tail <= 0.0 {
                    return Ok(1.0);
                }
                let f = |y: f64| Ok(g.pdf(y) / (1.0 + tau * (x / y).powf(alpha)));
                let mass = if g.support_max().is_finite() {
                    try_integrate(f, x, g.support_max(), spec)?
                } else {
                    try_integrate_semi_infinite_scaled(f, x, g.median(), spec)?
                };
                Ok(mass / tail)
            }
        }
    }

    // ---------------------------------------------------------------- coverage

    /// `A_{j|v0} * P_c_{j|v0}`; with `with_center = false` the cluster-center
    /// interference is dropped, which gives the upper-bound integrand.
    fn joint_coverage(&self, j: usize, f: &Factors, v0: f64, with_center: bool) -> Result<f64> {
        if j > 0 && self.net.eff_open(j) == 0.0 {
            return Ok(0.0);
        }
        let lap = self.laplace_exponent(j, f);
        let noise = self.cfg.noise_power;
        let pj = self.cfg.power(j);
        let alpha = self.cfg.alpha;
        let reach = self.v_root(v0) * self.net.power_ratio(j, 0);
        let inner = self.inner_spec();
        self.integrate_w(j, v0, |w| {
            let base = self.joint_density(j, w, v0);
            if base == 0.0 {
                return Ok(0.0);
            }
            let mut value = base * (-PI * lap * w * w).exp();
            if noise > 0.0 {
                value *= (-f.tau * noise * w.powf(alpha) / pj).exp();
            }
            if j > 0 && with_center {
                value *= self.center_laplace_at(reach * w, f.tau, &inner)?;
            }
            Ok(value)
        })
    }

    /// Per-tier coverage given association with tier `j` and `V0 = v0`.
    pub fn per_tier_coverage_conditional(&self, j: usize, tau: f64, v0: f64) -> Result<f64> {
        self.check_tier(j)?;
        Self::check_v0(v0)?;
        let f = self.factors(tau)?;
        let assoc = self.assoc_conditional(j, v0)?;
        if assoc == 0.0 {
            return Ok(0.0);
        }
        let joint = self.joint_coverage(j, &f, v0, true)?;
        Ok((joint / assoc).clamp(0.0, 1.0))
    }

    fn shadow_rule(&self) -> Result<ShadowRule> {
        let (mu, eta) = self.cfg.center_shadowing();
        ShadowRule::new(mu, eta, self.quad.hermite_nodes)
    }

    /// Coverage report at threshold `tau`: association, per-tier and total
    /// coverage, the cluster-center bounds and the independent-user limit.
    pub fn coverage(&self, tau: f64) -> Result<CoverageReport> {
        let f = self.factors(tau)?;
        let k = self.k();
        let rule = self.shadow_rule()?;
        let mut assoc = vec![0.0; k + 1];
        let mut joint = vec![0.0; k + 1];
        let mut upper = vec![0.0; k + 1];
        for &(v0, weight) in &rule.points {
            for j in 0..=k {
                assoc[j] += weight * self.assoc_conditional(j, v0)?;
                let exact = self.joint_coverage(j, &f, v0, true)?;
                joint[j] += weight * exact;
                upper[j] += weight * if j == 0 { exact } else { self.joint_coverage(j, &f, v0, false)? };
            }
        }
        let per_tier = assoc
            .iter()
            .zip(&joint)
            .map(|(&a, &c)| if a > 0.0 { (c / a).clamp(0.0, 1.0) } else { 0.0 })
            .collect();
        let total: f64 = joint.iter().sum();
        let others: f64 = upper[1..].iter().sum();
        let upper_bound = upper[0] + others;
        let lower_bound = upper[0] + others / (1.0 + tau);

        let ppp_limit = if (1..=k).any(|j| self.net.eff_open(j) > 0.0) {
            Some(self.ppp_limit_with(&f))
        } else {
            None
        };
        let bounds_residual = match self.closed_form_bounds(tau) {
            Ok(Some((lo, hi))) => Some((lo - lower_bound).abs().max((hi - upper_bound).abs())),
            _ => None,
        };
        Ok(CoverageReport {
            tau,
            assoc: assoc.into_iter().map(|a| a.clamp(0.0, 1.0)).collect(),
            per_tier_coverage: per_tier,
            total: total.clamp(0.0, 1.0),
            lower_bound: lower_bound.clamp(0.0, 1.0),
            upper_bound: upper_bound.clamp(0.0, 1.0),
            ppp_limit,
            bounds_residual,
        })
    }

    /// Lower and upper coverage bounds from bounding the cluster-center
    /// interference between its exclusion-disc edge and infinity.
    pub fn coverage_bounds(&self, tau: f64) -> Result<(f64, f64)> {
        let f = self.factors(tau)?;
        let rule = self.shadow_rule()?;
        let mut center = 0.0;
        let mut others = 0.0;
        for &(v0, weight) in &rule.points {
            center += weight * self.joint_coverage(0, &f, v0, true)?;
            for j in 1..=self.k() {
                others += weight * self.joint_coverage(j, &f, v0, false)?;
            }
        }
        Ok((center + others / (1.0 + tau), center + others))
    }

    /// Closed-form bounds for Thomas and Matérn clusters in an interference-limited
    /// network with a deterministic cluster-center gain; `None` otherwise.
    pub fn closed_form_bounds(&self, tau: f64) -> Result<Option<(f64, f64)>> {
        let (mu, eta) = self.cfg.center_shadowing();
        if self.cfg.noise_power != 0.0 || eta != 0.0 {
            return Ok(None);
        }
        let v0 = 10f64.powf(mu / 10.0);
        match self.cfg.cluster {
            ClusterModel::Thomas { .. } | ClusterModel::Matern { .. } => {
                self.closed_form_bounds_conditional(tau, v0).map(Some)
            }
            ClusterModel::General(_) => Ok(None),
        }
    }

    /// Closed-form bounds given `V0 = v0` (interference-limited only).
    ///
    /// The Thomas denominators are `Pbar_j0^2 lambda_0 + sum_k Pbar_jk^2 (lambda_k (G+1) + lambda'_k H)`;
    /// the Matérn terms reuse the association integrals with the interference exponent.
    pub fn closed_form_bounds_conditional(&self, tau: f64, v0: f64) -> Result<(f64, f64)> {
        Self::check_v0(v0)?;
        if self.cfg.noise_power != 0.0 {
            return Err(domain("closed-form bounds require an interference-limited network"));
        }
        let f = self.factors(tau)?;
        let (center, others) = match self.cfg.cluster {
            ClusterModel::Thomas { sigma } => {
                let lam0 = self.thomas_center_density(sigma, v0);
                let center = lam0 / (lam0 + self.coverage_exponent(0, &f));
                let others: f64 = (1..=self.k())
                    .map(|j| {
                        let m = self.pbar2(j, 0) * lam0 + self.coverage_exponent(j, &f);
                        self.net.eff_open(j) / m
                    })
                    .sum();
                (center, others)
            }
            ClusterModel::Matern { radius } => {
                let center = self.matern_term(0, radius, PI * self.coverage_exponent(0, &f), v0);
                let others: f64 = (1..=self.k())
                    .map(|j| self.matern_term(j, radius, PI * self.coverage_exponent(j, &f), v0))
                    .sum();
                (center, others)
            }
            ClusterModel::General(_) => {
                return Err(Error::ModelMismatch { expected: "Thomas or Matern" });
            }
        };
        Ok((center + others / (1.0 + tau), center + others))
    }

    fn ppp_limit_with(&self, f: &Factors) -> f64 {
        (1..=self.k())
            .filter(|&j| self.net.eff_open(j) > 0.0)
            .map(|j| self.net.eff_open(j) / self.coverage_exponent(j, f))
            .sum()
    }

    /// Coverage of a user located independently of every BS; the limit of the
    /// clustered coverage as the cluster size grows without bound.
    pub fn ppp_limit_coverage(&self, tau: f64) -> Result<f64> {
        let f = self.factors(tau)?;
        if !(1..=self.k()).any(|j| self.net.eff_open(j) > 0.0) {
            return Err(domain("the independent-user limit needs at least one open tier"));
        }
        Ok(self.ppp_limit_with(&f))
    }

    /// Mixture weights `(p0, p_i)` of independent and clustered users.
    pub fn mixture_weights(&self) -> Result<(f64, f64)> {
        let lam_ppp = self.cfg.ppp_user_density;
        let clustered = self.cfg.mean_users_per_cluster * self.cfg.tier(0).lambda_open;
        let denom = lam_ppp + clustered;
        if !(denom > 0.0) {
            return Err(Error::DegenerateWeights(
                "no independent users and no clustered users".into(),
            ));
        }
        Ok((lam_ppp / denom, clustered / denom))
    }

    /// Coverage of a user drawn uniformly from the union of independent and clustered users.
    pub fn mixed_coverage(&self, tau: f64) -> Result<f64> {
        let (p0, pi) = self.mixture_weights()?;
        let ppp = if p0 > 0.0 { self.ppp_limit_coverage(tau)? } else { 0.0 };
        let clustered = if pi > 0.0 { self.coverage(tau)?.total } else { 0.0 };
        Ok(p0 * ppp + pi * clustered)
    }
}

/// `(1 - exp(-y)) / y`, equal to 1 at `y = 0`.
fn one_minus_exp_over(y: f64) -> f64 {
    if y < 1e-8 {
        1.0 - 0.5 * y
    } else {
        -(-y).exp_m1() / y
    }
}

/// `1 - (1 - exp(-y)) / y`, accurate for small `y`.
fn one_minus_phi(y: f64) -> f64 {
    if y < 1e-4 {
        y / 2.0 - y * y / 6.0 + y * y * y / 24.0
    } else {
        (y + (-y).exp_m1()) / y
    }
}
