//! Seeded Monte Carlo simulator of the typical clustered user.
//!
//! Each trial places the user at the origin, draws every tier as a Poisson
//! field in a disc around it, adds the user's own cluster-center BS, and
//! evaluates association and SINR with Rayleigh fading. Only BS distances
//! matter for the received powers, so positions are sampled in polar form and
//! the angles are never materialized.
//!
//! Trial `t` draws from a ChaCha8 stream keyed by `(master_seed, t)`, which
//! makes every estimate independent of the thread count.

use std::f64::consts::{LN_10, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, invalid, Result};
use crate::network::{ClusterModel, NetworkConfig};
use crate::special::lognormal_frac_moment;

/// Where the simulated user sits relative to the BSs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserMode {
    /// A user of a representative cluster; its center is a tier-0 BS.
    #[default]
    Clustered,
    /// A user placed independently of every BS.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSettings {
    pub trials: u64,
    pub master_seed: u64,
    /// Radius of the simulation disc, m.
    pub window_radius: f64,
    /// Smallest expected BS count per nonzero tier inside the window.
    pub min_expected_bs: f64,
    pub confidence: f64,
    /// Shrink the disc of weak tiers so each tier leaves out the same expected
    /// interference beyond its edge; `false` uses `window_radius` for all tiers.
    pub scaled_windows: bool,
    pub user_mode: UserMode,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            trials: 100_000,
            master_seed: 0x5eed,
            window_radius: 5000.0,
            min_expected_bs: 50.0,
            confidence: 0.95,
            scaled_windows: true,
            user_mode: UserMode::Clustered,
        }
    }
}

impl SimSettings {
    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        if self.trials < 1 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(self.window_radius > 0.0 && self.window_radius.is_finite()) {
            return Err(invalid(format!("window radius must be positive, got {}", self.window_radius)));
        }
        if !(self.min_expected_bs >= 0.0) {
            return Err(invalid("min_expected_bs must be non-negative"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        let area = PI * self.window_radius * self.window_radius;
        for (idx, t) in cfg.tiers.iter().enumerate() {
            for (kind, lam) in [("open", t.lambda_open), ("closed", t.lambda_closed)] {
                if lam > 0.0 && area * lam < self.min_expected_bs {
                    return Err(invalid(format!(
                        "window radius {} m holds only {:.1} expected {kind} BSs of tier {} (need {})",
                        self.window_radius,
                        area * lam,
                        idx + 1,
                        self.min_expected_bs
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sampling radius for each tier `1..=K` (index `k - 1`).
    ///
    /// With scaled windows, tier `k` gets
    /// `window_radius * (P_k lambda_k E[V_k] / max_m P_m lambda_m E[V_m])^(1/(alpha-2))`,
    /// raised where needed to hold `min_expected_bs` BSs.
    pub fn tier_windows(&self, cfg: &NetworkConfig) -> Result<Vec<f64>> {
        let weights = cfg
            .tiers
            .iter()
            .map(|t| {
                let mean_gain = lognormal_frac_moment(t.shadow_mu_db, t.shadow_eta_db, 1.0)?;
                Ok(t.power * (t.lambda_open + t.lambda_closed) * mean_gain)
            })
            .collect::<Result<Vec<f64>>>()?;
        let top = weights.iter().cloned().fold(0.0, f64::max);
        Ok(cfg
            .tiers
            .iter()
            .zip(&weights)
            .map(|(t, &w)| {
                if !self.scaled_windows || top == 0.0 || w == 0.0 {
                    return self.window_radius;
                }
                let scaled = self.window_radius * (w / top).powf(1.0 / (cfg.alpha - 2.0));
                let lam = t.lambda_open.max(t.lambda_closed);
                let floor = (self.min_expected_bs / (PI * lam)).sqrt();
                scaled.max(floor).min(self.window_radius)
            })
            .collect())
    }
}

/// One simulated BS as seen from the typical user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsSample {
    /// 0 for the cluster center, otherwise `1..=K`.
    pub tier: usize,
    pub open: bool,
    /// Squared distance to the user, m^2.
    pub dist2: f64,
    /// Linear log-normal shadowing gain.
    pub shadow: f64,
    /// Unit-mean exponential fading power.
    pub fade: f64,
}

impl BsSample {
    pub fn distance(&self) -> f64 {
        self.dist2.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub trial_index: u64,
    /// Cluster center first when present, then tiers in ascending order.
    pub bs: Vec<BsSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    /// `None` when no open BS fell inside the window.
    pub serving_tier: Option<usize>,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    pub tau: f64,
    pub mean: f64,
    pub half_width: f64,
    pub trials: u64,
    pub seed: u64,
    pub per_tier_assoc_freq: Vec<f64>,
    pub per_tier_cov_freq: Vec<f64>,
}

/// Everything a trial needs that does not depend on the trial index.
struct Sampler<'a> {
    cfg: &'a NetworkConfig,
    settings: &'a SimSettings,
    windows: Vec<f64>,
    open_counts: Vec<Option<Poisson<f64>>>,
    closed_counts: Vec<Option<Poisson<f64>>>,
}

fn count_law(mean: f64) -> Result<Option<Poisson<f64>>> {
    if mean <= 0.0 {
        return Ok(None);
    }
    Poisson::new(mean)
        .map(Some)
        .map_err(|e| domain(format!("cannot sample {mean} expected BSs: {e}")))
}

impl<'a> Sampler<'a> {
    fn new(cfg: &'a NetworkConfig, settings: &'a SimSettings) -> Result<Self> {
        cfg.validate()?;
        settings.validate(cfg)?;
        let windows = settings.tier_windows(cfg)?;
        let mut open_counts = Vec::new();
        let mut closed_counts = Vec::new();
        for (t, rho) in cfg.tiers.iter().zip(&windows) {
            let area = PI * rho * rho;
            open_counts.push(count_law(area * t.lambda_open)?);
            closed_counts.push(count_law(area * t.lambda_closed)?);
        }
        Ok(Self {
            cfg,
            settings,
            windows,
            open_counts,
            closed_counts,
        })
    }

    fn rng(&self, trial_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.settings.master_seed);
        rng.set_stream(trial_index);
        rng
    }

    fn center_dist2<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.cfg.cluster {
            ClusterModel::Thomas { sigma } => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                sigma * sigma * (x * x + y * y)
            }
            ClusterModel::Matern { radius } => radius * radius * rng.random::<f64>(),
            ClusterModel::General(g) => {
                // 1 - U keeps the level in (0, 1].
                let r = g.inverse_ccdf(1.0 - rng.random::<f64>());
                r * r
            }
        }
    }

    /// Visits every BS of trial `trial_index` in realization order.
    fn for_each_bs<F: FnMut(BsSample)>(&self, trial_index: u64, mut visit: F) {
        let mut rng = self.rng(trial_index);
        if self.settings.user_mode == UserMode::Clustered {
            let dist2 = self.center_dist2(&mut rng);
            let (mu, eta) = self.cfg.center_shadowing();
            let shadow = draw_shadow(&mut rng, mu, eta);
            let fade: f64 = rng.sample(Exp1);
            visit(BsSample { tier: 0, open: true, dist2, shadow, fade });
        }
        for (idx, t) in self.cfg.tiers.iter().enumerate() {
            let rho2 = self.windows[idx] * self.windows[idx];
            for (open, law) in [(true, &self.open_counts[idx]), (false, &self.closed_counts[idx])] {
                let Some(law) = law else { continue };
                let n = law.sample(&mut rng) as u64;
                for _ in 0..n {
                    let dist2 = rho2 * rng.random::<f64>();
                    let shadow = draw_shadow(&mut rng, t.shadow_mu_db, t.shadow_eta_db);
                    let fade: f64 = rng.sample(Exp1);
                    visit(BsSample { tier: idx + 1, open, dist2, shadow, fade });
                }
            }
        }
    }

    fn sample(&self, trial_index: u64) -> Realization {
        let mut bs = Vec::new();
        self.for_each_bs(trial_index, |b| bs.push(b));
        Realization { trial_index, bs }
    }

    /// Association and received powers of trial `trial_index` without storing the BSs.
    fn link(&self, trial_index: u64) -> Link {
        let mut acc = LinkAccumulator::new(self.cfg);
        self.for_each_bs(trial_index, |b| acc.push(&b));
        acc.finish()
    }
}

fn draw_shadow<R: Rng>(rng: &mut R, mu: f64, eta: f64) -> f64 {
    if eta == 0.0 {
        10f64.powf(mu / 10.0)
    } else {
        let n: f64 = rng.sample(StandardNormal);
        ((mu + eta * n) * LN_10 / 10.0).exp()
    }
}

/// Draws trial `trial_index` of the seeded experiment.
pub fn sample_realization(cfg: &NetworkConfig, settings: &SimSettings, trial_index: u64) -> Result<Realization> {
    Ok(Sampler::new(cfg, settings)?.sample(trial_index))
}

/// Serving tier with its faded signal and the total faded interference.
struct Link {
    serving: Option<usize>,
    signal: f64,
    interference: f64,
}

/// Running maximum of `P V r^-alpha` over open BSs and sum of faded powers.
struct LinkAccumulator {
    powers: Vec<f64>,
    half_alpha: f64,
    best: f64,
    best_fade: f64,
    serving: Option<usize>,
    total: f64,
}

impl LinkAccumulator {
    fn new(cfg: &NetworkConfig) -> Self {
        Self {
            powers: (0..=cfg.num_tiers()).map(|k| cfg.power(k)).collect(),
            half_alpha: 0.5 * cfg.alpha,
            best: f64::NEG_INFINITY,
            best_fade: 0.0,
            serving: None,
            total: 0.0,
        }
    }

    #[inline]
    fn push(&mut self, b: &BsSample) {
        let path_gain = if self.half_alpha == 2.0 {
            1.0 / (b.dist2 * b.dist2)
        } else {
            b.dist2.powf(-self.half_alpha)
        };
        let mean = self.powers[b.tier] * b.shadow * path_gain;
        self.total += mean * b.fade;
        // strict comparison keeps the earliest (lowest-tier) BS on ties
        if b.open && mean > self.best {
            self.best = mean;
            self.best_fade = b.fade;
            self.serving = Some(b.tier);
        }
    }

    fn finish(self) -> Link {
        match self.serving {
            Some(tier) => {
                let signal = self.best * self.best_fade;
                Link {
                    serving: Some(tier),
                    signal,
                    interference: (self.total - signal).max(0.0),
                }
            }
            None => Link {
                serving: None,
                signal: 0.0,
                interference: self.total,
            },
        }
    }
}

fn evaluate_links(real: &Realization, cfg: &NetworkConfig) -> Link {
    let mut acc = LinkAccumulator::new(cfg);
    for b in &real.bs {
        acc.push(b);
    }
    acc.finish()
}

/// Association and SINR coverage of one realization at threshold `tau`.
pub fn run_trial(real: &Realization, tau: f64, cfg: &NetworkConfig) -> TrialOutcome {
    let link = evaluate_links(real, cfg);
    TrialOutcome {
        serving_tier: link.serving,
        covered: link.serving.is_some() && covered(&link, tau, cfg.noise_power),
    }
}

fn covered(link: &Link, tau: f64, noise: f64) -> bool {
    link.signal > tau * (noise + link.interference)
}

/// Wilson score half-width for `successes / n` at the given two-sided confidence.
pub fn wilson_half_width(successes: u64, n: u64, confidence: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("Wilson interval needs at least one trial"));
    }
    let normal = Normal::new(0.0, 1.0).map_err(|e| domain(e.to_string()))?;
    let z = normal.inverse_cdf(0.5 + 0.5 * confidence);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    Ok(z / (1.0 + z2 / nf) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt())
}

#[derive(Clone)]
struct Tally {
    covered: Vec<u64>,
    served: Vec<u64>,
    served_covered: Vec<Vec<u64>>,
}

impl Tally {
    fn new(thresholds: usize, tiers: usize) -> Self {
        Self {
            covered: vec![0; thresholds],
            served: vec![0; tiers],
            served_covered: vec![vec![0; tiers]; thresholds],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.covered.iter_mut().zip(&other.covered) {
            *a += b;
        }
        for (a, b) in self.served.iter_mut().zip(&other.served) {
            *a += b;
        }
        for (row, other_row) in self.served_covered.iter_mut().zip(&other.served_covered) {
            for (a, b) in row.iter_mut().zip(other_row) {
                *a += b;
            }
        }
        self
    }
}

/// Coverage estimates at several thresholds from one shared set of realizations.
pub fn estimate_thresholds(cfg: &NetworkConfig, taus: &[f64], settings: &SimSettings) -> Result<Vec<SimEstimate>> {
    for &tau in taus {
        if !(tau >= 0.0) {
            return Err(domain(format!("SIR threshold must be non-negative, got {tau}")));
        }
    }
    let sampler = Sampler::new(cfg, settings)?;
    let tiers = cfg.num_tiers() + 1;
    let tally = (0..settings.trials)
        .into_par_iter()
        .fold(
            || Tally::new(taus.len(), tiers),
            |mut acc, t| {
                let link = sampler.link(t);
                if let Some(j) = link.serving {
                    acc.served[j] += 1;
                    for (i, &tau) in taus.iter().enumerate() {
                        if covered(&link, tau, cfg.noise_power) {
                            acc.covered[i] += 1;
                            acc.served_covered[i][j] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| Tally::new(taus.len(), tiers), Tally::merge);

    let n = settings.trials;
    let nf = n as f64;
    taus.iter()
        .enumerate()
        .map(|(i, &tau)| {
            Ok(SimEstimate {
                tau,
                mean: tally.covered[i] as f64 / nf,
                half_width: wilson_half_width(tally.covered[i], n, settings.confidence)?,
                trials: n,
                seed: settings.master_seed,
                per_tier_assoc_freq: tally.served.iter().map(|&s| s as f64 / nf).collect(),
                per_tier_cov_freq: tally.served_covered[i]
                    .iter()
                    .zip(&tally.served)
                    .map(|(&c, &s)| if s > 0 { c as f64 / s as f64 } else { 0.0 })
                    .collect(),
            })
        })
        .collect()
}

/// Coverage estimate at threshold `tau`.
pub fn estimate(cfg: &NetworkConfig, tau: f64, settings: &SimSettings) -> Result<SimEstimate> {
    Ok(estimate_thresholds(cfg, &[tau], settings)?.remove(0))
}
