//! Configuration files: a TOML (or JSON) tree holding the tiers, the cluster
//! model, noise, simulation settings and an optional sweep.
//!
//! ```toml
//! alpha = 4.0
//! cluster_tier = 2
//! noise = "off"                      # or { cell_edge_snr_db = 0.0 }
//!
//! [cluster]
//! model = "thomas"
//! sigma = 20.0
//!
//! [[tiers]]
//! power_w = 1000.0                   # or power_dbm
//! lambda_open = { count = 1, disc_radius = 500.0 }
//!
//! [[tiers]]
//! power_w = 1.0
//! lambda_open = { count = 100, disc_radius = 500.0 }
//! lambda_closed = { count = 100, disc_radius = 500.0 }
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::network::{noise_from_cell_edge_snr, ClusterModel, NetworkConfig, TierParams};
use crate::sim::SimSettings;
use crate::special::QuadratureSpec;

/// A density given directly in BSs per m^2 or as a count per disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    PerSquareMeter(f64),
    PerDisc { count: f64, disc_radius: f64 },
}

impl DensitySpec {
    pub fn per_square_meter(&self) -> Result<f64> {
        match *self {
            Self::PerSquareMeter(v) => Ok(v),
            Self::PerDisc { count, disc_radius } => {
                if !(disc_radius > 0.0) {
                    return Err(invalid(format!("disc_radius must be positive, got {disc_radius}")));
                }
                Ok(count / (PI * disc_radius * disc_radius))
            }
        }
    }
}

impl Default for DensitySpec {
    fn default() -> Self {
        Self::PerSquareMeter(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSpec {
    #[serde(default)]
    pub power_w: Option<f64>,
    #[serde(default)]
    pub power_dbm: Option<f64>,
    #[serde(default)]
    pub lambda_open: DensitySpec,
    #[serde(default)]
    pub lambda_closed: DensitySpec,
    #[serde(default)]
    pub shadow_mu_db: f64,
    #[serde(default)]
    pub shadow_eta_db: f64,
}

impl TierSpec {
    fn to_params(&self, index: usize) -> Result<TierParams> {
        let power = match (self.power_w, self.power_dbm) {
            (Some(w), None) => w,
            (None, Some(dbm)) => 10f64.powf((dbm - 30.0) / 10.0),
            _ => {
                return Err(invalid(format!(
                    "tier {index}: give exactly one of power_w and power_dbm"
                )))
            }
        };
        Ok(TierParams::new(
            power,
            self.lambda_open.per_square_meter()?,
            self.lambda_closed.per_square_meter()?,
        )
        .with_shadowing(self.shadow_mu_db, self.shadow_eta_db))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClusterSpec {
    Thomas { sigma: f64 },
    Matern { radius: f64 },
}

impl ClusterSpec {
    pub fn to_model(&self) -> ClusterModel {
        match *self {
            Self::Thomas { sigma } => ClusterModel::Thomas { sigma },
            Self::Matern { radius } => ClusterModel::Matern { radius },
        }
    }
}

/// Noise handling: `"off"` or `{ cell_edge_snr_db = <dB> }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(try_from = "NoiseRepr", into = "NoiseRepr")]
pub enum NoiseSpec {
    #[default]
    Off,
    CellEdge { cell_edge_snr_db: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NoiseRepr {
    Mode(String),
    CellEdge { cell_edge_snr_db: f64 },
}

impl TryFrom<NoiseRepr> for NoiseSpec {
    type Error = String;

    fn try_from(r: NoiseRepr) -> std::result::Result<Self, String> {
        match r {
            NoiseRepr::Mode(m) if m == "off" => Ok(Self::Off),
            NoiseRepr::Mode(m) => Err(format!("unknown noise mode {m:?}, expected \"off\"")),
            NoiseRepr::CellEdge { cell_edge_snr_db } => Ok(Self::CellEdge { cell_edge_snr_db }),
        }
    }
}

impl From<NoiseSpec> for NoiseRepr {
    fn from(n: NoiseSpec) -> Self {
        match n {
            NoiseSpec::Off => Self::Mode("off".into()),
            NoiseSpec::CellEdge { cell_edge_snr_db } => Self::CellEdge { cell_edge_snr_db },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    TauDb,
    SigmaM,
    RadiusM,
    PowerRatioDb,
    EtaDb,
    ZetaScale,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::TauDb => "tau_db",
            Self::SigmaM => "sigma_m",
            Self::RadiusM => "radius_m",
            Self::PowerRatioDb => "power_ratio_db",
            Self::EtaDb => "eta_db",
            Self::ZetaScale => "zeta_scale",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    Analytic,
    Simulated,
    Bounds,
    PppLimit,
    Association,
}

fn all_outputs() -> Vec<SweepOutput> {
    vec![
        SweepOutput::Analytic,
        SweepOutput::Simulated,
        SweepOutput::Bounds,
        SweepOutput::PppLimit,
        SweepOutput::Association,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<SweepOutput>,
    /// Threshold used when the sweep variable is not `tau_db`.
    #[serde(default)]
    pub tau_db: f64,
}

impl SweepSpec {
    pub fn validate(&self, cluster: &ClusterModel) -> Result<()> {
        if self.values.is_empty() {
            return Err(invalid("sweep values must not be empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sweep values must be finite"));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(invalid("sweep values must be strictly monotone"));
        }
        match (self.variable, cluster) {
            (SweepVariable::SigmaM, ClusterModel::Thomas { .. })
            | (SweepVariable::RadiusM, ClusterModel::Matern { .. }) => {}
            (SweepVariable::SigmaM, _) => return Err(invalid("sigma_m sweeps need a Thomas cluster")),
            (SweepVariable::RadiusM, _) => return Err(invalid("radius_m sweeps need a Matern cluster")),
            _ => {}
        }
        let positive = matches!(
            self.variable,
            SweepVariable::SigmaM | SweepVariable::RadiusM | SweepVariable::ZetaScale
        );
        if positive && self.values.iter().any(|&v| v <= 0.0) {
            return Err(invalid(format!("{} values must be positive", self.variable.as_str())));
        }
        if self.variable == SweepVariable::EtaDb && self.values.iter().any(|&v| v < 0.0) {
            return Err(invalid("eta_db values must be non-negative"));
        }
        Ok(())
    }

    pub fn wants(&self, output: SweepOutput) -> bool {
        self.outputs.contains(&output)
    }
}

/// Simulation block of the file; absent keys take [`SimSettings`] defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub window_radius: Option<f64>,
    pub min_expected_bs: Option<f64>,
    pub confidence: Option<f64>,
    pub scaled_windows: Option<bool>,
}

impl SimSpec {
    fn to_settings(&self) -> SimSettings {
        let d = SimSettings::default();
        SimSettings {
            trials: self.trials.unwrap_or(d.trials),
            master_seed: self.seed.unwrap_or(d.master_seed),
            window_radius: self.window_radius.unwrap_or(d.window_radius),
            min_expected_bs: self.min_expected_bs.unwrap_or(d.min_expected_bs),
            confidence: self.confidence.unwrap_or(d.confidence),
            scaled_windows: self.scaled_windows.unwrap_or(d.scaled_windows),
            user_mode: d.user_mode,
        }
    }
}

fn default_users() -> f64 {
    1.0
}

/// The file schema, before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: f64,
    pub cluster_tier: usize,
    #[serde(default = "default_users")]
    pub mean_users_per_cluster: f64,
    #[serde(default)]
    pub ppp_user_density: f64,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub cluster: ClusterSpec,
    pub tiers: Vec<TierSpec>,
    #[serde(default)]
    pub sim: SimSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
}

/// A validated configuration, with densities per m^2 and powers in watts.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub network: NetworkConfig,
    pub noise: NoiseSpec,
    pub sim: SimSettings,
    pub sweep: Option<SweepSpec>,
    pub quadrature: QuadratureSpec,
}

impl Experiment {
    pub fn from_file_schema(file: ConfigFile) -> Result<Self> {
        if file.tiers.is_empty() {
            return Err(invalid("at least one tier is required"));
        }
        let tiers = file
            .tiers
            .iter()
            .enumerate()
            .map(|(i, t)| t.to_params(i + 1))
            .collect::<Result<Vec<_>>>()?;
        let mut network = NetworkConfig {
            alpha: file.alpha,
            noise_power: 0.0,
            tiers,
            cluster_tier: file.cluster_tier,
            cluster: file.cluster.to_model(),
            mean_users_per_cluster: file.mean_users_per_cluster,
            ppp_user_density: file.ppp_user_density,
        };
        network.validate()?;
        network.noise_power = noise_power(&network, file.noise)?;
        let quadrature = file.quadrature.unwrap_or_default();
        quadrature.validate()?;
        let sim = file.sim.to_settings();
        sim.validate(&network)?;
        if let Some(sweep) = &file.sweep {
            sweep.validate(&network.cluster)?;
        }
        Ok(Self {
            network,
            noise: file.noise,
            sim,
            sweep: file.sweep,
            quadrature,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_file_schema(file)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_file_schema(file)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        };
        parsed.map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Recomputes the noise power after the tier powers or densities changed.
    pub fn refresh_noise(&self, network: &mut NetworkConfig) -> Result<()> {
        network.noise_power = noise_power(network, self.noise)?;
        Ok(())
    }
}

fn noise_power(network: &NetworkConfig, noise: NoiseSpec) -> Result<f64> {
    match noise {
        NoiseSpec::Off => Ok(0.0),
        NoiseSpec::CellEdge { cell_edge_snr_db } => noise_from_cell_edge_snr(network, cell_edge_snr_db),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
alpha = 4.0
cluster_tier = 2

[cluster]
model = "thomas"
sigma = 20.0

[[tiers]]
power_w = 1000.0
lambda_open = { count = 1, disc_radius = 500.0 }

[[tiers]]
power_dbm = 30.0
lambda_open = { count = 100, disc_radius = 500.0 }
lambda_closed = { count = 100, disc_radius = 500.0 }
"#;

    #[test]
    fn densities_and_powers_are_normalized() {
        let e = Experiment::from_toml_str(BASE).unwrap();
        let l1 = 1.0 / (PI * 500.0 * 500.0);
        assert!((e.network.tiers[0].lambda_open - l1).abs() < 1e-18);
        assert!((e.network.tiers[1].lambda_closed - 100.0 * l1).abs() < 1e-16);
        assert!((e.network.tiers[1].power - 1.0).abs() < 1e-15);
        assert_eq!(e.network.noise_power, 0.0);
        assert_eq!(e.sim, SimSettings::default());
    }

    #[test]
    fn alpha_two_is_rejected() {
        let text = BASE.replace("alpha = 4.0", "alpha = 2.0");
        let err = Experiment::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("alpha must exceed 2"), "{err}");
    }

    #[test]
    fn negative_radius_is_rejected() {
        let text = BASE.replace("model = \"thomas\"\nsigma = 20.0", "model = \"matern\"\nradius = -5.0");
        assert!(matches!(Experiment::from_toml_str(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_errors_name_the_field() {
        let text = BASE.replace("power_w = 1000.0", "power_w = \"lots\"");
        let err = Experiment::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("power_w"), "{err}");
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn noise_modes() {
        let text = format!("noise = {{ cell_edge_snr_db = 0.0 }}\n{BASE}");
        let e = Experiment::from_toml_str(&text).unwrap();
        // P1 d^-4 with d = 500 m
        assert!((e.network.noise_power - 1000.0 / 500f64.powi(4)).abs() < 1e-20);
        let text = format!("noise = \"off\"\n{BASE}");
        assert_eq!(Experiment::from_toml_str(&text).unwrap().network.noise_power, 0.0);
        let text = format!("noise = \"loud\"\n{BASE}");
        assert!(Experiment::from_toml_str(&text).is_err());
    }

    #[test]
    fn sweep_validation() {
        let good = format!("{BASE}\n[sweep]\nvariable = \"tau_db\"\nvalues = [-10, 0, 10]\n");
        let e = Experiment::from_toml_str(&good).unwrap();
        assert_eq!(e.sweep.unwrap().outputs.len(), 5);
        let bad = format!("{BASE}\n[sweep]\nvariable = \"tau_db\"\nvalues = [0, 0]\n");
        assert!(Experiment::from_toml_str(&bad).is_err());
        let wrong = format!("{BASE}\n[sweep]\nvariable = \"radius_m\"\nvalues = [10, 20]\n");
        assert!(Experiment::from_toml_str(&wrong).is_err());
        let empty = format!("{BASE}\n[sweep]\nvariable = \"tau_db\"\nvalues = []\n");
        assert!(Experiment::from_toml_str(&empty).is_err());
    }

    #[test]
    fn json_is_the_same_schema() {
        let file: ConfigFile = toml::from_str(BASE).unwrap();
        let json = serde_json::to_string(&file).unwrap();
        let a = Experiment::from_json_str(&json).unwrap();
        let b = Experiment::from_toml_str(BASE).unwrap();
        assert_eq!(a.network.tiers, b.network.tiers);
        assert_eq!(a.sim, b.sim);
    }

    #[test]
    fn power_must_be_given_once() {
        let text = BASE.replace("power_w = 1000.0", "power_w = 1000.0\npower_dbm = 60.0");
        assert!(Experiment::from_toml_str(&text).is_err());
    }
}
