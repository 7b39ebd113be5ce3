//! Parameter sweeps, analytic-versus-simulation cross-validation, and the CSV
//! and JSON tables the command-line tool writes.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{Analyzer, CoverageReport};
use crate::config::{Experiment, SweepOutput, SweepSpec, SweepVariable};
use crate::error::{invalid, Result};
use crate::network::{ClusterModel, NetworkConfig};
use crate::sim::{estimate, estimate_thresholds, SimEstimate, SimSettings};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Network and linear threshold at one sweep value.
pub fn sweep_point(exp: &Experiment, sweep: &SweepSpec, value: f64) -> Result<(NetworkConfig, f64)> {
    let mut net = exp.network.clone();
    let mut tau_db = sweep.tau_db;
    match sweep.variable {
        SweepVariable::TauDb => tau_db = value,
        SweepVariable::SigmaM => net.cluster = ClusterModel::Thomas { sigma: value },
        SweepVariable::RadiusM => net.cluster = ClusterModel::Matern { radius: value },
        SweepVariable::ZetaScale => net.cluster = exp.network.cluster.scaled(value)?,
        SweepVariable::EtaDb => {
            for t in &mut net.tiers {
                t.shadow_eta_db = value;
            }
        }
        SweepVariable::PowerRatioDb => {
            // ratio of the clustered tier's power to tier 1's, set through tier 1
            if net.cluster_tier == 1 {
                return Err(invalid("power_ratio_db sweeps need the clustered tier to differ from tier 1"));
            }
            let clustered = net.tier(net.cluster_tier).power;
            net.tiers[0].power = clustered / db_to_linear(value);
        }
    }
    exp.refresh_noise(&mut net)?;
    net.validate()?;
    Ok((net, db_to_linear(tau_db)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub tau: f64,
    pub analytic: CoverageReport,
    pub simulated: Option<SimEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub outputs: Vec<SweepOutput>,
    pub num_tiers: usize,
    pub seed: u64,
    pub trials: u64,
    pub rows: Vec<SweepRow>,
}

/// Evaluates every sweep value in order; simulation runs only when `simulate`
/// is set and the sweep asks for simulated output.
pub fn run_sweep(exp: &Experiment, sweep: &SweepSpec, settings: &SimSettings, simulate: bool) -> Result<SweepTable> {
    sweep.validate(&exp.network.cluster)?;
    let points = sweep
        .values
        .iter()
        .map(|&v| sweep_point(exp, sweep, v))
        .collect::<Result<Vec<_>>>()?;
    let analytic = points
        .par_iter()
        .map(|(net, tau)| Analyzer::new(net.clone(), exp.quadrature)?.coverage(*tau))
        .collect::<Result<Vec<_>>>()?;

    let mut simulated: Vec<Option<SimEstimate>> = vec![None; points.len()];
    if simulate && sweep.wants(SweepOutput::Simulated) {
        if sweep.variable == SweepVariable::TauDb {
            let taus: Vec<f64> = points.iter().map(|p| p.1).collect();
            for (slot, est) in simulated.iter_mut().zip(estimate_thresholds(&exp.network, &taus, settings)?) {
                *slot = Some(est);
            }
        } else {
            for (slot, (net, tau)) in simulated.iter_mut().zip(&points) {
                *slot = Some(estimate(net, *tau, settings)?);
            }
        }
    }

    let rows = sweep
        .values
        .iter()
        .zip(points.iter().zip(analytic))
        .zip(simulated)
        .map(|((&value, ((_, tau), analytic)), simulated)| SweepRow {
            value,
            tau: *tau,
            analytic,
            simulated,
        })
        .collect();
    Ok(SweepTable {
        variable: sweep.variable,
        outputs: sweep.outputs.clone(),
        num_tiers: exp.network.num_tiers(),
        seed: settings.master_seed,
        trials: settings.trials,
        rows,
    })
}

fn cell(out: &mut String, value: Option<f64>) {
    out.push(',');
    if let Some(v) = value {
        out.push_str(&format!("{v}"));
    }
}

impl SweepTable {
    pub fn csv_header(&self) -> String {
        let mut h = String::from("sweep_var,sweep_value");
        for j in 0..=self.num_tiers {
            h.push_str(&format!(",assoc_{j}"));
        }
        h.push_str(",cov_analytic,cov_lower,cov_upper,cov_ppp_limit,cov_sim_mean,cov_sim_halfwidth");
        h
    }

    /// CSV with a `#` comment line carrying the seed and trial count.
    ///
    /// Numbers use the shortest representation that parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let wants = |o| self.outputs.contains(&o);
        writeln!(
            w,
            "# clustered-hetnet sweep variable={} seed={} trials={}",
            self.variable.as_str(),
            self.seed,
            self.trials
        )?;
        writeln!(w, "{}", self.csv_header())?;
        for row in &self.rows {
            let mut line = format!("{},{}", self.variable.as_str(), row.value);
            let r = &row.analytic;
            for &a in &r.assoc {
                cell(&mut line, wants(SweepOutput::Association).then_some(a));
            }
            cell(&mut line, wants(SweepOutput::Analytic).then_some(r.total));
            cell(&mut line, wants(SweepOutput::Bounds).then_some(r.lower_bound));
            cell(&mut line, wants(SweepOutput::Bounds).then_some(r.upper_bound));
            cell(&mut line, if wants(SweepOutput::PppLimit) { r.ppp_limit } else { None });
            cell(&mut line, row.simulated.as_ref().map(|s| s.mean));
            cell(&mut line, row.simulated.as_ref().map(|s| s.half_width));
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub tau_db: f64,
    pub analytic: f64,
    pub sim_mean: f64,
    pub sim_half_width: f64,
    pub abs_diff: f64,
    /// `max(tolerance, sim_half_width)`.
    pub allowed: f64,
    /// The interval alone is wider than the tolerance.
    pub wide_interval: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub trials: u64,
    pub tolerance: f64,
    pub rows: Vec<ValidationRow>,
    pub all_pass: bool,
}

/// Compares analytic and simulated coverage at each threshold (dB); a row
/// passes when `|analytic - simulated| <= max(tolerance, half_width)`.
pub fn cross_validate(
    exp: &Experiment,
    taus_db: &[f64],
    settings: &SimSettings,
    tolerance: f64,
) -> Result<ValidationReport> {
    if taus_db.is_empty() {
        return Err(invalid("cross-validation needs at least one threshold"));
    }
    let taus: Vec<f64> = taus_db.iter().map(|&d| db_to_linear(d)).collect();
    let analyzer = Analyzer::new(exp.network.clone(), exp.quadrature)?;
    let analytic = taus
        .par_iter()
        .map(|&t| analyzer.coverage(t).map(|r| r.total))
        .collect::<Result<Vec<_>>>()?;
    let sims = estimate_thresholds(&exp.network, &taus, settings)?;
    let rows: Vec<ValidationRow> = taus_db
        .iter()
        .zip(analytic.iter().zip(&sims))
        .map(|(&tau_db, (&a, s))| {
            let abs_diff = (a - s.mean).abs();
            let allowed = tolerance.max(s.half_width);
            ValidationRow {
                tau_db,
                analytic: a,
                sim_mean: s.mean,
                sim_half_width: s.half_width,
                abs_diff,
                allowed,
                wide_interval: s.half_width > tolerance,
                pass: abs_diff <= allowed,
            }
        })
        .collect();
    Ok(ValidationReport {
        seed: settings.master_seed,
        trials: settings.trials,
        tolerance,
        all_pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

impl ValidationReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# clustered-hetnet validate seed={} trials={} tolerance={}",
            self.seed, self.trials, self.tolerance
        )?;
        writeln!(w, "tau_db,analytic,sim_mean,sim_half_width,abs_diff,allowed,wide_interval,pass")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.tau_db, r.analytic, r.sim_mean, r.sim_half_width, r.abs_diff, r.allowed, r.wide_interval, r.pass
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
alpha = 4.0
cluster_tier = 2

[cluster]
model = "thomas"
sigma = 20.0

[[tiers]]
power_w = 1000.0
lambda_open = { count = 1, disc_radius = 500.0 }

[[tiers]]
power_w = 1.0
lambda_open = { count = 100, disc_radius = 500.0 }
lambda_closed = { count = 100, disc_radius = 500.0 }

[sweep]
variable = "tau_db"
values = [-10, -5, 0, 5, 10]
"#;

    #[test]
    fn tau_sweep_is_non_increasing() {
        let exp = Experiment::from_toml_str(CFG).unwrap();
        let sweep = exp.sweep.clone().unwrap();
        let table = run_sweep(&exp, &sweep, &exp.sim, false).unwrap();
        assert_eq!(table.rows.len(), 5);
        for w in table.rows.windows(2) {
            assert!(w[1].analytic.total <= w[0].analytic.total);
        }
        assert!(table.rows.iter().all(|r| r.simulated.is_none()));
    }

    #[test]
    fn csv_layout() {
        let exp = Experiment::from_toml_str(CFG).unwrap();
        let mut sweep = exp.sweep.clone().unwrap();
        sweep.values = vec![0.0];
        sweep.outputs = vec![SweepOutput::Analytic];
        let csv = run_sweep(&exp, &sweep, &exp.sim, false).unwrap().to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with('#') && lines[0].contains("seed="));
        assert_eq!(
            lines[1],
            "sweep_var,sweep_value,assoc_0,assoc_1,assoc_2,cov_analytic,cov_lower,cov_upper,cov_ppp_limit,cov_sim_mean,cov_sim_halfwidth"
        );
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells.len(), 11);
        assert_eq!(cells[0], "tau_db");
        assert_eq!(cells[2], "");
        let total: f64 = cells[5].parse().unwrap();
        assert!(total > 0.0 && total < 1.0);
        assert!(cells[6..].iter().all(|c| c.is_empty()));
    }

    #[test]
    fn power_ratio_sets_macro_power() {
        let exp = Experiment::from_toml_str(CFG).unwrap();
        let sweep = SweepSpec {
            variable: SweepVariable::PowerRatioDb,
            values: vec![-30.0],
            outputs: vec![],
            tau_db: 0.0,
        };
        let (net, tau) = sweep_point(&exp, &sweep, -30.0).unwrap();
        assert!((net.tiers[0].power - 1000.0).abs() < 1e-9);
        assert_eq!(tau, 1.0);
    }
}
