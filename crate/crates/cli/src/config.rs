//! Run configuration: defaults, overridden by a JSON file, overridden by flags.

use std::fs;
use std::path::Path;

use rqsl_core::{QuadratureConfig, ReportConfig};
use serde::{Deserialize, Serialize};

use crate::args::{GlobalArgs, OutputFormat};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub hbar: f64,
    pub dt_min: f64,
    pub regime_fraction: f64,
    /// Slack before a bound counts as violated.
    pub tol_report: f64,
    pub quadrature: QuadratureConfig,
    pub output_format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let report = ReportConfig::default();
        Self {
            hbar: 1.0,
            dt_min: 1e-3,
            regime_fraction: report.regime_fraction,
            tol_report: report.tol_report,
            quadrature: QuadratureConfig::default(),
            output_format: OutputFormat::Csv,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn resolve(global: &GlobalArgs) -> Result<Self, Failure> {
        let mut cfg = match &global.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        if let Some(hbar) = global.hbar {
            cfg.hbar = hbar;
        }
        if let Some(dt_min) = global.dt_min {
            cfg.dt_min = dt_min;
        }
        if let Some(seed) = global.seed {
            cfg.seed = seed;
        }
        if let Some(format) = global.format {
            cfg.output_format = format;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }

    /// `ħ` and `Δt_min` are physical parameters; the rest are run settings.
    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Failure::physical(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min.is_finite()) {
            return Err(Failure::physical(format!(
                "dt_min must be positive, got {}",
                self.dt_min
            )));
        }
        if !(self.regime_fraction > 0.0 && self.regime_fraction.is_finite()) {
            return Err(Failure::usage(format!(
                "regime_fraction must be positive, got {}",
                self.regime_fraction
            )));
        }
        if !(self.tol_report >= 0.0 && self.tol_report.is_finite()) {
            return Err(Failure::usage(format!(
                "tol_report must be non-negative, got {}",
                self.tol_report
            )));
        }
        self.quadrature.validate().map_err(Failure::from)
    }

    pub fn report(&self) -> ReportConfig {
        ReportConfig {
            tol_report: self.tol_report,
            regime_fraction: self.regime_fraction,
        }
    }
}
