//! Run configuration: defaults, then a TOML file, then `WENTE_*` environment
//! variables, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wente_core::QuadratureConfig;

use crate::CliError;

pub const ENV_PREFIX: &str = "WENTE_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!(
                "unknown format {other:?} (expected json, csv or text)"
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mean curvature.
    pub h: f64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub quad_max_subdivisions: usize,
    /// Root-finder tolerance on θ, radians.
    pub theta_xtol: f64,
    /// Definiteness threshold relative to the matrix max-norm.
    pub definiteness_rel_threshold: f64,
    /// Absolute margin the largest eigenvalue must clear.
    pub min_margin: f64,
    /// Largest Galerkin cutoff; 0 skips the oracle in `verify-all`.
    pub oracle_cutoff: u32,
    /// Largest admissible closed-form/direct discrepancy.
    pub path_tolerance: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub paper_check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q = wente_core::operator::default_integral_config();
        RunConfig {
            h: wente_core::DEFAULT_H,
            quad_abs_tol: q.abs_tol,
            quad_rel_tol: q.rel_tol,
            quad_max_subdivisions: q.max_subdivisions,
            theta_xtol: wente_core::params::THETA_XTOL,
            definiteness_rel_threshold: 1e-6,
            min_margin: 0.0,
            oracle_cutoff: wente_core::oracle::DEFAULT_CUTOFF,
            path_tolerance: 5e-3,
            format: OutputFormat::Text,
            out: None,
            paper_check: false,
        }
    }
}

impl RunConfig {
    /// Defaults overlaid with `file` (if any) and matching entries of `env`.
    pub fn load<I>(file: Option<&Path>, env: I) -> Result<RunConfig, CliError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
            }
            None => toml::Table::new(),
        };
        let mut overrides: Vec<(String, String)> = env
            .into_iter()
            .filter_map(|(k, v)| {
                k.strip_prefix(ENV_PREFIX)
                    .map(|key| (key.to_ascii_lowercase(), v))
            })
            .collect();
        overrides.sort();
        for (key, raw) in overrides {
            table.insert(key, env_value(&raw));
        }
        let cfg: RunConfig =
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| {
                    CliError::Usage(format!("configuration: {}", e.message()))
                })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("h", self.h),
            ("quad_abs_tol", self.quad_abs_tol),
            ("quad_rel_tol", self.quad_rel_tol),
            ("theta_xtol", self.theta_xtol),
            (
                "definiteness_rel_threshold",
                self.definiteness_rel_threshold,
            ),
            ("path_tolerance", self.path_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.min_margin >= 0.0 && self.min_margin.is_finite()) {
            return Err(CliError::Usage(format!(
                "min_margin must be non-negative, got {}",
                self.min_margin
            )));
        }
        if self.quad_max_subdivisions == 0 {
            return Err(CliError::Usage(
                "quad_max_subdivisions must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            abs_tol: self.quad_abs_tol,
            rel_tol: self.quad_rel_tol,
            max_subdivisions: self.quad_max_subdivisions,
        }
    }

    /// Absolute threshold for a matrix with largest entry `max_norm`.
    pub fn threshold(&self, max_norm: f64) -> f64 {
        (self.definiteness_rel_threshold * max_norm).max(self.min_margin)
    }
}

/// Environment strings are read as TOML scalars when they parse as one and as
/// plain strings otherwise, so `WENTE_H=1` and `WENTE_FORMAT=json` both work.
fn env_value(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match probe.parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn env(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn defaults_validate() {
        let c = RunConfig::load(None, env(&[])).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.h, 0.5);
    }

    #[test]
    fn file_then_environment() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "h = 1.0\nmin_margin = 0.2\nformat = \"csv\"").unwrap();
        let c = RunConfig::load(
            Some(f.path()),
            env(&[
                ("WENTE_MIN_MARGIN", "0.3"),
                ("WENTE_FORMAT", "json"),
                ("OTHER", "x"),
            ]),
        )
        .unwrap();
        assert_eq!(c.h, 1.0);
        assert_eq!(c.min_margin, 0.3);
        assert_eq!(c.format, OutputFormat::Json);
    }

    #[test]
    fn rejects_bad_values_and_keys() {
        assert!(matches!(
            RunConfig::load(None, env(&[("WENTE_H", "-1")])),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            RunConfig::load(None, env(&[("WENTE_NO_SUCH_KEY", "1")])),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            RunConfig::load(None, env(&[("WENTE_QUAD_REL_TOL", "0")])),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn threshold_takes_the_larger_requirement() {
        let mut c = RunConfig::default();
        assert!((c.threshold(10.0) - 1e-5).abs() < 1e-20);
        c.min_margin = 0.1;
        assert_eq!(c.threshold(10.0), 0.1);
    }
}
