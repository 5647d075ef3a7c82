//! Resolution of flags, config file and defaults into one validated run
//! description.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::args::{Command, Flags, Format};
use crate::error::{CliError, Result};

/// Options read from a `--config` file. Keys mirror the long flags with
/// underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, deserialize_with = "one_or_many")]
    pub schemes: Option<Vec<String>>,
    pub ns_min: Option<f64>,
    pub ns_max: Option<f64>,
    pub ns_points: Option<usize>,
    pub n_s: Option<f64>,
    pub m: Option<u64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub kappa: Option<Vec<f64>>,
    pub k_copies: Option<u32>,
    pub epsilon: Option<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub pie: Option<Vec<f64>>,
    pub pie_min: Option<f64>,
    pub pie_max: Option<f64>,
    pub pie_points: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub deterministic: Option<bool>,
}

fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    }))
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_owned(),
            reason: e.to_string(),
        })
    }
}

/// Everything a subcommand needs, after precedence and defaults. It is
/// echoed verbatim into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub schemes: Vec<String>,
    pub ns_min: f64,
    pub ns_max: f64,
    pub ns_points: usize,
    pub n_s: Option<f64>,
    pub m: u64,
    pub kappa: Vec<f64>,
    pub k_copies: u32,
    pub epsilon: f64,
    pub pie: Vec<f64>,
    pub pie_min: f64,
    pub pie_max: f64,
    pub pie_points: usize,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    pub deterministic: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Flags beat the config file, which beats the defaults.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(command, flags.clone(), file)
    }

    pub fn merge(command: Command, flags: Flags, file: FileConfig) -> Result<Self> {
        let exponent = command == Command::Exponent;
        let (ns_min, ns_max, ns_points) = if exponent { (1e-3, 1.0, 120) } else { (1e-4, 10.0, 60) };
        let default_kappa = if command == Command::Budget {
            vec![1.0, 0.999, 0.998, 0.1, 0.01]
        } else {
            vec![1.0]
        };
        let default_format = if command == Command::Simulate { Format::Json } else { Format::Csv };

        let cfg = RunConfig {
            command,
            schemes: flags.schemes.or(file.schemes).unwrap_or_else(|| vec!["all".into()]),
            ns_min: flags.ns_min.or(file.ns_min).unwrap_or(ns_min),
            ns_max: flags.ns_max.or(file.ns_max).unwrap_or(ns_max),
            ns_points: flags.ns_points.or(file.ns_points).unwrap_or(ns_points),
            n_s: flags.n_s.or(file.n_s),
            m: flags.m.or(file.m).unwrap_or(1024),
            kappa: flags.kappa.or(file.kappa).unwrap_or(default_kappa),
            k_copies: flags.k_copies.or(file.k_copies).unwrap_or(1),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(1e-3),
            pie: flags.pie.or(file.pie).unwrap_or_else(|| vec![5.0]),
            pie_min: flags.pie_min.or(file.pie_min).unwrap_or(0.5),
            pie_max: flags.pie_max.or(file.pie_max).unwrap_or(10.0),
            pie_points: flags.pie_points.or(file.pie_points).unwrap_or(40),
            trials: flags.trials.or(file.trials).unwrap_or(100_000),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            format: flags.format.or(file.format).unwrap_or(default_format),
            deterministic: flags.deterministic || file.deterministic.unwrap_or(false),
            out: flags.out.or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.schemes.is_empty() {
            return usage("--schemes is empty".into());
        }
        let grid_used = matches!(
            self.command,
            Command::PieCurve | Command::Tradeoff | Command::Exponent
        );
        if grid_used {
            if self.ns_points == 0 {
                return usage("the n_s grid is empty (--ns-points 0)".into());
            }
            if !(self.ns_min > 0.0 && self.ns_min.is_finite() && self.ns_max.is_finite()) {
                return usage(format!("--ns-min must be positive and finite, got {}", self.ns_min));
            }
            if self.ns_max < self.ns_min {
                return usage(format!(
                    "the n_s grid is empty (--ns-max {} < --ns-min {})",
                    self.ns_max, self.ns_min
                ));
            }
        }
        if self.command == Command::Exponent {
            if self.pie_points == 0 || !(self.pie_min > 0.0) || self.pie_max < self.pie_min {
                return usage("the PIE axis is empty or non-positive".into());
            }
        }
        if self.kappa.is_empty() || self.kappa.iter().any(|&k| !(k > 0.0 && k <= 1.0)) {
            return usage(format!("--kappa values must lie in (0, 1], got {:?}", self.kappa));
        }
        if self.pie.is_empty() || self.pie.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return usage(format!("--pie values must be positive, got {:?}", self.pie));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return usage(format!("--epsilon must lie in (0, 1], got {}", self.epsilon));
        }
        if self.k_copies == 0 {
            return usage("--k-copies must be at least 1".into());
        }
        if self.command == Command::Simulate && self.trials == 0 {
            return usage("--trials must be at least 1".into());
        }
        Ok(())
    }

    /// Single transmissivity for commands that take one.
    pub fn first_kappa(&self) -> f64 {
        self.kappa[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> Flags {
        Flags::default()
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file: FileConfig = toml::from_str("m = 64\nseed = 9\nkappa = 0.5\n").unwrap();
        let mut f = flags();
        f.seed = Some(3);
        let cfg = RunConfig::merge(Command::Simulate, f, file).unwrap();
        assert_eq!(cfg.m, 64);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.kappa, vec![0.5]);
        assert_eq!(cfg.trials, 100_000);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn lists_accept_arrays() {
        let file: FileConfig = toml::from_str("pie = [1.0, 5.0]\nschemes = \"OOK_DIRECT\"").unwrap();
        let cfg = RunConfig::merge(Command::Exponent, flags(), file).unwrap();
        assert_eq!(cfg.pie, vec![1.0, 5.0]);
        assert_eq!(cfg.schemes, vec!["OOK_DIRECT"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("trails = 5").is_err());
    }

    #[test]
    fn empty_grids_are_usage_errors() {
        let mut f = flags();
        f.ns_points = Some(0);
        let err = RunConfig::merge(Command::PieCurve, f, FileConfig::default()).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
        let mut f = flags();
        f.ns_min = Some(1.0);
        f.ns_max = Some(0.1);
        assert!(RunConfig::merge(Command::Tradeoff, f, FileConfig::default()).is_err());
    }

    #[test]
    fn defaults_depend_on_command() {
        let budget = RunConfig::merge(Command::Budget, flags(), FileConfig::default()).unwrap();
        assert_eq!(budget.kappa.len(), 5);
        let exp = RunConfig::merge(Command::Exponent, flags(), FileConfig::default()).unwrap();
        assert_eq!(exp.ns_min, 1e-3);
    }
}
