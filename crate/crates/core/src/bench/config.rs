use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Random instance family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Linear,
    LinearCluster,
    Lcmnl,
    LcmnlCluster,
    Nonlinear,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::LinearCluster => "linear-cluster",
            Family::Lcmnl => "lcmnl",
            Family::LcmnlCluster => "lcmnl-cluster",
            Family::Nonlinear => "nonlinear",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = PricingError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Family::Linear),
            "linear-cluster" => Ok(Family::LinearCluster),
            "lcmnl" => Ok(Family::Lcmnl),
            "lcmnl-cluster" => Ok(Family::LcmnlCluster),
            "nonlinear" => Ok(Family::Nonlinear),
            other => Err(PricingError::Argument(format!("unknown family {other:?}"))),
        }
    }
}

/// Pricing strategy compared against personalized pricing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Uniform,
    Economic,
    Robust,
    /// Linear price schedule `f_i = i` over bundle sizes.
    Linear,
    Nonpersonalized,
    /// Economic factor per cluster, reported for FPF and k-means.
    ClusteredEconomic,
    ClusteredRobust,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n_values: Vec<usize>,
    pub m_values: Vec<usize>,
    #[serde(default = "default_instances")]
    pub instances_per_cell: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    /// Number of clusters for clustered strategies.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Worker threads; `None` uses every available core.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Record wall-clock time in `runtime_ms`; when off the column is zero.
    #[serde(default = "default_true")]
    pub timing: bool,
    /// Grid density of the single-factor scan.
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    /// Writes every generated instance here when set.
    #[serde(default)]
    pub dump_dir: Option<PathBuf>,
}

fn default_instances() -> usize {
    20
}
fn default_k() -> usize {
    2
}
fn default_true() -> bool {
    true
}
fn default_grid() -> usize {
    2000
}

pub const DEFAULT_SEED: u64 = 20_210_301;

impl ExperimentConfig {
    fn base(family: Family, n_values: Vec<usize>, m_values: Vec<usize>, strategies: Vec<Strategy>) -> Self {
        ExperimentConfig {
            family,
            n_values,
            m_values,
            instances_per_cell: default_instances(),
            seed: DEFAULT_SEED,
            strategies,
            k: default_k(),
            threads: None,
            timing: true,
            grid_points: default_grid(),
            dump_dir: None,
        }
    }

    /// Standard grid of cells and strategies for each family.
    pub fn preset(family: Family) -> Self {
        use Strategy::*;
        match family {
            Family::Linear => Self::base(family, vec![2, 5, 10], vec![2, 4, 6], vec![Uniform, Economic, Robust, Nonpersonalized]),
            Family::LinearCluster => Self::base(family, vec![2, 5, 10], vec![6], vec![Economic, Robust, ClusteredEconomic, ClusteredRobust]),
            Family::Lcmnl => Self::base(family, vec![5, 10, 20], vec![2, 4, 6], vec![Uniform, Economic, Robust, Nonpersonalized]),
            Family::LcmnlCluster => Self::base(family, vec![5, 10, 20], vec![6], vec![Economic, Robust, ClusteredEconomic, ClusteredRobust]),
            Family::Nonlinear => Self::base(family, vec![10, 30, 50], vec![2, 4, 6], vec![Linear, Economic, Robust, Nonpersonalized]),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| PricingError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances_per_cell == 0 {
            return Err(PricingError::field("instances_per_cell", "must be at least 1"));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(PricingError::field("n_values", "need at least one value, all >= 1"));
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return Err(PricingError::field("m_values", "need at least one value, all >= 1"));
        }
        if self.strategies.is_empty() {
            return Err(PricingError::field("strategies", "no strategies selected"));
        }
        let clustered = self
            .strategies
            .iter()
            .any(|s| matches!(s, Strategy::ClusteredEconomic | Strategy::ClusteredRobust));
        if clustered && self.k == 0 {
            return Err(PricingError::field("k", "must be at least 1"));
        }
        if self.strategies.contains(&Strategy::Linear) && self.family != Family::Nonlinear {
            return Err(PricingError::field("strategies", "\"linear\" needs the nonlinear family"));
        }
        if self.grid_points < 2 {
            return Err(PricingError::field("grid_points", "must be at least 2"));
        }
        if self.threads == Some(0) {
            return Err(PricingError::field("threads", "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for f in [Family::Linear, Family::LinearCluster, Family::Lcmnl, Family::LcmnlCluster, Family::Nonlinear] {
            let c = ExperimentConfig::preset(f);
            c.validate().unwrap();
            assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"family":"lcmnl","n_values":[3],"m_values":[1],"seed":5,"strategies":["uniform"]}"#,
        )
        .unwrap();
        assert_eq!(c.instances_per_cell, 20);
        assert_eq!(c.k, 2);
        assert!(c.timing);
    }

    #[test]
    fn rejects_invalid() {
        let bad = r#"{"family":"lcmnl","n_values":[0],"m_values":[1],"seed":5,"strategies":["uniform"]}"#;
        assert!(ExperimentConfig::from_json(bad).unwrap_err().to_string().contains("n_values"));
        let bad = r#"{"family":"lcmnl","n_values":[2],"m_values":[1],"seed":5,"strategies":["linear"]}"#;
        assert!(ExperimentConfig::from_json(bad).is_err());
    }
}
