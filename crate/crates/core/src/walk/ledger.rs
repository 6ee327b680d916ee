use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::backend::StepCost;
use crate::error::{Error, Result};

/// Per-step cost of a comparison platform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baseline {
    pub time_per_step_s: f64,
    pub energy_per_step_j: f64,
}

/// Step count with its hardware cost and optional baselines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub steps: u64,
    pub cost: StepCost,
    #[serde(default)]
    pub baselines: BTreeMap<String, Baseline>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineRatio {
    pub name: String,
    /// Baseline time over hardware time.
    pub speedup: f64,
    /// Baseline energy over hardware energy.
    pub energy_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub steps: u64,
    pub hw_time_s: f64,
    pub hw_energy_j: f64,
    pub ratios: Vec<BaselineRatio>,
}

impl Ledger {
    pub fn new(steps: u64, cost: StepCost) -> Self {
        Self {
            steps,
            cost,
            baselines: BTreeMap::new(),
        }
    }

    pub fn hw_time_s(&self) -> f64 {
        self.steps as f64 * self.cost.time_s
    }

    pub fn hw_energy_j(&self) -> f64 {
        self.steps as f64 * self.cost.energy_j
    }

    pub fn with_baselines(mut self, baselines: BTreeMap<String, Baseline>) -> Self {
        self.baselines = baselines;
        self
    }

    /// Adds `other`'s steps. Both ledgers must charge the same per-step cost.
    pub fn merge(&mut self, other: &Ledger) -> Result<()> {
        if self.cost != other.cost {
            return Err(Error::Config(format!(
                "cannot merge ledgers with different step costs ({:?} vs {:?})",
                self.cost, other.cost
            )));
        }
        self.steps += other.steps;
        for (k, v) in &other.baselines {
            self.baselines.entry(k.clone()).or_insert(*v);
        }
        Ok(())
    }

    /// Speedup and energy ratio against every configured baseline.
    pub fn report(&self) -> Result<LedgerReport> {
        if self.baselines.is_empty() {
            return Err(Error::Config("ledger report needs at least one baseline".into()));
        }
        let ratios = self
            .baselines
            .iter()
            .map(|(name, b)| BaselineRatio {
                name: name.clone(),
                speedup: b.time_per_step_s / self.cost.time_s,
                energy_ratio: b.energy_per_step_j / self.cost.energy_j,
            })
            .collect();
        Ok(LedgerReport {
            steps: self.steps,
            hw_time_s: self.hw_time_s(),
            hw_energy_j: self.hw_energy_j(),
            ratios,
        })
    }

    /// JSON with steps, hardware time and energy, and per-baseline ratios
    /// (empty when no baseline is set).
    pub fn to_json(&self) -> serde_json::Value {
        let ratios = self.report().map(|r| r.ratios).unwrap_or_default();
        serde_json::json!({
            "steps": self.steps,
            "hw_time_s": self.hw_time_s(),
            "hw_energy_j": self.hw_energy_j(),
            "ratios": ratios,
        })
    }
}
