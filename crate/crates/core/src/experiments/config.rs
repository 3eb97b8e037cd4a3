use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::Budget;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Growth,
    Axioms,
    Counterexamples,
    Chain,
    Equalities,
    Factorization,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] = [
        Suite::Growth,
        Suite::Counterexamples,
        Suite::Axioms,
        Suite::Chain,
        Suite::Equalities,
        Suite::Factorization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Growth => "growth",
            Suite::Axioms => "axioms",
            Suite::Counterexamples => "counterexamples",
            Suite::Chain => "chain",
            Suite::Equalities => "equalities",
            Suite::Factorization => "factorization",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

pub const DEFAULT_MAX_N: usize = 8;
pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_BUDGET: Budget = Budget { restarts: 8, iterations: 128 };

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: u64,
    pub max_n: usize,
    /// Search budget for every supremum estimate and bracket search.
    pub budget: Budget,
    /// Random instances per sampled check.
    pub samples: usize,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    /// Fan suites and searches out over rayon.
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        ExperimentConfig {
            suite,
            seed,
            max_n: DEFAULT_MAX_N,
            budget: DEFAULT_BUDGET,
            samples: DEFAULT_SAMPLES,
            format: Format::Json,
            output_path: None,
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 {
            return Err(Error::Precondition("max_n must be at least 1".into()));
        }
        if self.budget.restarts == 0 || self.budget.iterations == 0 {
            return Err(Error::Precondition("restarts and iterations must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::Precondition("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let cfg = ExperimentConfig::new(Suite::All, 1);
        assert!(cfg.validate().is_ok());
        let mut bad = cfg.clone();
        bad.max_n = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.budget.iterations = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg;
        bad.samples = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn suite_names_serialize_as_cli_names() {
        for s in Suite::INDIVIDUAL.into_iter().chain([Suite::All]) {
            assert_eq!(serde_json::to_value(s).unwrap(), s.as_str());
        }
    }
}
