//! `key=value` override files.
//!
//! One override per line, `#` comments allowed. Keys are namespaced by
//! algorithm, e.g. `ga.population_size=20`, `sa.cooling_rate=0.99`,
//! `tabu.tenure=5`, `kmeans.restarts=5`, `kmeans.init=random`,
//! `exact.cap=8`.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use mvrp_core::clustering::InitMode;
use mvrp_core::ga::{GaParams, MutationKind};

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "ga.population_size",
    "ga.mating_pool_size",
    "ga.crossover_prob",
    "ga.mutation_prob",
    "ga.max_generations",
    "ga.stall_generations",
    "ga.mutation",
    "sa.initial_temp",
    "sa.cooling_rate",
    "sa.steps_per_temp",
    "sa.min_temp",
    "tabu.tenure",
    "tabu.max_iterations",
    "kmeans.max_iter",
    "kmeans.restarts",
    "kmeans.init",
    "exact.cap",
];

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    values: HashMap<String, String>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key=value, got {line:?}",
                    idx + 1
                )));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", idx + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config: bad value {raw:?} for {key}"))),
        }
    }

    pub fn ga_params(&self, seed: u64) -> Result<GaParams, CliError> {
        let mut p = GaParams { seed, ..GaParams::default() };
        if let Some(v) = self.get("ga.population_size")? {
            p.population_size = v;
        }
        if let Some(v) = self.get("ga.mating_pool_size")? {
            p.mating_pool_size = v;
        }
        if let Some(v) = self.get("ga.crossover_prob")? {
            p.crossover_prob = v;
        }
        if let Some(v) = self.get("ga.mutation_prob")? {
            p.mutation_prob = v;
        }
        if let Some(v) = self.get("ga.max_generations")? {
            p.max_generations = v;
        }
        if let Some(v) = self.get("ga.stall_generations")? {
            p.stall_generations = v;
        }
        if let Some(v) = self.values.get("ga.mutation") {
            p.mutation = match v.as_str() {
                "swap" => MutationKind::Swap,
                "inversion" => MutationKind::Inversion,
                other => {
                    return Err(CliError::Usage(format!(
                        "config: ga.mutation must be swap or inversion, got {other:?}"
                    )))
                }
            };
        }
        Ok(p)
    }

    pub fn sa_initial_temp(&self) -> Result<Option<f64>, CliError> {
        self.get("sa.initial_temp")
    }

    pub fn sa_cooling_rate(&self) -> Result<Option<f64>, CliError> {
        self.get("sa.cooling_rate")
    }

    pub fn sa_steps_per_temp(&self) -> Result<Option<usize>, CliError> {
        self.get("sa.steps_per_temp")
    }

    pub fn sa_min_temp(&self) -> Result<Option<f64>, CliError> {
        self.get("sa.min_temp")
    }

    pub fn tabu_tenure(&self) -> Result<Option<usize>, CliError> {
        self.get("tabu.tenure")
    }

    pub fn tabu_max_iterations(&self) -> Result<Option<usize>, CliError> {
        self.get("tabu.max_iterations")
    }

    pub fn kmeans_max_iter(&self) -> Result<usize, CliError> {
        Ok(self.get("kmeans.max_iter")?.unwrap_or(mvrp_core::clustering::DEFAULT_MAX_ITER))
    }

    pub fn kmeans_restarts(&self) -> Result<usize, CliError> {
        Ok(self.get("kmeans.restarts")?.unwrap_or(mvrp_core::clustering::DEFAULT_RESTARTS))
    }

    pub fn kmeans_init(&self) -> Result<InitMode, CliError> {
        match self.values.get("kmeans.init").map(String::as_str) {
            None | Some("farthest") => Ok(InitMode::FarthestPoint),
            Some("random") => Ok(InitMode::Random),
            Some(other) => Err(CliError::Usage(format!(
                "config: kmeans.init must be farthest or random, got {other:?}"
            ))),
        }
    }

    pub fn exact_cap(&self) -> Result<usize, CliError> {
        Ok(self.get("exact.cap")?.unwrap_or(mvrp_core::exact::DEFAULT_BRUTE_FORCE_CAP))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let o = Overrides::from_str("# comment\nga.population_size=20\nsa.cooling_rate=0.9\n").unwrap();
        let ga = o.ga_params(1).unwrap();
        assert_eq!(ga.population_size, 20);
        assert_eq!(ga.seed, 1);
        assert_eq!(o.sa_cooling_rate().unwrap(), Some(0.9));
        assert_eq!(o.tabu_tenure().unwrap(), None);
    }

    #[test]
    fn rejects_unknown_key() {
        assert!(Overrides::from_str("nope=1\n").is_err());
    }

    #[test]
    fn rejects_bad_value() {
        let o = Overrides::from_str("ga.population_size=lots\n").unwrap();
        assert!(o.ga_params(0).is_err());
    }
}
