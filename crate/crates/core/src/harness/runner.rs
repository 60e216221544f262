//! Batch evaluation over a suite, several runs, on a worker pool.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::episode::run_episode;
use super::report::{aggregate, EpisodeRecord, EpisodeStatus, RunReport};
use crate::actions::EpisodeConfig;
use crate::agents::{AgentConfig, ChatClient};
use crate::scenarios::{Scenario, Setting, Suite};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Scenario ids or hazard names to keep; empty keeps everything.
    pub filter: Vec<String>,
    pub agent: AgentConfig,
    pub full_observability: bool,
    pub ignore_physical_constraints: bool,
    /// Overrides each scenario's own budget.
    pub max_steps: Option<u32>,
    pub setting: Setting,
    pub runs: u32,
    pub base_seed: u64,
    pub parallel: usize,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            filter: Vec::new(),
            agent: AgentConfig::Oracle,
            full_observability: false,
            ignore_physical_constraints: false,
            max_steps: None,
            setting: Setting::Explicit,
            runs: 3,
            base_seed: 0,
            parallel: 1,
            strict: false,
        }
    }
}

impl RunConfig {
    pub fn episode_config(&self, s: &Scenario) -> EpisodeConfig {
        EpisodeConfig {
            full_observability: self.full_observability,
            ignore_physical_constraints: self.ignore_physical_constraints,
            max_steps: self.max_steps.unwrap_or(s.max_steps),
        }
    }

    pub fn selects(&self, s: &Scenario) -> bool {
        self.filter.is_empty() || self.filter.iter().any(|f| *f == s.id || *f == s.hazard.name())
    }

    /// What gets echoed into the outputs. Worker count is left out so
    /// results do not depend on it.
    pub fn echo(&self) -> Value {
        json!({
            "agent": self.agent,
            "filter": self.filter,
            "setting": self.setting,
            "obs": if self.full_observability { "fo" } else { "po" },
            "pc": if self.ignore_physical_constraints { "off" } else { "on" },
            "max_steps": self.max_steps,
            "runs": self.runs,
            "seed": self.base_seed,
            "strict": self.strict,
        })
    }
}

/// Seed for one episode, stable across platforms and worker counts.
pub fn episode_seed(base: u64, run: u32, scenario_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update(run.to_le_bytes());
    h.update(scenario_id.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

fn run_one(
    s: &Scenario,
    run: u32,
    cfg: &RunConfig,
    client: Option<Arc<dyn ChatClient>>,
) -> EpisodeRecord {
    let seed = episode_seed(cfg.base_seed, run, &s.id);
    let ep = cfg.episode_config(s);
    let outcome = cfg
        .agent
        .build(s, &ep, seed, client)
        .map_err(|e| e.to_string())
        .and_then(|mut agent| run_episode(s, agent.as_mut(), &ep, cfg.setting, seed).map_err(|e| e.to_string()));
    let (status, error, result) = match outcome {
        Ok(r) => (EpisodeStatus::Ok, None, Some(r)),
        Err(e) => {
            log::warn!("{} run {run}: {e}", s.id);
            (EpisodeStatus::Errored, Some(e), None)
        }
    };
    EpisodeRecord { run, scenario_id: s.id.clone(), hazard: s.hazard, seed, status, error, result }
}

/// Runs every selected scenario `cfg.runs` times. Records come back sorted
/// by (scenario id, run) whatever the worker count.
pub fn run_suite(
    suite: &Suite,
    cfg: &RunConfig,
    client: Option<Arc<dyn ChatClient>>,
) -> (RunReport, Vec<EpisodeRecord>) {
    let picked: Vec<&Scenario> = suite.scenarios.iter().filter(|s| cfg.selects(s)).collect();
    let mut work: Vec<(&Scenario, u32)> = Vec::new();
    for s in &picked {
        for run in 0..cfg.runs.max(1) {
            work.push((s, run));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallel.max(1))
        .build()
        .expect("thread pool");
    let mut records: Vec<EpisodeRecord> =
        pool.install(|| work.par_iter().map(|(s, run)| run_one(s, *run, cfg, client.clone())).collect());
    records.sort_by(|a, b| (&a.scenario_id, a.run).cmp(&(&b.scenario_id, b.run)));
    let report = aggregate(&records, cfg.echo(), &suite.hash, cfg.strict);
    (report, records)
}
