//! Agents choose one action per step from the observation text.
//!
//! Non-LLM agents are deterministic given their plan or seed. The LLM agent
//! talks to any OpenAI-compatible chat-completions endpoint.

mod llm;
mod parse;
pub mod stub;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{legal_actions, Action, EpisodeConfig};
use crate::goals::TrajectoryStep;
use crate::observe::ObservationMemory;
use crate::scenarios::{plan_oracle, Scenario};
use crate::world::WorldState;

pub use llm::{
    build_messages, ChatClient, ChatError, ChatMessage, ChatRequest, HttpChatClient, LlmAgent, LlmConfig,
    PromptTemplate, DEFAULT_API_KEY_ENV, DEFAULT_HISTORY_TOKENS,
};
pub use parse::{parse_decision, ParseError};
pub use stub::{decision_json, RecordedRequest, StubReply, StubServer};

/// What the agent does this step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentAct {
    Action(Action),
    /// End the episode.
    Stop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentDecision {
    pub think: String,
    pub act: AgentAct,
}

impl AgentDecision {
    pub fn action(a: Action) -> Self {
        Self { think: String::new(), act: AgentAct::Action(a) }
    }

    pub fn stop() -> Self {
        Self { think: String::new(), act: AgentAct::Stop }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    /// The model never produced a usable decision. The episode charges a step and continues.
    #[error("unusable model output after retries: {message}")]
    MalformedModelOutput { message: String, raw: String },
    /// Transport or HTTP failure after retries. The episode is aborted.
    #[error("endpoint error: {0}")]
    Endpoint(String),
    #[error("cannot build agent: {0}")]
    Setup(String),
}

/// Everything an agent may look at when deciding.
///
/// `world` and `memory` are exposed for baselines that enumerate legal
/// actions; the LLM agent only reads the text fields.
pub struct StepContext<'a> {
    pub instruction: &'a str,
    pub observation: &'a str,
    pub history: &'a [TrajectoryStep],
    pub world: &'a WorldState,
    pub memory: &'a ObservationMemory,
    pub cfg: &'a EpisodeConfig,
}

pub trait Agent: Send {
    fn next_decision(&mut self, ctx: &StepContext<'_>) -> Result<AgentDecision, AgentError>;
}

/// Plays back a fixed list of actions, then stops.
#[derive(Debug, Clone)]
pub struct ReplayAgent {
    plan: std::vec::IntoIter<Action>,
}

impl ReplayAgent {
    pub fn new(plan: Vec<Action>) -> Self {
        Self { plan: plan.into_iter() }
    }
}

impl Agent for ReplayAgent {
    fn next_decision(&mut self, _: &StepContext<'_>) -> Result<AgentDecision, AgentError> {
        Ok(self.plan.next().map_or_else(AgentDecision::stop, AgentDecision::action))
    }
}

/// Follows the planner's shortest safe plan for its scenario and config.
pub struct OracleAgent(ReplayAgent);

impl OracleAgent {
    pub fn new(scenario: &Scenario, cfg: &EpisodeConfig) -> Result<Self, AgentError> {
        let plan = plan_oracle(scenario, cfg).map_err(|e| AgentError::Setup(format!("{}: {e}", scenario.id)))?;
        Ok(Self(ReplayAgent::new(plan)))
    }
}

impl Agent for OracleAgent {
    fn next_decision(&mut self, ctx: &StepContext<'_>) -> Result<AgentDecision, AgentError> {
        self.0.next_decision(ctx)
    }
}

/// Picks uniformly among the currently legal actions.
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Agent for RandomAgent {
    fn next_decision(&mut self, ctx: &StepContext<'_>) -> Result<AgentDecision, AgentError> {
        let legal = legal_actions(ctx.world, ctx.memory, ctx.cfg);
        Ok(legal
            .choose(&mut self.rng)
            .cloned()
            .map_or_else(AgentDecision::stop, AgentDecision::action))
    }
}

/// Which agent to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentConfig {
    Oracle,
    /// The per-episode seed is derived from the run seed.
    Random,
    Replay { plan: Vec<String> },
    Llm(LlmConfig),
}

impl AgentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            AgentConfig::Oracle => "oracle",
            AgentConfig::Random => "random",
            AgentConfig::Replay { .. } => "replay",
            AgentConfig::Llm(_) => "llm",
        }
    }

    /// Instantiates the agent for one episode. `client` is required for `Llm`.
    pub fn build(
        &self,
        scenario: &Scenario,
        cfg: &EpisodeConfig,
        seed: u64,
        client: Option<std::sync::Arc<dyn ChatClient>>,
    ) -> Result<Box<dyn Agent>, AgentError> {
        Ok(match self {
            AgentConfig::Oracle => Box::new(OracleAgent::new(scenario, cfg)?),
            AgentConfig::Random => Box::new(RandomAgent::new(seed)),
            AgentConfig::Replay { plan } => {
                let plan = plan
                    .iter()
                    .map(|a| a.parse::<Action>().map_err(|e| AgentError::Setup(format!("`{a}`: {e}"))))
                    .collect::<Result<_, _>>()?;
                Box::new(ReplayAgent::new(plan))
            }
            AgentConfig::Llm(c) => {
                let client = client.ok_or_else(|| AgentError::Setup("no chat client configured".into()))?;
                Box::new(LlmAgent::new(client, c.clone(), cfg)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observe::{initial_memory, render_observation};
    use crate::samples;

    #[test]
    fn random_agent_is_seeded() {
        let w = crate::world::build_world(&samples::toy_kitchen()).unwrap();
        let mem = initial_memory(&w);
        let cfg = EpisodeConfig::default();
        let obs = render_observation(&w, &mem, None);
        let ctx = StepContext { instruction: "", observation: &obs, history: &[], world: &w, memory: &mem, cfg: &cfg };
        let pick = |seed| {
            let mut a = RandomAgent::new(seed);
            (0..5).map(|_| a.next_decision(&ctx).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(pick(7), pick(7));
        let legal = legal_actions(&w, &mem, &cfg);
        for d in pick(7) {
            let AgentAct::Action(a) = d.act else { panic!() };
            assert!(legal.contains(&a));
        }
    }

    #[test]
    fn replay_stops_when_exhausted() {
        let w = crate::world::build_world(&samples::minimal_scene()).unwrap();
        let mem = initial_memory(&w);
        let cfg = EpisodeConfig::default();
        let ctx = StepContext { instruction: "", observation: "", history: &[], world: &w, memory: &mem, cfg: &cfg };
        let mut a = ReplayAgent::new(vec!["go to(Fridge)".parse().unwrap()]);
        assert!(matches!(a.next_decision(&ctx).unwrap().act, AgentAct::Action(_)));
        assert_eq!(a.next_decision(&ctx).unwrap().act, AgentAct::Stop);
    }

    #[test]
    fn agent_config_json() {
        let c: AgentConfig = serde_json::from_str(r#"{"kind":"replay","plan":["open(Fridge)"]}"#).unwrap();
        assert_eq!(c.name(), "replay");
        let back = serde_json::to_string(&AgentConfig::Oracle).unwrap();
        assert_eq!(back, r#"{"kind":"oracle"}"#);
    }
}
