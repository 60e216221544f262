//! One episode: observe, decide, act, monitor, until done.

use thiserror::Error;

use crate::actions::{apply_action, burn_step, Action, ActionOutcome, EpisodeConfig, FailureCode};
use crate::agents::{Agent, AgentAct, AgentError, StepContext};
use crate::constraints::{ConstraintSet, MonitorState, Violation};
use crate::goals::{evaluate_episode, EpisodeResult, TrajectoryStep};
use crate::observe::{initial_memory, render_observation, ObservationMemory};
use crate::predicate::Condition;
use crate::scenarios::{Scenario, Setting};
use crate::world::WorldState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpisodeError {
    #[error("scenario `{id}` cannot be instantiated: {reason}")]
    Scenario { id: String, reason: String },
    #[error("agent errored: {0}")]
    AgentErrored(String),
}

/// Live episode state. Drive it with [`step`](Self::step) until
/// [`is_over`](Self::is_over), then call [`finish`](Self::finish).
pub struct Episode<'s> {
    scenario: &'s Scenario,
    cfg: EpisodeConfig,
    seed: u64,
    world: WorldState,
    memory: ObservationMemory,
    constraints: ConstraintSet,
    goals: Vec<Condition>,
    monitor: MonitorState,
    trajectory: Vec<TrajectoryStep>,
    last: Option<ActionOutcome>,
}

impl<'s> Episode<'s> {
    pub fn new(scenario: &'s Scenario, cfg: EpisodeConfig, seed: u64) -> Result<Self, EpisodeError> {
        let bad = |reason: String| EpisodeError::Scenario { id: scenario.id.clone(), reason };
        let world = scenario.build().map_err(|e| bad(e.to_string()))?;
        let constraints = scenario.constraints(&world).map_err(|e| bad(e.to_string()))?;
        let goals = scenario
            .subgoals
            .iter()
            .map(|g| g.condition.compile(world.scene()))
            .collect::<Result<_, _>>()
            .map_err(|e| bad(e.to_string()))?;
        Ok(Self {
            scenario,
            cfg,
            seed,
            memory: initial_memory(&world),
            world,
            constraints,
            goals,
            monitor: MonitorState::new(),
            trajectory: Vec::new(),
            last: None,
        })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn memory(&self) -> &ObservationMemory {
        &self.memory
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.cfg
    }

    pub fn violations(&self) -> &[Violation] {
        &self.monitor.violations
    }

    pub fn trajectory(&self) -> &[TrajectoryStep] {
        &self.trajectory
    }

    pub fn observation(&self) -> String {
        render_observation(&self.world, &self.memory, self.last.as_ref())
    }

    /// Every sub-goal holds and no step constraint is waiting.
    pub fn goals_met(&self) -> bool {
        self.monitor.pending.is_empty() && self.goals.iter().all(|g| g.eval(&self.world))
    }

    pub fn is_over(&self) -> bool {
        self.world.step_count() >= self.cfg.max_steps || self.goals_met()
    }

    /// Executes one action and feeds the monitor.
    pub fn step(&mut self, action: &Action, think: Option<String>) -> &ActionOutcome {
        let pre = self.world.clone();
        let outcome = apply_action(&mut self.world, &mut self.memory, &self.cfg, action);
        for ev in &outcome.events {
            self.monitor.observe_event(&self.constraints, ev, &pre);
        }
        self.record(action.to_string(), think, outcome)
    }

    /// Charges a step for a decision that could not be executed.
    pub fn burn(&mut self, raw: &str, reason: &str, think: Option<String>) -> &ActionOutcome {
        let outcome = burn_step(
            &mut self.world,
            &self.cfg,
            FailureCode::InvalidAction,
            format!("No valid action was given: {reason}."),
        );
        self.record(raw.to_string(), think, outcome)
    }

    fn record(&mut self, action: String, think: Option<String>, outcome: ActionOutcome) -> &ActionOutcome {
        let now = self.world.step_count();
        self.monitor.tick(&self.constraints, now);
        let mut entry = TrajectoryStep::new(now, action, &outcome);
        entry.think = think.filter(|t| !t.is_empty());
        self.trajectory.push(entry);
        self.last.insert(outcome)
    }

    pub fn finish(mut self) -> EpisodeResult {
        self.monitor.finalize(&self.constraints);
        evaluate_episode(&self.world, self.scenario, &self.monitor, self.trajectory, self.seed)
            .expect("sub-goals compiled at episode start")
    }
}

/// Runs `agent` on `scenario` until it stops, the goals are met with nothing
/// pending, or the step budget runs out.
pub fn run_episode(
    scenario: &Scenario,
    agent: &mut dyn Agent,
    cfg: &EpisodeConfig,
    setting: Setting,
    seed: u64,
) -> Result<EpisodeResult, EpisodeError> {
    let mut ep = Episode::new(scenario, *cfg, seed)?;
    let instruction = scenario.instruction(setting);
    while !ep.is_over() {
        let observation = ep.observation();
        let ctx = StepContext {
            instruction,
            observation: &observation,
            history: ep.trajectory(),
            world: ep.world(),
            memory: ep.memory(),
            cfg: ep.config(),
        };
        match agent.next_decision(&ctx) {
            Ok(d) => match d.act {
                AgentAct::Stop => break,
                AgentAct::Action(a) => {
                    ep.step(&a, Some(d.think));
                }
            },
            Err(AgentError::MalformedModelOutput { message, raw }) => {
                ep.burn(&raw, &message, None);
            }
            Err(e) => return Err(EpisodeError::AgentErrored(e.to_string())),
        }
    }
    Ok(ep.finish())
}
