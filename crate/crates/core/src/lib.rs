//! A symbolic household world for evaluating safety-aware embodied task
//! planning, with an online safety monitor and an evaluation harness.
//!
//! Start with [`scenarios::load_suite`] and [`harness::run_episode`], or the
//! `embodied-safety` binary.

pub mod actions;
pub mod agents;
pub mod constraints;
pub mod goals;
pub mod harness;
pub mod observe;
pub mod predicate;
pub mod samples;
pub mod scenarios;
pub mod world;

pub use actions::{apply_action, legal_actions, Action, ActionOutcome, EpisodeConfig, FailureCode, Verb};
pub use constraints::{check_trace_offline, MonitorState, Violation};
pub use goals::{evaluate_episode, EpisodeResult, SubGoal};
pub use observe::{initial_memory, render_observation, ObservationMemory};
pub use predicate::{eval_predicate, Predicate};
pub use scenarios::{load_suite, plan_oracle, validate_scenario, Hazard, Scenario, Setting};
pub use world::{build_world, ObjectId, SceneSpec, WorldState};
