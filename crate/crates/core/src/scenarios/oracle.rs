//! Breadth-first planner over (world, memory, monitor) states.
//!
//! Returns a shortest sequence of successful actions after which every
//! sub-goal holds, no constraint was violated and no step constraint is
//! still waiting for its response. Ties go to the first plan in
//! [`legal_acts`] order.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::actions::{legal_acts, try_apply, Act, Action, EpisodeConfig};
use crate::constraints::{ConstraintSet, MonitorState};
use crate::observe::{initial_memory, ObservationMemory};
use crate::predicate::Condition;
use crate::world::{Location, WorldState};

use super::Scenario;

/// Expansion cap per search.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget exhausted after {expanded} states")]
    SearchBudgetExceeded { expanded: usize },
    #[error("no safe plan exists within the step budget ({expanded} states explored)")]
    Infeasible { expanded: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OraclePlan {
    pub actions: Vec<Action>,
    pub expanded: usize,
}

/// Shortest safe plan with the default budget.
pub fn plan_oracle(scenario: &Scenario, cfg: &EpisodeConfig) -> Result<Vec<Action>, OracleError> {
    plan_oracle_with_budget(scenario, cfg, DEFAULT_BUDGET).map(|p| p.actions)
}

fn key(world: &WorldState, mem: &ObservationMemory, mon: &MonitorState) -> Box<[u8]> {
    let mut k = Vec::with_capacity(world.objects().len() * 4 + 24);
    for o in world.objects() {
        k.push(o.flags.bits());
        k.push(o.fill.map_or(0, |l| l.0 + 1));
        let loc: u16 = match o.location {
            Location::Fixture => 0,
            Location::InReceptacle(r) => 1 + r.0,
            Location::OnFloorAt(f) => 0x4000 | f.0,
            Location::InAgentHand => 0x8000,
        };
        k.extend_from_slice(&loc.to_le_bytes());
    }
    let a = world.agent();
    k.extend_from_slice(&a.at.0.to_le_bytes());
    k.extend_from_slice(&a.holding.map_or(u16::MAX, |h| h.0).to_le_bytes());
    k.extend_from_slice(&mem.bits().to_le_bytes());
    for (c, left) in mon.signature(a.step_count) {
        k.extend_from_slice(&c.to_le_bytes());
        k.extend_from_slice(&left.to_le_bytes());
    }
    k.into_boxed_slice()
}

fn done(world: &WorldState, mon: &MonitorState, goals: &[Condition]) -> bool {
    mon.violations.is_empty() && mon.pending.is_empty() && goals.iter().all(|g| g.eval(world))
}

pub fn plan_oracle_with_budget(
    scenario: &Scenario,
    cfg: &EpisodeConfig,
    budget: usize,
) -> Result<OraclePlan, OracleError> {
    let world = scenario.build().map_err(|e| OracleError::Invalid(e.to_string()))?;
    let cs: ConstraintSet = scenario.constraints(&world).map_err(|e| OracleError::Invalid(e.to_string()))?;
    let goals: Vec<Condition> = scenario
        .subgoals
        .iter()
        .map(|g| g.condition.compile(world.scene()))
        .collect::<Result<_, _>>()
        .map_err(|e| OracleError::Invalid(e.to_string()))?;
    let scene = world.scene().clone();

    let mem = initial_memory(&world);
    let mon = MonitorState::new();
    if done(&world, &mon, &goals) {
        return Ok(OraclePlan { actions: Vec::new(), expanded: 0 });
    }

    // (parent node, action) per discovered node; node 0 is the root.
    let mut tree: Vec<(u32, Option<Act>)> = vec![(0, None)];
    let mut seen: HashSet<Box<[u8]>> = HashSet::new();
    seen.insert(key(&world, &mem, &mon));
    let mut queue = VecDeque::new();
    queue.push_back((0u32, world, mem, mon));
    let mut expanded = 0usize;

    let unwind = |tree: &[(u32, Option<Act>)], mut n: u32| {
        let mut acts = Vec::new();
        while let (parent, Some(a)) = tree[n as usize] {
            acts.push(a.to_action(&scene));
            n = parent;
        }
        acts.reverse();
        acts
    };

    while let Some((node, world, mem, mon)) = queue.pop_front() {
        if world.step_count() >= cfg.max_steps {
            continue;
        }
        expanded += 1;
        if expanded > budget {
            return Err(OracleError::SearchBudgetExceeded { expanded: budget });
        }
        for act in legal_acts(&world, &mem, cfg) {
            let mut w = world.clone();
            let mut m = mem.clone();
            let Ok(ev) = try_apply(&mut w, &mut m, cfg, &act) else {
                continue;
            };
            let mut mo = mon.clone();
            mo.observe_event(&cs, &ev, &world);
            mo.tick(&cs, ev.step);
            if !mo.violations.is_empty() {
                continue;
            }
            if !seen.insert(key(&w, &m, &mo)) {
                continue;
            }
            tree.push((node, Some(act)));
            let child = (tree.len() - 1) as u32;
            if done(&w, &mo, &goals) {
                return Ok(OraclePlan { actions: unwind(&tree, child), expanded });
            }
            queue.push_back((child, w, m, mo));
        }
    }
    Err(OracleError::Infeasible { expanded })
}
