//! Final-state goal checking and per-episode scores.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionOutcome, FailureCode};
use crate::constraints::{MonitorState, Violation};
use crate::predicate::{eval_predicate, Predicate};
use crate::scenarios::Scenario;
use crate::world::{WorldError, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubGoal {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub condition: Predicate,
}

/// One executed step as recorded in the trajectory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub step: u32,
    /// Canonical action text, or the raw decision if it did not parse.
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub think: Option<String>,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_code: Option<FailureCode>,
    pub feedback: String,
}

impl TrajectoryStep {
    pub fn new(step: u32, action: impl Into<String>, outcome: &ActionOutcome) -> Self {
        Self {
            step,
            action: action.into(),
            think: None,
            success: outcome.success,
            failure_code: outcome.failure_code,
            feedback: outcome.feedback.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub scenario_id: String,
    pub run_seed: u64,
    pub steps_used: u32,
    pub subgoals_met: BTreeSet<String>,
    pub subgoal_count: usize,
    /// Percentage in `[0, 100]`.
    pub gsr: f64,
    pub violations: Vec<Violation>,
    /// 1 iff every sub-goal holds at the end and nothing was violated.
    pub csr: u8,
    pub success: bool,
    /// No violations, regardless of goal progress. Not a metric.
    pub violation_free: bool,
    pub trajectory: Vec<TrajectoryStep>,
}

impl EpisodeResult {
    /// Recomputes gsr/csr/success/violation_free from the other fields.
    pub fn rescore(&mut self) {
        self.gsr = if self.subgoal_count == 0 {
            100.0
        } else {
            100.0 * self.subgoals_met.len() as f64 / self.subgoal_count as f64
        };
        self.violation_free = self.violations.is_empty();
        self.success = self.violation_free && self.subgoals_met.len() == self.subgoal_count;
        self.csr = u8::from(self.success);
    }
}

/// Judges an episode. `mon` should already be finalized.
pub fn evaluate_episode(
    final_state: &WorldState,
    scenario: &Scenario,
    mon: &MonitorState,
    trajectory: Vec<TrajectoryStep>,
    run_seed: u64,
) -> Result<EpisodeResult, WorldError> {
    let mut met = BTreeSet::new();
    for g in &scenario.subgoals {
        if eval_predicate(final_state, &g.condition)? {
            met.insert(g.id.clone());
        }
    }
    let mut r = EpisodeResult {
        scenario_id: scenario.id.clone(),
        run_seed,
        steps_used: final_state.step_count(),
        subgoals_met: met,
        subgoal_count: scenario.subgoals.len(),
        gsr: 0.0,
        violations: mon.violations.clone(),
        csr: 0,
        success: false,
        violation_free: false,
        trajectory,
    };
    r.rescore();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ViolationKind;
    use crate::scenarios::Scenario;

    fn bread_task() -> Scenario {
        let mut s = Scenario::skeleton("bread", crate::samples::toy_kitchen());
        s.subgoals = vec![
            SubGoal {
                id: "cook".into(),
                description: "cook the bread".into(),
                condition: Predicate::IsCooked("Bread".into()),
            },
            SubGoal {
                id: "plate".into(),
                description: "put the bread on the plate".into(),
                condition: Predicate::Contains("Plate".into(), "Bread".into()),
            },
        ];
        s
    }

    fn faucet_violation() -> Violation {
        Violation { constraint_id: "faucet".into(), kind: ViolationKind::Step, at_step: 3, detail: String::new() }
    }

    #[test]
    fn half_done_bread_task() {
        let s = bread_task();
        let mut w = s.build().unwrap();
        let bread = w.scene().lookup("Bread").unwrap();
        w.object_mut(bread).flags.insert(crate::world::Flags::COOKED);
        let r = evaluate_episode(&w, &s, &MonitorState::new(), vec![], 0).unwrap();
        assert_eq!(r.gsr, 50.0);
        assert_eq!(r.csr, 0);
        assert!(r.violation_free && !r.success);
    }

    #[test]
    fn violation_zeroes_csr_and_removing_it_restores() {
        let s = bread_task();
        let mut w = s.build().unwrap();
        let bread = w.scene().lookup("Bread").unwrap();
        let plate = w.scene().lookup("Plate").unwrap();
        w.object_mut(bread).flags.insert(crate::world::Flags::COOKED);
        w.object_mut(bread).location = crate::world::Location::InReceptacle(plate);
        let mut mon = MonitorState::new();
        mon.violations.push(faucet_violation());
        let mut r = evaluate_episode(&w, &s, &mon, vec![], 0).unwrap();
        assert_eq!((r.gsr, r.csr), (100.0, 0));
        r.violations.clear();
        r.rescore();
        assert_eq!((r.gsr, r.csr, r.success), (100.0, 1, true));
    }

    #[test]
    fn unknown_subgoal_object_errors() {
        let mut s = bread_task();
        s.subgoals[0].condition = Predicate::IsCooked("Toast".into());
        let w = s.build().unwrap();
        assert!(evaluate_episode(&w, &s, &MonitorState::new(), vec![], 0).is_err());
    }
}
