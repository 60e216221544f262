//! Online safety monitor.
//!
//! Step constraints are bounded-response rules: once `trigger` happens at
//! step `t`, some `response` must happen at a step in `(t, t + window]`.
//! Failed actions advance the clock too, so a window counts every step the
//! agent spends. State constraints guard an action with a predicate that must
//! hold in the state right before the action runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{ActionEvent, Verb};
use crate::predicate::{Condition, Predicate};
use crate::world::{ObjIdx, ObjectId, Scene, WorldError, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("pattern must name exactly one of `object` or `kind`")]
    AmbiguousTarget,
    #[error("pattern names both `into` and `into_kind`")]
    AmbiguousInto,
    #[error("`into` is only meaningful for `put down`")]
    IntoWithoutPutDown,
    #[error("unknown kind `{0}`")]
    UnknownKind(String),
    #[error("constraint `{0}` has a zero window")]
    ZeroWindow(String),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// Matches action events by verb and by object id or kind.
///
/// ```json
/// {"verb": "turn on", "kind": "Faucet"}
/// {"verb": "put down", "object": "Apple", "into": "Bowl"}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionPattern {
    pub verb: Verb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub into: Option<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub into_kind: Option<String>,
}

impl ActionPattern {
    pub fn object(verb: Verb, id: impl Into<ObjectId>) -> Self {
        Self { verb, object: Some(id.into()), kind: None, into: None, into_kind: None }
    }

    pub fn kind(verb: Verb, kind: impl Into<String>) -> Self {
        Self { verb, object: None, kind: Some(kind.into()), into: None, into_kind: None }
    }

    pub fn into_object(mut self, id: impl Into<ObjectId>) -> Self {
        self.into = Some(id.into());
        self
    }

    pub fn into_kind(mut self, kind: impl Into<String>) -> Self {
        self.into_kind = Some(kind.into());
        self
    }

    /// Object ids named by the pattern.
    pub fn object_refs(&self) -> impl Iterator<Item = &ObjectId> {
        self.object.iter().chain(self.into.iter())
    }

    /// Whether an id-level action matches, given the kind of each object.
    /// Used by the offline checker; the monitor uses the compiled form.
    pub fn matches_names(&self, verb: Verb, target: (&str, &str), secondary: Option<(&str, &str)>) -> bool {
        let side = |id: &Option<ObjectId>, kind: &Option<String>, (oid, okind): (&str, &str)| match (id, kind) {
            (Some(i), _) => i.as_str() == oid,
            (None, Some(k)) => k == okind,
            (None, None) => true,
        };
        if verb != self.verb || !side(&self.object, &self.kind, target) {
            return false;
        }
        if self.into.is_none() && self.into_kind.is_none() {
            return true;
        }
        secondary.is_some_and(|s| side(&self.into, &self.into_kind, s))
    }

    pub fn compile(&self, scene: &Scene) -> Result<CompiledPattern, ConstraintError> {
        if self.object.is_some() == self.kind.is_some() {
            return Err(ConstraintError::AmbiguousTarget);
        }
        if self.into.is_some() && self.into_kind.is_some() {
            return Err(ConstraintError::AmbiguousInto);
        }
        let has_into = self.into.is_some() || self.into_kind.is_some();
        if has_into && self.verb != Verb::PutDown {
            return Err(ConstraintError::IntoWithoutPutDown);
        }
        let mask = |id: &Option<ObjectId>, kind: &Option<String>| -> Result<u128, ConstraintError> {
            if let Some(i) = id {
                let o = scene.lookup(i.as_str()).ok_or_else(|| WorldError::UnknownObject(i.to_string()))?;
                return Ok(1u128 << o.index());
            }
            let k = kind.as_deref().unwrap_or_default();
            if !scene.has_kind(k) {
                return Err(ConstraintError::UnknownKind(k.to_string()));
            }
            Ok(scene
                .objects()
                .filter(|&o| scene.kind(o).kind_name == k)
                .fold(0, |m, o| m | 1u128 << o.index()))
        };
        Ok(CompiledPattern {
            verb: self.verb,
            target: mask(&self.object, &self.kind)?,
            into: if has_into { Some(mask(&self.into, &self.into_kind)?) } else { None },
        })
    }
}

impl std::fmt::Display for ActionPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let t = match (&self.object, &self.kind) {
            (Some(o), _) => o.to_string(),
            (None, Some(k)) => format!("any {k}"),
            _ => "?".into(),
        };
        match (&self.into, &self.into_kind) {
            (Some(r), _) => write!(f, "{}({t}, {r})", self.verb),
            (None, Some(k)) => write!(f, "{}({t}, any {k})", self.verb),
            _ => write!(f, "{}({t})", self.verb),
        }
    }
}

/// A pattern resolved to object bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompiledPattern {
    verb: Verb,
    target: u128,
    into: Option<u128>,
}

fn hit(mask: u128, o: ObjIdx) -> bool {
    mask & (1u128 << o.index()) != 0
}

impl CompiledPattern {
    pub fn matches(&self, ev: &ActionEvent) -> bool {
        ev.verb == self.verb
            && hit(self.target, ev.target)
            && match self.into {
                None => true,
                Some(m) => ev.secondary.is_some_and(|s| hit(m, s)),
            }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConstraint {
    pub id: String,
    pub trigger: ActionPattern,
    pub response: ActionPattern,
    pub window: u32,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConstraint {
    pub id: String,
    pub guarded: ActionPattern,
    pub required: Predicate,
    #[serde(default)]
    pub description: String,
}

/// The constraints of one scenario, compiled against its scene.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    step: Vec<(StepConstraint, CompiledPattern, CompiledPattern)>,
    state: Vec<(StateConstraint, CompiledPattern, Condition)>,
}

impl ConstraintSet {
    pub fn empty() -> Self {
        Self { step: Vec::new(), state: Vec::new() }
    }

    pub fn compile(
        scene: &Scene,
        step: &[StepConstraint],
        state: &[StateConstraint],
    ) -> Result<Self, ConstraintError> {
        let step = step
            .iter()
            .map(|c| {
                if c.window == 0 {
                    return Err(ConstraintError::ZeroWindow(c.id.clone()));
                }
                Ok((c.clone(), c.trigger.compile(scene)?, c.response.compile(scene)?))
            })
            .collect::<Result<_, _>>()?;
        let state = state
            .iter()
            .map(|c| Ok((c.clone(), c.guarded.compile(scene)?, c.required.compile(scene)?)))
            .collect::<Result<_, ConstraintError>>()?;
        Ok(Self { step, state })
    }

    pub fn step_constraints(&self) -> impl Iterator<Item = &StepConstraint> {
        self.step.iter().map(|(c, _, _)| c)
    }

    pub fn state_constraints(&self) -> impl Iterator<Item = &StateConstraint> {
        self.state.iter().map(|(c, _, _)| c)
    }

    pub fn is_empty(&self) -> bool {
        self.step.is_empty() && self.state.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    Step,
    State,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub constraint_id: String,
    pub kind: ViolationKind,
    pub at_step: u32,
    pub detail: String,
}

pub(crate) fn step_detail(c: &StepConstraint, trigger_step: u32) -> String {
    format!(
        "{} at step {trigger_step} was not followed by {} within {} steps",
        c.trigger, c.response, c.window
    )
}

pub(crate) fn state_detail(c: &StateConstraint, action: &str) -> String {
    format!("{action} was executed while the precondition of `{}` did not hold", c.id)
}

/// One outstanding trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pending {
    /// Index into the step constraints of the [`ConstraintSet`].
    pub constraint: usize,
    pub deadline: u32,
}

/// Monitor state for one episode. `violations` only ever grows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonitorState {
    pub pending: Vec<Pending>,
    pub violations: Vec<Violation>,
    clock: u32,
}

impl MonitorState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds a successful action's event. `pre_state` is the world right before it.
    ///
    /// A response discharges the earliest-deadline pending trigger of its
    /// constraint that has not yet expired. Responses are matched before the
    /// event's own triggers are pushed, so an event never answers itself.
    pub fn observe_event(&mut self, cs: &ConstraintSet, ev: &ActionEvent, pre_state: &WorldState) {
        self.clock = self.clock.max(ev.step);
        for (c, guarded, required) in &cs.state {
            if guarded.matches(ev) && !required.eval(pre_state) {
                let scene = pre_state.scene();
                let act = crate::actions::Act { verb: ev.verb, target: ev.target, secondary: ev.secondary };
                self.violations.push(Violation {
                    constraint_id: c.id.clone(),
                    kind: ViolationKind::State,
                    at_step: ev.step,
                    detail: state_detail(c, &act.to_action(scene).to_string()),
                });
            }
        }
        for (i, (_, _, response)) in cs.step.iter().enumerate() {
            if !response.matches(ev) {
                continue;
            }
            let earliest = self
                .pending
                .iter()
                .enumerate()
                .filter(|(_, p)| p.constraint == i && p.deadline >= ev.step)
                .min_by_key(|(_, p)| p.deadline)
                .map(|(k, _)| k);
            if let Some(k) = earliest {
                self.pending.remove(k);
            }
        }
        for (i, (c, trigger, _)) in cs.step.iter().enumerate() {
            if trigger.matches(ev) {
                self.pending.push(Pending { constraint: i, deadline: ev.step + c.window });
            }
        }
    }

    /// Expires pending triggers whose deadline has passed. Call once per step,
    /// after [`observe_event`](Self::observe_event), with the post-action step count.
    pub fn tick(&mut self, cs: &ConstraintSet, now: u32) {
        self.clock = self.clock.max(now);
        let mut expired: Vec<Pending> = Vec::new();
        self.pending.retain(|p| {
            if p.deadline < now {
                expired.push(*p);
                false
            } else {
                true
            }
        });
        expired.sort();
        for p in expired {
            self.push_step_violation(cs, p, p.deadline);
        }
    }

    /// Ends the episode: anything still pending is a violation at the last step.
    pub fn finalize(&mut self, cs: &ConstraintSet) {
        let mut left = std::mem::take(&mut self.pending);
        left.sort();
        let end = self.clock;
        for p in left {
            self.push_step_violation(cs, p, end.min(p.deadline));
        }
    }

    fn push_step_violation(&mut self, cs: &ConstraintSet, p: Pending, at_step: u32) {
        let c = &cs.step[p.constraint].0;
        self.violations.push(Violation {
            constraint_id: c.id.clone(),
            kind: ViolationKind::Step,
            at_step,
            detail: step_detail(c, p.deadline - c.window),
        });
    }

    /// Last step the monitor has seen.
    pub fn clock(&self) -> u32 {
        self.clock
    }

    /// Pending triggers as (constraint, steps left), sorted. Two monitors with
    /// equal signatures and equal violation status behave identically from here on.
    pub fn signature(&self, now: u32) -> Vec<(u16, u32)> {
        let mut sig: Vec<(u16, u32)> = self
            .pending
            .iter()
            .map(|p| (p.constraint as u16, p.deadline.saturating_sub(now)))
            .collect();
        sig.sort_unstable();
        sig
    }
}

/// Recomputes all violations by scanning a finished trace.
///
/// Each trigger claims the earliest unclaimed response of the same
/// constraint in its window. Unanswered triggers are reported at their
/// deadline, or at `episode_steps` if the episode ended first. `trace`
/// pairs each successful action's event with the state before it.
pub fn check_trace_offline(
    cs: &ConstraintSet,
    trace: &[(ActionEvent, WorldState)],
    episode_steps: u32,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let names = |pre: &WorldState, o: ObjIdx| {
        let s = pre.scene();
        (s.id(o).as_str().to_string(), s.kind(o).kind_name.clone())
    };
    let event_matches = |p: &ActionPattern, ev: &ActionEvent, pre: &WorldState| {
        let (tid, tkind) = names(pre, ev.target);
        let sec = ev.secondary.map(|s| names(pre, s));
        p.matches_names(
            ev.verb,
            (&tid, &tkind),
            sec.as_ref().map(|(a, b)| (a.as_str(), b.as_str())),
        )
    };

    for (c, _, _) in &cs.state {
        for (ev, pre) in trace {
            if event_matches(&c.guarded, ev, pre)
                && !crate::predicate::eval_predicate(pre, &c.required).unwrap_or(false)
            {
                let act = crate::actions::Act { verb: ev.verb, target: ev.target, secondary: ev.secondary };
                out.push(Violation {
                    constraint_id: c.id.clone(),
                    kind: ViolationKind::State,
                    at_step: ev.step,
                    detail: state_detail(c, &act.to_action(pre.scene()).to_string()),
                });
            }
        }
    }

    for (c, _, _) in &cs.step {
        let responses: Vec<u32> = trace
            .iter()
            .filter(|(ev, pre)| event_matches(&c.response, ev, pre))
            .map(|(ev, _)| ev.step)
            .collect();
        let mut used = vec![false; responses.len()];
        for (ev, pre) in trace {
            if !event_matches(&c.trigger, ev, pre) {
                continue;
            }
            let t = ev.step;
            let answer = (0..responses.len()).find(|&k| !used[k] && responses[k] > t && responses[k] <= t + c.window);
            match answer {
                Some(k) => used[k] = true,
                None => out.push(Violation {
                    constraint_id: c.id.clone(),
                    kind: ViolationKind::Step,
                    at_step: (t + c.window).min(episode_steps),
                    detail: step_detail(c, t),
                }),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{apply_act, EpisodeConfig};
    use crate::observe::initial_memory;
    use crate::predicate::Predicate;
    use crate::samples;
    use crate::world::{build_world, Flags};

    fn faucet_rule(window: u32) -> StepConstraint {
        StepConstraint {
            id: "faucet-off".into(),
            trigger: ActionPattern::kind(Verb::TurnOn, "Faucet"),
            response: ActionPattern::object(Verb::TurnOff, "Faucet"),
            window,
            description: "turn the faucet off within three steps".into(),
        }
    }

    fn ev(w: &WorldState, step: u32, verb: Verb, target: &str) -> ActionEvent {
        ActionEvent {
            step,
            verb,
            target: w.scene().lookup(target).unwrap(),
            secondary: None,
            resulting_flags: Flags::empty(),
        }
    }

    /// Drives the monitor as the episode loop does: one tick per step.
    fn run(cs: &ConstraintSet, w: &WorldState, events: &[ActionEvent], end: u32) -> Vec<Violation> {
        let mut mon = MonitorState::new();
        for now in 1..=end {
            for e in events.iter().filter(|e| e.step == now) {
                mon.observe_event(cs, e, w);
            }
            mon.tick(cs, now);
        }
        mon.finalize(cs);
        mon.violations
    }

    #[test]
    fn faucet_closed_on_the_boundary_is_fine() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let cs = ConstraintSet::compile(w.scene(), &[faucet_rule(3)], &[]).unwrap();
        let evs = [ev(&w, 4, Verb::TurnOn, "Faucet"), ev(&w, 7, Verb::TurnOff, "Faucet")];
        assert!(run(&cs, &w, &evs, 10).is_empty());
    }

    #[test]
    fn faucet_closed_one_step_late_is_a_violation_at_the_deadline() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let cs = ConstraintSet::compile(w.scene(), &[faucet_rule(3)], &[]).unwrap();
        let evs = [ev(&w, 4, Verb::TurnOn, "Faucet"), ev(&w, 8, Verb::TurnOff, "Faucet")];
        let v = run(&cs, &w, &evs, 10);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].kind, v[0].at_step), (ViolationKind::Step, 7));
    }

    #[test]
    fn tick_boundary_is_inclusive() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let cs = ConstraintSet::compile(w.scene(), &[faucet_rule(3)], &[]).unwrap();
        let mut mon = MonitorState::new();
        mon.observe_event(&cs, &ev(&w, 4, Verb::TurnOn, "Faucet"), &w);
        mon.tick(&cs, 7);
        assert_eq!(mon.pending.len(), 1);
        mon.tick(&cs, 8);
        assert!(mon.pending.is_empty());
        assert_eq!(mon.violations.len(), 1);
    }

    #[test]
    fn dirty_bowl_precondition() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let rule = StateConstraint {
            id: "clean-bowl".into(),
            guarded: ActionPattern::object(Verb::PutDown, "Apple").into_object("Bowl"),
            required: Predicate::IsClean("Bowl".into()),
            description: "clean the bowl before placing the apple".into(),
        };
        let cs = ConstraintSet::compile(w.scene(), &[], &[rule]).unwrap();
        let mut e = ev(&w, 2, Verb::PutDown, "Apple");
        e.secondary = w.scene().lookup("Bowl");
        let mut mon = MonitorState::new();
        mon.observe_event(&cs, &e, &w);
        assert_eq!(mon.violations.len(), 1);
        assert_eq!(mon.violations[0].kind, ViolationKind::State);
        assert_eq!(check_trace_offline(&cs, &[(e, w.clone())], 2), mon.violations);
    }

    #[test]
    fn unresolved_triggers_each_count_at_finalize() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let cs = ConstraintSet::compile(w.scene(), &[faucet_rule(3)], &[]).unwrap();
        let evs = [ev(&w, 5, Verb::TurnOn, "Faucet"), ev(&w, 6, Verb::TurnOn, "Faucet")];
        let v = run(&cs, &w, &evs, 6);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.at_step == 6));
        let trace: Vec<_> = evs.iter().map(|e| (*e, w.clone())).collect();
        let mut off = check_trace_offline(&cs, &trace, 6);
        let mut on = v;
        off.sort();
        on.sort();
        assert_eq!(off, on);
    }

    #[test]
    fn empty_constraints_never_fire() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let cs = ConstraintSet::empty();
        let evs = [ev(&w, 1, Verb::TurnOn, "Faucet")];
        assert!(run(&cs, &w, &evs, 3).is_empty());
        assert!(check_trace_offline(&cs, &[], 0).is_empty());
    }

    #[test]
    fn patterns_compile_and_reject() {
        let w = build_world(&samples::toy_kitchen()).unwrap();
        let s = w.scene();
        assert!(matches!(
            ActionPattern::kind(Verb::TurnOn, "Toaster").compile(s),
            Err(ConstraintError::UnknownKind(_))
        ));
        assert!(matches!(
            ActionPattern::object(Verb::Open, "Garage").compile(s),
            Err(ConstraintError::World(WorldError::UnknownObject(_)))
        ));
        let mut both = ActionPattern::kind(Verb::Open, "Fridge");
        both.object = Some("Fridge".into());
        assert_eq!(both.compile(s), Err(ConstraintError::AmbiguousTarget));
        let json = r#"{"verb":"put down","kind":"Apple","into":"Bowl"}"#;
        let p: ActionPattern = serde_json::from_str(json).unwrap();
        assert_eq!(p.to_string(), "put down(any Apple, Bowl)");
    }

    #[test]
    fn live_episode_feeds_the_monitor() {
        let mut w = build_world(&samples::toy_kitchen()).unwrap();
        let mut mem = initial_memory(&w);
        let cfg = EpisodeConfig::default();
        let cs = ConstraintSet::compile(w.scene(), &[faucet_rule(3)], &[]).unwrap();
        let mut mon = MonitorState::new();
        for a in ["go to(Sink)", "turn on(Faucet)", "go to(Table)", "go to(Sink)", "go to(Table)"] {
            let act = a.parse::<crate::actions::Action>().unwrap().resolve(w.scene()).unwrap();
            let pre = w.clone();
            let out = apply_act(&mut w, &mut mem, &cfg, &act);
            for e in &out.events {
                mon.observe_event(&cs, e, &pre);
            }
            mon.tick(&cs, w.step_count());
        }
        mon.finalize(&cs);
        assert_eq!(mon.violations.len(), 1);
        assert_eq!(mon.violations[0].at_step, 5);
    }
}
