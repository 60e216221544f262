//! The low-level action vocabulary and its execution semantics.
//!
//! Every call to [`apply_action`] consumes one step, whether or not the
//! action succeeds. Failed actions leave the world untouched apart from the
//! step counter and carry a [`FailureCode`] plus a feedback sentence.
//!
//! Gating, in check order: observation (partial observability), affordance,
//! broken target, already-in-state, hand (physical constraints), position,
//! enclosing containers, liquid. Under `ignore_physical_constraints` the
//! empty-hand and held-tool requirements are waived; holding a second object
//! is never possible since the agent has a single arm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::observe::ObservationMemory;
use crate::world::{Affordances, Flags, Location, ObjIdx, ObjectId, Scene, WorldError, WorldState, WATER};

/// Default per-episode step budget.
pub const DEFAULT_MAX_STEPS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verb {
    GoTo,
    PickUp,
    PutDown,
    Open,
    Close,
    TurnOn,
    TurnOff,
    Slice,
    Drop,
    Throw,
    PourInto,
    Empty,
    Break,
    FindObject,
}

impl Verb {
    /// The thirteen embodied verbs followed by `find object`.
    pub const ALL: [Verb; 14] = [
        Verb::GoTo,
        Verb::PickUp,
        Verb::PutDown,
        Verb::Open,
        Verb::Close,
        Verb::TurnOn,
        Verb::TurnOff,
        Verb::Slice,
        Verb::Drop,
        Verb::Throw,
        Verb::PourInto,
        Verb::Empty,
        Verb::Break,
        Verb::FindObject,
    ];

    pub fn phrase(self) -> &'static str {
        match self {
            Verb::GoTo => "go to",
            Verb::PickUp => "pick up",
            Verb::PutDown => "put down",
            Verb::Open => "open",
            Verb::Close => "close",
            Verb::TurnOn => "turn on",
            Verb::TurnOff => "turn off",
            Verb::Slice => "slice",
            Verb::Drop => "drop",
            Verb::Throw => "throw",
            Verb::PourInto => "pour into",
            Verb::Empty => "empty",
            Verb::Break => "break",
            Verb::FindObject => "find object",
        }
    }

    /// Case- and whitespace-insensitive lookup (`"Turn  On"`, `"turnon"`).
    pub fn from_phrase(s: &str) -> Option<Verb> {
        let squashed: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        Verb::ALL
            .into_iter()
            .find(|v| v.phrase().replace(' ', "") == squashed)
    }

    /// Whether the verb takes a destination (`put down(obj, receptacle)`).
    pub fn takes_secondary(self) -> bool {
        self == Verb::PutDown
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}

impl Serialize for Verb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.phrase())
    }
}

impl<'de> Deserialize<'de> for Verb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Verb::from_phrase(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown verb `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionParseError {
    #[error("empty action")]
    Empty,
    #[error("expected `verb(target)`, got `{0}`")]
    Malformed(String),
    #[error("unknown verb `{0}`")]
    UnknownVerb(String),
    #[error("`{verb}` takes {expected} argument(s), got {found}")]
    Arity { verb: &'static str, expected: usize, found: usize },
}

/// An action as written by an agent: ids are plain strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub verb: Verb,
    pub target: ObjectId,
    pub secondary: Option<ObjectId>,
}

impl Action {
    pub fn new(verb: Verb, target: impl Into<ObjectId>) -> Self {
        Self { verb, target: target.into(), secondary: None }
    }

    pub fn put_down(obj: impl Into<ObjectId>, recep: impl Into<ObjectId>) -> Self {
        Self { verb: Verb::PutDown, target: obj.into(), secondary: Some(recep.into()) }
    }

    /// Resolves ids (case-insensitively) against a scene.
    pub fn resolve(&self, scene: &Scene) -> Result<Act, WorldError> {
        Ok(Act {
            verb: self.verb,
            target: scene.resolve(self.target.as_str())?,
            secondary: self.secondary.as_ref().map(|s| scene.resolve(s.as_str())).transpose()?,
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.secondary {
            Some(s) => write!(f, "{}({}, {})", self.verb, self.target, s),
            None => write!(f, "{}({})", self.verb, self.target),
        }
    }
}

fn clean_arg(s: &str) -> &str {
    s.trim().trim_matches(|c| c == '"' || c == '\'' || c == '`').trim()
}

impl FromStr for Action {
    type Err = ActionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ActionParseError::Empty);
        }
        let (Some(open), Some(close)) = (s.find('('), s.rfind(')')) else {
            return Err(ActionParseError::Malformed(s.to_string()));
        };
        if close < open || !s[close + 1..].trim().is_empty() {
            return Err(ActionParseError::Malformed(s.to_string()));
        }
        let verb_text = &s[..open];
        let verb = Verb::from_phrase(verb_text)
            .ok_or_else(|| ActionParseError::UnknownVerb(verb_text.trim().to_string()))?;
        let args: Vec<&str> = s[open + 1..close].split(',').map(clean_arg).collect();
        let expected = if verb.takes_secondary() { 2 } else { 1 };
        if args.len() != expected || args.iter().any(|a| a.is_empty()) {
            let found = args.iter().filter(|a| !a.is_empty()).count();
            return Err(ActionParseError::Arity { verb: verb.phrase(), expected, found });
        }
        Ok(Action {
            verb,
            target: args[0].into(),
            secondary: args.get(1).map(|a| (*a).into()),
        })
    }
}

/// An action resolved against a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Act {
    pub verb: Verb,
    pub target: ObjIdx,
    pub secondary: Option<ObjIdx>,
}

impl Act {
    pub fn to_action(&self, scene: &Scene) -> Action {
        Action {
            verb: self.verb,
            target: scene.id(self.target).clone(),
            secondary: self.secondary.map(|s| scene.id(s).clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureCode {
    NotObserved,
    NotAtTarget,
    HandOccupied,
    HandEmpty,
    NotAfforded,
    AlreadyInState,
    TargetBroken,
    ContainerClosed,
    NothingToPour,
    ActionDisabled,
    UnknownObject,
    /// The agent produced no executable action; the step is burned.
    InvalidAction,
}

/// Emitted by every successful action; consumed by the safety monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActionEvent {
    pub step: u32,
    pub verb: Verb,
    pub target: ObjIdx,
    pub secondary: Option<ObjIdx>,
    pub resulting_flags: Flags,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionOutcome {
    pub success: bool,
    pub feedback: String,
    pub failure_code: Option<FailureCode>,
    pub events: Vec<ActionEvent>,
}

impl ActionOutcome {
    fn failed(code: FailureCode, feedback: String) -> Self {
        Self { success: false, feedback, failure_code: Some(code), events: Vec::new() }
    }
}

/// Observation and embodiment settings for one episode.
///
/// Failed actions count against `max_steps` and against step-constraint
/// windows alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub full_observability: bool,
    pub ignore_physical_constraints: bool,
    pub max_steps: u32,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self { full_observability: false, ignore_physical_constraints: false, max_steps: DEFAULT_MAX_STEPS }
    }
}

impl EpisodeConfig {
    pub fn with_max_steps(mut self, n: u32) -> Self {
        self.max_steps = n;
        self
    }

    pub fn fo(mut self) -> Self {
        self.full_observability = true;
        self
    }

    pub fn ipc(mut self) -> Self {
        self.ignore_physical_constraints = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Failure {
    pub code: FailureCode,
    pub subject: ObjIdx,
}

fn fail(code: FailureCode, subject: ObjIdx) -> Result<(), Failure> {
    Err(Failure { code, subject })
}

fn reachable(state: &WorldState, o: ObjIdx) -> Result<(), Failure> {
    match state.containers(o).into_iter().find(|c| state.is_closed_container(*c)) {
        Some(c) => fail(FailureCode::ContainerClosed, c),
        None => Ok(()),
    }
}

/// Precondition check. Pure.
pub(crate) fn check(
    state: &WorldState,
    mem: &ObservationMemory,
    cfg: &EpisodeConfig,
    act: &Act,
) -> Result<(), Failure> {
    use FailureCode::*;
    let scene = state.scene();
    let x = act.target;
    let pc = !cfg.ignore_physical_constraints;
    let holding = state.holding();

    if act.verb == Verb::FindObject && !cfg.full_observability {
        return fail(ActionDisabled, x);
    }
    if !cfg.full_observability {
        if !mem.is_observed(x) {
            return fail(NotObserved, x);
        }
        if let Some(r) = act.secondary {
            if !mem.is_observed(r) {
                return fail(NotObserved, r);
            }
        }
    }
    let afford = |o: ObjIdx, a: Affordances| {
        if scene.affords(o, a) {
            Ok(())
        } else {
            fail(NotAfforded, o)
        }
    };
    let intact = |o: ObjIdx| {
        if state.object(o).is(Flags::BROKEN) {
            fail(TargetBroken, o)
        } else {
            Ok(())
        }
    };
    let already = |cond: bool| if cond { fail(AlreadyInState, x) } else { Ok(()) };
    let hand_free = || match holding {
        Some(h) if pc => fail(HandOccupied, h),
        _ => Ok(()),
    };
    let at = |o: ObjIdx| {
        if state.anchor(o) == state.agent().at {
            Ok(())
        } else {
            fail(NotAtTarget, o)
        }
    };
    let must_hold = |o: ObjIdx| if holding == Some(o) { Ok(()) } else { fail(HandEmpty, o) };

    match act.verb {
        Verb::GoTo | Verb::FindObject => Ok(()),
        Verb::PickUp => {
            afford(x, Affordances::PICKABLE)?;
            intact(x)?;
            already(holding == Some(x))?;
            if let Some(h) = holding {
                return fail(HandOccupied, h);
            }
            at(x)?;
            reachable(state, x)
        }
        Verb::PutDown => {
            let Some(r) = act.secondary else {
                return fail(NotAfforded, x);
            };
            must_hold(x)?;
            afford(r, Affordances::RECEPTACLE)?;
            if r == x || state.is_within(r, x) {
                return fail(NotAfforded, r);
            }
            intact(r)?;
            at(r)?;
            if state.is_closed_container(r) {
                return fail(ContainerClosed, r);
            }
            reachable(state, r)
        }
        Verb::Open | Verb::Close => {
            afford(x, Affordances::OPENABLE)?;
            intact(x)?;
            already(state.object(x).is(Flags::OPEN) == (act.verb == Verb::Open))?;
            hand_free()?;
            at(x)?;
            reachable(state, x)
        }
        Verb::TurnOn | Verb::TurnOff => {
            afford(x, Affordances::TOGGLEABLE)?;
            intact(x)?;
            already(state.object(x).is(Flags::ON) == (act.verb == Verb::TurnOn))?;
            hand_free()?;
            at(x)?;
            reachable(state, x)
        }
        Verb::Slice => {
            afford(x, Affordances::SLICEABLE)?;
            intact(x)?;
            already(state.object(x).is(Flags::SLICED))?;
            if pc {
                match holding {
                    None => return fail(HandEmpty, x),
                    Some(h) if !scene.affords(h, Affordances::SHARP) => return fail(HandOccupied, h),
                    _ => {}
                }
            }
            at(x)?;
            reachable(state, x)
        }
        Verb::Drop | Verb::Throw => must_hold(x),
        Verb::PourInto => {
            afford(x, Affordances::FILLABLE)?;
            intact(x)?;
            let Some(h) = holding else {
                return fail(HandEmpty, x);
            };
            if h == x {
                return fail(NotAfforded, x);
            }
            if !scene.affords(h, Affordances::FILLABLE) || state.object(h).fill.is_none() {
                return fail(NothingToPour, h);
            }
            at(x)?;
            if state.is_closed_container(x) {
                return fail(ContainerClosed, x);
            }
            reachable(state, x)
        }
        Verb::Empty => {
            must_hold(x)?;
            if state.object(x).fill.is_none() {
                return fail(NothingToPour, x);
            }
            Ok(())
        }
        Verb::Break => {
            afford(x, Affordances::BREAKABLE)?;
            intact(x)?;
            if holding == Some(x) {
                return fail(NotAfforded, x);
            }
            hand_free()?;
            at(x)?;
            reachable(state, x)
        }
    }
}

/// `o` or one of its containers is a running heat source.
fn heated(state: &WorldState, o: ObjIdx) -> bool {
    let hot = |c: ObjIdx| state.scene().affords(c, Affordances::HEAT_SOURCE) && state.object(c).is(Flags::ON);
    hot(o) || state.containers(o).into_iter().any(hot)
}

/// Cooks `o` and everything inside it.
fn cook_tree(state: &mut WorldState, o: ObjIdx) {
    let targets: Vec<ObjIdx> = state
        .scene()
        .objects()
        .filter(|&c| c == o || state.is_within(c, o))
        .filter(|&c| state.scene().affords(c, Affordances::COOKABLE))
        .collect();
    for c in targets {
        state.object_mut(c).flags.insert(Flags::COOKED);
    }
}

/// A receptacle with a running water source located directly in it.
fn basin_running(state: &WorldState, basin: ObjIdx) -> bool {
    state.direct_contents(basin).any(|w| {
        state.scene().affords(w, Affordances::WATER_SOURCE) && state.object(w).is(Flags::ON)
    })
}

fn wash(state: &mut WorldState, o: ObjIdx) {
    let aff = state.scene().affordances(o);
    let water = state.scene().liquid(WATER);
    let s = state.object_mut(o);
    if aff.contains(Affordances::FILLABLE) {
        s.fill = water;
    }
    if aff.contains(Affordances::DIRTYABLE) {
        s.flags.insert(Flags::CLEAN);
    }
}

/// Applies effects; the caller has already run [`check`].
pub(crate) fn effect(state: &mut WorldState, mem: &mut ObservationMemory, act: &Act) {
    let x = act.target;
    match act.verb {
        Verb::GoTo => {
            let anchor = state.anchor(x);
            state.agent.at = anchor;
            mem.reveal_at(state, anchor);
        }
        Verb::FindObject => {
            state.agent.at = state.anchor(x);
            mem.note(state, x);
        }
        Verb::PickUp => {
            state.object_mut(x).location = Location::InAgentHand;
            state.agent.holding = Some(x);
            mem.note(state, x);
        }
        Verb::PutDown => {
            let r = act.secondary.expect("checked");
            state.object_mut(x).location = Location::InReceptacle(r);
            state.agent.holding = None;
            mem.note(state, x);
            if heated(state, r) {
                cook_tree(state, x);
            }
            if basin_running(state, r) {
                wash(state, x);
            }
        }
        Verb::Open => {
            state.object_mut(x).flags.insert(Flags::OPEN);
            mem.reveal_contents(state, x);
        }
        Verb::Close => state.object_mut(x).flags.remove(Flags::OPEN),
        Verb::TurnOn => {
            state.object_mut(x).flags.insert(Flags::ON);
            let aff = state.scene().affordances(x);
            if aff.contains(Affordances::HEAT_SOURCE) {
                cook_tree(state, x);
            }
            if aff.contains(Affordances::WATER_SOURCE) {
                if let Location::InReceptacle(basin) = state.object(x).location {
                    let items: Vec<ObjIdx> = state
                        .direct_contents(basin)
                        .filter(|&o| !state.scene().affords(o, Affordances::WATER_SOURCE))
                        .collect();
                    for o in items {
                        wash(state, o);
                    }
                }
            }
        }
        Verb::TurnOff => state.object_mut(x).flags.remove(Flags::ON),
        Verb::Slice => state.object_mut(x).flags.insert(Flags::SLICED),
        Verb::Drop | Verb::Throw => {
            let at = state.agent.at;
            state.object_mut(x).location = Location::OnFloorAt(at);
            state.agent.holding = None;
            if act.verb == Verb::Throw
                && state.scene().affordances(x).intersects(Affordances::FRAGILE | Affordances::BREAKABLE)
            {
                state.object_mut(x).flags.insert(Flags::BROKEN);
            }
            mem.note(state, x);
        }
        Verb::PourInto => {
            let h = state.holding().expect("checked");
            let liquid = state.object_mut(h).fill.take();
            state.object_mut(x).fill = liquid;
        }
        Verb::Empty => state.object_mut(x).fill = None,
        Verb::Break => state.object_mut(x).flags.insert(Flags::BROKEN),
    }
}

/// Check, then on success advance the step counter and apply effects.
/// Failures leave `state` untouched (the caller charges the step).
pub(crate) fn try_apply(
    state: &mut WorldState,
    mem: &mut ObservationMemory,
    cfg: &EpisodeConfig,
    act: &Act,
) -> Result<ActionEvent, Failure> {
    check(state, mem, cfg, act)?;
    state.agent.step_count += 1;
    effect(state, mem, act);
    Ok(ActionEvent {
        step: state.agent.step_count,
        verb: act.verb,
        target: act.target,
        secondary: act.secondary,
        resulting_flags: state.object(act.target).flags,
    })
}

fn success_feedback(state: &WorldState, act: &Act) -> String {
    let s = state.scene();
    let x = s.id(act.target);
    match act.verb {
        Verb::GoTo => format!("You go to {}.", s.id(state.agent().at)),
        Verb::FindObject => format!("You find {x} at {}.", s.id(state.agent().at)),
        Verb::PickUp => format!("You pick up {x}."),
        Verb::PutDown => format!("You put {x} in {}.", s.id(act.secondary.expect("checked"))),
        Verb::Open => format!("You open {x}."),
        Verb::Close => format!("You close {x}."),
        Verb::TurnOn => format!("You turn on {x}."),
        Verb::TurnOff => format!("You turn off {x}."),
        Verb::Slice => format!("You slice {x}."),
        Verb::Drop => format!("You drop {x} on the floor."),
        Verb::Throw if state.object(act.target).is(Flags::BROKEN) => format!("You throw {x}. It breaks."),
        Verb::Throw => format!("You throw {x}."),
        Verb::PourInto => format!("You pour into {x}."),
        Verb::Empty => format!("You empty {x}."),
        Verb::Break => format!("You break {x}."),
    }
}

fn failure_feedback(state: &WorldState, act: &Act, f: Failure) -> String {
    use FailureCode::*;
    let s = state.scene();
    let what = match act.secondary {
        Some(r) => format!("{} {} into {}", act.verb, s.id(act.target), s.id(r)),
        None => format!("{} {}", act.verb, s.id(act.target)),
    };
    let subj = s.id(f.subject);
    let reason = match (f.code, act.verb) {
        (NotObserved, _) => format!("you have not observed {subj} yet"),
        (NotAtTarget, _) => format!("you must first go to where {subj} is"),
        (HandOccupied, Verb::Slice) => format!("you are holding {subj}, which is not a sharp tool"),
        (HandOccupied, _) => format!("your hand is occupied by {subj}; put it down first"),
        (HandEmpty, Verb::Slice) => "you must hold a sharp tool to slice".to_string(),
        (HandEmpty, Verb::PourInto) => "you must first hold a liquid source".to_string(),
        (HandEmpty, _) => format!("you are not holding {subj}"),
        (NotAfforded, _) => format!("{subj} does not support this action"),
        (AlreadyInState, Verb::PickUp) => format!("you are already holding {subj}"),
        (AlreadyInState, Verb::Open) => format!("{subj} is already open"),
        (AlreadyInState, Verb::Close) => format!("{subj} is already closed"),
        (AlreadyInState, Verb::TurnOn) => format!("{subj} is already on"),
        (AlreadyInState, Verb::TurnOff) => format!("{subj} is already off"),
        (AlreadyInState, _) => format!("{subj} is already sliced"),
        (TargetBroken, _) => format!("{subj} is broken"),
        (ContainerClosed, _) => format!("{subj} is closed"),
        (NothingToPour, _) => format!("{subj} has no liquid in it"),
        (ActionDisabled, _) => "find object is only available with full observability".to_string(),
        (UnknownObject, _) | (InvalidAction, _) => unreachable!("not produced by check"),
    };
    format!("Cannot {what}: {reason}.")
}

/// Executes a resolved action. Always consumes one step unless the budget is spent.
pub fn apply_act(
    state: &mut WorldState,
    mem: &mut ObservationMemory,
    cfg: &EpisodeConfig,
    act: &Act,
) -> ActionOutcome {
    if state.step_count() >= cfg.max_steps {
        return ActionOutcome::failed(FailureCode::ActionDisabled, "The step budget is exhausted.".into());
    }
    match try_apply(state, mem, cfg, act) {
        Ok(ev) => ActionOutcome {
            success: true,
            feedback: success_feedback(state, act),
            failure_code: None,
            events: vec![ev],
        },
        Err(f) => {
            state.agent.step_count += 1;
            ActionOutcome::failed(f.code, failure_feedback(state, act, f))
        }
    }
}

/// Executes an agent-level action, resolving its ids first.
pub fn apply_action(
    state: &mut WorldState,
    mem: &mut ObservationMemory,
    cfg: &EpisodeConfig,
    action: &Action,
) -> ActionOutcome {
    match action.resolve(state.scene()) {
        Ok(act) => apply_act(state, mem, cfg, &act),
        Err(e) => burn_step(state, cfg, FailureCode::UnknownObject, format!("Cannot {}: there is no {}.", action, unknown_name(&e))),
    }
}

fn unknown_name(e: &WorldError) -> String {
    match e {
        WorldError::UnknownObject(n) => format!("object called {n}"),
        other => other.to_string(),
    }
}

/// Charges a step for a non-executable decision.
pub fn burn_step(state: &mut WorldState, cfg: &EpisodeConfig, code: FailureCode, feedback: String) -> ActionOutcome {
    if state.step_count() < cfg.max_steps {
        state.agent.step_count += 1;
    }
    ActionOutcome::failed(code, feedback)
}

/// Resolved actions that would currently succeed, in canonical order:
/// verb order, then target id, then destination id.
pub fn legal_acts(state: &WorldState, mem: &ObservationMemory, cfg: &EpisodeConfig) -> Vec<Act> {
    let scene = state.scene();
    let mut out = Vec::new();
    for verb in Verb::ALL {
        if verb == Verb::FindObject && !cfg.full_observability {
            continue;
        }
        match verb {
            Verb::PutDown => {
                if let Some(h) = state.holding() {
                    for &r in scene.sorted() {
                        let act = Act { verb, target: h, secondary: Some(r) };
                        if check(state, mem, cfg, &act).is_ok() {
                            out.push(act);
                        }
                    }
                }
            }
            Verb::Drop | Verb::Throw | Verb::Empty => {
                if let Some(h) = state.holding() {
                    let act = Act { verb, target: h, secondary: None };
                    if check(state, mem, cfg, &act).is_ok() {
                        out.push(act);
                    }
                }
            }
            _ => {
                for &x in scene.sorted() {
                    let act = Act { verb, target: x, secondary: None };
                    if check(state, mem, cfg, &act).is_ok() {
                        out.push(act);
                    }
                }
            }
        }
    }
    out
}

/// [`legal_acts`] with string ids.
pub fn legal_actions(state: &WorldState, mem: &ObservationMemory, cfg: &EpisodeConfig) -> Vec<Action> {
    legal_acts(state, mem, cfg)
        .into_iter()
        .map(|a| a.to_action(state.scene()))
        .collect()
}
