//! Partial observability: what the agent has seen and the text it is shown.

use std::fmt::Write as _;

use crate::actions::ActionOutcome;
use crate::world::{Affordances, Flags, Location, ObjIdx, WorldState};

/// What the agent has observed so far in an episode.
///
/// `observed` only grows. `last_known` holds the location at which each
/// observed object was last seen (objects only move through the agent, so
/// it never goes stale in a single-agent world).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservationMemory {
    observed: u128,
    initially_visible: u128,
    last_known: Vec<Option<Location>>,
}

fn bit(o: ObjIdx) -> u128 {
    1u128 << o.index()
}

impl ObservationMemory {
    pub fn empty(n_objects: usize) -> Self {
        Self { observed: 0, initially_visible: 0, last_known: vec![None; n_objects] }
    }

    pub fn is_observed(&self, o: ObjIdx) -> bool {
        self.observed & bit(o) != 0
    }

    pub fn observed(&self) -> impl Iterator<Item = ObjIdx> + '_ {
        (0..self.last_known.len())
            .map(|i| ObjIdx(i as u16))
            .filter(|o| self.is_observed(*o))
    }

    pub(crate) fn bits(&self) -> u128 {
        self.observed
    }

    pub fn len(&self) -> usize {
        self.observed.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.observed == 0
    }

    /// Fixtures known from the start of the episode.
    pub fn initially_visible(&self) -> impl Iterator<Item = ObjIdx> + '_ {
        (0..self.last_known.len())
            .map(|i| ObjIdx(i as u16))
            .filter(|o| self.initially_visible & bit(*o) != 0)
    }

    pub fn last_known_location(&self, o: ObjIdx) -> Option<Location> {
        self.last_known[o.index()]
    }

    /// Whether every object in `other` is also in `self`.
    pub fn is_superset_of(&self, other: &Self) -> bool {
        other.observed & !self.observed == 0
    }

    /// Marks `o` as seen at its current location.
    pub fn note(&mut self, state: &WorldState, o: ObjIdx) {
        self.observed |= bit(o);
        self.last_known[o.index()] = Some(state.object(o).location);
    }

    /// Reveals everything at `fixture` not hidden behind a closed openable.
    pub fn reveal_at(&mut self, state: &WorldState, fixture: ObjIdx) {
        for o in state.scene().objects() {
            if state.object(o).location == Location::InAgentHand {
                continue;
            }
            if state.anchor(o) == fixture && unobstructed(state, o, None) {
                self.note(state, o);
            }
        }
    }

    /// Reveals the contents of an (open) container, stopping at nested closed ones.
    pub fn reveal_contents(&mut self, state: &WorldState, container: ObjIdx) {
        for o in state.scene().objects() {
            if state.is_within(o, container) && unobstructed(state, o, Some(container)) {
                self.note(state, o);
            }
        }
    }
}

/// No closed openable lies between `o` and `stop` (or the top of its chain).
fn unobstructed(state: &WorldState, o: ObjIdx, stop: Option<ObjIdx>) -> bool {
    for c in state.containers(o) {
        if Some(c) == stop {
            return true;
        }
        if state.is_closed_container(c) {
            return false;
        }
    }
    true
}

/// Fixtures plus pickable objects resting openly on the start fixture.
pub fn initial_memory(state: &WorldState) -> ObservationMemory {
    let scene = state.scene();
    let mut mem = ObservationMemory::empty(scene.len());
    for &f in scene.fixtures() {
        mem.note(state, f);
        mem.initially_visible |= bit(f);
    }
    let start = state.agent().at;
    let start_open = !state.is_closed_container(start);
    for o in scene.objects() {
        let loc = state.object(o).location;
        let resting = match loc {
            Location::InReceptacle(r) => r == start && start_open,
            Location::OnFloorAt(f) => f == start,
            Location::InAgentHand => true,
            Location::Fixture => false,
        };
        if resting && scene.affords(o, Affordances::PICKABLE) {
            mem.note(state, o);
        }
    }
    mem
}

/// Whether `o` can currently be seen from where the agent stands.
pub fn visible_here(state: &WorldState, mem: &ObservationMemory, o: ObjIdx) -> bool {
    mem.is_observed(o)
        && state.object(o).location != Location::InAgentHand
        && state.anchor(o) == state.agent().at
        && unobstructed(state, o, None)
}

fn describe_flags(state: &WorldState, o: ObjIdx) -> Vec<String> {
    let aff = state.scene().affordances(o);
    let s = state.object(o);
    let mut out = Vec::new();
    if aff.contains(Affordances::OPENABLE) {
        out.push(if s.is(Flags::OPEN) { "open" } else { "closed" }.to_string());
    }
    if aff.contains(Affordances::TOGGLEABLE) {
        out.push(if s.is(Flags::ON) { "on" } else { "off" }.to_string());
    }
    if aff.contains(Affordances::DIRTYABLE) {
        out.push(if s.is(Flags::CLEAN) { "clean" } else { "dirty" }.to_string());
    }
    if s.is(Flags::SLICED) {
        out.push("sliced".into());
    }
    if s.is(Flags::COOKED) {
        out.push("cooked".into());
    }
    if s.is(Flags::BROKEN) {
        out.push("broken".into());
    }
    if aff.contains(Affordances::FILLABLE) {
        out.push(match s.fill {
            Some(l) => format!("filled with {}", state.scene().liquid_name(l)),
            None => "empty".into(),
        });
    }
    out
}

fn describe_location(
    state: &WorldState,
    mem: &ObservationMemory,
    loc: Location,
    anchor: ObjIdx,
) -> String {
    let scene = state.scene();
    match loc {
        Location::Fixture => "fixture".into(),
        Location::InAgentHand => "in your hand".into(),
        Location::OnFloorAt(f) => format!("on the floor at {}", scene.id(f)),
        Location::InReceptacle(r) if r == anchor || !mem.is_observed(r) => {
            format!("at {}", scene.id(anchor))
        }
        Location::InReceptacle(r) => format!("at {} (in {})", scene.id(anchor), scene.id(r)),
    }
}

/// Agent-facing observation text. Deterministic; objects listed by id.
pub fn render_observation(
    state: &WorldState,
    mem: &ObservationMemory,
    last_outcome: Option<&ActionOutcome>,
) -> String {
    let scene = state.scene();
    let at = state.agent().at;
    let mut ids: Vec<ObjIdx> = mem.observed().collect();
    ids.sort_by(|a, b| scene.id(*a).cmp(scene.id(*b)));

    let mut out = String::new();
    let _ = writeln!(out, "Location: {}", scene.id(at));
    match state.holding() {
        Some(h) => {
            let flags = describe_flags(state, h);
            if flags.is_empty() {
                let _ = writeln!(out, "Holding: {}", scene.id(h));
            } else {
                let _ = writeln!(out, "Holding: {} ({})", scene.id(h), flags.join(", "));
            }
        }
        None => out.push_str("Holding: nothing\n"),
    }
    out.push_str("Visible here:\n");
    for &o in ids.iter().filter(|o| visible_here(state, mem, **o)) {
        let loc = describe_location(state, mem, state.object(o).location, at);
        let flags = describe_flags(state, o);
        if flags.is_empty() {
            let _ = writeln!(out, "- {}: {}", scene.id(o), loc);
        } else {
            let _ = writeln!(out, "- {}: {}; {}", scene.id(o), loc, flags.join(", "));
        }
    }
    out.push_str("Previously seen:\n");
    for &o in &ids {
        if visible_here(state, mem, o) || state.holding() == Some(o) {
            continue;
        }
        let loc = mem.last_known_location(o).unwrap_or(Location::Fixture);
        let anchor = match loc {
            Location::Fixture => o,
            _ => state.anchor(o),
        };
        let _ = writeln!(out, "- {}: {}", scene.id(o), describe_location(state, mem, loc, anchor));
    }
    if let Some(outcome) = last_outcome {
        let _ = writeln!(out, "Feedback: {}", outcome.feedback);
    }
    out
}
