//! Ground-truth symbolic world model.
//!
//! A scene is split in two: an immutable [`Scene`] catalog (ids, kinds,
//! affordances, the fixture list) shared behind an `Arc`, and a small mutable
//! [`WorldState`] holding per-object state and the agent. Objects are
//! addressed internally by [`ObjIdx`]; string ids are only resolved at the
//! edges (scenario files, the action grammar, predicates).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use bitflags::bitflags;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Upper bound on objects per scene (memory uses a 128-bit set).
pub const MAX_OBJECTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("object `{object}` references unknown object `{reference}`")]
    DanglingReference { object: String, reference: String },
    #[error("object `{object}` sets `{flag}` but its kind does not afford it")]
    AffordanceMismatch { object: String, flag: String },
    #[error("object `{object}` has unknown kind `{kind}`")]
    UnknownKind { object: String, kind: String },
    #[error("duplicate object id `{0}`")]
    DuplicateObject(String),
    #[error("kind `{kind}` has inconsistent affordances: {reason}")]
    InvalidKind { kind: String, reason: String },
    #[error("object `{0}` must declare exactly one location (fixture, in, on_floor_at or held)")]
    BadLocation(String),
    #[error("containment cycle through `{0}`")]
    ContainmentCycle(String),
    #[error("`{0}` is not a fixture")]
    NotAFixture(String),
    #[error("scene has {0} objects, more than the supported {MAX_OBJECTS}")]
    TooManyObjects(usize),
    #[error("more than one object is held")]
    MultipleHeld,
}

/// Opaque index of an object inside its scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjIdx(pub(crate) u16);

impl ObjIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned liquid name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiquidId(pub(crate) u8);

pub const WATER: &str = "water";

/// String identifier of an object as written in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

impl From<String> for ObjectId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

bitflags! {
    /// What an object kind can do or have done to it.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct Affordances: u16 {
        const OPENABLE = 1 << 0;
        const TOGGLEABLE = 1 << 1;
        const PICKABLE = 1 << 2;
        const SLICEABLE = 1 << 3;
        const BREAKABLE = 1 << 4;
        const FILLABLE = 1 << 5;
        const COOKABLE = 1 << 6;
        const RECEPTACLE = 1 << 7;
        const HEAT_SOURCE = 1 << 8;
        const WATER_SOURCE = 1 << 9;
        const SHARP = 1 << 10;
        const FRAGILE = 1 << 11;
        const DIRTYABLE = 1 << 12;
    }
}

const AFFORDANCE_NAMES: [(&str, Affordances); 13] = [
    ("openable", Affordances::OPENABLE),
    ("toggleable", Affordances::TOGGLEABLE),
    ("pickable", Affordances::PICKABLE),
    ("sliceable", Affordances::SLICEABLE),
    ("breakable", Affordances::BREAKABLE),
    ("fillable", Affordances::FILLABLE),
    ("cookable", Affordances::COOKABLE),
    ("receptacle", Affordances::RECEPTACLE),
    ("heat_source", Affordances::HEAT_SOURCE),
    ("water_source", Affordances::WATER_SOURCE),
    ("sharp", Affordances::SHARP),
    ("fragile", Affordances::FRAGILE),
    ("dirtyable", Affordances::DIRTYABLE),
];

impl Affordances {
    pub fn names(self) -> Vec<&'static str> {
        AFFORDANCE_NAMES
            .iter()
            .filter(|(_, a)| self.contains(*a))
            .map(|(n, _)| *n)
            .collect()
    }

    pub fn from_label(name: &str) -> Option<Self> {
        AFFORDANCE_NAMES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, a)| *a)
    }

    /// Checks the cross-affordance invariants.
    pub fn check(self) -> Result<(), String> {
        if self.contains(Self::WATER_SOURCE) && !self.contains(Self::TOGGLEABLE) {
            return Err("water_source requires toggleable".into());
        }
        if self.contains(Self::HEAT_SOURCE) && !self.contains(Self::TOGGLEABLE) {
            return Err("heat_source requires toggleable".into());
        }
        if self.contains(Self::WATER_SOURCE) && self.contains(Self::PICKABLE) {
            return Err("water_source cannot be pickable".into());
        }
        Ok(())
    }
}

impl Serialize for Affordances {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Affordances {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        let mut out = Affordances::empty();
        for n in names {
            out |= Affordances::from_label(&n)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown affordance `{n}`")))?;
        }
        Ok(out)
    }
}

bitflags! {
    /// Mutable boolean state of an object.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
    pub struct Flags: u8 {
        const OPEN = 1 << 0;
        const ON = 1 << 1;
        const CLEAN = 1 << 2;
        const SLICED = 1 << 3;
        const BROKEN = 1 << 4;
        const COOKED = 1 << 5;
    }
}

impl Flags {
    /// The affordance that makes each flag meaningful.
    pub(crate) fn required_affordance(self) -> Affordances {
        let mut a = Affordances::empty();
        if self.contains(Flags::OPEN) {
            a |= Affordances::OPENABLE;
        }
        if self.contains(Flags::ON) {
            a |= Affordances::TOGGLEABLE;
        }
        if self.contains(Flags::CLEAN) {
            a |= Affordances::DIRTYABLE;
        }
        if self.contains(Flags::SLICED) {
            a |= Affordances::SLICEABLE;
        }
        if self.contains(Flags::BROKEN) {
            a |= Affordances::BREAKABLE | Affordances::FRAGILE;
        }
        if self.contains(Flags::COOKED) {
            a |= Affordances::COOKABLE;
        }
        a
    }

    fn names(self) -> Vec<&'static str> {
        [
            (Flags::OPEN, "open"),
            (Flags::ON, "on"),
            (Flags::CLEAN, "clean"),
            (Flags::SLICED, "sliced"),
            (Flags::BROKEN, "broken"),
            (Flags::COOKED, "cooked"),
        ]
        .into_iter()
        .filter(|(f, _)| self.contains(*f))
        .map(|(_, n)| n)
        .collect()
    }
}

impl Serialize for Flags {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectKind {
    pub kind_name: String,
    pub affordances: Affordances,
}

/// Where an object is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    /// The object is itself a navigation anchor.
    Fixture,
    InReceptacle(ObjIdx),
    OnFloorAt(ObjIdx),
    InAgentHand,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectState {
    pub flags: Flags,
    pub fill: Option<LiquidId>,
    pub location: Location,
}

impl ObjectState {
    pub fn is(&self, f: Flags) -> bool {
        self.flags.contains(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgentState {
    /// Fixture the agent stands at.
    pub at: ObjIdx,
    pub holding: Option<ObjIdx>,
    pub step_count: u32,
}

/// Immutable per-scene catalog.
#[derive(Debug)]
pub struct Scene {
    ids: Vec<ObjectId>,
    kinds: Vec<ObjectKind>,
    kind_of: Vec<usize>,
    index: HashMap<String, ObjIdx>,
    folded: HashMap<String, ObjIdx>,
    fixtures: Vec<ObjIdx>,
    by_name: Vec<ObjIdx>,
    liquids: Vec<String>,
    start: ObjIdx,
}

impl Scene {
    /// All objects ordered by id.
    pub fn sorted(&self) -> &[ObjIdx] {
        &self.by_name
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ObjectId] {
        &self.ids
    }

    pub fn id(&self, o: ObjIdx) -> &ObjectId {
        &self.ids[o.index()]
    }

    pub fn kind(&self, o: ObjIdx) -> &ObjectKind {
        &self.kinds[self.kind_of[o.index()]]
    }

    pub fn affordances(&self, o: ObjIdx) -> Affordances {
        self.kind(o).affordances
    }

    pub fn affords(&self, o: ObjIdx, a: Affordances) -> bool {
        self.affordances(o).contains(a)
    }

    pub fn fixtures(&self) -> &[ObjIdx] {
        &self.fixtures
    }

    pub fn is_fixture(&self, o: ObjIdx) -> bool {
        self.fixtures.contains(&o)
    }

    pub fn start_fixture(&self) -> ObjIdx {
        self.start
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjIdx> + '_ {
        (0..self.ids.len()).map(|i| ObjIdx(i as u16))
    }

    /// Exact id lookup.
    pub fn lookup(&self, id: &str) -> Option<ObjIdx> {
        self.index.get(id).copied()
    }

    /// Exact lookup, falling back to a case-insensitive match.
    pub fn resolve(&self, id: &str) -> Result<ObjIdx, WorldError> {
        let id = id.trim();
        self.lookup(id)
            .or_else(|| self.folded.get(&id.to_lowercase()).copied())
            .ok_or_else(|| WorldError::UnknownObject(id.to_string()))
    }

    pub fn has_kind(&self, kind: &str) -> bool {
        self.kinds.iter().any(|k| k.kind_name == kind)
    }

    pub fn liquid(&self, name: &str) -> Option<LiquidId> {
        self.liquids
            .iter()
            .position(|l| l == name)
            .map(|i| LiquidId(i as u8))
    }

    pub fn liquid_name(&self, l: LiquidId) -> &str {
        &self.liquids[l.0 as usize]
    }
}

/// Full ground-truth state for one episode.
#[derive(Debug, Clone)]
pub struct WorldState {
    scene: Arc<Scene>,
    pub(crate) objects: Vec<ObjectState>,
    pub(crate) agent: AgentState,
}

impl PartialEq for WorldState {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.scene, &other.scene)
            && self.objects == other.objects
            && self.agent == other.agent
    }
}

impl Eq for WorldState {}

impl Hash for WorldState {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.objects.hash(h);
        self.agent.hash(h);
    }
}

impl WorldState {
    pub fn scene(&self) -> &Arc<Scene> {
        &self.scene
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn step_count(&self) -> u32 {
        self.agent.step_count
    }

    pub fn object(&self, o: ObjIdx) -> &ObjectState {
        &self.objects[o.index()]
    }

    pub fn objects(&self) -> &[ObjectState] {
        &self.objects
    }

    pub fn holding(&self) -> Option<ObjIdx> {
        self.agent.holding
    }

    /// Deterministic fingerprint of objects and agent (step counter included).
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    /// The fixture an agent must stand at to interact with `o`.
    pub fn anchor(&self, mut o: ObjIdx) -> ObjIdx {
        // Bounded by object count: containment is acyclic.
        for _ in 0..=self.objects.len() {
            match self.objects[o.index()].location {
                Location::Fixture => return o,
                Location::InReceptacle(r) => o = r,
                Location::OnFloorAt(f) => return f,
                Location::InAgentHand => return self.agent.at,
            }
        }
        unreachable!("containment cycle")
    }

    /// Strict containment ancestors of `o`, innermost first (floor and hand end the chain).
    pub fn containers(&self, o: ObjIdx) -> Vec<ObjIdx> {
        let mut out = Vec::new();
        let mut cur = o;
        while let Location::InReceptacle(r) = self.objects[cur.index()].location {
            out.push(r);
            cur = r;
        }
        out
    }

    /// Whether `inner` lies (transitively) inside `outer`.
    pub fn is_within(&self, inner: ObjIdx, outer: ObjIdx) -> bool {
        self.containers(inner).contains(&outer)
    }

    /// Objects whose location is directly `InReceptacle(r)`.
    pub fn direct_contents(&self, r: ObjIdx) -> impl Iterator<Item = ObjIdx> + '_ {
        self.scene
            .objects()
            .filter(move |&o| self.objects[o.index()].location == Location::InReceptacle(r))
    }

    /// True if `o` is closed and openable.
    pub fn is_closed_container(&self, o: ObjIdx) -> bool {
        self.scene.affords(o, Affordances::OPENABLE) && !self.object(o).is(Flags::OPEN)
    }

    /// Number of objects located in the agent's hand.
    pub fn held_count(&self) -> usize {
        self.objects
            .iter()
            .filter(|s| s.location == Location::InAgentHand)
            .count()
    }

    /// Whether containment is acyclic.
    pub fn containment_is_acyclic(&self) -> bool {
        self.scene.objects().all(|o| {
            let mut cur = o;
            for _ in 0..=self.objects.len() {
                match self.objects[cur.index()].location {
                    Location::InReceptacle(r) => {
                        if r == o {
                            return false;
                        }
                        cur = r;
                    }
                    _ => return true,
                }
            }
            false
        })
    }

    /// An id-level view of one object, for serialization and debugging.
    pub fn instance(&self, o: ObjIdx) -> ObjectInstance {
        let s = self.object(o);
        let loc = |l: Location| match l {
            Location::Fixture => LocationView::Fixture,
            Location::InReceptacle(r) => LocationView::InReceptacle(self.scene.id(r).clone()),
            Location::OnFloorAt(f) => LocationView::OnFloorAt(self.scene.id(f).clone()),
            Location::InAgentHand => LocationView::InAgentHand,
        };
        ObjectInstance {
            id: self.scene.id(o).clone(),
            kind: self.scene.kind(o).kind_name.clone(),
            is_open: s.is(Flags::OPEN),
            is_on: s.is(Flags::ON),
            is_clean: s.is(Flags::CLEAN),
            is_sliced: s.is(Flags::SLICED),
            is_broken: s.is(Flags::BROKEN),
            is_cooked: s.is(Flags::COOKED),
            fill: s.fill.map(|l| self.scene.liquid_name(l).to_string()),
            location: loc(s.location),
        }
    }

    pub(crate) fn object_mut(&mut self, o: ObjIdx) -> &mut ObjectState {
        &mut self.objects[o.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LocationView {
    Fixture,
    InReceptacle(ObjectId),
    OnFloorAt(ObjectId),
    InAgentHand,
}

/// Owned, id-based snapshot of one object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub kind: String,
    pub is_open: bool,
    pub is_on: bool,
    pub is_clean: bool,
    pub is_sliced: bool,
    pub is_broken: bool,
    pub is_cooked: bool,
    pub fill: Option<String>,
    pub location: LocationView,
}

/// Declared initial flags of an object in a scene file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    #[serde(skip_serializing_if = "is_false")]
    pub open: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub on: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub clean: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub sliced: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub broken: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub cooked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fill: Option<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl InitialState {
    fn flags(&self) -> Flags {
        let mut f = Flags::empty();
        f.set(Flags::OPEN, self.open);
        f.set(Flags::ON, self.on);
        f.set(Flags::CLEAN, self.clean);
        f.set(Flags::SLICED, self.sliced);
        f.set(Flags::BROKEN, self.broken);
        f.set(Flags::COOKED, self.cooked);
        f
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: ObjectId,
    pub kind: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub fixture: bool,
    #[serde(default, rename = "in", skip_serializing_if = "Option::is_none")]
    pub inside: Option<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_floor_at: Option<ObjectId>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub held: bool,
    #[serde(default, skip_serializing_if = "is_default_state")]
    pub state: InitialState,
}

fn is_default_state(s: &InitialState) -> bool {
    *s == InitialState::default()
}

/// Declarative scene: kind catalog, objects with initial state, agent start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub start: ObjectId,
    pub kinds: BTreeMap<String, Affordances>,
    pub objects: Vec<ObjectSpec>,
}

impl SceneSpec {
    /// All structural problems with this scene (empty when it builds).
    pub fn problems(&self) -> Vec<WorldError> {
        let mut errs = Vec::new();
        if self.objects.len() > MAX_OBJECTS {
            errs.push(WorldError::TooManyObjects(self.objects.len()));
            return errs;
        }
        for (name, aff) in &self.kinds {
            if let Err(reason) = aff.check() {
                errs.push(WorldError::InvalidKind { kind: name.clone(), reason });
            }
        }
        let mut seen: HashMap<&str, &ObjectSpec> = HashMap::new();
        for o in &self.objects {
            if seen.insert(o.id.as_str(), o).is_some() {
                errs.push(WorldError::DuplicateObject(o.id.to_string()));
            }
        }
        let mut held = 0;
        for o in &self.objects {
            let oid = o.id.to_string();
            let Some(aff) = self.kinds.get(&o.kind).copied() else {
                errs.push(WorldError::UnknownKind { object: oid, kind: o.kind.clone() });
                continue;
            };
            let declared = [o.fixture, o.inside.is_some(), o.on_floor_at.is_some(), o.held]
                .iter()
                .filter(|b| **b)
                .count();
            if declared != 1 {
                errs.push(WorldError::BadLocation(oid.clone()));
            }
            if o.fixture && aff.contains(Affordances::PICKABLE) {
                errs.push(WorldError::AffordanceMismatch { object: oid.clone(), flag: "fixture".into() });
            }
            if o.held {
                held += 1;
                if !aff.contains(Affordances::PICKABLE) {
                    errs.push(WorldError::AffordanceMismatch { object: oid.clone(), flag: "held".into() });
                }
            }
            if let Some(r) = &o.inside {
                match seen.get(r.as_str()) {
                    None => errs.push(WorldError::DanglingReference { object: oid.clone(), reference: r.to_string() }),
                    Some(rs) => {
                        let raff = self.kinds.get(&rs.kind).copied().unwrap_or_default();
                        if !raff.contains(Affordances::RECEPTACLE) {
                            errs.push(WorldError::AffordanceMismatch { object: r.to_string(), flag: "receptacle".into() });
                        }
                    }
                }
            }
            if let Some(f) = &o.on_floor_at {
                match seen.get(f.as_str()) {
                    None => errs.push(WorldError::DanglingReference { object: oid.clone(), reference: f.to_string() }),
                    Some(fs) if !fs.fixture => errs.push(WorldError::NotAFixture(f.to_string())),
                    _ => {}
                }
            }
            let flags = o.state.flags();
            for flag in flags.iter() {
                if !aff.intersects(flag.required_affordance()) {
                    errs.push(WorldError::AffordanceMismatch {
                        object: oid.clone(),
                        flag: flag.names()[0].to_string(),
                    });
                }
            }
            if o.state.fill.is_some() && !aff.contains(Affordances::FILLABLE) {
                errs.push(WorldError::AffordanceMismatch { object: oid.clone(), flag: "fill".into() });
            }
        }
        if held > 1 {
            errs.push(WorldError::MultipleHeld);
        }
        match seen.get(self.start.as_str()) {
            None => errs.push(WorldError::DanglingReference { object: "<start>".into(), reference: self.start.to_string() }),
            Some(s) if !s.fixture => errs.push(WorldError::NotAFixture(self.start.to_string())),
            _ => {}
        }
        // Cycle check over `in` edges.
        for o in &self.objects {
            let mut cur = o;
            for _ in 0..=self.objects.len() {
                match cur.inside.as_ref().and_then(|r| seen.get(r.as_str())) {
                    Some(next) if next.id == o.id => {
                        errs.push(WorldError::ContainmentCycle(o.id.to_string()));
                        break;
                    }
                    Some(next) => cur = next,
                    None => break,
                }
            }
        }
        errs
    }
}

/// Instantiates a scene with its declared initial states.
pub fn build_world(spec: &SceneSpec) -> Result<WorldState, WorldError> {
    if let Some(e) = spec.problems().into_iter().next() {
        return Err(e);
    }
    let kinds: Vec<ObjectKind> = spec
        .kinds
        .iter()
        .map(|(n, a)| ObjectKind { kind_name: n.clone(), affordances: *a })
        .collect();
    let kind_pos: HashMap<&str, usize> = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| (k.kind_name.as_str(), i))
        .collect();
    let ids: Vec<ObjectId> = spec.objects.iter().map(|o| o.id.clone()).collect();
    let index: HashMap<String, ObjIdx> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.to_string(), ObjIdx(i as u16)))
        .collect();
    let mut folded = HashMap::new();
    for (i, id) in ids.iter().enumerate() {
        folded.entry(id.as_str().to_lowercase()).or_insert(ObjIdx(i as u16));
    }
    let mut liquids = vec![WATER.to_string()];
    for o in &spec.objects {
        if let Some(l) = &o.state.fill {
            if !liquids.contains(l) {
                liquids.push(l.clone());
            }
        }
    }
    let fixtures: Vec<ObjIdx> = spec
        .objects
        .iter()
        .enumerate()
        .filter(|(_, o)| o.fixture)
        .map(|(i, _)| ObjIdx(i as u16))
        .collect();
    let start = index[spec.start.as_str()];
    let mut holding = None;
    let objects = spec
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let location = if o.fixture {
                Location::Fixture
            } else if let Some(r) = &o.inside {
                Location::InReceptacle(index[r.as_str()])
            } else if let Some(f) = &o.on_floor_at {
                Location::OnFloorAt(index[f.as_str()])
            } else {
                holding = Some(ObjIdx(i as u16));
                Location::InAgentHand
            };
            ObjectState {
                flags: o.state.flags(),
                fill: o
                    .state
                    .fill
                    .as_ref()
                    .map(|l| LiquidId(liquids.iter().position(|x| x == l).unwrap() as u8)),
                location,
            }
        })
        .collect();
    let mut by_name: Vec<ObjIdx> = (0..ids.len()).map(|i| ObjIdx(i as u16)).collect();
    by_name.sort_by(|a, b| ids[a.index()].cmp(&ids[b.index()]));
    let scene = Scene {
        by_name,
        kind_of: spec.objects.iter().map(|o| kind_pos[o.kind.as_str()]).collect(),
        ids,
        kinds,
        index,
        folded,
        fixtures,
        liquids,
        start,
    };
    Ok(WorldState {
        scene: Arc::new(scene),
        objects,
        agent: AgentState { at: start, holding, step_count: 0 },
    })
}
