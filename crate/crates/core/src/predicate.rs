//! Boolean conditions over a [`WorldState`].
//!
//! [`Predicate`] is the id-based, serializable form used in scenario files.
//! [`Condition`] is the same tree resolved against a scene so it can be
//! evaluated repeatedly without string lookups.

use serde::{Deserialize, Serialize};

use crate::world::{Flags, LiquidId, Location, ObjIdx, ObjectId, Scene, WorldError, WorldState};

/// Either `"Mug"` (any liquid) or `["Mug", "water"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FillTest {
    Any(ObjectId),
    Liquid(ObjectId, String),
}

/// Goal and constraint predicate AST.
///
/// `is_closed`, `is_off` and `is_dirty` are plain negations of their
/// positive counterparts. `contains(r, o)` is transitive: `o` anywhere
/// inside `r`. `at_fixture(o, f)` compares `o`'s navigation anchor with `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    IsOpen(ObjectId),
    IsClosed(ObjectId),
    IsOn(ObjectId),
    IsOff(ObjectId),
    IsClean(ObjectId),
    IsDirty(ObjectId),
    IsSliced(ObjectId),
    IsBroken(ObjectId),
    IsCooked(ObjectId),
    IsFilled(FillTest),
    Contains(ObjectId, ObjectId),
    Holds(ObjectId),
    AtFixture(ObjectId, ObjectId),
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
    Not(Box<Predicate>),
}

impl Predicate {
    /// Every object id mentioned in the tree, in traversal order.
    pub fn object_refs(&self) -> Vec<&ObjectId> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a ObjectId>) {
        use Predicate::*;
        match self {
            IsOpen(o) | IsClosed(o) | IsOn(o) | IsOff(o) | IsClean(o) | IsDirty(o) | IsSliced(o)
            | IsBroken(o) | IsCooked(o) | Holds(o) => out.push(o),
            IsFilled(FillTest::Any(o)) | IsFilled(FillTest::Liquid(o, _)) => out.push(o),
            Contains(a, b) | AtFixture(a, b) => {
                out.push(a);
                out.push(b);
            }
            And(ps) | Or(ps) => ps.iter().for_each(|p| p.collect_refs(out)),
            Not(p) => p.collect_refs(out),
        }
    }

    /// Resolves ids against `scene`.
    pub fn compile(&self, scene: &Scene) -> Result<Condition, WorldError> {
        use Predicate as P;
        let id = |o: &ObjectId| {
            scene
                .lookup(o.as_str())
                .ok_or_else(|| WorldError::UnknownObject(o.to_string()))
        };
        let flag = |o: &ObjectId, f: Flags, want: bool| -> Result<Condition, WorldError> {
            Ok(Condition::Flag { obj: id(o)?, flag: f, want })
        };
        Ok(match self {
            P::IsOpen(o) => flag(o, Flags::OPEN, true)?,
            P::IsClosed(o) => flag(o, Flags::OPEN, false)?,
            P::IsOn(o) => flag(o, Flags::ON, true)?,
            P::IsOff(o) => flag(o, Flags::ON, false)?,
            P::IsClean(o) => flag(o, Flags::CLEAN, true)?,
            P::IsDirty(o) => flag(o, Flags::CLEAN, false)?,
            P::IsSliced(o) => flag(o, Flags::SLICED, true)?,
            P::IsBroken(o) => flag(o, Flags::BROKEN, true)?,
            P::IsCooked(o) => flag(o, Flags::COOKED, true)?,
            P::IsFilled(FillTest::Any(o)) => Condition::Filled { obj: id(o)?, liquid: None },
            P::IsFilled(FillTest::Liquid(o, l)) => Condition::Filled {
                obj: id(o)?,
                // Unknown liquid: the object can never hold it.
                liquid: Some(scene.liquid(l)),
            },
            P::Contains(r, o) => Condition::Contains { recep: id(r)?, obj: id(o)? },
            P::Holds(o) => Condition::Holds(id(o)?),
            P::AtFixture(o, f) => Condition::AtFixture { obj: id(o)?, fixture: id(f)? },
            P::And(ps) => Condition::And(ps.iter().map(|p| p.compile(scene)).collect::<Result<_, _>>()?),
            P::Or(ps) => Condition::Or(ps.iter().map(|p| p.compile(scene)).collect::<Result<_, _>>()?),
            P::Not(p) => Condition::Not(Box::new(p.compile(scene)?)),
        })
    }
}

/// A predicate resolved against one scene.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Flag { obj: ObjIdx, flag: Flags, want: bool },
    Filled { obj: ObjIdx, liquid: Option<Option<LiquidId>> },
    Contains { recep: ObjIdx, obj: ObjIdx },
    Holds(ObjIdx),
    AtFixture { obj: ObjIdx, fixture: ObjIdx },
    And(Vec<Condition>),
    Or(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    pub fn eval(&self, state: &WorldState) -> bool {
        match self {
            Condition::Flag { obj, flag, want } => state.object(*obj).is(*flag) == *want,
            Condition::Filled { obj, liquid: None } => state.object(*obj).fill.is_some(),
            Condition::Filled { obj, liquid: Some(l) } => {
                l.is_some() && state.object(*obj).fill == *l
            }
            Condition::Contains { recep, obj } => state.is_within(*obj, *recep),
            Condition::Holds(o) => {
                state.holding() == Some(*o) && state.object(*o).location == Location::InAgentHand
            }
            Condition::AtFixture { obj, fixture } => state.anchor(*obj) == *fixture,
            Condition::And(cs) => cs.iter().all(|c| c.eval(state)),
            Condition::Or(cs) => cs.iter().any(|c| c.eval(state)),
            Condition::Not(c) => !c.eval(state),
        }
    }
}

/// Evaluates `p` on `state`; fails if `p` names an object not in the scene.
pub fn eval_predicate(state: &WorldState, p: &Predicate) -> Result<bool, WorldError> {
    Ok(p.compile(state.scene())?.eval(state))
}
