//! Small hand-built scenes used by the examples and tests.

use std::collections::BTreeMap;

use crate::world::{Affordances as A, InitialState, ObjectSpec, SceneSpec};

/// The household kind catalog the bundled scenarios draw from.
pub fn standard_kinds() -> BTreeMap<String, A> {
    let k = |a: A| a;
    [
        ("CounterTop", k(A::RECEPTACLE)),
        ("Table", k(A::RECEPTACLE)),
        ("Shelf", k(A::RECEPTACLE)),
        ("Sink", k(A::RECEPTACLE)),
        ("GarbageCan", k(A::RECEPTACLE)),
        ("Fridge", k(A::RECEPTACLE | A::OPENABLE)),
        ("Cabinet", k(A::RECEPTACLE | A::OPENABLE)),
        ("Drawer", k(A::RECEPTACLE | A::OPENABLE)),
        ("StoveBurner", k(A::RECEPTACLE | A::TOGGLEABLE | A::HEAT_SOURCE)),
        ("Toaster", k(A::RECEPTACLE | A::TOGGLEABLE | A::HEAT_SOURCE)),
        ("Microwave", k(A::RECEPTACLE | A::OPENABLE | A::TOGGLEABLE | A::HEAT_SOURCE)),
        ("Faucet", k(A::TOGGLEABLE | A::WATER_SOURCE)),
        ("HousePlant", k(A::FILLABLE)),
        ("Apple", k(A::PICKABLE | A::SLICEABLE)),
        ("Tomato", k(A::PICKABLE | A::SLICEABLE)),
        ("Lettuce", k(A::PICKABLE | A::SLICEABLE)),
        ("Bread", k(A::PICKABLE | A::SLICEABLE | A::COOKABLE)),
        ("Potato", k(A::PICKABLE | A::SLICEABLE | A::COOKABLE)),
        ("Egg", k(A::PICKABLE | A::BREAKABLE | A::COOKABLE)),
        ("Bowl", k(A::PICKABLE | A::RECEPTACLE | A::FILLABLE | A::DIRTYABLE)),
        ("Plate", k(A::PICKABLE | A::RECEPTACLE | A::DIRTYABLE | A::FRAGILE | A::BREAKABLE)),
        ("Mug", k(A::PICKABLE | A::RECEPTACLE | A::FILLABLE | A::DIRTYABLE | A::FRAGILE | A::BREAKABLE)),
        ("Cup", k(A::PICKABLE | A::FILLABLE | A::DIRTYABLE | A::FRAGILE | A::BREAKABLE)),
        ("Pan", k(A::PICKABLE | A::RECEPTACLE | A::DIRTYABLE)),
        ("Pot", k(A::PICKABLE | A::RECEPTACLE | A::FILLABLE | A::DIRTYABLE)),
        ("Kettle", k(A::PICKABLE | A::FILLABLE)),
        ("Knife", k(A::PICKABLE | A::SHARP)),
        ("Vase", k(A::PICKABLE | A::FRAGILE | A::BREAKABLE)),
        ("WineBottle", k(A::PICKABLE | A::FILLABLE | A::FRAGILE | A::BREAKABLE)),
        ("LunchBox", k(A::PICKABLE | A::RECEPTACLE | A::OPENABLE)),
    ]
    .into_iter()
    .map(|(n, a)| (n.to_string(), a))
    .collect()
}

pub(crate) fn fixture(id: &str, kind: &str, state: InitialState) -> ObjectSpec {
    ObjectSpec {
        id: id.into(),
        kind: kind.into(),
        fixture: true,
        inside: None,
        on_floor_at: None,
        held: false,
        state,
    }
}

pub(crate) fn inside(id: &str, kind: &str, recep: &str, state: InitialState) -> ObjectSpec {
    ObjectSpec {
        id: id.into(),
        kind: kind.into(),
        fixture: false,
        inside: Some(recep.into()),
        on_floor_at: None,
        held: false,
        state,
    }
}

fn keep(kinds: &[&str]) -> BTreeMap<String, A> {
    standard_kinds()
        .into_iter()
        .filter(|(n, _)| kinds.contains(&n.as_str()))
        .collect()
}

/// A closed fridge with an apple inside and a counter the agent stands at.
pub fn minimal_scene() -> SceneSpec {
    SceneSpec {
        start: "CounterTop".into(),
        kinds: keep(&["CounterTop", "Fridge", "Apple"]),
        objects: vec![
            fixture("CounterTop", "CounterTop", InitialState::default()),
            fixture("Fridge", "Fridge", InitialState::default()),
            inside("Apple", "Apple", "Fridge", InitialState::default()),
        ],
    }
}

/// A one-room kitchen with most affordances represented.
pub fn toy_kitchen() -> SceneSpec {
    let d = InitialState::default;
    let clean = || InitialState { clean: true, ..Default::default() };
    SceneSpec {
        start: "CounterTop".into(),
        kinds: keep(&[
            "CounterTop", "Sink", "Faucet", "Fridge", "StoveBurner", "Cabinet", "Table", "Knife",
            "Bowl", "Apple", "Bread", "Mug", "Plate", "Vase", "Pan",
        ]),
        objects: vec![
            fixture("CounterTop", "CounterTop", d()),
            fixture("Sink", "Sink", d()),
            fixture("Fridge", "Fridge", d()),
            fixture("StoveBurner", "StoveBurner", d()),
            fixture("Cabinet", "Cabinet", d()),
            fixture("Table", "Table", d()),
            inside("Faucet", "Faucet", "Sink", d()),
            inside("Knife", "Knife", "CounterTop", d()),
            inside("Bread", "Bread", "CounterTop", d()),
            inside("Bowl", "Bowl", "Fridge", d()),
            inside("Apple", "Apple", "Bowl", d()),
            inside("Mug", "Mug", "Table", d()),
            inside("Vase", "Vase", "Table", d()),
            inside("Plate", "Plate", "Cabinet", clean()),
            inside("Pan", "Pan", "StoveBurner", clean()),
        ],
    }
}

/// Only fixtures; nothing can be picked up.
pub fn bare_room() -> SceneSpec {
    SceneSpec {
        start: "CounterTop".into(),
        kinds: keep(&["CounterTop", "Table", "Cabinet"]),
        objects: vec![
            fixture("CounterTop", "CounterTop", InitialState::default()),
            fixture("Table", "Table", InitialState::default()),
            fixture("Cabinet", "Cabinet", InitialState::default()),
        ],
    }
}
