//! Build a scene, look around, and evaluate predicates.
//!
//!     cargo run --example world_basics

use embodied_safety::observe::{initial_memory, render_observation};
use embodied_safety::predicate::{eval_predicate, Predicate};
use embodied_safety::samples;
use embodied_safety::world::build_world;

fn main() {
    let spec = samples::toy_kitchen();
    let world = build_world(&spec).expect("toy kitchen is valid");
    println!("{} objects, agent at {}\n", world.scene().len(), spec.start);

    let mem = initial_memory(&world);
    print!("{}", render_observation(&world, &mem, None));

    // Bowl sits in the closed fridge and the apple sits in the bowl.
    for p in [
        Predicate::Contains("Fridge".into(), "Apple".into()),
        Predicate::IsOpen("Fridge".into()),
        Predicate::IsClean("Plate".into()),
        Predicate::AtFixture("Faucet".into(), "Sink".into()),
    ] {
        println!("{} = {}", serde_json::to_string(&p).unwrap(), eval_predicate(&world, &p).unwrap());
    }

    println!();
    for &o in world.scene().sorted() {
        println!("{}", serde_json::to_string(&world.instance(o)).unwrap());
    }
}
