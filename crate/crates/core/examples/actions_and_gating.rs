//! Execute actions by hand and watch partial observability and the
//! one-arm rules gate them, then lift each gate.
//!
//!     cargo run --example actions_and_gating

use embodied_safety::actions::{apply_action, legal_actions, Action, EpisodeConfig};
use embodied_safety::observe::initial_memory;
use embodied_safety::samples;
use embodied_safety::world::build_world;

fn run(label: &str, cfg: EpisodeConfig, plan: &[&str]) {
    println!("== {label}");
    let mut world = build_world(&samples::toy_kitchen()).unwrap();
    let mut mem = initial_memory(&world);
    for text in plan {
        let action: Action = text.parse().expect("grammar");
        let out = apply_action(&mut world, &mut mem, &cfg, &action);
        let code = out.failure_code.map(|c| format!(" [{c:?}]")).unwrap_or_default();
        println!("{:>2} {action:<24} {}{code}", world.step_count(), out.feedback);
    }
    println!("   {} legal actions now\n", legal_actions(&world, &mem, &cfg).len());
}

fn main() {
    let plan = [
        "pick up(Apple)",
        "go to(Fridge)",
        "open(Fridge)",
        "pick up(Apple)",
        "go to(StoveBurner)",
        "turn on(StoveBurner)",
    ];
    let po = EpisodeConfig::default();
    run("partial observability, one arm", po, &plan);
    run("full observability", po.fo(), &["find object(Apple)", "pick up(Apple)"]);
    run("physical constraints ignored", po.ipc(), &plan);
}
