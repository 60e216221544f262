//! The faucet rule from the fluid hazard: turn it off within three steps.
//! Turning it off at offset 3 is fine, offset 4 is a violation. The online
//! monitor and the offline trace checker agree.
//!
//!     cargo run --example safety_monitor

use embodied_safety::actions::{apply_action, Action, ActionEvent, EpisodeConfig, Verb};
use embodied_safety::constraints::{check_trace_offline, ActionPattern, ConstraintSet, MonitorState, StepConstraint};
use embodied_safety::observe::initial_memory;
use embodied_safety::samples;
use embodied_safety::world::{build_world, WorldState};

fn faucet_rule() -> StepConstraint {
    StepConstraint {
        id: "faucet-off".into(),
        trigger: ActionPattern::object(Verb::TurnOn, "Faucet"),
        response: ActionPattern::object(Verb::TurnOff, "Faucet"),
        window: 3,
        description: "Turn off the faucet within three steps of turning it on.".into(),
    }
}

fn run(idle: usize) {
    let mut world = build_world(&samples::toy_kitchen()).unwrap();
    let mut mem = initial_memory(&world);
    let cfg = EpisodeConfig::default();
    let cs = ConstraintSet::compile(world.scene(), &[faucet_rule()], &[]).unwrap();
    let mut mon = MonitorState::new();
    let mut trace: Vec<(ActionEvent, WorldState)> = Vec::new();

    let mut plan = vec!["go to(Sink)", "turn on(Faucet)"];
    plan.extend(std::iter::repeat_n("go to(Sink)", idle));
    plan.push("turn off(Faucet)");
    for text in plan {
        let pre = world.clone();
        let out = apply_action(&mut world, &mut mem, &cfg, &text.parse::<Action>().unwrap());
        for ev in &out.events {
            mon.observe_event(&cs, ev, &pre);
            trace.push((*ev, pre.clone()));
        }
        mon.tick(&cs, world.step_count());
    }
    mon.finalize(&cs);
    let offline = check_trace_offline(&cs, &trace, world.step_count());
    println!("turn off at offset {}:", idle + 1);
    if mon.violations.is_empty() {
        println!("  no violation");
    }
    for v in &mon.violations {
        println!("  step {}: {}", v.at_step, v.detail);
    }
    println!("  offline checker agrees: {}", offline == mon.violations);
}

fn main() {
    run(2);
    run(3);
}
