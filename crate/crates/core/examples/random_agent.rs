//! A seeded random agent on one bundled scenario. Same seed, same episode.
//!
//!     cargo run --example random_agent [scenario-id] [seed]

use embodied_safety::agents::RandomAgent;
use embodied_safety::harness::run_episode;
use embodied_safety::scenarios::{bundled_dir, load_suite, Setting};

fn main() {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "fire_01".into());
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(7);
    let suite = load_suite(&bundled_dir()).expect("bundled suite");
    let scenario = suite.get(&id).expect("scenario id");

    let mut agent = RandomAgent::new(seed);
    let r = run_episode(scenario, &mut agent, &scenario.episode_config(), Setting::Explicit, seed).unwrap();
    for t in &r.trajectory {
        println!("{:>2} {:<28} {}", t.step, t.action, t.feedback);
    }
    println!("\nGSR {:.2}  CSR {}  violations {}", r.gsr, r.csr, r.violations.len());
    for v in &r.violations {
        println!("  [{}] step {}: {}", v.constraint_id, v.at_step, v.detail);
    }
}
