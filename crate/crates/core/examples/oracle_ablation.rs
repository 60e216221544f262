//! Shortest safe plan per bundled scenario under PO/PC, FO and IPC.
//!
//!     cargo run --release --example oracle_ablation [scenario-id ...]

use std::time::Instant;

use embodied_safety::actions::EpisodeConfig;
use embodied_safety::scenarios::{bundled_dir, load_suite_with, plan_oracle_with_budget, Check, DEFAULT_BUDGET};

fn main() {
    let only: Vec<String> = std::env::args().skip(1).collect();
    let suite = load_suite_with(&bundled_dir(), Check::Structure).expect("bundled suite");
    let started = Instant::now();
    println!("{:<22} {:>4} {:>4} {:>4}  expanded(po)", "scenario", "po", "fo", "ipc");
    for s in &suite.scenarios {
        if !only.is_empty() && !only.contains(&s.id) {
            continue;
        }
        let base = s.episode_config();
        let len = |cfg: EpisodeConfig| match plan_oracle_with_budget(s, &cfg, DEFAULT_BUDGET) {
            Ok(p) => (p.actions.len().to_string(), p.expanded),
            Err(e) => (format!("{e}"), 0),
        };
        let (po, expanded) = len(base);
        let (fo, _) = len(base.fo());
        let (ipc, _) = len(base.ipc());
        println!("{:<22} {po:>4} {fo:>4} {ipc:>4}  {expanded}", s.id);
    }
    println!("total {:.1?}", started.elapsed());
}
