//! Batch evaluation from code: oracle and random agents over the bundled
//! suite, with the three output files written for each.
//!
//!     cargo run --release --example run_suite [out-dir]

use std::path::PathBuf;

use embodied_safety::agents::AgentConfig;
use embodied_safety::harness::{run_suite, write_outputs, RunConfig};
use embodied_safety::scenarios::{bundled_dir, load_suite};

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "results".into()));
    let suite = load_suite(&bundled_dir()).expect("bundled suite");
    for agent in [AgentConfig::Oracle, AgentConfig::Random] {
        let cfg = RunConfig { agent: agent.clone(), runs: 3, base_seed: 1, parallel: 4, ..RunConfig::default() };
        let (report, records) = run_suite(&suite, &cfg, None);
        let dir = out.join(agent.name());
        write_outputs(&dir, &report, &records).unwrap();
        println!("{:<7} CSR {}  GSR {}  -> {}", agent.name(), report.csr, report.gsr, dir.display());
    }
}
