//! Rebuild the summary from an episodes.jsonl, and the metric arithmetic
//! behind the "mean ± std" columns.
//!
//!     cargo run --example report_from_jsonl [path/to/episodes.jsonl]

use std::path::PathBuf;

use embodied_safety::harness::{mean_std, render_markdown, report_from_jsonl, run_suite, write_outputs, RunConfig};
use embodied_safety::scenarios::{bundled_dir, load_suite};

fn main() {
    // Three runs with CSR 20, 24 and 28 percent.
    println!("CSR over runs {{20, 24, 28}}: {}\n", mean_std(&[20.0, 24.0, 28.0]));

    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let dir = std::env::temp_dir().join("embodied-safety-report-demo");
            let suite = load_suite(&bundled_dir()).unwrap();
            let cfg = RunConfig { filter: vec!["fire".into()], runs: 2, ..RunConfig::default() };
            let (report, records) = run_suite(&suite, &cfg, None);
            write_outputs(&dir, &report, &records).unwrap();
            dir.join("episodes.jsonl")
        }
    };
    let report = report_from_jsonl(&path).expect("readable episodes.jsonl");
    print!("{}", render_markdown(&report));
}
