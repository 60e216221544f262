//! Episode loop, batch runner, reports and the command line.

pub mod cli;
mod episode;
mod repl;
mod report;
mod runner;

pub use episode::{run_episode, Episode, EpisodeError};
pub use repl::play;
pub use report::{
    aggregate, mean_std, read_jsonl, render_markdown, report_from_jsonl, write_outputs, write_summary, EpisodeRecord,
    EpisodeStatus, EpisodeSummary, HazardStats, MeanStd, ReportError, RunReport, RunStats, SCHEMA_VERSION,
};
pub use runner::{episode_seed, run_suite, RunConfig};
