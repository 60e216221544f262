//! Command-line entry point.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::repl::play;
use super::report::{report_from_jsonl, write_outputs, write_summary, render_markdown};
use super::runner::{run_suite, RunConfig};
use crate::agents::{AgentConfig, ChatClient, HttpChatClient, LlmConfig, PromptTemplate, DEFAULT_API_KEY_ENV};
use crate::scenarios::{bundled_dir, load_suite_with, plan_oracle, Check, Setting, Suite, SuiteError};

#[derive(Parser, Debug)]
#[command(name = "embodied-safety", version, about = "Safety-aware embodied task planning: simulator and evaluation harness")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an agent on the suite and write episodes.jsonl, summary.json, report.md.
    Run(RunArgs),
    /// Check every scenario file, including plan feasibility.
    Validate(SuiteArgs),
    /// Print the shortest safe plan for each scenario.
    Oracle(OracleArgs),
    /// Play a scenario by typing actions.
    Play(PlayArgs),
    /// Rebuild summary.json and report.md from an episodes.jsonl.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Scenario directory (defaults to the bundled suite).
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Comma-separated scenario ids or hazard names.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Obs {
    Po,
    Fo,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SettingArg {
    Explicit,
    Implicit,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::Explicit => Setting::Explicit,
            SettingArg::Implicit => Setting::Implicit,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AgentKind {
    Oracle,
    Random,
    Replay,
    Llm,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TemplateArg {
    React,
    Preact,
    Stateact,
}

#[derive(Args, Debug)]
struct EnvArgs {
    /// Partial or full observability.
    #[arg(long, value_enum, default_value = "po")]
    obs: Obs,
    /// Physical constraints on, or off (ignore them).
    #[arg(long, value_enum, default_value = "on")]
    pc: Toggle,
    /// Step budget per episode (defaults to each scenario's own).
    #[arg(long)]
    max_steps: Option<u32>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    suite: SuiteArgs,
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_enum, default_value = "oracle")]
    agent: AgentKind,
    /// File with one action per line, for `--agent replay`.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Chat-completions URL, for `--agent llm`.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_enum, default_value = "react")]
    template: TemplateArg,
    /// Prompt template file overriding --template.
    #[arg(long)]
    template_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Re-prompts after an unusable model reply.
    #[arg(long, default_value_t = 2)]
    max_retries: u32,
    /// Environment variable holding the API key.
    #[arg(long, default_value = DEFAULT_API_KEY_ENV)]
    api_key_env: String,
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    #[arg(long, value_enum, default_value = "explicit")]
    setting: SettingArg,
    #[arg(long, default_value_t = 3)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Score errored episodes as failures and exit nonzero if any occur.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    suite: SuiteArgs,
    #[command(flatten)]
    env: EnvArgs,
}

#[derive(Args, Debug)]
struct PlayArgs {
    /// Scenario id.
    scenario: String,
    #[arg(long)]
    scenarios: Option<PathBuf>,
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_enum, default_value = "explicit")]
    setting: SettingArg,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// An episodes.jsonl file, or the directory containing it.
    input: PathBuf,
    /// Where to write summary.json and report.md (defaults to the input's directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(dir: &Option<PathBuf>, check: Check) -> Result<Suite, SuiteError> {
    let dir = dir.clone().unwrap_or_else(bundled_dir);
    load_suite_with(&dir, check)
}

fn episode_cfg(env: &EnvArgs, max_steps: u32) -> crate::actions::EpisodeConfig {
    crate::actions::EpisodeConfig {
        full_observability: env.obs == Obs::Fo,
        ignore_physical_constraints: env.pc == Toggle::Off,
        max_steps: env.max_steps.unwrap_or(max_steps),
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::FAILURE
}

fn cmd_run(a: RunArgs) -> ExitCode {
    let suite = match load(&a.suite.scenarios, Check::Structure) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let mut client: Option<Arc<dyn ChatClient>> = None;
    let agent = match a.agent {
        AgentKind::Oracle => AgentConfig::Oracle,
        AgentKind::Random => AgentConfig::Random,
        AgentKind::Replay => {
            let Some(path) = &a.plan else {
                return fail("--agent replay needs --plan FILE");
            };
            match std::fs::read_to_string(path) {
                Ok(text) => AgentConfig::Replay {
                    plan: text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect(),
                },
                Err(e) => return fail(format!("{}: {e}", path.display())),
            }
        }
        AgentKind::Llm => {
            let mut c = LlmConfig::default();
            match &a.endpoint {
                Some(e) => c.endpoint = e.clone(),
                None => return fail("--agent llm needs --endpoint URL"),
            }
            if let Some(m) = &a.model {
                c.model = m.clone();
            }
            c.template = match a.template {
                TemplateArg::React => PromptTemplate::React,
                TemplateArg::Preact => PromptTemplate::Preact,
                TemplateArg::Stateact => PromptTemplate::Stateact,
            };
            c.template_file = a.template_file.clone();
            c.temperature = a.temperature;
            c.max_retries = a.max_retries;
            c.api_key_env = a.api_key_env.clone();
            c.timeout_secs = a.timeout_secs;
            client = Some(Arc::new(HttpChatClient::new(&c.endpoint, &c.api_key_env, Duration::from_secs(c.timeout_secs), c.http_retries)));
            AgentConfig::Llm(c)
        }
    };
    let cfg = RunConfig {
        filter: a.suite.only.clone(),
        agent,
        full_observability: a.env.obs == Obs::Fo,
        ignore_physical_constraints: a.env.pc == Toggle::Off,
        max_steps: a.env.max_steps,
        setting: a.setting.into(),
        runs: a.runs.max(1),
        base_seed: a.seed,
        parallel: a.parallel,
        strict: a.strict,
    };
    let (report, records) = run_suite(&suite, &cfg, client);
    if records.is_empty() {
        return fail("no scenario matches the filter");
    }
    if let Err(e) = write_outputs(&a.out, &report, &records) {
        return fail(e);
    }
    println!("CSR {}  GSR {}  paired GSR {}", report.csr, report.gsr, report.paired_gsr);
    println!("wrote {}", a.out.display());
    if a.strict && report.errored > 0 {
        eprintln!("{} episode(s) errored", report.errored);
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

fn cmd_validate(a: SuiteArgs) -> ExitCode {
    match load(&a.scenarios, Check::Feasibility) {
        Ok(suite) => {
            let safety = suite.safety().count();
            let paired = suite.paired().count();
            println!("ok: {} scenarios ({safety} safety, {paired} paired)", suite.scenarios.len());
            println!("suite hash {}", suite.hash);
            ExitCode::SUCCESS
        }
        Err(SuiteError::Invalid(files)) => {
            for (path, errs) in &files {
                for e in errs {
                    eprintln!("{}: {e}", path.display());
                }
            }
            ExitCode::FAILURE
        }
        Err(e) => fail(e),
    }
}

fn cmd_oracle(a: OracleArgs) -> ExitCode {
    let suite = match load(&a.suite.scenarios, Check::Structure) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let mut code = ExitCode::SUCCESS;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for s in &suite.scenarios {
        if !a.suite.only.is_empty() && !a.suite.only.iter().any(|f| *f == s.id || f == s.hazard.name()) {
            continue;
        }
        match plan_oracle(s, &episode_cfg(&a.env, s.max_steps)) {
            Ok(plan) => {
                let _ = writeln!(out, "{} ({} steps)", s.id, plan.len());
                for (i, act) in plan.iter().enumerate() {
                    let _ = writeln!(out, "  {:>2}. {act}", i + 1);
                }
            }
            Err(e) => {
                let _ = writeln!(out, "{}: {e}", s.id);
                code = ExitCode::FAILURE;
            }
        }
    }
    code
}

fn cmd_play(a: PlayArgs) -> ExitCode {
    let suite = match load(&a.scenarios, Check::Structure) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let Some(s) = suite.get(&a.scenario) else {
        return fail(format!("no scenario `{}`", a.scenario));
    };
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    match play(s, episode_cfg(&a.env, s.max_steps), a.setting.into(), stdin.lock(), &mut stdout) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn cmd_report(a: ReportArgs) -> ExitCode {
    let path = if a.input.is_dir() { a.input.join("episodes.jsonl") } else { a.input.clone() };
    let report = match report_from_jsonl(&path) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let dir = a.out.unwrap_or_else(|| path.parent().map(PathBuf::from).unwrap_or_default());
    if let Err(e) = write_summary(&dir, &report) {
        return fail(e);
    }
    print!("{}", render_markdown(&report));
    ExitCode::SUCCESS
}

pub fn run(cli: Cli) -> ExitCode {
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match cli.cmd {
        Command::Run(a) => cmd_run(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Play(a) => cmd_play(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Parses `std::env::args` and runs.
pub fn main() -> ExitCode {
    run(Cli::parse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "embodied-safety", "run", "--agent", "llm", "--endpoint", "http://x/v1/chat/completions", "--model", "m",
            "--setting", "implicit", "--obs", "fo", "--pc", "off", "--runs", "2", "--seed", "9", "--max-steps", "30",
            "--parallel", "4", "--out", "o", "--strict", "--scenarios", "s",
        ])
        .unwrap();
        let Command::Run(a) = cli.cmd else { panic!() };
        assert_eq!((a.env.obs, a.env.pc, a.runs, a.seed, a.env.max_steps), (Obs::Fo, Toggle::Off, 2, 9, Some(30)));
        assert!(a.strict);
    }
}
