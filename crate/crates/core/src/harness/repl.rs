//! Interactive play: type actions, watch observations and violations.

use std::io::{self, BufRead, Write};

use super::episode::Episode;
use crate::actions::{legal_actions, Action, EpisodeConfig};
use crate::goals::EpisodeResult;
use crate::scenarios::{Scenario, Setting};

const HELP: &str = "Commands: an action such as `go to(Sink)` or `put down(Apple, Bowl)`, \
`legal` to list executable actions, `look` to reprint the observation, `stop` to end the episode.";

/// Runs one episode driven by `input`. Returns the judged result.
pub fn play<R: BufRead, W: Write>(
    scenario: &Scenario,
    cfg: EpisodeConfig,
    setting: Setting,
    input: R,
    out: &mut W,
) -> io::Result<EpisodeResult> {
    let mut ep = Episode::new(scenario, cfg, 0).map_err(io::Error::other)?;
    writeln!(out, "Scenario {} ({})", scenario.id, scenario.hazard)?;
    writeln!(out, "Task: {}", scenario.instruction(setting))?;
    writeln!(out, "{HELP}\n")?;
    write!(out, "{}", ep.observation())?;
    let mut lines = input.lines();
    while !ep.is_over() {
        write!(out, "[{}/{}] > ", ep.world().step_count(), cfg.max_steps)?;
        out.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let cmd = line.trim();
        match cmd.to_lowercase().as_str() {
            "" => continue,
            "help" | "?" => writeln!(out, "{HELP}")?,
            "stop" | "quit" | "exit" => break,
            "look" => write!(out, "{}", ep.observation())?,
            "legal" => {
                for a in legal_actions(ep.world(), ep.memory(), ep.config()) {
                    writeln!(out, "  {a}")?;
                }
            }
            _ => {
                let before = ep.violations().len();
                match cmd.parse::<Action>() {
                    Ok(a) => {
                        ep.step(&a, None);
                    }
                    Err(e) => {
                        ep.burn(cmd, &e.to_string(), None);
                    }
                }
                for v in &ep.violations()[before..] {
                    writeln!(out, "!! violation [{}] at step {}: {}", v.constraint_id, v.at_step, v.detail)?;
                }
                write!(out, "{}", ep.observation())?;
            }
        }
    }
    let r = ep.finish();
    writeln!(out, "\nEpisode over after {} steps.", r.steps_used)?;
    writeln!(out, "Sub-goals met: {}/{} (GSR {:.2})", r.subgoals_met.len(), r.subgoal_count, r.gsr)?;
    for v in &r.violations {
        writeln!(out, "Violation [{}] at step {}: {}", v.constraint_id, v.at_step, v.detail)?;
    }
    writeln!(out, "CSR {}", r.csr)?;
    Ok(r)
}
