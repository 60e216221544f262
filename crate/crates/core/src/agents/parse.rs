//! Extracting `{"think": ..., "act": ...}` from free-form model output.

use serde_json::{Deserializer, Map, Value};
use thiserror::Error;

use super::{AgentAct, AgentDecision};
use crate::actions::{Action, ActionParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no JSON object found in the reply")]
    NoJson,
    #[error("the JSON object has no `{0}` key")]
    MissingKey(&'static str),
    #[error("`{key}` must be a string")]
    NotAString { key: &'static str },
    #[error("cannot parse action `{act}`: {source}")]
    UnparseableAction { act: String, source: ActionParseError },
}

fn objects(raw: &str) -> impl Iterator<Item = Map<String, Value>> + '_ {
    raw.char_indices().filter(|(_, c)| *c == '{').filter_map(|(i, _)| {
        match Deserializer::from_str(&raw[i..]).into_iter::<Value>().next() {
            Some(Ok(Value::Object(m))) => Some(m),
            _ => None,
        }
    })
}

fn is_stop(s: &str) -> bool {
    let t = s.trim().trim_end_matches("()").trim();
    t.eq_ignore_ascii_case("stop") || t.eq_ignore_ascii_case("done")
}

/// Finds the first JSON object carrying both `think` and `act`.
///
/// Surrounding prose and markdown fences are ignored. `act` is either an
/// action in the grammar or `stop`.
pub fn parse_decision(raw: &str) -> Result<AgentDecision, ParseError> {
    let mut first_err = None;
    for obj in objects(raw) {
        let (think, act) = match (obj.get("think"), obj.get("act")) {
            (Some(t), Some(a)) => (t, a),
            (None, Some(_)) => {
                first_err.get_or_insert(ParseError::MissingKey("think"));
                continue;
            }
            (_, None) => {
                first_err.get_or_insert(ParseError::MissingKey("act"));
                continue;
            }
        };
        let think = match think {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let Value::String(act) = act else {
            return Err(ParseError::NotAString { key: "act" });
        };
        if is_stop(act) {
            return Ok(AgentDecision { think, act: AgentAct::Stop });
        }
        return act
            .parse::<Action>()
            .map(|a| AgentDecision { think, act: AgentAct::Action(a) })
            .map_err(|source| ParseError::UnparseableAction { act: act.clone(), source });
    }
    Err(first_err.unwrap_or(ParseError::NoJson))
}
