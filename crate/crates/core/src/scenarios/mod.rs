//! Scenario documents, validation and the bundled hazard suite.
//!
//! A scenario is one JSON file: a scene, an instruction in two wordings
//! (with and without the safety requirements spelled out), final-state
//! sub-goals and safety constraints. See `docs/scenario-format.md`.

mod oracle;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::actions::EpisodeConfig;
use crate::constraints::{ConstraintError, ConstraintSet, StateConstraint, StepConstraint};
use crate::goals::SubGoal;
use crate::world::{build_world, SceneSpec, WorldError, WorldState};

pub use oracle::{plan_oracle, plan_oracle_with_budget, OracleError, OraclePlan, DEFAULT_BUDGET};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hazard {
    Fire,
    Fluid,
    Injury,
    ObjectDamage,
    Pollution,
    /// The paired, safety-unrelated task.
    None,
}

impl Hazard {
    pub const SAFETY: [Hazard; 5] =
        [Hazard::Fire, Hazard::Fluid, Hazard::Injury, Hazard::ObjectDamage, Hazard::Pollution];

    pub fn is_safety(self) -> bool {
        self != Hazard::None
    }

    pub fn name(self) -> &'static str {
        match self {
            Hazard::Fire => "fire",
            Hazard::Fluid => "fluid",
            Hazard::Injury => "injury",
            Hazard::ObjectDamage => "object_damage",
            Hazard::Pollution => "pollution",
            Hazard::None => "none",
        }
    }
}

impl fmt::Display for Hazard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether safety requirements appear in the instruction text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    #[default]
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub format_version: u32,
    pub id: String,
    pub hazard: Hazard,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paired_with: Option<String>,
    pub max_steps: u32,
    pub instruction_explicit: String,
    pub instruction_implicit: String,
    pub scene: SceneSpec,
    pub subgoals: Vec<SubGoal>,
    #[serde(default)]
    pub step_constraints: Vec<StepConstraint>,
    #[serde(default)]
    pub state_constraints: Vec<StateConstraint>,
}

impl Scenario {
    /// A constraint-free scenario with no sub-goals, for building up in code.
    pub fn skeleton(id: &str, scene: SceneSpec) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            id: id.into(),
            hazard: Hazard::None,
            paired_with: None,
            max_steps: crate::actions::DEFAULT_MAX_STEPS,
            instruction_explicit: String::new(),
            instruction_implicit: String::new(),
            scene,
            subgoals: Vec::new(),
            step_constraints: Vec::new(),
            state_constraints: Vec::new(),
        }
    }

    pub fn build(&self) -> Result<WorldState, WorldError> {
        build_world(&self.scene)
    }

    pub fn constraints(&self, world: &WorldState) -> Result<ConstraintSet, ConstraintError> {
        ConstraintSet::compile(world.scene(), &self.step_constraints, &self.state_constraints)
    }

    pub fn instruction(&self, setting: Setting) -> &str {
        match setting {
            Setting::Explicit => &self.instruction_explicit,
            Setting::Implicit => &self.instruction_implicit,
        }
    }

    /// Constraint descriptions, step constraints first.
    pub fn constraint_descriptions(&self) -> impl Iterator<Item = &str> {
        self.step_constraints
            .iter()
            .map(|c| c.description.as_str())
            .chain(self.state_constraints.iter().map(|c| c.description.as_str()))
    }

    pub fn constraint_count(&self) -> usize {
        self.step_constraints.len() + self.state_constraints.len()
    }

    /// Default partial-observability, physical-constraint config with this scenario's budget.
    pub fn episode_config(&self) -> EpisodeConfig {
        EpisodeConfig::default().with_max_steps(self.max_steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("not a scenario document: {0}")]
    Parse(String),
    #[error("unsupported format_version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("constraint `{id}`: {source}")]
    Constraint { id: String, source: ConstraintError },
    #[error("duplicate sub-goal or constraint id `{0}`")]
    DuplicateId(String),
    #[error("scenario has no sub-goals")]
    NoSubgoals,
    #[error("max_steps must be at least 1")]
    ZeroMaxSteps,
    #[error("constraint `{0}` has an empty description")]
    EmptyDescription(String),
    #[error("hazard `{hazard}` does not fit {constraints} constraint(s)")]
    HazardMismatch { hazard: Hazard, constraints: usize },
    #[error("implicit instruction reveals constraint `{constraint}`")]
    ConstraintLeak { constraint: String },
    #[error("explicit instruction omits the description of constraint `{0}`")]
    MissingConstraintText(String),
    #[error("no constraint-satisfying plan: {0}")]
    Infeasible(String),
    #[error("planner gave up after expanding {0} states")]
    SearchBudgetExceeded(usize),
}

const NUMBER_WORDS: [&str; 21] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
];

/// Looks for "within <n> step(s)" with `n` in digits or words.
fn mentions_step_window(text: &str) -> Option<String> {
    let lower = text.to_lowercase();
    let words: Vec<&str> = lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect();
    words.windows(3).find_map(|w| {
        let number = w[1].chars().all(|c| c.is_ascii_digit()) || NUMBER_WORDS.contains(&w[1]);
        (w[0] == "within" && number && w[2].starts_with("step")).then(|| w.join(" "))
    })
}

/// Every check except feasibility.
pub fn validate_structure(s: &Scenario) -> Vec<ValidationError> {
    let mut errs = Vec::new();
    if s.format_version != FORMAT_VERSION {
        errs.push(ValidationError::UnsupportedVersion(s.format_version));
    }
    if s.max_steps == 0 {
        errs.push(ValidationError::ZeroMaxSteps);
    }
    if s.subgoals.is_empty() {
        errs.push(ValidationError::NoSubgoals);
    }
    let mut ids: Vec<&str> = s.subgoals.iter().map(|g| g.id.as_str()).collect();
    ids.extend(s.step_constraints.iter().map(|c| c.id.as_str()));
    ids.extend(s.state_constraints.iter().map(|c| c.id.as_str()));
    ids.sort_unstable();
    for pair in ids.windows(2) {
        if pair[0] == pair[1] {
            errs.push(ValidationError::DuplicateId(pair[0].to_string()));
        }
    }

    let problems = s.scene.problems();
    let scene_ok = problems.is_empty();
    errs.extend(problems.into_iter().map(ValidationError::from));

    let n = s.constraint_count();
    if s.hazard.is_safety() != (n > 0) {
        errs.push(ValidationError::HazardMismatch { hazard: s.hazard, constraints: n });
    }
    let named = s
        .step_constraints
        .iter()
        .map(|c| (&c.id, &c.description))
        .chain(s.state_constraints.iter().map(|c| (&c.id, &c.description)));
    for (id, desc) in named {
        if desc.trim().is_empty() {
            errs.push(ValidationError::EmptyDescription(id.clone()));
            continue;
        }
        if !s.instruction_explicit.contains(desc.as_str()) {
            errs.push(ValidationError::MissingConstraintText(id.clone()));
        }
        if s.instruction_implicit.contains(desc.as_str()) {
            errs.push(ValidationError::ConstraintLeak { constraint: id.clone() });
        }
    }
    if let Some(phrase) = mentions_step_window(&s.instruction_implicit) {
        errs.push(ValidationError::ConstraintLeak { constraint: phrase });
    }

    if scene_ok {
        if let Ok(world) = s.build() {
            for g in &s.subgoals {
                if let Err(e) = g.condition.compile(world.scene()) {
                    errs.push(e.into());
                }
            }
            for c in &s.step_constraints {
                if let Err(source) = ConstraintSet::compile(world.scene(), std::slice::from_ref(c), &[]) {
                    errs.push(ValidationError::Constraint { id: c.id.clone(), source });
                }
            }
            for c in &s.state_constraints {
                if let Err(source) = ConstraintSet::compile(world.scene(), &[], std::slice::from_ref(c)) {
                    errs.push(ValidationError::Constraint { id: c.id.clone(), source });
                }
            }
        }
    }
    errs
}

/// Structure plus feasibility: the oracle must find a safe plan within
/// `max_steps` under partial observability and physical constraints.
pub fn check_scenario(s: &Scenario) -> Vec<ValidationError> {
    let mut errs = validate_structure(s);
    if !errs.is_empty() {
        return errs;
    }
    match plan_oracle_with_budget(s, &s.episode_config(), DEFAULT_BUDGET) {
        Ok(_) => {}
        Err(OracleError::SearchBudgetExceeded { expanded }) => {
            errs.push(ValidationError::SearchBudgetExceeded(expanded))
        }
        Err(OracleError::Infeasible { expanded }) => errs.push(ValidationError::Infeasible(format!(
            "no safe plan within {} steps ({expanded} states explored)",
            s.max_steps
        ))),
        Err(OracleError::Invalid(e)) => errs.push(ValidationError::Infeasible(e)),
    }
    errs
}

/// Parses and fully validates a scenario document.
pub fn validate_scenario(raw: &str) -> Result<Scenario, Vec<ValidationError>> {
    let s: Scenario = serde_json::from_str(raw).map_err(|e| vec![ValidationError::Parse(e.to_string())])?;
    let errs = check_scenario(&s);
    if errs.is_empty() {
        Ok(s)
    } else {
        Err(errs)
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} invalid scenario file(s): {}", .0.len(), summarize(.0))]
    Invalid(Vec<(PathBuf, Vec<ValidationError>)>),
}

fn summarize(files: &[(PathBuf, Vec<ValidationError>)]) -> String {
    files
        .iter()
        .map(|(p, es)| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let msgs: Vec<String> = es.iter().map(|e| e.to_string()).collect();
            format!("{name}: {}", msgs.join("; "))
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// How much checking [`load_suite_with`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Structure,
    Feasibility,
}

/// A loaded set of scenarios, sorted by id.
#[derive(Debug, Clone)]
pub struct Suite {
    pub scenarios: Vec<Scenario>,
    /// SHA-256 over the file names and bytes, in file-name order.
    pub hash: String,
}

impl Suite {
    pub fn get(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn safety(&self) -> impl Iterator<Item = &Scenario> {
        self.scenarios.iter().filter(|s| s.hazard.is_safety())
    }

    pub fn paired(&self) -> impl Iterator<Item = &Scenario> {
        self.scenarios.iter().filter(|s| !s.hazard.is_safety())
    }
}

/// The suite shipped with the crate.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// Loads every `*.json` in `dir`, fully validated.
pub fn load_suite(dir: &Path) -> Result<Suite, SuiteError> {
    load_suite_with(dir, Check::Feasibility)
}

pub fn load_suite_with(dir: &Path, check: Check) -> Result<Suite, SuiteError> {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> SuiteError + '_ {
        move |source| SuiteError::Io { path: path.to_path_buf(), source }
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();

    let mut hasher = Sha256::new();
    let mut parsed = Vec::new();
    let mut bad = Vec::new();
    for path in &files {
        let raw = fs::read(path).map_err(io(path))?;
        hasher.update(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        hasher.update([0]);
        hasher.update(&raw);
        hasher.update([0]);
        let text = String::from_utf8_lossy(&raw);
        match serde_json::from_str::<Scenario>(&text) {
            Err(e) => bad.push((path.clone(), vec![ValidationError::Parse(e.to_string())])),
            Ok(s) => parsed.push((path.clone(), s)),
        }
    }

    let checked: Vec<(PathBuf, Vec<ValidationError>)> = {
        use rayon::prelude::*;
        parsed
            .par_iter()
            .map(|(p, s)| {
                let errs = match check {
                    Check::Structure => validate_structure(s),
                    Check::Feasibility => check_scenario(s),
                };
                (p.clone(), errs)
            })
            .collect()
    };
    bad.extend(checked.into_iter().filter(|(_, e)| !e.is_empty()));

    let mut scenarios: Vec<Scenario> = parsed.into_iter().map(|(_, s)| s).collect();
    scenarios.sort_by(|a, b| a.id.cmp(&b.id));
    for w in scenarios.windows(2) {
        if w[0].id == w[1].id {
            bad.push((dir.join(&w[1].id), vec![ValidationError::DuplicateId(w[1].id.clone())]));
        }
    }
    for s in &scenarios {
        if let Some(p) = &s.paired_with {
            let ok = scenarios
                .iter()
                .any(|o| &o.id == p && o.paired_with.as_deref() == Some(&s.id) && o.hazard.is_safety() != s.hazard.is_safety());
            if !ok {
                bad.push((
                    dir.join(&s.id),
                    vec![ValidationError::World(WorldError::DanglingReference {
                        object: s.id.clone(),
                        reference: p.clone(),
                    })],
                ));
            }
        }
    }
    if !bad.is_empty() {
        bad.sort_by(|a, b| a.0.cmp(&b.0));
        return Err(SuiteError::Invalid(bad));
    }
    let hash = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(Suite { scenarios, hash })
}
