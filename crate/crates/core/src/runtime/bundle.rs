use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::RuntimeError;
use crate::kb::{parse_clauses, Literal, Location, ParseError};
use crate::world::read_regions;

pub const SITE_FILE: &str = "site.facts";
pub const RULES_FILE: &str = "domain.rules";
pub const ACTIONS_FILE: &str = "domain.actions";
pub const EVENTS_FILE: &str = "events.facts";
pub const GOAL_FILE: &str = "goal.facts";
/// Optional region table used to lay out the site graph.
pub const REGIONS_FILE: &str = "map/regions.csv";

/// Source texts of a scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioBundle {
    pub site: String,
    pub rules: String,
    pub actions: String,
    pub events: Option<String>,
    pub goal: Option<String>,
    pub coords: BTreeMap<String, (f64, f64)>,
}

impl ScenarioBundle {
    pub fn from_texts(site: &str, rules: &str, actions: &str) -> Self {
        Self {
            site: site.into(),
            rules: rules.into(),
            actions: actions.into(),
            ..Self::default()
        }
    }

    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, RuntimeError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(RuntimeError::Io {
                path: dir.to_path_buf(),
                message: "not a scenario directory".into(),
            });
        }
        let required = |name: &'static str| {
            let path = dir.join(name);
            if !path.exists() {
                return Err(RuntimeError::MissingPart { part: name, path });
            }
            read(&path)
        };
        let optional = |name: &str| {
            let path = dir.join(name);
            path.exists().then(|| read(&path)).transpose()
        };
        let mut coords = BTreeMap::new();
        let regions_path = dir.join(REGIONS_FILE);
        if regions_path.exists() {
            let file = fs::File::open(&regions_path).map_err(|e| io_error(&regions_path, e))?;
            let rows = read_regions(file).map_err(|e| RuntimeError::Io {
                path: regions_path.clone(),
                message: e.to_string(),
            })?;
            coords = rows.into_iter().map(|r| (r.name, (r.x, r.y))).collect();
        }
        Ok(Self {
            site: required(SITE_FILE)?,
            rules: required(RULES_FILE)?,
            actions: required(ACTIONS_FILE)?,
            events: optional(EVENTS_FILE)?,
            goal: optional(GOAL_FILE)?,
            coords,
        })
    }
}

fn io_error(path: &Path, e: std::io::Error) -> RuntimeError {
    RuntimeError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read(path: &PathBuf) -> Result<String, RuntimeError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

const START: Location = Location { line: 1, column: 1 };

/// Parses a goal given either as a `goal([L1, ..., Ln]).` clause or as a
/// bare conjunction `L1, ..., Ln`.
pub fn parse_goal(text: &str) -> Result<Vec<Literal>, ParseError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with("goal(") {
        let clauses = parse_clauses(text)?;
        return match clauses.as_slice() {
            [c] if c.body.is_none() => match c.head.as_compound() {
                Some(("goal", [list])) => list.to_literals(),
                _ => Err(ParseError::syntax(c.at, "expected goal([Literal, ...])")),
            },
            [] => Err(ParseError::syntax(START, "empty goal")),
            [_, c, ..] | [c] => Err(ParseError::syntax(c.at, "a goal file holds exactly one goal/1 clause")),
        };
    }
    let goal = crate::kb::parse_query(text)?;
    if goal.is_empty() {
        return Err(ParseError::syntax(START, "empty goal"));
    }
    Ok(goal)
}
