//! Breadth-first forward search over ground states.
//!
//! Every expanded state gets its derived model recomputed before action
//! grounding and goal testing; models are memoized by state hash so
//! repeated calls (replanning, what-if queries) reuse them. Visited states
//! are keyed by the hash of their fluent facts alone.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::action::{apply_action, ground_in, validate_with, ActionSchema, GroundAction, Validation};
use crate::facts::FactSet;
use crate::inference::{InferenceError, Interpretation, NegationMode, StratifiedProgram};
use crate::kb::{Atom, Literal, PredKey, Rule, Substitution};

/// Memo entries kept before the cache is flushed.
const MEMO_CAPACITY: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannerConfig {
    pub max_depth: usize,
    pub max_expansions: u64,
    pub time_budget: Duration,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            max_depth: 64,
            max_expansions: 1_000_000,
            time_budget: Duration::from_millis(30_000),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// States popped and goal-tested, the initial state included.
    pub expanded: u64,
    /// Successor states produced, duplicates included.
    pub generated: u64,
    pub duplicates_pruned: u64,
    pub max_frontier: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
    pub proven_minimal: bool,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanOutcome {
    Found(Plan, SearchStats),
    /// No state within `max_depth` satisfies the goal, and every reachable
    /// state was examined.
    Unsolvable(SearchStats),
    /// A budget tripped, or the depth limit cut off unexplored states.
    Exhausted(SearchStats),
}

impl PlanOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            PlanOutcome::Found(_, s) | PlanOutcome::Unsolvable(s) | PlanOutcome::Exhausted(s) => s,
        }
    }

    pub fn plan(&self) -> Option<&Plan> {
        match self {
            PlanOutcome::Found(p, _) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplanOutcome {
    KeepPlan,
    NewPlan(Plan, SearchStats),
    Unsolvable(SearchStats),
    Exhausted(SearchStats),
}

impl From<PlanOutcome> for ReplanOutcome {
    fn from(o: PlanOutcome) -> Self {
        match o {
            PlanOutcome::Found(p, s) => ReplanOutcome::NewPlan(p, s),
            PlanOutcome::Unsolvable(s) => ReplanOutcome::Unsolvable(s),
            PlanOutcome::Exhausted(s) => ReplanOutcome::Exhausted(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("planner config: {0} must be positive")]
    BadConfig(&'static str),
}

/// A rule set and action schemas prepared for repeated planning.
#[derive(Debug)]
pub struct Planner {
    program: StratifiedProgram,
    schemas: Vec<ActionSchema>,
    fluents: BTreeSet<PredKey>,
    memo: Mutex<HashMap<(u64, u64), Arc<Interpretation>>>,
}

impl Planner {
    pub fn new(rules: &[Rule], schemas: &[ActionSchema], fluents: BTreeSet<PredKey>) -> Result<Self, PlannerError> {
        Ok(Self {
            program: StratifiedProgram::new(rules)?,
            schemas: schemas.to_vec(),
            fluents,
            memo: Mutex::default(),
        })
    }

    /// Treats every predicate an effect touches as fluent.
    pub fn with_effect_fluents(rules: &[Rule], schemas: &[ActionSchema]) -> Result<Self, PlannerError> {
        let fluents = schemas
            .iter()
            .flat_map(|s| s.effects.iter().map(|e| e.atom().key()))
            .collect();
        Self::new(rules, schemas, fluents)
    }

    pub fn program(&self) -> &StratifiedProgram {
        &self.program
    }

    pub fn schemas(&self) -> &[ActionSchema] {
        &self.schemas
    }

    pub fn fluents(&self) -> &BTreeSet<PredKey> {
        &self.fluents
    }

    fn is_fluent(&self, a: &Atom) -> bool {
        self.fluents.contains(&a.key())
    }

    /// Hash of the fluent part of `state`; two states with equal static
    /// facts are the same search node iff this matches.
    pub fn state_key(&self, state: &FactSet) -> u64 {
        state.hash_where(|a| self.is_fluent(a))
    }

    fn static_key(&self, state: &FactSet) -> u64 {
        state.hash_where(|a| !self.is_fluent(a))
    }

    /// Base facts of `state` plus their derived model.
    pub fn interpret(&self, state: &FactSet) -> Arc<Interpretation> {
        let key = (self.static_key(state), self.state_key(state));
        self.interpret_keyed(key, state)
    }

    fn interpret_keyed(&self, key: (u64, u64), state: &FactSet) -> Arc<Interpretation> {
        if let Some(hit) = self.memo.lock().expect("memo poisoned").get(&key) {
            return hit.clone();
        }
        let interp = Arc::new(self.program.interpret(state));
        let mut memo = self.memo.lock().expect("memo poisoned");
        if memo.len() >= MEMO_CAPACITY {
            memo.clear();
        }
        memo.insert(key, interp.clone());
        interp
    }

    pub fn goal_holds(&self, state: &FactSet, goal: &[Literal]) -> Result<bool, InferenceError> {
        goal_holds(&self.interpret(state), goal)
    }

    pub fn applicable(&self, state: &FactSet) -> Result<Vec<GroundAction>, InferenceError> {
        ground_in(&self.interpret(state), &self.schemas)
    }

    pub fn validate(&self, initial: &FactSet, plan: &[GroundAction], goal: &[Literal]) -> Result<Validation, InferenceError> {
        validate_with(&self.program, &self.schemas, initial, plan, goal)
    }

    pub fn plan(&self, initial: &FactSet, goal: &[Literal], config: &PlannerConfig) -> Result<PlanOutcome, PlannerError> {
        if config.max_depth == 0 {
            return Err(PlannerError::BadConfig("max_depth"));
        }
        if config.max_expansions == 0 {
            return Err(PlannerError::BadConfig("max_expansions"));
        }
        if config.time_budget.is_zero() {
            return Err(PlannerError::BadConfig("time_budget"));
        }
        let start = Instant::now();
        let mut stats = SearchStats::default();
        let finish = |mut stats: SearchStats| {
            stats.elapsed_ms = start.elapsed().as_millis() as u64;
            stats
        };

        // Static facts are shared; nodes carry only their fluent facts.
        let statics: FactSet = initial.iter().filter(|a| !self.is_fluent(a)).cloned().collect();
        let static_key = statics.hash();
        let root: FactSet = initial.iter().filter(|a| self.is_fluent(a)).cloned().collect();

        struct Node {
            fluents: FactSet,
            key: u64,
            parent: Option<(usize, GroundAction)>,
            depth: usize,
        }
        let root_key = self.state_key(&root);
        let mut nodes = vec![Node {
            fluents: root,
            key: root_key,
            parent: None,
            depth: 0,
        }];
        let mut visited = HashSet::from([root_key]);
        let mut frontier = VecDeque::from([0usize]);
        stats.max_frontier = 1;
        let mut depth_cut = false;

        while let Some(id) = frontier.pop_front() {
            if stats.expanded >= config.max_expansions || start.elapsed() > config.time_budget {
                return Ok(PlanOutcome::Exhausted(finish(stats)));
            }
            stats.expanded += 1;
            let mut state = statics.clone();
            state.extend(nodes[id].fluents.iter().cloned());
            let interp = self.interpret_keyed((static_key, nodes[id].key), &state);
            if goal_holds(&interp, goal)? {
                let mut steps = Vec::new();
                let mut cur = id;
                while let Some((parent, action)) = &nodes[cur].parent {
                    steps.push(action.clone());
                    cur = *parent;
                }
                steps.reverse();
                let plan = Plan {
                    steps,
                    proven_minimal: true,
                };
                return Ok(PlanOutcome::Found(plan, finish(stats)));
            }
            let actions = ground_in(&interp, &self.schemas)?;
            let depth = nodes[id].depth;
            for action in actions {
                let next = apply_action(&nodes[id].fluents, &action);
                let key = self.state_key(&next);
                if depth == config.max_depth {
                    depth_cut |= !visited.contains(&key);
                    continue;
                }
                stats.generated += 1;
                if !visited.insert(key) {
                    stats.duplicates_pruned += 1;
                    continue;
                }
                nodes.push(Node {
                    fluents: next,
                    key,
                    parent: Some((id, action)),
                    depth: depth + 1,
                });
                frontier.push_back(nodes.len() - 1);
            }
            stats.max_frontier = stats.max_frontier.max(frontier.len());
        }
        let stats = finish(stats);
        Ok(if depth_cut {
            PlanOutcome::Exhausted(stats)
        } else {
            PlanOutcome::Unsolvable(stats)
        })
    }

    /// Keeps `remaining` if it still validates from `current`; plans afresh
    /// otherwise.
    pub fn replan(
        &self,
        current: &FactSet,
        remaining: &[GroundAction],
        goal: &[Literal],
        config: &PlannerConfig,
    ) -> Result<ReplanOutcome, PlannerError> {
        if self.validate(current, remaining, goal)?.is_valid() {
            return Ok(ReplanOutcome::KeepPlan);
        }
        Ok(self.plan(current, goal, config)?.into())
    }
}

fn goal_holds(interp: &Interpretation, goal: &[Literal]) -> Result<bool, InferenceError> {
    Ok(!interp
        .solve(goal, &Substitution::new(), NegationMode::LeftToRight)?
        .is_empty())
}

/// One-shot planning; fluents are the predicates the schemas' effects touch.
pub fn plan(
    initial: &FactSet,
    rules: &[Rule],
    schemas: &[ActionSchema],
    goal: &[Literal],
    config: &PlannerConfig,
) -> Result<PlanOutcome, PlannerError> {
    Planner::with_effect_fluents(rules, schemas)?.plan(initial, goal, config)
}

pub fn replan(
    current: &FactSet,
    rules: &[Rule],
    schemas: &[ActionSchema],
    remaining: &[GroundAction],
    goal: &[Literal],
    config: &PlannerConfig,
) -> Result<ReplanOutcome, PlannerError> {
    Planner::with_effect_fluents(rules, schemas)?.replan(current, remaining, goal, config)
}
