//! Operator sessions over a scenario bundle.
//!
//! A session owns the live fact state, the applied event log and at most one
//! active plan. Planning can run off the session on a [`PlanJob`] snapshot;
//! the result is installed afterwards and marked dirty if the state moved on
//! in between.

mod bundle;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

pub use bundle::{
    parse_goal, ScenarioBundle, ACTIONS_FILE, EVENTS_FILE, GOAL_FILE, REGIONS_FILE, RULES_FILE, SITE_FILE,
};

use crate::action::{parse_actions, ActionDomain, ActionError, GroundAction};
use crate::facts::{snapshot, FactSet, Snapshot};
use crate::inference::{DerivedModel, InferenceError, QueryResult};
use crate::kb::{parse_program, Literal, ParseError, PredKey, Rule};
use crate::planner::{Plan, PlanOutcome, Planner, PlannerConfig, PlannerError, ReplanOutcome};
use crate::world::{apply_event_in_place, parse_events, EventRecord, SiteGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("scenario is missing {part} (looked for {})", path.display())]
    MissingPart { part: &'static str, path: PathBuf },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{file}:{source}")]
    Parse { file: String, source: ParseError },
    #[error("{file}:{source}")]
    Action { file: String, source: ActionError },
    #[error("{file}: {source}")]
    Inference { file: String, source: InferenceError },
    #[error("{file}: {message}")]
    Invalid { file: String, message: String },
    #[error("{0}")]
    Query(#[from] InferenceError),
    #[error("{0}")]
    Planner(#[from] PlannerError),
    #[error("event at t={timestamp} is earlier than the session clock t={clock}")]
    TimestampRegression { clock: i64, timestamp: i64 },
    #[error("{predicate} is derived by rules and cannot be asserted or retracted")]
    DerivedFact { predicate: PredKey },
    #[error("the active plan is dirty; replan first")]
    DirtyPlan,
    #[error("no active plan")]
    NoActivePlan,
    #[error("the active plan is complete")]
    PlanComplete,
}

/// Entry of the session log, in the order things happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogEntry {
    Event(EventRecord),
    Action { clock: i64, action: GroundAction },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivePlan {
    pub goal: Vec<Literal>,
    pub plan: Plan,
    pub cursor: usize,
    /// Set by any state change since the plan was last validated.
    pub dirty: bool,
}

impl ActivePlan {
    pub fn remaining(&self) -> &[GroundAction] {
        &self.plan.steps[self.cursor..]
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.plan.steps.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventOutcome {
    pub changed: bool,
    pub plan_dirty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub action: GroundAction,
    pub cursor: usize,
    pub done: bool,
}

/// Sizes of the loaded scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioCounts {
    pub nodes: usize,
    pub links: usize,
    /// `crane/2` and `truck/2` facts.
    pub resources: usize,
    /// Rules from the rules file, helper rules excluded.
    pub rules: usize,
    pub helper_rules: usize,
    pub schemas: usize,
}

/// A state snapshot detached from the session, ready for planning on
/// another thread.
#[derive(Debug, Clone)]
pub struct PlanJob {
    planner: Arc<Planner>,
    state: FactSet,
    state_hash: u64,
    goal: Vec<Literal>,
    config: PlannerConfig,
}

impl PlanJob {
    pub fn run(&self) -> Result<PlanOutcome, RuntimeError> {
        Ok(self.planner.plan(&self.state, &self.goal, &self.config)?)
    }

    /// Applies hypothetical events to this job's private state.
    pub fn with_events(mut self, events: &[EventRecord]) -> Result<Self, RuntimeError> {
        for e in events {
            check_event_predicate(&self.planner, e)?;
            apply_event_in_place(&mut self.state, e);
        }
        self.state_hash = snapshot(&self.state).hash;
        Ok(self)
    }

    pub fn state_hash(&self) -> u64 {
        self.state_hash
    }
}

fn check_event_predicate(planner: &Planner, e: &EventRecord) -> Result<(), RuntimeError> {
    let key = e.fact.key();
    if planner.program().derived_predicates().contains(&key) {
        return Err(RuntimeError::DerivedFact { predicate: key });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Session {
    state: FactSet,
    scenario_rules: Vec<Rule>,
    domain: ActionDomain,
    planner: Arc<Planner>,
    log: Vec<LogEntry>,
    clock: i64,
    plan: Option<ActivePlan>,
    coords: BTreeMap<String, (f64, f64)>,
    pending_events: Vec<EventRecord>,
    default_goal: Option<Vec<Literal>>,
}

impl Session {
    pub fn load(bundle: &ScenarioBundle) -> Result<Self, RuntimeError> {
        let parse_err = |file: &str| {
            let file = file.to_string();
            move |source| RuntimeError::Parse { file: file.clone(), source }
        };
        let site = parse_program(&bundle.site).map_err(parse_err(SITE_FILE))?;
        if !site.rules.is_empty() {
            return Err(RuntimeError::Invalid {
                file: SITE_FILE.into(),
                message: "site facts cannot contain rules".into(),
            });
        }
        let rules = parse_program(&bundle.rules).map_err(parse_err(RULES_FILE))?;
        if !rules.facts.is_empty() {
            return Err(RuntimeError::Invalid {
                file: RULES_FILE.into(),
                message: "the rules file cannot contain facts".into(),
            });
        }
        let domain = parse_actions(&bundle.actions).map_err(|source| RuntimeError::Action {
            file: ACTIONS_FILE.into(),
            source,
        })?;

        let mut all_rules = rules.rules.clone();
        all_rules.extend(domain.rules.iter().cloned());
        domain.check(&all_rules).map_err(|source| RuntimeError::Action {
            file: ACTIONS_FILE.into(),
            source,
        })?;
        let planner = Planner::new(&all_rules, &domain.schemas, domain.fluents.clone()).map_err(|e| match e {
            PlannerError::Inference(source) => RuntimeError::Inference {
                file: RULES_FILE.into(),
                source,
            },
            other => other.into(),
        })?;

        let derived = planner.program().derived_predicates();
        if let Some(f) = site.facts.iter().find(|f| derived.contains(&f.key())) {
            return Err(RuntimeError::Invalid {
                file: SITE_FILE.into(),
                message: format!("{f} is a fact of derived predicate {}", f.key()),
            });
        }

        let pending_events = match &bundle.events {
            Some(text) => parse_events(text).map_err(parse_err(EVENTS_FILE))?,
            None => Vec::new(),
        };
        let default_goal = match &bundle.goal {
            Some(text) => Some(parse_goal(text).map_err(parse_err(GOAL_FILE))?),
            None => None,
        };

        Ok(Self {
            state: site.facts.into_iter().collect(),
            scenario_rules: rules.rules,
            domain,
            planner: Arc::new(planner),
            log: Vec::new(),
            clock: 0,
            plan: None,
            coords: bundle.coords.clone(),
            pending_events,
            default_goal,
        })
    }

    pub fn load_dir(dir: impl AsRef<std::path::Path>) -> Result<Self, RuntimeError> {
        Self::load(&ScenarioBundle::from_dir(dir)?)
    }

    pub fn state(&self) -> &FactSet {
        &self.state
    }

    pub fn snapshot(&self) -> Snapshot {
        snapshot(&self.state)
    }

    pub fn state_hash(&self) -> u64 {
        self.state.hash()
    }

    pub fn clock(&self) -> i64 {
        self.clock
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn active_plan(&self) -> Option<&ActivePlan> {
        self.plan.as_ref()
    }

    pub fn planner(&self) -> &Arc<Planner> {
        &self.planner
    }

    pub fn domain(&self) -> &ActionDomain {
        &self.domain
    }

    /// Scenario rules followed by the domain's helper rules.
    pub fn rules(&self) -> &[Rule] {
        self.planner.program().rules()
    }

    /// Events shipped with the bundle; never applied automatically.
    pub fn pending_events(&self) -> &[EventRecord] {
        &self.pending_events
    }

    pub fn default_goal(&self) -> Option<&[Literal]> {
        self.default_goal.as_deref()
    }

    pub fn counts(&self) -> ScenarioCounts {
        let count = |name: &str, arity: usize| self.state.with_predicate(&PredKey::new(name, arity)).count();
        ScenarioCounts {
            nodes: count("node", 1),
            links: count("link", 2),
            resources: count("crane", 2) + count("truck", 2),
            rules: self.scenario_rules.len(),
            helper_rules: self.domain.rules.len(),
            schemas: self.domain.schemas.len(),
        }
    }

    pub fn derived(&self) -> DerivedModel {
        self.planner.interpret(&self.state).model()
    }

    pub fn query(&self, goal: &[Literal]) -> Result<QueryResult, RuntimeError> {
        Ok(self.planner.interpret(&self.state).query(goal)?)
    }

    pub fn graph(&self) -> SiteGraph {
        SiteGraph::from_facts(&self.state, &self.coords)
    }

    pub fn post_event(&mut self, e: EventRecord) -> Result<EventOutcome, RuntimeError> {
        if e.timestamp < self.clock {
            return Err(RuntimeError::TimestampRegression {
                clock: self.clock,
                timestamp: e.timestamp,
            });
        }
        check_event_predicate(&self.planner, &e)?;
        let changed = apply_event_in_place(&mut self.state, &e);
        self.clock = e.timestamp;
        self.log.push(LogEntry::Event(e));
        if changed {
            self.mark_dirty();
        }
        Ok(EventOutcome {
            changed,
            plan_dirty: self.plan.as_ref().is_some_and(|p| p.dirty),
        })
    }

    fn mark_dirty(&mut self) {
        if let Some(p) = &mut self.plan {
            p.dirty = true;
        }
    }

    /// Detaches the current state for planning.
    pub fn plan_job(&self, goal: Vec<Literal>, config: PlannerConfig) -> PlanJob {
        PlanJob {
            planner: self.planner.clone(),
            state: self.state.clone(),
            state_hash: self.state_hash(),
            goal,
            config,
        }
    }

    /// Installs a found plan computed on `job`. The plan starts dirty when
    /// the state has changed since the job was taken.
    pub fn install(&mut self, job: &PlanJob, outcome: &PlanOutcome) {
        if let PlanOutcome::Found(plan, _) = outcome {
            self.plan = Some(ActivePlan {
                goal: job.goal.clone(),
                plan: plan.clone(),
                cursor: 0,
                dirty: job.state_hash != self.state_hash(),
            });
        }
    }

    /// Plans from the current state and installs the plan if one is found.
    pub fn request_plan(&mut self, goal: Vec<Literal>, config: PlannerConfig) -> Result<PlanOutcome, RuntimeError> {
        let job = self.plan_job(goal, config);
        let outcome = job.run()?;
        self.install(&job, &outcome);
        Ok(outcome)
    }

    /// Revalidates the remaining steps of the active plan, replacing it if
    /// they no longer reach its goal. An unsolvable or exhausted result
    /// leaves the dirty plan in place.
    pub fn replan(&mut self, config: PlannerConfig) -> Result<ReplanOutcome, RuntimeError> {
        let active = self.plan.as_ref().ok_or(RuntimeError::NoActivePlan)?;
        let outcome = self
            .planner
            .replan(&self.state, active.remaining(), &active.goal, &config)?;
        match &outcome {
            ReplanOutcome::KeepPlan => {
                if let Some(p) = &mut self.plan {
                    p.dirty = false;
                }
            }
            ReplanOutcome::NewPlan(plan, _) => {
                let goal = active.goal.clone();
                self.plan = Some(ActivePlan {
                    goal,
                    plan: plan.clone(),
                    cursor: 0,
                    dirty: false,
                });
            }
            ReplanOutcome::Unsolvable(_) | ReplanOutcome::Exhausted(_) => {}
        }
        Ok(outcome)
    }

    /// Plans against the current state with `events` applied to a copy.
    /// The session itself is not touched.
    pub fn what_if(
        &self,
        events: &[EventRecord],
        goal: Vec<Literal>,
        config: PlannerConfig,
    ) -> Result<PlanOutcome, RuntimeError> {
        self.plan_job(goal, config).with_events(events)?.run()
    }

    pub fn execute_step(&mut self) -> Result<StepOutcome, RuntimeError> {
        let active = self.plan.as_mut().ok_or(RuntimeError::NoActivePlan)?;
        if active.is_done() {
            return Err(RuntimeError::PlanComplete);
        }
        if active.dirty {
            return Err(RuntimeError::DirtyPlan);
        }
        let action = active.plan.steps[active.cursor].clone();
        for a in &action.del {
            self.state.remove(a);
        }
        for a in &action.add {
            self.state.insert(a.clone());
        }
        active.cursor += 1;
        let outcome = StepOutcome {
            action: action.clone(),
            cursor: active.cursor,
            done: active.is_done(),
        };
        self.log.push(LogEntry::Action {
            clock: self.clock,
            action,
        });
        Ok(outcome)
    }
}
