use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::Json;
use rescue_core::action::GroundAction;
use rescue_core::facts::snapshot;
use rescue_core::kb::{format_conjunction, parse_fact};
use rescue_core::planner::{PlanOutcome, PlannerConfig, SearchStats};
use rescue_core::runtime::{parse_goal, PlanJob, RuntimeError, Session};
use rescue_core::world::{EventOp, EventRecord, SiteGraph, SiteNode};
use serde::{Deserialize, Serialize};

use crate::{ApiError, AppState, View};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDto {
    pub a: String,
    pub b: String,
    pub overlays: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDto {
    pub nodes: Vec<NodeDto>,
    pub edges: Vec<EdgeDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

impl From<SiteNode> for NodeDto {
    fn from(n: SiteNode) -> Self {
        Self {
            name: n.name,
            x: n.x,
            y: n.y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDto {
    pub n: usize,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivePlanDto {
    pub goal: String,
    pub steps: Vec<StepDto>,
    pub cursor: usize,
    pub dirty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDto {
    pub facts: Vec<String>,
    pub derived: Vec<String>,
    pub clock: i64,
    /// Snapshot hash of `facts`, 16 hex digits.
    pub hash: String,
    pub plan: Option<ActivePlanDto>,
    pub plan_dirty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDto {
    pub t: i64,
    pub op: String,
    pub fact: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventResponse {
    pub changed: bool,
    pub plan_dirty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfigDto {
    pub max_depth: Option<usize>,
    pub max_expansions: Option<u64>,
    pub timeout_ms: Option<u64>,
}

impl ConfigDto {
    fn to_config(self) -> PlannerConfig {
        let d = PlannerConfig::default();
        PlannerConfig {
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            max_expansions: self.max_expansions.unwrap_or(d.max_expansions),
            time_budget: self.timeout_ms.map(Duration::from_millis).unwrap_or(d.time_budget),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub goal: String,
    #[serde(default)]
    pub config: Option<ConfigDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfRequest {
    #[serde(default)]
    pub events: Vec<EventDto>,
    pub goal: String,
    #[serde(default)]
    pub config: Option<ConfigDto>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanStatus {
    Plan,
    Unsolvable,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsDto {
    pub expanded: u64,
    pub generated: u64,
    pub elapsed_ms: u64,
}

impl From<&SearchStats> for StatsDto {
    fn from(s: &SearchStats) -> Self {
        Self {
            expanded: s.expanded,
            generated: s.generated,
            elapsed_ms: s.elapsed_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanResponse {
    pub status: PlanStatus,
    pub steps: Vec<StepDto>,
    pub stats: StatsDto,
}

impl From<&PlanOutcome> for PlanResponse {
    fn from(o: &PlanOutcome) -> Self {
        let (status, steps) = match o {
            PlanOutcome::Found(p, _) => (PlanStatus::Plan, numbered(&p.steps)),
            PlanOutcome::Unsolvable(_) => (PlanStatus::Unsolvable, Vec::new()),
            PlanOutcome::Exhausted(_) => (PlanStatus::Exhausted, Vec::new()),
        };
        Self {
            status,
            steps,
            stats: o.stats().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResponse {
    pub cursor: usize,
    pub done: bool,
    pub action: String,
}

fn numbered(steps: &[GroundAction]) -> Vec<StepDto> {
    steps
        .iter()
        .enumerate()
        .map(|(i, a)| StepDto {
            n: i + 1,
            action: a.to_string(),
        })
        .collect()
}

pub(crate) fn view_of(session: &Session) -> View {
    let graph = session.graph();
    let edges = graph
        .edges
        .iter()
        .map(|(a, b)| EdgeDto {
            a: a.clone(),
            b: b.clone(),
            overlays: SiteGraph::overlays(session.state(), a, b),
        })
        .collect();
    let snap = session.snapshot();
    let derived = snapshot(&session.derived().derived);
    let plan = session.active_plan().map(|p| ActivePlanDto {
        goal: format_conjunction(&p.goal),
        steps: numbered(&p.plan.steps),
        cursor: p.cursor,
        dirty: p.dirty,
    });
    View {
        graph: GraphDto {
            nodes: graph.nodes.into_iter().map(NodeDto::from).collect(),
            edges,
        },
        state: StateDto {
            facts: snap.facts.iter().map(ToString::to_string).collect(),
            derived: derived.facts.iter().map(ToString::to_string).collect(),
            clock: session.clock(),
            hash: format!("{:016x}", snap.hash),
            plan_dirty: plan.as_ref().is_some_and(|p| p.dirty),
            plan,
        },
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(t)| t)
        .map_err(|e| ApiError::bad_request("bad_request", e.body_text()))
}

fn parse_event(dto: &EventDto) -> Result<EventRecord, ApiError> {
    let op = EventOp::parse(&dto.op)
        .ok_or_else(|| ApiError::bad_request("bad_request", format!("op must be \"assert\" or \"retract\", got {:?}", dto.op)))?;
    if dto.t < 0 {
        return Err(ApiError::bad_request("bad_request", "t must be non-negative"));
    }
    let fact = parse_fact(&dto.fact).map_err(|e| ApiError::bad_request("parse_error", e.to_string()))?;
    Ok(EventRecord {
        timestamp: dto.t,
        op,
        fact,
    })
}

pub async fn graph(State(app): State<Arc<AppState>>) -> Json<GraphDto> {
    Json(app.view().graph.clone())
}

pub async fn state(State(app): State<Arc<AppState>>) -> Json<StateDto> {
    Json(app.view().state.clone())
}

pub async fn post_event(
    State(app): State<Arc<AppState>>,
    payload: Result<Json<EventDto>, JsonRejection>,
) -> Result<Json<EventResponse>, ApiError> {
    let event = parse_event(&body(payload)?)?;
    let mut session = app.session.lock().await;
    let out = session.post_event(event)?;
    // The clock moves even when the state does not.
    app.publish(&session);
    Ok(Json(EventResponse {
        changed: out.changed,
        plan_dirty: out.plan_dirty,
    }))
}

async fn run_job(job: PlanJob) -> Result<(PlanJob, PlanOutcome), ApiError> {
    tokio::task::spawn_blocking(move || {
        let outcome = job.run()?;
        Ok::<_, RuntimeError>((job, outcome))
    })
    .await
    .map_err(|e| ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
    .map_err(ApiError::from)
}

pub async fn plan(
    State(app): State<Arc<AppState>>,
    payload: Result<Json<PlanRequest>, JsonRejection>,
) -> Result<Json<PlanResponse>, ApiError> {
    let req = body(payload)?;
    let goal = parse_goal(&req.goal).map_err(|e| ApiError::bad_request("parse_error", e.to_string()))?;
    let config = req.config.unwrap_or_default().to_config();
    let _planning = app.planning.lock().await;
    let job = app.session.lock().await.plan_job(goal, config);
    let (job, outcome) = run_job(job).await?;
    if outcome.plan().is_some() {
        let mut session = app.session.lock().await;
        session.install(&job, &outcome);
        app.publish(&session);
    }
    Ok(Json(PlanResponse::from(&outcome)))
}

pub async fn what_if(
    State(app): State<Arc<AppState>>,
    payload: Result<Json<WhatIfRequest>, JsonRejection>,
) -> Result<Json<PlanResponse>, ApiError> {
    let req = body(payload)?;
    let goal = parse_goal(&req.goal).map_err(|e| ApiError::bad_request("parse_error", e.to_string()))?;
    let events = req.events.iter().map(parse_event).collect::<Result<Vec<_>, _>>()?;
    let config = req.config.unwrap_or_default().to_config();
    let _planning = app.planning.lock().await;
    let job = app.session.lock().await.plan_job(goal, config).with_events(&events)?;
    let (_, outcome) = run_job(job).await?;
    Ok(Json(PlanResponse::from(&outcome)))
}

pub async fn execute_step(State(app): State<Arc<AppState>>) -> Result<Json<StepResponse>, ApiError> {
    let mut session = app.session.lock().await;
    let out = session.execute_step()?;
    app.publish(&session);
    Ok(Json(StepResponse {
        cursor: out.cursor,
        done: out.done,
        action: out.action.to_string(),
    }))
}
