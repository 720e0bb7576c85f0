//! HTTP/JSON facade over one planning session.
//!
//! All mutations go through a single writer lock on the session. After each
//! mutation the writer publishes an immutable [`View`] that GET handlers read
//! without touching the session, so reads never wait for planning. Plan and
//! what-if requests queue on a separate planning lock and search on a
//! detached snapshot, off the write path.

mod api;
mod error;

use std::future::Future;
use std::sync::{Arc, RwLock};

use axum::routing::{get, post};
use axum::Router;
use rescue_core::runtime::Session;
use tokio::net::TcpListener;
use tokio::sync::Mutex;

pub use api::{
    ConfigDto, EdgeDto, EventDto, EventResponse, GraphDto, PlanRequest, PlanResponse, PlanStatus, StateDto,
    StatsDto, StepDto, StepResponse, WhatIfRequest,
};
pub use error::ApiError;

/// What GET handlers serve: the last committed state.
#[derive(Debug, Clone)]
pub struct View {
    pub graph: GraphDto,
    pub state: StateDto,
}

pub struct AppState {
    session: Mutex<Session>,
    view: RwLock<Arc<View>>,
    planning: Mutex<()>,
}

impl AppState {
    pub fn new(session: Session) -> Arc<Self> {
        let view = api::view_of(&session);
        Arc::new(Self {
            session: Mutex::new(session),
            view: RwLock::new(Arc::new(view)),
            planning: Mutex::new(()),
        })
    }

    pub fn view(&self) -> Arc<View> {
        self.view.read().expect("view lock poisoned").clone()
    }

    fn publish(&self, session: &Session) {
        let view = Arc::new(api::view_of(session));
        *self.view.write().expect("view lock poisoned") = view;
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/graph", get(api::graph))
        .route("/api/v1/state", get(api::state))
        .route("/api/v1/events", post(api::post_event))
        .route("/api/v1/plan", post(api::plan))
        .route("/api/v1/whatif", post(api::what_if))
        .route("/api/v1/execute-step", post(api::execute_step))
        .with_state(state)
}

/// Serves the API on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    session: Session,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::new(session)))
        .with_graceful_shutdown(shutdown)
        .await
}
