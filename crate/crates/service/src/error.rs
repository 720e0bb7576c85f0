use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use rescue_core::inference::InferenceError;
use rescue_core::planner::PlannerError;
use rescue_core::runtime::RuntimeError;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub kind: &'static str,
    pub detail: String,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            kind,
            detail: detail.into(),
        }
    }

    pub fn bad_request(kind: &'static str, detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, kind, detail)
    }
}

#[derive(Serialize)]
struct Body<'a> {
    status: u16,
    kind: &'a str,
    detail: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            status: self.status.as_u16(),
            kind: self.kind,
            detail: &self.detail,
        };
        (self.status, Json(body)).into_response()
    }
}

fn inference_kind(e: &InferenceError) -> &'static str {
    match e {
        InferenceError::NotStratifiable { .. } => "not_stratifiable",
        InferenceError::UnsafeQuery { .. } => "unsafe_query",
    }
}

impl From<RuntimeError> for ApiError {
    fn from(e: RuntimeError) -> Self {
        use RuntimeError as E;
        let detail = e.to_string();
        let (status, kind) = match &e {
            E::TimestampRegression { .. } => (StatusCode::CONFLICT, "timestamp_regression"),
            E::DirtyPlan => (StatusCode::CONFLICT, "dirty_plan"),
            E::PlanComplete => (StatusCode::CONFLICT, "plan_complete"),
            E::NoActivePlan => (StatusCode::NOT_FOUND, "no_active_plan"),
            E::DerivedFact { .. } => (StatusCode::BAD_REQUEST, "derived_fact"),
            E::Query(inner) | E::Inference { source: inner, .. } => (StatusCode::BAD_REQUEST, inference_kind(inner)),
            E::Planner(PlannerError::Inference(inner)) => (StatusCode::BAD_REQUEST, inference_kind(inner)),
            E::Planner(PlannerError::BadConfig(_)) => (StatusCode::BAD_REQUEST, "bad_config"),
            E::Parse { .. } | E::Action { .. } => (StatusCode::BAD_REQUEST, "parse_error"),
            E::MissingPart { .. } | E::Io { .. } | E::Invalid { .. } => (StatusCode::BAD_REQUEST, "invalid_scenario"),
        };
        ApiError::new(status, kind, detail)
    }
}
