//! JSON HTTP API over a shared knowledge base and in-memory dialogue sessions.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use factor_forge::analysis::{analyze, what_if, AnalysisError, WhatIfRequest};
use factor_forge::dialogue::{Dialogue, DialogueConfig, DialogueError, DialogueView, Move, Role, Status};
use factor_forge::engine::build_graph;
use factor_forge::{serialize_kb, CaseId, KnowledgeBase, Literal, Resolution};

/// Error body: a stable machine-readable code, a message, and details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status: status.as_u16(), code: code.into(), message: message.into(), detail: Value::Null }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not-found", format!("unknown {what} {id}"))
            .with_detail(json!({ what: id }))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let message = e.to_string();
        match e {
            AnalysisError::UnknownCase(id) => ApiError::not_found("case", &id),
            AnalysisError::InvalidKb(v) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "invalid-kb", message)
                .with_detail(json!({ "violations": v })),
            AnalysisError::UnknownOverride(key) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unknown-override", message)
                    .with_detail(json!({ "key": key }))
            }
            AnalysisError::OverrideType { key, expected, got } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "override-type", message)
                    .with_detail(json!({ "key": key, "expected": expected, "got": got }))
            }
            AnalysisError::Engine(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "engine-error", message),
        }
    }
}

impl From<DialogueError> for ApiError {
    fn from(e: DialogueError) -> Self {
        let message = e.to_string();
        match e {
            DialogueError::Terminal => ApiError::new(StatusCode::CONFLICT, "terminal", message),
            DialogueError::IllegalMove(reason) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "illegal-move", message)
                    .with_detail(json!({ "reason": reason }))
            }
            DialogueError::UnknownCase(id) => ApiError::not_found("case", &id),
            DialogueError::Engine(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "engine-error", message),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad-request", "request body is not acceptable")
            .with_detail(json!({ "reason": e.body_text() }))
    }
}

type ApiResult<T> = Result<T, ApiError>;

struct Session {
    dialogue: Dialogue,
    engine: Option<Role>,
}

impl Session {
    /// Lets the engine move for as long as it holds the turn.
    fn engine_turns(&mut self) {
        while self.dialogue.status == Status::Open && Some(self.dialogue.turn) == self.engine {
            let Some(m) = self.dialogue.engine_move() else { break };
            if self.dialogue.apply_mut(&m).is_err() {
                break;
            }
        }
    }

    fn view(&self) -> SessionView {
        SessionView { engine: self.engine, dialogue: self.dialogue.view() }
    }
}

/// A dialogue as returned by the API.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<Role>,
    #[serde(flatten)]
    pub dialogue: DialogueView,
}

/// Shared server state. The knowledge base sits behind an `Arc` so that a
/// reload swaps it atomically while running requests keep their snapshot.
pub struct AppState {
    kb: RwLock<Arc<KnowledgeBase>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_session: AtomicU64,
}

impl AppState {
    pub fn new(kb: KnowledgeBase) -> Arc<Self> {
        Arc::new(AppState {
            kb: RwLock::new(Arc::new(kb)),
            sessions: Mutex::new(HashMap::new()),
            next_session: AtomicU64::new(1),
        })
    }

    pub fn kb(&self) -> Arc<KnowledgeBase> {
        self.kb.read().expect("kb lock poisoned").clone()
    }

    /// Replaces the knowledge base for subsequent requests. Live sessions
    /// keep arguing over the graph they started with.
    pub fn swap_kb(&self, kb: KnowledgeBase) {
        *self.kb.write().expect("kb lock poisoned") = Arc::new(kb);
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .lock()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("dialogue", id))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/kb", get(get_kb))
        .route("/cases", get(list_cases))
        .route("/cases/{id}/analysis", get(case_analysis))
        .route("/cases/{id}/graph", get(case_graph))
        .route("/whatif", post(post_whatif))
        .route("/dialogues", post(create_dialogue))
        .route("/dialogues/{id}", get(get_dialogue).delete(delete_dialogue))
        .route("/dialogues/{id}/moves", post(post_move))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such endpoint") })
        .with_state(state)
}

async fn get_kb(State(state): State<Arc<AppState>>) -> Response {
    let text = serialize_kb(&state.kb());
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseSummary {
    pub id: CaseId,
    pub title: String,
    pub precedent: bool,
    pub factors: Vec<String>,
    pub issue_resolutions: BTreeMap<String, Resolution>,
}

async fn list_cases(State(state): State<Arc<AppState>>) -> Json<Vec<CaseSummary>> {
    let kb = state.kb();
    Json(
        kb.cases
            .values()
            .map(|c| CaseSummary {
                id: c.id.clone(),
                title: c.title.clone(),
                precedent: c.is_precedent(),
                factors: c.factors.iter().map(|f| f.to_string()).collect(),
                issue_resolutions: c.issue_resolutions.iter().map(|(i, r)| (i.to_string(), *r)).collect(),
            })
            .collect(),
    )
}

async fn case_analysis(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(analyze(&state.kb(), &id)?).into_response())
}

async fn case_graph(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let kb = state.kb();
    // analyze validates the KB and the case id before the graph is built.
    analyze(&kb, &id)?;
    let case = kb.case(&id).expect("analysed case exists");
    let graph = build_graph(&kb, case).map_err(AnalysisError::from)?;
    Ok(Json(graph.export()).into_response())
}

async fn post_whatif(
    State(state): State<Arc<AppState>>,
    body: Result<Json<WhatIfRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    Ok(Json(what_if(&state.kb(), &req)?).into_response())
}

/// A literal given either in its text form or as a tagged object.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LiteralInput {
    Text(String),
    Literal(Literal),
}

impl LiteralInput {
    fn resolve(self) -> ApiResult<Literal> {
        match self {
            LiteralInput::Literal(l) => Ok(l),
            LiteralInput::Text(t) => t.parse().map_err(|e: factor_forge::scheme::ParseLiteralError| {
                ApiError::new(StatusCode::BAD_REQUEST, "bad-request", e.to_string()).with_detail(json!({ "target": t }))
            }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateDialogue {
    pub case: String,
    pub target: LiteralInput,
    #[serde(default)]
    pub config: DialogueConfig,
    /// The role the engine plays, if any.
    #[serde(default)]
    pub engine: Option<Role>,
}

async fn create_dialogue(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateDialogue>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let target = req.target.resolve()?;
    let kb = state.kb();
    let violations = kb.validate();
    if !violations.is_empty() {
        return Err(AnalysisError::InvalidKb(violations).into());
    }
    let id = format!("s{}", state.next_session.fetch_add(1, Ordering::Relaxed));
    let dialogue = Dialogue::new(&kb, id.clone(), &req.case, target, req.config)?;
    let mut session = Session { dialogue, engine: req.engine };
    session.engine_turns();
    let view = session.view();
    state.sessions.lock().expect("session table poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ViewQuery {
    /// `transcript` returns the transcript export instead of the live view.
    #[serde(default)]
    pub format: Option<String>,
}

async fn get_dialogue(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let s = session.lock().expect("session poisoned");
    match q.format.as_deref() {
        None | Some("view") => Ok(Json(s.view()).into_response()),
        Some("transcript") => Ok(Json(s.dialogue.transcript()).into_response()),
        Some(other) => Err(ApiError::new(StatusCode::BAD_REQUEST, "bad-request", format!("unknown format {other}"))),
    }
}

async fn post_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<Move>, JsonRejection>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let Json(mv) = body?;
    let mut s = session.lock().expect("session poisoned");
    s.dialogue.apply_mut(&mv)?;
    s.engine_turns();
    Ok(Json(s.view()).into_response())
}

async fn delete_dialogue(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    match state.sessions.lock().expect("session table poisoned").remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found("dialogue", &id)),
    }
}
