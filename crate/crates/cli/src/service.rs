//! HTTP/JSON API over a [`Store`]. Reads share the graph; writes are
//! serialized by the store lock and only land if the resulting graph
//! conforms. Live execution sessions are kept in memory until finished.
//!
//! `{id}` and `{step}` path segments are percent-encoded IRIs.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::{ACCEPT, CONTENT_TYPE, LOCATION};
use axum::http::{HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use pk_forge::cq::{catalog, run, Bindings, QueryError};
use pk_forge::exec::{overrun_report, start_execution_with, ExecError, Session, SessionOptions};
use pk_forge::io::{ntriples, parse_turtle, write_jsonld, write_turtle, ParseDiagnostic};
use pk_forge::mapper::{lift_execution, lower_execution};
use pk_forge::model::{format_timestamp, parse_timestamp, OccurrenceKind, StepExecution, Timestamp};
use pk_forge::store::Graph;
use pk_forge::term::{RdfTerm, Triple};
use pk_forge::validate::ValidationReport;
use pk_forge::vocab::{dct, default_prefixes, pko, Iri};

use crate::args::{parse_iri, parse_term};
use crate::elicitation::{self, ElicitationDoc};
use crate::now;
use crate::store::{procedure_triples, CommitError, Store};

#[derive(Clone)]
pub struct AppState {
    store: Arc<RwLock<Store>>,
    sessions: Arc<Mutex<BTreeMap<Iri, Session>>>,
    base: Iri,
}

impl AppState {
    /// `base` is the namespace new procedures are minted in.
    pub fn new(store: Store, base: Iri) -> Self {
        AppState {
            store: Arc::new(RwLock::new(store)),
            sessions: Arc::default(),
            base,
        }
    }

    /// A copy of the current graph.
    pub fn snapshot(&self) -> Graph {
        self.store.read().unwrap_or_else(PoisonError::into_inner).graph().clone()
    }

    fn read<T>(&self, f: impl FnOnce(&Store) -> T) -> T {
        f(&self.store.read().unwrap_or_else(PoisonError::into_inner))
    }

    fn write<T>(&self, f: impl FnOnce(&mut Store) -> T) -> T {
        f(&mut self.store.write().unwrap_or_else(PoisonError::into_inner))
    }

    fn sessions<T>(&self, f: impl FnOnce(&mut BTreeMap<Iri, Session>) -> T) -> T {
        f(&mut self.sessions.lock().unwrap_or_else(PoisonError::into_inner))
    }

    fn mint_procedure(&self) -> Iri {
        let sep = if self.base.as_str().ends_with(['/', '#']) { "" } else { "/" };
        Iri::new(format!("{}{sep}procedure/{}", self.base, uuid::Uuid::new_v4())).expect("minted IRI is valid")
    }
}

pub fn router(state: AppState, cors_origin: Option<HeaderValue>) -> Router {
    let origin = match cors_origin {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::PUT])
        .allow_headers([CONTENT_TYPE, ACCEPT])
        .expose_headers([LOCATION]);
    Router::new()
        .route("/procedures", get(list_procedures).post(create_procedure))
        .route("/procedures/{id}", get(get_procedure).put(replace_procedure))
        .route("/validate", post(validate_body))
        .route("/cq", get(list_queries))
        .route("/cq/{id}", get(run_query))
        .route("/executions", post(start_session))
        .route("/executions/{id}/steps/{step}/{action}", post(step_event))
        .route("/executions/{id}/occurrences", post(add_occurrence))
        .route("/executions/{id}/finish", post(finish_session))
        .route("/executions/{id}/report", get(session_report))
        .layer(cors)
        .with_state(state)
}

pub fn encode_id(iri: &Iri) -> String {
    utf8_percent_encode(iri.as_str(), NON_ALPHANUMERIC).to_string()
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl std::fmt::Display) -> Self {
        ApiError {
            status,
            body: pretty(&json!({ "error": message.to_string() })),
        }
    }

    fn bad_request(message: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, message)
    }

    fn rejected(report: &ValidationReport) -> Self {
        ApiError {
            status: StatusCode::CONFLICT,
            body: report.to_json(),
        }
    }

    fn diagnostics(diags: &[ParseDiagnostic]) -> Self {
        let list: Vec<Value> = diags
            .iter()
            .map(|d| json!({ "line": d.line, "column": d.column, "message": d.message }))
            .collect();
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: pretty(&json!({ "error": "malformed RDF", "diagnostics": list })),
        }
    }
}

impl From<CommitError> for ApiError {
    fn from(e: CommitError) -> Self {
        match e {
            CommitError::Rejected(report) => ApiError::rejected(&report),
            CommitError::Persist(e) => {
                tracing::error!("{e}");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e)
            }
        }
    }
}

impl From<ExecError> for ApiError {
    fn from(e: ExecError) -> Self {
        match &e {
            ExecError::UnknownProcedure(_) | ExecError::UnknownStep(_) => ApiError::not_found(&e),
            ExecError::InvalidProcedure { findings, .. } => ApiError {
                status: StatusCode::CONFLICT,
                body: pretty(&json!({ "error": e.to_string(), "findings": findings })),
            },
            _ => ApiError::new(StatusCode::CONFLICT, &e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, self.body)
    }
}

type ApiResult = Result<Response, ApiError>;

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(CONTENT_TYPE, "application/json")], body).into_response()
}

fn created(location: String, body: Value) -> Response {
    let mut r = json_response(StatusCode::CREATED, pretty(&body));
    r.headers_mut()
        .insert(LOCATION, HeaderValue::from_str(&location).expect("encoded path is a valid header"));
    r
}

fn id_param(raw: &str) -> Result<Iri, ApiError> {
    parse_iri(raw).map_err(ApiError::bad_request)
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed JSON: {e}")))
}

/// Like [`parse_json`], but an empty body means all defaults.
fn parse_optional_json<T: serde::de::DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        Ok(T::default())
    } else {
        parse_json(body)
    }
}

fn timestamp(at: Option<&str>) -> Result<Timestamp, ApiError> {
    match at {
        None => Ok(now()),
        Some(s) => parse_timestamp(s).ok_or_else(|| ApiError::bad_request(format!("`{s}` is not an xsd:dateTime with offset"))),
    }
}

fn lower_doc(doc: &ElicitationDoc, id: &Iri, previous: Option<Iri>) -> Result<Graph, ApiError> {
    elicitation::lower(doc, id, previous).map_err(|e| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        body: pretty(&json!({ "error": e.message, "path": e.path })),
    })
}

async fn list_procedures(State(s): State<AppState>) -> Response {
    let list: Vec<Value> = s.read(|store| {
        let g = store.graph();
        store
            .procedures()
            .into_iter()
            .map(|p| {
                let node = RdfTerm::Iri(p.clone());
                let title = g
                    .objects(&node, &dct::TITLE.iri())
                    .into_iter()
                    .find_map(|o| o.as_literal().map(|l| l.lexical().to_string()));
                let status = g
                    .objects(&node, &pko::HAS_PROCEDURE_STATUS.iri())
                    .into_iter()
                    .find_map(|o| o.as_iri().map(Iri::to_string));
                json!({ "id": p, "title": title, "status": status })
            })
            .collect()
    });
    json_response(StatusCode::OK, pretty(&Value::Array(list)))
}

async fn create_procedure(State(s): State<AppState>, body: Bytes) -> ApiResult {
    let doc: ElicitationDoc = parse_json(&body)?;
    let id = s.mint_procedure();
    let report = s.write(|store| {
        let previous = match &doc.procedure.version_of {
            Some(v) => store.latest_version(&id_param(v)?),
            None => None,
        };
        let mut candidate = store.graph().clone();
        candidate.merge(&lower_doc(&doc, &id, previous)?);
        store.commit(candidate).map_err(ApiError::from)
    })?;
    tracing::info!(procedure = %id, "created");
    Ok(created(format!("/procedures/{}", encode_id(&id)), json!({ "id": id, "report": report })))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Representation {
    Turtle,
    JsonLd,
    Elicitation,
}

/// Picks a representation from an `Accept` header, honouring `q` weights.
fn negotiate(accept: Option<&str>) -> Option<Representation> {
    let Some(accept) = accept else {
        return Some(Representation::Turtle);
    };
    let mut ranges: Vec<(f32, &str)> = accept
        .split(',')
        .map(|r| {
            let mut parts = r.split(';');
            let media = parts.next().unwrap_or("").trim();
            let q = parts
                .filter_map(|p| p.trim().strip_prefix("q="))
                .find_map(|q| q.parse::<f32>().ok())
                .unwrap_or(1.0);
            (q, media)
        })
        .filter(|(q, _)| *q > 0.0)
        .collect();
    ranges.sort_by(|a, b| b.0.total_cmp(&a.0));
    ranges.into_iter().find_map(|(_, media)| match media.to_ascii_lowercase().as_str() {
        "text/turtle" | "text/*" | "*/*" => Some(Representation::Turtle),
        "application/ld+json" | "application/*" => Some(Representation::JsonLd),
        "application/json" => Some(Representation::Elicitation),
        _ => None,
    })
}

async fn get_procedure(State(s): State<AppState>, Path(raw): Path<String>, headers: HeaderMap) -> ApiResult {
    let id = id_param(&raw)?;
    let accept = headers.get(ACCEPT).and_then(|v| v.to_str().ok());
    let repr = negotiate(accept).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_ACCEPTABLE,
            "supported: text/turtle, application/ld+json, application/json",
        )
    })?;
    s.read(|store| {
        if !store.is_procedure(&id) {
            return Err(ApiError::not_found(format!("no procedure <{id}>")));
        }
        let mut g = Graph::new();
        g.extend(procedure_triples(store.graph(), &id)).expect("triples come from a graph");
        let (media, body) = match repr {
            Representation::Turtle => ("text/turtle", write_turtle(&g, &default_prefixes())),
            Representation::JsonLd => ("application/ld+json", write_jsonld(&g, &default_prefixes())),
            Representation::Elicitation => {
                let doc = elicitation::lift(store.graph(), &id)
                    .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;
                ("application/json", pretty(&serde_json::to_value(doc).expect("document serializes")))
            }
        };
        Ok((StatusCode::OK, [(CONTENT_TYPE, media)], body).into_response())
    })
}

async fn replace_procedure(State(s): State<AppState>, Path(raw): Path<String>, body: Bytes) -> ApiResult {
    let id = id_param(&raw)?;
    let doc: ElicitationDoc = parse_json(&body)?;
    let report = s.write(|store| {
        if !store.is_procedure(&id) {
            return Err(ApiError::not_found(format!("no procedure <{id}>")));
        }
        // version links belong to the chain, not to this revision
        let keep = [pko::NEXT_VERSION.iri(), pko::PREVIOUS_VERSION.iri()];
        let mut candidate = store.graph().clone();
        for t in procedure_triples(store.graph(), &id) {
            if !t.predicate.as_iri().is_some_and(|p| keep.contains(p)) {
                candidate.remove(&t);
            }
        }
        candidate.merge(&lower_doc(&doc, &id, None)?);
        store.commit(candidate).map_err(ApiError::from)
    })?;
    tracing::info!(procedure = %id, "replaced");
    Ok(json_response(StatusCode::OK, pretty(&json!({ "id": id, "report": report }))))
}

async fn validate_body(State(_): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let media = headers.get(CONTENT_TYPE).and_then(|v| v.to_str().ok()).unwrap_or("text/turtle");
    let graph = if media.starts_with("application/n-triples") {
        ntriples::parse(text).map_err(|d| ApiError::diagnostics(&[d]))?
    } else {
        parse_turtle(text).map_err(|d| ApiError::diagnostics(&d))?.graph
    };
    let report = pk_forge::validate::validate(&graph, &pk_forge::validate::builtin_rules());
    Ok(json_response(StatusCode::OK, report.to_json()))
}

async fn list_queries() -> Response {
    let list: Vec<Value> = catalog()
        .queries()
        .iter()
        .map(|q| json!({ "id": q.id, "question": q.question, "parameters": q.parameters, "select": q.select }))
        .collect();
    json_response(StatusCode::OK, pretty(&Value::Array(list)))
}

async fn run_query(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<BTreeMap<String, String>>,
) -> ApiResult {
    let q = catalog().get(&id).map_err(ApiError::not_found)?;
    let mut bindings = Bindings::new();
    for (k, v) in params {
        bindings.insert(k, parse_term(&v).map_err(ApiError::bad_request)?);
    }
    let table = s.read(|store| run(store.graph(), q, &bindings)).map_err(|e| match e {
        QueryError::UnknownQuery(_) => ApiError::not_found(e),
        _ => ApiError::bad_request(e),
    })?;
    Ok(json_response(StatusCode::OK, table.to_json()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StartBody {
    procedure: String,
    agent: String,
    #[serde(default)]
    parallel_steps: bool,
    at: Option<String>,
}

async fn start_session(State(s): State<AppState>, body: Bytes) -> ApiResult {
    let b: StartBody = parse_json(&body)?;
    let procedure = id_param(&b.procedure)?;
    let agent = id_param(&b.agent)?;
    let at = timestamp(b.at.as_deref())?;
    let options = SessionOptions {
        parallel_steps: b.parallel_steps,
    };
    let session = s.read(|store| start_execution_with(store.graph(), &procedure, &agent, at, options))?;
    let id = session.id().clone();
    s.sessions(|m| m.insert(id.clone(), session));
    tracing::info!(execution = %id, "started");
    Ok(created(format!("/executions/{}", encode_id(&id)), json!({ "id": id })))
}

fn live<T>(s: &AppState, id: &Iri, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
    s.sessions(|m| match m.get_mut(id) {
        Some(session) => f(session),
        None => Err(ApiError::not_found(format!("no running execution <{id}>"))),
    })
}

fn step_json(se: &StepExecution) -> Value {
    json!({
        "id": se.id,
        "step": se.step,
        "agent": se.agent,
        "started_at": se.started_at.as_ref().map(format_timestamp),
        "ended_at": se.ended_at.as_ref().map(format_timestamp),
    })
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepBody {
    agent: Option<String>,
    at: Option<String>,
}

async fn step_event(
    State(s): State<AppState>,
    Path((raw, raw_step, action)): Path<(String, String, String)>,
    body: Bytes,
) -> ApiResult {
    let id = id_param(&raw)?;
    let step = id_param(&raw_step)?;
    let b: StepBody = parse_optional_json(&body)?;
    let at = timestamp(b.at.as_deref())?;
    let agent = b.agent.as_deref().map(id_param).transpose()?;
    let value = live(&s, &id, |session| {
        let se = match (action.as_str(), agent) {
            ("start", Some(a)) => session.start_step_as(&step, &a, at)?,
            ("start", None) => session.start_step(&step, at)?,
            ("end", None) => session.end_step(&step, at)?,
            ("end", Some(_)) => return Err(ApiError::bad_request("`agent` applies to start only")),
            (other, _) => return Err(ApiError::not_found(format!("unknown step action `{other}`"))),
        };
        Ok(step_json(se))
    })?;
    Ok(json_response(StatusCode::OK, pretty(&value)))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OccurrenceWire {
    Feedback {
        text: String,
        about: Option<String>,
    },
    Question {
        text: String,
        addressed_by: Option<String>,
    },
    Issue {
        error: String,
        cause: Option<String>,
        solution: Option<String>,
    },
}

#[derive(Deserialize)]
struct OccurrenceBody {
    #[serde(flatten)]
    kind: OccurrenceWire,
    agent: Option<String>,
    at: Option<String>,
}

async fn add_occurrence(State(s): State<AppState>, Path(raw): Path<String>, body: Bytes) -> ApiResult {
    let id = id_param(&raw)?;
    let b: OccurrenceBody = parse_json(&body)?;
    let at = timestamp(b.at.as_deref())?;
    let agent = b.agent.as_deref().map(id_param).transpose()?;
    let occurrence_id = live(&s, &id, |session| {
        let kind = match b.kind {
            OccurrenceWire::Feedback { text, about } => OccurrenceKind::Feedback {
                text,
                about: match about {
                    Some(a) => id_param(&a)?,
                    None => session.trace().procedure.clone(),
                },
            },
            OccurrenceWire::Question { text, addressed_by } => OccurrenceKind::Question {
                text,
                addressed_by: addressed_by.as_deref().map(id_param).transpose()?,
            },
            OccurrenceWire::Issue { error, cause, solution } => OccurrenceKind::Issue {
                error: id_param(&error)?,
                cause,
                solution,
            },
        };
        Ok(session.record_occurrence(kind, agent.as_ref(), at)?.id.clone())
    })?;
    Ok(created(
        format!("/executions/{}/occurrences/{}", encode_id(&id), encode_id(&occurrence_id)),
        json!({ "id": occurrence_id }),
    ))
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinishBody {
    status: Option<String>,
    at: Option<String>,
}

async fn finish_session(State(s): State<AppState>, Path(raw): Path<String>, body: Bytes) -> ApiResult {
    let id = id_param(&raw)?;
    let b: FinishBody = parse_optional_json(&body)?;
    let status = match &b.status {
        Some(st) => id_param(st)?,
        None => pko::COMPLETED.iri(),
    };
    let at = timestamp(b.at.as_deref())?;
    // finish a copy so that a rejected trace leaves the session open
    let mut session = live(&s, &id, |session| Ok(session.clone()))?;
    let trace = session.finish(&status, at)?;
    let report = s.write(|store| {
        let mut candidate = store.graph().clone();
        candidate.merge(&lower_execution(&trace));
        store.commit(candidate)
    })?;
    s.sessions(|m| m.remove(&id));
    tracing::info!(execution = %id, status = %status, "finished");
    Ok(json_response(StatusCode::OK, pretty(&json!({ "id": id, "status": status, "report": report }))))
}

async fn session_report(State(s): State<AppState>, Path(raw): Path<String>) -> ApiResult {
    let id = id_param(&raw)?;
    let running = s.sessions(|m| m.get(&id).map(|session| session.trace().clone()));
    s.read(|store| {
        let trace = match running {
            Some(t) => t,
            None => {
                let node = RdfTerm::Iri(id.clone());
                let typed = store.graph().contains(&Triple::new(
                    node,
                    pk_forge::vocab::rdf::TYPE.iri(),
                    pko::PROCEDURE_EXECUTION.iri(),
                ));
                if !typed {
                    return Err(ApiError::not_found(format!("no execution <{id}>")));
                }
                lift_execution(store.graph(), &id).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?
            }
        };
        Ok(json_response(StatusCode::OK, overrun_report(&trace, store.graph()).to_json()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accept_negotiation() {
        use Representation::*;
        assert!(negotiate(None) == Some(Turtle));
        assert!(negotiate(Some("application/json")) == Some(Elicitation));
        assert!(negotiate(Some("text/turtle;q=0.5, application/ld+json")) == Some(JsonLd));
        assert!(negotiate(Some("application/json;q=0.9, text/turtle;q=0.1")) == Some(Elicitation));
        assert!(negotiate(Some("*/*")) == Some(Turtle));
        assert!(negotiate(Some("image/png")).is_none());
        assert!(negotiate(Some("text/turtle;q=0")).is_none());
    }
}
