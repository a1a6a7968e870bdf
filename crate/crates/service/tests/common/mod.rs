#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use factor_forge::kb::trade_secrets;
use factor_forge_service::{router, AppState};

pub const SCHEMA: &str = include_str!("../../../../schema/api.schema.json");

pub fn app() -> (Arc<AppState>, Router) {
    let state = AppState::new(trade_secrets());
    let app = router(state.clone());
    (state, app)
}

/// Sends one request and returns the status with the parsed body (`Null` when empty).
pub async fn call(app: &Router, method: Method, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Method::GET, uri, None).await
}

pub async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(body)).await
}

/// Validates `value` against one definition of the published schema bundle.
pub fn conforms(def: &str, value: &Value) {
    let errors = violations(def, value);
    assert!(errors.is_empty(), "{def}: {errors:#?}\n{value:#}");
}

pub fn violations(def: &str, value: &Value) -> Vec<String> {
    let bundle: Value = serde_json::from_str(SCHEMA).unwrap();
    let schema = serde_json::json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$ref": format!("#/$defs/{def}"),
        "$defs": bundle["$defs"],
    });
    let validator = jsonschema::validator_for(&schema).unwrap();
    validator.iter_errors(value).map(|e| format!("{e} at {}", e.instance_path())).collect()
}
