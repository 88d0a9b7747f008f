//! A dose-finding session driven through the HTTP API in-process: create,
//! report outcomes, read the posterior, export and replay.
//!
//! ```text
//! cargo run -p bsa-service --example live_session
//! ```
//!
//! The same requests work against `bsa serve` with any HTTP client.

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use bsa::numerics::SeededRng;
use bsa_service::http::router;
use bsa_service::{replay, Store, Transcript};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    println!("{method} {uri} -> {status}");
    v
}

#[tokio::main]
async fn main() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(Store::open(dir.path()).unwrap()));

    let rec = call(&app, "POST", "/sessions", Some(json!({"alpha": 0.3, "domain": {"lo": 0.0, "hi": 200.0}}))).await;
    let id = rec["id"].as_str().unwrap().to_string();
    let mut next = rec["recommendation"]["next"][0].as_f64().unwrap();

    // A patient at dose x responds with probability 1 / (1 + exp(-(x - 90) / 15)).
    let mut rng = SeededRng::new(7);
    for step in 1..=15 {
        let y = rng.bernoulli(1.0 / (1.0 + (-(next - 90.0) / 15.0).exp()));
        let r = call(&app, "POST", &format!("/sessions/{id}/outcomes"), Some(json!({"step": step, "y": y}))).await;
        next = r["next"][0].as_f64().unwrap();
        let (lo, hi) = (r["interval"][0].as_f64().unwrap(), r["interval"][1].as_f64().unwrap());
        println!("  dose {step:>2} gave y = {y}; next dose {next:.2}, 90% interval ({lo:.2}, {hi:.2})");
    }

    let post = call(&app, "GET", &format!("/sessions/{id}/posterior?points=8"), None).await;
    println!("  local posterior on ({}, {}): density {}", post["v0"], post["v1"], post["density"]);

    // Posting the same step again is a conflict.
    let stale = call(&app, "POST", &format!("/sessions/{id}/outcomes"), Some(json!({"step": 3, "y": 1}))).await;
    println!("  {}", stale["message"]);

    call(&app, "POST", &format!("/sessions/{id}/close"), None).await;
    let t: Transcript = serde_json::from_value(call(&app, "GET", &format!("/sessions/{id}/export"), None).await).unwrap();
    let report = replay(&t).unwrap();
    println!("replayed {} steps, identical: {}", report.steps, report.matches());
}
