//! One participant through the HTTP API, in process.
//!
//! ```bash
//! cargo run -p instlab --example serve_session
//! ```
//!
//! `instlab serve` runs the same router on a socket.

use axum::body::{to_bytes, Body};
use axum::http::Request;
use instlab::features::generate_space;
use instlab::platform::{http, PlatformConfig, Service};
use serde_json::{json, Value};
use std::sync::{Arc, Mutex};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    let v: Value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    assert!(status.is_success(), "{method} {uri}: {status} {v}");
    v
}

#[tokio::main]
async fn main() {
    let config = PlatformConfig::default();
    let space = generate_space(&config.space_config()).unwrap();
    let (service, _) = Service::in_memory(space, config).unwrap();
    let app = http::router(Arc::new(Mutex::new(service)));

    let id = call(&app, "POST", "/api/session", None).await["session_id"].as_str().unwrap().to_string();
    let base = format!("/api/session/{id}");
    loop {
        let view = call(&app, "GET", &format!("{base}/state"), None).await;
        match view["stage"].as_str().unwrap() {
            "tutorial" | "quiz" => drop(call(&app, "POST", &format!("{base}/action"), Some(json!({"kind": "continue"}))).await),
            "choice" => drop(call(&app, "POST", &format!("{base}/preference"), Some(json!({"option": 0}))).await),
            "survey" => drop(call(&app, "POST", &format!("{base}/survey"), Some(json!({"comments": "none"}))).await),
            "done" => break,
            stage => {
                let body = json!({"kind": "move", "action": 1, "round": view["round"]});
                let out = call(&app, "POST", &format!("{base}/action"), Some(body)).await;
                println!("{stage} round {}: {}", view["round"], out["result"]);
            }
        }
    }
    let trials = call(&app, "GET", "/api/admin/export/summary", None).await;
    println!("sessions by stage: {}", trials["by_stage"]);
}
