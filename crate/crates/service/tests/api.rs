use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use muller_core::corpus;
use muller_core::engine::{referee_play, RefereeConfig, Verdict};
use muller_core::finite_time::StoppingRule;
use muller_core::scoring::definition;
use muller_core::strategy::Scripted;
use muller_core::{Player, VertexId, VertexSet};
use muller_service::{router, AppState, DEFAULT_TTL};

struct Client {
    app: Arc<AppState>,
}

impl Client {
    fn new() -> Self {
        Client { app: Arc::new(AppState::new(DEFAULT_TTL)) }
    }

    async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let req = Request::builder().method(method).uri(uri);
        let req = match body {
            Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = router(Arc::clone(&self.app)).oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn create(&self, body: Value) -> (StatusCode, Value) {
        self.call("POST", "/games", Some(body)).await
    }
}

fn fig1_body(rule: Value) -> Value {
    json!({ "corpus": "fig1", "humanPlayer": 1, "engineStrategy": "sigma-star", "start": 1, "rule": rule })
}

fn set(v: &Value) -> VertexSet {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as VertexId).collect()
}

fn history(v: &Value) -> Vec<VertexId> {
    v["history"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as VertexId).collect()
}

/// The chain payload agrees with the definitional scores of the history.
fn check_chain(v: &Value) {
    let h = history(v);
    let entries = v["chain"].as_array().unwrap();
    let sets: Vec<VertexSet> = entries.iter().map(|e| set(&e["set"])).collect();
    assert_eq!(sets, definition::suffix_occurrence_sets(&h));
    for e in entries {
        let f = set(&e["set"]);
        assert_eq!(e["score"].as_u64().unwrap() as u32, definition::score(f, &h));
        assert_eq!(set(&e["accumulator"]), definition::accumulator(f, &h));
    }
}

#[tokio::test]
async fn create_fig1_session() {
    let c = Client::new();
    let (status, v) = c.create(fig1_body(json!({"kind": "uniform", "k": 3}))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["status"], "awaiting-engine");
    assert_eq!(v["humanPlayer"], 1);
    assert_eq!(v["sideToMove"], 0);
    assert_eq!(v["currentVertex"], 1);
    assert_eq!(v["history"], json!([1]));
    assert_eq!(v["chain"], json!([{ "set": [1], "score": 1, "accumulator": [], "owner": 1 }]));
    assert_eq!(v["rule"], json!({ "kind": "uniform", "thresholds": { "1": 3, "2": 3, "3": 3 } }));
    assert_eq!(v["verdict"], Value::Null);
    assert_eq!(v["arena"]["owners"], json!([1, 0, 1]));
    assert_eq!(v["arena"]["edges"], json!([[0, 0], [0, 1], [1, 0], [1, 2], [2, 1], [2, 2]]));
}

#[tokio::test]
async fn mcnaughton_thresholds() {
    let c = Client::new();
    let (_, v) = c.create(fig1_body(json!({"kind": "mcnaughton"}))).await;
    assert_eq!(v["rule"], json!({ "kind": "mcnaughton", "thresholds": { "1": 2, "2": 3, "3": 7 } }));
}

#[tokio::test]
async fn creation_errors() {
    let c = Client::new();
    let mut body = fig1_body(json!({"kind": "uniform", "k": 3}));
    body["start"] = json!(7);
    let (status, v) = c.create(body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "InvalidStart");

    let mut body = fig1_body(json!({"kind": "uniform", "k": 3}));
    body["engineStrategy"] = json!("alpha-beta");
    assert_eq!(c.create(body).await.1["error"], "UnknownStrategy");

    let mut body = fig1_body(json!({"kind": "uniform", "k": 1}));
    body["engineStrategy"] = json!("first");
    assert_eq!(c.create(body).await.1["error"], "InvalidRule");

    let body = json!({ "game": "muller 2;\n0 0 1;\n1 1 ;\nF0: {0};\n", "humanPlayer": 0, "engineStrategy": "first" });
    assert_eq!(c.create(body).await.1["error"], "ParseError");

    assert_eq!(c.call("GET", "/games/nope", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn engine_start_outside_region_warns() {
    let c = Client::new();
    // Player 1 wins nowhere on the example, so tau-star has no region at all
    let body = json!({ "corpus": "fig1", "humanPlayer": 0, "engineStrategy": "tau-star", "start": 1 });
    let (status, v) = c.create(body).await;
    assert_eq!(status, StatusCode::CREATED);
    assert!(v["warning"].is_string());
}

#[tokio::test]
async fn turn_order_and_illegal_moves() {
    let c = Client::new();
    let (_, v) = c.create(fig1_body(json!({"kind": "uniform", "k": 3}))).await;
    let id = v["id"].as_str().unwrap().to_string();
    let (status, e) = c.call("POST", &format!("/games/{id}/move"), Some(json!({"to": 0}))).await;
    assert_eq!((status, e["error"].as_str()), (StatusCode::CONFLICT, Some("NotYourTurn")));

    let (status, v) = c.call("POST", &format!("/games/{id}/engine-step"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "awaiting-human");
    assert_eq!(history(&v).len(), 2);
    let (status, e) = c.call("POST", &format!("/games/{id}/engine-step"), None).await;
    assert_eq!((status, e["error"].as_str()), (StatusCode::CONFLICT, Some("NotEngineTurn")));

    let here = v["currentVertex"].as_u64().unwrap() as VertexId;
    let missing = (0..3).find(|&w| !v["legalMoves"].as_array().unwrap().contains(&json!(w)));
    if let Some(w) = missing {
        let (status, e) = c.call("POST", &format!("/games/{id}/move"), Some(json!({"to": w}))).await;
        assert_eq!((status, e["error"].as_str()), (StatusCode::BAD_REQUEST, Some("IllegalMove")));
        let (_, after) = c.call("GET", &format!("/games/{id}"), None).await;
        assert_eq!(after, v);
    }
    let (status, e) = c.call("POST", &format!("/games/{id}/move"), Some(json!({"to": 9}))).await;
    assert_eq!((status, e["error"].as_str()), (StatusCode::BAD_REQUEST, Some("IllegalMove")));
    assert_eq!(here, c.call("GET", &format!("/games/{id}"), None).await.1["currentVertex"]);
}

/// Plays to the end, checking every snapshot and replaying the result through the referee.
async fn play_out(c: &Client, body: Value, pick: impl Fn(&[VertexId], usize) -> VertexId) -> Value {
    let (_, mut v) = c.create(body).await;
    let id = v["id"].as_str().unwrap().to_string();
    let mut turn = 0;
    while v["status"] != "finished" {
        check_chain(&v);
        let before = history(&v).len();
        v = if v["status"] == "awaiting-engine" {
            c.call("POST", &format!("/games/{id}/engine-step"), None).await.1
        } else {
            let moves: Vec<VertexId> =
                v["legalMoves"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as VertexId).collect();
            let (status, hint) = c.call("GET", &format!("/games/{id}/hint"), None).await;
            if status == StatusCode::OK {
                assert!(moves.contains(&(hint["vertex"].as_u64().unwrap() as VertexId)));
            } else {
                assert_eq!(hint["error"], "StrategyOffDomain");
            }
            c.call("POST", &format!("/games/{id}/move"), Some(json!({"to": pick(&moves, turn)}))).await.1
        };
        assert_eq!(history(&v).len(), before + 1, "{v}");
        turn += 1;
        assert!(turn < 200);
    }
    check_chain(&v);
    v
}

fn replay(v: &Value) -> Verdict {
    let g = corpus::fig1();
    let h = history(v);
    let s0 = Scripted { player: Player::Zero, word: h.clone() };
    let s1 = Scripted { player: Player::One, word: h.clone() };
    let rule = match v["rule"]["kind"].as_str().unwrap() {
        "mcnaughton" => StoppingRule::McNaughton,
        _ => StoppingRule::Uniform(3),
    };
    referee_play(&g.arena, &g.condition, RefereeConfig::new(rule, 1000), &h, &s0, &s1).unwrap().verdict
}

#[tokio::test]
async fn finished_verdicts_are_reproducible() {
    let c = Client::new();
    for (rule, seed) in [(json!({"kind": "uniform", "k": 3}), 0usize), (json!({"kind": "mcnaughton"}), 1), (json!({"kind": "uniform", "k": 3}), 2)] {
        let v = play_out(&c, fig1_body(rule), |moves, turn| moves[(turn * 7 + seed) % moves.len()]).await;
        let verdict = &v["verdict"];
        // sigma-star keeps Player 1's sets below the threshold, so Player 0 wins
        assert_eq!(verdict["winner"], 0);
        assert_eq!(
            replay(&v),
            Verdict::Stopped {
                winner: Player::Zero,
                set: set(&verdict["set"]),
                step: verdict["step"].as_u64().unwrap() as usize
            }
        );
        assert_eq!(verdict["step"].as_u64().unwrap() as usize, history(&v).len());
        assert_eq!(v["sideToMove"], Value::Null);
        let id = v["id"].as_str().unwrap();
        let (status, e) = c.call("POST", &format!("/games/{id}/engine-step"), None).await;
        assert_eq!((status, e["error"].as_str()), (StatusCode::CONFLICT, Some("Finished")));
    }
}

#[tokio::test]
async fn human_driven_play_is_refereed() {
    let c = Client::new();
    let body = json!({ "corpus": "fig1", "humanPlayer": 1, "engineStrategy": "first", "start": 1 });
    let v = play_out(&c, body, |moves, _| *moves.last().unwrap()).await;
    assert_eq!(replay(&v), {
        let s = &v["verdict"];
        Verdict::Stopped {
            winner: if s["winner"] == 0 { Player::Zero } else { Player::One },
            set: set(&s["set"]),
            step: s["step"].as_u64().unwrap() as usize,
        }
    });
}

#[tokio::test]
async fn hints_follow_the_strategies() {
    let c = Client::new();
    let (_, v) = c.create(fig1_body(json!({"kind": "uniform", "k": 3}))).await;
    let id = v["id"].as_str().unwrap().to_string();
    let (status, hint) = c.call("GET", &format!("/games/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(hint["strategy"], "sigma-star");
    let (_, v) = c.call("POST", &format!("/games/{id}/engine-step"), None).await;
    assert_eq!(Some(hint["vertex"].as_u64().unwrap()), history(&v).last().map(|&x| x as u64));
    // the human (Player 1) wins nowhere, so there is nothing to suggest
    let (status, e) = c.call("GET", &format!("/games/{id}/hint"), None).await;
    assert_eq!((status, e["error"].as_str()), (StatusCode::CONFLICT, Some("StrategyOffDomain")));
}

#[tokio::test]
async fn sessions_are_isolated() {
    let c = Client::new();
    let (_, a) = c.create(fig1_body(json!({"kind": "uniform", "k": 3}))).await;
    let body = json!({ "corpus": "g3", "humanPlayer": 1, "engineStrategy": "naive" });
    let (_, b) = c.create(body).await;
    let (ida, idb) = (a["id"].as_str().unwrap().to_string(), b["id"].as_str().unwrap().to_string());
    assert_ne!(ida, idb);
    for _ in 0..3 {
        c.call("POST", &format!("/games/{idb}/engine-step"), None).await;
    }
    let (_, a2) = c.call("GET", &format!("/games/{ida}"), None).await;
    assert_eq!(a2, a);
    let (_, b2) = c.call("GET", &format!("/games/{idb}"), None).await;
    assert_eq!(history(&b2), vec![0, 3, 2, 1]);
    assert_eq!(c.app.session_count(), 2);
}

#[tokio::test]
async fn idle_sessions_are_evicted() {
    let c = Client { app: Arc::new(AppState::new(Duration::from_secs(60))) };
    c.create(fig1_body(json!({"kind": "uniform", "k": 3}))).await;
    assert_eq!(c.app.evict_expired(Instant::now()), 0);
    assert_eq!(c.app.evict_expired(Instant::now() + Duration::from_secs(61)), 1);
    assert_eq!(c.app.session_count(), 0);
}

#[tokio::test]
async fn corpus_listing() {
    let c = Client::new();
    let (status, v) = c.call("GET", "/corpus", None).await;
    assert_eq!(status, StatusCode::OK);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 26);
    assert_eq!(list[0]["name"], "fig1");
    assert_eq!(list[0]["start"], 1);
}
