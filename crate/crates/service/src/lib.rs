//! HTTP/JSON service for refereed human-versus-engine Muller play.
//!
//! Sessions live in memory and are evicted after a period without requests.

pub mod session;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use muller_core::corpus;
use muller_core::finite_time::StoppingRule;
use muller_core::gamefile::GameFile;
use muller_core::strategy::StrategyName;
use muller_core::{Player, VertexId, VertexSet};

pub use session::{Session, SessionConfig, SessionError, Status, Verdict};

pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    corpus: Vec<(String, GameFile)>,
    ttl: Duration,
}

impl AppState {
    pub fn new(ttl: Duration) -> Self {
        AppState { sessions: RwLock::default(), corpus: corpus::bundled(), ttl }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    /// Drops sessions idle for longer than the TTL as of `now`; returns how many went.
    pub fn evict_expired(&self, now: Instant) -> usize {
        let mut map = self.sessions.write().unwrap();
        let before = map.len();
        map.retain(|_, s| now.saturating_duration_since(s.lock().unwrap().touched) <= self.ttl);
        before - map.len()
    }

    fn insert(&self, s: Session) -> String {
        let mut map = self.sessions.write().unwrap();
        let id = loop {
            let id = format!("{:016x}", rand::random::<u64>());
            if !map.contains_key(&id) {
                break id;
            }
        };
        map.insert(id.clone(), Arc::new(Mutex::new(s)));
        id
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let s = self.sessions.read().unwrap().get(id).cloned();
        s.ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}")))
    }
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub error: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, error, message: message.into() }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::NotYourTurn
            | SessionError::NotEngineTurn
            | SessionError::Finished
            | SessionError::OffDomain(_) => StatusCode::CONFLICT,
            SessionError::Scoring(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RuleRequest {
    Uniform { k: u32 },
    Mcnaughton,
    None,
}

impl From<RuleRequest> for StoppingRule {
    fn from(r: RuleRequest) -> Self {
        match r {
            RuleRequest::Uniform { k } => StoppingRule::Uniform(k),
            RuleRequest::Mcnaughton => StoppingRule::McNaughton,
            RuleRequest::None => StoppingRule::None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateRequest {
    /// Name of a bundled game; ignored when `game` is given.
    pub corpus: Option<String>,
    /// Game in the text format.
    pub game: Option<String>,
    pub rule: Option<RuleRequest>,
    pub human_player: u8,
    pub engine_strategy: String,
    pub start: Option<VertexId>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MoveRequest {
    pub to: VertexId,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArenaView {
    pub vertices: usize,
    pub owners: Vec<u8>,
    pub edges: Vec<(VertexId, VertexId)>,
    pub names: Vec<Option<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainEntryView {
    pub set: VertexSet,
    pub score: u32,
    pub accumulator: VertexSet,
    pub owner: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleView {
    pub kind: &'static str,
    /// Threshold per set size, keyed by the size.
    pub thresholds: BTreeMap<usize, u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictView {
    pub winner: u8,
    pub set: VertexSet,
    pub step: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub id: String,
    pub status: &'static str,
    pub human_player: u8,
    pub engine_strategy: StrategyName,
    pub side_to_move: Option<u8>,
    pub current_vertex: VertexId,
    pub history: Vec<VertexId>,
    pub legal_moves: Vec<VertexId>,
    pub chain: Vec<ChainEntryView>,
    pub rule: RuleView,
    pub verdict: Option<VerdictView>,
    pub warning: Option<String>,
    pub arena: ArenaView,
}

fn player_index(p: Player) -> u8 {
    p.index() as u8
}

pub fn view(id: &str, s: &Session) -> SessionView {
    let status = s.status();
    let a = &s.arena;
    SessionView {
        id: id.to_string(),
        status: status.as_str(),
        human_player: player_index(s.human),
        engine_strategy: s.engine_name,
        side_to_move: (status != Status::Finished).then(|| player_index(s.side_to_move())),
        current_vertex: s.current(),
        history: s.history().to_vec(),
        legal_moves: if status == Status::AwaitingHuman { a.successors(s.current()).to_vec() } else { Vec::new() },
        chain: s
            .chain()
            .entries()
            .iter()
            .map(|e| ChainEntryView {
                set: e.set,
                score: e.score,
                accumulator: e.accumulator,
                owner: player_index(s.condition.owner_of(e.set)),
            })
            .collect(),
        rule: RuleView {
            kind: match s.rule {
                StoppingRule::Uniform(_) => "uniform",
                StoppingRule::McNaughton => "mcnaughton",
                StoppingRule::None => "none",
            },
            thresholds: if s.rule == StoppingRule::None { BTreeMap::new() } else { s.thresholds().into_iter().collect() },
        },
        verdict: s.verdict().map(|v| VerdictView { winner: player_index(v.winner), set: v.set, step: v.step }),
        warning: s.warning.clone(),
        arena: ArenaView {
            vertices: a.vertex_count(),
            owners: (0..a.vertex_count()).map(|v| player_index(a.owner(v))).collect(),
            edges: (0..a.vertex_count()).flat_map(|v| a.successors(v).iter().map(move |&w| (v, w))).collect(),
            names: a.names().to_vec(),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HintView {
    pub vertex: VertexId,
    pub strategy: StrategyName,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    pub vertices: usize,
    pub start: Option<VertexId>,
    pub text: String,
}

type Shared = Arc<AppState>;

async fn create(State(app): State<Shared>, Json(req): Json<CreateRequest>) -> Result<impl IntoResponse, ApiError> {
    let bad = |code, msg: String| ApiError::new(StatusCode::BAD_REQUEST, code, msg);
    let game = match (&req.game, &req.corpus) {
        (Some(text), _) => GameFile::parse(text).map_err(|e| bad("ParseError", e.to_string()))?,
        (None, Some(name)) => app
            .corpus
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g.clone())
            .ok_or_else(|| bad("UnknownGame", format!("no bundled game {name}")))?,
        (None, None) => return Err(bad("MissingGame", "give either game or corpus".into())),
    };
    let human = Player::from_index(req.human_player as usize)
        .ok_or_else(|| bad("InvalidPlayer", format!("player {} does not exist", req.human_player)))?;
    let engine = req.engine_strategy.parse::<StrategyName>().map_err(|e| ApiError::from(SessionError::from(e)))?;
    let cfg = SessionConfig {
        rule: req.rule.map_or(StoppingRule::Uniform(3), Into::into),
        human,
        engine,
        start: req.start.or(game.start).unwrap_or(0),
        seed: req.seed,
    };
    let session = Session::new(&game, cfg)?;
    let id = app.insert(session);
    let s = app.get(&id)?;
    let v = view(&id, &s.lock().unwrap());
    Ok((StatusCode::CREATED, Json(v)))
}

fn with_session<T>(
    app: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session) -> Result<T, SessionError>,
) -> Result<(T, SessionView), ApiError> {
    let s = app.get(id)?;
    let mut s = s.lock().unwrap();
    s.touched = Instant::now();
    let out = f(&mut s)?;
    Ok((out, view(id, &s)))
}

async fn show(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    with_session(&app, &id, |_| Ok(())).map(|(_, v)| Json(v))
}

async fn human_move(
    State(app): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<SessionView>, ApiError> {
    with_session(&app, &id, |s| s.human_move(req.to)).map(|(_, v)| Json(v))
}

async fn engine_step(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    with_session(&app, &id, |s| s.engine_step()).map(|(_, v)| Json(v))
}

async fn hint(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<HintView>, ApiError> {
    with_session(&app, &id, |s| s.hint()).map(|((vertex, strategy), _)| Json(HintView { vertex, strategy }))
}

async fn list_corpus(State(app): State<Shared>) -> Json<Vec<CorpusEntry>> {
    Json(
        app.corpus
            .iter()
            .map(|(name, g)| CorpusEntry {
                name: name.clone(),
                vertices: g.arena.vertex_count(),
                start: g.start,
                text: g.to_text(),
            })
            .collect(),
    )
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/games", post(create))
        .route("/games/{id}", get(show))
        .route("/games/{id}/move", post(human_move))
        .route("/games/{id}/engine-step", post(engine_step))
        .route("/games/{id}/hint", get(hint))
        .route("/corpus", get(list_corpus))
        .with_state(app)
}

/// Serves until the process is stopped, sweeping idle sessions once a minute.
pub async fn serve(addr: SocketAddr, ttl: Duration) -> std::io::Result<()> {
    let app = Arc::new(AppState::new(ttl));
    let sweeper = Arc::clone(&app);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired(Instant::now());
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app)).await
}
