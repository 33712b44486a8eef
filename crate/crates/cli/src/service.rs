//! HTTP sessions in which a human plays one seat against a learning bot.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use teachlab::analysis::{mixed_nash_2x2, pure_nash, stackelberg};
use teachlab::exact::{self, Q};
use teachlab::experiments::fixtures;
use teachlab::heuristics::{HeuristicSpec, HeuristicState};
use teachlab::{ActionProfile, Game, Player};
use uuid::Uuid;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("unknown session")]
    NotFound,
    #[error("session is closed")]
    Closed,
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::NotFound => StatusCode::NOT_FOUND,
            ApiError::Closed => StatusCode::CONFLICT,
            ApiError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

/// Reference values for the human's seat, straight from the solvers.
#[derive(Clone, Debug)]
pub struct Reference {
    pub nash_payoff: Option<Q>,
    pub stackelberg_value: Q,
}

impl Reference {
    /// The Nash payoff is taken at a pure equilibrium, preferring one on the
    /// diagonal of a square game, else the first in row-major order; a 2x2
    /// game without one uses its mixed equilibrium.
    pub fn of(g: &Game, human: Player) -> Self {
        let nash = pure_nash(g);
        let pick = nash.iter().find(|p| g.shape().0 == g.shape().1 && p.row == p.col).or(nash.first());
        let nash_payoff = match pick {
            Some(&p) => Some(g.payoff(human, p).clone()),
            None => mixed_nash_2x2(g)
                .ok()
                .and_then(|eqs| eqs.first().and_then(|m| g.expected_payoff(m).ok()))
                .map(|(r, c)| if human == Player::Row { r } else { c }),
        };
        Reference { nash_payoff, stackelberg_value: stackelberg(g, human).value }
    }

    fn to_json(&self) -> Value {
        json!({
            "nash_payoff": self.nash_payoff.as_ref().map_or(Value::Null, exact::to_json_number),
            "stackelberg_value": exact::to_json_number(&self.stackelberg_value),
        })
    }
}

pub struct Session {
    id: Uuid,
    game: Arc<Game>,
    bot_spec: HeuristicSpec,
    bot: HeuristicState,
    human: Player,
    seed: u64,
    rng: ChaCha8Rng,
    history: Vec<ActionProfile>,
    totals: (Q, Q),
    closed: bool,
    reference: Reference,
}

fn pair(a: &Q, b: &Q) -> Value {
    json!({ "row": exact::to_json_number(a), "col": exact::to_json_number(b) })
}

impl Session {
    pub fn new(id: Uuid, game: Game, bot_spec: HeuristicSpec, human: Player, seed: u64) -> Result<Self, ApiError> {
        let bot = HeuristicState::for_seat(&bot_spec, &game, human.other()).map_err(|e| ApiError::Invalid(e.to_string()))?;
        let reference = Reference::of(&game, human);
        Ok(Session {
            id,
            game: Arc::new(game),
            bot_spec,
            bot,
            human,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            history: Vec::new(),
            totals: (Q::default(), Q::default()),
            closed: false,
            reference,
        })
    }

    fn running_means(&self) -> Value {
        if self.history.is_empty() {
            return json!({ "row": null, "col": null });
        }
        let t = Q::from_integer((self.history.len() as i64).into());
        pair(&(&self.totals.0 / &t), &(&self.totals.1 / &t))
    }

    /// Resolves an action given by index or label for the human's seat.
    fn human_action(&self, v: &Value) -> Result<usize, ApiError> {
        let n = self.game.num_actions(self.human);
        let idx = match v {
            Value::Number(x) => x.as_u64().map(|i| i as usize),
            Value::String(s) => self.game.action_index(self.human, s),
            _ => None,
        };
        idx.filter(|&i| i < n).ok_or_else(|| ApiError::Invalid(format!("invalid action {v} for {} actions", n)))
    }

    /// Plays one period. The bot draws from what it has seen before this
    /// period, then both actions are revealed.
    pub fn play(&mut self, human_action: usize) -> Value {
        let bot_action = self.bot.step().sample(&mut self.rng);
        let profile = ActionProfile::from_view(self.human, human_action, bot_action);
        self.bot.observe(profile);
        self.history.push(profile);
        let (r, c) = self.game.payoff_pair(profile);
        self.totals.0 += &r;
        self.totals.1 += &c;
        json!({
            "t": self.history.len() - 1,
            "human_action": self.game.label(self.human, human_action),
            "bot_action": self.game.label(self.human.other(), bot_action),
            "bot_action_index": bot_action,
            "payoffs": pair(&r, &c),
            "running_means": self.running_means(),
            "reference": self.reference.to_json(),
        })
    }

    pub fn state(&self) -> Value {
        let g = &self.game;
        let history: Vec<Value> = self
            .history
            .iter()
            .enumerate()
            .map(|(t, &p)| {
                let (r, c) = g.payoff_pair(p);
                json!({
                    "t": t,
                    "row": g.label(Player::Row, p.row),
                    "col": g.label(Player::Col, p.col),
                    "payoffs": pair(&r, &c),
                })
            })
            .collect();
        let nash: Vec<Value> =
            pure_nash(g).iter().map(|p| json!([g.label(Player::Row, p.row), g.label(Player::Col, p.col)])).collect();
        json!({
            "id": self.id,
            "status": if self.closed { "closed" } else { "active" },
            "human_side": self.human,
            "bot_spec": self.bot_spec,
            "seed": self.seed,
            "t": self.history.len(),
            "game": g.to_json_value(),
            "history": history,
            "running_means": self.running_means(),
            "reference": self.reference.to_json(),
            "pure_nash": nash,
        })
    }
}

pub struct AppState {
    sessions: Mutex<HashMap<Uuid, Arc<Mutex<Session>>>>,
    default_seed: u64,
    persist: Option<PathBuf>,
}

impl AppState {
    pub fn new(default_seed: u64, persist: Option<PathBuf>) -> Self {
        AppState { sessions: Mutex::new(HashMap::new()), default_seed, persist }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let id = Uuid::parse_str(id).map_err(|_| ApiError::NotFound)?;
        self.sessions.lock().expect("session table").get(&id).cloned().ok_or(ApiError::NotFound)
    }

    /// Appends one event to the session's JSON-lines log when persistence is on.
    fn log(&self, id: Uuid, event: Value) -> Result<(), ApiError> {
        let Some(dir) = &self.persist else { return Ok(()) };
        let io = |e: std::io::Error| ApiError::Internal(format!("persistence: {e}"));
        fs::create_dir_all(dir).map_err(io)?;
        let mut f = OpenOptions::new().create(true).append(true).open(dir.join(format!("{id}.jsonl"))).map_err(io)?;
        writeln!(f, "{event}").map_err(io)
    }
}

#[derive(Deserialize)]
struct CreateRequest {
    #[serde(default)]
    game: Option<Value>,
    #[serde(default)]
    fixture: Option<String>,
    bot_spec: Value,
    human_side: Player,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
struct MoveRequest {
    action: Value,
}

fn parse<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::Invalid(format!("bad request body: {e}")))
}

fn parse_spec(v: &Value) -> Result<HeuristicSpec, ApiError> {
    let spec = match v {
        Value::String(s) => s.parse(),
        other => serde_json::from_value(other.clone()).map_err(|e| teachlab::heuristics::HeuristicError::UnknownKind(e.to_string())),
    };
    spec.map_err(|e| ApiError::Invalid(e.to_string()))
}

async fn create(State(app): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req: CreateRequest = parse(&body)?;
    let game = match (&req.game, &req.fixture) {
        (Some(doc), None) => Game::from_json_value(doc).map_err(|e| ApiError::Invalid(e.to_string()))?,
        (None, Some(name)) => fixtures::by_name(name).ok_or_else(|| ApiError::Invalid(format!("unknown fixture {name:?}")))?,
        _ => return Err(ApiError::Invalid("give exactly one of game or fixture".into())),
    };
    let spec = parse_spec(&req.bot_spec)?;
    let seed = req.seed.unwrap_or(app.default_seed);
    let id = Uuid::new_v4();
    let session = Session::new(id, game, spec.clone(), req.human_side, seed)?;
    let state = session.state();
    app.log(id, json!({ "event": "create", "game": state["game"], "bot_spec": spec, "human_side": req.human_side, "seed": seed }))?;
    app.sessions.lock().expect("session table").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "state": state }))))
}

async fn play(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().expect("session");
    if s.closed {
        return Err(ApiError::Closed);
    }
    let req: MoveRequest = parse(&body)?;
    let action = s.human_action(&req.action)?;
    let out = s.play(action);
    app.log(s.id, json!({ "event": "move", "t": out["t"], "human_action": action, "bot_action": out["bot_action_index"] }))?;
    Ok(Json(out))
}

async fn show(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let s = session.lock().expect("session");
    Ok(Json(s.state()))
}

async fn close(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().expect("session");
    if s.closed {
        return Err(ApiError::Closed);
    }
    s.closed = true;
    app.log(s.id, json!({ "event": "close", "t": s.history.len() }))?;
    Ok(Json(s.state()))
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(close))
        .route("/sessions/{id}/move", post(play))
        .with_state(app)
}

pub async fn serve(addr: std::net::SocketAddr, app: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app)).with_graceful_shutdown(async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
