//! Finite two-player normal-form games.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::exact::{self, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Row,
    Col,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Row, Player::Col];

    pub fn other(self) -> Player {
        match self {
            Player::Row => Player::Col,
            Player::Col => Player::Row,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Row => 0,
            Player::Col => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Row => "row",
            Player::Col => "col",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionProfile {
    pub row: usize,
    pub col: usize,
}

impl ActionProfile {
    pub fn new(row: usize, col: usize) -> Self {
        ActionProfile { row, col }
    }

    /// Builds a profile from one player's point of view.
    pub fn from_view(player: Player, own: usize, opp: usize) -> Self {
        match player {
            Player::Row => ActionProfile::new(own, opp),
            Player::Col => ActionProfile::new(opp, own),
        }
    }

    pub fn action(&self, player: Player) -> usize {
        match player {
            Player::Row => self.row,
            Player::Col => self.col,
        }
    }
}

/// A dense payoff table indexed `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl PayoffMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Q>) -> Self {
        assert_eq!(rows * cols, data.len(), "payoff data does not match shape");
        PayoffMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let data = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| f(r, c)).collect();
        PayoffMatrix { rows, cols, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged integer matrix");
        PayoffMatrix::from_fn(rows.len(), cols, |r, c| exact::int(rows[r][c]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Q] {
        &self.data
    }

    pub fn transpose(&self) -> PayoffMatrix {
        PayoffMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn min(&self) -> &Q {
        self.data.iter().min().expect("nonempty matrix")
    }

    pub fn max(&self) -> &Q {
        self.data.iter().max().expect("nonempty matrix")
    }

    pub fn to_nested(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(exact::to_f64).collect())
            .collect()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{player} player has no actions")]
    EmptyActions { player: Player },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite payoff for {player} player at ({row}, {col})")]
    NonFinite { player: Player, row: usize, col: usize },
    #[error("malformed payoff {value:?} for {player} player at ({row}, {col})")]
    MalformedNumber { player: Player, row: usize, col: usize, value: String },
}

/// A finite two-player game: action labels plus one payoff table per player,
/// both indexed `(row action, column action)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Game {
    row_actions: Vec<String>,
    col_actions: Vec<String>,
    payoff_row: PayoffMatrix,
    payoff_col: PayoffMatrix,
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            let mut label = String::new();
            let mut k = i;
            loop {
                label.insert(0, (b'a' + (k % 26) as u8) as char);
                if k < 26 {
                    break;
                }
                k = k / 26 - 1;
            }
            label
        })
        .collect()
}

impl Game {
    pub fn new(
        row_actions: Vec<String>,
        col_actions: Vec<String>,
        payoff_row: PayoffMatrix,
        payoff_col: PayoffMatrix,
    ) -> Result<Game, GameError> {
        if row_actions.is_empty() {
            return Err(GameError::EmptyActions { player: Player::Row });
        }
        if col_actions.is_empty() {
            return Err(GameError::EmptyActions { player: Player::Col });
        }
        let shape = (row_actions.len(), col_actions.len());
        for (player, m) in [(Player::Row, &payoff_row), (Player::Col, &payoff_col)] {
            if (m.rows(), m.cols()) != shape {
                return Err(GameError::ShapeMismatch(format!(
                    "{player} payoffs are {}x{}, actions are {}x{}",
                    m.rows(),
                    m.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(Game { row_actions, col_actions, payoff_row, payoff_col })
    }

    /// Convenience constructor from integer payoff pairs `cells[r][c] = (u_row, u_col)`.
    pub fn from_pairs(row_actions: &[&str], col_actions: &[&str], cells: &[&[(i64, i64)]]) -> Game {
        let rows = cells.len();
        let cols = cells.first().map_or(0, |r| r.len());
        let pr = PayoffMatrix::from_fn(rows, cols, |r, c| exact::int(cells[r][c].0));
        let pc = PayoffMatrix::from_fn(rows, cols, |r, c| exact::int(cells[r][c].1));
        Game::new(
            row_actions.iter().map(|s| s.to_string()).collect(),
            col_actions.iter().map(|s| s.to_string()).collect(),
            pr,
            pc,
        )
        .expect("well-formed literal game")
    }

    /// Builds a game with default labels `a, b, c, ...`.
    pub fn unlabeled(payoff_row: PayoffMatrix, payoff_col: PayoffMatrix) -> Result<Game, GameError> {
        Game::new(
            default_labels(payoff_row.rows()),
            default_labels(payoff_row.cols()),
            payoff_row,
            payoff_col,
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_actions.len(), self.col_actions.len())
    }

    pub fn num_actions(&self, player: Player) -> usize {
        match player {
            Player::Row => self.row_actions.len(),
            Player::Col => self.col_actions.len(),
        }
    }

    pub fn actions(&self, player: Player) -> &[String] {
        match player {
            Player::Row => &self.row_actions,
            Player::Col => &self.col_actions,
        }
    }

    pub fn label(&self, player: Player, action: usize) -> &str {
        &self.actions(player)[action]
    }

    pub fn action_index(&self, player: Player, label: &str) -> Option<usize> {
        self.actions(player).iter().position(|l| l == label)
    }

    /// The player's payoff table in `(row, col)` orientation.
    pub fn matrix(&self, player: Player) -> &PayoffMatrix {
        match player {
            Player::Row => &self.payoff_row,
            Player::Col => &self.payoff_col,
        }
    }

    /// The player's payoffs indexed `(own action, opponent action)`.
    pub fn own_view(&self, player: Player) -> PayoffMatrix {
        match player {
            Player::Row => self.payoff_row.clone(),
            Player::Col => self.payoff_col.transpose(),
        }
    }

    pub fn payoff(&self, player: Player, profile: ActionProfile) -> &Q {
        self.matrix(player).get(profile.row, profile.col)
    }

    pub fn payoff_pair(&self, profile: ActionProfile) -> (Q, Q) {
        (
            self.payoff(Player::Row, profile).clone(),
            self.payoff(Player::Col, profile).clone(),
        )
    }

    pub fn profiles(&self) -> impl Iterator<Item = ActionProfile> + '_ {
        let (n, m) = self.shape();
        (0..n).flat_map(move |r| (0..m).map(move |c| ActionProfile::new(r, c)))
    }

    /// Replaces one player's table (given in `(row, col)` orientation).
    pub fn with_matrix(&self, player: Player, m: PayoffMatrix) -> Result<Game, GameError> {
        let (pr, pc) = match player {
            Player::Row => (m, self.payoff_col.clone()),
            Player::Col => (self.payoff_row.clone(), m),
        };
        Game::new(self.row_actions.clone(), self.col_actions.clone(), pr, pc)
    }

    /// Sub-game on the given row and column indices.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Game, GameError> {
        let pick = |m: &PayoffMatrix| PayoffMatrix::from_fn(rows.len(), cols.len(), |r, c| m.get(rows[r], cols[c]).clone());
        Game::new(
            rows.iter().map(|&r| self.row_actions[r].clone()).collect(),
            cols.iter().map(|&c| self.col_actions[c].clone()).collect(),
            pick(&self.payoff_row),
            pick(&self.payoff_col),
        )
    }

    /// True when every payoff lies in `[0, 1]`.
    pub fn is_normalized(&self) -> bool {
        let unit = |q: &Q| *q >= Q::zero() && *q <= Q::one();
        self.payoff_row.entries().iter().chain(self.payoff_col.entries()).all(unit)
    }

    /// Per player, maps payoffs affinely so the minimum becomes 0 and the
    /// maximum 1. A constant table becomes all one half.
    pub fn normalize(&self) -> Game {
        let scale = |m: &PayoffMatrix| {
            let lo = m.min().clone();
            let hi = m.max().clone();
            if lo == hi {
                PayoffMatrix::from_fn(m.rows(), m.cols(), |_, _| exact::ratio(1, 2))
            } else {
                let span = &hi - &lo;
                PayoffMatrix::from_fn(m.rows(), m.cols(), |r, c| (m.get(r, c) - &lo) / &span)
            }
        };
        Game {
            row_actions: self.row_actions.clone(),
            col_actions: self.col_actions.clone(),
            payoff_row: scale(&self.payoff_row),
            payoff_col: scale(&self.payoff_col),
        }
    }

    pub fn expected_payoff(&self, m: &MixedProfile) -> Result<(Q, Q), GameError> {
        let (n, k) = self.shape();
        if m.row_mix.len() != n || m.col_mix.len() != k {
            return Err(GameError::ShapeMismatch(format!(
                "mixed profile is {}x{}, game is {n}x{k}",
                m.row_mix.len(),
                m.col_mix.len()
            )));
        }
        let mut ur = Q::zero();
        let mut uc = Q::zero();
        for p in self.profiles() {
            let w = &m.row_mix[p.row] * &m.col_mix[p.col];
            if w.is_zero() {
                continue;
            }
            ur += &w * self.payoff(Player::Row, p);
            uc += &w * self.payoff(Player::Col, p);
        }
        Ok((ur, uc))
    }

    pub fn to_json_value(&self) -> Value {
        let matrix = |m: &PayoffMatrix| {
            Value::Array(
                (0..m.rows())
                    .map(|r| Value::Array(m.row(r).iter().map(exact::to_json_number).collect()))
                    .collect(),
            )
        };
        serde_json::json!({
            "row_actions": self.row_actions,
            "col_actions": self.col_actions,
            "payoff_row": matrix(&self.payoff_row),
            "payoff_col": matrix(&self.payoff_col),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("game JSON")
    }

    pub fn from_json_value(doc: &Value) -> Result<Game, GameError> {
        let obj = doc
            .as_object()
            .ok_or_else(|| GameError::Json("game document must be an object".into()))?;
        let payoffs = |key: &str, player: Player| -> Result<Vec<Vec<Q>>, GameError> {
            let rows = obj
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| GameError::Json(format!("missing array field {key:?}")))?;
            rows.iter()
                .enumerate()
                .map(|(r, row)| {
                    let row = row
                        .as_array()
                        .ok_or_else(|| GameError::ShapeMismatch(format!("{key}[{r}] is not an array")))?;
                    row.iter()
                        .enumerate()
                        .map(|(c, v)| {
                            exact::from_json_value(v).map_err(|e| match e {
                                exact::NumberError::NonFinite => GameError::NonFinite { player, row: r, col: c },
                                exact::NumberError::Malformed(value) => {
                                    GameError::MalformedNumber { player, row: r, col: c, value }
                                }
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let pr = payoffs("payoff_row", Player::Row)?;
        let pc = payoffs("payoff_col", Player::Col)?;
        let rows = pr.len();
        let cols = pr.first().map_or(0, Vec::len);
        for (key, m) in [("payoff_row", &pr), ("payoff_col", &pc)] {
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(GameError::ShapeMismatch(format!("{key} is ragged or differs in shape")));
            }
        }
        let labels = |key: &str, n: usize| -> Result<Vec<String>, GameError> {
            match obj.get(key) {
                None | Some(Value::Null) => Ok(default_labels(n)),
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s.clone()),
                        other => Err(GameError::Json(format!("{key} entries must be strings, got {other}"))),
                    })
                    .collect(),
                Some(other) => Err(GameError::Json(format!("{key} must be an array, got {other}"))),
            }
        };
        let row_actions = labels("row_actions", rows)?;
        let col_actions = labels("col_actions", cols)?;
        let flatten = |m: Vec<Vec<Q>>| PayoffMatrix::new(rows, cols, m.into_iter().flatten().collect());
        Game::new(row_actions, col_actions, flatten(pr), flatten(pc))
    }

    /// Parses the game JSON document.
    pub fn from_json_str(text: &str) -> Result<Game, GameError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| GameError::Json(e.to_string()))?;
        Game::from_json_value(&doc)
    }
}

pub fn load_game(text: &str) -> Result<Game, GameError> {
    Game::from_json_str(text)
}

impl Serialize for Game {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Game {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Game, D::Error> {
        let v = Value::deserialize(d)?;
        Game::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// One probability vector per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedProfile {
    #[serde(with = "crate::exact::exact_serde")]
    pub row_mix: Vec<Q>,
    #[serde(with = "crate::exact::exact_serde")]
    pub col_mix: Vec<Q>,
}

impl MixedProfile {
    /// Validates both vectors: nonnegative entries summing to one.
    pub fn new(row_mix: Vec<Q>, col_mix: Vec<Q>) -> Result<Self, GameError> {
        for (player, mix) in [(Player::Row, &row_mix), (Player::Col, &col_mix)] {
            let total: Q = mix.iter().sum();
            if mix.is_empty() || mix.iter().any(|p| *p < Q::zero()) || !total.is_one() {
                return Err(GameError::ShapeMismatch(format!("{player} mix is not a probability vector")));
            }
        }
        Ok(MixedProfile { row_mix, col_mix })
    }

    pub fn pure(shape: (usize, usize), profile: ActionProfile) -> Self {
        let point = |n: usize, i: usize| (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect();
        MixedProfile { row_mix: point(shape.0, profile.row), col_mix: point(shape.1, profile.col) }
    }

    pub fn mix(&self, player: Player) -> &[Q] {
        match player {
            Player::Row => &self.row_mix,
            Player::Col => &self.col_mix,
        }
    }

    /// The profile's support is a single cell.
    pub fn as_pure(&self) -> Option<ActionProfile> {
        let single = |m: &[Q]| {
            let mut it = m.iter().enumerate().filter(|(_, p)| !p.is_zero());
            match (it.next(), it.next()) {
                (Some((i, _)), None) => Some(i),
                _ => None,
            }
        };
        Some(ActionProfile::new(single(&self.row_mix)?, single(&self.col_mix)?))
    }
}
