//! Uncoupled learning heuristics and the strategic teacher.
//!
//! A [`HeuristicState`] is built from one payoff table, the player's own
//! (own actions by opponent actions). It never holds the opponent's payoffs,
//! so two games that differ only in the opponent's matrix produce the same
//! behavior. The teacher is the exception at construction time: the
//! masquerade table is derived from the full game, after which the teacher
//! runs its base rule on the masquerade exactly like an honest learner.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{is_generic, pure_nash, stackelberg, undominated_actions};
use crate::exact::{self, ratio, Q};
use crate::game::{ActionProfile, Game, PayoffMatrix, Player};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    HmcBasic,
    HmcPareto,
    MyopicBr,
    WdsConstant,
    UniformRandom,
}

impl BaseKind {
    pub const ALL: [BaseKind; 5] =
        [BaseKind::HmcBasic, BaseKind::HmcPareto, BaseKind::MyopicBr, BaseKind::WdsConstant, BaseKind::UniformRandom];

    pub fn name(self) -> &'static str {
        match self {
            BaseKind::HmcBasic => "hmc_basic",
            BaseKind::HmcPareto => "hmc_pareto",
            BaseKind::MyopicBr => "myopic_br",
            BaseKind::WdsConstant => "wds_constant",
            BaseKind::UniformRandom => "uniform_random",
        }
    }
}

impl FromStr for BaseKind {
    type Err = HeuristicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| HeuristicError::UnknownKind(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TeacherSpec {
    pub base: BaseKind,
    /// The side the teacher plays; checked against the seat when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leader: Option<Player>,
    /// Payoffs to pretend to have, indexed (row, col) like the game's own
    /// tables. Built with [`build_masquerade`] when absent.
    #[serde(default, with = "exact::exact_serde", skip_serializing_if = "Option::is_none")]
    pub masquerade: Option<Vec<Vec<Q>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeuristicSpec {
    HmcBasic,
    HmcPareto,
    MyopicBr,
    WdsConstant,
    UniformRandom,
    Teacher(TeacherSpec),
}

impl HeuristicSpec {
    pub fn teacher(base: BaseKind) -> Self {
        HeuristicSpec::Teacher(TeacherSpec { base, leader: None, masquerade: None })
    }

    pub fn teacher_with(base: BaseKind, masquerade: &PayoffMatrix) -> Self {
        HeuristicSpec::Teacher(TeacherSpec { base, leader: None, masquerade: Some(masquerade.to_nested()) })
    }

    fn base(kind: BaseKind) -> Self {
        match kind {
            BaseKind::HmcBasic => HeuristicSpec::HmcBasic,
            BaseKind::HmcPareto => HeuristicSpec::HmcPareto,
            BaseKind::MyopicBr => HeuristicSpec::MyopicBr,
            BaseKind::WdsConstant => HeuristicSpec::WdsConstant,
            BaseKind::UniformRandom => HeuristicSpec::UniformRandom,
        }
    }

    /// The rule actually executed.
    pub fn base_kind(&self) -> BaseKind {
        match self {
            HeuristicSpec::HmcBasic => BaseKind::HmcBasic,
            HeuristicSpec::HmcPareto => BaseKind::HmcPareto,
            HeuristicSpec::MyopicBr => BaseKind::MyopicBr,
            HeuristicSpec::WdsConstant => BaseKind::WdsConstant,
            HeuristicSpec::UniformRandom => BaseKind::UniformRandom,
            HeuristicSpec::Teacher(t) => t.base,
        }
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicSpec::Teacher(t) if t.masquerade.is_some() => write!(f, "teacher:{}(custom)", t.base.name()),
            HeuristicSpec::Teacher(t) => write!(f, "teacher:{}", t.base.name()),
            other => f.write_str(other.base_kind().name()),
        }
    }
}

/// Accepts `hmc_basic`, `teacher:hmc_basic`, or a JSON object.
impl FromStr for HeuristicSpec {
    type Err = HeuristicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| HeuristicError::UnknownKind(e.to_string()));
        }
        match s.split_once(':') {
            Some(("teacher", base)) => Ok(HeuristicSpec::teacher(base.parse()?)),
            Some(_) => Err(HeuristicError::UnknownKind(s.to_string())),
            None if s == "teacher" => Ok(HeuristicSpec::teacher(BaseKind::HmcBasic)),
            None => Ok(HeuristicSpec::base(s.parse()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeuristicError {
    #[error("unknown heuristic {0:?}")]
    UnknownKind(String),
    #[error("masquerade must be {expected:?}, got {got:?}")]
    MasqueradeShape { expected: (usize, usize), got: (usize, usize) },
    #[error("masquerade construction needs a generic game")]
    NonGeneric,
    #[error("masquerade construction needs a pure Nash equilibrium")]
    NoPureNash,
    #[error("teacher declared as {declared} but seated as {seat}")]
    LeaderMismatch { declared: Player, seat: Player },
}

/// Replaces the leader's payoffs with a ladder in which the Stackelberg
/// action is strictly dominant and the Stackelberg pair is the unique
/// maximum: 1 at the pair, `0.9 - s*k` elsewhere in the leader row, and
/// `0.5 - s*(j*cols + k)` in other rows, with `s = min(0.01, 1/(2*rows*cols))`
/// counted in the leader's own view.
pub fn build_masquerade(g: &Game, leader: Player) -> Result<Game, HeuristicError> {
    if !is_generic(g) {
        return Err(HeuristicError::NonGeneric);
    }
    if pure_nash(g).is_empty() {
        return Err(HeuristicError::NoPureNash);
    }
    let s = stackelberg(g, leader);
    let (own, opp) = (g.num_actions(leader), g.num_actions(leader.other()));
    let step = std::cmp::min(ratio(1, 100), ratio(1, 2 * (own * opp) as i64));
    let view = PayoffMatrix::from_fn(own, opp, |j, k| {
        let k_q = Q::from_integer(k.into());
        if j == s.leader_action && k == s.worst_follower_reply {
            Q::one()
        } else if j == s.leader_action {
            ratio(9, 10) - &step * k_q
        } else {
            ratio(1, 2) - &step * Q::from_integer((j * opp + k).into())
        }
    });
    let table = match leader {
        Player::Row => view,
        Player::Col => view.transpose(),
    };
    Ok(g.with_matrix(leader, table).expect("same shape"))
}

/// What a seat actually runs: a base rule and the own-view table it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub kind: BaseKind,
    pub view: PayoffMatrix,
}

/// Resolves a spec for one seat of `g`. Only teachers look beyond the
/// seat's own payoffs, and only here.
pub fn resolve(spec: &HeuristicSpec, g: &Game, player: Player) -> Result<Resolved, HeuristicError> {
    let HeuristicSpec::Teacher(t) = spec else {
        return Ok(Resolved { kind: spec.base_kind(), view: g.own_view(player) });
    };
    if let Some(declared) = t.leader {
        if declared != player {
            return Err(HeuristicError::LeaderMismatch { declared, seat: player });
        }
    }
    let table = match &t.masquerade {
        Some(rows) => {
            let got = (rows.len(), rows.first().map_or(0, Vec::len));
            if got != g.shape() || rows.iter().any(|r| r.len() != got.1) {
                return Err(HeuristicError::MasqueradeShape { expected: g.shape(), got });
            }
            PayoffMatrix::new(got.0, got.1, rows.iter().flatten().cloned().collect())
        }
        None => build_masquerade(g, player)?.matrix(player).clone(),
    };
    let view = match player {
        Player::Row => table,
        Player::Col => table.transpose(),
    };
    Ok(Resolved { kind: t.base, view })
}

/// A distribution over own actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionDist {
    Pure(usize),
    Uniform(usize),
}

impl ActionDist {
    /// Point masses are returned without touching `rng`.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> usize {
        match self {
            ActionDist::Pure(a) => a,
            ActionDist::Uniform(n) => rng.random_range(0..n),
        }
    }

    pub fn probabilities(self, n: usize) -> Vec<Q> {
        match self {
            ActionDist::Pure(a) => (0..n).map(|i| if i == a { Q::one() } else { Q::zero() }).collect(),
            ActionDist::Uniform(k) => vec![ratio(1, k as i64); k],
        }
    }
}

/// Per-play memory of one heuristic. Everything is derived from the own
/// view at construction; no opponent payoff is ever stored.
#[derive(Clone, Debug)]
pub struct HeuristicState {
    player: Player,
    kind: BaseKind,
    own_count: usize,
    /// Lowest-index best reply to each opponent action.
    best_reply: Vec<usize>,
    /// `is_best[own * opp_count + opp]`.
    is_best: Vec<bool>,
    /// Own payoff equals the own stage-game maximum.
    is_max: Vec<bool>,
    opp_count: usize,
    wds_action: usize,
    last: [Option<ActionProfile>; 2],
    t: u64,
}

impl HeuristicState {
    pub fn new(player: Player, resolved: Resolved) -> Self {
        let Resolved { kind, view } = resolved;
        let (own_count, opp_count) = (view.rows(), view.cols());
        let mut is_best = vec![false; own_count * opp_count];
        let mut best_reply = vec![0; opp_count];
        for o in 0..opp_count {
            let best = (0..own_count).map(|a| view.get(a, o)).max().expect("nonempty");
            best_reply[o] = (0..own_count).find(|&a| view.get(a, o) == best).expect("attained");
            for a in 0..own_count {
                is_best[a * opp_count + o] = view.get(a, o) == best;
            }
        }
        let top = view.max().clone();
        let is_max = view.entries().iter().map(|v| *v == top).collect();
        let wds_action = match kind {
            BaseKind::WdsConstant => undominated_actions(&view)[0],
            _ => 0,
        };
        HeuristicState { player, kind, own_count, best_reply, is_best, is_max, opp_count, wds_action, last: [None, None], t: 0 }
    }

    pub fn for_seat(spec: &HeuristicSpec, g: &Game, player: Player) -> Result<Self, HeuristicError> {
        Ok(HeuristicState::new(player, resolve(spec, g, player)?))
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    /// Periods observed so far.
    pub fn periods(&self) -> u64 {
        self.t
    }

    /// The two most recent profiles, oldest first.
    pub fn history_tail(&self) -> [Option<ActionProfile>; 2] {
        self.last
    }

    fn repeated(&self) -> Option<(usize, usize)> {
        match self.last {
            [Some(a), Some(b)] if a == b => Some((a.action(self.player), a.action(self.player.other()))),
            _ => None,
        }
    }

    /// Distribution for the next period given everything observed.
    pub fn step(&self) -> ActionDist {
        let uniform = ActionDist::Uniform(self.own_count);
        match self.kind {
            BaseKind::UniformRandom => uniform,
            BaseKind::WdsConstant => ActionDist::Pure(self.wds_action),
            BaseKind::MyopicBr => match self.last[1] {
                Some(p) => ActionDist::Pure(self.best_reply[p.action(self.player.other())]),
                None => uniform,
            },
            BaseKind::HmcBasic | BaseKind::HmcPareto => match self.repeated() {
                Some((own, opp)) => {
                    let cell = own * self.opp_count + opp;
                    let pareto_ok = self.kind == BaseKind::HmcBasic || self.is_max[cell];
                    if self.is_best[cell] && pareto_ok {
                        ActionDist::Pure(own)
                    } else {
                        uniform
                    }
                }
                None => uniform,
            },
        }
    }

    pub fn observe(&mut self, profile: ActionProfile) {
        self.last = [self.last[1], Some(profile)];
        self.t += 1;
    }
}
