use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{derive_seed, map_indexed, EngineError};
use crate::analysis::{is_common_interest, is_generic, one_round_wds, pure_nash};
use crate::exact::{self, Q};
use crate::experiments::fixtures;
use crate::game::{Game, PayoffMatrix, Player};

/// A set of games to sample from. Sampled classes draw every payoff
/// uniformly from `[0, 1)` and reject games outside the class; `Fixed` is a
/// singleton class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameClass {
    All,
    Generic,
    PureNash,
    Wds,
    CommonInterest,
    PureNashGeneric,
    Fixed { name: String, game: Game },
}

impl GameClass {
    pub fn fixed(name: &str, game: Game) -> Self {
        GameClass::Fixed { name: name.to_string(), game }
    }

    pub fn name(&self) -> String {
        match self {
            GameClass::All => "all".into(),
            GameClass::Generic => "generic".into(),
            GameClass::PureNash => "pure_nash".into(),
            GameClass::Wds => "wds".into(),
            GameClass::CommonInterest => "ci".into(),
            GameClass::PureNashGeneric => "pure_nash_generic".into(),
            GameClass::Fixed { name, .. } => format!("fixture:{name}"),
        }
    }

    pub fn contains(&self, g: &Game) -> bool {
        match self {
            GameClass::All => true,
            GameClass::Generic => is_generic(g),
            GameClass::PureNash => !pure_nash(g).is_empty(),
            GameClass::Wds => one_round_wds(g),
            GameClass::CommonInterest => is_common_interest(g).is_some(),
            GameClass::PureNashGeneric => is_generic(g) && !pure_nash(g).is_empty(),
            GameClass::Fixed { game, .. } => game == g,
        }
    }
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `all`, `generic`, `pure_nash`, `wds`, `ci`, `pure_nash_generic`, or
/// `fixture:<name>` for a catalog game.
impl FromStr for GameClass {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "all" => GameClass::All,
            "generic" => GameClass::Generic,
            "pure_nash" => GameClass::PureNash,
            "wds" => GameClass::Wds,
            "ci" => GameClass::CommonInterest,
            "pure_nash_generic" => GameClass::PureNashGeneric,
            other => match other.strip_prefix("fixture:").and_then(|n| fixtures::by_name(n).map(|g| (n, g))) {
                Some((n, g)) => GameClass::fixed(n, g),
                None => return Err(EngineError::InvalidArgument(format!("unknown class {other:?}"))),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledGame {
    pub game: Game,
    /// Draws spent, including the accepted one.
    pub draws: u64,
}

fn uniform_game<R: Rng>(shape: (usize, usize), rng: &mut R) -> Game {
    let mut table = || {
        PayoffMatrix::from_fn(shape.0, shape.1, |_, _| {
            let x: f64 = rng.random();
            exact::from_f64_exact(x).expect("finite")
        })
    };
    let row = table();
    let col = table();
    Game::unlabeled(row, col).expect("positive shape")
}

/// Rejection sampling against the class's classifier.
pub fn sample_game<R: Rng>(class: &GameClass, shape: (usize, usize), rng: &mut R, budget: u64) -> Result<SampledGame, EngineError> {
    if let GameClass::Fixed { game, .. } = class {
        return Ok(SampledGame { game: game.clone(), draws: 1 });
    }
    if shape.0 == 0 || shape.1 == 0 {
        return Err(EngineError::InvalidArgument("shape must be positive".into()));
    }
    for draws in 1..=budget {
        let g = uniform_game(shape, rng);
        if class.contains(&g) {
            return Ok(SampledGame { game: g, draws });
        }
    }
    Err(EngineError::BudgetExhausted { class: class.name(), draws: budget })
}

/// `n` games, game `i` drawn from its own stream `derive_seed(seed, "game", i)`.
pub fn sample_games(
    class: &GameClass,
    shape: (usize, usize),
    n: usize,
    seed: u64,
    budget: u64,
    parallel: bool,
) -> Result<Vec<SampledGame>, EngineError> {
    map_indexed(n, parallel, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "game", i as u64));
        sample_game(class, shape, &mut rng, budget)
    })
    .into_iter()
    .collect()
}

/// Payoffs are exact lifts of `f64` draws, so they lie in `[0, 1)`.
pub fn in_unit_cube(g: &Game) -> bool {
    let zero = Q::default();
    let one = exact::int(1);
    let (row, col) = (g.matrix(Player::Row), g.matrix(Player::Col));
    row.entries().iter().chain(col.entries()).all(|q| *q >= zero && *q < one)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_round_trip() {
        for s in ["all", "generic", "pure_nash", "wds", "ci", "pure_nash_generic", "fixture:u2"] {
            assert_eq!(s.parse::<GameClass>().unwrap().name(), s);
        }
        assert!("fixture:nope".parse::<GameClass>().is_err());
        assert!("weird".parse::<GameClass>().is_err());
    }

    #[test]
    fn accepted_games_pass_the_classifier() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for class in [GameClass::CommonInterest, GameClass::Wds, GameClass::PureNashGeneric] {
            for _ in 0..10 {
                let s = sample_game(&class, (2, 2), &mut rng, 10_000).unwrap();
                assert!(class.contains(&s.game));
                assert!(in_unit_cube(&s.game));
            }
        }
        let s = sample_game(&GameClass::All, (3, 2), &mut rng, 1).unwrap();
        assert_eq!((s.game.shape(), s.draws), ((3, 2), 1));
    }

    #[test]
    fn budget_exhaustion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = sample_game(&GameClass::All, (2, 2), &mut rng, 0);
        assert_eq!(r, Err(EngineError::BudgetExhausted { class: "all".into(), draws: 0 }));
        // Roughly one 3x3 game in nine is common interest; two draws rarely suffice for fifty games.
        let r = sample_games(&GameClass::CommonInterest, (3, 3), 50, 1, 2, false);
        assert!(matches!(r, Err(EngineError::BudgetExhausted { .. })));
    }

    #[test]
    fn parallel_sampling_is_deterministic() {
        let a = sample_games(&GameClass::PureNash, (2, 3), 16, 9, 1000, true).unwrap();
        let b = sample_games(&GameClass::PureNash, (2, 3), 16, 9, 1000, false).unwrap();
        assert_eq!(a, b);
    }
}
