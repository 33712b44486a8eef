use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sampling::{sample_games, GameClass};
use super::trace::{limit_of_means, run_states, RunOptions};
use super::{derive_seed, map_indexed, EngineError, DEFAULT_GAMES, DEFAULT_HORIZON, DEFAULT_REJECTION_BUDGET, DEFAULT_REPS};
use crate::analysis::stackelberg;
use crate::exact;
use crate::game::{ActionProfile, Game, Player};
use crate::heuristics::{HeuristicSpec, HeuristicState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub shape: (usize, usize),
    pub n: usize,
    pub horizon: u64,
    pub reps: usize,
    pub seed: u64,
    pub budget: u64,
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            shape: (2, 2),
            n: DEFAULT_GAMES,
            horizon: DEFAULT_HORIZON,
            reps: DEFAULT_REPS,
            seed: 0,
            budget: DEFAULT_REJECTION_BUDGET,
            parallel: true,
        }
    }
}

/// Monte Carlo estimate of a per-game observable over a class.
///
/// `mean` is the conditional mean over accepted games, `measure` the
/// acceptance rate of rejection sampling (the class's share of the payoff
/// cube), and `integral = mean * measure`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEstimate {
    pub class: String,
    pub n: usize,
    pub mean: [f64; 2],
    pub se: [f64; 2],
    pub measure: f64,
    pub measure_se: f64,
    pub integral: [f64; 2],
    pub integral_se: [f64; 2],
    pub draws: u64,
    /// Share of runs that provably settled on a profile.
    pub settled_fraction: f64,
    /// Per-game observable, in sampling order.
    pub per_game: Vec<[f64; 2]>,
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(class: &GameClass, per_game: Vec<[f64; 2]>, draws: u64, settled_fraction: f64) -> ClassEstimate {
    let n = per_game.len();
    let (m0, s0) = mean_se(per_game.iter().map(|v| v[0]));
    let (m1, s1) = mean_se(per_game.iter().map(|v| v[1]));
    let measure = if matches!(class, GameClass::Fixed { .. }) { 1.0 } else { n as f64 / draws as f64 };
    let measure_se = if matches!(class, GameClass::Fixed { .. }) { 0.0 } else { (measure * (1.0 - measure) / draws as f64).sqrt() };
    let integral_se = |m: f64, s: f64| ((measure * s).powi(2) + (m * measure_se).powi(2)).sqrt();
    ClassEstimate {
        class: class.name(),
        n,
        mean: [m0, m1],
        se: [s0, s1],
        measure,
        measure_se,
        integral: [m0 * measure, m1 * measure],
        integral_se: [integral_se(m0, s0), integral_se(m1, s1)],
        draws,
        settled_fraction,
        per_game,
    }
}

/// Class estimate of an arbitrary per-game observable, using the same game
/// streams as [`class_average`].
pub fn class_observable<F>(class: &GameClass, cfg: &SweepConfig, f: F) -> Result<ClassEstimate, EngineError>
where
    F: Fn(&Game) -> [f64; 2] + Sync + Send,
{
    check(cfg, false)?;
    let games = sample_games(class, cfg.shape, cfg.n, cfg.seed, cfg.budget, cfg.parallel)?;
    let draws = games.iter().map(|s| s.draws).sum();
    let per_game = map_indexed(games.len(), cfg.parallel, |i| f(&games[i].game));
    Ok(summarize(class, per_game, draws, 1.0))
}

fn check(cfg: &SweepConfig, runs: bool) -> Result<(), EngineError> {
    if cfg.n == 0 || (runs && (cfg.horizon == 0 || cfg.reps == 0)) {
        return Err(EngineError::InvalidArgument("n, horizon and reps must be positive".into()));
    }
    Ok(())
}

/// Per game: the mean over `reps` runs of each player's limit of means
/// (exact limit for settled runs, finite mean otherwise). Run `r` of game
/// `i` uses seed `derive_seed(derive_seed(seed, "game", i), "rep", r)`.
pub fn class_average(
    specs: (&HeuristicSpec, &HeuristicSpec),
    class: &GameClass,
    cfg: &SweepConfig,
) -> Result<ClassEstimate, EngineError> {
    check(cfg, true)?;
    let games = sample_games(class, cfg.shape, cfg.n, cfg.seed, cfg.budget, cfg.parallel)?;
    let draws = games.iter().map(|s| s.draws).sum();
    let results = map_indexed(games.len(), cfg.parallel, |i| -> Result<([f64; 2], usize), EngineError> {
        let game = Arc::new(games[i].game.clone());
        let row = HeuristicState::for_seat(specs.0, &game, Player::Row)?;
        let col = HeuristicState::for_seat(specs.1, &game, Player::Col)?;
        let game_seed = derive_seed(cfg.seed, "game", i as u64);
        let mut sum = [0.0; 2];
        let mut settled = 0;
        for r in 0..cfg.reps {
            let seed = derive_seed(game_seed, "rep", r as u64);
            let tr = run_states(game.clone(), [row.clone(), col.clone()], cfg.horizon, seed, RunOptions::default());
            let lim = limit_of_means(&tr)?;
            settled += usize::from(tr.settled());
            let v = lim.value_f64();
            sum[0] += v[0];
            sum[1] += v[1];
        }
        Ok(([sum[0] / cfg.reps as f64, sum[1] / cfg.reps as f64], settled))
    });
    let mut per_game = Vec::with_capacity(results.len());
    let mut settled = 0;
    for r in results {
        let (v, s) = r?;
        per_game.push(v);
        settled += s;
    }
    let fraction = settled as f64 / (cfg.n * cfg.reps) as f64;
    Ok(summarize(class, per_game, draws, fraction))
}

/// Worst-case Stackelberg value of `leader` per game (slot of the leader),
/// and the follower's payoff at that outcome (other slot).
pub fn stackelberg_class_average(class: &GameClass, cfg: &SweepConfig, leader: Player) -> Result<ClassEstimate, EngineError> {
    class_observable(class, cfg, |g| {
        let s = stackelberg(g, leader);
        let profile = ActionProfile::from_view(leader, s.leader_action, s.worst_follower_reply);
        let mut out = [0.0; 2];
        out[leader.index()] = exact::to_f64(&s.value);
        out[leader.other().index()] = exact::to_f64(g.payoff(leader.other(), profile));
        out
    })
}

/// Mean and standard error of the per-game difference `a - b` for one
/// player. Both estimates must come from the same class, seed and `n`.
pub fn paired_difference(a: &ClassEstimate, b: &ClassEstimate, player: Player) -> Result<(f64, f64), EngineError> {
    if a.per_game.len() != b.per_game.len() || a.class != b.class {
        return Err(EngineError::InvalidArgument("estimates are not paired".into()));
    }
    let k = player.index();
    Ok(mean_se(a.per_game.iter().zip(&b.per_game).map(|(x, y)| x[k] - y[k])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::fixtures;
    use crate::heuristics::BaseKind;

    fn small(seed: u64) -> SweepConfig {
        SweepConfig { n: 20, horizon: 2000, reps: 3, seed, ..SweepConfig::default() }
    }

    #[test]
    fn singleton_u2() {
        let class = GameClass::fixed("u2", fixtures::u2());
        let hmc = HeuristicSpec::HmcBasic;
        let honest = class_average((&hmc, &hmc), &class, &small(1)).unwrap();
        assert_eq!(honest.mean[0], 13.0);
        assert_eq!(honest.se[0], 0.0);
        let teacher = HeuristicSpec::teacher(BaseKind::HmcBasic);
        let taught = class_average((&teacher, &hmc), &class, &small(1)).unwrap();
        assert_eq!(taught.mean[0], 15.0);
        let lead = stackelberg_class_average(&class, &small(1), Player::Row).unwrap();
        assert_eq!(lead.mean[0], 15.0);
        assert_eq!(paired_difference(&taught, &honest, Player::Row).unwrap(), (2.0, 0.0));
    }

    #[test]
    fn parallel_equals_serial() {
        let hmc = HeuristicSpec::HmcBasic;
        let par = class_average((&hmc, &hmc), &GameClass::PureNash, &small(4)).unwrap();
        let ser = class_average((&hmc, &hmc), &GameClass::PureNash, &SweepConfig { parallel: false, ..small(4) }).unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn measure_bookkeeping() {
        let cfg = SweepConfig { n: 50, ..small(2) };
        let est = class_observable(&GameClass::PureNash, &cfg, |_| [1.0, 1.0]).unwrap();
        assert_eq!(est.integral[0], est.measure);
        assert!(est.measure > 0.0 && est.measure <= 1.0);
        let all = class_observable(&GameClass::All, &cfg, |_| [1.0, 1.0]).unwrap();
        assert_eq!(all.measure, 1.0);
    }

    #[test]
    fn rejects_empty_sweeps() {
        let hmc = HeuristicSpec::HmcBasic;
        let cfg = SweepConfig { reps: 0, ..small(0) };
        assert!(matches!(class_average((&hmc, &hmc), &GameClass::All, &cfg), Err(EngineError::InvalidArgument(_))));
    }
}
