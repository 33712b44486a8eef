use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::exact::{self, Q};
use crate::game::{ActionProfile, Game, Player};
use crate::heuristics::{ActionDist, HeuristicSpec, HeuristicState};

/// A seeded history of play. Only the prefix up to the point where play
/// provably settled is stored; later periods repeat the last profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    game: Arc<Game>,
    seed: u64,
    horizon: u64,
    prefix: Vec<ActionProfile>,
    settled: bool,
}

impl Trace {
    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> u64 {
        self.horizon
    }

    pub fn is_empty(&self) -> bool {
        self.horizon == 0
    }

    /// Play reached a state whose future is deterministic and constant.
    pub fn settled(&self) -> bool {
        self.settled
    }

    /// Number of periods actually simulated.
    pub fn simulated(&self) -> usize {
        self.prefix.len()
    }

    pub fn profile(&self, t: u64) -> ActionProfile {
        assert!(t < self.horizon, "period {t} beyond horizon {}", self.horizon);
        self.prefix.get(t as usize).copied().unwrap_or_else(|| *self.prefix.last().expect("nonempty"))
    }

    pub fn profiles(&self) -> impl Iterator<Item = ActionProfile> + '_ {
        (0..self.horizon).map(|t| self.profile(t))
    }

    pub fn payoffs(&self, t: u64) -> (Q, Q) {
        self.game.payoff_pair(self.profile(t))
    }

    /// Builds a trace from explicit profiles (no extension).
    pub fn from_profiles(game: Arc<Game>, seed: u64, profiles: Vec<ActionProfile>) -> Trace {
        Trace { game, seed, horizon: profiles.len() as u64, prefix: profiles, settled: false }
    }

    /// `t,row_action,col_action,payoff_row,payoff_col`, one line per period.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,row_action,col_action,payoff_row,payoff_col")?;
        let fmt = |q: &Q| exact::to_decimal_string(q).unwrap_or_else(|| exact::to_f64(q).to_string());
        for t in 0..self.horizon {
            let p = self.profile(t);
            let (r, c) = self.game.payoff_pair(p);
            writeln!(
                out,
                "{t},{},{},{},{}",
                self.game.label(Player::Row, p.row),
                self.game.label(Player::Col, p.col),
                fmt(&r),
                fmt(&c)
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Stop simulating once play is at a fixed point of both rules.
    pub early_exit: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { early_exit: true }
    }
}

/// Plays `horizon` periods of `game` with the given seat specs.
pub fn run_repeated(
    game: impl Into<Arc<Game>>,
    specs: (&HeuristicSpec, &HeuristicSpec),
    horizon: u64,
    seed: u64,
) -> Result<Trace, EngineError> {
    let game = game.into();
    let row = HeuristicState::for_seat(specs.0, &game, Player::Row)?;
    let col = HeuristicState::for_seat(specs.1, &game, Player::Col)?;
    Ok(run_states(game, [row, col], horizon, seed, RunOptions::default()))
}

/// Plays from prepared states. Each period both rules produce a
/// distribution from the history so far, the row action is drawn and then
/// the column action, and both observe the realized profile. A point mass
/// consumes no randomness, so stopping at a fixed point leaves the trace
/// identical to a full run.
pub fn run_states(game: Arc<Game>, mut states: [HeuristicState; 2], horizon: u64, seed: u64, opts: RunOptions) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prefix = Vec::new();
    let mut settled = false;
    for _ in 0..horizon {
        let dists = [states[0].step(), states[1].step()];
        if opts.early_exit && at_fixed_point(&prefix, dists) {
            settled = true;
            break;
        }
        let profile = ActionProfile::new(dists[0].sample(&mut rng), dists[1].sample(&mut rng));
        for s in &mut states {
            s.observe(profile);
        }
        prefix.push(profile);
    }
    Trace { game, seed, horizon, prefix, settled }
}

/// Both rules deterministically repeat the profile of the last two periods.
/// Every implemented rule depends on the history only through its last two
/// profiles, so this state reproduces itself forever.
fn at_fixed_point(prefix: &[ActionProfile], dists: [ActionDist; 2]) -> bool {
    match prefix {
        [.., a, b] if a == b => dists == [ActionDist::Pure(b.row), ActionDist::Pure(b.col)],
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub absorbed: Option<ActionProfile>,
    pub absorption_time: Option<u64>,
    pub window: usize,
}

/// Absorbed when the last `window` periods show one profile; the absorption
/// time is the first period of that terminal constant run.
pub fn detect_absorption(tr: &Trace, window: usize) -> ConvergenceReport {
    let none = ConvergenceReport { absorbed: None, absorption_time: None, window };
    if window == 0 || tr.is_empty() || (window as u64) > tr.len() {
        return none;
    }
    let last = *tr.prefix.last().expect("nonempty");
    let run_in_prefix = tr.prefix.iter().rev().take_while(|&&p| p == last).count();
    let start = (tr.prefix.len() - run_in_prefix) as u64;
    if tr.len() - start >= window as u64 {
        ConvergenceReport { absorbed: Some(last), absorption_time: Some(start), window }
    } else {
        none
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitOfMeans {
    pub periods: u64,
    /// Exact mean payoff over all periods.
    #[serde(with = "exact::exact_serde")]
    pub mean: (Q, Q),
    /// Payoff of the profile play settled on, when it provably settled.
    #[serde(with = "exact::exact_serde")]
    pub exact_limit: Option<(Q, Q)>,
    pub settled_at: Option<u64>,
}

impl LimitOfMeans {
    /// The exact limit when known, otherwise the finite-horizon mean.
    pub fn value(&self) -> &(Q, Q) {
        self.exact_limit.as_ref().unwrap_or(&self.mean)
    }

    pub fn value_f64(&self) -> [f64; 2] {
        let v = self.value();
        [exact::to_f64(&v.0), exact::to_f64(&v.1)]
    }
}

pub fn limit_of_means(tr: &Trace) -> Result<LimitOfMeans, EngineError> {
    if tr.is_empty() {
        return Err(EngineError::EmptyTrace);
    }
    let mut counts: BTreeMap<ActionProfile, u64> = BTreeMap::new();
    for &p in &tr.prefix {
        *counts.entry(p).or_default() += 1;
    }
    let last = *tr.prefix.last().expect("nonempty");
    *counts.entry(last).or_default() += tr.horizon - tr.prefix.len() as u64;
    let (mut sr, mut sc) = (Q::default(), Q::default());
    for (p, k) in counts {
        let k = Q::from_integer(k.into());
        sr += tr.game.payoff(Player::Row, p) * &k;
        sc += tr.game.payoff(Player::Col, p) * &k;
    }
    let t = Q::from_integer(tr.horizon.into());
    let (exact_limit, settled_at) = if tr.settled {
        let report = detect_absorption(tr, 1);
        (Some(tr.game.payoff_pair(last)), report.absorption_time)
    } else {
        (None, None)
    };
    Ok(LimitOfMeans { periods: tr.horizon, mean: (sr / &t, sc / &t), exact_limit, settled_at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::experiments::fixtures;

    fn hmc() -> HeuristicSpec {
        HeuristicSpec::HmcBasic
    }

    #[test]
    fn learners_settle_on_u1() {
        let tr = run_repeated(fixtures::u1(), (&hmc(), &hmc()), 100_000, 3).unwrap();
        assert!(tr.settled());
        assert_eq!(detect_absorption(&tr, 10).absorbed, Some(ActionProfile::new(1, 0)));
        let lim = limit_of_means(&tr).unwrap();
        assert_eq!(lim.exact_limit, Some((int(17), int(7))));
    }

    #[test]
    fn same_seed_same_trace() {
        let a = run_repeated(fixtures::u2(), (&hmc(), &hmc()), 1000, 11).unwrap();
        let b = run_repeated(fixtures::u2(), (&hmc(), &hmc()), 1000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn early_exit_matches_full_run() {
        let g = Arc::new(fixtures::u2());
        for seed in 0..20 {
            let states = || {
                [
                    HeuristicState::for_seat(&hmc(), &g, Player::Row).unwrap(),
                    HeuristicState::for_seat(&hmc(), &g, Player::Col).unwrap(),
                ]
            };
            let short = run_states(g.clone(), states(), 500, seed, RunOptions::default());
            let full = run_states(g.clone(), states(), 500, seed, RunOptions { early_exit: false });
            assert!(short.profiles().eq(full.profiles()), "seed {seed}");
            assert_eq!(limit_of_means(&short).unwrap().mean, limit_of_means(&full).unwrap().mean);
        }
    }

    #[test]
    fn zero_horizon() {
        let tr = run_repeated(fixtures::u1(), (&hmc(), &hmc()), 0, 1).unwrap();
        assert!(tr.is_empty());
        assert_eq!(limit_of_means(&tr), Err(EngineError::EmptyTrace));
        assert_eq!(detect_absorption(&tr, 1).absorbed, None);
    }

    #[test]
    fn absorption_windows() {
        let g = Arc::new(fixtures::u2());
        let mut v = vec![ActionProfile::new(1, 0), ActionProfile::new(0, 0)];
        v.extend(std::iter::repeat_n(ActionProfile::new(0, 1), 50));
        let tr = Trace::from_profiles(g.clone(), 0, v);
        let r = detect_absorption(&tr, 10);
        assert_eq!((r.absorbed, r.absorption_time), (Some(ActionProfile::new(0, 1)), Some(2)));
        assert_eq!(detect_absorption(&tr, 53).absorbed, None);
        let alt: Vec<_> = (0..20).map(|t| ActionProfile::new(t % 2, 0)).collect();
        assert_eq!(detect_absorption(&Trace::from_profiles(g, 0, alt), 2).absorbed, None);
    }

    #[test]
    fn finite_means() {
        let g = Arc::new(Game::from_pairs(&["x", "y"], &["l"], &[&[(1, 0)], &[(0, 0)]]));
        let alt = Trace::from_profiles(g.clone(), 0, vec![ActionProfile::new(0, 0), ActionProfile::new(1, 0)]);
        assert_eq!(limit_of_means(&alt).unwrap().mean.0, ratio(1, 2));
        let constant = Trace::from_profiles(g, 0, vec![ActionProfile::new(0, 0); 7]);
        let lim = limit_of_means(&constant).unwrap();
        assert_eq!(lim.mean, (int(1), int(0)));
        assert_eq!(lim.exact_limit, None);
    }

    #[test]
    fn csv_export() {
        let g = Arc::new(fixtures::u2());
        let tr = Trace::from_profiles(g, 0, vec![ActionProfile::new(1, 0), ActionProfile::new(0, 1)]);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,row_action,col_action,payoff_row,payoff_col\n0,c,a,15,7\n1,b,b,13,13\n");
    }
}
