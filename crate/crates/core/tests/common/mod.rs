//! Property checks shared by the proptest suite and the acceptance run.

#![allow(dead_code)]

use std::sync::Arc;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use teachlab::analysis::{
    best_responses, correlated_equilibrium, is_correlated_equilibrium, pure_nash, strict_dominance_witness,
    verifies_weak_dominance, weak_dominance_witness,
};
use teachlab::engine::{
    class_average, detect_absorption, run_repeated, run_states, GameClass, RunOptions, SweepConfig,
};
use teachlab::exact::int;
use teachlab::heuristics::{HeuristicSpec, HeuristicState};
use teachlab::{ActionProfile, Game, PayoffMatrix, Player, Q};

pub const BASE_SPECS: [HeuristicSpec; 5] = [
    HeuristicSpec::HmcBasic,
    HeuristicSpec::HmcPareto,
    HeuristicSpec::MyopicBr,
    HeuristicSpec::WdsConstant,
    HeuristicSpec::UniformRandom,
];

pub fn matrix(n: usize, m: usize, xs: Vec<i64>) -> PayoffMatrix {
    PayoffMatrix::new(n, m, xs.into_iter().map(int).collect())
}

pub fn any_game(max: usize) -> impl Strategy<Value = Game> {
    (1..=max, 1..=max).prop_flat_map(|(n, m)| {
        (vec(-20i64..=20, n * m), vec(-20i64..=20, n * m))
            .prop_map(move |(a, b)| Game::unlabeled(matrix(n, m, a), matrix(n, m, b)).expect("shape"))
    })
}

/// Each player's payoffs are a permutation of `0..n*m`, so the game is generic.
pub fn generic_game(max: usize) -> impl Strategy<Value = Game> {
    (2..=max, 2..=max).prop_flat_map(|(n, m)| {
        let perm = || Just((0..(n * m) as i64).collect::<Vec<_>>()).prop_shuffle();
        (perm(), perm()).prop_map(move |(a, b)| Game::unlabeled(matrix(n, m, a), matrix(n, m, b)).expect("shape"))
    })
}

pub fn seat() -> impl Strategy<Value = Player> {
    prop_oneof![Just(Player::Row), Just(Player::Col)]
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn finish(name: &str, r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

/// Step distributions do not move when only the opponent's payoffs change.
pub fn uncoupledness(cases: u32) -> Result<(), String> {
    let strat = (any_game(4), seat(), vec(-20i64..=20, 16), vec((0usize..4, 0usize..4), 0..8));
    finish(
        "uncoupledness",
        runner(cases).run(&strat, |(g, p, noise, history)| {
            let (n, m) = g.shape();
            let other = PayoffMatrix::from_fn(n, m, |r, c| int(noise[r * m + c]));
            let g2 = g.with_matrix(p.other(), other).expect("shape");
            for spec in &BASE_SPECS {
                let mut a = HeuristicState::for_seat(spec, &g, p).expect("base rule");
                let mut b = HeuristicState::for_seat(spec, &g2, p).expect("base rule");
                prop_assert_eq!(a.step(), b.step());
                for &(r, c) in &history {
                    let profile = ActionProfile::new(r % n, c % m);
                    a.observe(profile);
                    b.observe(profile);
                    prop_assert_eq!(a.step(), b.step(), "{} after {:?}", spec, profile);
                }
            }
            Ok(())
        }),
    )
}

/// An absorbed learner pair sits on a pure Nash equilibrium.
pub fn absorption_soundness(cases: u32) -> Result<(), String> {
    let hmc = HeuristicSpec::HmcBasic;
    finish(
        "absorption_soundness",
        runner(cases).run(&(any_game(4), any::<u64>()), |(g, seed)| {
            let tr = run_repeated(g.clone(), (&hmc, &hmc), 3000, seed).expect("runs");
            if let Some(p) = detect_absorption(&tr, 10).absorbed {
                prop_assert!(pure_nash(&g).contains(&p), "absorbed at non-Nash {:?}", p);
            }
            Ok(())
        }),
    )
}

/// Same inputs, same trace; early exit and parallel sweeps change nothing.
pub fn determinism(cases: u32) -> Result<(), String> {
    let strat = (any_game(3), any::<u64>(), 0usize..5, 0usize..5);
    finish(
        "determinism",
        runner(cases).run(&strat, |(g, seed, i, j)| {
            let (r, c) = (&BASE_SPECS[i], &BASE_SPECS[j]);
            let a = run_repeated(g.clone(), (r, c), 400, seed).expect("runs");
            let b = run_repeated(g.clone(), (r, c), 400, seed).expect("runs");
            prop_assert_eq!(&a, &b);
            let game = Arc::new(g.clone());
            let states = || {
                [
                    HeuristicState::for_seat(r, &game, Player::Row).expect("base"),
                    HeuristicState::for_seat(c, &game, Player::Col).expect("base"),
                ]
            };
            let full = run_states(game.clone(), states(), 400, seed, RunOptions { early_exit: false });
            prop_assert!(a.profiles().eq(full.profiles()));
            Ok(())
        }),
    )?;
    let cfg = SweepConfig { n: 12, horizon: 300, reps: 2, seed: 17, ..SweepConfig::default() };
    let specs = (&HeuristicSpec::HmcBasic, &HeuristicSpec::UniformRandom);
    let par = class_average(specs, &GameClass::Generic, &cfg).map_err(|e| e.to_string())?;
    let ser = class_average(specs, &GameClass::Generic, &SweepConfig { parallel: false, ..cfg }).map_err(|e| e.to_string())?;
    if par != ser {
        return Err("determinism: parallel and serial sweeps differ".into());
    }
    Ok(())
}

/// Positive affine maps of a player's payoffs keep every best reply.
pub fn normalization_invariance(cases: u32) -> Result<(), String> {
    let strat = (any_game(4), 1i64..50, -50i64..50);
    finish(
        "normalization_invariance",
        runner(cases).run(&strat, |(g, k, shift)| {
            let scaled = {
                let f = |m: &PayoffMatrix| PayoffMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) * int(k) + int(shift));
                Game::unlabeled(f(g.matrix(Player::Row)), f(g.matrix(Player::Col))).expect("shape")
            };
            let normal = g.normalize();
            prop_assert!(normal.is_normalized());
            for p in Player::BOTH {
                for o in 0..g.num_actions(p.other()) {
                    let br = best_responses(&g, p, o);
                    prop_assert_eq!(&br, &best_responses(&normal, p, o));
                    prop_assert_eq!(&br, &best_responses(&scaled, p, o));
                }
            }
            prop_assert_eq!(pure_nash(&g), pure_nash(&normal));
            Ok(())
        }),
    )
}

fn strictly_better(view: &PayoffMatrix, opp: &[usize], action: usize, mix: &[Q]) -> bool {
    opp.iter().all(|&t| mix.iter().enumerate().map(|(s, w)| w * view.get(s, t)).sum::<Q>() > *view.get(action, t))
}

/// Every dominance and correlated-equilibrium witness re-verifies exactly.
pub fn lp_witnesses(cases: u32) -> Result<(), String> {
    finish(
        "lp_witnesses",
        runner(cases).run(&any_game(4), |g| {
            for p in Player::BOTH {
                let view = g.own_view(p);
                let own: Vec<usize> = (0..view.rows()).collect();
                let opp: Vec<usize> = (0..view.cols()).collect();
                for a in 0..view.rows() {
                    if let Some(mix) = weak_dominance_witness(&view, &own, &opp, a) {
                        prop_assert!(verifies_weak_dominance(&view, &opp, a, &mix));
                        prop_assert_eq!(&mix[a], &Q::default());
                    }
                    if let Some(mix) = strict_dominance_witness(&view, &own, &opp, a) {
                        prop_assert!(strictly_better(&view, &opp, a, &mix));
                        prop_assert!(verifies_weak_dominance(&view, &opp, a, &mix));
                    }
                }
            }
            let ce = correlated_equilibrium(&g);
            prop_assert!(is_correlated_equilibrium(&g, &ce.witness));
            Ok(())
        }),
    )
}
