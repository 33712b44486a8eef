mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use teachlab::analysis::{
    iterated_admissible_set, ordinal_potential_exists, pure_nash, rationalizable_set, stackelberg,
    verify_ordinal_potential, weakly_dominated,
};
use teachlab::engine::{detect_absorption, limit_of_means, run_repeated};
use teachlab::exact::{int, ratio};
use teachlab::experiments::{wds_converse_witness, WitnessConfig};
use teachlab::heuristics::{build_masquerade, BaseKind, HeuristicSpec};
use teachlab::{ActionProfile, Game, Player, Q};

use common::{any_game, generic_game, seat};

#[test]
fn uncoupledness() {
    common::uncoupledness(256).unwrap();
}

#[test]
fn absorption_soundness() {
    common::absorption_soundness(256).unwrap();
}

#[test]
fn determinism() {
    common::determinism(64).unwrap();
}

#[test]
fn normalization_invariance() {
    common::normalization_invariance(256).unwrap();
}

#[test]
fn lp_witnesses() {
    common::lp_witnesses(128).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn found_potentials_verify(g in any_game(3)) {
        if let Some(p) = ordinal_potential_exists(&g) {
            prop_assert_eq!(verify_ordinal_potential(&g, &p), Ok(true));
        }
    }

    #[test]
    fn admissible_inside_rationalizable(g in any_game(4)) {
        let big = rationalizable_set(&g);
        let small = iterated_admissible_set(&g);
        prop_assert!(big.contains(&small), "{:?} not inside {:?}", small, big);
        for p in pure_nash(&g) {
            prop_assert!(big.of(Player::Row).contains(&p.row) && big.of(Player::Col).contains(&p.col));
        }
    }

    #[test]
    fn dominance_reports_reverify(g in any_game(4), p in seat()) {
        let report = weakly_dominated(&g, p);
        let view = g.own_view(p);
        let opp: Vec<usize> = (0..view.cols()).collect();
        for w in &report.witnesses {
            prop_assert!(teachlab::analysis::verifies_weak_dominance(&view, &opp, w.action, &w.mix));
        }
    }

    #[test]
    fn leader_value_at_least_nash_payoff(g in generic_game(4), p in seat()) {
        let s = stackelberg(&g, p);
        for ne in pure_nash(&g) {
            prop_assert!(s.value >= *g.payoff(p, ne));
        }
    }

    #[test]
    fn finite_mean_within_absorption_bound(g in any_game(3), seed in any::<u64>(), horizon in 50u64..3000) {
        let hmc = HeuristicSpec::HmcBasic;
        let tr = run_repeated(g.clone(), (&hmc, &hmc), horizon, seed).unwrap();
        let lim = limit_of_means(&tr).unwrap();
        let report = detect_absorption(&tr, 1);
        if let (Some(exact), Some(start)) = (&lim.exact_limit, report.absorption_time) {
            let t = Q::from_integer(horizon.into());
            let s = Q::from_integer(start.into());
            for p in Player::BOTH {
                let m = g.matrix(p);
                let range = m.max() - m.min();
                let (mean, lim) = if p == Player::Row { (&lim.mean.0, &exact.0) } else { (&lim.mean.1, &exact.1) };
                prop_assert!((mean - lim).abs() <= &s * &range / &t);
            }
        }
    }

    #[test]
    fn masquerade_ladder(g in generic_game(4), p in seat()) {
        prop_assume!(!pure_nash(&g).is_empty());
        let s = stackelberg(&g, p);
        let m = build_masquerade(&g, p).unwrap();
        let view = m.own_view(p);
        prop_assert_eq!(m.matrix(p.other()), g.matrix(p.other()));
        prop_assert!(view.entries().iter().all(|v| *v > Q::zero() && *v <= Q::one()));
        prop_assert_eq!(view.get(s.leader_action, s.worst_follower_reply), &Q::one());
        prop_assert_eq!(view.entries().iter().filter(|v| v.is_one()).count(), 1);
        for j in 0..view.rows() {
            for k in 0..view.cols() {
                prop_assert!(j == s.leader_action || view.get(s.leader_action, k) > view.get(j, k));
            }
        }
        let follower = ActionProfile::from_view(p, s.leader_action, s.worst_follower_reply);
        prop_assert!(pure_nash(&m).contains(&follower));
    }

    #[test]
    fn witness_conditions_hold(g in generic_game(3), seed in any::<u64>()) {
        let hmc = HeuristicSpec::HmcBasic;
        let tr = run_repeated(g.clone(), (&hmc, &hmc), 5000, seed).unwrap();
        let Some(absorbed) = detect_absorption(&tr, 10).absorbed else { return Ok(()); };
        if let Ok(w) = wds_converse_witness(&g, absorbed, &WitnessConfig::default()) {
            prop_assert!(w.holds(), "{:?}", w);
            prop_assert_eq!(w.game.payoff(w.deviator, absorbed) - w.game.payoff(w.deviator, w.target), ratio(1, 10));
        }
    }

    #[test]
    fn game_json_round_trip(g in any_game(4)) {
        let text = g.to_json_string();
        prop_assert_eq!(Game::from_json_str(&text).unwrap(), g);
    }

    #[test]
    fn spec_json_round_trip(k in 0usize..5, n in 1usize..4, m in 1usize..4, xs in proptest::collection::vec(-9i64..9, 9)) {
        let bases = [BaseKind::HmcBasic, BaseKind::HmcPareto, BaseKind::MyopicBr, BaseKind::WdsConstant, BaseKind::UniformRandom];
        let table = teachlab::PayoffMatrix::from_fn(n, m, |r, c| ratio(xs[r * 3 + c], 8) + int(1));
        for spec in [common::BASE_SPECS[k].clone(), HeuristicSpec::teacher(bases[k]), HeuristicSpec::teacher_with(bases[k], &table)] {
            let text = serde_json::to_string(&spec).unwrap();
            prop_assert_eq!(serde_json::from_str::<HeuristicSpec>(&text).unwrap(), spec.clone());
            prop_assert_eq!(text.parse::<HeuristicSpec>().unwrap(), spec);
        }
    }
}
