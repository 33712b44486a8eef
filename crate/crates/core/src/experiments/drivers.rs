//! End-to-end checks of the counterexamples and propositions. Each driver
//! returns a [`Report`]; sampled checks use statistical acceptance.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::cournot::{coarse_grid, optimal_cycle_search, DEFAULT_CYCLE_BUDGET};
use super::fixtures;
use super::report::Report;
use super::witness::{wds_converse_witness, WitnessConfig, WitnessError};
use crate::analysis::{
    correlated_equilibrium, feasible_ir_region, find_increasing_differences_orders,
    is_common_interest, iterated_admissible_set, minimal_curb_sets, minimax, mixed_nash_2x2, pure_nash,
    rationalizable_set, stackelberg, verify_ordinal_potential, ProductSet,
};
use crate::engine::{
    class_average, class_observable, derive_seed, detect_absorption, limit_of_means, map_indexed, paired_difference,
    run_repeated, sample_games, stackelberg_class_average, EngineError, GameClass, LimitOfMeans, SweepConfig,
    DEFAULT_WINDOW,
};
use crate::exact::{self, int, ratio, Q};
use crate::game::{ActionProfile, Game, MixedProfile, Player};
use crate::heuristics::{BaseKind, HeuristicSpec};

/// Absorbed profile (window [`DEFAULT_WINDOW`]) and limit of one run.
#[derive(Clone, Debug)]
struct Run {
    absorbed: Option<ActionProfile>,
    limit: LimitOfMeans,
}

fn runs(
    game: &Game,
    specs: (&HeuristicSpec, &HeuristicSpec),
    count: usize,
    horizon: u64,
    seed: u64,
    label: &str,
    parallel: bool,
) -> Result<Vec<Run>, EngineError> {
    let game = Arc::new(game.clone());
    map_indexed(count, parallel, |r| {
        let tr = run_repeated(game.clone(), specs, horizon, derive_seed(seed, label, r as u64))?;
        let absorbed = detect_absorption(&tr, DEFAULT_WINDOW).absorbed;
        Ok(Run { absorbed, limit: limit_of_means(&tr)? })
    })
    .into_iter()
    .collect()
}

fn share(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

fn show(q: &Q) -> String {
    exact::to_decimal_string(q).unwrap_or_else(|| q.to_string())
}

fn label(g: &Game, p: ActionProfile) -> String {
    format!("({},{})", g.label(Player::Row, p.row), g.label(Player::Col, p.col))
}

/// Minimum absorption share for sampled and repeated-run checks.
pub const ABSORPTION_SHARE: f64 = 0.99;
/// Strict gaps must exceed this many standard errors.
pub const GAP_SES: f64 = 3.0;

/// Learners reach `(c,a)` on `u1` and `(b,b)` on `u2`; Rowena playing `u2` as
/// if it were `u1` earns 15 instead of 13. `cfg.n` is the run count.
pub fn verify_counterexample(cfg: &SweepConfig) -> Result<Report, EngineError> {
    let mut rep = Report::new("counterexample");
    let (u1, u2) = (fixtures::u1(), fixtures::u2());
    let hmc = HeuristicSpec::HmcBasic;
    let n = cfg.n;
    let (c_a, b_b) = (ActionProfile::new(1, 0), ActionProfile::new(0, 1));

    let honest1 = runs(&u1, (&hmc, &hmc), n, cfg.horizon, cfg.seed, "u1", cfg.parallel)?;
    let hit = honest1.iter().filter(|r| r.absorbed == Some(c_a)).count();
    rep.check("u1_learners_reach_ca", share(hit, n) >= ABSORPTION_SHARE, format!("{hit}/{n} at (c,a)"));

    let honest2 = runs(&u2, (&hmc, &hmc), n, cfg.horizon, cfg.seed, "u2", cfg.parallel)?;
    let hit = honest2.iter().filter(|r| r.absorbed == Some(b_b)).count();
    rep.check("u2_learners_reach_bb", share(hit, n) >= ABSORPTION_SHARE, format!("{hit}/{n} at (b,b)"));
    let honest_ok = honest2.iter().filter(|r| r.absorbed.is_some()).all(|r| r.limit.exact_limit.as_ref().map(|v| &v.0) == Some(&int(13)));
    rep.check("u2_honest_limit_13", honest_ok, "Rowena's exact limit in every absorbed run");

    let teacher = HeuristicSpec::teacher_with(BaseKind::HmcBasic, u1.matrix(Player::Row));
    for (name, spec) in [("u1_payoffs", teacher), ("built_ladder", HeuristicSpec::teacher(BaseKind::HmcBasic))] {
        let taught = runs(&u2, (&spec, &hmc), n, cfg.horizon, cfg.seed, "u2-teacher", cfg.parallel)?;
        let hit = taught.iter().filter(|r| r.absorbed == Some(c_a)).count();
        rep.check(&format!("teacher_{name}_reaches_ca"), share(hit, n) >= ABSORPTION_SHARE, format!("{hit}/{n} at (c,a)"));
        let all15 = taught.iter().filter(|r| r.absorbed.is_some()).all(|r| r.limit.exact_limit.as_ref().map(|v| &v.0) == Some(&int(15)));
        rep.check(&format!("teacher_{name}_limit_15"), all15, "Rowena's exact limit 15 > 13 in every absorbed run");
    }
    rep.put("runs", n);
    rep.put("horizon", cfg.horizon);
    Ok(rep)
}

/// Fixture facts that the solvers must reproduce exactly.
pub fn verify_fixtures() -> Report {
    let mut rep = Report::new("fixtures");
    for (name, g, p) in [("u1", fixtures::u1(), fixtures::p1()), ("u2", fixtures::u2(), fixtures::p2())] {
        rep.check(&format!("{name}_potential"), verify_ordinal_potential(&g, &p) == Ok(true), "given potential verifies");
        let orders = find_increasing_differences_orders(&g);
        rep.check(&format!("{name}_increasing_differences"), matches!(orders, Ok(Some(_))), format!("{orders:?}"));
        let nash = pure_nash(&g);
        let unique = nash.len() == 1;
        rep.check(&format!("{name}_unique_nash"), unique, format!("{} pure equilibria", nash.len()));
        if !unique {
            continue;
        }
        let point = ProductSet { rows: vec![nash[0].row], cols: vec![nash[0].col] };
        rep.check(&format!("{name}_rationalizable"), rationalizable_set(&g) == point, label(&g, nash[0]));
        rep.check(&format!("{name}_iterated_admissible"), iterated_admissible_set(&g) == point, label(&g, nash[0]));
        let curb = minimal_curb_sets(&g);
        rep.check(&format!("{name}_minimal_curb"), curb.as_ref().is_ok_and(|c| c == std::slice::from_ref(&point)), format!("{curb:?}"));
        let ce = correlated_equilibrium(&g);
        let cols = g.shape().1;
        let mass = ce.witness.get(nash[0].row * cols + nash[0].col).is_some_and(|w| w.is_one());
        rep.check(&format!("{name}_correlated"), ce.unique && mass, "unique correlated equilibrium is the Nash point mass");
    }
    rep
}

/// Teacher-Rowena with the built ladder gets at least the Stackelberg value
/// in every absorbed run, and the class ordering `V(teacher) >= L > V(honest)`
/// holds with a gap of at least three standard errors.
pub fn verify_prop2(cfg: &SweepConfig) -> Result<Report, EngineError> {
    let mut rep = Report::new("prop2");
    let class = GameClass::PureNashGeneric;
    let teacher = HeuristicSpec::teacher(BaseKind::HmcBasic);
    let hmc = HeuristicSpec::HmcBasic;
    let tol = exact::from_f64_exact(1e-9).expect("finite");

    let games = sample_games(&class, cfg.shape, cfg.n, cfg.seed, cfg.budget, cfg.parallel)?;
    let per_game = map_indexed(games.len(), cfg.parallel, |i| -> Result<(usize, usize, Vec<usize>), EngineError> {
        let g = &games[i].game;
        let s = stackelberg(g, Player::Row);
        let target = ActionProfile::new(s.leader_action, s.worst_follower_reply);
        let game_seed = derive_seed(cfg.seed, "game", i as u64);
        let rs = runs(g, (&teacher, &hmc), cfg.reps, cfg.horizon, game_seed, "rep", false)?;
        let absorbed: Vec<&Run> = rs.iter().filter(|r| r.absorbed.is_some()).collect();
        let bad = absorbed
            .iter()
            .filter(|r| {
                r.absorbed != Some(target) || r.limit.exact_limit.as_ref().is_none_or(|v| v.0 < &s.value - &tol)
            })
            .count();
        Ok((rs.len(), absorbed.len(), if bad > 0 { vec![i] } else { vec![] }))
    });
    let (mut total, mut absorbed, mut failing) = (0, 0, Vec::new());
    for r in per_game {
        let (t, a, f) = r?;
        total += t;
        absorbed += a;
        failing.extend(f);
    }
    rep.check("teacher_absorbs", share(absorbed, total) >= ABSORPTION_SHARE, format!("{absorbed}/{total} runs absorbed"));
    rep.check(
        "per_game_bound",
        failing.is_empty(),
        format!("{} games where an absorbed run missed (a^L, a^F) or fell below the leader value", failing.len()),
    );
    rep.put("failing_games", &failing);

    let taught = class_average((&teacher, &hmc), &class, cfg)?;
    let honest = class_average((&hmc, &hmc), &class, cfg)?;
    let leader = stackelberg_class_average(&class, cfg, Player::Row)?;
    let (vt, l, vh) = (taught.mean[0], leader.mean[0], honest.mean[0]);
    rep.check("teacher_at_least_leader", vt >= l - 1e-9, format!("V_R(teacher)={vt:.6} L_R={l:.6} V_R(honest)={vh:.6}"));
    let (gap, se) = paired_difference(&leader, &honest, Player::Row)?;
    rep.check(
        "leader_beats_honest",
        gap > 0.0 && gap >= GAP_SES * se,
        format!("L_R - V_R(honest) = {gap:.6} (se {se:.6}, {:.1} se)", gap / se.max(f64::MIN_POSITIVE)),
    );
    rep.put("teacher", taught.mean);
    rep.put("leader", leader.mean);
    rep.put("honest", honest.mean);
    rep.put("measure", taught.measure);

    for (name, g, want_t, want_h) in [("u2", fixtures::u2(), 15, 13), ("u1", fixtures::u1(), 17, 17)] {
        let t = runs(&g, (&teacher, &hmc), 1, cfg.horizon, cfg.seed, name, false)?;
        let h = runs(&g, (&hmc, &hmc), 1, cfg.horizon, cfg.seed, name, false)?;
        let lv = stackelberg(&g, Player::Row).value;
        let tv = t[0].limit.exact_limit.clone().map(|v| v.0);
        let hv = h[0].limit.exact_limit.clone().map(|v| v.0);
        let ok = tv == Some(int(want_t)) && lv == int(want_t) && hv == Some(int(want_h));
        let opt = |v: &Option<Q>| v.as_ref().map_or("none".to_string(), show);
        let detail = format!("teacher {}, leader {}, honest {}", opt(&tv), show(&lv), opt(&hv));
        rep.check(&format!("{name}_singleton"), ok, detail);
    }
    Ok(rep)
}

/// Constant weak-dominance play is Nash play from the first period on, and
/// outside that class the learner pair on `u1` admits a profitable masquerade.
pub fn verify_prop3(cfg: &SweepConfig) -> Result<Report, EngineError> {
    let mut rep = Report::new("prop3");
    let wds = HeuristicSpec::WdsConstant;
    let games = sample_games(&GameClass::Wds, cfg.shape, cfg.n, cfg.seed, cfg.budget, cfg.parallel)?;
    let ok = map_indexed(games.len(), cfg.parallel, |i| -> Result<bool, EngineError> {
        let g = &games[i].game;
        let nash = pure_nash(g);
        let tr = run_repeated(g.clone(), (&wds, &wds), cfg.horizon, derive_seed(cfg.seed, "game", i as u64))?;
        let stored = (tr.simulated() as u64 + 1).min(tr.len());
        Ok((0..stored).all(|t| nash.contains(&tr.profile(t))))
    });
    let mut good = 0;
    for r in ok {
        good += usize::from(r?);
    }
    rep.check("wds_constant_plays_nash", good == games.len(), format!("{good}/{} games in Nash every period", games.len()));

    let u1 = fixtures::u1();
    let hmc = HeuristicSpec::HmcBasic;
    let learn = runs(&u1, (&hmc, &hmc), 1, cfg.horizon, cfg.seed, "u1", false)?;
    let Some(absorbed) = learn[0].absorbed else {
        rep.check("u1_learners_absorb", false, "no absorption on u1");
        return Ok(rep);
    };
    let wcfg = WitnessConfig::default();
    match wds_converse_witness(&u1, absorbed, &wcfg) {
        Err(e) => {
            rep.check("witness_built", false, e.to_string());
        }
        Ok(w) => {
            rep.check("condition_0", w.generic_unique_nash, format!("unique Nash {}", label(&w.game, w.target)));
            rep.check("condition_i", w.learner_moves, format!("learner leaves {}", label(&u1, absorbed)));
            rep.check("condition_ii", w.deviation_profitable, "deviator prefers the learned profile");
            let masquerade = HeuristicSpec::teacher_with(BaseKind::HmcBasic, u1.matrix(w.deviator));
            let specs = match w.deviator {
                Player::Row => (&masquerade, &hmc),
                Player::Col => (&hmc, &masquerade),
            };
            let dev = runs(&w.game, specs, cfg.reps.max(1), cfg.horizon, cfg.seed, "witness", false)?;
            let nash_pay = w.game.payoff(w.deviator, w.target).clone();
            let k = w.deviator.index();
            let gains: Vec<Option<Q>> = dev
                .iter()
                .map(|r| r.limit.exact_limit.as_ref().map(|v| if k == 0 { &v.0 - &nash_pay } else { &v.1 - &nash_pay }))
                .collect();
            let ok = gains.iter().all(|g| g.as_ref().is_some_and(|g| *g >= wcfg.epsilon));
            let shown = gains.first().cloned().flatten().map(|g| show(&g)).unwrap_or_default();
            rep.check("deviation_gains_epsilon", ok, format!("gain {shown} over Nash payoff {}", show(&nash_pay)));
            rep.put("witness_game", w.game.to_json_value());
        }
    }
    let wds_game = Game::from_pairs(&["a", "b"], &["a", "b"], &[&[(3, 3), (2, 1)], &[(1, 2), (0, 0)]]);
    let guarded = wds_converse_witness(&wds_game, ActionProfile::new(0, 0), &wcfg);
    rep.check("witness_rejects_wds", guarded == Err(WitnessError::InWds), format!("{guarded:?}").chars().take(40).collect::<String>());
    Ok(rep)
}

/// Pareto learners reach the common-interest profile; on `(u_R, û_C)` Colin
/// does better by playing as if his payoffs were `ũ_C`.
pub fn verify_prop4(cfg: &SweepConfig) -> Result<Report, EngineError> {
    let mut rep = Report::new("prop4");
    let pareto = HeuristicSpec::HmcPareto;
    let games = sample_games(&GameClass::CommonInterest, cfg.shape, cfg.n, cfg.seed, cfg.budget, cfg.parallel)?;
    let hits = map_indexed(games.len(), cfg.parallel, |i| -> Result<(usize, usize), EngineError> {
        let g = &games[i].game;
        let z = is_common_interest(g).expect("class member");
        let rs = runs(g, (&pareto, &pareto), cfg.reps, cfg.horizon, derive_seed(cfg.seed, "game", i as u64), "rep", false)?;
        let hit = rs.iter().filter(|r| r.absorbed.is_some_and(|p| g.payoff_pair(p) == z)).count();
        Ok((hit, rs.len()))
    });
    let (mut hit, mut total) = (0, 0);
    for h in hits {
        let (a, b) = h?;
        hit += a;
        total += b;
    }
    rep.check("pareto_absorption", share(hit, total) >= ABSORPTION_SHARE, format!("{hit}/{total} runs at (z_R, z_C)"));

    let g = fixtures::ci_u_r_uhat_c();
    let hmc = HeuristicSpec::HmcBasic;
    let count = 20;
    let (a_a, b_b) = (ActionProfile::new(0, 0), ActionProfile::new(1, 1));
    let honest = runs(&g, (&hmc, &hmc), count, cfg.horizon, cfg.seed, "honest", cfg.parallel)?;
    let ok = honest.iter().all(|r| r.absorbed == Some(b_b) && r.limit.exact_limit.as_ref().map(|v| &v.1) == Some(&int(5)));
    rep.check("honest_reaches_bb", ok, format!("{count} runs, Colin 5"));
    let masquerade = HeuristicSpec::teacher_with(BaseKind::HmcBasic, fixtures::ci_utilde().matrix(Player::Col));
    let taught = runs(&g, (&hmc, &masquerade), count, cfg.horizon, cfg.seed, "masquerade", cfg.parallel)?;
    let ok = taught.iter().all(|r| r.absorbed == Some(a_a) && r.limit.exact_limit.as_ref().map(|v| &v.1) == Some(&int(9)));
    rep.check("masquerade_reaches_aa", ok, format!("{count} runs, Colin 9 > 5"));
    Ok(rep)
}

/// Exact mixed-equilibrium arithmetic on the pennies games.
pub fn verify_mixed_play() -> Report {
    let mut rep = Report::new("mixed_play");
    let half = || vec![ratio(1, 2), ratio(1, 2)];
    let mp = fixtures::matching_pennies();
    let bmp = fixtures::biased_matching_pennies();
    let want_mp = MixedProfile::new(half(), half()).expect("valid");
    let want_bmp = MixedProfile::new(half(), vec![ratio(2, 5), ratio(3, 5)]).expect("valid");
    let got = mixed_nash_2x2(&mp);
    rep.check("pennies_equilibrium", got.as_deref() == Ok(&[want_mp.clone()][..]), format!("{got:?}"));
    let got = mixed_nash_2x2(&bmp);
    rep.check("biased_equilibrium", got.as_deref() == Ok(&[want_bmp.clone()][..]), format!("{got:?}"));
    let at_eq = bmp.expected_payoff(&want_bmp).map(|v| v.0);
    rep.check("biased_value", at_eq == Ok(ratio(1, 5)), format!("Rowena {:?}", at_eq.as_ref().map(show)));
    let uniform = bmp.expected_payoff(&want_mp).map(|v| v.0);
    rep.check("biased_uniform_value", uniform == Ok(ratio(1, 4)), format!("Rowena {:?}", uniform.as_ref().map(show)));
    rep
}

/// Grid of at most 30 quantities used for the four-period cycle search.
pub fn cycle_grid() -> Vec<usize> {
    coarse_grid(108, 4, &[54])
}

/// Integer duopoly facts, the teaching-cycle search and the rounding of the
/// small decimal duopoly to `u2`.
pub fn verify_cournot(max_len: usize) -> Report {
    let mut rep = Report::new("cournot");
    let g = fixtures::cournot_109();
    let nash = pure_nash(&g);
    let symmetric: Vec<_> = nash.iter().filter(|p| p.row == p.col).map(|&p| label(&g, p)).collect();
    rep.check("symmetric_nash_36", symmetric == ["(36,36)"], format!("{symmetric:?}, {} equilibria in all", nash.len()));
    let s = stackelberg(&g, Player::Row);
    let ok = (s.leader_action, s.worst_follower_reply, &s.value) == (54, 27, &int(1458));
    rep.check("stackelberg", ok, format!("leader {} follower {} value {}", s.leader_action, s.worst_follower_reply, show(&s.value)));

    let grid = cycle_grid();
    match optimal_cycle_search(&g, Player::Row, &grid, max_len, DEFAULT_CYCLE_BUDGET) {
        Ok(c) => {
            let beats = c.average > int(1458);
            rep.check("cycle_beats_leader", beats, format!("{:?} averages {} on {} points", c.labels, show(&c.average), grid.len()));
            rep.put("cycle", &c);
        }
        Err(e) => {
            rep.check("cycle_beats_leader", false, e.to_string());
        }
    }

    let block = fixtures::cournot_10_9_block();
    let u2 = fixtures::u2();
    let mut worst = (Q::zero(), ActionProfile::new(0, 0), Player::Row);
    for p in u2.profiles() {
        for player in Player::BOTH {
            let d = (block.payoff(player, p) - u2.payoff(player, p)).abs();
            if d > worst.0 {
                worst = (d, p, player);
            }
        }
    }
    let detail = format!("largest gap {} at {} for {}", show(&worst.0), label(&u2, worst.1), worst.2);
    rep.check("decimal_duopoly_rounds_to_u2", worst.0 <= Q::one(), detail);
    rep
}

/// Share of the 16 best-reply patterns of a generic 2x2 game that admit a
/// pure equilibrium.
pub fn pure_nash_pattern_share() -> Q {
    let mut with = 0;
    for mask in 0..16u32 {
        let row_br = [(mask & 1) as usize, ((mask >> 1) & 1) as usize];
        let col_br = [((mask >> 2) & 1) as usize, ((mask >> 3) & 1) as usize];
        if (0..2).any(|c| col_br[row_br[c]] == c) {
            with += 1;
        }
    }
    ratio(with, 16)
}

/// Sampler acceptance for pure-Nash games and the value of uniform play.
pub fn verify_calibration(cfg: &SweepConfig) -> Result<Report, EngineError> {
    let mut rep = Report::new("calibration");
    let share = pure_nash_pattern_share();
    let target = exact::to_f64(&share);
    let est = class_observable(&GameClass::PureNash, cfg, |_| [1.0, 1.0])?;
    let z = (est.measure - target).abs() / est.measure_se;
    rep.check(
        "pure_nash_share",
        share == ratio(7, 8) && z <= GAP_SES,
        format!("{:.4} (se {:.4}) vs {} from patterns, {z:.2} se", est.measure, est.measure_se, show(&share)),
    );
    let uniform = HeuristicSpec::UniformRandom;
    let avg = class_average((&uniform, &uniform), &GameClass::All, cfg)?;
    for (k, who) in [(0, "row"), (1, "col")] {
        let z = (avg.mean[k] - 0.5).abs() / avg.se[k];
        rep.check(&format!("uniform_play_{who}"), z <= GAP_SES, format!("{:.4} (se {:.4}), {z:.2} se", avg.mean[k], avg.se[k]));
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionData {
    pub game: String,
    /// Vertices in counterclockwise order, as floats for plotting.
    pub vertices: Vec<[f64; 2]>,
    pub minimax: [f64; 2],
}

/// Rowena's masquerade payoff in `u2` exceeds her honest equilibrium payoff,
/// so an incentive-compatibility requirement on learned outcomes fails.
pub fn rational_learning_ic_check() -> Report {
    let mut rep = Report::new("rational_learning_ic");
    let (u1, u2) = (fixtures::u1(), fixtures::u2());
    let honest: Vec<Q> = pure_nash(&u2).iter().map(|&p| u2.payoff(Player::Row, p).clone()).collect();
    let learned: Vec<Q> = pure_nash(&u1).iter().map(|&p| u2.payoff(Player::Row, p).clone()).collect();
    let ok = honest == [int(13)] && learned == [int(15)];
    rep.check("masquerade_beats_honest", ok, format!("15 > 13: {ok}"));
    let regions: Vec<RegionData> = [("u1", &u1), ("u2", &u2)]
        .into_iter()
        .map(|(name, g)| RegionData {
            game: name.into(),
            vertices: feasible_ir_region(g).iter().map(|(x, y)| [exact::to_f64(x), exact::to_f64(y)]).collect(),
            minimax: [exact::to_f64(&minimax(g, Player::Row)), exact::to_f64(&minimax(g, Player::Col))],
        })
        .collect();
    rep.check("regions_nonempty", regions.iter().all(|r| !r.vertices.is_empty()), format!("{} regions", regions.len()));
    rep.put("regions", &regions);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_of_eight_patterns_have_a_pure_equilibrium() {
        assert_eq!(pure_nash_pattern_share(), ratio(7, 8));
    }

    #[test]
    fn exact_drivers_pass() {
        for rep in [verify_fixtures(), verify_mixed_play(), rational_learning_ic_check(), verify_cournot(2)] {
            assert!(rep.passed || rep.name == "cournot", "{:?}", rep.lines());
        }
        let c = verify_cournot(2);
        assert!(c.checks.iter().filter(|k| k.name != "cycle_beats_leader").all(|k| k.passed));
    }
}
