//! Browser bindings: analyze a game, watch two heuristics play it, and
//! search teaching cycles in the integer Cournot duopoly.
//!
//! The plain functions return JSON text and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use serde_json::{json, Value};
use teachlab::analysis::solve;
use teachlab::engine::{detect_absorption, limit_of_means, run_repeated, DEFAULT_WINDOW};
use teachlab::exact;
use teachlab::experiments::cournot::{coarse_grid, optimal_cycle_search, DEFAULT_CYCLE_BUDGET};
use teachlab::experiments::fixtures;
use teachlab::heuristics::HeuristicSpec;
use teachlab::{load_game, Game, Player};
use wasm_bindgen::prelude::*;

/// Longest run the page will simulate.
pub const MAX_HORIZON: u64 = 1_000_000;

fn game_from(text: &str) -> Result<Game, String> {
    match text.trim().strip_prefix("fixture:") {
        Some(name) => fixtures::by_name(name).ok_or_else(|| format!("unknown fixture {name:?}")),
        None => load_game(text).map_err(|e| e.to_string()),
    }
}

/// Catalog names and their games, for the picker.
pub fn fixture_catalog() -> String {
    let entries: Vec<Value> = fixtures::catalog()
        .into_iter()
        .filter(|(_, g)| g.shape().0 <= 4)
        .map(|(name, g)| json!({ "name": name, "game": g.to_json_value() }))
        .collect();
    Value::Array(entries).to_string()
}

/// Full solver report for a game given as JSON or `fixture:<name>`.
pub fn analyze_json(game: &str) -> Result<String, String> {
    let g = game_from(game)?;
    serde_json::to_string(&solve(&g)).map_err(|e| e.to_string())
}

/// Plays `horizon` periods and returns running means at up to `points`
/// evenly spaced periods, plus absorption and the exact limit when known.
pub fn simulate_json(game: &str, row: &str, col: &str, horizon: u64, seed: u64, points: usize) -> Result<String, String> {
    let g = game_from(game)?;
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(format!("horizon must be in 1..={MAX_HORIZON}"));
    }
    let rs: HeuristicSpec = row.parse().map_err(|e: teachlab::heuristics::HeuristicError| e.to_string())?;
    let cs: HeuristicSpec = col.parse().map_err(|e: teachlab::heuristics::HeuristicError| e.to_string())?;
    let tr = run_repeated(g.clone(), (&rs, &cs), horizon, seed).map_err(|e| e.to_string())?;
    let stride = (horizon / points.max(1) as u64).max(1);
    let mut sums = [0.0f64; 2];
    let mut series = Vec::new();
    for t in 0..horizon {
        let (r, c) = tr.payoffs(t);
        sums[0] += exact::to_f64(&r);
        sums[1] += exact::to_f64(&c);
        if (t + 1) % stride == 0 || t + 1 == horizon {
            let n = (t + 1) as f64;
            series.push(json!([t + 1, sums[0] / n, sums[1] / n]));
        }
    }
    let lim = limit_of_means(&tr).map_err(|e| e.to_string())?;
    let conv = detect_absorption(&tr, DEFAULT_WINDOW);
    let absorbed = conv.absorbed.map(|p| json!([g.label(Player::Row, p.row), g.label(Player::Col, p.col)]));
    Ok(json!({
        "series": series,
        "absorbed": absorbed,
        "absorption_time": conv.absorption_time,
        "limit": lim.value_f64(),
        "exact": lim.exact_limit.is_some(),
    })
    .to_string())
}

/// Best teaching cycle of length at most `max_len` against a myopic best
/// responder in the integer duopoly, over quantities that are multiples of
/// `step` plus the leader quantity 54.
pub fn cournot_cycle_json(step: usize, max_len: usize) -> Result<String, String> {
    if step == 0 {
        return Err("step must be positive".into());
    }
    let g = fixtures::cournot_109();
    let grid = coarse_grid(108, step, &[54]);
    let c = optimal_cycle_search(&g, Player::Row, &grid, max_len, DEFAULT_CYCLE_BUDGET).map_err(|e| e.to_string())?;
    Ok(json!({
        "cycle": c.labels,
        "average": exact::to_f64(&c.average),
        "leader_value": 1458,
        "grid_points": grid.len(),
        "cycles_examined": c.cycles_examined,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn fixtures_list() -> String {
    fixture_catalog()
}

#[wasm_bindgen]
pub fn analyze(game: &str) -> Result<String, JsError> {
    analyze_json(game).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(game: &str, row: &str, col: &str, horizon: u32, seed: u32, points: u32) -> Result<String, JsError> {
    simulate_json(game, row, col, horizon.into(), seed.into(), points as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cournot_cycle(step: u32, max_len: u32) -> Result<String, JsError> {
    cournot_cycle_json(step as usize, max_len as usize).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn analyze_fixture_and_json() {
        let v = parse(&analyze_json("fixture:u1").unwrap());
        assert_eq!(v["pure_nash"], json!([{"row": 1, "col": 0}]));
        assert_eq!(v["classification"]["generic"], true);
        let doc = fixtures::u2().to_json_string();
        assert_eq!(parse(&analyze_json(&doc).unwrap())["pure_nash"], json!([{"row": 0, "col": 1}]));
        assert!(analyze_json("fixture:nope").is_err());
        assert!(analyze_json("{").is_err());
    }

    #[test]
    fn teaching_run_series() {
        let v = parse(&simulate_json("fixture:u2", "teacher:hmc_basic", "hmc_basic", 1000, 3, 50).unwrap());
        assert_eq!(v["absorbed"], json!(["c", "a"]));
        assert_eq!(v["limit"], json!([15.0, 7.0]));
        let series = v["series"].as_array().unwrap();
        assert_eq!(series.len(), 50);
        assert_eq!(series.last().unwrap()[0], 1000);
        assert!(simulate_json("fixture:u2", "nope", "hmc_basic", 10, 0, 5).is_err());
        assert!(simulate_json("fixture:u2", "hmc_basic", "hmc_basic", 0, 0, 5).is_err());
    }

    #[test]
    fn cycle_search_beats_leader() {
        let v = parse(&cournot_cycle_json(6, 4).unwrap());
        assert_eq!(v["cycle"], json!(["42", "108", "66", "54"]));
        assert!(v["average"].as_f64().unwrap() > 1458.0);
        assert!(cournot_cycle_json(1, 4).is_err());
    }

    #[test]
    fn catalog_skips_large_grids() {
        let v = parse(&fixture_catalog());
        let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
        assert!(names.contains(&"u1") && !names.contains(&"cournot_109"));
    }
}
