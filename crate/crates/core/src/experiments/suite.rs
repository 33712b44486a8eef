//! Runs every driver, at full size or in a quick mode.

use serde::{Deserialize, Serialize};

use super::drivers::{
    rational_learning_ic_check, verify_calibration, verify_counterexample, verify_cournot, verify_fixtures,
    verify_mixed_play, verify_prop2, verify_prop3, verify_prop4,
};
use super::report::Report;
use crate::engine::{EngineError, SweepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub quick: bool,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { quick: false, seed: 0, parallel: true }
    }
}

impl SuiteConfig {
    /// Quick runs keep the sample sizes, which set the statistical power,
    /// and shorten the runs.
    fn sweep(&self, n: usize, horizon: u64, reps: usize) -> SweepConfig {
        let (horizon, reps) = if self.quick { (horizon.min(10_000), reps.div_ceil(5)) } else { (horizon, reps) };
        SweepConfig { n, horizon, reps, seed: self.seed, parallel: self.parallel, ..SweepConfig::default() }
    }

    pub fn counterexample(&self) -> SweepConfig {
        self.sweep(200, 100_000, 1)
    }

    pub fn prop2(&self) -> SweepConfig {
        self.sweep(200, 100_000, 25)
    }

    pub fn prop3(&self) -> SweepConfig {
        self.sweep(200, 100_000, 5)
    }

    pub fn prop4(&self) -> SweepConfig {
        self.sweep(500, 100_000, 1)
    }

    pub fn calibration(&self) -> SweepConfig {
        // Pure-Nash acceptance and uniform play only need short runs.
        self.sweep(2000, 1000, 2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub reports: Vec<Report>,
}

fn or_failed(name: &str, r: Result<Report, EngineError>) -> Report {
    r.unwrap_or_else(|e| {
        let mut rep = Report::new(name);
        rep.check("completed", false, e.to_string());
        rep
    })
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let reports = vec![
        or_failed("counterexample", verify_counterexample(&cfg.counterexample())),
        verify_fixtures(),
        or_failed("prop2", verify_prop2(&cfg.prop2())),
        or_failed("prop3", verify_prop3(&cfg.prop3())),
        or_failed("prop4", verify_prop4(&cfg.prop4())),
        verify_mixed_play(),
        verify_cournot(4),
        or_failed("calibration", verify_calibration(&cfg.calibration())),
        rational_learning_ic_check(),
    ];
    SuiteReport { passed: reports.iter().all(|r| r.passed), reports }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let r = run_suite(&SuiteConfig { quick: true, seed: 3, parallel: true });
        let failures: Vec<String> = r.reports.iter().flat_map(|r| r.lines()).filter(|l| l.starts_with("FAIL")).collect();
        assert!(r.passed, "{failures:?}");
        assert_eq!(r.reports.len(), 9);
    }

    #[test]
    fn quick_sizes_shrink() {
        let q = SuiteConfig { quick: true, ..SuiteConfig::default() };
        assert_eq!((q.prop4().n, q.prop4().horizon, q.prop2().reps), (500, 10_000, 5));
        assert_eq!(SuiteConfig::default().prop2().reps, 25);
    }
}
