//! Fixture catalog and drivers that check the counterexamples and
//! propositions end to end.

pub mod cournot;
pub mod drivers;
pub mod fixtures;
pub mod report;
pub mod suite;
pub mod witness;

pub use drivers::{
    pure_nash_pattern_share, rational_learning_ic_check, verify_calibration, verify_counterexample, verify_cournot,
    verify_fixtures, verify_mixed_play, verify_prop2, verify_prop3, verify_prop4,
};
pub use report::{Check, Report};
pub use suite::{run_suite, SuiteConfig, SuiteReport};
pub use witness::{wds_converse_witness, Witness, WitnessConfig, WitnessError};
