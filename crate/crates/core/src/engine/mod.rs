//! Seeded repeated play, absorption, limits of means and Monte Carlo
//! averages over classes of games.

mod estimate;
mod sampling;
mod trace;

pub use estimate::{class_average, class_observable, paired_difference, stackelberg_class_average, ClassEstimate, SweepConfig};
pub use sampling::{in_unit_cube, sample_game, sample_games, GameClass, SampledGame};
pub use trace::{
    detect_absorption, limit_of_means, run_repeated, run_states, ConvergenceReport, LimitOfMeans, RunOptions, Trace,
};

use crate::heuristics::HeuristicError;

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_HORIZON: u64 = 100_000;
pub const DEFAULT_REPS: usize = 25;
pub const DEFAULT_GAMES: usize = 200;
pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("class {class} accepted nothing in {draws} draws")]
    BudgetExhausted { class: String, draws: u64 },
    #[error("empty trace")]
    EmptyTrace,
    #[error("{0}")]
    InvalidArgument(String),
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for stream `label` at position `index`:
/// `splitmix64(splitmix64(master ^ fnv1a(label)) ^ index)`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a(label.as_bytes())) ^ index)
}

/// Maps `f` over `0..n`, in parallel when enabled; output is in index order.
pub(crate) fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(7, "game", 0), derive_seed(7, "game", 0));
        assert_ne!(derive_seed(7, "game", 0), derive_seed(7, "game", 1));
        assert_ne!(derive_seed(7, "game", 0), derive_seed(7, "run", 0));
        assert_ne!(derive_seed(7, "game", 0), derive_seed(8, "game", 0));
        // Pinned so that documented seeds keep reproducing the same numbers.
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn map_indexed_keeps_order() {
        assert_eq!(map_indexed(5, true, |i| i * i), vec![0, 1, 4, 9, 16]);
        assert_eq!(map_indexed(5, false, |i| i * i), vec![0, 1, 4, 9, 16]);
    }
}
