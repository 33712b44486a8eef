//! Learning dynamics in repeated two-player games, strategic teaching, and
//! exact solvers for the stage games.

pub mod analysis;
pub mod engine;
pub mod exact;
pub mod experiments;
pub mod game;
pub mod heuristics;
pub mod lp;

pub use exact::Q;
pub use game::{load_game, ActionProfile, Game, GameError, MixedProfile, PayoffMatrix, Player};
