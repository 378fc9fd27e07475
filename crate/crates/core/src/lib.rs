//! Reach-avoid games between Dubins-car pursuers and simple-motion evaders
//! defending the half-plane `y ≤ 0`.
//!
//! Pairwise winning certificates feed a bipartite maximum matching that is
//! recomputed as the game evolves.

pub mod certificates;
pub mod cli;
pub mod error;
pub mod evasion;
pub mod geometry;
pub mod matching;
pub mod model;
pub mod numerics;
pub mod sim;
pub mod strategy;

pub use error::{GameError, Result};
pub use geometry::Vec2;
pub use model::{EvaderState, GameParams, JointState, PursuerState, Scenario};
