//! Recursive-performance ratings for tournaments.
//!
//! Given the matrix of points each player scored against each other player
//! and a linear paired-comparison model (Elo by default), this crate computes
//! the rating vector that reproduces itself under the performance rating:
//! every player's rating is the performance they showed against opponents
//! rated the same way. The result is unique up to a constant shift, which is
//! pinned by keeping the total strength of the initial ratings.
//!
//! The pipeline is:
//!
//! 1. build a [`Tournament`] and [`derive`](Tournament::derive) its matrices,
//! 2. check the comparison graph with [`diagnostics`],
//! 3. solve with [`solver::solve_direct`] or [`solver::iterate`],
//! 4. turn ratings into a [`Ranking`].

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod model;
pub mod ranking;
pub mod simulate;
pub mod solver;
pub mod tournament;

pub use diagnostics::{DiagnosticsReport, SpectralSummary, Structure};
pub use error::{Error, Result};
pub use model::{ModelFamily, RatingModel};
pub use ranking::Ranking;
pub use solver::{IterateOptions, Method, ScoreHandling, SolveOutcome};
pub use tournament::{DerivedMatrices, MatchRecord, StrengthSummary, Tournament};
